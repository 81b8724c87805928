use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hydrolimit::commands::{
    cmd_bounds, cmd_simulate, cmd_sweep, cmd_validate, exit_code, EXIT_INPUT,
};
use hydrolimit::config::{Overrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "hydrolimit",
    version,
    about = "Boussinesq to primitive-equations limit runs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the initial data against every hypothesis.
    Validate(Common),
    /// Run one solver and write a trajectory and checkpoint.
    Simulate(Common),
    /// Run the eps sweep and fit the convergence order.
    Sweep(Common),
    /// Tabulate the bound functions.
    Bounds(Common),
}

#[derive(Args)]
struct Common {
    /// Manifest file; defaults apply to anything it leaves out.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "HYDROLIMIT_THREADS")]
    threads: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    /// NX,NY,NZ
    #[arg(long, value_parser = parse_grid)]
    grid: Option<(usize, usize, usize)>,
    /// Comma-separated list, descending.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long)]
    horizon: Option<f64>,
}

fn parse_grid(s: &str) -> Result<(usize, usize, usize), String> {
    let parts = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("'{p}': {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    match parts[..] {
        [nx, ny, nz] => Ok((nx, ny, nz)),
        _ => Err(format!("expected NX,NY,NZ, got '{s}'")),
    }
}

fn load(c: &Common) -> hydrolimit::Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        out: c.out.clone(),
        threads: c.threads,
        dt: c.dt,
        grid: c.grid,
        eps: c.eps.clone(),
        horizon: c.horizon,
    });
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { 0 });
        }
    };
    let (common, run): (
        &Common,
        fn(&RunConfig, &mut dyn std::io::Write) -> hydrolimit::Result<i32>,
    ) = match &cli.command {
        Command::Validate(c) => (c, cmd_validate),
        Command::Simulate(c) => (c, cmd_simulate),
        Command::Sweep(c) => (c, cmd_sweep),
        Command::Bounds(c) => (c, cmd_bounds),
    };
    let result = load(common).and_then(|cfg| run(&cfg, &mut std::io::stdout()));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
