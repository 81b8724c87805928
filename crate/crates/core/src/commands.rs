//! The four command-line operations, writing human-readable output to any
//! [`Write`] sink and files under the configured output directory.
//!
//! Exit codes: 0 success, 1 hypothesis violation, 2 bad input (parse,
//! validation or I/O), 3 solver failure (blow-up or CFL), 4 failed
//! acceptance check.

use std::io::Write;
use std::path::Path;

use crate::boussinesq::BoussinesqStepper;
use crate::config::{RunConfig, Solver};
use crate::diagnostics::{BoundRow, Recorder};
use crate::error::{Error, Result};
use crate::harness::{
    emit_report, run_sweep, write_series, write_timing, ConvergenceReport, Criteria, DtPolicy,
    ReportMeta, RowStatus, SweepPlan,
};
use crate::io::{read_checkpoint, write_checkpoint, CheckpointManifest};
use crate::primitive::PrimitiveStepper;
use crate::scheme::StepDiagnostics;
use crate::state::{check_initial_data, PhysicalParams, State};

pub const EXIT_OK: i32 = 0;
pub const EXIT_HYPOTHESIS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_CHECKS: i32 = 4;

/// Exit code for an error that aborted a command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Hypothesis(_) => EXIT_HYPOTHESIS,
        Error::BlowUp(_) | Error::Cfl { .. } => EXIT_SOLVER,
        Error::Fit(_) => EXIT_CHECKS,
        _ => EXIT_INPUT,
    }
}

fn out_err(e: std::io::Error) -> Error {
    Error::io(Path::new("<stdout>"), e)
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Print the hypothesis checklist; exit 0 iff every check passes.
pub fn cmd_validate(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let report = cfg.initial_report()?;
    let source = match &cfg.initial.file {
        Some(p) => p.display().to_string(),
        None => format!("profile '{}'", cfg.initial.profile),
    };
    writeln!(out, "initial data: {source} on {:?}", cfg.grid()?.shape()).map_err(out_err)?;
    for c in &report.checks {
        let mark = match (c.skipped, c.passed) {
            (true, _) => "skip",
            (false, true) => "pass",
            (false, false) => "FAIL",
        };
        write!(
            out,
            "  [{mark}] {:<24} residual {:.3e}",
            c.hypothesis.label(),
            c.residual
        )
        .map_err(out_err)?;
        if !c.passed {
            write!(out, "  modes {:?}", c.offending_modes).map_err(out_err)?;
        }
        writeln!(out).map_err(out_err)?;
    }
    Ok(if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_HYPOTHESIS
    })
}

enum Stepper {
    Boussinesq(BoussinesqStepper),
    Primitive(PrimitiveStepper),
}

impl Stepper {
    fn step(&mut self, s: &State) -> Result<State> {
        match self {
            Stepper::Boussinesq(st) => st.step(s),
            Stepper::Primitive(st) => st.step(s),
        }
    }

    fn diagnostics(&self) -> StepDiagnostics {
        match self {
            Stepper::Boussinesq(st) => st.last_diagnostics(),
            Stepper::Primitive(st) => st.last_diagnostics(),
        }
    }
}

/// Starting state: a validated checkpoint when resuming, else the initial data.
fn start_state(cfg: &RunConfig) -> Result<(State, usize)> {
    match cfg.resume_path() {
        Some(path) => {
            let (s, m) = read_checkpoint(&path)?;
            if s.grid() != cfg.grid()? {
                return Err(Error::GridMismatch(format!(
                    "checkpoint grid {:?} differs from [grid] {:?}",
                    s.grid().shape(),
                    cfg.grid()?.shape()
                )));
            }
            if m.solver != cfg.run.solver.name() {
                return Err(Error::Config(format!(
                    "checkpoint was written by the {} solver, not {}",
                    m.solver,
                    cfg.run.solver.name()
                )));
            }
            let report = check_initial_data(&s.v, &s.theta, cfg.validation_options())?;
            if !report.all_passed() {
                return Err(Error::Hypothesis(report));
            }
            Ok((s, m.steps))
        }
        None => Ok((State::from_initial(&cfg.initial_data()?)?, 0)),
    }
}

/// Run one solver to `[run] horizon`, writing `trajectory.csv`, `run.toml`
/// and the checkpoint `final.{bin,toml}`. A blow-up still writes the partial
/// trajectory before returning the error.
pub fn cmd_simulate(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let grid = cfg.grid()?;
    let (mut state, steps0) = start_state(cfg)?;
    let dt = cfg.run.dt;
    let mut stepper = match cfg.run.solver {
        Solver::Boussinesq => Stepper::Boussinesq(
            BoussinesqStepper::new(PhysicalParams::scaled(cfg.run.eps)?, grid, dt)?
                .with_max_cfl(cfg.run.max_cfl),
        ),
        Solver::Primitive => {
            Stepper::Primitive(PrimitiveStepper::new(grid, dt)?.with_max_cfl(cfg.run.max_cfl))
        }
    };
    let dir = cfg.output_dir();
    create_dir(&dir)?;
    let hash = cfg.hash();
    let run_toml = dir.join("run.toml");
    std::fs::write(
        &run_toml,
        format!("# config_hash = \"{hash}\"\n{}", cfg.to_toml()),
    )
    .map_err(|e| Error::io(&run_toml, e))?;

    writeln!(
        out,
        "{} solver, grid {:?}, dt {dt}, t {} -> {}",
        cfg.run.solver.name(),
        grid.shape(),
        state.time,
        cfg.run.horizon
    )
    .map_err(out_err)?;
    let mut recorder = Recorder::new(&state);
    let mut worst = StepDiagnostics::default();
    let mut steps = 0;
    let mut failure = None;
    while state.time < cfg.run.horizon - 0.1 * dt {
        match stepper.step(&state) {
            Ok(next) => state = next,
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
        steps += 1;
        recorder.record(&state)?;
        let d = stepper.diagnostics();
        worst.parity_drift = worst.parity_drift.max(d.parity_drift);
        worst.divergence_residual = worst.divergence_residual.max(d.divergence_residual);
        worst.max_speed = worst.max_speed.max(d.max_speed);
        worst.cfl = worst.cfl.max(d.cfl);
    }
    let record = recorder.finish();
    record.write_csv(&dir.join("trajectory.csv"), cfg.output.record_stride)?;
    if let Some(e) = failure {
        writeln!(out, "stopped after {steps} steps at t = {}", state.time).map_err(out_err)?;
        return Err(e);
    }
    let manifest = CheckpointManifest {
        t: state.time,
        eps: matches!(cfg.run.solver, Solver::Boussinesq).then_some(cfg.run.eps),
        dt,
        scheme: cfg.run.scheme.clone(),
        solver: cfg.run.solver.name().into(),
        steps: steps0 + steps,
        config_hash: hash,
        coefficients: String::new(),
    };
    let ckpt = write_checkpoint(&dir, "final", &state, &manifest)?;
    let last = record
        .last()
        .expect("record holds the initial sample")
        .norms;
    writeln!(out, "{steps} steps, final t = {}", state.time).map_err(out_err)?;
    writeln!(
        out,
        "final |v| {:.6e}  |w| {:.6e}  |theta| {:.6e}",
        last.v_l2, last.w_l2, last.theta_l2
    )
    .map_err(out_err)?;
    writeln!(
        out,
        "max per-step parity drift {:.2e}, divergence residual {:.2e}, CFL {:.3}",
        worst.parity_drift, worst.divergence_residual, worst.cfl
    )
    .map_err(out_err)?;
    writeln!(
        out,
        "wrote {} and {}",
        dir.join("trajectory.csv").display(),
        ckpt.display()
    )
    .map_err(out_err)?;
    Ok(EXIT_OK)
}

/// Build the sweep plan described by `cfg`.
pub fn sweep_plan(cfg: &RunConfig) -> Result<SweepPlan> {
    if cfg.sweep.eps.len() < 3 {
        return Err(Error::Fit(format!(
            "a rate needs at least 3 eps values, the sweep lists {}",
            cfg.sweep.eps.len()
        )));
    }
    let dt = if cfg.sweep.dt_per_eps.is_empty() {
        DtPolicy::Fixed(cfg.run.dt)
    } else {
        DtPolicy::PerEps(cfg.sweep.dt_per_eps.clone())
    };
    let mut plan = SweepPlan::new(
        cfg.sweep.eps.clone(),
        dt,
        cfg.run.horizon,
        cfg.initial_data()?,
    )?
    .with_max_cfl(cfg.run.max_cfl);
    if let Some(n) = cfg.output.threads {
        plan = plan.with_threads(n);
    }
    Ok(plan)
}

fn initial_label(cfg: &RunConfig) -> String {
    match &cfg.initial.file {
        Some(p) => format!("file {}", p.display()),
        None => format!(
            "{} (velocity {}, temperature {})",
            cfg.initial.profile, cfg.initial.velocity, cfg.initial.temperature
        ),
    }
}

/// Run the ε sweep and write the report; exit 0 iff every check passes.
pub fn cmd_sweep(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let plan = sweep_plan(cfg)?;
    let dir = cfg.output_dir();
    create_dir(&dir)?;
    let outcome = run_sweep(&plan)?;
    let meta = ReportMeta::for_plan(&plan, &initial_label(cfg), &cfg.hash());
    let criteria = Criteria {
        min_slope: cfg.tolerances.min_slope,
        max_residual: cfg.tolerances.max_fit_residual,
        ..Criteria::default()
    };
    let report = ConvergenceReport::from_rows(meta, outcome.rows.clone(), criteria);
    emit_report(&report, &dir)?;
    write_timing(&outcome.rows, &outcome.seconds, &dir.join("timing.csv"))?;
    for (row, series) in outcome.rows.iter().zip(&outcome.series) {
        write_series(series, &dir.join(format!("difference_eps{}.csv", row.eps)))?;
    }

    writeln!(
        out,
        "{:>8} {:>8} {:>12} {:>12} {:>12}",
        "eps", "status", "sup_l2", "int_grad", "E"
    )
    .map_err(out_err)?;
    for r in &report.rows {
        writeln!(
            out,
            "{:>8} {:>8} {:>12.4e} {:>12.4e} {:>12.4e}",
            r.eps,
            r.status.name(),
            r.sup_l2,
            r.int_grad,
            r.composite
        )
        .map_err(out_err)?;
    }
    if let Some(f) = report.fit {
        writeln!(
            out,
            "slope {:.4}  residual {:.3e}  ({} points)",
            f.slope, f.residual, f.points
        )
        .map_err(out_err)?;
    }
    for m in &report.checks.messages {
        writeln!(out, "note: {m}").map_err(out_err)?;
    }
    writeln!(out, "report written to {}", dir.display()).map_err(out_err)?;
    Ok(if report.rows.iter().any(|r| r.status != RowStatus::Ok) {
        EXIT_SOLVER
    } else if report.checks.passed {
        EXIT_OK
    } else {
        EXIT_CHECKS
    })
}

/// Print α₁…α₈, β₁, β₂ at the configured times and write `bounds.csv`.
pub fn cmd_bounds(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let data = match cfg.bounds.norms {
        Some(_) => None,
        None => Some(cfg.initial_data()?),
    };
    let bc = cfg.bound_config(data.as_ref())?;
    let rows = cfg
        .bounds
        .times
        .iter()
        .map(|&t| BoundRow::at(t, &bc, cfg.bounds.eps))
        .collect::<Result<Vec<_>>>()?;
    let mut header = vec!["t".to_string()];
    header.extend((1..=8).map(|i| format!("alpha{i}")));
    header.extend(["beta1".to_string(), "beta2".to_string()]);
    writeln!(
        out,
        "{}",
        header
            .iter()
            .map(|h| format!("{h:>12}"))
            .collect::<String>()
    )
    .map_err(out_err)?;
    let dir = cfg.output_dir();
    create_dir(&dir)?;
    let path = dir.join("bounds.csv");
    let mut w =
        csv::Writer::from_path(&path).map_err(|e| crate::diagnostics::csv_error(&path, e))?;
    w.write_record(&header)
        .map_err(|e| crate::diagnostics::csv_error(&path, e))?;
    for r in &rows {
        let mut vals = vec![r.t];
        vals.extend(r.alpha);
        vals.extend([r.beta1, r.beta2]);
        writeln!(
            out,
            "{}",
            vals.iter()
                .map(|v| format!("{v:>12.5e}"))
                .collect::<String>()
        )
        .map_err(out_err)?;
        w.write_record(vals.iter().map(|v| format!("{v:e}")))
            .map_err(|e| crate::diagnostics::csv_error(&path, e))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(EXIT_OK)
}
