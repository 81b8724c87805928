//! Paired Boussinesq/primitive runs over ε and the fitted convergence order.
//!
//! `cargo run --release --example convergence_sweep [N] [T] [OUT]` defaults to
//! the 32³, T = 0.5 rate check and writes the report to `target/sweep`.

use std::path::PathBuf;

use hydrolimit::harness::{
    emit_report, run_sweep, write_timing, ConvergenceReport, Criteria, DtPolicy, ReportMeta,
    SweepPlan,
};
use hydrolimit::profiles::Profile;
use hydrolimit::state::{validate_initial_data, ValidationOptions};
use hydrolimit::Grid;

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(32), |s| s.parse())?;
    let horizon: f64 = args.get(1).map_or(Ok(0.5), |s| s.parse())?;
    let out = args
        .get(2)
        .map_or_else(|| PathBuf::from("target/sweep"), PathBuf::from);

    let profile = Profile::acceptance();
    let (v, theta) = profile.fields(Grid::cubic(n)?);
    let data = validate_initial_data(v, theta, ValidationOptions::default())?;
    let plan = SweepPlan::new(
        vec![0.4, 0.2, 0.1, 0.05],
        DtPolicy::Fixed(1e-3),
        horizon,
        data,
    )?;

    let clock = std::time::Instant::now();
    let outcome = run_sweep(&plan)?;
    println!(
        "swept {} values of eps in {:.1} s",
        plan.epsilons().len(),
        clock.elapsed().as_secs_f64()
    );

    let meta = ReportMeta::for_plan(&plan, &profile.to_string(), "example");
    let report = ConvergenceReport::from_rows(meta, outcome.rows.clone(), Criteria::default());
    emit_report(&report, &out)?;
    write_timing(&outcome.rows, &outcome.seconds, &out.join("timing.csv"))?;

    println!(
        "{:>6} {:>12} {:>12} {:>12}",
        "eps", "sup_l2", "int_grad", "E"
    );
    for r in &report.rows {
        println!(
            "{:>6} {:>12.4e} {:>12.4e} {:>12.4e}",
            r.eps, r.sup_l2, r.int_grad, r.composite
        );
    }
    if let Some(f) = report.fit {
        println!("slope {:.3}, residual {:.3e}", f.slope, f.residual);
    }
    println!(
        "checks passed: {} {:?}",
        report.checks.passed, report.checks.messages
    );
    println!("report in {}", out.display());
    Ok(())
}
