//! One scaled Boussinesq run with per-step constraint monitors.

use hydrolimit::boussinesq::BoussinesqStepper;
use hydrolimit::diagnostics::norms;
use hydrolimit::profiles::Profile;
use hydrolimit::state::{validate_initial_data, ValidationOptions};
use hydrolimit::{Grid, PhysicalParams, State};

fn main() -> hydrolimit::Result<()> {
    let grid = Grid::cubic(16)?;
    let eps = 0.1;
    let (v, theta) = Profile::acceptance().fields(grid);
    let s0 = State::from_initial(&validate_initial_data(
        v,
        theta,
        ValidationOptions::default(),
    )?)?;
    let mut stepper = BoussinesqStepper::new(PhysicalParams::scaled(eps)?, grid, 1e-3)?;

    let (mut drift, mut div) = (0.0f64, 0.0f64);
    let end = stepper.run_until(s0, 0.2, |s| {
        let d = stepper_diag(s);
        drift = drift.max(d.0);
        div = div.max(d.1);
    })?;
    let n = norms(&end);
    println!(
        "eps = {eps}, t = {:.3}, {} steps",
        end.time,
        stepper.steps_taken()
    );
    println!(
        "|v| = {:.6e}, |w| = {:.6e}, |theta| = {:.6e}",
        n.v_l2, n.w_l2, n.theta_l2
    );
    println!("max parity residual {drift:.2e}, max divergence residual {div:.2e}");
    println!("last step: {:?}", stepper.last_diagnostics());
    Ok(())
}

fn stepper_diag(s: &State) -> (f64, f64) {
    (s.parity_drift(), s.divergence_residual())
}
