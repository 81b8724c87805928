//! The temperature energy identity on a primitive run, at two time steps.

use hydrolimit::diagnostics::{energy_budget, Budget, Quadrature, Recorder};
use hydrolimit::primitive::PrimitiveStepper;
use hydrolimit::profiles::Profile;
use hydrolimit::state::{validate_initial_data, ValidationOptions};
use hydrolimit::{Grid, State};

fn residual(dt: f64, quadrature: Quadrature) -> hydrolimit::Result<f64> {
    let grid = Grid::cubic(16)?;
    let (v, theta) = Profile::acceptance().fields(grid);
    let s0 = State::from_initial(&validate_initial_data(
        v,
        theta,
        ValidationOptions::default(),
    )?)?;
    let theta0 = s0.theta.l2_norm_sq();
    let mut rec = Recorder::new(&s0);
    let mut stepper = PrimitiveStepper::new(grid, dt)?;
    let mut s = s0;
    while s.time < 0.5 - 0.1 * dt {
        s = stepper.step(&s)?;
        rec.record(&s)?;
    }
    let points = energy_budget(&rec.finish(), Budget::Theta, quadrature)?;
    Ok(points.last().map_or(0.0, |p| p.residual.abs()) / theta0)
}

fn main() -> hydrolimit::Result<()> {
    for q in [Quadrature::Midpoint, Quadrature::Trapezoid] {
        let a = residual(1e-3, q)?;
        let b = residual(5e-4, q)?;
        println!(
            "{q:?}: relative residual {a:.3e} at dt=1e-3, {b:.3e} at dt=5e-4, ratio {:.2}",
            a / b
        );
    }
    Ok(())
}
