//! A primitive-equations run: hydrostatic balance, the diagnosed vertical
//! velocity, and the two routes to the surface pressure.

use hydrolimit::primitive::{surface_pressure, surface_pressure_projection, PrimitiveStepper};
use hydrolimit::profiles::Profile;
use hydrolimit::spectral::{derivative, Axis};
use hydrolimit::state::{validate_initial_data, ValidationOptions};
use hydrolimit::{Grid, State};

fn main() -> hydrolimit::Result<()> {
    let grid = Grid::cubic(16)?;
    let (v, theta) = Profile::Acceptance {
        velocity: 0.5,
        temperature: 0.5,
    }
    .fields(grid);
    let mut s = State::from_initial(&validate_initial_data(
        v,
        theta,
        ValidationOptions::default(),
    )?)?;
    let mut stepper = PrimitiveStepper::new(grid, 1e-3)?;

    let mut worst_hydrostatic = 0.0f64;
    for k in 1..=200 {
        s = stepper.step(&s)?;
        let p = stepper.pressure(&s)?;
        worst_hydrostatic =
            worst_hydrostatic.max((&derivative(&p, Axis::Z) - &s.theta).max_abs_coeff());
        if k % 50 == 0 {
            let formula = surface_pressure(&s.v, &s.theta)?;
            let projection = surface_pressure_projection(&s.v, &s.theta)?;
            let gap = (&formula - &projection).l2_norm_sq().sqrt();
            println!(
                "t = {:.3}: |w(+-1)| = {:.1e}, barotropic residual {:.1e}, surface pressure routes differ by {gap:.1e}",
                s.time,
                s.w_boundary_residual(),
                s.barotropic_residual()
            );
        }
    }
    println!("largest hydrostatic residual |dp/dz - theta| = {worst_hydrostatic:.2e}");
    Ok(())
}
