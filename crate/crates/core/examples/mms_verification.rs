//! Manufactured-solution checks: spectral accuracy in N and second order in dt.

use hydrolimit::mms::{mms_error, observed_orders, Manufactured, MmsSolver};
use hydrolimit::Grid;

fn main() -> hydrolimit::Result<()> {
    let solvers = [MmsSolver::Boussinesq { eps: 0.5 }, MmsSolver::Primitive];

    let steady = Manufactured::analytic_steady(1.0);
    for solver in solvers {
        let e16 = mms_error(&steady, solver, Grid::cubic(16)?, 1e-3, 0.05)?;
        let e24 = mms_error(&steady, solver, Grid::cubic(24)?, 1e-3, 0.05)?;
        println!(
            "{solver:?} spatial: N=16 {e16:.3e}  N=24 {e24:.3e}  drop {:.1e}",
            e16 / e24
        );
    }

    let moving = Manufactured::low_mode();
    for solver in solvers {
        let errors = [4e-3, 2e-3, 1e-3]
            .iter()
            .map(|&dt| mms_error(&moving, solver, Grid::cubic(16)?, dt, 0.2))
            .collect::<hydrolimit::Result<Vec<_>>>()?;
        println!(
            "{solver:?} temporal: errors {errors:.3?}  orders {:.3?}",
            observed_orders(&errors)
        );
    }
    Ok(())
}
