//! Empirical ratio of the anisotropic trilinear estimate on random fields.

use hydrolimit::diagnostics::ladyzhenskaya_ratio;
use hydrolimit::{Grid, Parity, SpectralField};

fn field(grid: Grid, a: f64, b: f64, c: f64) -> SpectralField {
    SpectralField::from_fn(grid, Parity::None, |x, y, z| {
        (a * x).sin() * (b * y).cos() + 0.3 * (c * std::f64::consts::PI * z).cos() * (x + y).sin()
    })
}

fn main() -> hydrolimit::Result<()> {
    let grid = Grid::cubic(16)?;
    let mut worst = 0.0f64;
    for k in 1..=4 {
        let (k1, k2) = (k as f64, (k + 1) as f64);
        let r = ladyzhenskaya_ratio(
            &field(grid, k1, 1.0, 1.0),
            &field(grid, 1.0, k2, 2.0),
            &field(grid, k2, k1, 1.0),
        )?;
        println!("wavenumber {k}: lhs/rhs = {r:.4}");
        worst = worst.max(r);
    }
    println!("largest observed ratio {worst:.4}");
    Ok(())
}
