use super::norms::padded;
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

fn horizontal_grad_norm_sq(f: &SpectralField) -> f64 {
    let g = f.grid();
    let (kx2, ky2) = (g.k2_x(), g.k2_y());
    let s: f64 = f
        .coeffs()
        .indexed_iter()
        .map(|((i, j, _), c)| (kx2[i] + ky2[j]) * c.norm_sqr())
        .sum();
    g.volume() * s
}

/// Ratio `lhs / rhs` for
///
/// ```text
/// ∫_M (∫|φ| dz)(∫|ψ||χ| dz) dx dy
///     ≤ C ‖φ‖^{1/2}(‖φ‖^{1/2} + ‖∇_hφ‖^{1/2}) ‖ψ‖^{1/2}(‖ψ‖^{1/2} + ‖∇_hψ‖^{1/2}) ‖χ‖
/// ```
///
/// with `C` left out. The integral is a midpoint rule on a 3/2-padded grid.
/// A vanishing left side gives 0; a vanishing right side otherwise is an error.
pub fn ladyzhenskaya_ratio(
    phi: &SpectralField,
    psi: &SpectralField,
    chi: &SpectralField,
) -> Result<f64> {
    let grid = phi.grid();
    if psi.grid() != grid || chi.grid() != grid {
        return Err(Error::GridMismatch(
            "probe fields live on different grids".into(),
        ));
    }
    let fine = padded(grid);
    let [a, b, c] = [phi, psi, chi].map(|f| f.resampled(fine).to_physical());
    let (nx, ny, nz) = fine.shape();
    let dz = 2.0 / nz as f64;
    let da = fine.area() / (nx * ny) as f64;
    let mut lhs = 0.0;
    for i in 0..nx {
        for j in 0..ny {
            let (mut col_a, mut col_bc) = (0.0, 0.0);
            for l in 0..nz {
                col_a += a[[i, j, l]].abs();
                col_bc += (b[[i, j, l]] * c[[i, j, l]]).abs();
            }
            lhs += col_a * col_bc * dz * dz;
        }
    }
    lhs *= da;
    if lhs == 0.0 {
        return Ok(0.0);
    }
    let factor = |f: &SpectralField| {
        let n = f.l2_norm().sqrt();
        n * (n + horizontal_grad_norm_sq(f).sqrt().sqrt())
    };
    let rhs = factor(phi) * factor(psi) * chi.l2_norm();
    if rhs == 0.0 {
        return Err(Error::InvalidParameter(
            "ladyzhenskaya probe: right side vanishes".into(),
        ));
    }
    Ok(lhs / rhs)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::spectral::{Grid, Parity};

    fn grid() -> Grid {
        Grid::new(16, 16, 16).unwrap()
    }

    fn sinx() -> SpectralField {
        SpectralField::from_fn(grid(), Parity::Even, |x, _, _| x.sin())
    }

    #[test]
    fn single_mode_ratio_is_finite_and_positive() {
        let f = sinx();
        let r = ladyzhenskaya_ratio(&f, &f, &f).unwrap();
        assert!(r.is_finite() && r > 0.0);
        // lhs = ∫(2|sin x|)(2 sin²x) = 4·2π·∫|sin x|³ dx = 4·2π·8/3
        let lhs = 4.0 * 2.0 * PI * 8.0 / 3.0;
        let n = (4.0 * PI * PI).sqrt();
        let rhs = (n.sqrt() * (n.sqrt() + n.sqrt())).powi(2) * n;
        assert!((r - lhs / rhs).abs() / r < 2e-2, "{r} vs {}", lhs / rhs);
    }

    #[test]
    fn zero_third_argument_gives_zero() {
        let f = sinx();
        let zero = SpectralField::zeros(grid(), Parity::Even);
        assert_eq!(ladyzhenskaya_ratio(&f, &f, &zero).unwrap(), 0.0);
    }

    #[test]
    fn both_sides_are_linear_in_phi() {
        let f = sinx();
        let g = SpectralField::from_fn(grid(), Parity::None, |x, y, z| {
            (x + y).cos() * (PI * z).sin() + 0.2
        });
        let r1 = ladyzhenskaya_ratio(&f, &g, &f).unwrap();
        let r2 = ladyzhenskaya_ratio(&(&f * 2.0), &g, &f).unwrap();
        assert!((r1 - r2).abs() < 1e-12 * r1);
    }
}
