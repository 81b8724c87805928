//! Coefficient-space operators: parity projection, differentiation,
//! dealiasing and the elliptic solves.

use ndarray::Array3;
use num_complex::Complex64;

use super::field::{HorizontalField, Parity, SpectralField};
use super::grid::{mode_index, Grid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Lower limit of a vertical antiderivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerticalOrigin {
    /// `∫_{−1}^z`
    Bottom,
    /// `∫_0^z`
    Middle,
}

impl VerticalOrigin {
    pub fn z(self) -> f64 {
        match self {
            VerticalOrigin::Bottom => -1.0,
            VerticalOrigin::Middle => 0.0,
        }
    }
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Even or odd part `½(f(z) ± f(−z))`.
pub fn enforce_parity(f: &SpectralField, parity: Parity) -> SpectralField {
    let sign = match parity {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
        Parity::None => return f.clone(),
    };
    let grid = f.grid();
    let nz = grid.nz();
    let src = f.coeffs();
    let out = Array3::from_shape_fn(grid.shape(), |(i, j, l)| {
        let mirror = mode_index(-grid.mode_z(l), nz);
        0.5 * (src[[i, j, l]] + src[[i, j, mirror]] * sign)
    });
    SpectralField::from_coeffs(grid, out, parity).expect("shape preserved")
}

/// Exact Fourier derivative; the Nyquist mode is dropped.
pub fn derivative(f: &SpectralField, axis: Axis) -> SpectralField {
    let grid = f.grid();
    let mut out = f.clone();
    match axis {
        Axis::X => {
            let d = grid.deriv_x();
            for ((i, _, _), c) in out.coeffs_mut().indexed_iter_mut() {
                *c *= I * d[i];
            }
        }
        Axis::Y => {
            let d = grid.deriv_y();
            for ((_, j, _), c) in out.coeffs_mut().indexed_iter_mut() {
                *c *= I * d[j];
            }
        }
        Axis::Z => {
            let d = grid.deriv_z();
            for ((_, _, l), c) in out.coeffs_mut().indexed_iter_mut() {
                *c *= I * d[l];
            }
            let p = out.parity().flipped();
            out = out.with_parity(p);
        }
    }
    out
}

/// 2/3 rule: zero every mode with `|k_x| > nx/3`, `|k_y| > ny/3` or `|m| > nz/3`.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    dealias_in_place(&mut out);
    out
}

pub fn dealias_in_place(f: &mut SpectralField) {
    let grid = f.grid();
    let (nx, ny, nz) = grid.shape();
    let kx: Vec<bool> = (0..nx)
        .map(|i| Grid::retained(grid.mode_x(i), nx))
        .collect();
    let ky: Vec<bool> = (0..ny)
        .map(|j| Grid::retained(grid.mode_y(j), ny))
        .collect();
    let kz: Vec<bool> = (0..nz)
        .map(|l| Grid::retained(grid.mode_z(l), nz))
        .collect();
    for ((i, j, l), c) in f.coeffs_mut().indexed_iter_mut() {
        if !(kx[i] && ky[j] && kz[l]) {
            *c = Complex64::default();
        }
    }
}

fn gauge_tolerance(scale: f64) -> f64 {
    1e-12 * scale.max(1.0)
}

/// Solve `(Δ_h + ε⁻²∂_zz) p = rhs` with zero-mean gauge.
pub fn poisson_aniso(rhs: &SpectralField, eps: f64) -> Result<SpectralField> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "aspect ratio must be > 0, got {eps}"
        )));
    }
    let mean = rhs.mean();
    if mean.abs() > gauge_tolerance(rhs.max_abs_coeff()) {
        return Err(Error::GaugeViolation { mean });
    }
    let grid = rhs.grid();
    let (kx2, ky2, kz2) = (grid.k2_x(), grid.k2_y(), grid.k2_z());
    let inv_eps2 = 1.0 / (eps * eps);
    let mut p = rhs.clone();
    for ((i, j, l), c) in p.coeffs_mut().indexed_iter_mut() {
        let symbol = -(kx2[i] + ky2[j]) - inv_eps2 * kz2[l];
        *c = if symbol == 0.0 {
            Complex64::default()
        } else {
            *c / symbol
        };
    }
    Ok(p)
}

/// Solve `−Δ_h p = rhs` on `M` with zero-mean gauge.
pub fn poisson_horizontal(rhs: &HorizontalField) -> Result<HorizontalField> {
    let mean = rhs.mean();
    let scale = rhs.coeffs().iter().fold(0.0f64, |a, c| a.max(c.norm()));
    if mean.abs() > gauge_tolerance(scale) {
        return Err(Error::GaugeViolation { mean });
    }
    let grid = rhs.grid();
    let (kx2, ky2) = (grid.k2_x(), grid.k2_y());
    let mut p = rhs.clone();
    for ((i, j), c) in p.coeffs_mut().indexed_iter_mut() {
        let symbol = kx2[i] + ky2[j];
        *c = if symbol == 0.0 {
            Complex64::default()
        } else {
            *c / symbol
        };
    }
    Ok(p)
}

/// `F` with `∂_z F = f` and `F(origin) = 0`.
///
/// Requires the `m = 0` slab of `f` to vanish so `F` stays periodic; the
/// Nyquist mode carries no derivative and is discarded.
pub fn vertical_antiderivative(f: &SpectralField, origin: VerticalOrigin) -> Result<SpectralField> {
    let grid = f.grid();
    let (nx, ny, nz) = grid.shape();
    let tol = 1e-10 * f.max_abs_coeff();
    let coeffs = f.coeffs();
    let mut bad = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            if coeffs[[i, j, 0]].norm() > tol {
                bad.push((grid.mode_x(i), grid.mode_y(j)));
            }
        }
    }
    if !bad.is_empty() {
        return Err(Error::NonPeriodic { modes: bad });
    }

    let dz = grid.deriv_z();
    let z0 = origin.z();
    let phase: Vec<Complex64> = (0..nz)
        .map(|l| Complex64::from_polar(1.0, std::f64::consts::PI * grid.mode_z(l) as f64 * z0))
        .collect();
    let mut out = Array3::<Complex64>::zeros(grid.shape());
    for i in 0..nx {
        for j in 0..ny {
            let mut at_origin = Complex64::default();
            for l in 1..nz {
                if dz[l] == 0.0 {
                    continue;
                }
                let c = coeffs[[i, j, l]] / (I * dz[l]);
                out[[i, j, l]] = c;
                at_origin += c * phase[l];
            }
            out[[i, j, 0]] = -at_origin;
        }
    }
    let parity = match (origin, f.parity()) {
        (VerticalOrigin::Middle, p) => p.flipped(),
        (VerticalOrigin::Bottom, Parity::Even) => Parity::Odd,
        (VerticalOrigin::Bottom, _) => Parity::None,
    };
    SpectralField::from_coeffs(grid, out, parity)
}

/// `∂_x a + ∂_y b`.
pub fn horizontal_divergence(a: &SpectralField, b: &SpectralField) -> SpectralField {
    &derivative(a, Axis::X) + &derivative(b, Axis::Y)
}

/// `Δ f` with the full symbol `−(k_x² + k_y² + (πm)²)`.
pub fn laplacian(f: &SpectralField) -> SpectralField {
    let grid = f.grid();
    let (kx2, ky2, kz2) = (grid.k2_x(), grid.k2_y(), grid.k2_z());
    let mut out = f.clone();
    for ((i, j, l), c) in out.coeffs_mut().indexed_iter_mut() {
        *c *= -(kx2[i] + ky2[j] + kz2[l]);
    }
    out
}

/// `‖∇f‖₂²` by Parseval.
pub fn grad_norm_sq(f: &SpectralField) -> f64 {
    weighted_norm_sq(f, |k2| k2)
}

/// `‖Δf‖₂²` by Parseval.
pub fn laplacian_norm_sq(f: &SpectralField) -> f64 {
    weighted_norm_sq(f, |k2| k2 * k2)
}

/// `‖∂_z f‖₂²` by Parseval.
pub fn dz_norm_sq(f: &SpectralField) -> f64 {
    let grid = f.grid();
    let kz2 = grid.k2_z();
    let s: f64 = f
        .coeffs()
        .indexed_iter()
        .map(|((_, _, l), c)| kz2[l] * c.norm_sqr())
        .sum();
    grid.volume() * s
}

fn weighted_norm_sq(f: &SpectralField, weight: impl Fn(f64) -> f64) -> f64 {
    let grid = f.grid();
    let (kx2, ky2, kz2) = (grid.k2_x(), grid.k2_y(), grid.k2_z());
    let s: f64 = f
        .coeffs()
        .indexed_iter()
        .map(|((i, j, l), c)| weight(kx2[i] + ky2[j] + kz2[l]) * c.norm_sqr())
        .sum();
    grid.volume() * s
}

/// Horizontal derivative of a field on `M`.
pub fn horizontal_derivative(f: &HorizontalField, axis: Axis) -> HorizontalField {
    let grid = f.grid();
    let mut out = f.clone();
    let d = match axis {
        Axis::X => grid.deriv_x(),
        Axis::Y => grid.deriv_y(),
        Axis::Z => return HorizontalField::zeros(grid),
    };
    for ((i, j), c) in out.coeffs_mut().indexed_iter_mut() {
        let k = if axis == Axis::X { d[i] } else { d[j] };
        *c *= I * k;
    }
    out
}

/// Horizontal Laplacian of a field on `M`.
pub fn horizontal_laplacian(f: &HorizontalField) -> HorizontalField {
    let grid = f.grid();
    let (kx2, ky2) = (grid.k2_x(), grid.k2_y());
    let mut out = f.clone();
    for ((i, j), c) in out.coeffs_mut().indexed_iter_mut() {
        *c *= -(kx2[i] + ky2[j]);
    }
    out
}

/// Dealiased pointwise product of two physical arrays.
pub fn dealiased_product(
    grid: Grid,
    a: &Array3<f64>,
    b: &Array3<f64>,
    parity: Parity,
) -> SpectralField {
    let mut prod = Array3::<f64>::zeros(grid.shape());
    super::transform::mul_into(&mut prod, a, b);
    let mut f = SpectralField::from_physical(grid, &prod, parity);
    dealias_in_place(&mut f);
    f
}
