use serde::{Deserialize, Serialize};

use crate::spectral::{dz_norm_sq, grad_norm_sq, laplacian_norm_sq, Grid, SpectralField};
use crate::state::State;

/// Norms of one state. `v` norms are vector norms over both components.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NormSample {
    pub t: f64,
    pub v_l2: f64,
    pub theta_l2: f64,
    pub w_l2: f64,
    pub v_l4: f64,
    pub theta_l4: f64,
    pub dz_v_l2: f64,
    pub dz_theta_l2: f64,
    pub grad_v_l2: f64,
    pub grad_theta_l2: f64,
    pub grad_w_l2: f64,
    pub lap_v_l2: f64,
    pub lap_theta_l2: f64,
}

pub fn norms(s: &State) -> NormSample {
    let pair = |f: &dyn Fn(&SpectralField) -> f64| (f(&s.v[0]) + f(&s.v[1])).sqrt();
    NormSample {
        t: s.time,
        v_l2: pair(&|f| f.l2_norm_sq()),
        theta_l2: s.theta.l2_norm(),
        w_l2: s.w.l2_norm(),
        v_l4: vector_l4_norm(&s.v),
        theta_l4: l4_norm(&s.theta),
        dz_v_l2: pair(&dz_norm_sq),
        dz_theta_l2: dz_norm_sq(&s.theta).sqrt(),
        grad_v_l2: pair(&grad_norm_sq),
        grad_theta_l2: grad_norm_sq(&s.theta).sqrt(),
        grad_w_l2: grad_norm_sq(&s.w).sqrt(),
        lap_v_l2: pair(&laplacian_norm_sq),
        lap_theta_l2: laplacian_norm_sq(&s.theta).sqrt(),
    }
}

pub fn h1_norm_sq(f: &SpectralField) -> f64 {
    f.l2_norm_sq() + grad_norm_sq(f)
}

pub fn h2_norm_sq(f: &SpectralField) -> f64 {
    h1_norm_sq(f) + laplacian_norm_sq(f)
}

/// Grid with 3/2 as many points per axis, on which fourth powers of
/// dealiased fields are integrated exactly.
pub(crate) fn padded(grid: Grid) -> Grid {
    let up = |n: usize| (3 * n).div_ceil(4) * 2;
    Grid::new(up(grid.nx()), up(grid.ny()), up(grid.nz())).expect("padding keeps sizes even")
}

pub fn l4_norm(f: &SpectralField) -> f64 {
    let g = padded(f.grid());
    let vals = f.resampled(g).to_physical();
    let w = g.volume() / g.len() as f64;
    (w * vals.iter().map(|x| x.powi(4)).sum::<f64>()).powf(0.25)
}

/// `(∫ |v|⁴)^{1/4}` with `|v|² = v₁² + v₂²`.
pub fn vector_l4_norm(v: &[SpectralField; 2]) -> f64 {
    let g = padded(v[0].grid());
    let a = v[0].resampled(g).to_physical();
    let b = v[1].resampled(g).to_physical();
    let w = g.volume() / g.len() as f64;
    let s: f64 = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x * x + y * y).powi(2))
        .sum();
    (w * s).powf(0.25)
}
