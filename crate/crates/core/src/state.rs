//! Unknowns of both systems, physical parameters, initial-data checks and
//! the map between the thin domain `M × (−ε, ε)` and the fixed box.

use std::fmt;

use ndarray::Array3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    derivative, enforce_parity, horizontal_divergence, poisson_aniso, vertical_antiderivative,
    Axis, Grid, Parity, SpectralField, VerticalOrigin,
};

/// Aspect ratio and viscosity/diffusivity coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub eps: f64,
    pub mu_h: f64,
    pub mu_z: f64,
    pub kappa_h: f64,
    pub kappa_z: f64,
}

impl PhysicalParams {
    /// The scaled regime: `μ_h = κ_h = 1`, `μ_z = κ_z = ε²`.
    pub fn scaled(eps: f64) -> Result<Self> {
        Self::new(eps, 1.0, eps * eps, 1.0, eps * eps)
    }

    pub fn new(eps: f64, mu_h: f64, mu_z: f64, kappa_h: f64, kappa_z: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "aspect ratio must be > 0, got {eps}"
            )));
        }
        for (name, v) in [
            ("mu_h", mu_h),
            ("mu_z", mu_z),
            ("kappa_h", kappa_h),
            ("kappa_z", kappa_z),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be >= 0, got {v}"
                )));
            }
        }
        Ok(PhysicalParams {
            eps,
            mu_h,
            mu_z,
            kappa_h,
            kappa_z,
        })
    }

    /// Horizontal and vertical momentum diffusion on the fixed domain.
    ///
    /// Stretching `z ↦ εz` turns `μ_z ∂_ZZ` into `(μ_z/ε²) ∂_zz`.
    pub fn momentum_diffusion(&self) -> (f64, f64) {
        (self.mu_h, self.mu_z / (self.eps * self.eps))
    }

    pub fn heat_diffusion(&self) -> (f64, f64) {
        (self.kappa_h, self.kappa_z / (self.eps * self.eps))
    }
}

/// `(v, w, θ)` at one instant. Pressure is diagnostic and never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub v: [SpectralField; 2],
    pub w: SpectralField,
    pub theta: SpectralField,
    pub time: f64,
}

impl State {
    pub fn zeros(grid: Grid) -> Self {
        State {
            v: [
                SpectralField::zeros(grid, Parity::Even),
                SpectralField::zeros(grid, Parity::Even),
            ],
            w: SpectralField::zeros(grid, Parity::Odd),
            theta: SpectralField::zeros(grid, Parity::Odd),
            time: 0.0,
        }
    }

    /// Build a state whose `w` is diagnosed from `v`.
    pub fn from_initial(data: &InitialData) -> Result<Self> {
        let w = diagnose_w(&data.v)?;
        Ok(State {
            v: data.v.clone(),
            w,
            theta: data.theta.clone(),
            time: 0.0,
        })
    }

    pub fn grid(&self) -> Grid {
        self.theta.grid()
    }

    pub fn fields(&self) -> [&SpectralField; 4] {
        [&self.v[0], &self.v[1], &self.w, &self.theta]
    }

    pub fn fields_mut(&mut self) -> [&mut SpectralField; 4] {
        let [v1, v2] = &mut self.v;
        [v1, v2, &mut self.w, &mut self.theta]
    }

    /// `‖∇_h·v + ∂_z w‖₂`.
    pub fn divergence_residual(&self) -> f64 {
        let div = &horizontal_divergence(&self.v[0], &self.v[1]) + &derivative(&self.w, Axis::Z);
        div.l2_norm()
    }

    /// Largest parity projection residual over the four unknowns.
    pub fn parity_drift(&self) -> f64 {
        self.fields()
            .iter()
            .map(|f| f.parity_residual())
            .fold(0.0, f64::max)
    }

    /// Re-impose the declared parities (v even, w and θ odd).
    pub fn enforce_parities(&mut self) {
        self.v[0] = enforce_parity(&self.v[0], Parity::Even);
        self.v[1] = enforce_parity(&self.v[1], Parity::Even);
        self.w = enforce_parity(&self.w, Parity::Odd);
        self.theta = enforce_parity(&self.theta, Parity::Odd);
    }

    /// Remove the divergent part of `(v, w)` in the `‖v‖² + ε²‖w‖²` metric.
    pub fn project_divergence_free(&mut self, eps: f64) -> Result<()> {
        let div = &horizontal_divergence(&self.v[0], &self.v[1]) + &derivative(&self.w, Axis::Z);
        let q = poisson_aniso(&div, eps)?;
        self.v[0].axpy(-1.0, &derivative(&q, Axis::X));
        self.v[1].axpy(-1.0, &derivative(&q, Axis::Y));
        self.w.axpy(-1.0 / (eps * eps), &derivative(&q, Axis::Z));
        Ok(())
    }

    /// Largest `|∫₋₁¹ ∇_h·v dz|/2` over horizontal modes (the `m = 0` slab).
    pub fn barotropic_residual(&self) -> f64 {
        let div = horizontal_divergence(&self.v[0], &self.v[1]);
        div.vertical_mean()
            .coeffs()
            .iter()
            .fold(0.0, |a, c| a.max(c.norm()))
    }

    /// `max(|w(z = −1)|, |w(z = 1)|)` over the horizontal grid.
    pub fn w_boundary_residual(&self) -> f64 {
        // z = −1 is grid level 0 and z = 1 is the same periodic point
        let vals = self.w.to_physical();
        vals.index_axis(ndarray::Axis(2), 0)
            .iter()
            .fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.fields().iter().all(|f| f.is_finite())
    }

    /// `max |u|` over grid points.
    pub fn max_speed(&self) -> f64 {
        let [a, b, c] = [&self.v[0], &self.v[1], &self.w].map(|f| f.to_physical());
        ndarray::Zip::from(&a)
            .and(&b)
            .and(&c)
            .fold(0.0f64, |m, x, y, z| m.max((x * x + y * y + z * z).sqrt()))
    }

    pub fn check_same_grid(&self, other: &State) -> Result<()> {
        if self.grid() != other.grid() {
            return Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.grid().shape(),
                other.grid().shape()
            )));
        }
        Ok(())
    }
}

/// `(V_ε, W_ε, Φ_ε) = (v_ε − v, w_ε − w, θ_ε − θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceState {
    pub v: [SpectralField; 2],
    pub w: SpectralField,
    pub phi: SpectralField,
}

impl DifferenceState {
    pub fn between(boussinesq: &State, primitive: &State) -> Result<Self> {
        boussinesq.check_same_grid(primitive)?;
        Ok(DifferenceState {
            v: [
                &boussinesq.v[0] - &primitive.v[0],
                &boussinesq.v[1] - &primitive.v[1],
            ],
            w: &boussinesq.w - &primitive.w,
            phi: &boussinesq.theta - &primitive.theta,
        })
    }
}

/// `w(z) = −∫₋₁^z ∇_h·v dξ`.
///
/// Fails with [`Error::NonPeriodic`] when `v` violates the barotropic
/// constraint, naming the offending horizontal modes.
pub fn diagnose_w(v: &[SpectralField; 2]) -> Result<SpectralField> {
    let div = horizontal_divergence(&v[0], &v[1]);
    let w = vertical_antiderivative(&(&div * -1.0), VerticalOrigin::Bottom)?;
    Ok(w)
}

// ---------------------------------------------------------------------------
// initial-data hypotheses

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Hypothesis {
    /// `v₀` even in z
    VelocityEven,
    /// `θ₀` odd in z
    TemperatureOdd,
    /// `∫₋₁¹ ∇_h·v₀ dz = 0`
    Barotropic,
    /// `∫_Ω v₀ = 0`
    VelocityMeanZero,
    /// `∫_Ω θ₀ = 0`
    TemperatureMeanZero,
}

impl Hypothesis {
    pub fn label(self) -> &'static str {
        match self {
            Hypothesis::VelocityEven => "v0 even in z",
            Hypothesis::TemperatureOdd => "theta0 odd in z",
            Hypothesis::Barotropic => "barotropic constraint",
            Hypothesis::VelocityMeanZero => "v0 mean zero",
            Hypothesis::TemperatureMeanZero => "theta0 mean zero",
        }
    }
}

/// Outcome of one hypothesis check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub hypothesis: Hypothesis,
    pub residual: f64,
    pub passed: bool,
    /// Offending `(k_x, k_y, m)` modes, truncated to [`MAX_REPORTED_MODES`].
    pub offending_modes: Vec<(i64, i64, i64)>,
    pub skipped: bool,
}

pub const MAX_REPORTED_MODES: usize = 16;

/// Every hypothesis check, failed or not.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationReport {
    pub checks: Vec<HypothesisCheck>,
}

impl ViolationReport {
    pub fn failures(&self) -> impl Iterator<Item = &HypothesisCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self, h: Hypothesis) -> bool {
        self.checks.iter().any(|c| c.hypothesis == h && !c.passed)
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let failed: Vec<_> = self.failures().collect();
        write!(f, "{} failed check(s)", failed.len())?;
        for c in failed {
            write!(f, "; {} (residual {:e}", c.hypothesis.label(), c.residual)?;
            if let Some(m) = c.offending_modes.first() {
                write!(f, ", e.g. mode {m:?}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions {
    pub tolerance: f64,
    /// The mean-zero hypotheses can be relaxed; everything else cannot.
    pub require_mean_zero: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        ValidationOptions {
            tolerance: 1e-10,
            require_mean_zero: true,
        }
    }
}

/// `(v₀, θ₀)` that passed [`validate_initial_data`].
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub v: [SpectralField; 2],
    pub theta: SpectralField,
}

/// Run every hypothesis check on `(v₀, θ₀)`.
pub fn check_initial_data(
    v0: &[SpectralField; 2],
    theta0: &SpectralField,
    opts: ValidationOptions,
) -> Result<ViolationReport> {
    let grid = theta0.grid();
    if v0[0].grid() != grid || v0[1].grid() != grid {
        return Err(Error::GridMismatch(
            "v0 and theta0 live on different grids".into(),
        ));
    }
    let tol = opts.tolerance;
    let mut checks = Vec::new();

    let odd_part = |f: &SpectralField, p: Parity| f - &enforce_parity(f, p);
    let v_odd = [
        odd_part(&v0[0], Parity::Even),
        odd_part(&v0[1], Parity::Even),
    ];
    checks.push(modewise_check(Hypothesis::VelocityEven, &v_odd, tol));
    let theta_even = odd_part(theta0, Parity::Odd);
    checks.push(modewise_check(
        Hypothesis::TemperatureOdd,
        &[theta_even],
        tol,
    ));

    let div = horizontal_divergence(&v0[0], &v0[1]);
    let slab = div.vertical_mean();
    let mut residual = 0.0f64;
    let mut modes = Vec::new();
    for ((i, j), c) in slab.coeffs().indexed_iter() {
        residual = residual.max(c.norm());
        if c.norm() > tol {
            modes.push((grid.mode_x(i), grid.mode_y(j), 0));
        }
    }
    checks.push(finish(Hypothesis::Barotropic, residual, tol, modes, false));

    let v_mean = v0[0].mean().abs().max(v0[1].mean().abs());
    checks.push(finish(
        Hypothesis::VelocityMeanZero,
        v_mean,
        tol,
        if v_mean > tol {
            vec![(0, 0, 0)]
        } else {
            vec![]
        },
        !opts.require_mean_zero,
    ));
    let t_mean = theta0.mean().abs();
    checks.push(finish(
        Hypothesis::TemperatureMeanZero,
        t_mean,
        tol,
        if t_mean > tol {
            vec![(0, 0, 0)]
        } else {
            vec![]
        },
        !opts.require_mean_zero,
    ));
    Ok(ViolationReport { checks })
}

fn modewise_check(h: Hypothesis, residuals: &[SpectralField], tol: f64) -> HypothesisCheck {
    let mut worst = 0.0f64;
    let mut modes = Vec::new();
    for f in residuals {
        let g = f.grid();
        for ((i, j, l), c) in f.coeffs().indexed_iter() {
            worst = worst.max(c.norm());
            if c.norm() > tol {
                let m = (g.mode_x(i), g.mode_y(j), g.mode_z(l));
                if !modes.contains(&m) {
                    modes.push(m);
                }
            }
        }
    }
    finish(h, worst, tol, modes, false)
}

fn finish(
    hypothesis: Hypothesis,
    residual: f64,
    tol: f64,
    mut modes: Vec<(i64, i64, i64)>,
    skipped: bool,
) -> HypothesisCheck {
    modes.truncate(MAX_REPORTED_MODES);
    HypothesisCheck {
        hypothesis,
        residual,
        passed: skipped || residual <= tol,
        offending_modes: modes,
        skipped,
    }
}

/// Check every hypothesis; on success return the data with parities tagged.
pub fn validate_initial_data(
    v0: [SpectralField; 2],
    theta0: SpectralField,
    opts: ValidationOptions,
) -> Result<InitialData> {
    let report = check_initial_data(&v0, &theta0, opts)?;
    if !report.all_passed() {
        return Err(Error::Hypothesis(report));
    }
    let [a, b] = v0;
    Ok(InitialData {
        v: [a.with_parity(Parity::Even), b.with_parity(Parity::Even)],
        theta: theta0.with_parity(Parity::Odd),
    })
}

/// Project arbitrary `(v, θ)` onto data satisfying every hypothesis:
/// parity projection, removal of the divergent part of the vertical mean of
/// `v`, and removal of the domain means.
pub fn project_to_hypotheses(
    v: &[SpectralField; 2],
    theta: &SpectralField,
) -> ([SpectralField; 2], SpectralField) {
    let mut a = enforce_parity(&v[0], Parity::Even);
    let mut b = enforce_parity(&v[1], Parity::Even);
    let mut t = enforce_parity(theta, Parity::Odd);
    remove_barotropic_divergence(&mut a, &mut b);
    for f in [&mut a, &mut b, &mut t] {
        f.coeffs_mut()[[0, 0, 0]] = Default::default();
    }
    ([a, b], t)
}

/// Remove the divergent part of the `m = 0` slab of `(a, b)` so that
/// `∫₋₁¹ ∇_h·v dz = 0` holds exactly.
pub fn remove_barotropic_divergence(a: &mut SpectralField, b: &mut SpectralField) {
    let grid = a.grid();
    let (nx, ny, _) = grid.shape();
    let (dx, dy) = (grid.deriv_x(), grid.deriv_y());
    for i in 0..nx {
        for j in 0..ny {
            let (kx, ky) = (dx[i], dy[j]);
            let k2 = kx * kx + ky * ky;
            let ca = a.coeffs()[[i, j, 0]];
            let cb = b.coeffs()[[i, j, 0]];
            if k2 == 0.0 {
                // Nyquist rows carry no derivative; drop them from the mean slab
                if i != 0 || j != 0 {
                    a.coeffs_mut()[[i, j, 0]] = Default::default();
                    b.coeffs_mut()[[i, j, 0]] = Default::default();
                }
                continue;
            }
            let kdotv = ca * kx + cb * ky;
            a.coeffs_mut()[[i, j, 0]] = ca - kdotv * (kx / k2);
            b.coeffs_mut()[[i, j, 0]] = cb - kdotv * (ky / k2);
        }
    }
}

// ---------------------------------------------------------------------------
// thin domain ↔ fixed domain

/// Point samples of `(v, w, p, θ)` at the grid nodes of a box.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSamples {
    pub grid: Grid,
    pub v: [Array3<f64>; 2],
    pub w: Array3<f64>,
    pub p: Array3<f64>,
    pub theta: Array3<f64>,
}

/// Samples on the thin domain `M × (−ε, ε)` at `(x_i, y_j, ε z_l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThinDomainSamples {
    pub eps: f64,
    pub samples: PointSamples,
}

impl ThinDomainSamples {
    /// Sample physical functions of `(x, y, Z)` with `Z ∈ [−ε, ε)`.
    pub fn from_fns(
        grid: Grid,
        eps: f64,
        v: [&dyn Fn(f64, f64, f64) -> f64; 2],
        w: &dyn Fn(f64, f64, f64) -> f64,
        p: &dyn Fn(f64, f64, f64) -> f64,
        theta: &dyn Fn(f64, f64, f64) -> f64,
    ) -> Result<Self> {
        check_eps(eps)?;
        let sample = |f: &dyn Fn(f64, f64, f64) -> f64| {
            Array3::from_shape_fn(grid.shape(), |(i, j, l)| {
                f(grid.x(i), grid.y(j), eps * grid.z(l))
            })
        };
        Ok(ThinDomainSamples {
            eps,
            samples: PointSamples {
                grid,
                v: [sample(v[0]), sample(v[1])],
                w: sample(w),
                p: sample(p),
                theta: sample(theta),
            },
        })
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "aspect ratio must be > 0, got {eps}"
        )))
    }
}

/// `v_ε = v(·,εz)`, `w_ε = w(·,εz)/ε`, `p_ε = p(·,εz)`, `θ_ε = ε θ(·,εz)`.
pub fn rescale_to_fixed(thin: &ThinDomainSamples) -> Result<PointSamples> {
    let eps = thin.eps;
    check_eps(eps)?;
    let s = &thin.samples;
    Ok(PointSamples {
        grid: s.grid,
        v: s.v.clone(),
        w: s.w.mapv(|x| x / eps),
        p: s.p.clone(),
        theta: s.theta.mapv(|x| x * eps),
    })
}

/// Inverse of [`rescale_to_fixed`].
pub fn rescale_to_thin(fixed: &PointSamples, eps: f64) -> Result<ThinDomainSamples> {
    check_eps(eps)?;
    Ok(ThinDomainSamples {
        eps,
        samples: PointSamples {
            grid: fixed.grid,
            v: fixed.v.clone(),
            w: fixed.w.mapv(|x| x * eps),
            p: fixed.p.clone(),
            theta: fixed.theta.mapv(|x| x / eps),
        },
    })
}

impl PointSamples {
    /// Spectral state from fixed-domain samples (pressure dropped).
    pub fn to_state(&self, time: f64) -> State {
        let g = self.grid;
        State {
            v: [
                SpectralField::from_physical(g, &self.v[0], Parity::Even),
                SpectralField::from_physical(g, &self.v[1], Parity::Even),
            ],
            w: SpectralField::from_physical(g, &self.w, Parity::Odd),
            theta: SpectralField::from_physical(g, &self.theta, Parity::Odd),
            time,
        }
    }
}

#[cfg(test)]
mod tests;
