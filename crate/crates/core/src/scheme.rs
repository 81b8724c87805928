//! Pieces shared by both steppers: the IMEX Crank–Nicolson/Heun update,
//! advection products, forcing hooks, CFL and blow-up guards.
//!
//! One step from `uⁿ` is
//!
//! ```text
//! (1 + ½dt·λ) u*    = (1 − ½dt·λ) uⁿ + dt · N(uⁿ, tⁿ)
//! (1 + ½dt·λ) uⁿ⁺¹  = (1 − ½dt·λ) uⁿ + ½dt · [N(uⁿ, tⁿ) + N(u*, tⁿ⁺¹)]
//! ```
//!
//! with `λ = a_h (k_x² + k_y²) + a_z (πm)²` per mode and `N` the projected
//! explicit tendency.

use std::collections::VecDeque;
use std::sync::Arc;

use ndarray::{Array3, Zip};
use serde::{Deserialize, Serialize};

use crate::error::{BlowUp, Error, Result};
use crate::spectral::{dealias_in_place, derivative, Axis, Grid, Parity, SpectralField};

/// Time-discretization descriptor recorded in checkpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Crank–Nicolson diffusion with an explicit two-stage Heun predictor-corrector.
    #[default]
    ImexCnHeun,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::ImexCnHeun => "imex-cn-heun",
        }
    }
}

/// Explicit tendencies per unknown. The primitive stepper leaves `w` at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Tendency {
    pub v: [SpectralField; 2],
    pub w: SpectralField,
    pub theta: SpectralField,
}

impl Tendency {
    pub fn zeros(grid: Grid) -> Self {
        Tendency {
            v: [
                SpectralField::zeros(grid, Parity::Even),
                SpectralField::zeros(grid, Parity::Even),
            ],
            w: SpectralField::zeros(grid, Parity::Odd),
            theta: SpectralField::zeros(grid, Parity::Odd),
        }
    }

    pub fn add(&mut self, other: &Tendency) {
        self.v[0].axpy(1.0, &other.v[0]);
        self.v[1].axpy(1.0, &other.v[1]);
        self.w.axpy(1.0, &other.w);
        self.theta.axpy(1.0, &other.theta);
    }

    /// `½(self + other)`.
    pub fn average(&self, other: &Tendency) -> Tendency {
        let avg = |a: &SpectralField, b: &SpectralField| &(a + b) * 0.5;
        Tendency {
            v: [avg(&self.v[0], &other.v[0]), avg(&self.v[1], &other.v[1])],
            w: avg(&self.w, &other.w),
            theta: avg(&self.theta, &other.theta),
        }
    }

    pub fn is_finite(&self) -> bool {
        [&self.v[0], &self.v[1], &self.w, &self.theta]
            .iter()
            .all(|f| f.is_finite())
    }
}

/// Additive body forcing, used for manufactured-solution checks.
///
/// Terms are tendencies: they are added to `∂_t v`, `∂_t w` and `∂_t θ`
/// before the pressure projection.
pub trait Forcing: Send + Sync {
    fn tendency(&self, grid: Grid, t: f64) -> Tendency;
}

pub type SharedForcing = Arc<dyn Forcing>;

/// `(1 + ½dt·λ)⁻¹ [(1 − ½dt·λ) prev + dt · tend]` mode by mode.
pub fn cn_advance(
    prev: &SpectralField,
    tend: &SpectralField,
    dt: f64,
    diffusion: (f64, f64),
) -> SpectralField {
    let grid = prev.grid();
    let (kx2, ky2, kz2) = (grid.k2_x(), grid.k2_y(), grid.k2_z());
    let (ah, az) = diffusion;
    let mut out = prev.clone();
    Zip::indexed(out.coeffs_mut())
        .and(tend.coeffs())
        .for_each(|(i, j, l), o, &t| {
            let half = 0.5 * dt * (ah * (kx2[i] + ky2[j]) + az * kz2[l]);
            *o = (*o * (1.0 - half) + t * dt) / (1.0 + half);
        });
    out.with_parity(prev.parity())
}

/// Physical values and gradients needed for `u·∇f`.
pub(crate) struct Advection {
    grid: Grid,
    u: [Array3<f64>; 3],
    pub max_speed: f64,
}

impl Advection {
    pub fn new(v: &[SpectralField; 2], w: &SpectralField) -> Self {
        let u = [v[0].to_physical(), v[1].to_physical(), w.to_physical()];
        let max_speed = Zip::from(&u[0])
            .and(&u[1])
            .and(&u[2])
            .fold(0.0f64, |m, a, b, c| {
                let s = (a * a + b * b + c * c).sqrt();
                if s.is_nan() {
                    f64::NAN
                } else {
                    m.max(s)
                }
            });
        Advection {
            grid: w.grid(),
            u,
            max_speed,
        }
    }

    /// `−dealias(u·∇f)` with the parity of `f`.
    pub fn negative_transport(&self, f: &SpectralField) -> SpectralField {
        let mut acc = Array3::<f64>::zeros(self.grid.shape());
        for (axis, ucomp) in [Axis::X, Axis::Y, Axis::Z].into_iter().zip(&self.u) {
            let df = derivative(f, axis).to_physical();
            Zip::from(&mut acc)
                .and(ucomp)
                .and(&df)
                .for_each(|a, &u, &d| *a -= u * d);
        }
        let mut out = SpectralField::from_physical(self.grid, &acc, f.parity());
        dealias_in_place(&mut out);
        out
    }
}

pub const BLOW_UP_SPEED: f64 = 1e6;
pub const DEFAULT_MAX_CFL: f64 = 0.5;
const HISTORY_LEN: usize = 16;

/// CFL guard and blow-up bookkeeping for one trajectory.
#[derive(Debug, Clone)]
pub(crate) struct Guard {
    pub solver: &'static str,
    pub hint: &'static str,
    pub max_cfl: f64,
    pub step: usize,
    history: VecDeque<(f64, f64)>,
}

impl Guard {
    pub fn new(solver: &'static str, hint: &'static str) -> Self {
        Guard {
            solver,
            hint,
            max_cfl: DEFAULT_MAX_CFL,
            step: 0,
            history: VecDeque::with_capacity(HISTORY_LEN),
        }
    }

    pub fn cfl(max_speed: f64, dt: f64, grid: Grid) -> f64 {
        max_speed * dt * grid.max_retained_wavenumber()
    }

    /// Reject NaN or runaway speeds, then check the CFL number.
    pub fn check(&self, max_speed: f64, time: f64, dt: f64, grid: Grid) -> Result<()> {
        if !max_speed.is_finite() || max_speed > BLOW_UP_SPEED {
            return Err(self.blow_up(time, max_speed));
        }
        let cfl = Self::cfl(max_speed, dt, grid);
        if cfl > self.max_cfl {
            let suggested_dt = self.max_cfl / (max_speed * grid.max_retained_wavenumber());
            return Err(Error::Cfl {
                cfl,
                limit: self.max_cfl,
                suggested_dt,
            });
        }
        Ok(())
    }

    pub fn blow_up(&self, time: f64, max_speed: f64) -> Error {
        Error::BlowUp(Box::new(BlowUp {
            solver: self.solver,
            time,
            step: self.step,
            max_speed,
            norm_history: self.history.iter().copied().collect(),
            hint: self.hint,
        }))
    }

    pub fn accept(&mut self, time: f64, v_norm: f64) {
        if self.history.len() == HISTORY_LEN {
            self.history.pop_front();
        }
        self.history.push_back((time, v_norm));
        self.step += 1;
    }
}

/// Per-step constraint monitors, measured before re-enforcement.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StepDiagnostics {
    pub parity_drift: f64,
    pub divergence_residual: f64,
    pub max_speed: f64,
    pub cfl: f64,
}
