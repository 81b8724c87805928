//! The bound functions `α₁ … α₈`, `β₁`, `β₂` exactly as printed. The
//! constant `C` is a user choice and is never asserted against.

use serde::{Deserialize, Serialize};

use super::norms::{h1_norm_sq, h2_norm_sq};
use crate::error::{Error, Result};
use crate::state::State;

/// The generic constant and the initial-data norms entering the bounds.
/// Norms are stored unsquared.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConfig {
    pub c: f64,
    pub v0_l2: f64,
    pub theta0_l2: f64,
    pub w0_l2: f64,
    pub v0_h1: f64,
    pub theta0_h1: f64,
    pub v0_h2: f64,
    pub theta0_h2: f64,
}

impl BoundConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bound constant C must be > 0, got {}",
                self.c
            )));
        }
        let norms = [
            ("v0_l2", self.v0_l2),
            ("theta0_l2", self.theta0_l2),
            ("w0_l2", self.w0_l2),
            ("v0_h1", self.v0_h1),
            ("theta0_h1", self.theta0_h1),
            ("v0_h2", self.v0_h2),
            ("theta0_h2", self.theta0_h2),
        ];
        for (name, v) in norms {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Norms measured from an initial state.
    pub fn from_state(s: &State, c: f64) -> Result<Self> {
        let pair = |f: fn(&crate::spectral::SpectralField) -> f64| (f(&s.v[0]) + f(&s.v[1])).sqrt();
        let cfg = BoundConfig {
            c,
            v0_l2: pair(|f| f.l2_norm_sq()),
            theta0_l2: s.theta.l2_norm(),
            w0_l2: s.w.l2_norm(),
            v0_h1: pair(h1_norm_sq),
            theta0_h1: h1_norm_sq(&s.theta).sqrt(),
            v0_h2: pair(h2_norm_sq),
            theta0_h2: h2_norm_sq(&s.theta).sqrt(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "bound time must be >= 0, got {t}"
        )))
    }
}

/// `[α₁(t), …, α₈(t)]`.
pub fn alphas(t: f64, cfg: &BoundConfig) -> Result<[f64; 8]> {
    check_time(t)?;
    cfg.validate()?;
    let c = cfg.c;
    let v1 = cfg.v0_h1 * cfg.v0_h1;
    let th1 = cfg.theta0_h1 * cfg.theta0_h1;
    let v2 = cfg.v0_h2 * cfg.v0_h2;
    let th2 = cfg.theta0_h2 * cfg.theta0_h2;

    let a1 = (8.0 * t + 1.0) * (v1 + th1);
    let a2 = (t + 2.0) * (c * (t + 2.0) * (a1 * a1 + a1 + 1.0)).exp() * (v1 * v1 + th1 * th1 + a1);
    let a3 = c * (c * t * a2 * a2).exp() * (v1 + t * a1);
    let a4 = c * (c * t * (1.0 + a2 * a2)).exp() * (th1 + (a2.sqrt() + t * a2 * a2 + 1.0) * a3);
    let e13 = (c * (a1 * a1 + a3 * a3)).exp();
    let a5 = c * e13 * (v1 + a1);
    let a6 = c * e13 * (th1 + a4 * a4 + a5 * a5);
    let e5 = (c * a5 * a5).exp();
    let a7 = c * (t + 1.0) * e5 * (v2 + a6);
    let a8 = c * e5 * (th2 + a6 * a6 + a7 * a7);
    Ok([a1, a2, a3, a4, a5, a6, a7, a8])
}

/// `α_i(t)` for `i ∈ 1..=8`.
pub fn alpha(i: usize, t: f64, cfg: &BoundConfig) -> Result<f64> {
    if !(1..=8).contains(&i) {
        return Err(Error::InvalidParameter(format!(
            "alpha index must be in 1..=8, got {i}"
        )));
    }
    Ok(alphas(t, cfg)?[i - 1])
}

/// `β₁(t)` or `β₂(t)` at aspect ratio `eps`.
pub fn beta(which: usize, t: f64, cfg: &BoundConfig, eps: f64) -> Result<f64> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "eps must be >= 0, got {eps}"
        )));
    }
    let a = alphas(t, cfg)?;
    let c = cfg.c;
    match which {
        1 => {
            let (a5, a6) = (a[4], a[5]);
            let energy =
                cfg.v0_l2.powi(2) + eps * eps * cfg.w0_l2.powi(2) + t * cfg.theta0_l2.powi(2);
            Ok(c * (c * (t + a5 * a5 + a6 * a6)).exp() * (a5 + a5 * a5 + energy * energy))
        }
        2 => {
            let (a7, a8) = (a[6], a[7]);
            Ok(c * (c * (t + a8 * a8 + (1.0 + eps.powi(4)) * a7 * a7)).exp() * (a7 + a7 * a7))
        }
        _ => Err(Error::InvalidParameter(format!(
            "beta index must be 1 or 2, got {which}"
        ))),
    }
}

/// One row of a bound table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundRow {
    pub t: f64,
    pub alpha: [f64; 8],
    pub beta1: f64,
    pub beta2: f64,
}

impl BoundRow {
    pub fn at(t: f64, cfg: &BoundConfig, eps: f64) -> Result<Self> {
        Ok(BoundRow {
            t,
            alpha: alphas(t, cfg)?,
            beta1: beta(1, t, cfg, eps)?,
            beta2: beta(2, t, cfg, eps)?,
        })
    }
}
