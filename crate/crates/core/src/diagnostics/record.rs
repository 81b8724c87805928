//! Trajectory sampling and energy budgets.
//!
//! Each dissipation integral is kept twice. The trapezoid rule uses the
//! sampled norms. The midpoint variant evaluates `‖∇((fⁿ + fⁿ⁺¹)/2)‖₂²`,
//! which is the quantity Crank–Nicolson dissipates exactly, so budget
//! residuals measured with it isolate the error of the explicit terms.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::norms::{norms, NormSample};
use crate::error::{Error, Result};
use crate::spectral::{grad_norm_sq, SpectralField};
use crate::state::State;

/// One row of a trajectory: norms plus accumulated time integrals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    #[serde(flatten)]
    pub norms: NormSample,
    pub int_grad_v_sq: f64,
    pub int_grad_theta_sq: f64,
    pub int_grad_w_sq: f64,
    pub mid_grad_v_sq: f64,
    pub mid_grad_theta_sq: f64,
    pub mid_grad_w_sq: f64,
    pub int_theta_w: f64,
    pub mid_theta_w: f64,
    pub int_theta_grad_v: f64,
}

/// Time series of [`TrajectorySample`]s, strictly increasing in `t`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub samples: Vec<TrajectorySample>,
}

/// CSV header of [`TrajectoryRecord::write_csv`].
pub const RECORD_HEADER: [&str; 22] = [
    "t",
    "v_l2",
    "theta_l2",
    "w_l2",
    "v_l4",
    "theta_l4",
    "dz_v_l2",
    "dz_theta_l2",
    "grad_v_l2",
    "grad_theta_l2",
    "grad_w_l2",
    "lap_v_l2",
    "lap_theta_l2",
    "int_grad_v_sq",
    "int_grad_theta_sq",
    "int_grad_w_sq",
    "mid_grad_v_sq",
    "mid_grad_theta_sq",
    "mid_grad_w_sq",
    "int_theta_w",
    "mid_theta_w",
    "int_theta_grad_v",
];

impl TrajectoryRecord {
    pub fn first(&self) -> Option<&TrajectorySample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&TrajectorySample> {
        self.samples.last()
    }

    /// Write every `stride`-th sample (and always the last) as CSV.
    pub fn write_csv(&self, path: &Path, stride: usize) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
        w.write_record(RECORD_HEADER)
            .map_err(|e| csv_error(path, e))?;
        let n = self.samples.len();
        for (k, s) in self.samples.iter().enumerate() {
            if k % stride.max(1) != 0 && k + 1 != n {
                continue;
            }
            let m = &s.norms;
            let row = [
                m.t,
                m.v_l2,
                m.theta_l2,
                m.w_l2,
                m.v_l4,
                m.theta_l4,
                m.dz_v_l2,
                m.dz_theta_l2,
                m.grad_v_l2,
                m.grad_theta_l2,
                m.grad_w_l2,
                m.lap_v_l2,
                m.lap_theta_l2,
                s.int_grad_v_sq,
                s.int_grad_theta_sq,
                s.int_grad_w_sq,
                s.mid_grad_v_sq,
                s.mid_grad_theta_sq,
                s.mid_grad_w_sq,
                s.int_theta_w,
                s.mid_theta_w,
                s.int_theta_grad_v,
            ];
            w.write_record(row.iter().map(|x| format!("{x:e}")))
                .map_err(|e| csv_error(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e.to_string()))
}

/// Builds a [`TrajectoryRecord`] from successive states.
#[derive(Debug, Clone)]
pub struct Recorder {
    record: TrajectoryRecord,
    prev: State,
}

fn midpoint_grad(a: &SpectralField, b: &SpectralField) -> f64 {
    grad_norm_sq(&(&(a + b) * 0.5))
}

impl Recorder {
    pub fn new(initial: &State) -> Self {
        let norms = norms(initial);
        Recorder {
            record: TrajectoryRecord {
                samples: vec![TrajectorySample {
                    norms,
                    ..Default::default()
                }],
            },
            prev: initial.clone(),
        }
    }

    /// Append `s`, which must be later than the previous state.
    pub fn record(&mut self, s: &State) -> Result<()> {
        let prev = *self
            .record
            .samples
            .last()
            .expect("recorder always holds the initial sample");
        let h = s.time - prev.norms.t;
        if !(h > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "samples must be strictly increasing in time ({} after {})",
                s.time, prev.norms.t
            )));
        }
        let n = norms(s);
        let p = &self.prev;
        let trap = |a: f64, b: f64| 0.5 * h * (a + b);
        let mid_v = midpoint_grad(&p.v[0], &s.v[0]) + midpoint_grad(&p.v[1], &s.v[1]);
        let mid_theta_w = (&(&p.theta + &s.theta) * 0.5).inner(&(&(&p.w + &s.w) * 0.5));
        let sample = TrajectorySample {
            norms: n,
            int_grad_v_sq: prev.int_grad_v_sq
                + trap(prev.norms.grad_v_l2.powi(2), n.grad_v_l2.powi(2)),
            int_grad_theta_sq: prev.int_grad_theta_sq
                + trap(prev.norms.grad_theta_l2.powi(2), n.grad_theta_l2.powi(2)),
            int_grad_w_sq: prev.int_grad_w_sq
                + trap(prev.norms.grad_w_l2.powi(2), n.grad_w_l2.powi(2)),
            mid_grad_v_sq: prev.mid_grad_v_sq + h * mid_v,
            mid_grad_theta_sq: prev.mid_grad_theta_sq + h * midpoint_grad(&p.theta, &s.theta),
            mid_grad_w_sq: prev.mid_grad_w_sq + h * midpoint_grad(&p.w, &s.w),
            int_theta_w: prev.int_theta_w + trap(p.theta.inner(&p.w), s.theta.inner(&s.w)),
            mid_theta_w: prev.mid_theta_w + h * mid_theta_w,
            int_theta_grad_v: prev.int_theta_grad_v
                + trap(
                    prev.norms.theta_l2 * prev.norms.grad_v_l2,
                    n.theta_l2 * n.grad_v_l2,
                ),
        };
        self.record.samples.push(sample);
        self.prev = s.clone();
        Ok(())
    }

    pub fn record_ref(&self) -> &TrajectoryRecord {
        &self.record
    }

    pub fn finish(self) -> TrajectoryRecord {
        self.record
    }
}

/// Which energy balance to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    /// `‖θ(t)‖₂² + 2∫‖∇θ‖₂² − ‖θ₀‖₂²`, zero for exact solutions.
    Theta,
    /// `4√2∫‖θ‖₂‖∇v‖₂ − (‖v(t)‖₂² − ‖v₀‖₂² + 2∫‖∇v‖₂²)`, nonnegative for
    /// exact primitive solutions.
    Velocity,
    /// `½Δ(‖v‖² + ε²‖w‖² + ‖θ‖²) + ∫(‖∇v‖² + ε²‖∇w‖² + ‖∇θ‖²) − ∫∫θw`,
    /// zero for exact Boussinesq solutions.
    Combined { eps: f64 },
}

/// Time-integration rule for the dissipation terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Quadrature {
    Trapezoid,
    #[default]
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BudgetPoint {
    pub t: f64,
    pub residual: f64,
}

/// Residual series of an energy balance. Requires uniform sampling.
pub fn energy_budget(
    record: &TrajectoryRecord,
    budget: Budget,
    quadrature: Quadrature,
) -> Result<Vec<BudgetPoint>> {
    let s = &record.samples;
    let Some(first) = s.first() else {
        return Ok(Vec::new());
    };
    if s.len() > 2 {
        let h = s[1].norms.t - s[0].norms.t;
        for pair in s.windows(2) {
            let hk = pair[1].norms.t - pair[0].norms.t;
            if (hk - h).abs() > 1e-9 * h.abs().max(f64::MIN_POSITIVE) {
                return Err(Error::InvalidParameter(format!(
                    "energy budget needs uniform sampling; found steps {h} and {hk}"
                )));
            }
        }
    }
    let mid = quadrature == Quadrature::Midpoint;
    let f0 = first.norms;
    let out = s
        .iter()
        .map(|x| {
            let n = x.norms;
            let residual = match budget {
                Budget::Theta => {
                    let diss = if mid {
                        x.mid_grad_theta_sq
                    } else {
                        x.int_grad_theta_sq
                    };
                    n.theta_l2.powi(2) + 2.0 * diss - f0.theta_l2.powi(2)
                }
                Budget::Velocity => {
                    let diss = if mid {
                        x.mid_grad_v_sq
                    } else {
                        x.int_grad_v_sq
                    };
                    4.0 * 2f64.sqrt() * x.int_theta_grad_v
                        - (n.v_l2.powi(2) - f0.v_l2.powi(2) + 2.0 * diss)
                }
                Budget::Combined { eps } => {
                    let e2 = eps * eps;
                    let energy =
                        |m: &NormSample| m.v_l2.powi(2) + e2 * m.w_l2.powi(2) + m.theta_l2.powi(2);
                    let (dv, dw, dt, src) = if mid {
                        (
                            x.mid_grad_v_sq,
                            x.mid_grad_w_sq,
                            x.mid_grad_theta_sq,
                            x.mid_theta_w,
                        )
                    } else {
                        (
                            x.int_grad_v_sq,
                            x.int_grad_w_sq,
                            x.int_grad_theta_sq,
                            x.int_theta_w,
                        )
                    };
                    0.5 * (energy(&n) - energy(&f0)) + dv + e2 * dw + dt - src
                }
            };
            BudgetPoint { t: n.t, residual }
        })
        .collect();
    Ok(out)
}

/// Write a budget residual series as two-column CSV.
pub fn write_budget_csv(points: &[BudgetPoint], path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    writeln!(f, "t,residual").map_err(|e| Error::io(path, e))?;
    for p in points {
        writeln!(f, "{:e},{:e}", p.t, p.residual).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}
