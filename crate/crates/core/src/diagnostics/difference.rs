use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{grad_norm_sq, laplacian_norm_sq, SpectralField};
use crate::state::{DifferenceState, State};

/// Squared norms of `(V_ε, εW_ε, Φ_ε)` at one instant.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DifferenceSample {
    pub t: f64,
    /// `‖V‖₂²`, `ε²‖W‖₂²`, `‖Φ‖₂²`.
    pub v_sq: f64,
    pub eps_w_sq: f64,
    pub phi_sq: f64,
    /// `‖∇(V, εW, Φ)‖₂²`.
    pub grad_sq: f64,
    /// `‖Δ(V, εW, Φ)‖₂²`.
    pub lap_sq: f64,
}

impl DifferenceSample {
    /// `‖(V, εW, Φ)‖₂²`.
    pub fn l2_sq(&self) -> f64 {
        self.v_sq + self.eps_w_sq + self.phi_sq
    }

    /// `‖(V, εW, Φ)‖²_{H¹}`.
    pub fn h1_sq(&self) -> f64 {
        self.l2_sq() + self.grad_sq
    }
}

/// Evaluate the composite difference norms of a Boussinesq and a primitive
/// state at the same time.
pub fn difference_norms(bq: &State, pe: &State, eps: f64) -> Result<DifferenceSample> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be > 0, got {eps}"
        )));
    }
    let d = DifferenceState::between(bq, pe)?;
    let e2 = eps * eps;
    let sum = |f: fn(&SpectralField) -> f64| f(&d.v[0]) + f(&d.v[1]) + e2 * f(&d.w) + f(&d.phi);
    Ok(DifferenceSample {
        t: bq.time,
        v_sq: d.v[0].l2_norm_sq() + d.v[1].l2_norm_sq(),
        eps_w_sq: e2 * d.w.l2_norm_sq(),
        phi_sq: d.phi.l2_norm_sq(),
        grad_sq: sum(grad_norm_sq),
        lap_sq: sum(laplacian_norm_sq),
    })
}

/// Running sups and trapezoid time integrals of the difference norms.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DifferenceSeries {
    pub samples: Vec<DifferenceSample>,
    pub sup_l2_sq: f64,
    pub sup_v_sq: f64,
    pub sup_eps_w_sq: f64,
    pub sup_phi_sq: f64,
    pub sup_grad_sq: f64,
    pub sup_h1_sq: f64,
    /// `∫₀ᵗ ‖∇(V, εW, Φ)‖₂²`.
    pub int_grad_sq: f64,
    /// `∫₀ᵗ ‖Δ(V, εW, Φ)‖₂²`.
    pub int_lap_sq: f64,
}

impl DifferenceSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, s: DifferenceSample) {
        if let Some(prev) = self.samples.last() {
            let h = s.t - prev.t;
            self.int_grad_sq += 0.5 * h * (prev.grad_sq + s.grad_sq);
            self.int_lap_sq += 0.5 * h * (prev.lap_sq + s.lap_sq);
        }
        self.sup_l2_sq = self.sup_l2_sq.max(s.l2_sq());
        self.sup_v_sq = self.sup_v_sq.max(s.v_sq);
        self.sup_eps_w_sq = self.sup_eps_w_sq.max(s.eps_w_sq);
        self.sup_phi_sq = self.sup_phi_sq.max(s.phi_sq);
        self.sup_grad_sq = self.sup_grad_sq.max(s.grad_sq);
        self.sup_h1_sq = self.sup_h1_sq.max(s.h1_sq());
        self.samples.push(s);
    }

    /// `E = (sup ‖(V, εW, Φ)‖₂²)^{1/2} + (∫ ‖∇(V, εW, Φ)‖₂²)^{1/2}`.
    pub fn composite(&self) -> f64 {
        self.sup_l2_sq.sqrt() + self.int_grad_sq.sqrt()
    }

    /// The H¹ analogue: `(sup ‖∇(V, εW, Φ)‖₂²)^{1/2} + (∫ ‖Δ(V, εW, Φ)‖₂²)^{1/2}`.
    pub fn h1_composite(&self) -> f64 {
        self.sup_grad_sq.sqrt() + self.int_lap_sq.sqrt()
    }

    /// Largest `‖(V, εW, Φ)‖²_{H¹}` over samples with `t ≤ t_max`.
    pub fn sup_h1_sq_until(&self, t_max: f64) -> f64 {
        self.samples
            .iter()
            .take_while(|s| s.t <= t_max)
            .fold(0.0, |m, s| m.max(s.h1_sq()))
    }

    /// Largest `‖(V, εW, Φ)‖²_{H¹}` over samples with `t ≥ t_min`.
    pub fn sup_h1_sq_after(&self, t_min: f64) -> f64 {
        self.samples
            .iter()
            .filter(|s| s.t >= t_min)
            .fold(0.0, |m, s| m.max(s.h1_sq()))
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::spectral::{Grid, Parity};

    fn grid() -> Grid {
        Grid::new(8, 8, 8).unwrap()
    }

    fn some_state() -> State {
        let mut s = State::zeros(grid());
        s.v[0] = SpectralField::from_fn(grid(), Parity::Even, |x, _, z| x.sin() * (PI * z).cos());
        s.w = crate::state::diagnose_w(&s.v).unwrap();
        s.theta = SpectralField::from_fn(grid(), Parity::Odd, |_, y, z| y.cos() * (PI * z).sin());
        s
    }

    #[test]
    fn identical_states_have_zero_difference() {
        let s = some_state();
        let d = difference_norms(&s, &s, 0.1).unwrap();
        assert_eq!(d.h1_sq(), 0.0);
        assert_eq!(d.lap_sq, 0.0);
    }

    #[test]
    fn zero_primitive_reduces_to_scaled_norms() {
        let s = some_state();
        let eps = 0.3;
        let d = difference_norms(&s, &State::zeros(grid()), eps).unwrap();
        let expect = s.v[0].l2_norm_sq() + eps * eps * s.w.l2_norm_sq() + s.theta.l2_norm_sq();
        assert!((d.l2_sq() - expect).abs() < 1e-13);
    }

    #[test]
    fn synthetic_velocity_difference() {
        let delta = 0.01;
        let mut bq = State::zeros(grid());
        bq.v[0] = SpectralField::from_fn(grid(), Parity::Even, |x, _, _| delta * x.sin());
        let d = difference_norms(&bq, &State::zeros(grid()), 0.5).unwrap();
        // ∫ sin² x over the box is half its volume 8π²
        assert!((d.l2_sq() - delta * delta * 4.0 * PI * PI).abs() < 1e-15);
    }

    #[test]
    fn series_accumulates_sup_and_trapezoid() {
        let mut series = DifferenceSeries::new();
        for (t, g) in [(0.0, 0.0), (0.1, 2.0), (0.2, 4.0)] {
            series.push(DifferenceSample {
                t,
                v_sq: g,
                grad_sq: g,
                ..Default::default()
            });
        }
        assert_eq!(series.sup_l2_sq, 4.0);
        assert!((series.int_grad_sq - 0.4).abs() < 1e-15);
        assert!((series.composite() - (2.0 + 0.4f64.sqrt())).abs() < 1e-15);
        assert_eq!(series.sup_h1_sq_until(0.15), 4.0);
        assert_eq!(series.sup_h1_sq_after(0.15), 8.0);
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let a = State::zeros(grid());
        let b = State::zeros(Grid::cubic(4).unwrap());
        assert!(difference_norms(&a, &b, 0.1).is_err());
    }
}
