//! Manufactured solutions.
//!
//! Velocities come from a vector potential `(a, b, 0)` with `a, b` odd in
//! `z`:
//!
//! ```text
//! v = (−∂_z b, ∂_z a),   w = ∂_x b − ∂_y a
//! ```
//!
//! This is divergence free, has `v` even and `w` odd, and satisfies the
//! barotropic constraint because `∇_h·v = −∂_z w` and `w(±1) = 0`. The same
//! `w` is what the primitive solver diagnoses from `v`.
//!
//! Every field is a sum of separable terms `c·X(x)·Y(y)·Z(z)·g(t)`, so all
//! derivatives in the forcing are exact. The Boussinesq forcing takes
//! `p = 0`; the primitive forcing takes the hydrostatic pressure
//! `p = −Σ c·X·Y·cos(mπz)/(mπ)` for each `θ` term `c·X·Y·sin(mπz)`.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scheme::{Forcing, SharedForcing, Tendency};
use crate::spectral::{Grid, Parity, SpectralField};
use crate::state::{PhysicalParams, State};

/// A periodic function of one variable with closed-form derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Profile1 {
    /// `sin(k s)`.
    Sin(f64),
    /// `cos(k s)`.
    Cos(f64),
    /// `exp(β cos s)`; its Fourier coefficients decay like `(β/2)^k/k!`.
    ExpCos(f64),
}

impl Profile1 {
    /// The `n`-th derivative at `s`, `n ≤ 3` for [`Profile1::ExpCos`].
    pub fn eval(self, n: u8, s: f64) -> f64 {
        match self {
            Profile1::Sin(k) | Profile1::Cos(k) => {
                let shift = if matches!(self, Profile1::Cos(_)) {
                    1
                } else {
                    0
                };
                let scale = k.powi(n as i32);
                match (n + shift) % 4 {
                    0 => scale * (k * s).sin(),
                    1 => scale * (k * s).cos(),
                    2 => -scale * (k * s).sin(),
                    _ => -scale * (k * s).cos(),
                }
            }
            Profile1::ExpCos(b) => {
                let (sn, cs) = s.sin_cos();
                let e = (b * cs).exp();
                match n {
                    0 => e,
                    1 => -b * sn * e,
                    2 => (b * b * sn * sn - b * cs) * e,
                    3 => sn * (3.0 * b * b * cs + b - b * b * b * sn * sn) * e,
                    _ => panic!("ExpCos derivatives are implemented up to order 3"),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Term {
    coef: f64,
    f: [Profile1; 3],
    d: [u8; 3],
}

impl Term {
    fn eval(&self, p: [f64; 3]) -> f64 {
        self.coef
            * (0..3)
                .map(|i| self.f[i].eval(self.d[i], p[i]))
                .product::<f64>()
    }

    fn diff(mut self, axis: usize) -> Self {
        self.d[axis] += 1;
        self
    }
}

/// A finite sum of separable terms.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Separable {
    terms: Vec<Term>,
}

impl Separable {
    pub fn term(coef: f64, x: Profile1, y: Profile1, z: Profile1) -> Self {
        Separable {
            terms: vec![Term {
                coef,
                f: [x, y, z],
                d: [0; 3],
            }],
        }
    }

    pub fn plus(mut self, other: Separable) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn scaled(mut self, c: f64) -> Self {
        for t in &mut self.terms {
            t.coef *= c;
        }
        self
    }

    /// Partial derivative along axis 0 (x), 1 (y) or 2 (z).
    pub fn diff(&self, axis: usize) -> Self {
        Separable {
            terms: self.terms.iter().map(|t| t.diff(axis)).collect(),
        }
    }

    pub fn eval(&self, x: f64, y: f64, z: f64) -> f64 {
        self.terms.iter().map(|t| t.eval([x, y, z])).sum()
    }

    pub fn laplacian(&self) -> Self {
        self.diff(0)
            .diff(0)
            .plus(self.diff(1).diff(1))
            .plus(self.diff(2).diff(2))
    }

    fn grad(&self) -> [Separable; 3] {
        [self.diff(0), self.diff(1), self.diff(2)]
    }
}

/// Time factor `g(t)` shared by every field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimeFactor {
    Steady,
    /// `cos(ωt)`.
    Oscillating(f64),
}

impl TimeFactor {
    pub fn value(self, t: f64) -> f64 {
        match self {
            TimeFactor::Steady => 1.0,
            TimeFactor::Oscillating(w) => (w * t).cos(),
        }
    }

    pub fn rate(self, t: f64) -> f64 {
        match self {
            TimeFactor::Steady => 0.0,
            TimeFactor::Oscillating(w) => -w * (w * t).sin(),
        }
    }
}

/// A manufactured solution built from a vector potential and a temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manufactured {
    pub a: Separable,
    pub b: Separable,
    pub theta: Separable,
    /// `Θ` with `∂_zΘ = θ`; the hydrostatic pressure of the primitive system.
    pub theta_antiderivative: Separable,
    pub time: TimeFactor,
}

struct Parts {
    u: [Separable; 4],
    grads: [[Separable; 3]; 4],
    laps: [Separable; 4],
    dp: [Separable; 2],
}

impl Manufactured {
    /// Build from `a`, `b` and `θ = Σ c·X·Y·sin(mπz)`, each term given as
    /// `(c, X, Y, m)`.
    pub fn new(
        a: Separable,
        b: Separable,
        theta_terms: &[(f64, Profile1, Profile1, u32)],
        time: TimeFactor,
    ) -> Self {
        let mut theta = Separable::default();
        let mut anti = Separable::default();
        for &(c, x, y, m) in theta_terms {
            let k = PI * m as f64;
            theta = theta.plus(Separable::term(c, x, y, Profile1::Sin(k)));
            anti = anti.plus(Separable::term(-c / k, x, y, Profile1::Cos(k)));
        }
        Manufactured {
            a,
            b,
            theta,
            theta_antiderivative: anti,
            time,
        }
    }

    /// One low mode per unknown, oscillating in time.
    pub fn low_mode() -> Self {
        use Profile1::{Cos, Sin};
        Manufactured::new(
            Separable::term(0.5, Cos(1.0), Sin(1.0), Sin(PI)),
            Separable::term(0.4, Sin(1.0), Cos(2.0), Sin(PI)),
            &[(0.6, Cos(1.0), Cos(1.0), 2)],
            TimeFactor::Oscillating(2.0),
        )
    }

    /// A steady solution whose horizontal spectrum is not band limited.
    pub fn analytic_steady(beta: f64) -> Self {
        use Profile1::{Cos, ExpCos, Sin};
        Manufactured::new(
            Separable::term(0.3, ExpCos(beta), Sin(1.0), Sin(PI)),
            Separable::term(0.3, Cos(1.0), ExpCos(beta), Sin(PI)),
            &[(0.3, ExpCos(beta), Cos(1.0), 1)],
            TimeFactor::Steady,
        )
    }

    fn parts(&self) -> Parts {
        let v1 = self.b.diff(2).scaled(-1.0);
        let v2 = self.a.diff(2);
        let w = self.b.diff(0).plus(self.a.diff(1).scaled(-1.0));
        let u = [v1, v2, w, self.theta.clone()];
        let grads = u.clone().map(|f| f.grad());
        let laps = u.clone().map(|f| f.laplacian());
        let dp = [
            self.theta_antiderivative.diff(0),
            self.theta_antiderivative.diff(1),
        ];
        Parts { u, grads, laps, dp }
    }

    /// `(v₁, v₂, w, θ)` at `(x, y, z, t)`.
    pub fn eval(&self, x: f64, y: f64, z: f64, t: f64) -> [f64; 4] {
        let g = self.time.value(t);
        let p = self.parts();
        p.u.map(|f| g * f.eval(x, y, z))
    }

    /// The exact state on `grid` at time `t`.
    pub fn state(&self, grid: Grid, t: f64) -> State {
        let g = self.time.value(t);
        let p = self.parts();
        let f = |k: usize, parity| {
            SpectralField::from_fn(grid, parity, |x, y, z| g * p.u[k].eval(x, y, z))
        };
        State {
            v: [f(0, Parity::Even), f(1, Parity::Even)],
            w: f(2, Parity::Odd),
            theta: f(3, Parity::Odd),
            time: t,
        }
    }

    /// Forcing for the Boussinesq system with unit diffusion and aspect ratio `eps`.
    pub fn boussinesq_forcing(&self, eps: f64) -> SharedForcing {
        Arc::new(MmsForcing {
            parts: self.parts(),
            time: self.time,
            system: System::Boussinesq { eps },
        })
    }

    /// Forcing for the primitive system with unit diffusion.
    pub fn primitive_forcing(&self) -> SharedForcing {
        Arc::new(MmsForcing {
            parts: self.parts(),
            time: self.time,
            system: System::Primitive,
        })
    }
}

#[derive(Debug, Clone, Copy)]
enum System {
    Boussinesq { eps: f64 },
    Primitive,
}

struct MmsForcing {
    parts: Parts,
    time: TimeFactor,
    system: System,
}

impl MmsForcing {
    /// `[F_v₁, F_v₂, F_w, F_θ]` at one point.
    fn at(&self, x: f64, y: f64, z: f64, t: f64) -> [f64; 4] {
        let (g, dg) = (self.time.value(t), self.time.rate(t));
        let p = &self.parts;
        let u: [f64; 4] = std::array::from_fn(|k| p.u[k].eval(x, y, z));
        let mut out = [0.0; 4];
        for k in 0..4 {
            let adv: f64 = (0..3).map(|i| u[i] * p.grads[k][i].eval(x, y, z)).sum();
            out[k] = dg * u[k] - g * p.laps[k].eval(x, y, z) + g * g * adv;
        }
        match self.system {
            System::Boussinesq { eps } => out[2] -= g * u[3] / (eps * eps),
            System::Primitive => {
                out[0] += g * p.dp[0].eval(x, y, z);
                out[1] += g * p.dp[1].eval(x, y, z);
                out[2] = 0.0;
            }
        }
        out
    }
}

impl Forcing for MmsForcing {
    fn tendency(&self, grid: Grid, t: f64) -> Tendency {
        let f = |k: usize, parity| {
            SpectralField::from_fn(grid, parity, |x, y, z| self.at(x, y, z, t)[k])
        };
        Tendency {
            v: [f(0, Parity::Even), f(1, Parity::Even)],
            w: f(2, Parity::Odd),
            theta: f(3, Parity::Odd),
        }
    }
}

/// Which solver an MMS run exercises.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MmsSolver {
    Boussinesq { eps: f64 },
    Primitive,
}

/// Relative L² error `‖u_N(T) − u(T)‖ / ‖u(T)‖` over `(v, w, θ)` after
/// stepping the forced solver from the exact initial state.
pub fn mms_error(
    m: &Manufactured,
    solver: MmsSolver,
    grid: Grid,
    dt: f64,
    horizon: f64,
) -> Result<f64> {
    let s0 = m.state(grid, 0.0);
    let end = match solver {
        MmsSolver::Boussinesq { eps } => {
            let params = PhysicalParams::new(eps, 1.0, eps * eps, 1.0, eps * eps)?;
            let mut st = crate::boussinesq::BoussinesqStepper::new(params, grid, dt)?
                .with_forcing(m.boussinesq_forcing(eps));
            st.run_until(s0, horizon, |_| {})?
        }
        MmsSolver::Primitive => {
            let mut st = crate::primitive::PrimitiveStepper::new(grid, dt)?
                .with_forcing(m.primitive_forcing());
            st.run_until(s0, horizon, |_| {})?
        }
    };
    let exact = m.state(grid, end.time);
    let (mut num, mut den) = (0.0, 0.0);
    for (a, b) in end.fields().iter().zip(exact.fields()) {
        num += (*a - b).l2_norm_sq();
        den += b.l2_norm_sq();
    }
    Ok((num / den).sqrt())
}

/// Observed order from errors at successively halved steps.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(f: impl Fn(f64) -> f64, s: f64) -> f64 {
        let h = 1e-4;
        (f(s - 2.0 * h) - 8.0 * f(s - h) + 8.0 * f(s + h) - f(s + 2.0 * h)) / (12.0 * h)
    }

    #[test]
    fn one_dimensional_derivatives_match_finite_differences() {
        for p in [
            Profile1::Sin(2.0),
            Profile1::Cos(3.0),
            Profile1::ExpCos(1.3),
        ] {
            for n in 0..3u8 {
                for s in [0.1, 1.7, 4.0] {
                    let want = fd(|s| p.eval(n, s), s);
                    let got = p.eval(n + 1, s);
                    assert!(
                        (want - got).abs() < 1e-7 * (1.0 + got.abs()),
                        "{p:?} n={n} s={s}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn manufactured_velocity_satisfies_the_constraints() {
        for m in [Manufactured::low_mode(), Manufactured::analytic_steady(1.0)] {
            let s = m.state(Grid::cubic(16).unwrap(), 0.3);
            assert!(
                s.divergence_residual() < 1e-6,
                "{}",
                s.divergence_residual()
            );
            assert!(s.barotropic_residual() < 1e-6);
            assert!(s.parity_drift() < 1e-14);
        }
        let m = Manufactured::low_mode();
        let s = m.state(Grid::cubic(16).unwrap(), 0.3);
        assert!(s.divergence_residual() < 1e-12);
        let w = crate::state::diagnose_w(&s.v).unwrap();
        assert!((&w - &s.w).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn pressure_is_hydrostatic() {
        let m = Manufactured::low_mode();
        for (x, y, z) in [(0.3, 1.1, -0.4), (2.0, 5.0, 0.7)] {
            let dz = fd(|z| m.theta_antiderivative.eval(x, y, z), z);
            assert!((dz - m.theta.eval(x, y, z)).abs() < 1e-9);
        }
    }

    #[test]
    fn forcing_balances_the_residual_of_the_exact_solution() {
        // central differences in time and space on the exact fields reproduce F
        let m = Manufactured::low_mode();
        let eps = 0.5;
        let f = MmsForcing {
            parts: m.parts(),
            time: m.time,
            system: System::Boussinesq { eps },
        };
        let (x, y, z, t) = (0.7, 2.1, 0.35, 0.4);
        let u = |x: f64, y: f64, z: f64, t: f64| m.eval(x, y, z, t);
        let h = 1e-3;
        let at = |dx: f64, dy: f64, dz: f64| u(x + dx, y + dy, z + dz, t);
        let c = at(0.0, 0.0, 0.0);
        let axes = [(h, 0.0, 0.0), (0.0, h, 0.0), (0.0, 0.0, h)];
        let got = f.at(x, y, z, t);
        for k in 0..4 {
            let dt = (u(x, y, z, t + h)[k] - u(x, y, z, t - h)[k]) / (2.0 * h);
            let mut lap = 0.0;
            let mut adv = 0.0;
            for (i, &(a, b, d)) in axes.iter().enumerate() {
                let (p, q) = (at(a, b, d)[k], at(-a, -b, -d)[k]);
                lap += (p - 2.0 * c[k] + q) / (h * h);
                adv += c[i] * (p - q) / (2.0 * h);
            }
            let mut want = dt - lap + adv;
            if k == 2 {
                want -= c[3] / (eps * eps);
            }
            assert!(
                (got[k] - want).abs() < 1e-5 * (1.0 + want.abs()),
                "component {k}: {} vs {want}",
                got[k]
            );
        }
    }

    #[test]
    fn orders_from_halved_steps() {
        let o = observed_orders(&[4e-6, 1e-6, 2.5e-7]);
        assert!(o.iter().all(|x| (x - 2.0).abs() < 1e-12));
    }
}
