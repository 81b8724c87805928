//! Time stepping for the scaled Boussinesq system on the fixed box:
//!
//! ```text
//! ∂_t v − Δv + (v·∇_h)v + w ∂_z v + ∇_h p = 0
//! ε²(∂_t w − Δw + u·∇w) + ∂_z p − θ = 0
//! ∂_t θ − Δθ + u·∇θ = 0,      ∇_h·v + ∂_z w = 0
//! ```

use crate::error::{Error, Result};
use crate::scheme::{
    cn_advance, Advection, Guard, Scheme, SharedForcing, StepDiagnostics, Tendency,
};
use crate::spectral::{
    derivative, horizontal_divergence, poisson_aniso, Axis, Grid, SpectralField,
};
use crate::state::{PhysicalParams, State};

const HINT: &str = "global existence is only guaranteed for small ε; reduce dt or ε";

/// Advective and buoyancy tendencies before projection:
/// `N_v = −(v·∇_h)v − w∂_z v`, `N_w = −u·∇w + ε⁻²θ`, `N_θ = −u·∇θ`.
pub fn explicit_tendency(s: &State, params: &PhysicalParams) -> Result<Tendency> {
    let (tend, speed) = tendency_and_speed(s, params);
    if !speed.is_finite() || !tend.is_finite() {
        return Err(Guard::new("boussinesq", HINT).blow_up(s.time, speed));
    }
    Ok(tend)
}

fn tendency_and_speed(s: &State, params: &PhysicalParams) -> (Tendency, f64) {
    let adv = Advection::new(&s.v, &s.w);
    let mut w = adv.negative_transport(&s.w);
    w.axpy(1.0 / (params.eps * params.eps), &s.theta);
    let tend = Tendency {
        v: [
            adv.negative_transport(&s.v[0]),
            adv.negative_transport(&s.v[1]),
        ],
        w,
        theta: adv.negative_transport(&s.theta),
    };
    (tend, adv.max_speed)
}

/// Solve `(Δ_h + ε⁻²∂_zz) p = ∇_h·N_v + ∂_z N_w`, then remove `∇_h p` from
/// `N_v` and `ε⁻²∂_z p` from `N_w`. Returns the projected tendencies and `p`.
pub fn pressure_project(mut tend: Tendency, eps: f64) -> Result<(Tendency, SpectralField)> {
    let rhs = &horizontal_divergence(&tend.v[0], &tend.v[1]) + &derivative(&tend.w, Axis::Z);
    let p = poisson_aniso(&rhs, eps)?;
    tend.v[0].axpy(-1.0, &derivative(&p, Axis::X));
    tend.v[1].axpy(-1.0, &derivative(&p, Axis::Y));
    tend.w.axpy(-1.0 / (eps * eps), &derivative(&p, Axis::Z));
    Ok((tend, p))
}

/// One trajectory of the scaled Boussinesq system.
pub struct BoussinesqStepper {
    params: PhysicalParams,
    grid: Grid,
    dt: f64,
    forcing: Option<SharedForcing>,
    guard: Guard,
    last: StepDiagnostics,
}

impl BoussinesqStepper {
    pub fn new(params: PhysicalParams, grid: Grid, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
        }
        Ok(BoussinesqStepper {
            params,
            grid,
            dt,
            forcing: None,
            guard: Guard::new("boussinesq", HINT),
            last: StepDiagnostics::default(),
        })
    }

    pub fn with_forcing(mut self, forcing: SharedForcing) -> Self {
        self.forcing = Some(forcing);
        self
    }

    /// Override the CFL limit (default 0.5).
    pub fn with_max_cfl(mut self, limit: f64) -> Self {
        self.guard.max_cfl = limit;
        self
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn scheme(&self) -> Scheme {
        Scheme::ImexCnHeun
    }

    pub fn steps_taken(&self) -> usize {
        self.guard.step
    }

    /// Constraint monitors of the most recent step.
    pub fn last_diagnostics(&self) -> StepDiagnostics {
        self.last
    }

    fn projected(&self, s: &State, t: f64) -> Result<(Tendency, f64)> {
        let (mut tend, speed) = tendency_and_speed(s, &self.params);
        self.guard.check(speed, s.time, self.dt, self.grid)?;
        if let Some(f) = &self.forcing {
            tend.add(&f.tendency(self.grid, t));
        }
        if !tend.is_finite() {
            return Err(self.guard.blow_up(s.time, f64::NAN));
        }
        let (tend, _) = pressure_project(tend, self.params.eps)?;
        Ok((tend, speed))
    }

    fn advance(&self, s: &State, tend: &Tendency, time: f64) -> State {
        let (dt, mom, heat) = (
            self.dt,
            self.params.momentum_diffusion(),
            self.params.heat_diffusion(),
        );
        State {
            v: [
                cn_advance(&s.v[0], &tend.v[0], dt, mom),
                cn_advance(&s.v[1], &tend.v[1], dt, mom),
            ],
            w: cn_advance(&s.w, &tend.w, dt, mom),
            theta: cn_advance(&s.theta, &tend.theta, dt, heat),
            time,
        }
    }

    /// Advance by `dt`.
    pub fn step(&mut self, s: &State) -> Result<State> {
        if s.grid() != self.grid {
            return Err(Error::GridMismatch(format!(
                "state {:?} vs stepper {:?}",
                s.grid().shape(),
                self.grid.shape()
            )));
        }
        let t0 = s.time;
        let t1 = t0 + self.dt;
        let (n0, speed) = self.projected(s, t0)?;
        let predictor = self.advance(s, &n0, t1);
        let (n1, _) = self.projected(&predictor, t1)?;
        let mut next = self.advance(s, &n0.average(&n1), t1);

        if !next.is_finite() {
            return Err(self.guard.blow_up(t1, f64::NAN));
        }
        let parity_drift = next.parity_drift();
        next.enforce_parities();
        let divergence_residual = next.divergence_residual();
        next.project_divergence_free(self.params.eps)?;
        self.last = StepDiagnostics {
            parity_drift,
            divergence_residual,
            max_speed: speed,
            cfl: Guard::cfl(speed, self.dt, self.grid),
        };
        self.guard
            .accept(t1, next.v[0].l2_norm().hypot(next.v[1].l2_norm()));
        Ok(next)
    }

    /// Step until `time ≥ t_end` (to within a tenth of a step).
    pub fn run_until(
        &mut self,
        mut s: State,
        t_end: f64,
        mut observe: impl FnMut(&State),
    ) -> Result<State> {
        while s.time < t_end - 0.1 * self.dt {
            s = self.step(&s)?;
            observe(&s);
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::spectral::{enforce_parity, Parity};
    use crate::state::diagnose_w;

    fn grid() -> Grid {
        Grid::new(16, 16, 16).unwrap()
    }

    fn field(parity: Parity, f: impl Fn(f64, f64, f64) -> f64) -> SpectralField {
        SpectralField::from_fn(grid(), parity, f)
    }

    fn theta_only(amp: f64) -> State {
        let mut s = State::zeros(grid());
        s.theta = field(Parity::Odd, |x, _, z| amp * x.sin() * (PI * z).sin());
        s
    }

    #[test]
    fn still_fluid_has_pure_buoyancy_tendency() {
        let eps = 0.3;
        let s = theta_only(1.0);
        let t = explicit_tendency(&s, &PhysicalParams::scaled(eps).unwrap()).unwrap();
        assert_eq!(t.v[0].max_abs_coeff(), 0.0);
        assert_eq!(t.theta.max_abs_coeff(), 0.0);
        let expect = &s.theta * (1.0 / (eps * eps));
        assert!((&t.w - &expect).max_abs_coeff() < 1e-14);
        assert_eq!(t.w.parity(), Parity::Odd);
    }

    #[test]
    fn x_independent_temperature_is_not_advected_by_shear() {
        let mut s = State::zeros(grid());
        s.v[0] = field(Parity::Even, |_, y, _| y.sin());
        s.theta = field(Parity::Odd, |_, _, z| (PI * z).sin());
        let t = explicit_tendency(&s, &PhysicalParams::scaled(0.5).unwrap()).unwrap();
        assert!(t.theta.max_abs_coeff() < 1e-16);
        assert_eq!(t.v[0].parity(), Parity::Even);
    }

    #[test]
    fn single_mode_flow_leaves_zero_temperature_untouched() {
        let mut s = State::zeros(grid());
        s.v[0] = field(Parity::Even, |x, _, z| x.sin() * (PI * z).cos());
        s.w = diagnose_w(&s.v).unwrap();
        let t = explicit_tendency(&s, &PhysicalParams::scaled(0.5).unwrap()).unwrap();
        assert_eq!(t.theta.max_abs_coeff(), 0.0);
    }

    #[test]
    fn projection_single_mode_example() {
        let g = grid();
        let mut tend = Tendency::zeros(g);
        tend.v[0] = field(Parity::Even, |x, _, z| x.cos() * (PI * z).cos());
        let (out, p) = pressure_project(tend, 1.0).unwrap();
        // ∇_h·N_v = −sin x cos πz, and the symbol is −(1 + π²)
        let expect = field(Parity::Even, |x, _, z| {
            x.sin() * (PI * z).cos() / (1.0 + PI * PI)
        });
        assert!((&p - &expect).max_abs_coeff() < 1e-15);
        let div = &horizontal_divergence(&out.v[0], &out.v[1]) + &derivative(&out.w, Axis::Z);
        assert!(div.max_abs_coeff() < 1e-15);
    }

    #[test]
    fn projection_of_buoyancy_leaves_no_divergence() {
        let eps = 0.1;
        let g = grid();
        let mut tend = Tendency::zeros(g);
        let theta = field(Parity::Odd, |_, _, z| (PI * z).sin());
        tend.w = &theta * (1.0 / (eps * eps));
        let (out, p) = pressure_project(tend.clone(), eps).unwrap();
        // (ε⁻²∂_zz) p = ε⁻²π cos πz gives p = −cos(πz)/π, which balances θ exactly
        let expect = field(Parity::Even, |_, _, z| -(PI * z).cos() / PI);
        assert!((&p - &expect).max_abs_coeff() < 1e-14);
        assert!(out.w.max_abs_coeff() < 1e-12);
        let (again, _) = pressure_project(out.clone(), eps).unwrap();
        assert!((&again.w - &out.w).max_abs_coeff() < 1e-14);
    }

    #[test]
    fn pure_diffusion_follows_crank_nicolson() {
        let eps = 0.2;
        let dt = 1e-3;
        let amp = 0.3;
        let mut s = State::zeros(grid());
        // horizontally solenoidal and z-independent: no advection, no pressure
        s.v[0] = field(Parity::Even, |_, y, z| amp * y.sin() * (PI * z).cos());
        let mut stepper =
            BoussinesqStepper::new(PhysicalParams::scaled(eps).unwrap(), grid(), dt).unwrap();
        let out = stepper.step(&s).unwrap();
        let k = 1.0 + PI * PI;
        let factor = (1.0 - dt * k / 2.0) / (1.0 + dt * k / 2.0);
        let got = out.v[0].coeff(0, 1, 1).im * -4.0;
        assert!(
            (got - amp * factor).abs() < 1e-15,
            "{got} vs {}",
            amp * factor
        );
    }

    #[test]
    fn zero_state_stays_zero() {
        let mut stepper =
            BoussinesqStepper::new(PhysicalParams::scaled(0.5).unwrap(), grid(), 1e-3).unwrap();
        let out = stepper.step(&State::zeros(grid())).unwrap();
        assert!(out.fields().iter().all(|f| f.max_abs_coeff() == 0.0));
        assert!((out.time - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn temperature_decays_from_rest() {
        let s = theta_only(0.5);
        let mut stepper =
            BoussinesqStepper::new(PhysicalParams::scaled(0.3).unwrap(), grid(), 1e-3).unwrap();
        let out = stepper.step(&s).unwrap();
        assert!(out.theta.l2_norm() < s.theta.l2_norm());
    }

    #[test]
    fn constraints_survive_nonlinear_steps() {
        let g = grid();
        let a = 0.5;
        let mut s = State::zeros(g);
        s.v[0] = field(Parity::Even, |x, _, z| a * x.sin() * (PI * z).cos());
        s.v[1] = field(Parity::Even, |_, y, z| -a * y.sin() * (PI * z).cos());
        s.w = diagnose_w(&s.v).unwrap();
        s.theta = field(Parity::Odd, |x, y, z| {
            a * (x + 2.0 * y).cos() * (2.0 * PI * z).sin()
        });
        let mut stepper =
            BoussinesqStepper::new(PhysicalParams::scaled(0.2).unwrap(), g, 2e-3).unwrap();
        for _ in 0..20 {
            s = stepper.step(&s).unwrap();
            let d = stepper.last_diagnostics();
            assert!(d.parity_drift < 1e-12, "{d:?}");
            assert!(s.divergence_residual() < 1e-10);
            assert!(s.w_boundary_residual() < 1e-10);
        }
        assert_eq!(stepper.steps_taken(), 20);
        assert_eq!(enforce_parity(&s.w, Parity::Odd), s.w);
    }

    #[test]
    fn excessive_dt_is_rejected_with_suggestion() {
        let g = grid();
        let mut s = State::zeros(g);
        s.v[0] = field(Parity::Even, |_, y, z| 5.0 * y.sin() * (PI * z).cos());
        let mut stepper =
            BoussinesqStepper::new(PhysicalParams::scaled(0.5).unwrap(), g, 0.5).unwrap();
        match stepper.step(&s) {
            Err(Error::Cfl { suggested_dt, .. }) => assert!(suggested_dt < 0.5),
            other => panic!("expected CFL error, got {other:?}"),
        }
        assert!(BoussinesqStepper::new(PhysicalParams::scaled(0.5).unwrap(), g, 0.0).is_err());
    }
}
