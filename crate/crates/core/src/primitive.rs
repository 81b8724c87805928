//! Primitive equations with full viscosity and diffusion, written with the
//! hydrostatic pressure `p = p_ν + ∫₀^z θ dξ`:
//!
//! ```text
//! ∂_t v − Δv + (v·∇_h)v + w ∂_z v + ∇_h p_ν + ∇_h ∫₀^z θ dξ = 0
//! ∂_t θ − Δθ + u·∇θ = 0,      w = −∫₋₁^z ∇_h·v dξ
//! ```
//!
//! `w` is diagnosed after every stage and never prognosed.

use ndarray::Array3;

use crate::error::{Error, Result};
use crate::scheme::{
    cn_advance, Advection, Guard, Scheme, SharedForcing, StepDiagnostics, Tendency,
};
use crate::spectral::{
    dealias_in_place, derivative, enforce_parity, horizontal_derivative, horizontal_divergence,
    poisson_horizontal, vertical_antiderivative, Axis, Grid, HorizontalField, Parity,
    SpectralField, VerticalOrigin,
};
use crate::state::{diagnose_w, remove_barotropic_divergence, PhysicalParams, State};

const HINT: &str = "the primitive equations are globally well posed, so this indicates a numerical fault; reduce dt";

const PARITY_TOLERANCE: f64 = 1e-10;

/// `p = p_ν + ∫₀^z θ dξ`. Requires `θ` odd in `z`; the result is even.
pub fn hydrostatic_pressure(
    theta: &SpectralField,
    p_nu: &HorizontalField,
) -> Result<SpectralField> {
    if theta.grid() != p_nu.grid() {
        return Err(Error::GridMismatch(
            "θ and p_ν live on different grids".into(),
        ));
    }
    let odd = enforce_parity(theta, Parity::Odd);
    let residual = (theta - &odd).max_abs_coeff();
    if residual > PARITY_TOLERANCE * theta.max_abs_coeff().max(f64::MIN_POSITIVE) {
        return Err(Error::ParityViolation {
            expected: Parity::Odd,
            residual,
        });
    }
    let column = vertical_antiderivative(&odd, VerticalOrigin::Middle)?;
    Ok((&column + &p_nu.to_field()).with_parity(Parity::Even))
}

/// `∇_h ∫₀^z θ dξ`, the baroclinic pressure gradient.
fn baroclinic_gradient(theta: &SpectralField) -> Result<[SpectralField; 2]> {
    let column = vertical_antiderivative(theta, VerticalOrigin::Middle)?;
    Ok([derivative(&column, Axis::X), derivative(&column, Axis::Y)])
}

fn product(a: &Array3<f64>, b: &Array3<f64>, grid: Grid, parity: Parity) -> SpectralField {
    let mut f = SpectralField::from_physical(grid, &(a * b), parity);
    dealias_in_place(&mut f);
    f
}

/// Surface pressure from its elliptic problem
///
/// ```text
/// −Δ_h p_ν = ½∫₋₁¹ ∇_h·[∇_h·(v⊗v) + ∫₀^z ∇_h θ dξ] dz,    ∫_M p_ν = 0.
/// ```
pub fn surface_pressure(v: &[SpectralField; 2], theta: &SpectralField) -> Result<HorizontalField> {
    let grid = theta.grid();
    let phys = [v[0].to_physical(), v[1].to_physical()];
    let vv = [
        [
            product(&phys[0], &phys[0], grid, Parity::Even),
            product(&phys[0], &phys[1], grid, Parity::Even),
        ],
        [
            product(&phys[1], &phys[0], grid, Parity::Even),
            product(&phys[1], &phys[1], grid, Parity::Even),
        ],
    ];
    let flux = [
        horizontal_divergence(&vv[0][0], &vv[0][1]),
        horizontal_divergence(&vv[1][0], &vv[1][1]),
    ];
    let [gx, gy] = baroclinic_gradient(theta)?;
    let rhs = horizontal_divergence(&(&flux[0] + &gx), &(&flux[1] + &gy));
    poisson_horizontal(&rhs.vertical_mean())
}

/// Surface pressure obtained by projecting the vertically averaged momentum
/// tendency onto horizontally divergence-free fields.
pub fn surface_pressure_projection(
    v: &[SpectralField; 2],
    theta: &SpectralField,
) -> Result<HorizontalField> {
    let s = State {
        v: v.clone(),
        w: diagnose_w(v)?,
        theta: theta.clone(),
        time: 0.0,
    };
    let (_, p_nu, _) = unprojected_tendency(&s, None)?;
    Ok(p_nu)
}

/// Returns the tendency after barotropic projection, `p_ν`, and `max|u|`.
fn unprojected_tendency(
    s: &State,
    forcing: Option<&Tendency>,
) -> Result<(Tendency, HorizontalField, f64)> {
    let adv = Advection::new(&s.v, &s.w);
    let [gx, gy] = baroclinic_gradient(&s.theta)?;
    let mut tend = Tendency {
        v: [
            &adv.negative_transport(&s.v[0]) - &gx,
            &adv.negative_transport(&s.v[1]) - &gy,
        ],
        w: SpectralField::zeros(s.grid(), Parity::Odd),
        theta: adv.negative_transport(&s.theta),
    };
    if let Some(f) = forcing {
        tend.v[0].axpy(1.0, &f.v[0]);
        tend.v[1].axpy(1.0, &f.v[1]);
        tend.theta.axpy(1.0, &f.theta);
    }
    // Δ_h p_ν = ∇_h·(vertical mean of N_v)
    let rhs = horizontal_divergence(&tend.v[0], &tend.v[1]).vertical_mean();
    let p_nu = poisson_horizontal(&(&HorizontalField::zeros(s.grid()) - &rhs))?;
    tend.v[0].axpy(-1.0, &horizontal_derivative(&p_nu, Axis::X).to_field());
    tend.v[1].axpy(-1.0, &horizontal_derivative(&p_nu, Axis::Y).to_field());
    Ok((tend, p_nu, adv.max_speed))
}

/// One trajectory of the primitive equations.
pub struct PrimitiveStepper {
    params: PhysicalParams,
    grid: Grid,
    dt: f64,
    forcing: Option<SharedForcing>,
    guard: Guard,
    last: StepDiagnostics,
}

impl PrimitiveStepper {
    /// Unit viscosity and diffusivity in every direction.
    pub fn new(grid: Grid, dt: f64) -> Result<Self> {
        Self::with_params(PhysicalParams::new(1.0, 1.0, 1.0, 1.0, 1.0)?, grid, dt)
    }

    /// Custom coefficients; `eps` is ignored apart from the `μ_z/ε²` stretch.
    pub fn with_params(params: PhysicalParams, grid: Grid, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be > 0, got {dt}")));
        }
        Ok(PrimitiveStepper {
            params,
            grid,
            dt,
            forcing: None,
            guard: Guard::new("primitive", HINT),
            last: StepDiagnostics::default(),
        })
    }

    pub fn with_forcing(mut self, forcing: SharedForcing) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn with_max_cfl(mut self, limit: f64) -> Self {
        self.guard.max_cfl = limit;
        self
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

    pub fn last_diagnostics(&self) -> StepDiagnostics {
        self.last
    }

    /// Full hydrostatic pressure of `s`, including any forcing at `s.time`.
    pub fn pressure(&self, s: &State) -> Result<SpectralField> {
        let forcing = self.forcing.as_ref().map(|f| f.tendency(self.grid, s.time));
        let (_, p_nu, _) = unprojected_tendency(s, forcing.as_ref())?;
        hydrostatic_pressure(&s.theta, &p_nu)
    }

    fn projected(&self, s: &State, t: f64) -> Result<(Tendency, f64)> {
        let forcing = self.forcing.as_ref().map(|f| f.tendency(self.grid, t));
        let (tend, _, speed) = unprojected_tendency(s, forcing.as_ref())?;
        self.guard.check(speed, s.time, self.dt, self.grid)?;
        if !tend.is_finite() {
            return Err(self.guard.blow_up(s.time, f64::NAN));
        }
        Ok((tend, speed))
    }

    /// CN update of `(v, θ)`, followed by parity and barotropic cleanup and
    /// diagnosis of `w`. Returns the new state, the parity drift and the
    /// barotropic residual seen before cleanup.
    fn advance(&self, s: &State, tend: &Tendency, time: f64) -> Result<(State, f64, f64)> {
        let (dt, mom, heat) = (
            self.dt,
            self.params.momentum_diffusion(),
            self.params.heat_diffusion(),
        );
        let mut v = [
            cn_advance(&s.v[0], &tend.v[0], dt, mom),
            cn_advance(&s.v[1], &tend.v[1], dt, mom),
        ];
        let mut theta = cn_advance(&s.theta, &tend.theta, dt, heat);
        if !(v[0].is_finite() && v[1].is_finite() && theta.is_finite()) {
            return Err(self.guard.blow_up(time, f64::NAN));
        }
        let drift = [&v[0], &v[1], &theta]
            .iter()
            .map(|f| f.parity_residual())
            .fold(0.0, f64::max);
        v = [
            enforce_parity(&v[0], Parity::Even),
            enforce_parity(&v[1], Parity::Even),
        ];
        theta = enforce_parity(&theta, Parity::Odd);
        let barotropic = horizontal_divergence(&v[0], &v[1])
            .vertical_mean()
            .coeffs()
            .iter()
            .fold(0.0f64, |a, c| a.max(c.norm()));
        let [mut a, mut b] = v;
        remove_barotropic_divergence(&mut a, &mut b);
        let v = [a, b];
        let w = diagnose_w(&v)?;
        Ok((State { v, w, theta, time }, drift, barotropic))
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
        let (predictor, _, _) = self.advance(s, &n0, t1)?;
        let (n1, _) = self.projected(&predictor, t1)?;
        let (next, parity_drift, divergence_residual) = self.advance(s, &n0.average(&n1), t1)?;
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
