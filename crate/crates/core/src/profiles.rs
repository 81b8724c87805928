//! Built-in analytic initial data.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Grid, Parity, SpectralField};

/// Named analytic profiles. The last two violate a hypothesis on purpose
/// and exist to exercise the validator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Profile {
    /// `v = A(sin x cos πz, −sin y cos πz)`, `θ = B sin x sin πz`.
    Acceptance {
        velocity: f64,
        temperature: f64,
    },
    Zero,
    /// `v = 0`, `θ = B sin πz`.
    ThetaColumn {
        temperature: f64,
    },
    /// `v = A(sin y cos πz, sin x cos πz)`, horizontally divergence free.
    Shear {
        velocity: f64,
    },
    /// `v = (A sin x, 0)`: breaks the barotropic constraint.
    ZIndependent {
        velocity: f64,
    },
    /// `v = (A, 0)`: breaks the mean-zero hypothesis.
    Constant {
        velocity: f64,
    },
}

/// Profile names accepted in manifests.
pub const PROFILE_NAMES: [&str; 6] = [
    "acceptance",
    "zero",
    "theta-column",
    "shear",
    "z-independent",
    "constant",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Acceptance,
    Zero,
    ThetaColumn,
    Shear,
    ZIndependent,
    Constant,
}

impl FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "acceptance" => ProfileKind::Acceptance,
            "zero" => ProfileKind::Zero,
            "theta-column" => ProfileKind::ThetaColumn,
            "shear" => ProfileKind::Shear,
            "z-independent" => ProfileKind::ZIndependent,
            "constant" => ProfileKind::Constant,
            other => {
                return Err(Error::Config(format!(
                    "unknown profile '{other}', expected one of {}",
                    PROFILE_NAMES.join(", ")
                )))
            }
        })
    }
}

impl Profile {
    /// Build a profile from its kind and amplitudes (missing amplitudes are 0).
    pub fn new(kind: ProfileKind, velocity: f64, temperature: f64) -> Self {
        match kind {
            ProfileKind::Acceptance => Profile::Acceptance {
                velocity,
                temperature,
            },
            ProfileKind::Zero => Profile::Zero,
            ProfileKind::ThetaColumn => Profile::ThetaColumn { temperature },
            ProfileKind::Shear => Profile::Shear { velocity },
            ProfileKind::ZIndependent => Profile::ZIndependent { velocity },
            ProfileKind::Constant => Profile::Constant { velocity },
        }
    }

    /// The configuration of the rate-verification run.
    pub fn acceptance() -> Self {
        Profile::Acceptance {
            velocity: 0.1,
            temperature: 0.1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Profile::Acceptance { .. } => "acceptance",
            Profile::Zero => "zero",
            Profile::ThetaColumn { .. } => "theta-column",
            Profile::Shear { .. } => "shear",
            Profile::ZIndependent { .. } => "z-independent",
            Profile::Constant { .. } => "constant",
        }
    }

    /// Raw `(v₀, θ₀)` sampled on `grid`, not yet validated.
    pub fn fields(&self, grid: Grid) -> ([SpectralField; 2], SpectralField) {
        let even = |f: &dyn Fn(f64, f64, f64) -> f64| SpectralField::from_fn(grid, Parity::Even, f);
        let odd = |f: &dyn Fn(f64, f64, f64) -> f64| SpectralField::from_fn(grid, Parity::Odd, f);
        let zero_v = || {
            [
                SpectralField::zeros(grid, Parity::Even),
                SpectralField::zeros(grid, Parity::Even),
            ]
        };
        let zero_t = || SpectralField::zeros(grid, Parity::Odd);
        match *self {
            Profile::Acceptance {
                velocity: a,
                temperature: b,
            } => (
                [
                    even(&|x, _, z| a * x.sin() * (PI * z).cos()),
                    even(&|_, y, z| -a * y.sin() * (PI * z).cos()),
                ],
                odd(&|x, _, z| b * x.sin() * (PI * z).sin()),
            ),
            Profile::Zero => (zero_v(), zero_t()),
            Profile::ThetaColumn { temperature: b } => {
                (zero_v(), odd(&|_, _, z| b * (PI * z).sin()))
            }
            Profile::Shear { velocity: a } => (
                [
                    even(&|_, y, z| a * y.sin() * (PI * z).cos()),
                    even(&|x, _, z| a * x.sin() * (PI * z).cos()),
                ],
                zero_t(),
            ),
            Profile::ZIndependent { velocity: a } => (
                [
                    even(&|x, _, _| a * x.sin()),
                    SpectralField::zeros(grid, Parity::Even),
                ],
                zero_t(),
            ),
            Profile::Constant { velocity: a } => (
                [even(&|_, _, _| a), SpectralField::zeros(grid, Parity::Even)],
                zero_t(),
            ),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Acceptance {
                velocity,
                temperature,
            } => {
                write!(
                    f,
                    "acceptance (velocity {velocity}, temperature {temperature})"
                )
            }
            Profile::Zero => write!(f, "zero"),
            Profile::ThetaColumn { temperature } => {
                write!(f, "theta-column (temperature {temperature})")
            }
            Profile::Shear { velocity } => write!(f, "shear (velocity {velocity})"),
            Profile::ZIndependent { velocity } => write!(f, "z-independent (velocity {velocity})"),
            Profile::Constant { velocity } => write!(f, "constant (velocity {velocity})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{check_initial_data, Hypothesis, ValidationOptions};

    #[test]
    fn well_prepared_profiles_pass_validation() {
        let g = Grid::new(8, 8, 8).unwrap();
        for p in [
            Profile::acceptance(),
            Profile::Zero,
            Profile::ThetaColumn { temperature: 1.0 },
            Profile::Shear { velocity: 0.5 },
        ] {
            let (v, t) = p.fields(g);
            let report = check_initial_data(&v, &t, ValidationOptions::default()).unwrap();
            assert!(report.all_passed(), "{p}: {report}");
        }
    }

    #[test]
    fn bad_profiles_fail_the_intended_hypothesis() {
        let g = Grid::new(8, 8, 8).unwrap();
        let (v, t) = Profile::ZIndependent { velocity: 1.0 }.fields(g);
        let r = check_initial_data(&v, &t, ValidationOptions::default()).unwrap();
        assert_eq!(
            r.failures().map(|c| c.hypothesis).collect::<Vec<_>>(),
            vec![Hypothesis::Barotropic]
        );
        let (v, t) = Profile::Constant { velocity: 1.0 }.fields(g);
        let r = check_initial_data(&v, &t, ValidationOptions::default()).unwrap();
        assert_eq!(
            r.failures().map(|c| c.hypothesis).collect::<Vec<_>>(),
            vec![Hypothesis::VelocityMeanZero]
        );
    }

    #[test]
    fn names_round_trip() {
        for name in PROFILE_NAMES {
            let p = Profile::new(name.parse().unwrap(), 1.0, 1.0);
            assert_eq!(p.name(), name);
        }
        assert!("sideways".parse::<ProfileKind>().is_err());
    }
}
