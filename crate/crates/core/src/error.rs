use std::path::PathBuf;

use crate::spectral::Parity;
use crate::state::ViolationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Blow-up diagnosis attached to a failed time step.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowUp {
    pub solver: &'static str,
    pub time: f64,
    pub step: usize,
    pub max_speed: f64,
    /// `(t, ‖v‖₂)` for the most recent accepted steps.
    pub norm_history: Vec<(f64, f64)>,
    pub hint: &'static str,
}

impl std::fmt::Display for BlowUp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} solver blew up at t = {} (step {}): max |u| = {:e}",
            self.solver, self.time, self.step, self.max_speed
        )?;
        if let Some((t, n)) = self.norm_history.last() {
            write!(f, ", last finite ‖v‖₂ = {n:e} at t = {t}")?;
        }
        write!(f, "; {}", self.hint)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid {nx}x{ny}x{nz}: every size must be even and at least 4")]
    InvalidGrid { nx: usize, ny: usize, nz: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("gauge violation: right-hand side has nonzero mean {mean:e}")]
    GaugeViolation { mean: f64 },

    #[error(
        "vertical antiderivative would not be periodic: nonzero z-mean in {} horizontal mode(s), first (kx, ky) = {:?}",
        modes.len(),
        modes.first()
    )]
    NonPeriodic { modes: Vec<(i64, i64)> },

    #[error("parity violation: expected {expected:?} field, projection residual {residual:e}")]
    ParityViolation { expected: Parity, residual: f64 },

    #[error("initial data violates hypotheses: {0}")]
    Hypothesis(ViolationReport),

    #[error("CFL number {cfl:.3} exceeds limit {limit}; try dt <= {suggested_dt:e}")]
    Cfl {
        cfl: f64,
        limit: f64,
        suggested_dt: f64,
    },

    #[error("{0}")]
    BlowUp(Box<BlowUp>),

    #[error("rate fit failed: {0}")]
    Fit(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures the harness treats as a solver blow-up (flagged row).
    pub fn is_solver_failure(&self) -> bool {
        matches!(self, Error::BlowUp(_) | Error::Cfl { .. })
    }
}
