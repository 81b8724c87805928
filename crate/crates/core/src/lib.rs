//! Scaled Boussinesq and primitive-equation solvers on a periodic box,
//! with the diagnostics needed to measure how fast the former converge to
//! the latter as the aspect ratio `ε` goes to zero.
//!
//! The crate is organized bottom-up:
//!
//! - [`spectral`]: grid, transforms, derivatives, dealiasing, elliptic solves
//! - [`state`]: unknowns, physical parameters, initial-data checks, `w` diagnosis
//! - [`boussinesq`] and [`primitive`]: IMEX time steppers for both systems
//! - [`diagnostics`]: norms, energy budgets, bound functions, difference norms
//! - [`harness`]: paired runs over an `ε` sweep and rate fitting
//! - [`config`] and [`io`]: manifests, coefficient files, checkpoints
//! - [`mms`]: manufactured solutions for verification
//! - [`profiles`]: built-in initial data
//! - [`commands`]: the operations behind the `hydrolimit` binary

pub mod boussinesq;
pub mod commands;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod io;
pub mod mms;
pub mod primitive;
pub mod profiles;
pub mod scheme;
pub mod spectral;
pub mod state;

pub use error::{Error, Result};
pub use spectral::{Grid, Parity, SpectralField};
pub use state::{PhysicalParams, State};
