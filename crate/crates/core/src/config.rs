//! Run manifests.
//!
//! A manifest is TOML with the sections `[grid]`, `[run]`, `[sweep]`,
//! `[initial]`, `[bounds]`, `[tolerances]` and `[output]`. Every section is
//! optional and every key has a default; unknown keys are rejected. See
//! `examples/manifests/` for complete files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diagnostics::BoundConfig;
use crate::error::{Error, Result};
use crate::io::read_coefficients;
use crate::profiles::{Profile, ProfileKind};
use crate::spectral::{Grid, SpectralField};
use crate::state::{validate_initial_data, InitialData, ValidationOptions, ViolationReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            nx: 32,
            ny: 32,
            nz: 32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    #[default]
    Boussinesq,
    Primitive,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Boussinesq => "boussinesq",
            Solver::Primitive => "primitive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub solver: Solver,
    pub eps: f64,
    pub dt: f64,
    pub horizon: f64,
    pub scheme: String,
    pub max_cfl: f64,
    /// Resume from this checkpoint manifest instead of the initial data.
    pub resume: Option<PathBuf>,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            solver: Solver::Boussinesq,
            eps: 0.1,
            dt: 1e-3,
            horizon: 0.5,
            scheme: "imex-cn-heun".into(),
            max_cfl: 0.5,
            resume: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub eps: Vec<f64>,
    /// Per-ε time steps; when empty, `run.dt` is used for every ε.
    pub dt_per_eps: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            eps: vec![0.4, 0.2, 0.1, 0.05],
            dt_per_eps: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialSection {
    /// A built-in profile name; ignored when `file` is set.
    pub profile: String,
    pub velocity: f64,
    pub temperature: f64,
    /// Coefficient file with the layout documented in [`crate::io`].
    pub file: Option<PathBuf>,
}

impl Default for InitialSection {
    fn default() -> Self {
        InitialSection {
            profile: "acceptance".into(),
            velocity: 0.1,
            temperature: 0.1,
            file: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsSection {
    pub c: f64,
    pub times: Vec<f64>,
    pub eps: f64,
    /// Explicit initial norms; measured from the initial data when absent.
    pub norms: Option<BoundNorms>,
}

impl Default for BoundsSection {
    fn default() -> Self {
        BoundsSection {
            c: 1.0,
            times: vec![0.0, 0.25, 0.5, 1.0],
            eps: 0.1,
            norms: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundNorms {
    pub v0_l2: f64,
    pub theta0_l2: f64,
    pub w0_l2: f64,
    pub v0_h1: f64,
    pub theta0_h1: f64,
    pub v0_h2: f64,
    pub theta0_h2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TolerancesSection {
    pub hypothesis: f64,
    pub require_mean_zero: bool,
    pub min_slope: f64,
    pub max_fit_residual: f64,
}

impl Default for TolerancesSection {
    fn default() -> Self {
        TolerancesSection {
            hypothesis: 1e-10,
            require_mean_zero: true,
            min_slope: 0.9,
            max_fit_residual: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Write every n-th step to trajectory CSVs.
    pub record_stride: usize,
    pub threads: Option<usize>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            record_stride: 10,
            threads: None,
        }
    }
}

/// A parsed and validated manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub grid: GridSection,
    pub run: RunSection,
    pub sweep: SweepSection,
    pub initial: InitialSection,
    pub bounds: BoundsSection,
    pub tolerances: TolerancesSection,
    pub output: OutputSection,
    /// Directory relative paths in the manifest are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Command-line values that take precedence over the manifest.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub dt: Option<f64>,
    pub grid: Option<(usize, usize, usize)>,
    pub eps: Option<Vec<f64>>,
    pub horizon: Option<f64>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before
        .rfind('\n')
        .map_or(before.len(), |i| before.len() - i - 1)
        + 1;
    (line, col)
}

impl RunConfig {
    /// Parse manifest text. Errors carry line and column numbers.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let at = e.span().map(|s| line_col(text, s.start));
            match at {
                Some((line, col)) => {
                    Error::Config(format!("line {line}, column {col}: {}", e.message()))
                }
                None => Error::Config(e.message().to_string()),
            }
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(out) = &o.out {
            self.output.dir = out.clone();
        }
        if let Some(t) = o.threads {
            self.output.threads = Some(t);
        }
        if let Some(dt) = o.dt {
            self.run.dt = dt;
            self.sweep.dt_per_eps.clear();
        }
        if let Some((nx, ny, nz)) = o.grid {
            self.grid = GridSection { nx, ny, nz };
        }
        if let Some(eps) = &o.eps {
            if let [single] = eps.as_slice() {
                self.run.eps = *single;
            }
            self.sweep.eps = eps.clone();
            self.sweep.dt_per_eps.clear();
        }
        if let Some(h) = o.horizon {
            self.run.horizon = h;
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.nx, self.grid.ny, self.grid.nz)
            .map_err(|e| Error::Config(format!("[grid]: {e}")))
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output.dir.clone()
    }

    pub fn resume_path(&self) -> Option<PathBuf> {
        self.run.resume.as_deref().map(|p| self.resolve(p))
    }

    /// Check every field that does not need the initial data.
    pub fn validate(&self) -> Result<()> {
        let bad = |section: &str, msg: String| Err(Error::Config(format!("[{section}] {msg}")));
        self.grid()?;
        let r = &self.run;
        if !(r.eps > 0.0 && r.eps <= 1.0) {
            return bad("run", format!("eps must be in (0, 1], got {}", r.eps));
        }
        if !(r.dt > 0.0 && r.dt.is_finite()) {
            return bad("run", format!("dt must be > 0, got {}", r.dt));
        }
        if !(r.horizon > 0.0 && r.horizon.is_finite()) {
            return bad("run", format!("horizon must be > 0, got {}", r.horizon));
        }
        if r.scheme != "imex-cn-heun" {
            return bad(
                "run",
                format!(
                    "unknown scheme '{}', only 'imex-cn-heun' is available",
                    r.scheme
                ),
            );
        }
        if !(r.max_cfl > 0.0) {
            return bad("run", format!("max_cfl must be > 0, got {}", r.max_cfl));
        }
        let s = &self.sweep;
        if s.eps.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return bad("sweep", "every eps must lie in (0, 1)".into());
        }
        if s.eps.windows(2).any(|w| w[1] >= w[0]) {
            return bad(
                "sweep",
                "eps must be distinct and listed in descending order".into(),
            );
        }
        if !s.dt_per_eps.is_empty() {
            if s.dt_per_eps.len() != s.eps.len() {
                return bad(
                    "sweep",
                    format!(
                        "dt_per_eps has {} entries for {} eps values",
                        s.dt_per_eps.len(),
                        s.eps.len()
                    ),
                );
            }
            if s.dt_per_eps.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
                return bad("sweep", "every dt_per_eps entry must be > 0".into());
            }
        }
        if self.initial.file.is_none() {
            self.initial.profile.parse::<ProfileKind>()?;
        }
        let b = &self.bounds;
        if !(b.c > 0.0 && b.c.is_finite()) {
            return bad("bounds", format!("c must be > 0, got {}", b.c));
        }
        if b.times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return bad("bounds", "times must be >= 0".into());
        }
        if !(b.eps >= 0.0 && b.eps.is_finite()) {
            return bad("bounds", format!("eps must be >= 0, got {}", b.eps));
        }
        let t = &self.tolerances;
        if !(t.hypothesis > 0.0) {
            return bad("tolerances", "hypothesis must be > 0".into());
        }
        if self.output.record_stride == 0 {
            return bad("output", "record_stride must be >= 1".into());
        }
        if self.output.threads == Some(0) {
            return bad("output", "threads must be >= 1".into());
        }
        Ok(())
    }

    pub fn validation_options(&self) -> ValidationOptions {
        ValidationOptions {
            tolerance: self.tolerances.hypothesis,
            require_mean_zero: self.tolerances.require_mean_zero,
        }
    }

    /// Unvalidated initial fields from the profile or coefficient file.
    pub fn raw_initial_fields(&self) -> Result<([SpectralField; 2], SpectralField)> {
        let grid = self.grid()?;
        match &self.initial.file {
            Some(p) => {
                let [v1, v2, _, theta] = read_coefficients(&self.resolve(p))?;
                if v1.grid() != grid {
                    return Err(Error::GridMismatch(format!(
                        "coefficient file is {:?} but [grid] says {:?}",
                        v1.grid().shape(),
                        grid.shape()
                    )));
                }
                Ok(([v1, v2], theta))
            }
            None => {
                let kind: ProfileKind = self.initial.profile.parse()?;
                Ok(
                    Profile::new(kind, self.initial.velocity, self.initial.temperature)
                        .fields(grid),
                )
            }
        }
    }

    /// The hypothesis report for the configured initial data.
    pub fn initial_report(&self) -> Result<ViolationReport> {
        let (v, t) = self.raw_initial_fields()?;
        crate::state::check_initial_data(&v, &t, self.validation_options())
    }

    /// Validated initial data; fails with the full violation report.
    pub fn initial_data(&self) -> Result<InitialData> {
        let (v, t) = self.raw_initial_fields()?;
        validate_initial_data(v, t, self.validation_options())
    }

    pub fn bound_config(&self, data: Option<&InitialData>) -> Result<BoundConfig> {
        let c = self.bounds.c;
        let cfg = match (&self.bounds.norms, data) {
            (Some(n), _) => BoundConfig {
                c,
                v0_l2: n.v0_l2,
                theta0_l2: n.theta0_l2,
                w0_l2: n.w0_l2,
                v0_h1: n.v0_h1,
                theta0_h1: n.theta0_h1,
                v0_h2: n.v0_h2,
                theta0_h2: n.theta0_h2,
            },
            (None, Some(d)) => BoundConfig::from_state(&crate::state::State::from_initial(d)?, c)?,
            (None, None) => {
                return Err(Error::Config(
                    "[bounds] needs either norms or initial data".into(),
                ))
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// SHA-256 of the effective configuration, hex encoded. The `[output]`
    /// section does not change results and is left out.
    pub fn hash(&self) -> String {
        let mut cfg = self.clone();
        cfg.output = OutputSection::default();
        let canonical = toml::to_string(&cfg).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_manifest_gives_defaults() {
        let cfg = RunConfig::parse("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected_with_line_numbers() {
        let err = RunConfig::parse("[grid]\nnx = 16\nnq = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("nq"), "{msg}");
        let err = RunConfig::parse("[run]\ndt = \"fast\"\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(RunConfig::parse("[nonsense]\n").is_err());
    }

    #[test]
    fn validation_catches_bad_values() {
        let check = |text: &str| RunConfig::parse(text).unwrap().validate();
        assert!(check("[grid]\nnx = 7\n").is_err());
        assert!(check("[sweep]\neps = [0.1, 0.2, 0.05]\n").is_err());
        assert!(check("[sweep]\neps = [0.4, 1.5]\n").is_err());
        assert!(check("[sweep]\neps = [0.4, 0.2]\ndt_per_eps = [1e-3]\n").is_err());
        assert!(check("[bounds]\nc = 0.0\n").is_err());
        assert!(check("[initial]\nprofile = \"spiral\"\n").is_err());
        assert!(check("[run]\nscheme = \"euler\"\n").is_err());
        assert!(check("[run]\nhorizon = -1.0\n").is_err());
    }

    #[test]
    fn overrides_take_precedence_and_change_the_hash() {
        let mut cfg = RunConfig::default();
        let h0 = cfg.hash();
        cfg.apply(&Overrides {
            dt: Some(5e-4),
            grid: Some((16, 16, 8)),
            eps: Some(vec![0.2, 0.1, 0.05]),
            ..Default::default()
        });
        assert_eq!(cfg.run.dt, 5e-4);
        assert_eq!(cfg.grid().unwrap().shape(), (16, 16, 8));
        assert_eq!(cfg.sweep.eps, vec![0.2, 0.1, 0.05]);
        assert_ne!(cfg.hash(), h0);
        assert_eq!(cfg.hash(), cfg.clone().hash());
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn acceptance_profile_validates_and_bad_profile_reports() {
        let cfg = RunConfig::parse("[grid]\nnx = 8\nny = 8\nnz = 8\n").unwrap();
        cfg.initial_data().unwrap();
        let bad = RunConfig::parse("[grid]\nnx = 8\nny = 8\nnz = 8\n[initial]\nprofile = \"z-independent\"\nvelocity = 1.0\n")
            .unwrap();
        match bad.initial_data() {
            Err(Error::Hypothesis(r)) => assert!(r.failed(crate::state::Hypothesis::Barotropic)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn line_col_counts_from_one() {
        assert_eq!(line_col("ab\ncd", 0), (1, 1));
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
    }
}
