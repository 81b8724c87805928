//! Paired Boussinesq/primitive runs over an ε sweep and the fitted rate.
//!
//! Runs that share a time step advance in lockstep: one primitive stepper
//! drives the group and every Boussinesq stepper in it compares against the
//! same primitive state after each step. Groups with different time steps
//! run one after another; Boussinesq steppers within a group run in parallel.
//!
//! # Files written by [`emit_report`]
//!
//! `rows.csv` has the header [`ROW_HEADER`], one row per ε in sweep order.
//! Norm columns are unsquared: `sup_l2 = (sup‖(V, εW, Φ)‖₂²)^{1/2}`,
//! `int_grad = (∫‖∇(V, εW, Φ)‖₂²)^{1/2}` and `composite = sup_l2 + int_grad`.
//! The `h1_*` columns are the same quantities one derivative higher.
//!
//! `summary.json` holds [`ConvergenceReport`]; it is a pure function of the
//! metadata and the rows, so [`ConvergenceReport::from_rows`] on the parsed
//! `rows.csv` reproduces it byte for byte. Wall-clock times go to
//! `timing.csv` and are left out of the summary.
//!
//! `loglog_<column>.dat` holds whitespace-separated `ln ε  ln value` pairs for
//! successful rows.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boussinesq::BoussinesqStepper;
use crate::diagnostics::{
    csv_error, difference_norms, DifferenceSeries, Recorder, TrajectoryRecord,
};
use crate::error::{Error, Result};
use crate::primitive::PrimitiveStepper;
use crate::spectral::Grid;
use crate::state::{InitialData, PhysicalParams, State};

/// Version of the `summary.json` layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Header of `rows.csv`.
pub const ROW_HEADER: [&str; 13] = [
    "eps",
    "dt",
    "status",
    "t_end",
    "sup_l2",
    "int_grad",
    "composite",
    "sup_v",
    "sup_eps_w",
    "sup_phi",
    "h1_sup",
    "h1_int",
    "h1_composite",
];

/// How the time step depends on ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DtPolicy {
    Fixed(f64),
    /// One step per ε, in sweep order.
    PerEps(Vec<f64>),
}

/// A validated sweep.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    epsilons: Vec<f64>,
    dt: DtPolicy,
    horizon: f64,
    initial: InitialData,
    max_cfl: f64,
    threads: Option<usize>,
}

impl SweepPlan {
    pub fn new(
        epsilons: Vec<f64>,
        dt: DtPolicy,
        horizon: f64,
        initial: InitialData,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if epsilons.is_empty() {
            return bad("sweep needs at least one eps".into());
        }
        if epsilons.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return bad(format!("every eps must lie in (0, 1): {epsilons:?}"));
        }
        if epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return bad(format!("eps must be distinct and descending: {epsilons:?}"));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return bad(format!("horizon must be > 0, got {horizon}"));
        }
        match &dt {
            DtPolicy::Fixed(d) if !(*d > 0.0 && d.is_finite()) => {
                return bad(format!("dt must be > 0, got {d}"))
            }
            DtPolicy::PerEps(ds) if ds.len() != epsilons.len() => {
                return bad(format!(
                    "{} time steps for {} eps values",
                    ds.len(),
                    epsilons.len()
                ))
            }
            DtPolicy::PerEps(ds) if ds.iter().any(|d| !(*d > 0.0 && d.is_finite())) => {
                return bad("every dt must be > 0".into())
            }
            _ => {}
        }
        Ok(SweepPlan {
            epsilons,
            dt,
            horizon,
            initial,
            max_cfl: crate::scheme::DEFAULT_MAX_CFL,
            threads: None,
        })
    }

    pub fn with_max_cfl(mut self, limit: f64) -> Self {
        self.max_cfl = limit;
        self
    }

    /// Size of the worker pool; the global rayon pool is used when unset.
    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads.max(1));
        self
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    pub fn grid(&self) -> Grid {
        self.initial.v[0].grid()
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn dt_policy(&self) -> &DtPolicy {
        &self.dt
    }

    pub fn dt_for(&self, index: usize) -> f64 {
        match &self.dt {
            DtPolicy::Fixed(d) => *d,
            DtPolicy::PerEps(ds) => ds[index],
        }
    }

    fn steps(&self, dt: f64) -> usize {
        ((self.horizon / dt).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Ok,
    BlowUp,
    Cfl,
}

impl RowStatus {
    pub fn name(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::BlowUp => "blow-up",
            RowStatus::Cfl => "cfl",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "ok" => Ok(RowStatus::Ok),
            "blow-up" => Ok(RowStatus::BlowUp),
            "cfl" => Ok(RowStatus::Cfl),
            other => Err(Error::Format(format!("unknown row status '{other}'"))),
        }
    }

    fn of(e: &Error) -> Option<Self> {
        match e {
            Error::BlowUp(_) => Some(RowStatus::BlowUp),
            Error::Cfl { .. } => Some(RowStatus::Cfl),
            _ => None,
        }
    }
}

/// One ε of a sweep. Failed rows hold the norms accumulated up to `t_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    pub dt: f64,
    pub status: RowStatus,
    pub t_end: f64,
    pub sup_l2: f64,
    pub int_grad: f64,
    pub composite: f64,
    pub sup_v: f64,
    pub sup_eps_w: f64,
    pub sup_phi: f64,
    pub h1_sup: f64,
    pub h1_int: f64,
    pub h1_composite: f64,
}

impl SweepRow {
    pub fn from_series(eps: f64, dt: f64, status: RowStatus, series: &DifferenceSeries) -> Self {
        SweepRow {
            eps,
            dt,
            status,
            t_end: series.samples.last().map_or(0.0, |s| s.t),
            sup_l2: series.sup_l2_sq.sqrt(),
            int_grad: series.int_grad_sq.sqrt(),
            composite: series.composite(),
            sup_v: series.sup_v_sq.sqrt(),
            sup_eps_w: series.sup_eps_w_sq.sqrt(),
            sup_phi: series.sup_phi_sq.sqrt(),
            h1_sup: series.sup_grad_sq.sqrt(),
            h1_int: series.int_lap_sq.sqrt(),
            h1_composite: series.h1_composite(),
        }
    }

    fn values(&self) -> [f64; 10] {
        [
            self.t_end,
            self.sup_l2,
            self.int_grad,
            self.composite,
            self.sup_v,
            self.sup_eps_w,
            self.sup_phi,
            self.h1_sup,
            self.h1_int,
            self.h1_composite,
        ]
    }
}

/// Least-squares fit of `ln E = slope · ln ε + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in `ln E`.
    pub residual: f64,
    pub points: usize,
}

/// Fit the convergence order of `(ε, E)` pairs.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::Fit(format!(
            "a rate needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some((e, v)) = points
        .iter()
        .find(|(e, v)| !(*e > 0.0 && *v > 0.0 && e.is_finite() && v.is_finite()))
    {
        return Err(Error::Fit(format!("cannot take logs of ({e}, {v})")));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all eps values coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    Ok(RateFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
        points: points.len(),
    })
}

/// Pass thresholds applied to a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Criteria {
    pub min_slope: f64,
    pub max_residual: f64,
    /// Largest allowed slope change when the largest ε is dropped.
    pub max_slope_shift: f64,
}

impl Default for Criteria {
    fn default() -> Self {
        Criteria {
            min_slope: 0.9,
            max_residual: 0.1,
            max_slope_shift: 0.2,
        }
    }
}

/// Descriptive metadata copied into the summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub grid: [usize; 3],
    pub horizon: f64,
    pub scheme: String,
    pub dt: DtPolicy,
    pub initial: String,
    pub config_hash: String,
    pub version: String,
}

impl ReportMeta {
    pub fn for_plan(plan: &SweepPlan, initial: &str, config_hash: &str) -> Self {
        let (nx, ny, nz) = plan.grid().shape();
        ReportMeta {
            grid: [nx, ny, nz],
            horizon: plan.horizon,
            scheme: crate::scheme::Scheme::ImexCnHeun.name().into(),
            dt: plan.dt.clone(),
            initial: initial.into(),
            config_hash: config_hash.into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

/// Outcome of the report checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checks {
    pub all_rows_ok: bool,
    /// Composite strictly decreasing along the successful rows.
    pub monotone: bool,
    pub slope_ok: bool,
    pub residual_ok: bool,
    /// `None` when the reduced fit has fewer than 3 points.
    pub stable: Option<bool>,
    pub passed: bool,
    pub messages: Vec<String>,
}

/// Per-ε rows plus the fitted rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub schema_version: u32,
    pub meta: ReportMeta,
    pub criteria: Criteria,
    pub rows: Vec<SweepRow>,
    pub fit: Option<RateFit>,
    pub fit_without_largest: Option<RateFit>,
    pub fit_sup_l2: Option<RateFit>,
    pub fit_int_grad: Option<RateFit>,
    pub fit_h1: Option<RateFit>,
    pub checks: Checks,
}

impl ConvergenceReport {
    /// Fit and check `rows`. Only rows with status `ok` enter the fits.
    pub fn from_rows(meta: ReportMeta, rows: Vec<SweepRow>, criteria: Criteria) -> Self {
        let ok: Vec<&SweepRow> = rows.iter().filter(|r| r.status == RowStatus::Ok).collect();
        let fit_of = |f: fn(&SweepRow) -> f64, skip: usize| {
            let pts: Vec<(f64, f64)> = ok.iter().skip(skip).map(|r| (r.eps, f(r))).collect();
            fit_rate(&pts)
        };
        let mut messages = Vec::new();
        let fit = fit_of(|r| r.composite, 0)
            .map_err(|e| messages.push(e.to_string()))
            .ok();
        let fit_without_largest = fit_of(|r| r.composite, 1).ok();
        let all_rows_ok = ok.len() == rows.len();
        for r in rows.iter().filter(|r| r.status != RowStatus::Ok) {
            messages.push(format!(
                "eps {} stopped at t = {} ({})",
                r.eps,
                r.t_end,
                r.status.name()
            ));
        }
        let monotone = ok.windows(2).all(|w| w[1].composite < w[0].composite);
        if !monotone {
            messages.push("composite is not strictly decreasing in eps".into());
        }
        let slope_ok = fit.is_some_and(|f| f.slope >= criteria.min_slope);
        let residual_ok = fit.is_some_and(|f| f.residual < criteria.max_residual);
        if let Some(f) = fit {
            if !slope_ok {
                messages.push(format!("slope {:.4} below {}", f.slope, criteria.min_slope));
            }
            if !residual_ok {
                messages.push(format!(
                    "fit residual {:.4} not below {}",
                    f.residual, criteria.max_residual
                ));
            }
        }
        let stable = match (fit, fit_without_largest) {
            (Some(a), Some(b)) => Some((a.slope - b.slope).abs() < criteria.max_slope_shift),
            _ => None,
        };
        if stable == Some(false) {
            messages.push("slope moves too much when the largest eps is dropped".into());
        }
        let passed = all_rows_ok && monotone && slope_ok && residual_ok && stable != Some(false);
        ConvergenceReport {
            schema_version: SCHEMA_VERSION,
            meta,
            criteria,
            fit_sup_l2: fit_of(|r| r.sup_l2, 0).ok(),
            fit_int_grad: fit_of(|r| r.int_grad, 0).ok(),
            fit_h1: fit_of(|r| r.h1_composite, 0).ok(),
            rows,
            fit,
            fit_without_largest,
            checks: Checks {
                all_rows_ok,
                monotone,
                slope_ok,
                residual_ok,
                stable,
                passed,
                messages,
            },
        }
    }

    pub fn summary_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Both trajectories and their difference for one ε.
#[derive(Debug, Clone)]
pub struct PairRun {
    pub eps: f64,
    pub status: RowStatus,
    pub boussinesq: TrajectoryRecord,
    pub primitive: TrajectoryRecord,
    pub series: DifferenceSeries,
}

/// Run both solvers for one ε, recording full trajectories.
pub fn run_pair(eps: f64, dt: f64, plan: &SweepPlan) -> Result<PairRun> {
    let grid = plan.grid();
    let s0 = State::from_initial(&plan.initial)?;
    let mut bq =
        BoussinesqStepper::new(PhysicalParams::scaled(eps)?, grid, dt)?.with_max_cfl(plan.max_cfl);
    let mut pe = PrimitiveStepper::new(grid, dt)?.with_max_cfl(plan.max_cfl);
    let (mut rb, mut rp) = (Recorder::new(&s0), Recorder::new(&s0));
    let mut series = DifferenceSeries::new();
    series.push(difference_norms(&s0, &s0, eps)?);
    let (mut sb, mut sp) = (s0.clone(), s0);
    let mut status = RowStatus::Ok;
    for _ in 0..plan.steps(dt) {
        let next = bq.step(&sb).and_then(|b| Ok((b, pe.step(&sp)?)));
        match next {
            Ok((b, p)) => {
                sb = b;
                sp = p;
            }
            Err(e) => {
                status = RowStatus::of(&e).ok_or(e)?;
                break;
            }
        }
        rb.record(&sb)?;
        rp.record(&sp)?;
        series.push(difference_norms(&sb, &sp, eps)?);
    }
    Ok(PairRun {
        eps,
        status,
        boussinesq: rb.finish(),
        primitive: rp.finish(),
        series,
    })
}

/// Result of [`run_sweep`]: the rows in sweep order, the difference series
/// and the wall time per ε.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub series: Vec<DifferenceSeries>,
    pub seconds: Vec<f64>,
}

struct Worker {
    index: usize,
    eps: f64,
    stepper: BoussinesqStepper,
    state: State,
    series: DifferenceSeries,
    status: RowStatus,
    seconds: f64,
}

/// Run every ε of the plan against a shared primitive trajectory.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepOutcome> {
    let pool = match plan.threads {
        Some(n) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?,
        ),
        None => None,
    };
    let run = || run_groups(plan);
    match pool {
        Some(p) => p.install(run),
        None => run(),
    }
}

fn run_groups(plan: &SweepPlan) -> Result<SweepOutcome> {
    let grid = plan.grid();
    let s0 = State::from_initial(&plan.initial)?;
    let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for i in 0..plan.epsilons.len() {
        groups.entry(plan.dt_for(i).to_bits()).or_default().push(i);
    }
    let mut done: Vec<Option<Worker>> = (0..plan.epsilons.len()).map(|_| None).collect();
    for (bits, members) in groups {
        let dt = f64::from_bits(bits);
        let mut pe = PrimitiveStepper::new(grid, dt)?.with_max_cfl(plan.max_cfl);
        let mut sp = s0.clone();
        let mut workers = members
            .iter()
            .map(|&index| {
                let eps = plan.epsilons[index];
                let stepper = BoussinesqStepper::new(PhysicalParams::scaled(eps)?, grid, dt)?
                    .with_max_cfl(plan.max_cfl);
                let mut series = DifferenceSeries::new();
                series.push(difference_norms(&s0, &s0, eps)?);
                Ok(Worker {
                    index,
                    eps,
                    stepper,
                    state: s0.clone(),
                    series,
                    status: RowStatus::Ok,
                    seconds: 0.0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        for _ in 0..plan.steps(dt) {
            let clock = Instant::now();
            let next = match pe.step(&sp) {
                Ok(next) => next,
                Err(e) => {
                    let status = RowStatus::of(&e).ok_or(e)?;
                    for w in workers.iter_mut().filter(|w| w.status == RowStatus::Ok) {
                        w.status = status;
                    }
                    break;
                }
            };
            sp = next;
            let shared = clock.elapsed().as_secs_f64();
            workers
                .par_iter_mut()
                .filter(|w| w.status == RowStatus::Ok)
                .try_for_each(|w| -> Result<()> {
                    let clock = Instant::now();
                    match w.stepper.step(&w.state) {
                        Ok(next) => {
                            w.series.push(difference_norms(&next, &sp, w.eps)?);
                            w.state = next;
                        }
                        Err(e) => w.status = RowStatus::of(&e).ok_or(e)?,
                    }
                    w.seconds += shared + clock.elapsed().as_secs_f64();
                    Ok(())
                })?;
            if workers.iter().all(|w| w.status != RowStatus::Ok) {
                break;
            }
        }
        for w in workers {
            let i = w.index;
            done[i] = Some(w);
        }
    }
    let mut out = SweepOutcome {
        rows: Vec::new(),
        series: Vec::new(),
        seconds: Vec::new(),
    };
    for (i, w) in done.into_iter().enumerate() {
        let w = w.expect("every eps belongs to a group");
        out.rows.push(SweepRow::from_series(
            w.eps,
            plan.dt_for(i),
            w.status,
            &w.series,
        ));
        out.series.push(w.series);
        out.seconds.push(w.seconds);
    }
    Ok(out)
}

fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

/// Write `rows.csv`, `summary.json` and the `loglog_*.dat` files into `dir`.
pub fn emit_report(report: &ConvergenceReport, dir: &Path) -> Result<Vec<PathBuf>> {
    if report.rows.is_empty() {
        return Err(Error::InvalidParameter(
            "empty sweep: nothing to emit".into(),
        ));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let rows = dir.join("rows.csv");
    write_rows(&report.rows, &rows)?;
    let summary = dir.join("summary.json");
    std::fs::write(&summary, report.summary_json()).map_err(|e| Error::io(&summary, e))?;
    let mut written = vec![rows, summary];
    let columns: [(&str, fn(&SweepRow) -> f64); 4] = [
        ("composite", |r| r.composite),
        ("sup_l2", |r| r.sup_l2),
        ("int_grad", |r| r.int_grad),
        ("h1_composite", |r| r.h1_composite),
    ];
    for (name, f) in columns {
        let mut text = String::new();
        for r in report
            .rows
            .iter()
            .filter(|r| r.status == RowStatus::Ok && f(r) > 0.0)
        {
            writeln!(text, "{:.12e} {:.12e}", r.eps.ln(), f(r).ln()).expect("write to string");
        }
        let path = dir.join(format!("loglog_{name}.dat"));
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

pub fn write_rows(rows: &[SweepRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(ROW_HEADER).map_err(|e| csv_error(path, e))?;
    for r in rows {
        let mut rec = vec![fmt_f64(r.eps), fmt_f64(r.dt), r.status.name().to_string()];
        rec.extend(r.values().iter().map(|x| fmt_f64(*x)));
        w.write_record(&rec).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Parse a `rows.csv` written by [`emit_report`].
pub fn read_rows(path: &Path) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = r.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.iter().ne(ROW_HEADER) {
        return Err(Error::Format(format!(
            "{}: unexpected header",
            path.display()
        )));
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let num = |k: usize| -> Result<f64> {
            rec[k].parse().map_err(|_| {
                Error::Format(format!(
                    "{}: row {}: bad number '{}'",
                    path.display(),
                    line + 2,
                    &rec[k]
                ))
            })
        };
        rows.push(SweepRow {
            eps: num(0)?,
            dt: num(1)?,
            status: RowStatus::parse(&rec[2])?,
            t_end: num(3)?,
            sup_l2: num(4)?,
            int_grad: num(5)?,
            composite: num(6)?,
            sup_v: num(7)?,
            sup_eps_w: num(8)?,
            sup_phi: num(9)?,
            h1_sup: num(10)?,
            h1_int: num(11)?,
            h1_composite: num(12)?,
        });
    }
    Ok(rows)
}

/// Read the metadata and criteria back from a `summary.json`.
pub fn read_summary(path: &Path) -> Result<ConvergenceReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

/// Write `timing.csv` with the wall time of each ε.
pub fn write_timing(rows: &[SweepRow], seconds: &[f64], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(["eps", "wall_seconds"])
        .map_err(|e| csv_error(path, e))?;
    for (r, s) in rows.iter().zip(seconds) {
        w.write_record([fmt_f64(r.eps), format!("{s:.3}")])
            .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Write one difference time series as CSV with columns
/// `t, l2_sq, v_sq, eps_w_sq, phi_sq, grad_sq, lap_sq`.
pub fn write_series(series: &DifferenceSeries, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record([
        "t", "l2_sq", "v_sq", "eps_w_sq", "phi_sq", "grad_sq", "lap_sq",
    ])
    .map_err(|e| csv_error(path, e))?;
    for s in &series.samples {
        let row = [
            s.t,
            s.l2_sq(),
            s.v_sq,
            s.eps_w_sq,
            s.phi_sq,
            s.grad_sq,
            s.lap_sq,
        ];
        w.write_record(row.iter().map(|x| fmt_f64(*x)))
            .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
