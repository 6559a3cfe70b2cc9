//! Parameter sweeps over `h` (and `α`) with CSV/JSON output.
//!
//! Exit codes of [`run_cli`]: 0 success, 1 no computed rows, 2 usage error,
//! 3 I/O error.

mod config;
mod emit;

use std::ffi::OsString;
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

pub use config::{parse_config, Cli, Format, SweepConfig};
pub use emit::{emit, format_sig, write_meta, RowRecord, Theta0Field, CSV_HEADER};

use crate::bloch_model::ModelParams;
use crate::error::Error;
use crate::invariants::{InvariantReport, KDomain, QuadratureSpec};

/// Integrality tolerance applied by `--round`.
pub const ROUND_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("no rows computed: all {0} parameter points were excluded or failed")]
    NoRows(usize),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl SweepError {
    pub fn exit_code(&self) -> i32 {
        match self {
            SweepError::Clap(e) if !e.use_stderr() => 0,
            SweepError::Clap(_) | SweepError::Usage(_) => 2,
            SweepError::NoRows(_) => 1,
            SweepError::Io { .. } => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    /// Inside the exclusion zone around `|h| = 1`; not computed.
    Critical,
    DegenerateAlpha,
    NonIntegralMultiplicity,
    NonConvergent,
    NotIntegral,
    GapClosure,
    Failed,
}

impl RowStatus {
    fn from_error(e: &Error) -> Self {
        match e {
            Error::CriticalPoint { .. } => RowStatus::Critical,
            Error::DegenerateAlpha { .. } => RowStatus::DegenerateAlpha,
            Error::NonIntegralMultiplicity { .. } => RowStatus::NonIntegralMultiplicity,
            Error::NonConvergent { .. } => RowStatus::NonConvergent,
            Error::NotIntegral { .. } => RowStatus::NotIntegral,
            Error::GapClosure { .. } => RowStatus::GapClosure,
            Error::SingularMetric { .. } | Error::InvalidParameter(_) => RowStatus::Failed,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Critical => "critical",
            RowStatus::DegenerateAlpha => "degenerate_alpha",
            RowStatus::NonIntegralMultiplicity => "non_integral_multiplicity",
            RowStatus::NonConvergent => "non_convergent",
            RowStatus::NotIntegral => "not_integral",
            RowStatus::GapClosure => "gap_closure",
            RowStatus::Failed => "failed",
        }
    }
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One `(h, α)` point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub h: f64,
    pub alpha: f64,
    pub status: RowStatus,
    /// Present iff `status` is `Ok`.
    pub report: Option<InvariantReport>,
    /// Why the row was not computed, if it was not.
    pub detail: Option<String>,
    pub wall_time_ms: f64,
}

fn compute_row(cfg: &SweepConfig, h: f64, alpha: f64) -> SweepRow {
    let start = Instant::now();
    let mut row = SweepRow {
        h,
        alpha,
        status: RowStatus::Ok,
        report: None,
        detail: None,
        wall_time_ms: 0.0,
    };
    if (h.abs() - 1.0).abs() < cfg.exclusion {
        row.status = RowStatus::Critical;
        row.detail = Some(format!("|h| within {} of the gap closure at 1", cfg.exclusion));
        return row;
    }
    let domain = if cfg.ky_half {
        KDomain::half_ky()
    } else {
        KDomain::full()
    };
    let spec = QuadratureSpec::with_points(cfg.grid);
    let result = ModelParams::new(h, alpha, cfg.omega)
        .and_then(|p| InvariantReport::compute(&p, &domain, &spec))
        .and_then(|r| if cfg.round { r.rounded(ROUND_TOL) } else { Ok(r) });
    match result {
        Ok(report) => row.report = Some(report),
        Err(e) => {
            row.status = RowStatus::from_error(&e);
            row.detail = Some(e.to_string());
        }
    }
    row.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    row
}

/// Evaluates every `(α, h)` pair of the configuration. Rows come back sorted
/// by `α`, then `h`, whatever order the workers finish in.
pub fn run_sweep(cfg: &SweepConfig) -> Vec<SweepRow> {
    let mut alphas = cfg.alphas.clone();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    let hs = cfg.h_values();
    let points: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| hs.iter().map(move |&h| (a, h)))
        .collect();
    let work = || -> Vec<SweepRow> {
        points
            .par_iter()
            .map(|&(a, h)| compute_row(cfg, h, a))
            .collect()
    };
    match cfg.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(_) => work(),
        },
        None => work(),
    }
}

/// Full command-line flow: parse, sweep, write data and metadata files.
pub fn execute(cfg: &SweepConfig) -> Result<Vec<SweepRow>, SweepError> {
    let start = Instant::now();
    let rows = run_sweep(cfg);
    if !rows.iter().any(|r| r.status == RowStatus::Ok) {
        return Err(SweepError::NoRows(rows.len()));
    }
    emit(&rows, cfg.format, &cfg.out)?;
    write_meta(cfg, &rows, start.elapsed().as_secs_f64() * 1e3)?;
    Ok(rows)
}

/// Entry point for the binary; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = parse_config(args).and_then(|cfg| execute(&cfg).map(|rows| (cfg, rows)));
    match result {
        Ok((cfg, rows)) => {
            let ok = rows.iter().filter(|r| r.status == RowStatus::Ok).count();
            eprintln!(
                "wrote {} rows ({} computed, {} skipped) to {}",
                rows.len(),
                ok,
                rows.len() - ok,
                cfg.out.display()
            );
            0
        }
        Err(SweepError::Clap(e)) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
