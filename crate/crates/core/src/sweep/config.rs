use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use super::SweepError;
use crate::bloch_model::GAP_TOL;
use crate::invariants::quadrature::MIN_POINTS;

pub const DEFAULT_H_MIN: f64 = -3.0;
pub const DEFAULT_H_MAX: f64 = 3.0;
pub const DEFAULT_H_COUNT: usize = 61;
pub const DEFAULT_OMEGA: f64 = 2.0;
pub const DEFAULT_GRID: usize = 2048;
pub const DEFAULT_EXCLUSION: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Sweep Chern number and Euler characteristics of the two-band model over h.
///
/// Every flag can also be given in a flat JSON config file (keys are the flag
/// names with underscores, e.g. "h_min"); flags on the command line win.
#[derive(Debug, Parser)]
#[command(name = "bloch-geometry", version, allow_negative_numbers = true)]
pub struct Cli {
    /// Flat key/value JSON file with defaults for any of the flags below.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Lower end of the h range [default: -3]
    #[arg(long)]
    pub h_min: Option<f64>,

    /// Upper end of the h range [default: 3]
    #[arg(long)]
    pub h_max: Option<f64>,

    /// Number of evenly spaced h values [default: 61]
    #[arg(long)]
    pub h_count: Option<usize>,

    /// One or more comma-separated α values [default: 1]
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,

    /// Energy scale Ω; geometric outputs do not depend on it [default: 2]
    #[arg(long)]
    pub omega: Option<f64>,

    /// Quadrature points along kx [default: 2048]
    #[arg(long)]
    pub grid: Option<usize>,

    /// Output format [default: csv]
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Output file; run metadata goes to <PATH>.meta.json [default: sweep.<format>]
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Worker threads [default: all cores]
    #[arg(long)]
    pub jobs: Option<usize>,

    /// Half-width of the band around |h| = 1 reported as critical instead of computed [default: 0.02]
    #[arg(long)]
    pub exclusion: Option<f64>,

    /// Round chern and chi_corrected to integers after checking integrality
    #[arg(long)]
    pub round: bool,

    /// Restrict ky to [0, π] instead of [0, 2π]; covering multiplicities halve
    #[arg(long)]
    pub ky_half: bool,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum AlphaValue {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    #[serde(alias = "h-min")]
    h_min: Option<f64>,
    #[serde(alias = "h-max")]
    h_max: Option<f64>,
    #[serde(alias = "h-count")]
    h_count: Option<usize>,
    alpha: Option<AlphaValue>,
    omega: Option<f64>,
    grid: Option<usize>,
    format: Option<Format>,
    out: Option<PathBuf>,
    jobs: Option<usize>,
    exclusion: Option<f64>,
    round: Option<bool>,
    #[serde(alias = "ky-half")]
    ky_half: Option<bool>,
}

impl FileConfig {
    fn load(path: &Path) -> Result<Self, SweepError> {
        let text = fs::read_to_string(path).map_err(|e| {
            SweepError::Usage(format!("cannot read config file {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text).map_err(|e| {
            SweepError::Usage(format!("invalid config file {}: {e}", path.display()))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub h_min: f64,
    pub h_max: f64,
    pub h_count: usize,
    pub alphas: Vec<f64>,
    pub omega: f64,
    pub grid: usize,
    pub format: Format,
    pub out: PathBuf,
    pub jobs: Option<usize>,
    pub exclusion: f64,
    pub round: bool,
    pub ky_half: bool,
}

impl SweepConfig {
    pub fn h_values(&self) -> Vec<f64> {
        if self.h_count == 1 {
            return vec![self.h_min];
        }
        let span = self.h_max - self.h_min;
        let last = (self.h_count - 1) as f64;
        (0..self.h_count)
            .map(|i| {
                if i + 1 == self.h_count {
                    self.h_max
                } else {
                    self.h_min + span * i as f64 / last
                }
            })
            .collect()
    }

    pub fn meta_path(&self) -> PathBuf {
        let mut name = self.out.clone().into_os_string();
        name.push(".meta.json");
        PathBuf::from(name)
    }

    fn validate(&self) -> Result<(), SweepError> {
        let usage = |msg: String| Err(SweepError::Usage(msg));
        if !self.h_min.is_finite() || !self.h_max.is_finite() {
            return usage("--h-min and --h-max must be finite".into());
        }
        if self.h_count == 0 {
            return usage("--h-count must be at least 1".into());
        }
        if self.h_max < self.h_min || (self.h_count > 1 && self.h_max == self.h_min) {
            return usage(format!(
                "--h-max ({}) must be greater than --h-min ({}) for more than one point",
                self.h_max, self.h_min
            ));
        }
        if self.alphas.is_empty() || self.alphas.iter().any(|a| !a.is_finite()) {
            return usage("--alpha needs at least one finite value".into());
        }
        if !self.omega.is_finite() || self.omega <= 0.0 {
            return usage(format!("--omega must be positive, got {}", self.omega));
        }
        if self.grid < MIN_POINTS {
            return usage(format!("--grid must be at least {MIN_POINTS}, got {}", self.grid));
        }
        if self.exclusion.is_nan() || self.exclusion < GAP_TOL {
            return usage(format!(
                "--exclusion must be at least {GAP_TOL:e}, got {}",
                self.exclusion
            ));
        }
        if self.jobs == Some(0) {
            return usage("--jobs must be at least 1".into());
        }
        Ok(())
    }
}

/// Parses command-line arguments (program name first), merging in the config
/// file when one is given. Flags override file values.
pub fn parse_config<I, T>(args: I) -> Result<SweepConfig, SweepError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let alphas = match (cli.alpha, file.alpha) {
        (Some(a), _) => a,
        (None, Some(AlphaValue::One(a))) => vec![a],
        (None, Some(AlphaValue::Many(a))) => a,
        (None, None) => vec![1.0],
    };
    let format = cli.format.or(file.format).unwrap_or(Format::Csv);
    let out = cli
        .out
        .or(file.out)
        .unwrap_or_else(|| PathBuf::from(format!("sweep.{}", format.extension())));
    let cfg = SweepConfig {
        h_min: cli.h_min.or(file.h_min).unwrap_or(DEFAULT_H_MIN),
        h_max: cli.h_max.or(file.h_max).unwrap_or(DEFAULT_H_MAX),
        h_count: cli.h_count.or(file.h_count).unwrap_or(DEFAULT_H_COUNT),
        alphas,
        omega: cli.omega.or(file.omega).unwrap_or(DEFAULT_OMEGA),
        grid: cli.grid.or(file.grid).unwrap_or(DEFAULT_GRID),
        format,
        out,
        jobs: cli.jobs.or(file.jobs),
        exclusion: cli.exclusion.or(file.exclusion).unwrap_or(DEFAULT_EXCLUSION),
        round: cli.round || file.round.unwrap_or(false),
        ky_half: cli.ky_half || file.ky_half.unwrap_or(false),
    };
    cfg.validate()?;
    Ok(cfg)
}
