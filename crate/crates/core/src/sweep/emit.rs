use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use super::{Format, RowStatus, SweepConfig, SweepError, SweepRow};
use crate::invariants::Theta0;

pub const CSV_HEADER: &str = "h,alpha,chern,chi_naive,chi_corrected,multiplicity,theta0,status";
const SIG_DIGITS: usize = 12;

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed,
/// exponent form outside `[1e-4, 1e12)`.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIG_DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (SIG_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn round_sig(x: f64) -> f64 {
    format_sig(x).parse().unwrap_or(x)
}

/// `theta0` as emitted: a number, or the literal `full`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Theta0Field {
    Full,
    Angle(f64),
}

impl Serialize for Theta0Field {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Theta0Field::Full => s.serialize_str("full"),
            Theta0Field::Angle(t) => s.serialize_f64(*t),
        }
    }
}

impl<'de> Deserialize<'de> for Theta0Field {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) if s == "full" => Ok(Theta0Field::Full),
            serde_json::Value::Number(n) => n
                .as_f64()
                .map(Theta0Field::Angle)
                .ok_or_else(|| de::Error::custom("theta0 out of range")),
            other => Err(de::Error::custom(format!("unexpected theta0 {other}"))),
        }
    }
}

/// A row exactly as written to disk; floats are rounded to 12 significant digits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowRecord {
    pub h: f64,
    pub alpha: f64,
    pub chern: Option<f64>,
    pub chi_naive: Option<f64>,
    pub chi_corrected: Option<f64>,
    pub multiplicity: Option<u32>,
    pub theta0: Option<Theta0Field>,
    pub status: String,
}

impl From<&SweepRow> for RowRecord {
    fn from(row: &SweepRow) -> Self {
        let r = row.report.as_ref();
        RowRecord {
            h: round_sig(row.h),
            alpha: round_sig(row.alpha),
            chern: r.map(|r| round_sig(r.chern)),
            chi_naive: r.map(|r| round_sig(r.chi_naive)),
            chi_corrected: r.map(|r| round_sig(r.chi_corrected)),
            multiplicity: r.map(|r| r.multiplicity),
            theta0: r.map(|r| match r.theta0 {
                Theta0::Full => Theta0Field::Full,
                Theta0::Angle(t) => Theta0Field::Angle(round_sig(t)),
            }),
            status: row.status.as_str().to_string(),
        }
    }
}

fn csv_line(row: &SweepRow) -> String {
    let mut line = format!("{},{}", format_sig(row.h), format_sig(row.alpha));
    match &row.report {
        Some(r) => {
            let theta0 = match r.theta0 {
                Theta0::Full => "full".to_string(),
                Theta0::Angle(t) => format_sig(t),
            };
            let _ = write!(
                line,
                ",{},{},{},{},{}",
                format_sig(r.chern),
                format_sig(r.chi_naive),
                format_sig(r.chi_corrected),
                r.multiplicity,
                theta0
            );
        }
        None => line.push_str(",,,,,"),
    }
    line.push(',');
    line.push_str(row.status.as_str());
    line
}

pub fn render(rows: &[SweepRow], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for row in rows {
                out.push_str(&csv_line(row));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let records: Vec<RowRecord> = rows.iter().map(RowRecord::from).collect();
            let mut out = serde_json::to_string_pretty(&records).expect("rows serialize");
            out.push('\n');
            out
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), SweepError> {
    fs::write(path, contents).map_err(|source| SweepError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes the data file. Contents depend only on the rows, never on timing.
pub fn emit(rows: &[SweepRow], format: Format, out: &Path) -> Result<(), SweepError> {
    if rows.is_empty() {
        return Err(SweepError::NoRows(0));
    }
    write_file(out, &render(rows, format))
}

#[derive(Serialize)]
struct MetaRow<'a> {
    h: f64,
    alpha: f64,
    status: RowStatus,
    detail: Option<&'a str>,
    multiplicity_raw: Option<f64>,
    est_error_chern: Option<f64>,
    est_error_chi_naive: Option<f64>,
    est_error_chi_corrected: Option<f64>,
    wall_time_ms: f64,
}

impl Serialize for RowStatus {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Serialize)]
struct Meta<'a> {
    config: &'a SweepConfig,
    total_wall_time_ms: f64,
    rows: Vec<MetaRow<'a>>,
}

/// Error estimates and timings, next to the data file as `<out>.meta.json`.
pub fn write_meta(cfg: &SweepConfig, rows: &[SweepRow], total_ms: f64) -> Result<(), SweepError> {
    let meta = Meta {
        config: cfg,
        total_wall_time_ms: total_ms,
        rows: rows
            .iter()
            .map(|r| MetaRow {
                h: r.h,
                alpha: r.alpha,
                status: r.status,
                detail: r.detail.as_deref(),
                multiplicity_raw: r.report.map(|x| x.multiplicity_raw),
                est_error_chern: r.report.map(|x| x.est_error.chern),
                est_error_chi_naive: r.report.map(|x| x.est_error.chi_naive),
                est_error_chi_corrected: r.report.map(|x| x.est_error.chi_corrected),
                wall_time_ms: r.wall_time_ms,
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&meta).expect("meta serializes");
    text.push('\n');
    write_file(&cfg.meta_path(), &text)
}
