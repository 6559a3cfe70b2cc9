//! Fixed-grid quadrature on the Brillouin zone with kink splitting and a
//! halving-based error estimate.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::bloch_model::KPoint;
use crate::error::{Error, Result};

pub const MIN_POINTS: usize = 32;
/// Times a 1-D grid is doubled before giving up on convergence.
pub const MAX_DOUBLINGS: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rule {
    /// Equal weights at cell midpoints; spectrally accurate for smooth
    /// periodic integrands.
    #[default]
    MidpointPeriodic,
    /// Composite Simpson on each panel between split points.
    Simpson,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    /// Grid size per axis (1-D size when `reduce_ky` is set).
    pub n_points: usize,
    pub rule: Rule,
    /// Interior abscissae along `kx` where the integrand has kinks. Any
    /// split forces Simpson panels along `kx`.
    pub split_points: Vec<f64>,
    /// Integrate along `kx` only and multiply by the `ky` extent.
    pub reduce_ky: bool,
    /// Target tolerance, relative to the value floored at 1. Refinements
    /// disagreeing by more than ten times this are reported as
    /// non-convergent.
    pub tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            n_points: 2048,
            rule: Rule::MidpointPeriodic,
            split_points: Vec::new(),
            reduce_ky: true,
            tol: 1e-6,
        }
    }
}

impl QuadratureSpec {
    pub fn with_points(n_points: usize) -> Self {
        Self {
            n_points,
            ..Self::default()
        }
    }

    /// Full tensor-product grid, `n_points` per axis.
    pub fn full_2d(n_points: usize) -> Self {
        Self {
            n_points,
            reduce_ky: false,
            ..Self::default()
        }
    }

    pub fn simpson(mut self) -> Self {
        self.rule = Rule::Simpson;
        self
    }

    /// Copy of `self` with `extra` merged into the split points; points not
    /// strictly inside `(a, b)` are dropped.
    pub fn with_splits(&self, extra: &[f64], a: f64, b: f64) -> Self {
        let margin = 1e-12 * (b - a);
        let mut splits: Vec<f64> = self
            .split_points
            .iter()
            .chain(extra)
            .copied()
            .filter(|&x| x > a + margin && x < b - margin)
            .collect();
        splits.sort_by(f64::total_cmp);
        splits.dedup_by(|x, y| (*x - *y).abs() <= margin);
        Self {
            split_points: splits,
            ..self.clone()
        }
    }

    pub fn validate(&self, a: f64, b: f64) -> Result<()> {
        if self.n_points < MIN_POINTS {
            return Err(Error::InvalidParameter(format!(
                "n_points = {} is below the minimum of {MIN_POINTS}",
                self.n_points
            )));
        }
        if a.is_nan() || b.is_nan() || b <= a {
            return Err(Error::InvalidParameter(format!("empty interval [{a}, {b}]")));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        let mut prev = a;
        for &s in &self.split_points {
            if !(s > prev && s < b) {
                return Err(Error::InvalidParameter(format!(
                    "split points must be sorted and strictly inside ({a}, {b}); got {:?}",
                    self.split_points
                )));
            }
            prev = s;
        }
        Ok(())
    }
}

/// Integral value together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub est_error: f64,
}

impl Estimate {
    pub fn scale(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            est_error: self.est_error * factor.abs(),
        }
    }
}

/// Rectangular parameter domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KDomain {
    pub kx: (f64, f64),
    pub ky: (f64, f64),
}

impl Default for KDomain {
    fn default() -> Self {
        Self::full()
    }
}

impl KDomain {
    /// `[0, 2π] × [0, 2π]`.
    pub fn full() -> Self {
        Self {
            kx: (0.0, TAU),
            ky: (0.0, TAU),
        }
    }

    /// `[0, 2π] × [0, π]`.
    pub fn half_ky() -> Self {
        Self {
            kx: (0.0, TAU),
            ky: (0.0, std::f64::consts::PI),
        }
    }

    pub fn ky_extent(&self) -> f64 {
        self.ky.1 - self.ky.0
    }

    fn ky_periodic(&self) -> bool {
        (self.ky_extent() - TAU).abs() < 1e-12
    }
}

// Panel layout along one axis; the coarse grid halves every panel.
struct Axis {
    panels: Vec<(f64, f64, usize)>,
    midpoint: bool,
}

impl Axis {
    fn new(a: f64, b: f64, n: usize, rule: Rule, splits: &[f64]) -> Self {
        if splits.is_empty() && rule == Rule::MidpointPeriodic {
            return Self {
                panels: vec![(a, b, n)],
                midpoint: true,
            };
        }
        let mut edges = Vec::with_capacity(splits.len() + 2);
        edges.push(a);
        edges.extend_from_slice(splits);
        edges.push(b);
        let total = b - a;
        let panels = edges
            .windows(2)
            .map(|w| {
                let share = n as f64 * (w[1] - w[0]) / total;
                // multiple of 4 so the halved grid is still a Simpson grid
                let m = ((share / 4.0).round() as usize).max(1) * 4;
                (w[0], w[1], m)
            })
            .collect();
        Self {
            panels,
            midpoint: false,
        }
    }

    fn nodes(&self, coarse: bool) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for &(a, b, n) in &self.panels {
            let n = if coarse { n / 2 } else { n };
            let h = (b - a) / n as f64;
            if self.midpoint {
                out.extend((0..n).map(|i| (a + (i as f64 + 0.5) * h, h)));
            } else {
                out.extend((0..=n).map(|i| {
                    let w = if i == 0 || i == n {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    (a + i as f64 * h, w * h / 3.0)
                }));
            }
        }
        out
    }
}

fn weighted_sum(terms: Vec<f64>) -> (f64, f64) {
    // sequential sum keeps the result independent of the thread count
    terms
        .into_iter()
        .fold((0.0, 0.0), |(s, a), t| (s + t, a + t.abs()))
}

fn two_grid(fine: (f64, f64), coarse: f64, n_terms: usize) -> Estimate {
    let (value, magnitude) = fine;
    let roundoff = 4.0 * f64::EPSILON * magnitude * (n_terms as f64).sqrt();
    Estimate {
        value,
        est_error: (value - coarse).abs().max(roundoff),
    }
}

fn within(est: Estimate, tol: f64) -> Result<Estimate> {
    let limit = tol * est.value.abs().max(1.0);
    if est.est_error <= limit && est.value.is_finite() {
        Ok(est)
    } else {
        Err(Error::NonConvergent {
            diff: est.est_error,
            limit,
        })
    }
}

/// Integrates `f` over `[a, b]`. The error estimate is the difference to the
/// same rule on a grid with half the intervals. The grid is doubled up to
/// [`MAX_DOUBLINGS`] times while the estimate exceeds `spec.tol`; a final
/// estimate above `10·spec.tol` is reported as non-convergent.
pub fn integrate_1d<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(f64) -> f64 + Sync,
{
    spec.validate(a, b)?;
    let mut n = spec.n_points;
    let mut est = integrate_1d_fixed(&f, a, b, n, spec);
    for _ in 0..MAX_DOUBLINGS {
        if within(est, spec.tol).is_ok() {
            break;
        }
        n *= 2;
        est = integrate_1d_fixed(&f, a, b, n, spec);
    }
    within(est, 10.0 * spec.tol)
}

fn integrate_1d_fixed<F>(f: &F, a: f64, b: f64, n: usize, spec: &QuadratureSpec) -> Estimate
where
    F: Fn(f64) -> f64 + Sync,
{
    let axis = Axis::new(a, b, n, spec.rule, &spec.split_points);
    let eval = |nodes: Vec<(f64, f64)>| -> Vec<f64> {
        nodes.into_par_iter().map(|(x, w)| w * f(x)).collect()
    };
    let fine_terms = eval(axis.nodes(false));
    let n_terms = fine_terms.len();
    let fine = weighted_sum(fine_terms);
    let coarse = weighted_sum(eval(axis.nodes(true))).0;
    two_grid(fine, coarse, n_terms)
}

/// Integrates `f` over `domain`. With `reduce_ky` the integrand is sampled
/// at `ky = domain.ky.0` only and the result is multiplied by the `ky` extent,
/// which is exact for `ky`-independent integrands. Otherwise `ky` uses the
/// periodic midpoint rule on a full period and Simpson on a partial one.
pub fn integrate_2d<F>(f: F, domain: &KDomain, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(KPoint) -> f64 + Sync,
{
    let (x0, x1) = domain.kx;
    let (y0, y1) = domain.ky;
    if spec.reduce_ky {
        let est = integrate_1d(|x| f(KPoint::new(x, y0)), x0, x1, spec)?;
        return Ok(est.scale(y1 - y0));
    }
    spec.validate(x0, x1)?;
    let x_axis = Axis::new(x0, x1, spec.n_points, spec.rule, &spec.split_points);
    let y_rule = if domain.ky_periodic() {
        Rule::MidpointPeriodic
    } else {
        Rule::Simpson
    };
    let y_axis = Axis::new(y0, y1, spec.n_points, y_rule, &[]);

    let eval = |coarse: bool| -> Vec<f64> {
        let ys = y_axis.nodes(coarse);
        x_axis
            .nodes(coarse)
            .into_par_iter()
            .map(|(x, wx)| {
                let row: f64 = ys.iter().map(|&(y, wy)| wy * f(KPoint::new(x, y))).sum();
                wx * row
            })
            .collect()
    };
    let fine_terms = eval(false);
    let n_terms = fine_terms.len() * y_axis.nodes(false).len();
    let fine = weighted_sum(fine_terms);
    let coarse = weighted_sum(eval(true)).0;
    within(two_grid(fine, coarse, n_terms), 10.0 * spec.tol)
}
