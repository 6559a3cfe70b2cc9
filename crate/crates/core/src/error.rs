use thiserror::Error;

/// Failures of the geometric and numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gap closure: |d| = {norm:e} is at or below the gap floor")]
    GapClosure { norm: f64 },

    #[error("critical point: |h| = {h} is within {tol:e} of 1 where the gap closes")]
    CriticalPoint { h: f64, tol: f64 },

    #[error("degenerate alpha = {alpha:e}: the image of d̂ collapses to the poles")]
    DegenerateAlpha { alpha: f64 },

    #[error("covering multiplicity {raw} is not within {tol:e} of an integer")]
    NonIntegralMultiplicity { raw: f64, tol: f64 },

    #[error("singular metric at {at:?} (det g = {det:e})")]
    SingularMetric { at: [f64; 2], det: f64 },

    #[error("quadrature did not converge: refinement difference {diff:e} exceeds {limit:e}")]
    NonConvergent { diff: f64, limit: f64 },

    #[error("{quantity} = {value} is not within {tol:e} of an integer")]
    NotIntegral {
        quantity: &'static str,
        value: f64,
        tol: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
