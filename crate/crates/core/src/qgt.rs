//! Quantum metric and Berry curvature.
//!
//! For a two-level state with Bloch vector `d̂(k)` the quantum metric is the
//! pullback of the round metric of radius 1/2, `g_μν = ¼ ∂_μd̂·∂_νd̂`, and the
//! Berry curvature is half the signed solid-angle Jacobian of `d̂`. Both obey
//! `√det g = |F|/2` pointwise.
//!
//! Sign convention: the ground band of the model carries
//! `F = α²(1 + h cos kx) sin kx / (2 f^{3/2})`, which is
//! `-½ d̂·(∂_kx d̂ × ∂_ky d̂)`. The excited band carries the opposite sign.

use crate::bloch_model::{cross3, dot3, norm3, DField, KPoint, ModelParams, UnitD, GAP_FLOOR};
use crate::error::{Error, Result};

pub const ANALYTIC_CONSISTENCY_TOL: f64 = 1e-12;
pub const MIN_STEP: f64 = 1e-6;
pub const MAX_STEP: f64 = 1e-2;

/// Tolerance on `√det g = |F|/2` for finite-difference quantities.
pub fn numeric_consistency_tol(step: f64) -> f64 {
    100.0 * step * step
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Band {
    #[default]
    Ground,
    Excited,
}

impl Band {
    /// Factor applied to `½ d̂·(∂_x d̂ × ∂_y d̂)` to get this band's curvature.
    fn orientation(self) -> f64 {
        match self {
            Band::Ground => -1.0,
            Band::Excited => 1.0,
        }
    }
}

/// Symmetric 2×2 metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
}

impl MetricTensor {
    pub fn diag(g11: f64, g22: f64) -> Self {
        Self { g11, g12: 0.0, g22 }
    }

    pub fn zero() -> Self {
        Self::diag(0.0, 0.0)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (0, 0) => self.g11,
            (1, 1) => self.g22,
            _ => self.g12,
        }
    }

    pub fn det(&self) -> f64 {
        self.g11 * self.g22 - self.g12 * self.g12
    }

    pub fn sqrt_det(&self) -> f64 {
        self.det().max(0.0).sqrt()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let mean = 0.5 * (self.g11 + self.g22);
        let half_diff = 0.5 * (self.g11 - self.g22);
        let r = half_diff.hypot(self.g12);
        [mean - r, mean + r]
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.eigenvalues()[0] >= -tol
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        Some(Self {
            g11: self.g22 / det,
            g12: -self.g12 / det,
            g22: self.g11 / det,
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.g11 - other.g11)
            .abs()
            .max((self.g12 - other.g12).abs())
            .max((self.g22 - other.g22).abs())
    }
}

/// Everything the closed forms give at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QgtSample {
    pub k: KPoint,
    pub g: MetricTensor,
    pub berry: f64,
    pub sqrt_det_g: f64,
    pub dhat: UnitD,
}

impl QgtSample {
    pub fn consistency_error(&self) -> f64 {
        (self.sqrt_det_g - 0.5 * self.berry.abs()).abs()
    }
}

pub fn sample(p: &ModelParams, k: KPoint) -> Result<QgtSample> {
    Ok(QgtSample {
        k,
        g: metric_analytic(p, k)?,
        berry: berry_curvature_analytic(p, k)?,
        sqrt_det_g: sqrt_det_g(p, k)?,
        dhat: crate::bloch_model::unit_d(p, k, crate::bloch_model::cap_pole(p))?,
    })
}

fn gapped_f(p: &ModelParams, kx: f64) -> Result<f64> {
    let f = p.f_scale(kx);
    if f <= GAP_FLOOR * GAP_FLOOR {
        return Err(Error::GapClosure { norm: f.sqrt() });
    }
    Ok(f)
}

/// Closed-form metric of the model in `(kx, ky)`; identical for both bands.
pub fn metric_analytic(p: &ModelParams, k: KPoint) -> Result<MetricTensor> {
    let f = gapped_f(p, k.kx)?;
    let (s, c) = k.kx.sin_cos();
    let a2 = p.alpha * p.alpha;
    let radial = 1.0 + p.h * c;
    Ok(MetricTensor::diag(
        0.25 * a2 * radial * radial / (f * f),
        0.25 * a2 * s * s / f,
    ))
}

pub fn sqrt_det_g(p: &ModelParams, k: KPoint) -> Result<f64> {
    let f = gapped_f(p, k.kx)?;
    let (s, c) = k.kx.sin_cos();
    Ok(p.alpha * p.alpha * ((1.0 + p.h * c) * s).abs() / (4.0 * f * f.sqrt()))
}

/// Ground-band Berry curvature of the model (signed).
pub fn berry_curvature_analytic(p: &ModelParams, k: KPoint) -> Result<f64> {
    let f = gapped_f(p, k.kx)?;
    let (s, c) = k.kx.sin_cos();
    Ok(p.alpha * p.alpha * (1.0 + p.h * c) * s / (2.0 * f * f.sqrt()))
}

pub fn berry_curvature_band(p: &ModelParams, k: KPoint, band: Band) -> Result<f64> {
    let ground = berry_curvature_analytic(p, k)?;
    Ok(match band {
        Band::Ground => ground,
        Band::Excited => -ground,
    })
}

/// `d̂` and its central-difference derivatives along `kx` and `ky`.
#[derive(Debug, Clone, Copy)]
pub struct UnitDerivatives {
    pub dhat: [f64; 3],
    pub d_kx: [f64; 3],
    pub d_ky: [f64; 3],
}

pub fn unit_derivatives(field: &impl DField, k: KPoint, step: f64) -> Result<UnitDerivatives> {
    if !(MIN_STEP..=MAX_STEP).contains(&step) {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step {step:e} outside [{MIN_STEP:e}, {MAX_STEP:e}]"
        )));
    }
    let unit = field.energy_unit();
    let eval = |kx: f64, ky: f64| -> Result<[f64; 3]> {
        let d = field.d(KPoint::new(kx, ky));
        let n = norm3(d);
        if n / unit <= GAP_FLOOR {
            return Err(Error::GapClosure { norm: n / unit });
        }
        Ok([d[0] / n, d[1] / n, d[2] / n])
    };
    let dhat = eval(k.kx, k.ky)?;
    let xp = eval(k.kx + step, k.ky)?;
    let xm = eval(k.kx - step, k.ky)?;
    let yp = eval(k.kx, k.ky + step)?;
    let ym = eval(k.kx, k.ky - step)?;
    let inv = 0.5 / step;
    Ok(UnitDerivatives {
        dhat,
        d_kx: std::array::from_fn(|i| (xp[i] - xm[i]) * inv),
        d_ky: std::array::from_fn(|i| (yp[i] - ym[i]) * inv),
    })
}

/// Berry curvature of `band` for any two-level field, by central differences.
pub fn berry_curvature_numeric(
    field: &impl DField,
    k: KPoint,
    step: f64,
    band: Band,
) -> Result<f64> {
    let u = unit_derivatives(field, k, step)?;
    let triple = dot3(u.dhat, cross3(u.d_kx, u.d_ky));
    Ok(band.orientation() * 0.5 * triple)
}

/// Pullback metric `¼ ∂_μd̂·∂_νd̂` by central differences.
pub fn metric_numeric(field: &impl DField, k: KPoint, step: f64) -> Result<MetricTensor> {
    let u = unit_derivatives(field, k, step)?;
    Ok(MetricTensor {
        g11: 0.25 * dot3(u.d_kx, u.d_kx),
        g12: 0.25 * dot3(u.d_kx, u.d_ky),
        g22: 0.25 * dot3(u.d_ky, u.d_ky),
    })
}

/// Round metric of radius 1/2 in `(θ̃, φ)`.
pub fn metric_spherical(theta: f64) -> MetricTensor {
    let s = theta.sin();
    MetricTensor::diag(0.25, 0.25 * s * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch_model::FnField;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, TAU};

    #[test]
    fn metric_at_equator() {
        let g = metric_analytic(&ModelParams::unit(0.0, 1.0), KPoint::new(FRAC_PI_2, 1.3)).unwrap();
        assert!(g.max_abs_diff(&MetricTensor::diag(0.25, 0.25)) < 1e-15);
    }

    #[test]
    fn metric_vanishes_along_ky_at_kx_zero() {
        for (h, a) in [(0.3, 1.0), (2.0, 0.5), (-5.0, 2.0)] {
            let g = metric_analytic(&ModelParams::unit(h, a), KPoint::new(0.0, 0.9)).unwrap();
            assert_eq!(g.g22, 0.0);
        }
    }

    #[test]
    fn sqrt_det_examples() {
        let v = sqrt_det_g(&ModelParams::unit(0.0, 1.0), KPoint::new(FRAC_PI_2, 0.0)).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
        // 1 + h cos kx = 0 at cos kx = -1/2 for h = 2
        let kink = (-0.5f64).acos();
        let v = sqrt_det_g(&ModelParams::unit(2.0, 1.0), KPoint::new(kink, 0.0)).unwrap();
        assert!(v < 1e-15);
    }

    #[test]
    fn berry_examples() {
        let p = ModelParams::unit(0.0, 1.0);
        let f = berry_curvature_analytic(&p, KPoint::new(FRAC_PI_2, 2.0)).unwrap();
        assert!((f - 0.5).abs() < 1e-15);
        assert!((berry_curvature_band(&p, KPoint::new(FRAC_PI_2, 2.0), Band::Excited).unwrap() + 0.5).abs() < 1e-15);
        for p in [ModelParams::unit(0.4, 1.0), ModelParams::unit(-3.0, 0.7)] {
            assert!(berry_curvature_analytic(&p, KPoint::new(PI, 0.2)).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn gap_closure_is_reported() {
        let p = ModelParams::unit(1.0, 1.0);
        let k = KPoint::new(PI, 0.0);
        assert!(matches!(metric_analytic(&p, k), Err(Error::GapClosure { .. })));
        assert!(matches!(sqrt_det_g(&p, k), Err(Error::GapClosure { .. })));
        assert!(matches!(berry_curvature_analytic(&p, k), Err(Error::GapClosure { .. })));
        // a stencil point landing on the closure is also caught
        assert!(matches!(
            berry_curvature_numeric(&p, KPoint::new(PI - 1e-4, 0.0), 1e-4, Band::Ground),
            Err(Error::GapClosure { .. })
        ));
    }

    #[test]
    fn step_is_range_checked() {
        let p = ModelParams::unit(0.0, 1.0);
        assert!(metric_numeric(&p, KPoint::new(1.0, 1.0), 1e-8).is_err());
        assert!(metric_numeric(&p, KPoint::new(1.0, 1.0), 0.1).is_err());
    }

    #[test]
    fn numeric_berry_on_model() {
        let p = ModelParams::unit(0.0, 1.0);
        let f = berry_curvature_numeric(&p, KPoint::new(FRAC_PI_2, 0.0), 1e-4, Band::Ground).unwrap();
        assert!((f - 0.5).abs() < 1e-7, "{f}");
    }

    #[test]
    fn constant_field_is_flat() {
        let field = FnField(|_| [0.0, 0.0, 1.0]);
        let k = KPoint::new(0.3, 2.0);
        assert_eq!(berry_curvature_numeric(&field, k, 1e-4, Band::Ground).unwrap(), 0.0);
        assert_eq!(metric_numeric(&field, k, 1e-4).unwrap(), MetricTensor::zero());
    }

    #[test]
    fn monopole_curvature_is_half_the_solid_angle_jacobian() {
        let field = crate::bloch_model::MonopoleField;
        for kx in [0.2, 1.0, FRAC_PI_2, 2.5] {
            let f = berry_curvature_numeric(&field, KPoint::new(kx, 0.7), 1e-4, Band::Ground).unwrap();
            assert!((f - 0.5 * kx.sin()).abs() < 1e-8, "kx={kx}: {f}");
        }
    }

    #[test]
    fn numeric_metric_on_model() {
        let p = ModelParams::unit(0.0, 1.0);
        let g = metric_numeric(&p, KPoint::new(FRAC_PI_2, 0.7), 1e-4).unwrap();
        assert!(g.max_abs_diff(&MetricTensor::diag(0.25, 0.25)) < 1e-7);

        let p = ModelParams::unit(3.0, 1.0);
        for i in 0..64 {
            let k = KPoint::new(TAU * (i as f64 + 0.5) / 64.0, 0.1 * i as f64);
            assert!(metric_numeric(&p, k, 1e-4).unwrap().g12.abs() < 1e-9);
        }
    }

    #[test]
    fn numeric_matches_closed_form_off_symmetric_points() {
        let p = ModelParams::unit(1.5, 0.8);
        let k = KPoint::new(2.0, 0.3);
        let g = metric_numeric(&p, k, 1e-4).unwrap();
        assert!(g.max_abs_diff(&metric_analytic(&p, k).unwrap()) < 1e-7);

        let p = ModelParams::unit(2.0, 1.0);
        let k = KPoint::new(3.0 * PI / 4.0, 1.1);
        let f = berry_curvature_numeric(&p, k, 1e-4, Band::Ground).unwrap();
        assert!((f - berry_curvature_analytic(&p, k).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn spherical_metric() {
        assert!(metric_spherical(FRAC_PI_2).max_abs_diff(&MetricTensor::diag(0.25, 0.25)) < 1e-16);
        assert_eq!(metric_spherical(0.0), MetricTensor::diag(0.25, 0.0));
        let v = metric_spherical(FRAC_PI_3).sqrt_det();
        assert!((v - 3f64.sqrt() / 8.0).abs() < 1e-16);
    }

    #[test]
    fn analytic_quantities_ignore_ky() {
        let p = ModelParams::unit(1.7, 0.6);
        let reference = sample(&p, KPoint::new(2.2, 0.0)).unwrap();
        for ky in [0.5, 1.9, 4.0, 6.1] {
            let s = sample(&p, KPoint::new(2.2, ky)).unwrap();
            assert_eq!(s.g, reference.g);
            assert_eq!(s.berry, reference.berry);
            assert_eq!(s.sqrt_det_g, reference.sqrt_det_g);
        }
    }

    #[test]
    fn metric_helpers() {
        let g = MetricTensor { g11: 2.0, g12: 1.0, g22: 2.0 };
        assert_eq!(g.eigenvalues(), [1.0, 3.0]);
        let inv = g.inverse().unwrap();
        assert!((inv.g11 - 2.0 / 3.0).abs() < 1e-15 && (inv.g12 + 1.0 / 3.0).abs() < 1e-15);
        assert!(MetricTensor::diag(1.0, 0.0).inverse().is_none());
        assert!(!MetricTensor::diag(1.0, -1.0).is_psd(1e-12));
    }
}
