//! Chern number, bulk-only Euler number and the boundary-corrected Euler
//! characteristic.

pub mod quadrature;

use std::f64::consts::{PI, TAU};

pub use quadrature::{integrate_1d, integrate_2d, Estimate, KDomain, QuadratureSpec, Rule};

use crate::bloch_model::{DField, ModelParams};
use crate::error::{Error, Result};
use crate::qgt::{self, Band};
use crate::surface_geometry::{self, CapGeometry};

/// Ricci scalar of the quantum-state manifold (twice the Gaussian curvature 4).
pub const RICCI_SCALAR: f64 = 8.0;

/// Abscissae in `(0, 2π)` where `(1 + h cos kx) sin kx` changes sign.
pub fn kink_points(p: &ModelParams) -> Vec<f64> {
    let mut pts = vec![PI];
    if p.h.abs() > 1.0 {
        let a = (-1.0 / p.h).acos();
        pts.push(a);
        pts.push(TAU - a);
    }
    pts.sort_by(f64::total_cmp);
    pts
}

fn kinked(p: &ModelParams, domain: &KDomain, spec: &QuadratureSpec) -> QuadratureSpec {
    spec.with_splits(&kink_points(p), domain.kx.0, domain.kx.1)
}

fn check_params(p: &ModelParams) -> Result<()> {
    p.check_gapped()
}

/// `(1/2π)∫F` of the ground band over the full zone.
pub fn chern_number(p: &ModelParams, spec: &QuadratureSpec) -> Result<Estimate> {
    chern_number_on(p, &KDomain::full(), spec)
}

pub fn chern_number_on(p: &ModelParams, domain: &KDomain, spec: &QuadratureSpec) -> Result<Estimate> {
    check_params(p)?;
    let est = integrate_2d(
        |k| qgt::berry_curvature_analytic(p, k).unwrap_or(f64::NAN),
        domain,
        spec,
    )?;
    Ok(est.scale(1.0 / TAU))
}

/// Chern number of any two-level field from finite-difference curvature on a
/// full 2-D grid.
pub fn chern_number_field(
    field: &impl DField,
    domain: &KDomain,
    spec: &QuadratureSpec,
    step: f64,
    band: Band,
) -> Result<Estimate> {
    let spec = QuadratureSpec {
        reduce_ky: false,
        ..spec.clone()
    };
    let est = integrate_2d(
        |k| qgt::berry_curvature_numeric(field, k, step, band).unwrap_or(f64::NAN),
        domain,
        &spec,
    )?;
    Ok(est.scale(1.0 / TAU))
}

/// Bulk-only Euler number `(1/4π)∫R√det g` with `R = 8`.
pub fn euler_naive(p: &ModelParams, spec: &QuadratureSpec) -> Result<Estimate> {
    euler_naive_on(p, &KDomain::full(), spec)
}

pub fn euler_naive_on(p: &ModelParams, domain: &KDomain, spec: &QuadratureSpec) -> Result<Estimate> {
    check_params(p)?;
    let est = integrate_2d(
        |k| qgt::sqrt_det_g(p, k).unwrap_or(f64::NAN),
        domain,
        &kinked(p, domain, spec),
    )?;
    Ok(est.scale(RICCI_SCALAR / (4.0 * PI)))
}

/// `∫|F| dkx dky`, half of the total solid angle swept by `d̂`.
pub fn absolute_flux(p: &ModelParams, domain: &KDomain, spec: &QuadratureSpec) -> Result<Estimate> {
    check_params(p)?;
    integrate_2d(
        |k| qgt::berry_curvature_analytic(p, k).map_or(f64::NAN, f64::abs),
        domain,
        &kinked(p, domain, spec),
    )
}

/// Covering multiplicity times the Gauss-Bonnet characteristic (bulk plus
/// boundary) of one cover of the image of `d̂`.
pub fn euler_corrected(p: &ModelParams, spec: &QuadratureSpec) -> Result<Estimate> {
    euler_corrected_on(p, &KDomain::full(), spec)
}

pub fn euler_corrected_on(
    p: &ModelParams,
    domain: &KDomain,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let cap = surface_geometry::analyze_image_on(p, domain, spec)?;
    corrected_from_cap(&cap)
}

fn corrected_from_cap(cap: &CapGeometry) -> Result<Estimate> {
    let gb = surface_geometry::gauss_bonnet(cap)?;
    let m = cap.multiplicity as f64;
    Ok(Estimate {
        value: m * gb.total(),
        est_error: m * gb.est_error,
    })
}

/// Polar angle of the cap boundary, or the whole sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Theta0 {
    Full,
    Angle(f64),
}

impl Theta0 {
    pub fn of(cap: &CapGeometry) -> Self {
        if cap.full_sphere {
            Theta0::Full
        } else {
            Theta0::Angle(cap.theta0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportErrors {
    pub chern: f64,
    pub chi_naive: f64,
    pub chi_corrected: f64,
}

/// All invariants at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport {
    pub h: f64,
    pub alpha: f64,
    pub chern: f64,
    pub chi_naive: f64,
    pub chi_corrected: f64,
    pub multiplicity: u32,
    pub multiplicity_raw: f64,
    pub theta0: Theta0,
    pub est_error: ReportErrors,
}

impl InvariantReport {
    pub fn compute(p: &ModelParams, domain: &KDomain, spec: &QuadratureSpec) -> Result<Self> {
        p.check_gapped()?;
        if p.is_degenerate() {
            return Err(Error::DegenerateAlpha { alpha: p.alpha });
        }
        let chern = chern_number_on(p, domain, spec)?;
        let naive = euler_naive_on(p, domain, spec)?;
        let cap = surface_geometry::analyze_image_on(p, domain, spec)?;
        let corrected = corrected_from_cap(&cap)?;
        Ok(Self {
            h: p.h,
            alpha: p.alpha,
            chern: chern.value,
            chi_naive: naive.value,
            chi_corrected: corrected.value,
            multiplicity: cap.multiplicity,
            multiplicity_raw: cap.multiplicity_raw,
            theta0: Theta0::of(&cap),
            est_error: ReportErrors {
                chern: chern.est_error,
                chi_naive: naive.est_error,
                chi_corrected: corrected.est_error,
            },
        })
    }

    /// Rounds the Chern number and the corrected Euler characteristic to
    /// integers after checking each lies within `tol` (plus its error
    /// estimate) of one. The naive Euler number is left as is.
    pub fn rounded(mut self, tol: f64) -> Result<Self> {
        for (quantity, value, err) in [
            ("chern", &mut self.chern, self.est_error.chern),
            ("chi_corrected", &mut self.chi_corrected, self.est_error.chi_corrected),
        ] {
            let r = value.round();
            if (*value - r).abs() > tol + err {
                return Err(Error::NotIntegral {
                    quantity,
                    value: *value,
                    tol,
                });
            }
            // avoid emitting -0
            *value = r + 0.0;
        }
        Ok(self)
    }
}
