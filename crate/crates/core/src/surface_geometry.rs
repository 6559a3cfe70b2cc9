//! Image of `d̂` on the sphere, Christoffel symbols, geodesic curvature and
//! Gauss-Bonnet with a boundary term.
//!
//! For `|h| < 1` the map `k ↦ d̂(k)` covers the whole sphere; for `|h| > 1`
//! `d_z` keeps the sign of `-h` and the image is a cap of half-angle `θ̃₀`
//! about `-sign(h)·ẑ`. The Euler characteristic of one cover is then the bulk
//! curvature integral plus the turning of the boundary circle.

use std::f64::consts::{PI, TAU};

use crate::bloch_model::{cap_pole, dot3, unit_d, KPoint, ModelParams, Z_UP};
use crate::error::{Error, Result};
use crate::invariants::{self, integrate_1d, Estimate, KDomain, QuadratureSpec};
use crate::qgt::MetricTensor;

pub const INTEGRALITY_TOL: f64 = 1e-3;
/// Closest approach to the coordinate poles for metric inversion.
pub const POLE_MARGIN: f64 = 1e-6;
pub const DEFAULT_FD_STEP: f64 = 1e-5;
const REFINE_TOL: f64 = 1e-10;
const BULK_TOL: f64 = 1e-9;
/// Radius of the round sphere carrying the quantum metric.
pub const QUANTUM_RADIUS: f64 = 0.5;

/// Region of the unit sphere swept by `d̂`, and how many times it is swept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapGeometry {
    pub full_sphere: bool,
    pub pole: [f64; 3],
    /// Polar angle of the boundary from `pole`; `π` for the full sphere.
    pub theta0: f64,
    /// `2π(1 - cos θ̃₀)`.
    pub solid_angle: f64,
    pub multiplicity: u32,
    /// Swept solid angle over `solid_angle` before rounding.
    pub multiplicity_raw: f64,
}

impl CapGeometry {
    pub fn full_sphere(multiplicity: u32) -> Self {
        Self {
            full_sphere: true,
            pole: Z_UP,
            theta0: PI,
            solid_angle: 4.0 * PI,
            multiplicity,
            multiplicity_raw: multiplicity as f64,
        }
    }

    pub fn cap(pole: [f64; 3], theta0: f64, multiplicity: u32) -> Result<Self> {
        if !(theta0 > 0.0 && theta0 <= PI) {
            return Err(Error::InvalidParameter(format!(
                "cap angle {theta0} outside (0, π]"
            )));
        }
        if (theta0 - PI).abs() < 1e-9 {
            return Ok(Self {
                pole,
                ..Self::full_sphere(multiplicity)
            });
        }
        Ok(Self {
            full_sphere: false,
            pole,
            theta0,
            solid_angle: TAU * (1.0 - theta0.cos()),
            multiplicity,
            multiplicity_raw: multiplicity as f64,
        })
    }
}

pub fn analyze_image(p: &ModelParams, resolution: usize) -> Result<CapGeometry> {
    analyze_image_on(p, &KDomain::full(), &QuadratureSpec::with_points(resolution))
}

/// Classifies the image of `d̂` and measures its covering multiplicity from
/// the total absolute Berry flux.
pub fn analyze_image_on(
    p: &ModelParams,
    domain: &KDomain,
    spec: &QuadratureSpec,
) -> Result<CapGeometry> {
    p.check_gapped()?;
    if p.is_degenerate() {
        return Err(Error::DegenerateAlpha { alpha: p.alpha });
    }
    let pole = cap_pole(p);
    let (full_sphere, theta0, solid_angle) = if p.h.abs() < 1.0 {
        (true, PI, 4.0 * PI)
    } else {
        let t = max_polar_angle(p, pole, spec.n_points)?;
        (false, t, TAU * (1.0 - t.cos()))
    };

    // |F| is half the solid-angle density of d̂
    let swept = 2.0 * invariants::absolute_flux(p, domain, spec)?.value;
    let raw = swept / solid_angle;
    let m = raw.round();
    if m < 1.0 || (raw - m).abs() > INTEGRALITY_TOL {
        return Err(Error::NonIntegralMultiplicity {
            raw,
            tol: INTEGRALITY_TOL,
        });
    }
    Ok(CapGeometry {
        full_sphere,
        pole,
        theta0,
        solid_angle,
        multiplicity: m as u32,
        multiplicity_raw: raw,
    })
}

/// Largest polar angle of `d̂` from `pole` over `kx`: grid scan, then golden
/// section on the bracketing cells. `d̂`'s polar angle does not depend on `ky`.
pub fn max_polar_angle(p: &ModelParams, pole: [f64; 3], resolution: usize) -> Result<f64> {
    let n = resolution.max(8);
    let theta = |kx: f64| unit_d(p, KPoint::new(kx, 0.0), pole).map(|u| u.theta);
    let cell = TAU / n as f64;
    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..n {
        let t = theta(i as f64 * cell)?;
        if t > best.1 {
            best = (i, t);
        }
    }
    let centre = best.0 as f64 * cell;
    let refined = golden_max(|x| theta(x).unwrap_or(f64::NEG_INFINITY), centre - cell, centre + cell);
    Ok(refined.max(best.1))
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > REFINE_TOL {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd).max(f(0.5 * (a + b)))
}

/// A metric over two coordinates `(λ₁, λ₂)`.
pub trait MetricField {
    fn metric(&self, at: [f64; 2]) -> MetricTensor;

    /// `[∂₁g, ∂₂g]` when known in closed form.
    fn derivatives(&self, _at: [f64; 2]) -> Option<[MetricTensor; 2]> {
        None
    }

    /// Gaussian curvature, when constant.
    fn gaussian_curvature(&self) -> Option<f64> {
        None
    }
}

/// Round metric `ρ²(dθ̃² + sin²θ̃ dφ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundMetric {
    pub radius: f64,
}

impl RoundMetric {
    /// Radius 1/2: the quantum metric of a two-level system.
    pub fn quantum() -> Self {
        Self {
            radius: QUANTUM_RADIUS,
        }
    }

    pub fn unit() -> Self {
        Self { radius: 1.0 }
    }
}

impl MetricField for RoundMetric {
    fn metric(&self, at: [f64; 2]) -> MetricTensor {
        let r2 = self.radius * self.radius;
        let s = at[0].sin();
        MetricTensor::diag(r2, r2 * s * s)
    }

    fn derivatives(&self, at: [f64; 2]) -> Option<[MetricTensor; 2]> {
        let r2 = self.radius * self.radius;
        let (s, c) = at[0].sin_cos();
        Some([MetricTensor::diag(0.0, 2.0 * r2 * s * c), MetricTensor::zero()])
    }

    fn gaussian_curvature(&self) -> Option<f64> {
        Some(1.0 / (self.radius * self.radius))
    }
}

/// Metric given by a closure; derivatives by central differences.
pub struct FnMetric<F>(pub F);

impl<F: Fn([f64; 2]) -> MetricTensor> MetricField for FnMetric<F> {
    fn metric(&self, at: [f64; 2]) -> MetricTensor {
        (self.0)(at)
    }
}

/// `Γ^k_ij` at one point, zero-based: `symbols[k][i][j]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Christoffel {
    pub symbols: [[[f64; 2]; 2]; 2],
}

impl Christoffel {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.symbols[k][i][j]
    }
}

fn fd_derivatives(field: &impl MetricField, at: [f64; 2], step: f64) -> [MetricTensor; 2] {
    std::array::from_fn(|axis| {
        let mut plus = at;
        let mut minus = at;
        plus[axis] += step;
        minus[axis] -= step;
        let (gp, gm) = (field.metric(plus), field.metric(minus));
        let inv = 0.5 / step;
        MetricTensor {
            g11: (gp.g11 - gm.g11) * inv,
            g12: (gp.g12 - gm.g12) * inv,
            g22: (gp.g22 - gm.g22) * inv,
        }
    })
}

/// `Γ^k_ij = ½ g^{km}(∂_j g_im + ∂_i g_jm - ∂_m g_ij)`. Uses the field's
/// closed-form derivatives when it has them, else central differences with `step`.
pub fn christoffel(field: &impl MetricField, at: [f64; 2], step: f64) -> Result<Christoffel> {
    let g = field.metric(at);
    let scale = g.g11.abs().max(g.g22.abs()).max(g.g12.abs());
    let singular = || Error::SingularMetric { at, det: g.det() };
    if scale == 0.0 || g.det().abs() <= 1e-24 * scale * scale {
        return Err(singular());
    }
    let inv = g.inverse().ok_or_else(singular)?;
    let dg = field
        .derivatives(at)
        .unwrap_or_else(|| fd_derivatives(field, at, step));

    let mut symbols = [[[0.0; 2]; 2]; 2];
    for (k, sk) in symbols.iter_mut().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                sk[i][j] = 0.5
                    * (0..2)
                        .map(|m| {
                            inv.get(k, m)
                                * (dg[j].get(i, m) + dg[i].get(j, m) - dg[m].get(i, j))
                        })
                        .sum::<f64>();
            }
        }
    }
    Ok(Christoffel { symbols })
}

/// A curve of constant `λ₁ = θ̃₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCurve {
    pub theta0: f64,
    pub k_g: f64,
    /// `dl/dλ₂ = √g₂₂`.
    pub dl_dphi: f64,
}

impl BoundaryCurve {
    /// `k_g · dl/dφ`, the boundary integrand per unit azimuth.
    pub fn turning_density(&self) -> f64 {
        self.k_g * self.dl_dphi
    }
}

/// Geodesic curvature `k_g = -Γ¹₂₂ √det g / g₂₂^{3/2}` of the `θ̃ = θ̃₀` circle.
pub fn geodesic_curvature(field: &impl MetricField, theta0: f64) -> Result<BoundaryCurve> {
    let at = [theta0, 0.0];
    if !(theta0 > POLE_MARGIN && theta0 < PI - POLE_MARGIN) {
        return Err(Error::SingularMetric {
            at,
            det: field.metric(at).det(),
        });
    }
    let gamma = christoffel(field, at, DEFAULT_FD_STEP)?;
    let g = field.metric(at);
    let g22 = g.g22;
    Ok(BoundaryCurve {
        theta0,
        k_g: -gamma.get(0, 1, 1) * g.sqrt_det() / (g22 * g22.sqrt()),
        dl_dphi: g22.sqrt(),
    })
}

/// Geodesic curvature magnitude of a circle of radius `r` on a sphere of
/// radius `rho`: `√(ρ² - r²)/(ρ r)`. Positive when the circle is seen from
/// the smaller cap.
pub fn circle_on_sphere_kg(rho: f64, r: f64) -> f64 {
    (rho * rho - r * r).max(0.0).sqrt() / (rho * r)
}

/// Bulk and boundary contributions to the Euler characteristic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussBonnet {
    pub bulk: f64,
    pub boundary: f64,
    pub est_error: f64,
}

impl GaussBonnet {
    pub fn total(&self) -> f64 {
        self.bulk + self.boundary
    }
}

/// Euler characteristic of one cover of `cap`, on the quantum metric.
pub fn gauss_bonnet(cap: &CapGeometry) -> Result<GaussBonnet> {
    gauss_bonnet_with(cap, &RoundMetric::quantum())
}

/// `(1/2π)(∫K dA + ∮k_g dl)` on a rotationally symmetric metric of constant
/// curvature, with the cap spanning `θ̃ ∈ [0, θ̃₀]`, `φ ∈ [0, 2π)`.
pub fn gauss_bonnet_with(cap: &CapGeometry, metric: &RoundMetric) -> Result<GaussBonnet> {
    let curvature = metric.gaussian_curvature().unwrap_or_default();
    let spec = QuadratureSpec {
        tol: BULK_TOL,
        ..QuadratureSpec::default().simpson()
    };
    // the φ integral of a φ-independent integrand contributes 2π, cancelling 1/2π
    let bulk: Estimate = integrate_1d(
        |t| curvature * metric.metric([t, 0.0]).sqrt_det(),
        0.0,
        cap.theta0,
        &spec,
    )?;
    let boundary = if cap.full_sphere {
        0.0
    } else {
        geodesic_curvature(metric, cap.theta0)?.turning_density()
    };
    Ok(GaussBonnet {
        bulk: bulk.value,
        boundary,
        est_error: bulk.est_error,
    })
}

/// True when every sampled `d̂` lies inside the cap, to `slack`.
pub fn image_within_cap(p: &ModelParams, cap: &CapGeometry, resolution: usize, slack: f64) -> Result<bool> {
    let bound = cap.theta0.cos() - slack;
    for i in 0..resolution {
        for j in 0..resolution.min(16) {
            let k = KPoint::new(TAU * i as f64 / resolution as f64, TAU * j as f64 / 16.0);
            if dot3(unit_d(p, k, cap.pole)?.vec, cap.pole) < bound {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
