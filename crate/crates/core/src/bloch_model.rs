//! The two-band model, the generic d-vector abstraction and eigen-system helpers.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Below this value of `|d|` (in units of the field's energy scale) the two
/// bands are treated as degenerate.
pub const GAP_FLOOR: f64 = 1e-10;
/// Half-width of the band around `|h| = 1` that is flagged as critical.
pub const GAP_TOL: f64 = 1e-6;
/// `|α|` below this collapses the image of `d̂` onto the poles.
pub const ALPHA_TOL: f64 = 1e-8;

pub const Z_UP: [f64; 3] = [0.0, 0.0, 1.0];
pub const Z_DOWN: [f64; 3] = [0.0, 0.0, -1.0];

/// A point of the two-dimensional parameter space, both angles reduced to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KPoint {
    pub kx: f64,
    pub ky: f64,
}

impl KPoint {
    pub fn new(kx: f64, ky: f64) -> Self {
        Self {
            kx: reduce_angle(kx),
            ky: reduce_angle(ky),
        }
    }
}

fn reduce_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Anything that assigns a real 3-vector `d(k)` to a parameter point, i.e. a
/// two-level Hamiltonian `H(k) = d(k)·σ`.
pub trait DField: Sync {
    fn d(&self, k: KPoint) -> [f64; 3];

    /// Energy scale in which `|d|` is compared against [`GAP_FLOOR`].
    fn energy_unit(&self) -> f64 {
        1.0
    }
}

impl<T: DField + ?Sized> DField for &T {
    fn d(&self, k: KPoint) -> [f64; 3] {
        (**self).d(k)
    }

    fn energy_unit(&self) -> f64 {
        (**self).energy_unit()
    }
}

/// Wraps a closure as a [`DField`].
pub struct FnField<F>(pub F);

impl<F> DField for FnField<F>
where
    F: Fn(KPoint) -> [f64; 3] + Sync,
{
    fn d(&self, k: KPoint) -> [f64; 3] {
        (self.0)(k)
    }
}

/// Hedgehog field whose `d̂` covers the unit sphere exactly once for
/// `kx ∈ [0, π]`, `ky ∈ [0, 2π)`; it is the built-in model at `h = 0, α = 1`
/// restricted to half of its `kx` range.
#[derive(Debug, Clone, Copy, Default)]
pub struct MonopoleField;

impl DField for MonopoleField {
    fn d(&self, k: KPoint) -> [f64; 3] {
        let (sx, cx) = k.kx.sin_cos();
        let (sy, cy) = k.ky.sin_cos();
        [sx * cy, sx * sy, -cx]
    }
}

/// Physical parameters of the two-band model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub h: f64,
    pub alpha: f64,
    pub omega: f64,
}

impl ModelParams {
    pub fn new(h: f64, alpha: f64, omega: f64) -> Result<Self> {
        if !omega.is_finite() || omega <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "omega must be positive and finite, got {omega}"
            )));
        }
        if !h.is_finite() || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "h and alpha must be finite, got h={h}, alpha={alpha}"
            )));
        }
        Ok(Self { h, alpha, omega })
    }

    /// Model with `Ω = 2`, so that `Ω/2` is the energy unit.
    pub fn unit(h: f64, alpha: f64) -> Self {
        Self {
            h,
            alpha,
            omega: 2.0,
        }
    }

    /// `|h|` within [`GAP_TOL`] of 1.
    pub fn is_critical(&self) -> bool {
        (self.h.abs() - 1.0).abs() < GAP_TOL
    }

    pub fn is_degenerate(&self) -> bool {
        self.alpha.abs() < ALPHA_TOL
    }

    /// Fails with the error the geometric routines report for this parameter set.
    pub fn check_gapped(&self) -> Result<()> {
        if self.is_critical() {
            return Err(Error::CriticalPoint {
                h: self.h,
                tol: GAP_TOL,
            });
        }
        Ok(())
    }

    pub fn half_omega(&self) -> f64 {
        0.5 * self.omega
    }

    /// `f = (h + cos kx)² + α² sin² kx`, the squared gap in units of `Ω/2`.
    pub fn f_scale(&self, kx: f64) -> f64 {
        let (s, c) = kx.sin_cos();
        let a = self.h + c;
        let b = self.alpha * s;
        a * a + b * b
    }
}

impl DField for ModelParams {
    fn d(&self, k: KPoint) -> [f64; 3] {
        d_vector(self, k).components()
    }

    fn energy_unit(&self) -> f64 {
        self.half_omega()
    }
}

/// The Bloch vector `d(k)` in energy units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DVec {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

impl DVec {
    pub fn components(&self) -> [f64; 3] {
        [self.dx, self.dy, self.dz]
    }

    pub fn norm(&self) -> f64 {
        norm3(self.components())
    }
}

pub fn d_vector(p: &ModelParams, k: KPoint) -> DVec {
    let scale = p.half_omega();
    let (sx, cx) = k.kx.sin_cos();
    let (sy, cy) = k.ky.sin_cos();
    DVec {
        dx: p.alpha * scale * sx * cy,
        dy: p.alpha * scale * sx * sy,
        dz: -scale * (p.h + cx),
    }
}

pub type Matrix2c = [[Complex64; 2]; 2];

/// The model Hamiltonian, built entry by entry from its matrix form.
pub fn hamiltonian(p: &ModelParams, k: KPoint) -> Matrix2c {
    let scale = p.half_omega();
    let diag = scale * (p.h + k.kx.cos());
    let off = scale * p.alpha * k.kx.sin();
    [
        [
            Complex64::new(-diag, 0.0),
            off * Complex64::from_polar(1.0, -k.ky),
        ],
        [Complex64::from_polar(off, k.ky), Complex64::new(diag, 0.0)],
    ]
}

/// `d·σ` for an arbitrary vector.
pub fn pauli_expand(d: [f64; 3]) -> Matrix2c {
    let [dx, dy, dz] = d;
    [
        [Complex64::new(dz, 0.0), Complex64::new(dx, -dy)],
        [Complex64::new(dx, dy), Complex64::new(-dz, 0.0)],
    ]
}

/// Energies and normalized eigenvectors of `d·σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    pub e_minus: f64,
    pub e_plus: f64,
    pub u_minus: [Complex64; 2],
    pub u_plus: [Complex64; 2],
}

impl EigenSystem {
    pub fn ground(&self) -> (f64, [Complex64; 2]) {
        (self.e_minus, self.u_minus)
    }
}

pub fn eigensystem(p: &ModelParams, k: KPoint) -> Result<EigenSystem> {
    eigensystem_of(d_vector(p, k).components(), p.half_omega())
}

/// Closed-form eigen-decomposition of `d·σ`; `unit` is the energy scale used
/// for the gap test.
pub fn eigensystem_of(d: [f64; 3], unit: f64) -> Result<EigenSystem> {
    let norm = norm3(d);
    if norm / unit <= GAP_FLOOR {
        return Err(Error::GapClosure { norm: norm / unit });
    }
    Ok(EigenSystem {
        e_minus: -norm,
        e_plus: norm,
        u_minus: eigenvector(d, norm, -1.0),
        u_plus: eigenvector(d, norm, 1.0),
    })
}

// (dx - i dy, ±d - dz) and (±d + dz, dx + i dy) span the same ray; pick the
// one that stays away from zero.
fn eigenvector(d: [f64; 3], norm: f64, sign: f64) -> [Complex64; 2] {
    let [dx, dy, dz] = d;
    let e = sign * norm;
    let (a, b) = if (e - dz).abs() >= (e + dz).abs() {
        (Complex64::new(dx, -dy), Complex64::new(e - dz, 0.0))
    } else {
        (Complex64::new(e + dz, 0.0), Complex64::new(dx, dy))
    };
    let len = (a.norm_sqr() + b.norm_sqr()).sqrt();
    [a / len, b / len]
}

/// Normalized Bloch vector together with its spherical angles about `pole`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitD {
    pub vec: [f64; 3],
    pub pole: [f64; 3],
    /// Polar angle from `pole`, in `[0, π]`.
    pub theta: f64,
    /// Azimuth in `[0, 2π)` within the frame returned by [`azimuth_frame`].
    pub phi: f64,
}

impl UnitD {
    pub fn from_vec(v: [f64; 3], pole: [f64; 3]) -> Self {
        let n = norm3(v);
        let vec = [v[0] / n, v[1] / n, v[2] / n];
        let (e1, e2) = azimuth_frame(pole);
        let theta = norm3(cross3(vec, pole)).atan2(dot3(vec, pole));
        let phi = reduce_angle(dot3(vec, e2).atan2(dot3(vec, e1)));
        Self {
            vec,
            pole,
            theta,
            phi,
        }
    }

    /// Rebuilds the unit vector from `(θ̃, φ)`.
    pub fn from_angles(theta: f64, phi: f64, pole: [f64; 3]) -> [f64; 3] {
        let (e1, e2) = azimuth_frame(pole);
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        std::array::from_fn(|i| st * cp * e1[i] + st * sp * e2[i] + ct * pole[i])
    }
}

/// In-plane axes for measuring the azimuth about `pole`. For `±ẑ` these are
/// `x̂, ŷ`, so the azimuth is `atan2(d̂_y, d̂_x)` in both cases.
pub fn azimuth_frame(pole: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    if pole[0].abs() < 1e-12 && pole[1].abs() < 1e-12 {
        return ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
    }
    let seed = if pole[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let proj = dot3(seed, pole);
    let e1 = normalize([
        seed[0] - proj * pole[0],
        seed[1] - proj * pole[1],
        seed[2] - proj * pole[2],
    ]);
    (e1, cross3(pole, e1))
}

pub fn unit_d(p: &ModelParams, k: KPoint, pole: [f64; 3]) -> Result<UnitD> {
    unit_d_of(p, k, pole)
}

pub fn unit_d_of(field: &impl DField, k: KPoint, pole: [f64; 3]) -> Result<UnitD> {
    let d = field.d(k);
    let n = norm3(d);
    if n / field.energy_unit() <= GAP_FLOOR {
        return Err(Error::GapClosure {
            norm: n / field.energy_unit(),
        });
    }
    Ok(UnitD::from_vec(d, pole))
}

/// Pole of the cap covered by `d̂`: `-sign(h)·ẑ` for `|h| > 1`, `+ẑ` otherwise.
pub fn cap_pole(p: &ModelParams) -> [f64; 3] {
    if p.h.abs() > 1.0 && p.h > 0.0 {
        Z_DOWN
    } else {
        Z_UP
    }
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub(crate) fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = norm3(a);
    [a[0] / n, a[1] / n, a[2] / n]
}
