//! Reference values computed without going through the library.
#![allow(dead_code)]

use std::f64::consts::TAU;

/// Unit Bloch vector straight from the component formulas (Ω drops out).
pub fn dhat(h: f64, alpha: f64, kx: f64, ky: f64) -> [f64; 3] {
    let d = [
        alpha * kx.sin() * ky.cos(),
        alpha * kx.sin() * ky.sin(),
        -(h + kx.cos()),
    ];
    let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    [d[0] / n, d[1] / n, d[2] / n]
}

/// Largest polar angle of d̂ from -sign(h)ẑ over a uniform kx grid of `n`
/// points (no refinement).
pub fn cap_angle_brute_force(h: f64, alpha: f64, n: usize) -> f64 {
    let pole_z = -h.signum();
    (0..n)
        .map(|i| {
            let v = dhat(h, alpha, TAU * i as f64 / n as f64, 0.0);
            let cos = v[2] * pole_z;
            let sin = (v[0] * v[0] + v[1] * v[1]).sqrt();
            sin.atan2(cos)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// sin θ̃₀ = α/√(α² + h² − 1), from extremizing tan θ̃ = α|sin kx|/|h + cos kx|.
pub fn cap_angle_closed_form(h: f64, alpha: f64) -> f64 {
    (alpha / (alpha * alpha + h * h - 1.0).sqrt()).asin()
}

/// Bulk-only Euler number from the solid-angle picture: 4 on the full sphere,
/// m/(2π) · 2π(1 − cos θ̃₀) with m = 4 on the cap.
pub fn naive_euler_reference(h: f64, alpha: f64) -> f64 {
    if h.abs() < 1.0 {
        4.0
    } else {
        4.0 * (1.0 - cap_angle_closed_form(h, alpha).cos())
    }
}

/// Least-squares slope of log(err) against log(step).
pub fn loglog_slope(steps: &[f64], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = steps.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Deterministic random gapped parameter points.
pub fn random_points(seed: u64, n: usize) -> Vec<(f64, f64, f64, f64)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let h: f64 = rng.gen_range(-4.0..4.0);
        if (0.99..=1.01).contains(&h.abs()) {
            continue;
        }
        let alpha: f64 = rng.gen_range(0.2..3.0);
        let kx: f64 = rng.gen_range(0.0..TAU);
        let ky: f64 = rng.gen_range(0.0..TAU);
        out.push((h, alpha, kx, ky));
    }
    out
}
