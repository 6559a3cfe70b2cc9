//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test --test acceptance`.

mod common;

use std::f64::consts::{FRAC_PI_6, PI, TAU};
use std::fs;
use std::process::{Command, ExitCode};
use std::time::Instant;

use bloch_geometry::bloch_model::{KPoint, ModelParams, MonopoleField, Z_DOWN};
use bloch_geometry::invariants::{
    chern_number, chern_number_field, euler_corrected, euler_naive, KDomain, QuadratureSpec,
};
use bloch_geometry::qgt::{
    berry_curvature_analytic, berry_curvature_numeric, metric_analytic, metric_numeric,
    sqrt_det_g, Band,
};
use bloch_geometry::surface_geometry::{
    analyze_image, circle_on_sphere_kg, gauss_bonnet, geodesic_curvature, CapGeometry,
    RoundMetric, QUANTUM_RADIUS,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn grid() -> QuadratureSpec {
    QuadratureSpec::with_points(2048)
}

fn chern_flatness() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for h in [0.0, 0.5, -0.5, 0.9, -0.9, 1.5, -1.5, 3.0, -3.0] {
        let c = chern_number(&ModelParams::unit(h, 1.0), &grid()).map_err(|e| format!("h={h}: {e}"))?;
        worst = worst.max(c.value.abs());
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst <= 1e-8 && secs < 5.0, format!("max |C| = {worst:.2e}, {secs:.3} s"))
}

fn naive_plateau() -> Outcome {
    let mut worst: f64 = 0.0;
    for h in [0.0, 0.25, -0.25, 0.5, -0.5, 0.9, -0.9] {
        let e = euler_naive(&ModelParams::unit(h, 1.0), &grid()).map_err(|e| format!("h={h}: {e}"))?;
        worst = worst.max((e.value - 4.0).abs());
    }
    check(worst <= 1e-6, format!("max |χ_naive - 4| = {worst:.2e}"))
}

fn naive_decay() -> Outcome {
    let theta0 = common::cap_angle_brute_force(2.0, 1.0, 1 << 22);
    let reference = 4.0 * (1.0 - theta0.cos());
    let closed = 4.0 * (1.0 - 3f64.sqrt() / 2.0);
    let at2 = euler_naive(&ModelParams::unit(2.0, 1.0), &grid()).map_err(|e| e.to_string())?.value;
    let at50 = euler_naive(&ModelParams::unit(50.0, 1.0), &grid()).map_err(|e| e.to_string())?.value;
    check(
        (at2 - reference).abs() <= 1e-5 && (at2 - closed).abs() <= 1e-5 && at50 < 0.01,
        format!(
            "χ_naive(2) = {at2:.10} (oracle {reference:.10}, Δ {:.1e}), χ_naive(50) = {at50:.2e}",
            (at2 - reference).abs()
        ),
    )
}

fn corrected_constancy() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 2.0] {
        for h in [0.0, 0.5, -0.5, 1.1, -1.1, 2.0, -2.0, 5.0, -5.0, 20.0, -20.0] {
            let e = euler_corrected(&ModelParams::unit(h, alpha), &grid())
                .map_err(|e| format!("h={h} α={alpha}: {e}"))?;
            worst = worst.max((e.value - 4.0).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst <= 1e-6 && secs < 30.0, format!("max |χ - 4| = {worst:.2e} over 33 points, {secs:.3} s"))
}

fn multiplicity() -> Outcome {
    let hs = [0.0, 0.25, -0.25, 0.5, -0.5, 0.9, -0.9, 1.1, -1.1, 1.5, -1.5, 2.0, -2.0, 3.0, -3.0, 5.0, -5.0, 20.0, -20.0];
    let mut worst: f64 = 0.0;
    for alpha in [0.5, 1.0, 2.0] {
        for h in hs {
            let cap = analyze_image(&ModelParams::unit(h, alpha), 2048).map_err(|e| format!("h={h} α={alpha}: {e}"))?;
            let expected = if f64::abs(h) < 1.0 { 2 } else { 4 };
            if cap.multiplicity != expected {
                return Err(format!("h={h} α={alpha}: m = {}", cap.multiplicity));
            }
            worst = worst.max((cap.multiplicity_raw - expected as f64).abs());
        }
    }
    check(worst <= 1e-3, format!("{} points, max |raw - m| = {worst:.2e}", hs.len() * 3))
}

fn metric_identity() -> Outcome {
    let mut analytic: f64 = 0.0;
    let mut numeric: f64 = 0.0;
    for (h, alpha, kx, ky) in common::random_points(2024, 10_000) {
        let p = ModelParams::unit(h, alpha);
        let k = KPoint::new(kx, ky);
        let err = |e: bloch_geometry::Error| format!("h={h} k=({kx},{ky}): {e}");
        let s = sqrt_det_g(&p, k).map_err(err)?;
        let f = berry_curvature_analytic(&p, k).map_err(err)?;
        analytic = analytic.max((s - 0.5 * f.abs()).abs());
        let g = metric_numeric(&p, k, 1e-4).map_err(err)?;
        let fnum = berry_curvature_numeric(&p, k, 1e-4, Band::Ground).map_err(err)?;
        numeric = numeric.max((g.sqrt_det() - 0.5 * fnum.abs()).abs());
    }
    check(
        analytic <= 1e-12 && numeric <= 1e-6,
        format!("10^4 points: analytic {analytic:.1e}, numeric {numeric:.1e}"),
    )
}

fn geodesic_curvature_check() -> Outcome {
    let metric = RoundMetric::quantum();
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let theta0 = 0.01 + (PI - 0.02) * i as f64 / 99.0;
        let kg = geodesic_curvature(&metric, theta0).map_err(|e| e.to_string())?.k_g;
        // the circle formula gives the magnitude; the sign records which side is the cap
        let circle = circle_on_sphere_kg(QUANTUM_RADIUS, QUANTUM_RADIUS * theta0.sin());
        worst = worst.max((kg.abs() - circle).abs());
    }
    let spot = geodesic_curvature(&metric, FRAC_PI_6).map_err(|e| e.to_string())?.k_g;
    let spot_err = (spot - 2.0 * 3f64.sqrt()).abs();
    check(
        worst <= 1e-10 && spot_err <= 1e-10,
        format!("max deviation {worst:.1e} on 100 angles, k_g(π/6) - 2√3 = {spot_err:.1e}"),
    )
}

fn gauss_bonnet_values() -> Outcome {
    let mut worst: f64 = 0.0;
    for theta0 in [0.1, 0.5, 1.0, 1.5, 2.0, 3.0] {
        let cap = CapGeometry::cap(Z_DOWN, theta0, 1).map_err(|e| e.to_string())?;
        let gb = gauss_bonnet(&cap).map_err(|e| e.to_string())?;
        worst = worst.max((gb.total() - 1.0).abs());
    }
    let sphere = gauss_bonnet(&CapGeometry::full_sphere(1)).map_err(|e| e.to_string())?.total();
    let sphere_err = (sphere - 2.0).abs();
    check(
        worst <= 1e-9 && sphere_err <= 1e-9,
        format!("caps max |χ - 1| = {worst:.1e}, sphere |χ - 2| = {sphere_err:.1e}"),
    )
}

fn fd_convergence() -> Outcome {
    let steps = [1e-3, 5e-4, 2.5e-4];
    let mut slopes = Vec::new();
    for (h, alpha, kx, ky) in [(2.0, 1.0, 3.0 * PI / 4.0, 1.1), (0.5, 1.5, 2.0, 0.3), (-1.8, 0.7, 4.4, 5.0)] {
        let p = ModelParams::unit(h, alpha);
        let k = KPoint::new(kx, ky);
        let f = berry_curvature_analytic(&p, k).map_err(|e| e.to_string())?;
        let g = metric_analytic(&p, k).map_err(|e| e.to_string())?;
        let mut f_err = Vec::new();
        let mut g_err = Vec::new();
        for s in steps {
            f_err.push((berry_curvature_numeric(&p, k, s, Band::Ground).map_err(|e| e.to_string())? - f).abs());
            g_err.push(metric_numeric(&p, k, s).map_err(|e| e.to_string())?.max_abs_diff(&g));
        }
        slopes.push(common::loglog_slope(&steps, &f_err));
        slopes.push(common::loglog_slope(&steps, &g_err));
    }
    let ok = slopes.iter().all(|s| (s - 2.0).abs() <= 0.2);
    let shown: Vec<String> = slopes.iter().map(|s| format!("{s:.3}")).collect();
    check(ok, format!("slopes (F, g per point): {}", shown.join(", ")))
}

fn monopole() -> Outcome {
    let domain = KDomain { kx: (0.0, PI), ky: (0.0, TAU) };
    let spec = QuadratureSpec::full_2d(256).simpson();
    let c = chern_number_field(&MonopoleField, &domain, &spec, 1e-5, Band::Ground).map_err(|e| e.to_string())?;
    check((c.value - 1.0).abs() <= 1e-8, format!("C = {:.12}", c.value))
}

fn cli() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_bloch-geometry");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |args: &[&str]| -> Result<i32, String> {
        let status = Command::new(bin).args(args).output().map_err(|e| e.to_string())?.status;
        status.code().ok_or_else(|| "killed by signal".to_string())
    };
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let sweep = ["--h-min", "-3", "--h-max", "3", "--h-count", "61", "--alpha", "0.5,1,2"];
    let (a, b) = (path("a.csv"), path("b.csv"));
    let code_a = run(&[&sweep[..], &["--out", &a]].concat())?;
    let code_b = run(&[&sweep[..], &["--out", &b, "--jobs", "1"]].concat())?;
    let identical = fs::read(&a).map_err(|e| e.to_string())? == fs::read(&b).map_err(|e| e.to_string())?;
    let header_ok = fs::read_to_string(&a)
        .map_err(|e| e.to_string())?
        .lines()
        .next()
        .is_some_and(|l| l == bloch_geometry::sweep::CSV_HEADER);

    let no_rows = run(&["--h-min", "1", "--h-max", "1", "--h-count", "1", "--out", &path("c.csv")])?;
    let usage = run(&["--h-min", "2", "--h-max", "-2", "--out", &path("d.csv")])?;
    let missing = dir.path().join("missing").join("e.csv");
    let io = run(&["--h-count", "3", "--out", missing.to_str().unwrap()])?;
    let codes = [code_a, code_b, no_rows, usage, io];
    check(
        identical && header_ok && codes == [0, 0, 1, 2, 3],
        format!("byte-identical: {identical}, header: {header_ok}, exit codes {codes:?} (want [0, 0, 1, 2, 3])"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Chern flatness", chern_flatness),
        ("naive Euler plateau", naive_plateau),
        ("naive Euler decay", naive_decay),
        ("corrected Euler constancy", corrected_constancy),
        ("multiplicity integrality", multiplicity),
        ("metric/curvature identity", metric_identity),
        ("geodesic curvature cross-check", geodesic_curvature_check),
        ("Gauss-Bonnet disk/sphere", gauss_bonnet_values),
        ("analytic vs numeric QGT", fd_convergence),
        ("monopole Chern number", monopole),
        ("CLI determinism and exit codes", cli),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
