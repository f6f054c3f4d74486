//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion (plus indented detail lines) and exits non-zero if any failed.

use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use spherical_pp::experiments::{
    figure_preset, run_distance_experiment, run_experiment, tammes_row, Aggregation, DistanceStats,
    ExperimentConfig, ExperimentKind, ModelKind, Normalization, Series, Solver,
};
use spherical_pp::generators::{gen_bpp, gen_nbpp, gen_orbit, FibonacciMode, OrbitMode, OrbitShellConfig};
use spherical_pp::matching::{build_cost_matrix, exact_assignment_bruteforce, exact_assignment_poly, greedy_match};
use spherical_pp::rng::RandomStream;
use spherical_pp::sphere::shell_radius_km;
use spherical_pp::stats::{ks_critical_001, ks_statistic};
use spherical_pp::tammes::expected_nn_angle;

/// Outcome of one criterion: whether it held, plus lines worth printing.
struct Report {
    passed: bool,
    detail: Vec<String>,
}

impl Report {
    fn new() -> Self {
        Self {
            passed: true,
            detail: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.detail.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, line: String) {
        self.detail.push(format!("info {line}"));
    }
}

fn exact_oracle_equivalence() -> Report {
    let mut r = Report::new();
    let root = RandomStream::new(0x5eed_0001);
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in 2..=8usize {
        for i in 0..200u64 {
            let s = root.substream(n as u64 * 1000 + i);
            let a = gen_bpp(n, shell_radius_km(0.0), &mut s.substream(0)).unwrap();
            let b = gen_bpp(n, shell_radius_km(0.0), &mut s.substream(1)).unwrap();
            let d = build_cost_matrix(&a, &b).unwrap();
            let poly = exact_assignment_poly(&d).unwrap().distance_km;
            let brute = exact_assignment_bruteforce(&d).unwrap().distance_km;
            worst = worst.max((poly - brute).abs() / brute);
            count += 1;
        }
    }
    r.check(worst <= 1e-9, format!("max relative difference {worst:.2e} over {count} instances (tolerance 1e-9)"));
    r
}

fn greedy_dominance() -> Report {
    let mut r = Report::new();
    let gamma = 53f64.to_radians();
    let root = RandomStream::new(0x5eed_0002);
    for n in 2..=8usize {
        let shell = OrbitShellConfig::for_total(gamma, n, 1, 550.0, OrbitMode::Reconciled).unwrap();
        let mut violations = 0;
        let mut ratios = Vec::with_capacity(1000);
        for i in 0..1000u64 {
            let s = root.substream(i);
            let a = gen_bpp(n, shell.radius_km(), &mut s.substream(0)).unwrap();
            let b = gen_orbit(&shell, &mut s.substream(1)).unwrap();
            let d = build_cost_matrix(&a, &b).unwrap();
            let greedy = greedy_match(&d).unwrap().distance_km;
            let exact = exact_assignment_bruteforce(&d).unwrap().distance_km;
            if greedy < exact {
                violations += 1;
            }
            ratios.push(greedy / exact);
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let max = ratios.iter().copied().fold(0.0, f64::max);
        r.check(
            violations == 0 && mean < 1.5,
            format!("n={n}: greedy < exact on {violations}/1000, mean ratio {mean:.4} (bound 1.5), worst {max:.4}"),
        );
    }
    r
}

fn packing_approximation() -> Report {
    let mut r = Report::new();
    for h in [0.0, 550.0] {
        for n in [50, 100, 500, 1000] {
            let row = tammes_row(n, shell_radius_km(h), FibonacciMode::Reconciled).unwrap();
            r.check(
                row.relative_error <= 0.20,
                format!(
                    "N={n} h={h}: approx {:.2} km vs measured {:.2} km, relative error {:.4} (bound 0.20)",
                    row.approx_dopt_km, row.measured_fibonacci_dmin_km, row.relative_error
                ),
            );
        }
    }
    for n in [50, 1000] {
        let row = tammes_row(n, shell_radius_km(0.0), FibonacciMode::PaperLiteral).unwrap();
        r.note(format!(
            "literal lattice construction, N={n}: relative error {:.2} (not the acceptance lattice)",
            row.relative_error
        ));
    }
    r
}

fn bpp_uniformity() -> Report {
    let mut r = Report::new();
    let n = 10_000;
    let crit = ks_critical_001(n);
    let cdf = |z: f64| ((z + 1.0) / 2.0).clamp(0.0, 1.0);
    let bpp = gen_bpp(n, 1.0, &mut RandomStream::new(0x5eed_0004)).unwrap();
    let z: Vec<f64> = bpp.points().iter().map(|p| p.polar_rad().cos()).collect();
    let d_bpp = ks_statistic(&z, cdf);
    r.check(d_bpp < crit, format!("BPP: D = {d_bpp:.5} < critical {crit:.5}"));
    let nbpp = gen_nbpp(n, 1.0, &mut RandomStream::new(0x5eed_0004)).unwrap();
    let z: Vec<f64> = nbpp.points().iter().map(|p| p.polar_rad().cos()).collect();
    let d_nbpp = ks_statistic(&z, cdf);
    r.check(d_nbpp > crit, format!("NBPP: D = {d_nbpp:.5} > critical {crit:.5}"));
    r
}

fn orbit_geometry() -> Report {
    let mut r = Report::new();
    let gamma = 53f64.to_radians();
    let n_orbits = 20;
    let shell = OrbitShellConfig::new(gamma, n_orbits, 500, 550.0, OrbitMode::Reconciled).unwrap();
    let cfg = gen_orbit(&shell, &mut RandomStream::new(0x5eed_0005)).unwrap();
    // plane k: the equator tilted by gamma about the node line at 2*pi*k/N_orb
    let normals: Vec<[f64; 3]> = (1..=n_orbits)
        .map(|k| {
            let node = 2.0 * PI * k as f64 / n_orbits as f64;
            [gamma.sin() * node.sin(), -gamma.sin() * node.cos(), gamma.cos()]
        })
        .collect();
    let worst = cfg
        .points()
        .iter()
        .map(|p| {
            let u = p.unit_vector();
            normals
                .iter()
                .map(|m| (m[0] * u[0] + m[1] * u[1] + m[2] * u[2]).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    r.check(worst <= 1e-9, format!("reconciled: {} points, worst plane residual {worst:.2e} (tolerance 1e-9)", cfg.len()));

    let paper = OrbitShellConfig::new(gamma, n_orbits, 500, 550.0, OrbitMode::PaperLiteral).unwrap();
    let cfg = gen_orbit(&paper, &mut RandomStream::new(0x5eed_0005)).unwrap();
    let outside = cfg
        .points()
        .iter()
        .filter(|p| !(gamma..=PI - gamma).contains(&p.polar_rad()))
        .count();
    r.check(outside == 0, format!("literal mode: {outside}/{} points outside [gamma, pi - gamma]", cfg.len()));
    r
}

fn mean_of(rows: &[DistanceStats], series: &str, pick: impl Fn(&DistanceStats) -> bool) -> f64 {
    rows.iter()
        .find(|r| r.experiment.ends_with(&format!(":{series}")) && pick(r))
        .unwrap_or_else(|| panic!("missing row in {series}"))
        .mean_km
}

fn ordering_claims() -> Report {
    let mut r = Report::new();
    let seed = 42;

    let mut ground = figure_preset("fig5").unwrap();
    ground.series.retain(|s| s.target == ModelKind::Fibonacci);
    for s in &mut ground.series {
        s.n_points = vec![400];
    }
    ground.base_seed = seed;
    let rows = run_distance_experiment(&ground).unwrap();
    let bpp = mean_of(&rows, "bpp-vs-fibonacci", |_| true);
    let nbpp = mean_of(&rows, "nbpp-vs-fibonacci", |_| true);
    r.check(bpp < nbpp, format!("(a) N=400 h=0: W(BPP,Fib) {bpp:.1} km < W(NBPP,Fib) {nbpp:.1} km"));

    let orbit = |name: &str, n: Vec<usize>, spo: usize, h: Vec<f64>, g: &[f64], mode| Series {
        name: name.into(),
        source: ModelKind::Bpp,
        target: ModelKind::Orbit,
        n_points: n,
        altitude_km: h,
        gamma_rad: g.iter().map(|d: &f64| d.to_radians()).collect(),
        sats_per_orbit: spo,
        orbit_mode: mode,
        ..Series::default()
    };
    let paper = OrbitMode::PaperLiteral;
    let shell = ExperimentConfig {
        name: "ordering".into(),
        kind: ExperimentKind::Distance,
        series: vec![
            orbit("base", vec![1584], 22, vec![550.0, 1200.0], &[53.0, 87.5], paper),
            orbit("n81", vec![81], 9, vec![550.0], &[53.0], paper),
            orbit("n720", vec![720], 40, vec![550.0], &[53.0], paper),
        ],
        n_iterations: 1000,
        base_seed: seed,
        solver: Solver::Greedy,
        aggregation: Aggregation::IterationMean,
        normalization: Normalization::PerPoint,
    };
    let rows = run_distance_experiment(&shell).unwrap();
    let at = |h: f64, g: f64| mean_of(&rows, "base", |r| r.altitude_km == h && (r.gamma_deg.unwrap() - g).abs() < 1e-9);
    let (g87, g53) = (at(550.0, 87.5), at(550.0, 53.0));
    r.check(g53 < g87, format!("(b) gamma 87.5 -> 53 deg: {g87:.1} -> {g53:.1} km per point"));
    let h1200 = at(1200.0, 53.0);
    r.check(g53 < h1200, format!("(b) h 1200 -> 550 km: {h1200:.1} -> {g53:.1} km per point"));
    let n81 = mean_of(&rows, "n81", |_| true);
    let n720 = mean_of(&rows, "n720", |_| true);
    r.check(
        n720 < n81 && g53 < n720,
        format!("(b) N_P 81 -> 720 -> 1584: {n81:.1} -> {n720:.1} -> {g53:.1} km per point"),
    );
    r.note(format!(
        "unnormalized W_d for N_P 81/720/1584: {:.0} / {:.0} / {:.0} km",
        n81 * 81f64.sqrt(),
        n720 * 720f64.sqrt(),
        g53 * 1584f64.sqrt()
    ));

    let mut reconciled = shell.clone();
    reconciled.series = vec![orbit("base", vec![1584], 22, vec![550.0], &[53.0, 87.5], OrbitMode::Reconciled)];
    let rows = run_distance_experiment(&reconciled).unwrap();
    let at = |g: f64| mean_of(&rows, "base", |r| (r.gamma_deg.unwrap() - g).abs() < 1e-9);
    r.note(format!(
        "great-circle orbit shells, gamma 87.5 -> 53 deg: {:.1} -> {:.1} km per point",
        at(87.5),
        at(53.0)
    ));
    r
}

fn wallis_identity() -> Report {
    let mut r = Report::new();
    let mut worst = 0.0f64;
    for n in 2..=30u32 {
        let m = n - 1;
        let binom: u128 = (1..=m as u128).fold(1u128, |acc, k| acc * (m as u128 + k) / k);
        let oracle = PI * binom as f64 / 4f64.powi(m as i32);
        let got = expected_nn_angle(n as usize).unwrap().value();
        worst = worst.max((got - oracle).abs() / oracle);
    }
    r.check(worst <= 1e-10, format!("n <= 30: max relative error vs binomial form {worst:.2e} (tolerance 1e-10)"));
    for n in [10_000usize, 100_000, 1_000_000] {
        let got = expected_nn_angle(n).unwrap().value();
        let asym = PI / (PI * (n - 1) as f64).sqrt();
        let rel = (got - asym).abs() / asym;
        r.check(rel <= 0.01, format!("n = {n}: relative gap to asymptote {rel:.2e} (tolerance 1e-2)"));
    }
    r
}

fn determinism() -> Report {
    let mut r = Report::new();
    let cfg = figure_preset("fig5").unwrap();
    let csv = || {
        let mut buf = Vec::new();
        run_experiment(&cfg).unwrap().write_csv(&mut buf).unwrap();
        buf
    };
    let (first, second) = (csv(), csv());
    r.check(
        first == second,
        format!("fig5 preset run twice: {} bytes, identical = {}", first.len(), first == second),
    );
    r
}

type Criterion = (&'static str, Duration, fn() -> Report);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("exact-solver oracle equivalence", Duration::from_secs(60), exact_oracle_equivalence),
        ("greedy dominance over exact", Duration::from_secs(300), greedy_dominance),
        ("packing-distance approximation vs Fibonacci lattice", Duration::from_secs(60), packing_approximation),
        ("BPP uniformity, NBPP non-uniformity", Duration::from_secs(10), bpp_uniformity),
        ("orbit geometry", Duration::from_secs(10), orbit_geometry),
        ("distance ordering claims", Duration::from_secs(600), ordering_claims),
        ("Wallis identity and asymptote", Duration::from_secs(1), wallis_identity),
        ("fig5 determinism", Duration::from_secs(120), determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(run));
        let elapsed = start.elapsed();
        let mut report = result.unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            let mut r = Report::new();
            r.check(false, format!("panicked: {msg}"));
            r
        });
        report.check(elapsed <= budget, format!("runtime {:.2?} (budget {budget:.0?})", elapsed));
        let verdict = if report.passed { "PASS" } else { "FAIL" };
        println!("{verdict} [{}] {name}", i + 1);
        for line in &report.detail {
            println!("       {line}");
        }
        if !report.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
