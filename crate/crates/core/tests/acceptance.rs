//! End-to-end acceptance checks. Each test prints one PASS/FAIL line with the
//! measured quantity, its threshold and the runtime against its budget.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use heatreg_core::estimator::{empirical_covariance_in_basis, fit_coefficients, fit_tikhonov_direct};
use heatreg_core::experiment::{
    calibrate_c, fit_rate, level_medians, run_convergence_sweep, ExperimentConfig, RateFit, SweepRow,
};
use heatreg_core::filters::{audit_axioms, log_grid, qualification_margin, FilterFamily};
use heatreg_core::heat_kernel::{circle_kernel_closed_form, sphere_kernel_addition, HeatKernel, HeatKernelParams};
use heatreg_core::manifold::{build_spectral_basis, sample_uniform, ManifoldKind, ManifoldModel, Point};
use heatreg_core::minimax::{build_hard_family, gilbert_varshamov, kl_divergence, kl_monte_carlo, pairwise};
use heatreg_core::power_space::{
    approximation_error_check, effdim_sweep, make_source_target, whitened_deviation_norm, DiffusionSpectrum,
    PowerCoefficients, TargetSpec,
};
use heatreg_core::rng::rng_for;
use rand::Rng;

fn report(id: u32, name: &str, pass: bool, detail: &str, elapsed: Duration, budget_s: f64) -> bool {
    let in_time = elapsed.as_secs_f64() <= budget_s;
    let ok = pass && in_time;
    println!(
        "[{id}] {name}: {} ({detail}; {:.2}s of {budget_s}s budget)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    ok
}

#[test]
fn kernel_matches_closed_forms() {
    let start = Instant::now();
    let times = [0.1, 0.5, 1.0, 5.0];
    let mut worst_circle = 0.0f64;
    let mut worst_sphere = 0.0f64;
    for &t in &times {
        let params = HeatKernelParams::with_time(t).unwrap();
        let circle = HeatKernel::for_tolerance(ManifoldModel::circle(), params).unwrap();
        let sphere = HeatKernel::for_tolerance(ManifoldModel::sphere2(), params).unwrap();
        let north = Point::Sphere([0.0, 0.0, 1.0]);
        for i in 0..100 {
            let sep = std::f64::consts::PI * i as f64 / 99.0;
            let x = Point::circle(0.3);
            let y = Point::circle(0.3 + sep);
            let mercer = circle.eval(&x, &y).unwrap();
            let closed = circle_kernel_closed_form(t, 0.3, 0.3 + sep, 50).unwrap();
            worst_circle = worst_circle.max((mercer - closed).abs());

            let (s, c) = sep.sin_cos();
            let y = Point::on_sphere([s * 0.6, s * 0.8, c]).unwrap();
            let harmonic = sphere.eval(&north, &y).unwrap();
            let addition = sphere_kernel_addition(t, c, 400).unwrap();
            worst_sphere = worst_sphere.max((harmonic - addition).abs());
        }
    }
    let pass = worst_circle < 1e-10 && worst_sphere < 1e-10;
    let detail = format!("circle max err {worst_circle:.2e}, sphere max err {worst_sphere:.2e}, need < 1e-10");
    assert!(report(1, "kernel oracle agreement", pass, &detail, start.elapsed(), 10.0));
}

#[test]
fn tikhonov_fit_matches_linear_solve() {
    let start = Instant::now();
    let mut rng = rng_for(2024, 1);
    let mut worst = 0.0f64;
    for inst in 0..50u64 {
        let n = [4usize, 16, 64][inst as usize % 3];
        let kind = ManifoldKind::ALL[(inst as usize / 3) % 3];
        let model = ManifoldModel::new(kind);
        let t = rng.random_range(0.1..2.0);
        let lambda = 10f64.powf(rng.random_range(-5.0..0.0));
        let kernel = HeatKernel::for_tolerance(model, HeatKernelParams::with_time(t).unwrap()).unwrap();
        let points = sample_uniform(model, n, inst).unwrap();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let gram = kernel.matrix(&points).unwrap();
        let spectral = fit_coefficients(&gram, &y, FilterFamily::Tikhonov, lambda).unwrap();
        let direct = fit_tikhonov_direct(&gram, &y, lambda).unwrap();
        let scale = direct.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let diff = spectral.iter().zip(&direct).fold(0.0f64, |a, (p, q)| a.max((p - q).abs()));
        worst = worst.max(diff / scale);
    }
    let detail = format!("max relative deviation {worst:.2e}, need ≤ 1e-8");
    assert!(report(2, "estimator equivalence", worst <= 1e-8, &detail, start.elapsed(), 10.0));
}

#[test]
fn approximation_error_inequality_holds() {
    let start = Instant::now();
    let params = HeatKernelParams::default();
    let basis = build_spectral_basis(ManifoldModel::circle(), 200).unwrap();
    let spectrum = DiffusionSpectrum::new(&basis, params.t);
    let mut checks = 0;
    let mut violations = 0;
    let mut worst = 0.0f64;
    for (beta, gamma) in [(1.0, 0.0), (0.5, 0.0), (0.8, 0.4)] {
        for seed in 0..10 {
            let target = make_source_target(&spectrum, &TargetSpec { beta, radius: 1.0, k_target: 200, seed }).unwrap();
            for j in 1..=12 {
                let lambda = 10f64.powf(-(j as f64) / 2.0);
                for family in [FilterFamily::Tikhonov, FilterFamily::SpectralCutoff] {
                    let c = approximation_error_check(&target, family, lambda, gamma, beta).unwrap();
                    checks += 1;
                    if !c.holds() {
                        violations += 1;
                    }
                    if c.rhs > 0.0 {
                        worst = worst.max(c.lhs / c.rhs);
                    }
                }
            }
        }
    }
    let detail = format!("{violations} violations in {checks} checks, worst lhs/rhs {worst:.4}");
    assert!(report(3, "approximation error inequality", violations == 0 && checks == 720, &detail, start.elapsed(), 5.0));
}

#[test]
fn effective_dimension_ratio_is_stable() {
    let start = Instant::now();
    let lambdas: Vec<f64> = (1..=6).map(|j| 10f64.powi(-j)).collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for model in [ManifoldModel::sphere2(), ManifoldModel::torus2()] {
        let rows = effdim_sweep(model, 0.5, &lambdas).unwrap();
        let max = rows.iter().map(|r| r.bound_ratio).fold(f64::NEG_INFINITY, f64::max);
        let min = rows.iter().map(|r| r.bound_ratio).fold(f64::INFINITY, f64::min);
        pass &= max / min <= 3.0;
        parts.push(format!("{}: max/min {:.3}, D = {:.4}", model.kind, max / min, max));
    }
    let detail = format!("{}, need max/min ≤ 3", parts.join("; "));
    assert!(report(4, "effective-dimension bound", pass, &detail, start.elapsed(), 5.0));
}

struct RateRuns {
    circle_c: f64,
    sphere_c: f64,
    circle: Vec<SweepRow>,
    sphere: Vec<SweepRow>,
    circle_gamma: Vec<SweepRow>,
    elapsed: Duration,
}

const SCHEDULE_CANDIDATES: [f64; 4] = [0.1, 0.3, 1.0, 3.0];
const CALIBRATION_SEED: u64 = 77;

/// The headline sweeps, shared between the two rate checks so their
/// runtime counts against one budget.
fn rate_runs() -> &'static RateRuns {
    static RUNS: OnceLock<RateRuns> = OnceLock::new();
    RUNS.get_or_init(|| {
        let start = Instant::now();
        let circle_cfg = ExperimentConfig::default();
        let sphere_cfg = ExperimentConfig { manifold: ManifoldKind::Sphere2, ..ExperimentConfig::default() };
        let calib = |cfg: &ExperimentConfig| {
            let quick = ExperimentConfig { seeds: 5, ..cfg.clone() };
            calibrate_c(&quick, &SCHEDULE_CANDIDATES, CALIBRATION_SEED).unwrap()[0].c
        };
        let circle_c = calib(&circle_cfg);
        let sphere_c = calib(&sphere_cfg);
        let circle = run_convergence_sweep(&ExperimentConfig { c: circle_c, ..circle_cfg.clone() }).unwrap();
        let sphere = run_convergence_sweep(&ExperimentConfig { c: sphere_c, ..sphere_cfg }).unwrap();
        let gamma_cfg = ExperimentConfig { gamma: 0.25, ..circle_cfg };
        let gamma_c = calib(&gamma_cfg);
        let circle_gamma = run_convergence_sweep(&ExperimentConfig { c: gamma_c, ..gamma_cfg }).unwrap();
        RateRuns { circle_c, sphere_c, circle, sphere, circle_gamma, elapsed: start.elapsed() }
    })
}

fn describe(fit: &RateFit, rows: &[SweepRow]) -> String {
    let ok = rows.iter().filter(|r| r.is_ok()).count();
    format!("slope {:.3}, r² {:.3}, {ok}/{} cells ok", fit.slope, fit.r_squared, rows.len())
}

#[test]
fn headline_rate_matches_exponent() {
    let runs = rate_runs();
    let circle = fit_rate(&runs.circle, 1).unwrap();
    let sphere = fit_rate(&runs.sphere, 2).unwrap();
    let all_ok = runs.circle.len() == 120
        && runs.sphere.len() == 120
        && runs.circle.iter().chain(&runs.sphere).all(|r| r.is_ok());
    let pass = all_ok
        && (0.75..=1.25).contains(&circle.slope)
        && circle.r_squared >= 0.9
        && (0.75..=1.25).contains(&sphere.slope);
    for (name, rows) in [("circle", &runs.circle), ("sphere2", &runs.sphere)] {
        for l in level_medians(rows) {
            println!("    {name} n={:5} median error² {:.4e}", l.n, l.median_error_sq);
        }
    }
    let detail = format!(
        "circle c={} {}; sphere2 c={} {}; need slope in [0.75, 1.25], circle r² ≥ 0.9",
        runs.circle_c,
        describe(&circle, &runs.circle),
        runs.sphere_c,
        describe(&sphere, &runs.sphere)
    );
    assert!(report(5, "headline convergence rate", pass, &detail, runs.elapsed, 900.0));
}

#[test]
fn weighted_norm_rate_matches_exponent() {
    let runs = rate_runs();
    let fit = fit_rate(&runs.circle_gamma, 1).unwrap();
    for l in level_medians(&runs.circle_gamma) {
        println!("    circle γ=0.25 n={:5} median error² {:.4e}", l.n, l.median_error_sq);
    }
    let pass = runs.circle_gamma.iter().all(|r| r.is_ok()) && (0.3..=0.7).contains(&fit.slope);
    let detail = format!("{}, target 0.5, need slope in [0.3, 0.7]", describe(&fit, &runs.circle_gamma));
    assert!(report(6, "γ-norm convergence rate", pass, &detail, runs.elapsed, 900.0));
}

#[test]
fn filter_axioms_and_qualification() {
    let start = Instant::now();
    let lambdas = log_grid(1e-6, 1.0, 60);
    let ss = log_grid(1e-8, 1.0, 400);
    let mut axioms_ok = true;
    let mut parts = Vec::new();
    for family in [FilterFamily::Tikhonov, FilterFamily::SpectralCutoff, FilterFamily::Landweber { steps: None }] {
        let checks = audit_axioms(family, &family.audit_lambdas(&lambdas), &ss).unwrap();
        let worst = checks.iter().map(|c| c.worst_violation).fold(f64::NEG_INFINITY, f64::max);
        axioms_ok &= checks.iter().all(|c| c.holds());
        parts.push(format!("{family} worst excess {worst:.1e}"));
    }
    let tik_1 = qualification_margin(FilterFamily::Tikhonov, 1.0, &lambdas, &ss).unwrap();
    let tik_15 = qualification_margin(FilterFamily::Tikhonov, 1.5, &lambdas, &ss).unwrap();
    let cut_5 = qualification_margin(FilterFamily::SpectralCutoff, 5.0, &lambdas, &ss).unwrap();
    let pass = axioms_ok && tik_1 <= 1.0 && tik_15 > 1.0 && cut_5 <= 1.0;
    let detail = format!(
        "{}; Tikhonov margin α=1 {tik_1:.4}, α=1.5 {tik_15:.3e}; cut-off α=5 {cut_5:.4}",
        parts.join(", ")
    );
    assert!(report(7, "filter axioms and qualification", pass, &detail, start.elapsed(), 5.0));
}

#[test]
fn packing_machinery() {
    let start = Instant::now();
    let code = gilbert_varshamov(16, 0).unwrap();
    let code_ok = code.strings().len() >= 4 && code.min_distance() >= 2;

    let basis = build_spectral_basis(ManifoldModel::circle(), 64).unwrap();
    let spectrum = DiffusionSpectrum::new(&basis, 0.5);
    let mut worst_identity = 0.0f64;
    for gamma in [0.0, 0.25, 0.5] {
        let fam = build_hard_family(&spectrum, gamma, 0.05, code.clone()).unwrap();
        for p in pairwise(&fam).unwrap() {
            worst_identity = worst_identity.max((p.distance_sq - 0.05 * p.hamming as f64).abs());
        }
    }

    let fam = build_hard_family(&spectrum, 0.0, 0.05, code.clone()).unwrap();
    let f = &fam.members[1];
    let f0: &PowerCoefficients = &fam.members[0];
    let (n, sigma) = (100, 0.5);
    let exact = kl_divergence(f, f0, n, sigma).unwrap();
    let (mc, se) = kl_monte_carlo(f, f0, &basis, n, sigma, 1_000_000, 3).unwrap();
    let rel = (mc - exact).abs() / exact;
    let pass = code_ok && worst_identity <= 1e-12 && rel <= 0.05;
    let detail = format!(
        "{} strings at min distance {}, packing identity err {worst_identity:.1e}, KL exact {exact:.4} vs MC {mc:.4} ± {se:.4} (rel {rel:.4})",
        code.strings().len(),
        code.min_distance()
    );
    assert!(report(8, "packing machinery", pass, &detail, start.elapsed(), 60.0));
}

#[test]
fn whitened_deviation_concentrates() {
    let start = Instant::now();
    let model = ManifoldModel::circle();
    let kernel = HeatKernel::for_tolerance(model, HeatKernelParams::default()).unwrap();
    let spectrum = DiffusionSpectrum::from_kernel(&kernel);
    let k = kernel.basis().len();
    let lambda = 1e-2;
    let median = |n: usize| {
        let mut v: Vec<f64> = (0..20u64)
            .map(|seed| {
                let pts = sample_uniform(model, n, 1000 + seed).unwrap();
                let m = empirical_covariance_in_basis(&kernel, &pts, k).unwrap();
                whitened_deviation_norm(&m, &spectrum, lambda).unwrap()
            })
            .collect();
        v.sort_by(f64::total_cmp);
        0.5 * (v[9] + v[10])
    };
    let small = median(256);
    let large = median(4096);
    let detail = format!("median n=256 {small:.4}, n=4096 {large:.4}, ratio {:.3}, need < 0.6", large / small);
    assert!(report(9, "whitened deviation concentration", large < 0.6 * small, &detail, start.elapsed(), 60.0));
}
