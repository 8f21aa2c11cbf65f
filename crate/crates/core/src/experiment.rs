//! Convergence experiments: data generation, the `λ_n` schedule, parallel
//! sweeps over `(n, seed)` cells, and log-log rate fitting.

use std::io::Write;
use std::time::Instant;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::estimator::{fit, fit_feature_space, Dataset, DENSE_MAX_N};
use crate::filters::FilterFamily;
use crate::heat_kernel::{truncation_for_tolerance, HeatKernel, HeatKernelParams, DEFAULT_TAIL_TOL};
use crate::manifold::{build_spectral_basis, sample_uniform, ManifoldKind, ManifoldModel, SpectralBasis};
use crate::power_space::{
    error_norm_sq, make_source_target, project_estimate, DiffusionSpectrum, NoiseModel, PowerCoefficients,
    TargetSpec,
};
use crate::rng::{derive_seed, rng_for, stream};

/// How each cell computes its estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FitRoute {
    /// Eigendecomposition of the `n × n` Gram matrix.
    Dense,
    /// Eigendecomposition in the truncated eigenbasis; same estimate, linear in `n`.
    #[default]
    Feature,
}

impl std::str::FromStr for FitRoute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dense" => Ok(FitRoute::Dense),
            "feature" => Ok(FitRoute::Feature),
            other => Err(Error::Config(format!("unknown fit route '{other}' (expected dense or feature)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub manifold: ManifoldKind,
    pub t: f64,
    pub filter: FilterFamily,
    pub beta: f64,
    pub gamma: f64,
    pub radius: f64,
    pub sigma: f64,
    pub n_grid: Vec<usize>,
    pub seeds: u64,
    /// Constant `c` in `λ_n = c((log n)^{m/2}/n)^{1/β}`.
    pub c: f64,
    pub k_target: usize,
    pub target_seed: u64,
    /// Base seed for the data streams; cell seeds are derived from it.
    pub data_seed: u64,
    pub tail_tol: f64,
    pub route: FitRoute,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            manifold: ManifoldKind::Circle,
            t: 0.5,
            filter: FilterFamily::Tikhonov,
            beta: 0.5,
            gamma: 0.0,
            radius: 1.0,
            sigma: 1.0,
            n_grid: vec![256, 512, 1024, 2048, 4096, 8192],
            seeds: 20,
            c: 1.0,
            k_target: 200,
            target_seed: 0,
            data_seed: 1,
            tail_tol: DEFAULT_TAIL_TOL,
            route: FitRoute::Feature,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.t > 0.0 && self.t.is_finite()) {
            return bad(format!("t must be positive, got {}", self.t));
        }
        if !(self.gamma >= 0.0 && self.gamma < self.beta && self.beta <= 1.0) {
            return bad(format!("need 0 ≤ γ < β ≤ 1, got γ = {}, β = {}", self.gamma, self.beta));
        }
        if !(self.radius > 0.0) {
            return bad(format!("R must be positive, got {}", self.radius));
        }
        if !(self.sigma >= 0.0) {
            return bad(format!("σ must be non-negative, got {}", self.sigma));
        }
        if self.n_grid.is_empty() {
            return bad("n-grid is empty".into());
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("n-grid must be strictly ascending".into());
        }
        if self.n_grid[0] < 3 {
            return bad("every n must be at least 3".into());
        }
        if self.seeds < 1 {
            return bad("seeds must be at least 1".into());
        }
        if !(self.c > 0.0) {
            return bad(format!("schedule constant c must be positive, got {}", self.c));
        }
        if self.k_target == 0 {
            return bad("K_target must be at least 1".into());
        }
        if !(self.tail_tol > 0.0) {
            return bad("tail tolerance must be positive".into());
        }
        if self.route == FitRoute::Dense && *self.n_grid.last().unwrap() > DENSE_MAX_N {
            return bad(format!("dense route supports n ≤ {DENSE_MAX_N}"));
        }
        Ok(())
    }

    pub fn model(&self) -> ManifoldModel {
        ManifoldModel::new(self.manifold)
    }
}

/// `λ_n = c((log n)^{m/2}/n)^{1/β}`.
pub fn lambda_schedule(n: usize, m: usize, beta: f64, c: f64) -> Result<f64> {
    if n < 3 {
        return Err(param(format!("schedule needs n ≥ 3, got {n}")));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(param(format!("β must lie in (0, 1], got {beta}")));
    }
    if !(c > 0.0) {
        return Err(param(format!("c must be positive, got {c}")));
    }
    Ok(c * rate_abscissa(n as f64, m).powf(1.0 / beta))
}

/// `(log n)^{m/2}/n`.
pub fn rate_abscissa(n: f64, m: usize) -> f64 {
    n.ln().powf(m as f64 / 2.0) / n
}

/// Uniform inputs and `y_i = f*(x_i) + σ̄ g_i`.
pub fn generate_dataset(
    target: &PowerCoefficients,
    basis: &SpectralBasis,
    n: usize,
    noise: NoiseModel,
    seed: u64,
) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::EmptyInput("dataset size must be at least 1"));
    }
    if basis.len() < target.len() {
        return Err(Error::InsufficientBasis { required: target.len(), available: basis.len() });
    }
    let points = sample_uniform(basis.model(), n, seed)?;
    let sigma = noise.sigma_bar();
    let mut rng = rng_for(seed, stream::NOISE);
    let k = basis.len();
    let mut f = vec![0.0; k];
    let mut y = Vec::with_capacity(n);
    for x in &points {
        basis.eval_all(x, &mut f)?;
        let clean: f64 = target.coeffs().iter().zip(&f).map(|(a, v)| a * v).sum();
        let g: f64 = StandardNormal.sample(&mut rng);
        y.push(clean + sigma * g);
    }
    Dataset::new(points, y)
}

/// One CSV row of a convergence sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub manifold: ManifoldKind,
    pub m: usize,
    pub t: f64,
    pub filter: String,
    pub beta: f64,
    pub gamma: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub sigma: f64,
    pub n: usize,
    pub seed: u64,
    pub lambda: f64,
    pub error_sq: f64,
    pub status: String,
    pub runtime_ms: f64,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Seed of the data stream for cell `(n, seed)`.
pub fn cell_seed(data_seed: u64, n: usize, seed: u64) -> u64 {
    derive_seed(derive_seed(data_seed, n as u64), seed)
}

/// Kernel and target shared by every cell of a sweep.
pub struct SweepSetup {
    pub kernel: HeatKernel,
    /// Basis covering the target, used to generate responses.
    pub target_basis: SpectralBasis,
    pub target: PowerCoefficients,
}

pub fn sweep_setup(config: &ExperimentConfig) -> Result<SweepSetup> {
    let model = config.model();
    let params = HeatKernelParams::new(config.t, config.tail_tol)?;
    let k_tol = truncation_for_tolerance(model, config.t, config.tail_tol)?;
    let full = build_spectral_basis(model, k_tol.max(config.k_target))?;
    let spectrum = DiffusionSpectrum::new(&full, config.t);
    let target = make_source_target(
        &spectrum,
        &TargetSpec {
            beta: config.beta,
            radius: config.radius,
            k_target: config.k_target,
            seed: config.target_seed,
        },
    )?;
    // A mode with s_k below ε²·s_0 moves its fitted coefficient by at most
    // a_k s_k/λ, far under the eigensolver's resolution, so the fit skips it.
    let floor = f64::EPSILON * f64::EPSILON * spectrum.weight(0);
    let live = (0..full.len()).take_while(|&k| spectrum.weight(k) >= floor).count().max(1);
    let kernel = HeatKernel::new(full.truncated(live.max(k_tol).min(full.len()))?, params);
    Ok(SweepSetup { kernel, target_basis: full, target })
}

pub fn run_cell(config: &ExperimentConfig, setup: &SweepSetup, n: usize, seed: u64) -> SweepRow {
    let start = Instant::now();
    let m = config.model().dim();
    let lambda = lambda_schedule(n, m, config.beta, config.c).unwrap_or(f64::NAN);
    let outcome = (|| -> Result<f64> {
        let noise = NoiseModel::gaussian(config.sigma)?;
        let data = generate_dataset(&setup.target, &setup.target_basis, n, noise, cell_seed(config.data_seed, n, seed))?;
        let estimate = match config.route {
            FitRoute::Feature => fit_feature_space(&setup.kernel, &data, config.filter, lambda)?,
            FitRoute::Dense => {
                let gram = setup.kernel.matrix(&data.points)?;
                let est = fit(&gram, &data, config.filter, lambda, config.t)?;
                project_estimate(&est, &setup.kernel, setup.kernel.basis().len())?
            }
        };
        error_norm_sq(&estimate, &setup.target, config.gamma)
    })();
    let (error_sq, status) = match outcome {
        Ok(e) => (e, "ok".to_string()),
        Err(e) => (f64::NAN, format!("error: {e}")),
    };
    SweepRow {
        manifold: config.manifold,
        m,
        t: config.t,
        filter: config.filter.to_string(),
        beta: config.beta,
        gamma: config.gamma,
        radius: config.radius,
        sigma: config.sigma,
        n,
        seed,
        lambda,
        error_sq,
        status,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

/// Every `(n, seed)` cell, run in parallel and returned sorted by `(n, seed)`.
pub fn run_convergence_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let setup = sweep_setup(config)?;
    let cells: Vec<(usize, u64)> = config
        .n_grid
        .iter()
        .flat_map(|&n| (0..config.seeds).map(move |s| (n, s)))
        .collect();
    let mut rows: Vec<SweepRow> = cells.par_iter().map(|&(n, s)| run_cell(config, &setup, n, s)).collect();
    rows.sort_by_key(|r| (r.n, r.seed));
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Data(format!("CSV write failed: {e}"));
    if rows.is_empty() {
        w.write_record(CSV_HEADER).map_err(io)?;
    }
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Data(format!("CSV write failed: {e}")))?;
    Ok(())
}

pub const CSV_HEADER: [&str; 14] = [
    "manifold", "m", "t", "filter", "beta", "gamma", "R", "sigma", "n", "seed", "lambda", "error_sq", "status",
    "runtime_ms",
];

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<SweepRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(|e| Error::Data(format!("CSV read failed: {e}"))))
        .collect()
}

/// Median over seeds of the `ok` rows at one `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSummary {
    pub n: usize,
    pub median_error_sq: f64,
    /// Spread across seeds: 10% and 90% quantiles, linearly interpolated.
    pub q10_error_sq: f64,
    pub q90_error_sq: f64,
    pub ok_cells: usize,
}

fn sorted_quantile(v: &[f64], q: f64) -> f64 {
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

pub fn level_medians(rows: &[SweepRow]) -> Vec<LevelSummary> {
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    ns.into_iter()
        .filter_map(|n| {
            let mut v: Vec<f64> = rows
                .iter()
                .filter(|r| r.n == n && r.is_ok() && r.error_sq.is_finite())
                .map(|r| r.error_sq)
                .collect();
            if v.is_empty() {
                return None;
            }
            v.sort_by(f64::total_cmp);
            Some(LevelSummary {
                n,
                median_error_sq: sorted_quantile(&v, 0.5),
                q10_error_sq: sorted_quantile(&v, 0.1),
                q90_error_sq: sorted_quantile(&v, 0.9),
                ok_cells: v.len(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub cells: usize,
}

/// Least-squares slope of `log median error²` against `log((log n)^{m/2}/n)`.
pub fn fit_rate(rows: &[SweepRow], m: usize) -> Result<RateFit> {
    let levels = level_medians(rows);
    let pts: Vec<(f64, f64)> = levels
        .iter()
        .filter(|l| l.median_error_sq > 0.0)
        .map(|l| (rate_abscissa(l.n as f64, m).ln(), l.median_error_sq.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "rate fit needs at least 3 sample sizes with usable cells, got {}",
            pts.len()
        )));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(RateFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        cells: levels.iter().map(|l| l.ok_cells).sum(),
    })
}

/// Adjacent pairs where the median error grows with `n`.
pub fn monotonicity_inversions(levels: &[LevelSummary]) -> usize {
    levels.windows(2).filter(|w| w[1].median_error_sq > w[0].median_error_sq).count()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationScore {
    pub c: f64,
    /// Mean over `n` of `log median error²`.
    pub mean_log_error: f64,
}

/// Score each schedule constant on data seeds disjoint from `config.data_seed`
/// and return the scores with the best `c` first.
pub fn calibrate_c(config: &ExperimentConfig, candidates: &[f64], calibration_seed: u64) -> Result<Vec<CalibrationScore>> {
    if candidates.is_empty() {
        return Err(param("no candidate constants to calibrate"));
    }
    let base = ExperimentConfig { data_seed: derive_seed(calibration_seed, 0xca11), ..config.clone() };
    if base.data_seed == config.data_seed {
        return Err(param("calibration seeds collide with the sweep seeds"));
    }
    let mut scores = candidates
        .iter()
        .map(|&c| {
            let rows = run_convergence_sweep(&ExperimentConfig { c, ..base.clone() })?;
            let levels = level_medians(&rows);
            if levels.is_empty() || levels.iter().any(|l| !(l.median_error_sq > 0.0)) {
                return Err(Error::InsufficientData(format!("calibration at c = {c} produced no usable cells")));
            }
            let mean_log_error = levels.iter().map(|l| l.median_error_sq.ln()).sum::<f64>() / levels.len() as f64;
            Ok(CalibrationScore { c, mean_log_error })
        })
        .collect::<Result<Vec<_>>>()?;
    scores.sort_by(|a, b| a.mean_log_error.total_cmp(&b.mean_log_error));
    Ok(scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn row(n: usize, seed: u64, e: f64) -> SweepRow {
        SweepRow {
            manifold: ManifoldKind::Circle,
            m: 1,
            t: 0.5,
            filter: "tikhonov".into(),
            beta: 0.5,
            gamma: 0.0,
            radius: 1.0,
            sigma: 1.0,
            n,
            seed,
            lambda: 0.1,
            error_sq: e,
            status: "ok".into(),
            runtime_ms: 0.0,
        }
    }

    #[test]
    fn schedule_examples() {
        let e2 = 2f64.exp();
        assert_relative_eq!(rate_abscissa(e2, 2), 2.0 / e2, max_relative = 1e-15);
        for n in [7usize, 8, 100] {
            let want = (n as f64).ln() / n as f64;
            assert_relative_eq!(lambda_schedule(n, 2, 1.0, 1.0).unwrap(), want, max_relative = 1e-15);
            assert_relative_eq!(lambda_schedule(n, 2, 0.5, 1.0).unwrap(), want * want, max_relative = 1e-14);
        }
        let grid = [8usize, 16, 64, 256, 1024, 8192];
        for m in [1, 2] {
            for w in grid.windows(2) {
                assert!(lambda_schedule(w[1], m, 0.5, 1.0).unwrap() < lambda_schedule(w[0], m, 0.5, 1.0).unwrap());
            }
        }
        assert!(lambda_schedule(2, 1, 0.5, 1.0).is_err());
    }

    #[test]
    fn config_validation() {
        let ok = ExperimentConfig::default();
        ok.validate().unwrap();
        let bad = ExperimentConfig { gamma: 0.5, ..ok.clone() };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = ExperimentConfig { n_grid: vec![512, 256], ..ok.clone() };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig { seeds: 0, ..ok.clone() };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig { beta: 1.2, ..ok };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn dataset_generation() {
        let basis = build_spectral_basis(ManifoldModel::circle(), 30).unwrap();
        let s = DiffusionSpectrum::new(&basis, 0.5);
        let target = make_source_target(&s, &TargetSpec { beta: 0.5, radius: 1.0, k_target: 30, seed: 0 }).unwrap();
        let clean = generate_dataset(&target, &basis, 50, NoiseModel::gaussian(0.0).unwrap(), 3).unwrap();
        for (x, y) in clean.points.iter().zip(&clean.targets) {
            assert!((target.eval(&basis, x).unwrap() - y).abs() < 1e-14);
        }
        let a = generate_dataset(&target, &basis, 50, NoiseModel::gaussian(1.0).unwrap(), 3).unwrap();
        let b = generate_dataset(&target, &basis, 50, NoiseModel::gaussian(1.0).unwrap(), 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.points, clean.points);
    }

    #[test]
    fn noise_variance_matches() {
        let basis = build_spectral_basis(ManifoldModel::sphere2(), 4).unwrap();
        let s = DiffusionSpectrum::new(&basis, 0.5);
        let zero = PowerCoefficients::zeros(s, 1).unwrap();
        let sigma = 0.7;
        let n = 20_000;
        let d = generate_dataset(&zero, &basis, n, NoiseModel::gaussian(sigma).unwrap(), 9).unwrap();
        let mean = d.targets.iter().sum::<f64>() / n as f64;
        let var = d.targets.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let s2 = sigma * sigma;
        assert!((var - s2).abs() < 3.0 * (2.0 / n as f64).sqrt() * s2, "{var}");
    }

    #[test]
    fn rate_fit_on_exact_power_law() {
        for m in [1, 2] {
            let rows: Vec<SweepRow> = [256usize, 512, 1024, 2048]
                .iter()
                .flat_map(|&n| (0..3).map(move |s| row(n, s, rate_abscissa(n as f64, m))))
                .collect();
            let f = fit_rate(&rows, m).unwrap();
            assert!((f.slope - 1.0).abs() < 1e-9);
            assert!(f.r_squared > 1.0 - 1e-12);
        }
        let rows: Vec<SweepRow> = [10usize, 20, 40].iter().map(|&n| row(n, 0, 0.3)).collect();
        let f = fit_rate(&rows, 1).unwrap();
        assert!(f.slope.abs() < 1e-12);
        let two: Vec<SweepRow> = [10usize, 20].iter().map(|&n| row(n, 0, 0.3)).collect();
        assert!(matches!(fit_rate(&two, 1), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn medians_skip_failed_cells() {
        let mut rows = vec![row(10, 0, 1.0), row(10, 1, 3.0), row(10, 2, 100.0)];
        rows[2].status = "error: boom".into();
        let l = level_medians(&rows);
        assert_eq!(l[0].median_error_sq, 2.0);
        assert_eq!(l[0].ok_cells, 2);
        assert!((l[0].q10_error_sq - 1.2).abs() < 1e-12);
        assert!((l[0].q90_error_sq - 2.8).abs() < 1e-12);
    }

    #[test]
    fn small_sweep_is_reproducible() {
        let cfg = ExperimentConfig { n_grid: vec![32, 64, 128], seeds: 3, k_target: 40, ..Default::default() };
        let a = run_convergence_sweep(&cfg).unwrap();
        let b = run_convergence_sweep(&cfg).unwrap();
        assert_eq!(a.len(), 9);
        assert!(a.iter().all(|r| r.is_ok()));
        let strip = |rows: &[SweepRow]| -> Vec<SweepRow> {
            rows.iter().map(|r| SweepRow { runtime_ms: 0.0, ..r.clone() }).collect()
        };
        assert_eq!(strip(&a), strip(&b));
        let mut buf = Vec::new();
        write_csv(&a, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(&CSV_HEADER.join(",")));
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 9);
    }

    #[test]
    fn dense_and_feature_routes_agree_per_cell() {
        let cfg = ExperimentConfig { n_grid: vec![48], seeds: 2, k_target: 30, ..Default::default() };
        let dense = ExperimentConfig { route: FitRoute::Dense, ..cfg.clone() };
        let a = run_convergence_sweep(&cfg).unwrap();
        let b = run_convergence_sweep(&dense).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.error_sq - y.error_sq).abs() <= 1e-8 * x.error_sq.max(1e-12), "{} vs {}", x.error_sq, y.error_sq);
        }
    }

    #[test]
    fn noiseless_cell_beats_noisy_median() {
        let cfg = ExperimentConfig { n_grid: vec![256], seeds: 5, k_target: 60, ..Default::default() };
        let noisy = run_convergence_sweep(&cfg).unwrap();
        assert!(noisy[0].is_ok(), "{}", noisy[0].status);
        let med = level_medians(&noisy)[0].median_error_sq;
        let clean_cfg = ExperimentConfig {
            sigma: 0.0,
            filter: FilterFamily::SpectralCutoff,
            c: 1e-6,
            seeds: 1,
            ..cfg
        };
        let clean = run_convergence_sweep(&clean_cfg).unwrap();
        assert!(clean[0].is_ok(), "{}", clean[0].status);
        assert!(clean[0].error_sq < med, "{} vs {med}", clean[0].error_sq);
    }

    #[test]
    fn inversions_counted() {
        let l = |n, e| LevelSummary { n, median_error_sq: e, q10_error_sq: e, q90_error_sq: e, ok_cells: 1 };
        assert_eq!(monotonicity_inversions(&[l(1, 3.0), l(2, 2.0), l(3, 2.5), l(4, 1.0)]), 1);
    }
}
