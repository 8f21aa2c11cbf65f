//! Packing constructions for minimax lower bounds: binary codes with large
//! pairwise Hamming distance, the induced family of hard regression targets,
//! Kullback–Leibler divergences between the Gaussian regression laws, and an
//! audit of the two hypotheses a Fano/Tsybakov-type reduction needs.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::manifold::{sample_uniform, SpectralBasis, WeylEnvelope};
use crate::power_space::{power_norm_sq, DiffusionSpectrum, PowerCoefficients};
use crate::rng::{derive_seed, rng_for, stream};

/// Random draws allowed before the code search gives up.
pub const DRAW_BUDGET: usize = 1_000_000;

/// Largest block size accepted; the target count `2^{⌈k/8⌉}` must stay small.
pub const MAX_CODE_LEN: usize = 160;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryCode {
    k: usize,
    strings: Vec<Vec<bool>>,
}

impl BinaryCode {
    pub fn k(&self) -> usize {
        self.k
    }

    /// All strings; the first is all zeros.
    pub fn strings(&self) -> &[Vec<bool>] {
        &self.strings
    }

    /// Number of strings besides the all-zero one.
    pub fn num_alternatives(&self) -> usize {
        self.strings.len() - 1
    }

    pub fn min_distance(&self) -> usize {
        let mut best = usize::MAX;
        for i in 0..self.strings.len() {
            for j in i + 1..self.strings.len() {
                best = best.min(hamming(&self.strings[i], &self.strings[j]));
            }
        }
        best
    }
}

pub fn hamming(a: &[bool], b: &[bool]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Minimum Hamming distance `⌈k/8⌉` required between code words.
pub fn required_distance(k: usize) -> usize {
    k.div_ceil(8)
}

/// Greedy randomized search for `2^{⌈k/8⌉}` strings of length `k` at
/// pairwise distance `≥ k/8`, starting from the all-zero string.
pub fn gilbert_varshamov(k: usize, seed: u64) -> Result<BinaryCode> {
    gilbert_varshamov_with_budget(k, seed, DRAW_BUDGET)
}

pub fn gilbert_varshamov_with_budget(k: usize, seed: u64, budget: usize) -> Result<BinaryCode> {
    if k < 8 {
        return Err(param(format!("code length must be at least 8, got {k}")));
    }
    if k > MAX_CODE_LEN {
        return Err(param(format!("code length {k} exceeds the supported maximum {MAX_CODE_LEN}")));
    }
    let wanted = 1usize << required_distance(k);
    let d = required_distance(k);
    let mut rng = rng_for(seed, stream::CODE);
    let mut strings = vec![vec![false; k]];
    let mut draws = 0;
    while strings.len() < wanted {
        if draws == budget {
            return Err(Error::ConstructionFailure {
                achieved: strings.len(),
                wanted,
                budget,
            });
        }
        draws += 1;
        let cand: Vec<bool> = (0..k).map(|_| rng.random()).collect();
        if strings.iter().all(|s| hamming(s, &cand) >= d) {
            strings.push(cand);
        }
    }
    Ok(BinaryCode { k, strings })
}

/// `f_i = ε^{1/2} Σ_j ω_j^{(i)} p^{γ/2} e^{-γλ_{k+j}t/2} f_{k+j}`, supported
/// on the (1-based) eigen-indices `k+1, …, 2k`.
#[derive(Debug, Clone, PartialEq)]
pub struct HardFamily {
    pub epsilon: f64,
    pub k: usize,
    pub gamma: f64,
    pub code: BinaryCode,
    pub members: Vec<PowerCoefficients>,
}

impl HardFamily {
    pub fn spectrum(&self) -> &Arc<DiffusionSpectrum> {
        self.members[0].spectrum()
    }
}

pub fn build_hard_family(spectrum: &Arc<DiffusionSpectrum>, gamma: f64, epsilon: f64, code: BinaryCode) -> Result<HardFamily> {
    let k = code.k();
    if spectrum.len() < 2 * k {
        return Err(param(format!(
            "hard family needs {} basis functions but the truncation has {}",
            2 * k,
            spectrum.len()
        )));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(param(format!("ε must be positive, got {epsilon}")));
    }
    if !(gamma >= 0.0) {
        return Err(param(format!("γ must be non-negative, got {gamma}")));
    }
    let amp: Vec<f64> = (k..2 * k)
        .map(|idx| (0.5 * epsilon.ln() + 0.5 * gamma * spectrum.log_weight(idx)).exp())
        .collect();
    let members = code
        .strings()
        .iter()
        .map(|w| {
            let mut c = vec![0.0; 2 * k];
            for (j, bit) in w.iter().enumerate() {
                if *bit {
                    c[k + j] = amp[j];
                }
            }
            PowerCoefficients::new(spectrum.clone(), c)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HardFamily {
        epsilon,
        k,
        gamma,
        code,
        members,
    })
}

/// `KL(P_f^n ‖ P_{f2}^n) = n ‖f − f2‖₀² / (2σ̄²)` for Gaussian regression.
pub fn kl_divergence(f: &PowerCoefficients, f2: &PowerCoefficients, n: usize, sigma_bar: f64) -> Result<f64> {
    if !(sigma_bar > 0.0) {
        return Err(param(format!("σ̄ must be positive, got {sigma_bar}")));
    }
    if n == 0 {
        return Err(param("sample size must be at least 1"));
    }
    let d = power_norm_sq(&f.difference(f2)?, 0.0)?;
    Ok(n as f64 * d / (2.0 * sigma_bar * sigma_bar))
}

/// Monte-Carlo estimate of the same divergence: simulate `(x, y)` under
/// `P_f` and average the log-likelihood ratio against `P_{f2}`.
/// Returns `(estimate, standard error)`.
pub fn kl_monte_carlo(
    f: &PowerCoefficients,
    f2: &PowerCoefficients,
    basis: &SpectralBasis,
    n: usize,
    sigma_bar: f64,
    draws: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if !(sigma_bar > 0.0) {
        return Err(param(format!("σ̄ must be positive, got {sigma_bar}")));
    }
    if draws < 2 {
        return Err(param("Monte-Carlo KL needs at least two draws"));
    }
    const CHUNK: usize = 16_384;
    let model = basis.model();
    let chunks: Vec<usize> = (0..draws.div_ceil(CHUNK)).collect();
    let parts = chunks
        .par_iter()
        .map(|&c| -> Result<(f64, f64)> {
            let len = CHUNK.min(draws - c * CHUNK);
            let chunk_seed = derive_seed(seed, c as u64);
            let xs = sample_uniform(model, len, chunk_seed)?;
            let mut noise = rng_for(chunk_seed, stream::MONTE_CARLO);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for x in &xs {
                let a = f.eval(basis, x)?;
                let b = f2.eval(basis, x)?;
                let g: f64 = noise.sample(StandardNormal);
                let y = a + sigma_bar * g;
                let llr = ((y - b).powi(2) - (y - a).powi(2)) / (2.0 * sigma_bar * sigma_bar);
                sum += llr;
                sum_sq += llr * llr;
            }
            Ok((sum, sum_sq))
        })
        .collect::<Result<Vec<_>>>()?;
    let (sum, sum_sq) = parts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let m = draws as f64;
    let mean = sum / m;
    let var = (sum_sq / m - mean * mean).max(0.0) * m / (m - 1.0);
    Ok((n as f64 * mean, n as f64 * (var / m).sqrt()))
}

/// Minimum over member pairs of `‖f_i − f_j‖_γ²`.
pub fn verify_packing(family: &HardFamily) -> Result<f64> {
    Ok(pairwise(family)?
        .iter()
        .map(|p| p.distance_sq)
        .fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairStat {
    pub i: usize,
    pub j: usize,
    pub hamming: usize,
    /// `‖f_i − f_j‖_γ²`
    pub distance_sq: f64,
}

pub fn pairwise(family: &HardFamily) -> Result<Vec<PairStat>> {
    let m = &family.members;
    if m.len() < 2 {
        return Err(Error::InsufficientData("packing needs at least two members".into()));
    }
    let s = family.code.strings();
    let mut out = Vec::with_capacity(m.len() * (m.len() - 1) / 2);
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            out.push(PairStat {
                i,
                j,
                hamming: hamming(&s[i], &s[j]),
                distance_sq: power_norm_sq(&m[i].difference(&m[j])?, family.gamma)?,
            });
        }
    }
    Ok(out)
}

/// Inputs to [`check_conditions`] beyond the family itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionInputs {
    pub n: usize,
    pub sigma_bar: f64,
    pub a: f64,
    pub radius: f64,
    pub beta: f64,
    pub weyl: WeylEnvelope,
    pub s: f64,
    pub c_k: f64,
    pub c_eps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    /// `max_i ‖f_i‖_β²`
    pub max_source_norm_sq: f64,
    pub radius_sq: f64,
    pub source_ok: bool,
    /// `max_i KL(P_{f_i}^n ‖ P_{f_0}^n)`
    pub max_kl: f64,
    /// `a log K`
    pub kl_budget: f64,
    pub kl_ok: bool,
    /// `(β−γ) t C_up (2C_k)^{2/m} − s`, required `< 0`.
    pub source_exponent: f64,
    pub source_exponent_ok: bool,
    /// `(1−s) − γ t C_low C_k^{2/m}`, required `≤ 0`.
    pub kl_exponent: f64,
    pub kl_exponent_ok: bool,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.source_ok && self.kl_ok
    }

    pub fn exponents_ok(&self) -> bool {
        self.source_exponent_ok && self.kl_exponent_ok
    }
}

/// Audit the source condition `‖f_i‖_β² ≤ R²` and the divergence condition
/// `KL ≤ a log K` on the explicit family, plus the asymptotic exponent
/// inequalities with the empirical Weyl envelope standing in for the
/// unknown eigenvalue constants. The exponent checks are indicative only.
pub fn check_conditions(family: &HardFamily, inp: &ConditionInputs) -> Result<ConditionReport> {
    if !(inp.a > 0.0 && inp.a < 0.125) {
        return Err(param(format!("a must lie in (0, 1/8), got {}", inp.a)));
    }
    let finite = [inp.sigma_bar, inp.radius, inp.beta, inp.s, inp.c_k, inp.c_eps];
    if finite.iter().any(|v| !v.is_finite()) {
        return Err(param("audit inputs must be finite"));
    }
    if !(inp.beta > family.gamma) {
        return Err(param(format!("need β > γ, got β = {}, γ = {}", inp.beta, family.gamma)));
    }
    if family.members.len() < 3 {
        return Err(Error::InsufficientData("the divergence condition needs K ≥ 2 alternatives".into()));
    }
    let spectrum = family.spectrum();
    let m = crate::manifold::ManifoldModel::new(spectrum.kind()).dim() as f64;
    let t = spectrum.t();

    let mut max_source = 0.0f64;
    let mut max_kl = 0.0f64;
    let f0 = &family.members[0];
    for f in &family.members[1..] {
        max_source = max_source.max(power_norm_sq(f, inp.beta)?);
        max_kl = max_kl.max(kl_divergence(f, f0, inp.n, inp.sigma_bar)?);
    }
    let radius_sq = inp.radius * inp.radius;
    let kl_budget = inp.a * (family.code.num_alternatives() as f64).ln();
    let g = family.gamma;
    let source_exponent = (inp.beta - g) * t * inp.weyl.c_up * (2.0 * inp.c_k).powf(2.0 / m) - inp.s;
    let kl_exponent = (1.0 - inp.s) - g * t * inp.weyl.c_low * inp.c_k.powf(2.0 / m);
    Ok(ConditionReport {
        max_source_norm_sq: max_source,
        radius_sq,
        source_ok: max_source <= radius_sq,
        max_kl,
        kl_budget,
        kl_ok: max_kl <= kl_budget,
        source_exponent,
        source_exponent_ok: source_exponent < 0.0,
        kl_exponent,
        kl_exponent_ok: kl_exponent <= 0.0,
    })
}

/// Parameters of the hard family chosen as in the lower-bound argument:
/// `k = C_k (log n)^{m/2}`, `ε = C_ε n^{-s}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundRecipe {
    pub s: f64,
    pub c_k: f64,
    pub c_eps: f64,
    pub k: usize,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecipeInputs {
    pub n: usize,
    pub beta: f64,
    pub gamma: f64,
    pub sigma_bar: f64,
    pub a: f64,
    pub radius: f64,
    pub weyl: WeylEnvelope,
}

/// Derive `s`, `C_k`, `C_ε`, `k`, `ε` for `spectrum`.
///
/// For `γ = 0` the exponent is `s = 1` and `C_k` sits halfway to the largest
/// value allowed by the source exponent. For `γ > 0`, `s` is the midpoint
/// between its admissible lower limit and 1 and `C_k` is the smallest value
/// the divergence exponent allows. `k` is never below 8.
pub fn lower_bound_recipe(spectrum: &DiffusionSpectrum, inp: &RecipeInputs) -> Result<LowerBoundRecipe> {
    if !(inp.gamma >= 0.0 && inp.beta > inp.gamma) {
        return Err(param(format!("need 0 ≤ γ < β, got γ = {}, β = {}", inp.gamma, inp.beta)));
    }
    if inp.n < 3 {
        return Err(param("sample size must be at least 3"));
    }
    let m = crate::manifold::ManifoldModel::new(spectrum.kind()).dim() as f64;
    let t = spectrum.t();
    let p = spectrum.density();
    let (beta, gamma) = (inp.beta, inp.gamma);
    let up = (beta - gamma) * t * inp.weyl.c_up;
    let (s, c_k) = if gamma == 0.0 {
        let c_k_max = 0.5 * (1.0 / up).powf(m / 2.0);
        (1.0, 0.5 * c_k_max)
    } else {
        let low = gamma * t * inp.weyl.c_low;
        let x = up * 2f64.powf(2.0 / m);
        let s_min = x / (x + low);
        let s = 0.5 * (s_min + 1.0);
        (s, ((1.0 - s) / low).powf(m / 2.0))
    };
    let log_n = (inp.n as f64).ln();
    let k = ((c_k * log_n.powf(m / 2.0)).round() as usize).max(8);
    let c_eps = (inp.a * p.powf(-gamma) * inp.sigma_bar.powi(2) * 2f64.ln() / 4.0)
        .min(p.powf(beta - gamma) * inp.radius.powi(2) / c_k);
    Ok(LowerBoundRecipe {
        s,
        c_k,
        c_eps,
        k,
        epsilon: c_eps * (inp.n as f64).powf(-s),
    })
}
