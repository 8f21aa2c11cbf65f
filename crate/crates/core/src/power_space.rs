//! Power spaces `𝓗_t^γ`, source-condition targets, the population estimator,
//! effective dimension and the whitened covariance deviation.
//!
//! Functions are stored by their `L²(ν)` coefficients `a_k` against the
//! eigenbasis `f_k`. With `s_k = p e^{-tλ_k}` the spectrum of the integral
//! operator, the γ-norm is `‖f‖_γ² = Σ a_k² s_k^{-γ}`. All weights are handled
//! in log space because `s_k` underflows long before the basis runs out.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use crate::error::{param, Error, Result};
use crate::filters::FilterFamily;
use crate::heat_kernel::{truncation_for_tolerance, HeatKernel, HeatKernelParams};
use crate::manifold::{build_spectral_basis, ManifoldKind, ManifoldModel, Point, SpectralBasis};
use crate::rng::{rng_for, stream};

/// Spectrum `s_k = p e^{-tλ_k}` of the integral operator on a truncated basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionSpectrum {
    kind: ManifoldKind,
    density: f64,
    t: f64,
    eigenvalues: Vec<f64>,
}

impl DiffusionSpectrum {
    pub fn new(basis: &SpectralBasis, t: f64) -> Arc<Self> {
        Arc::new(DiffusionSpectrum {
            kind: basis.kind(),
            density: basis.model().density(),
            t,
            eigenvalues: basis.eigenvalues().to_vec(),
        })
    }

    pub fn from_kernel(kernel: &HeatKernel) -> Arc<Self> {
        Self::new(kernel.basis(), kernel.params().t)
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn laplacian_eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `ln s_k = ln p − tλ_k`.
    pub fn log_weight(&self, k: usize) -> f64 {
        self.density.ln() - self.t * self.eigenvalues[k]
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.log_weight(k).exp()
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.weight(k)).collect()
    }

    /// Kernel diagonal `Σ_k s_k` (constant on homogeneous spaces).
    pub fn kappa_sq(&self) -> f64 {
        self.weights().iter().sum()
    }

    /// Same manifold and time, and one eigenvalue list is a prefix of the other.
    pub fn compatible(&self, other: &DiffusionSpectrum) -> bool {
        let n = self.len().min(other.len());
        self.kind == other.kind
            && self.t == other.t
            && self.eigenvalues[..n] == other.eigenvalues[..n]
    }
}

/// A function `Σ a_k f_k` on a truncated spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerCoefficients {
    spectrum: Arc<DiffusionSpectrum>,
    coeffs: Vec<f64>,
}

impl PowerCoefficients {
    pub fn new(spectrum: Arc<DiffusionSpectrum>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(param("coefficient vector must be non-empty"));
        }
        if coeffs.len() > spectrum.len() {
            return Err(Error::InsufficientBasis {
                required: coeffs.len(),
                available: spectrum.len(),
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Data("non-finite coefficient".into()));
        }
        Ok(PowerCoefficients { spectrum, coeffs })
    }

    pub fn zeros(spectrum: Arc<DiffusionSpectrum>, len: usize) -> Result<Self> {
        Self::new(spectrum, vec![0.0; len])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn spectrum(&self) -> &Arc<DiffusionSpectrum> {
        &self.spectrum
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Point evaluation through `basis`, which must cover every coefficient.
    pub fn eval(&self, basis: &SpectralBasis, x: &Point) -> Result<f64> {
        if basis.kind() != self.spectrum.kind() {
            return Err(Error::ManifoldMismatch {
                expected: self.spectrum.kind(),
                found: basis.kind(),
            });
        }
        if basis.len() < self.len() {
            return Err(Error::InsufficientBasis {
                required: self.len(),
                available: basis.len(),
            });
        }
        let mut f = vec![0.0; basis.len()];
        basis.eval_all(x, &mut f)?;
        Ok(self.coeffs.iter().zip(&f).map(|(a, v)| a * v).sum())
    }

    /// Coefficient-wise difference, zero-padded to the longer length.
    pub fn difference(&self, other: &PowerCoefficients) -> Result<PowerCoefficients> {
        if !self.spectrum.compatible(&other.spectrum) {
            return Err(Error::Domain("coefficients live on different spectra".into()));
        }
        let n = self.len().max(other.len());
        let spectrum = if self.spectrum.len() >= other.spectrum.len() {
            self.spectrum.clone()
        } else {
            other.spectrum.clone()
        };
        let at = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
        let coeffs = (0..n).map(|k| at(&self.coeffs, k) - at(&other.coeffs, k)).collect();
        PowerCoefficients::new(spectrum, coeffs)
    }
}

/// `‖f‖_γ = (Σ a_k² p^{-γ} e^{γλ_k t})^{1/2}`.
pub fn power_norm(f: &PowerCoefficients, gamma: f64) -> Result<f64> {
    Ok(power_norm_sq(f, gamma)?.sqrt())
}

pub fn power_norm_sq(f: &PowerCoefficients, gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(param(format!("norm index γ must be non-negative, got {gamma}")));
    }
    let s = f.spectrum();
    Ok(f.coeffs
        .iter()
        .enumerate()
        .filter(|(_, a)| **a != 0.0)
        .map(|(k, a)| (2.0 * a.abs().ln() - gamma * s.log_weight(k)).exp())
        .sum())
}

/// Gaussian noise with deviation `σ̄ = min(σ, L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub sigma: f64,
    pub moment_scale: f64,
}

impl NoiseModel {
    pub fn new(sigma: f64, moment_scale: f64) -> Result<Self> {
        if !(sigma >= 0.0 && moment_scale >= 0.0) {
            return Err(param("noise parameters must be non-negative"));
        }
        Ok(NoiseModel { sigma, moment_scale })
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::new(sigma, sigma)
    }

    pub fn sigma_bar(&self) -> f64 {
        self.sigma.min(self.moment_scale)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetSpec {
    pub beta: f64,
    pub radius: f64,
    pub k_target: usize,
    pub seed: u64,
}

impl TargetSpec {
    fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(param(format!("β must lie in (0, 1], got {}", self.beta)));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(param(format!("norm budget R must be positive, got {}", self.radius)));
        }
        if self.k_target == 0 {
            return Err(param("K_target must be at least 1"));
        }
        Ok(())
    }
}

const SUBNORMAL_GUARD: f64 = 1e-280;

/// A target with `‖f*‖_β = R` supported on the first `K_target` modes, with
/// random signs and magnitudes `∝ s_k^{β/2}`.
pub fn make_source_target(spectrum: &Arc<DiffusionSpectrum>, spec: &TargetSpec) -> Result<PowerCoefficients> {
    spec.validate()?;
    if spec.k_target > spectrum.len() {
        return Err(param(format!(
            "K_target = {} exceeds the basis truncation {}",
            spec.k_target,
            spectrum.len()
        )));
    }
    let mut rng = rng_for(spec.seed, stream::TARGET);
    let raw: Vec<f64> = (0..spec.k_target)
        .map(|k| {
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let mag = (0.5 * spec.beta * spectrum.log_weight(k)).exp();
            // Subnormal magnitudes cannot be rescaled exactly.
            if mag < SUBNORMAL_GUARD {
                0.0
            } else {
                sign * mag
            }
        })
        .collect();
    let unscaled = PowerCoefficients::new(spectrum.clone(), raw)?;
    let norm = power_norm(&unscaled, spec.beta)?;
    let coeffs = unscaled.coeffs.iter().map(|a| a * spec.radius / norm).collect();
    PowerCoefficients::new(spectrum.clone(), coeffs)
}

/// Coefficients of `f_{P,λ} = g_λ(T_ν) g_P`: `a_k ↦ g_λ(s_k) s_k a_k`.
pub fn population_estimator_coeffs(target: &PowerCoefficients, family: FilterFamily, lambda: f64) -> Result<PowerCoefficients> {
    let s = target.spectrum();
    let kappa_sq = s.kappa_sq();
    let coeffs = target
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let sk = s.weight(k);
            Ok((1.0 - family.apply_residual(lambda, sk, kappa_sq)?) * a)
        })
        .collect::<Result<Vec<f64>>>()?;
    PowerCoefficients::new(s.clone(), coeffs)
}

/// Both sides of `‖f_{P,λ} − f*‖_γ² ≤ ‖f*‖_β² λ^{β−γ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproximationCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl ApproximationCheck {
    pub const TOLERANCE: f64 = 1e-9;

    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + Self::TOLERANCE)
    }
}

pub fn approximation_error_check(
    target: &PowerCoefficients,
    family: FilterFamily,
    lambda: f64,
    gamma: f64,
    beta: f64,
) -> Result<ApproximationCheck> {
    if !(gamma >= 0.0 && gamma < beta) {
        return Err(Error::AuditRefused(format!("need 0 ≤ γ < β, got γ = {gamma}, β = {beta}")));
    }
    if (beta - gamma) / 2.0 > family.qualification() {
        return Err(Error::AuditRefused(format!(
            "(β − γ)/2 = {} exceeds the qualification {} of {family}",
            (beta - gamma) / 2.0,
            family.qualification()
        )));
    }
    let s = target.spectrum();
    let kappa_sq = s.kappa_sq();
    let mut lhs = 0.0;
    for (k, &a) in target.coeffs.iter().enumerate() {
        let h = family.apply_residual(lambda, s.weight(k), kappa_sq)?;
        let r = h * a;
        if r != 0.0 {
            lhs += (2.0 * r.abs().ln() - gamma * s.log_weight(k)).exp();
        }
    }
    let rhs = power_norm_sq(target, beta)? * lambda.powf(beta - gamma);
    Ok(ApproximationCheck { lhs, rhs })
}

/// Exact `L²(ν)` coefficients of `Σ_i c_i H_t(x_i, ·)` on the first
/// `k_trunc` modes: `b_k = s_k Σ_i c_i f_k(x_i)`.
pub fn project_estimate(
    est: &crate::estimator::SpectralEstimate,
    kernel: &HeatKernel,
    k_trunc: usize,
) -> Result<PowerCoefficients> {
    let basis = kernel.basis();
    if k_trunc == 0 || k_trunc > basis.len() {
        return Err(Error::InsufficientBasis {
            required: k_trunc.max(1),
            available: basis.len(),
        });
    }
    let mut acc = vec![0.0; basis.len()];
    let mut f = vec![0.0; basis.len()];
    for (x, c) in est.points.iter().zip(&est.coefficients) {
        basis.eval_all(x, &mut f)?;
        for (a, v) in acc.iter_mut().zip(&f) {
            *a += c * v;
        }
    }
    let w = kernel.weights();
    let coeffs = (0..k_trunc).map(|k| w[k] * acc[k]).collect();
    PowerCoefficients::new(DiffusionSpectrum::from_kernel(kernel), coeffs)
}

/// `‖estimate − target‖_γ`, zero-padding the shorter expansion.
pub fn error_norm(estimate: &PowerCoefficients, target: &PowerCoefficients, gamma: f64) -> Result<f64> {
    power_norm(&estimate.difference(target)?, gamma)
}

pub fn error_norm_sq(estimate: &PowerCoefficients, target: &PowerCoefficients, gamma: f64) -> Result<f64> {
    power_norm_sq(&estimate.difference(target)?, gamma)
}

/// `N_ν(λ) = Σ_k s_k/(λ + s_k)`.
pub fn effective_dimension(spectrum: &DiffusionSpectrum, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(param(format!("λ must be positive, got {lambda}")));
    }
    Ok((0..spectrum.len())
        .map(|k| {
            let s = spectrum.weight(k);
            s / (lambda + s)
        })
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffdimRow {
    pub lambda: f64,
    pub n_eff: f64,
    /// `N_ν(λ) / (log 1/λ)^{m/2}`
    pub bound_ratio: f64,
}

/// Effective dimension across `lambdas`, on a basis long enough that the
/// omitted tail is below `1e-12 · min λ`.
pub fn effdim_sweep(model: ManifoldModel, t: f64, lambdas: &[f64]) -> Result<Vec<EffdimRow>> {
    if lambdas.is_empty() {
        return Err(param("λ grid must be non-empty"));
    }
    let lam_min = lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(lam_min > 0.0) {
        return Err(param("λ grid must be positive"));
    }
    let tol = (1e-12 * lam_min).clamp(1e-300, 1e-12);
    let k = truncation_for_tolerance(model, t, tol)?;
    let basis = build_spectral_basis(model, k)?;
    let spectrum = DiffusionSpectrum::new(&basis, t);
    let half_m = model.dim() as f64 / 2.0;
    lambdas
        .iter()
        .map(|&lambda| {
            let n_eff = effective_dimension(&spectrum, lambda)?;
            Ok(EffdimRow {
                lambda,
                n_eff,
                bound_ratio: n_eff / (1.0 / lambda).ln().powf(half_m),
            })
        })
        .collect()
}

/// `‖D^{-1/2}(D_ν − M)D^{-1/2}‖` with `D_ν = diag(s_k)`, `D = D_ν + λI`.
pub fn whitened_deviation_norm(m: &DMatrix<f64>, spectrum: &DiffusionSpectrum, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(param(format!("λ must be positive, got {lambda}")));
    }
    let k = m.nrows();
    if m.ncols() != k || k == 0 || k > spectrum.len() {
        return Err(Error::Shape(format!(
            "covariance is {}×{} but the spectrum has {} entries",
            m.nrows(),
            m.ncols(),
            spectrum.len()
        )));
    }
    let w: Vec<f64> = (0..k).map(|i| spectrum.weight(i)).collect();
    let scale: Vec<f64> = w.iter().map(|s| 1.0 / (s + lambda).sqrt()).collect();
    let a = DMatrix::from_fn(k, k, |i, j| {
        let d = if i == j { w[i] } else { 0.0 };
        (d - m[(i, j)]) * scale[i] * scale[j]
    });
    let sym = (&a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    Ok(eig.eigenvalues.iter().fold(0.0f64, |acc, v| acc.max(v.abs())))
}

/// Convenience: spectrum for the kernel built at `params` on `model`.
pub fn spectrum_for(model: ManifoldModel, params: HeatKernelParams, k: usize) -> Result<Arc<DiffusionSpectrum>> {
    let basis = build_spectral_basis(model, k)?;
    Ok(DiffusionSpectrum::new(&basis, params.t))
}
