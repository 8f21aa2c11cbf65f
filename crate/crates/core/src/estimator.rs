//! Spectral-regularization estimators `f_{D,λ} = g_λ(T_δ) g_D`.
//!
//! The dense route works on the `n × n` Gram matrix: with `K/n = U Λ Uᵀ`,
//! the representer coefficients are `c = (1/n) U g_λ(Λ) Uᵀ y`. The feature
//! route works in the truncated eigenbasis, where the kernel is finite-rank,
//! and gives the same function at a cost linear in `n`.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::error::{param, Error, Result};
use crate::filters::FilterFamily;
use crate::heat_kernel::{HeatKernel, KernelMatrix};
use crate::manifold::Point;
use crate::power_space::{DiffusionSpectrum, PowerCoefficients};

/// Largest sample handled by the dense route.
pub const DENSE_MAX_N: usize = 16_384;

/// Negative Gram eigenvalues above `-NEG_EIG_REL · κ²` are rounding noise.
const NEG_EIG_REL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: Vec<Point>,
    pub targets: Vec<f64>,
}

impl Dataset {
    pub fn new(points: Vec<Point>, targets: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput("dataset has no points"));
        }
        if points.len() != targets.len() {
            return Err(Error::Shape(format!(
                "{} points but {} responses",
                points.len(),
                targets.len()
            )));
        }
        let kind = points[0].kind();
        if let Some(p) = points.iter().find(|p| p.kind() != kind) {
            return Err(Error::ManifoldMismatch { expected: kind, found: p.kind() });
        }
        check_finite(&targets)?;
        Ok(Dataset { points, targets })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn check_finite(y: &[f64]) -> Result<()> {
    match y.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::Data(format!("response {i} is not finite"))),
        None => Ok(()),
    }
}

/// `f(x) = Σ_i c_i H_t(x_i, x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate {
    pub points: Vec<Point>,
    pub coefficients: Vec<f64>,
    pub lambda: f64,
    pub family: FilterFamily,
    pub t: f64,
}

/// Representer coefficients `c = (1/n) U g_λ(Λ) Uᵀ y` for the Gram matrix.
pub fn fit_coefficients(gram: &KernelMatrix, targets: &[f64], family: FilterFamily, lambda: f64) -> Result<Vec<f64>> {
    let n = gram.n();
    if gram.values.ncols() != n {
        return Err(Error::Shape("Gram matrix is not square".into()));
    }
    if targets.len() != n {
        return Err(Error::Shape(format!("Gram matrix is {n}×{n} but there are {} responses", targets.len())));
    }
    if n > DENSE_MAX_N {
        return Err(param(format!("dense fit supports n ≤ {DENSE_MAX_N}, got {n}")));
    }
    if !(lambda > 0.0) {
        return Err(param(format!("λ must be positive, got {lambda}")));
    }
    check_finite(targets)?;
    let nf = n as f64;
    let eig = SymmetricEigen::new(&gram.values / nf);
    let g = filtered_spectrum(eig.eigenvalues.as_slice(), family, lambda, gram.kappa_sq)?;
    let y = DVector::from_column_slice(targets);
    let proj = eig.eigenvectors.tr_mul(&y);
    let scaled = DVector::from_iterator(n, proj.iter().zip(&g).map(|(p, g)| p * g / nf));
    Ok((&eig.eigenvectors * scaled).as_slice().to_vec())
}

fn filtered_spectrum(eigs: &[f64], family: FilterFamily, lambda: f64, kappa_sq: f64) -> Result<Vec<f64>> {
    eigs.iter()
        .map(|&s| {
            if s < -NEG_EIG_REL * kappa_sq.max(f64::MIN_POSITIVE) {
                return Err(Error::Data(format!("Gram matrix has eigenvalue {s}, not PSD")));
            }
            family.apply(lambda, s.max(0.0), kappa_sq)
        })
        .collect()
}

pub fn fit(gram: &KernelMatrix, data: &Dataset, family: FilterFamily, lambda: f64, t: f64) -> Result<SpectralEstimate> {
    let coefficients = fit_coefficients(gram, &data.targets, family, lambda)?;
    Ok(SpectralEstimate {
        points: data.points.clone(),
        coefficients,
        lambda,
        family,
        t,
    })
}

/// Tikhonov coefficients from the linear system `(K/n + λI) c = y/n`.
pub fn fit_tikhonov_direct(gram: &KernelMatrix, targets: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let n = gram.n();
    if targets.len() != n {
        return Err(Error::Shape(format!("Gram matrix is {n}×{n} but there are {} responses", targets.len())));
    }
    if !(lambda > 0.0) {
        return Err(param(format!("λ must be positive, got {lambda}")));
    }
    let nf = n as f64;
    let a = &gram.values / nf + DMatrix::identity(n, n) * lambda;
    let chol = Cholesky::new(a).ok_or_else(|| Error::Data("regularized Gram matrix is not positive definite".into()))?;
    let rhs = DVector::from_iterator(n, targets.iter().map(|y| y / nf));
    Ok(chol.solve(&rhs).as_slice().to_vec())
}

pub fn predict(est: &SpectralEstimate, kernel: &HeatKernel, x: &Point) -> Result<f64> {
    Ok(predict_many(est, kernel, std::slice::from_ref(x))?[0])
}

pub fn predict_many(est: &SpectralEstimate, kernel: &HeatKernel, xs: &[Point]) -> Result<Vec<f64>> {
    if est.t != kernel.params().t {
        return Err(param(format!(
            "estimate was fitted at t = {} but the kernel has t = {}",
            est.t,
            kernel.params().t
        )));
    }
    // Collapse the representer sum to basis coefficients once.
    let basis = kernel.basis();
    let k = basis.len();
    let mut acc = vec![0.0; k];
    let mut f = vec![0.0; k];
    for (p, c) in est.points.iter().zip(&est.coefficients) {
        basis.eval_all(p, &mut f)?;
        for (a, v) in acc.iter_mut().zip(&f) {
            *a += c * v;
        }
    }
    for (a, w) in acc.iter_mut().zip(kernel.weights()) {
        *a *= w;
    }
    xs.iter()
        .map(|x| {
            basis.eval_all(x, &mut f)?;
            Ok(acc.iter().zip(&f).map(|(a, v)| a * v).sum())
        })
        .collect()
}

/// `Φ` with `Φ_ik = √s_k f_k(x_i)` over the first `k` modes.
fn feature_matrix(kernel: &HeatKernel, points: &[Point], k: usize) -> Result<DMatrix<f64>> {
    let basis = kernel.basis();
    if k == 0 || k > basis.len() {
        return Err(Error::InsufficientBasis { required: k.max(1), available: basis.len() });
    }
    let full = basis.len();
    let design = basis.design_matrix(points)?;
    let root: Vec<f64> = kernel.weights()[..k].iter().map(|s| s.sqrt()).collect();
    Ok(DMatrix::from_fn(points.len(), k, |i, j| design[i * full + j] * root[j]))
}

/// Empirical covariance `(1/n) Σ_i φ(x_i) φ(x_i)ᵀ` in the orthonormal basis
/// `φ_k = √s_k f_k` of the kernel space, over the first `k_trunc` modes.
/// Its population counterpart is `diag(s_k)`.
pub fn empirical_covariance_in_basis(kernel: &HeatKernel, points: &[Point], k_trunc: usize) -> Result<DMatrix<f64>> {
    if points.is_empty() {
        return Err(Error::EmptyInput("covariance needs at least one point"));
    }
    let phi = feature_matrix(kernel, points, k_trunc)?;
    Ok(phi.tr_mul(&phi) / points.len() as f64)
}

/// Same estimator as [`fit`], computed in the truncated eigenbasis. Returns
/// the `L²(ν)` coefficients of the fitted function.
pub fn fit_feature_space(kernel: &HeatKernel, data: &Dataset, family: FilterFamily, lambda: f64) -> Result<PowerCoefficients> {
    if !(lambda > 0.0) {
        return Err(param(format!("λ must be positive, got {lambda}")));
    }
    let k = kernel.basis().len();
    let n = data.len() as f64;
    let phi = feature_matrix(kernel, &data.points, k)?;
    let y = DVector::from_column_slice(&data.targets);
    let m = phi.tr_mul(&phi) / n;
    let gd = phi.tr_mul(&y) / n;
    let kappa_sq: f64 = kernel.weights().iter().sum();
    let eig = SymmetricEigen::new(m);
    let g = filtered_spectrum(eig.eigenvalues.as_slice(), family, lambda, kappa_sq)?;
    let proj = eig.eigenvectors.tr_mul(&gd);
    let scaled = DVector::from_iterator(k, proj.iter().zip(&g).map(|(p, g)| p * g));
    let theta = &eig.eigenvectors * scaled;
    let coeffs = theta.iter().zip(kernel.weights()).map(|(th, s)| th * s.sqrt()).collect();
    PowerCoefficients::new(DiffusionSpectrum::from_kernel(kernel), coeffs)
}
