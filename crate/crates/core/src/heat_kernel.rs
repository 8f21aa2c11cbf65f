//! Heat kernels via truncated Mercer expansion, Gram matrices, and two
//! closed-form oracles (wrapped Gaussian on the circle, Legendre addition
//! form on the sphere).

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::manifold::harmonics::legendre_polynomials;
use crate::manifold::{ManifoldModel, Point, SpectralBasis};

pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
pub const DEFAULT_TIME: f64 = 0.5;
/// Hard cap on flattened modes for [`truncation_for_tolerance`].
pub const DEFAULT_MODE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatKernelParams {
    pub t: f64,
    pub tail_tol: f64,
}

impl HeatKernelParams {
    pub fn new(t: f64, tail_tol: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Parameter(format!("diffusion time must be positive, got {t}")));
        }
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::Parameter(format!("tail tolerance must lie in (0, 1), got {tail_tol}")));
        }
        Ok(HeatKernelParams { t, tail_tol })
    }

    pub fn with_time(t: f64) -> Result<Self> {
        Self::new(t, DEFAULT_TAIL_TOL)
    }
}

impl Default for HeatKernelParams {
    fn default() -> Self {
        HeatKernelParams {
            t: DEFAULT_TIME,
            tail_tol: DEFAULT_TAIL_TOL,
        }
    }
}

/// Smallest number of flattened modes whose diagonal tail is below
/// `tail_tol` times the leading term `1/vol`.
pub fn truncation_for_tolerance(model: ManifoldModel, t: f64, tail_tol: f64) -> Result<usize> {
    truncation_with_cap(model, t, tail_tol, DEFAULT_MODE_CAP)
}

pub fn truncation_with_cap(model: ManifoldModel, t: f64, tail_tol: f64, cap: usize) -> Result<usize> {
    HeatKernelParams::new(t, tail_tol)?;
    // Per-level diagonal contributions, scaled by vol: mult · e^{-tλ}.
    let mut terms: Vec<(usize, f64)> = Vec::new();
    let mut cumulative = 0usize;
    let mut prev = f64::INFINITY;
    let mut hit_cap = false;
    for (eig, mult) in model.spectral_levels() {
        let term = mult as f64 * (-t * eig).exp();
        cumulative += mult;
        terms.push((cumulative, term));
        if terms.len() > 1 && term < tail_tol * 1e-6 && term < prev {
            break;
        }
        if cumulative > cap {
            hit_cap = true;
            break;
        }
        prev = term;
    }
    let mut tail = 0.0;
    let mut suffix = vec![0.0; terms.len()];
    for i in (0..terms.len()).rev() {
        suffix[i] = tail;
        tail += terms[i].1;
    }
    for (i, &(modes, _)) in terms.iter().enumerate() {
        if hit_cap && i + 1 == terms.len() {
            break;
        }
        if suffix[i] < tail_tol {
            if modes > cap {
                break;
            }
            return Ok(modes);
        }
    }
    Err(Error::TruncationOverflow { cap })
}

/// A heat kernel bound to a truncated basis.
#[derive(Debug, Clone)]
pub struct HeatKernel {
    basis: SpectralBasis,
    params: HeatKernelParams,
    weights: Vec<f64>,
}

impl HeatKernel {
    pub fn new(basis: SpectralBasis, params: HeatKernelParams) -> Self {
        let p = basis.model().density();
        let weights = basis.eigenvalues().iter().map(|&l| p * (-params.t * l).exp()).collect();
        HeatKernel {
            basis,
            params,
            weights,
        }
    }

    /// Basis of exactly the length the tail tolerance requires.
    pub fn for_tolerance(model: ManifoldModel, params: HeatKernelParams) -> Result<Self> {
        let k = truncation_for_tolerance(model, params.t, params.tail_tol)?;
        let basis = crate::manifold::build_spectral_basis(model, k)?;
        Ok(Self::new(basis, params))
    }

    pub fn basis(&self) -> &SpectralBasis {
        &self.basis
    }

    pub fn params(&self) -> HeatKernelParams {
        self.params
    }

    /// Mercer weights `p e^{-tλ_k}`, i.e. the spectrum of the integral operator.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn eval(&self, x: &Point, y: &Point) -> Result<f64> {
        let k = self.basis.len();
        let mut fx = vec![0.0; k];
        let mut fy = vec![0.0; k];
        self.basis.eval_all(x, &mut fx)?;
        self.basis.eval_all(y, &mut fy)?;
        Ok(weighted_dot(&self.weights, &fx, &fy))
    }

    pub fn matrix(&self, points: &[Point]) -> Result<KernelMatrix> {
        if points.is_empty() {
            return Err(Error::EmptyInput("kernel matrix needs at least one point"));
        }
        let n = points.len();
        let k = self.basis.len();
        let design = self.basis.design_matrix(points)?;
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let fi = &design[i * k..(i + 1) * k];
                (0..n)
                    .map(|j| weighted_dot(&self.weights, fi, &design[j * k..(j + 1) * k]))
                    .collect()
            })
            .collect();
        let mut values = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        let sym = (&values + values.transpose()) * 0.5;
        values.copy_from(&sym);
        let kappa_sq = (0..n).map(|i| values[(i, i)]).fold(f64::NEG_INFINITY, f64::max);
        Ok(KernelMatrix { values, kappa_sq })
    }
}

#[inline]
fn weighted_dot(w: &[f64], a: &[f64], b: &[f64]) -> f64 {
    w.iter().zip(a).zip(b).map(|((w, a), b)| w * (a * b)).sum()
}

pub fn kernel_eval(basis: &SpectralBasis, params: &HeatKernelParams, x: &Point, y: &Point) -> Result<f64> {
    HeatKernel::new(basis.clone(), *params).eval(x, y)
}

/// Symmetric Gram matrix of the heat kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub values: DMatrix<f64>,
    /// Largest diagonal entry.
    pub kappa_sq: f64,
}

impl KernelMatrix {
    pub fn n(&self) -> usize {
        self.values.nrows()
    }
}

pub fn kernel_matrix(basis: &SpectralBasis, params: &HeatKernelParams, points: &[Point]) -> Result<KernelMatrix> {
    HeatKernel::new(basis.clone(), *params).matrix(points)
}

/// Wrapped-Gaussian heat kernel on the unit circle.
pub fn circle_kernel_closed_form(t: f64, x: f64, y: f64, j_max: usize) -> Result<f64> {
    if !(t > 0.0) || j_max < 1 {
        return Err(Error::Parameter("need t > 0 and j_max ≥ 1".into()));
    }
    let d = x - y;
    let norm = (4.0 * PI * t).sqrt();
    let j = j_max as i64;
    let s: f64 = (-j..=j)
        .map(|j| {
            let u = d + TAU * j as f64;
            (-u * u / (4.0 * t)).exp()
        })
        .sum();
    Ok(s / norm)
}

/// Sphere heat kernel via the Legendre addition theorem, truncated at `l_max`.
pub fn sphere_kernel_addition(t: f64, cos_angle: f64, l_max: usize) -> Result<f64> {
    if !(-1.0..=1.0).contains(&cos_angle) {
        return Err(Error::Domain(format!("cosine {cos_angle} is outside [-1, 1]")));
    }
    if !(t > 0.0) {
        return Err(Error::Parameter("need t > 0".into()));
    }
    let p = legendre_polynomials(l_max, cos_angle);
    let s: f64 = p
        .iter()
        .enumerate()
        .map(|(l, pl)| {
            let lf = l as f64;
            (-lf * (lf + 1.0) * t).exp() * (2.0 * lf + 1.0) * pl
        })
        .sum();
    Ok(s / (4.0 * PI))
}
