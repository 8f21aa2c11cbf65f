//! Regularization families `g_λ`, their residuals `h_λ(s) = 1 − s g_λ(s)`,
//! and grid audits of the family axioms and of qualification.
//!
//! Landweber iteration runs on a spectrum rescaled into `(0, 1]`. Without a
//! fixed step count the iteration count at regularization `λ` is `⌊1/λ⌋`, so
//! that `g_λ ≤ ν ≤ 1/λ` holds exactly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// Tolerance used when auditing the (non-strict) family axioms.
pub const AXIOM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FilterFamily {
    Tikhonov,
    SpectralCutoff,
    /// Landweber iteration. `steps: None` ties the count to `λ`.
    Landweber { steps: Option<u32> },
}

impl FilterFamily {
    pub fn landweber(steps: u32) -> Self {
        FilterFamily::Landweber { steps: Some(steps) }
    }

    /// Nominal qualification `ξ`.
    pub fn qualification(&self) -> f64 {
        match *self {
            FilterFamily::Tikhonov => 1.0,
            FilterFamily::SpectralCutoff => f64::INFINITY,
            FilterFamily::Landweber { steps: Some(n) } => n as f64,
            // sup (1−s)^ν s² ≤ λ² holds for every ν = ⌊1/λ⌋; α = 3 fails.
            FilterFamily::Landweber { steps: None } => 2.0,
        }
    }

    /// Iteration count used at regularization `lambda` (Landweber only).
    pub fn landweber_steps(&self, lambda: f64) -> Option<u64> {
        match *self {
            FilterFamily::Landweber { steps: Some(n) } => Some(n as u64),
            FilterFamily::Landweber { steps: None } => Some((1.0 / lambda).floor().min(u64::MAX as f64) as u64),
            _ => None,
        }
    }

    /// Regularization parameters at which the axioms should be audited.
    /// A fixed-step Landweber filter is only a member of the family at
    /// `λ = 1/steps`.
    pub fn audit_lambdas(&self, grid: &[f64]) -> Vec<f64> {
        match *self {
            FilterFamily::Landweber { steps: Some(n) } if n > 0 => vec![1.0 / n as f64],
            _ => grid.to_vec(),
        }
    }

    /// `g_λ(s)` evaluated on a spectrum bounded by `kappa_sq`. Landweber is
    /// applied to the rescaled spectrum `s/κ²`; the other families are
    /// scale-free.
    pub fn apply(&self, lambda: f64, s: f64, kappa_sq: f64) -> Result<f64> {
        match self {
            FilterFamily::Landweber { .. } if kappa_sq > 0.0 => {
                Ok(filter_eval(*self, lambda / kappa_sq, s / kappa_sq)? / kappa_sq)
            }
            _ => filter_eval(*self, lambda, s),
        }
    }

    /// Residual `1 − s g_λ(s)` under the same rescaling as [`FilterFamily::apply`].
    pub fn apply_residual(&self, lambda: f64, s: f64, kappa_sq: f64) -> Result<f64> {
        match self {
            FilterFamily::Landweber { .. } if kappa_sq > 0.0 => {
                residual_eval(*self, lambda / kappa_sq, s / kappa_sq)
            }
            _ => residual_eval(*self, lambda, s),
        }
    }
}

impl fmt::Display for FilterFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterFamily::Tikhonov => f.write_str("tikhonov"),
            FilterFamily::SpectralCutoff => f.write_str("cutoff"),
            FilterFamily::Landweber { steps: None } => f.write_str("landweber"),
            FilterFamily::Landweber { steps: Some(n) } => write!(f, "landweber:{n}"),
        }
    }
}

impl FromStr for FilterFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "tikhonov" => Ok(FilterFamily::Tikhonov),
            "cutoff" => Ok(FilterFamily::SpectralCutoff),
            "landweber" => Ok(FilterFamily::Landweber { steps: None }),
            other => match other.strip_prefix("landweber:") {
                Some(n) => n
                    .parse::<u32>()
                    .map(FilterFamily::landweber)
                    .map_err(|_| Error::Config(format!("invalid Landweber step count '{n}'"))),
                None => Err(Error::Config(format!(
                    "unknown filter '{other}' (expected tikhonov, cutoff, landweber or landweber:<steps>)"
                ))),
            },
        }
    }
}

fn check_args(lambda: f64, s: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(param(format!("regularization λ must be positive, got {lambda}")));
    }
    if !(s >= 0.0) {
        return Err(param(format!("spectral value must be non-negative, got {s}")));
    }
    Ok(())
}

/// `(1 − s)^ν` with the sign handled for `s > 1`.
fn landweber_residual(steps: u64, s: f64) -> f64 {
    if steps == 0 || s == 0.0 {
        return 1.0;
    }
    if s <= 1.0 {
        (steps as f64 * (-s).ln_1p()).exp()
    } else {
        let q = 1.0 - s;
        let mag = q.abs().powf(steps as f64);
        if steps % 2 == 1 {
            -mag
        } else {
            mag
        }
    }
}

/// `g_λ(s)`.
pub fn filter_eval(family: FilterFamily, lambda: f64, s: f64) -> Result<f64> {
    check_args(lambda, s)?;
    let v = match family {
        FilterFamily::Tikhonov => 1.0 / (lambda + s),
        FilterFamily::SpectralCutoff => {
            if s >= lambda && s > 0.0 {
                1.0 / s
            } else {
                0.0
            }
        }
        FilterFamily::Landweber { .. } => {
            let steps = family.landweber_steps(lambda).unwrap_or(0);
            if steps == 0 {
                0.0
            } else if s == 0.0 {
                steps as f64
            } else if s <= 1.0 {
                // Σ_{i<ν} (1−s)^i = (1 − (1−s)^ν)/s without cancellation.
                -(steps as f64 * (-s).ln_1p()).exp_m1() / s
            } else {
                (1.0 - landweber_residual(steps, s)) / s
            }
        }
    };
    Ok(v)
}

/// `h_λ(s) = 1 − s g_λ(s)`.
pub fn residual_eval(family: FilterFamily, lambda: f64, s: f64) -> Result<f64> {
    check_args(lambda, s)?;
    let v = match family {
        FilterFamily::Tikhonov => lambda / (lambda + s),
        FilterFamily::SpectralCutoff => {
            if s < lambda || s == 0.0 {
                1.0
            } else {
                0.0
            }
        }
        FilterFamily::Landweber { .. } => {
            landweber_residual(family.landweber_steps(lambda).unwrap_or(0), s)
        }
    };
    Ok(v)
}

/// `sup |h_λ(s)| s^α / λ^α` over the grids. `≤ 1` certifies the qualification
/// inequality at `α` on the grid.
pub fn qualification_margin(family: FilterFamily, alpha: f64, lambdas: &[f64], ss: &[f64]) -> Result<f64> {
    if lambdas.is_empty() || ss.is_empty() {
        return Err(param("qualification grids must be non-empty"));
    }
    if !(alpha > 0.0) {
        return Err(param(format!("α must be positive, got {alpha}")));
    }
    let mut worst = 0.0f64;
    for &lambda in lambdas {
        for &s in ss {
            if !(s > 0.0) {
                return Err(param("spectral grid must lie in (0, κ²]"));
            }
            let h = residual_eval(family, lambda, s)?.abs();
            if h == 0.0 {
                continue;
            }
            let log_ratio = h.ln() + alpha * (s.ln() - lambda.ln());
            worst = worst.max(log_ratio.exp());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axiom {
    /// `s g_λ(s) ≤ 1`
    BoundedGain,
    /// `|1 − s g_λ(s)| ≤ 1`
    BoundedResidual,
    /// `g_λ(s) ≤ 1/λ`
    InverseBound,
}

impl Axiom {
    pub const ALL: [Axiom; 3] = [Axiom::BoundedGain, Axiom::BoundedResidual, Axiom::InverseBound];

    pub fn as_str(self) -> &'static str {
        match self {
            Axiom::BoundedGain => "s_g_le_1",
            Axiom::BoundedResidual => "abs_residual_le_1",
            Axiom::InverseBound => "g_le_inv_lambda",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    /// Largest relative excess `(value − bound)/bound`; negative means slack.
    pub worst_violation: f64,
    pub lambda: f64,
    pub s: f64,
}

impl AxiomCheck {
    pub fn holds(&self) -> bool {
        self.worst_violation <= AXIOM_TOL
    }
}

/// Audit the three family axioms over `lambdas × ss`.
pub fn audit_axioms(family: FilterFamily, lambdas: &[f64], ss: &[f64]) -> Result<[AxiomCheck; 3]> {
    if lambdas.is_empty() || ss.is_empty() {
        return Err(param("audit grids must be non-empty"));
    }
    let mut checks = Axiom::ALL.map(|axiom| AxiomCheck {
        axiom,
        worst_violation: f64::NEG_INFINITY,
        lambda: f64::NAN,
        s: f64::NAN,
    });
    for &lambda in lambdas {
        for &s in ss {
            let g = filter_eval(family, lambda, s)?;
            let gain = s * g;
            let excess = [gain - 1.0, (1.0 - gain).abs() - 1.0, g * lambda - 1.0];
            for (check, e) in checks.iter_mut().zip(excess) {
                if e > check.worst_violation {
                    *check = AxiomCheck {
                        worst_violation: e,
                        lambda,
                        s,
                        ..*check
                    };
                }
            }
        }
    }
    Ok(checks)
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}
