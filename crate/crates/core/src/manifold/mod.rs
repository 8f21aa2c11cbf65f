//! Concrete compact manifolds, their Laplace–Beltrami eigensystems and
//! uniform sampling.
//!
//! Eigenfunctions are real and normalized in `L²(ν)` where `ν` is the uniform
//! probability measure, so the constant function `1` is always the first basis
//! element. Repeated eigenvalues are ordered by mode index.

pub mod harmonics;

use std::f64::consts::{PI, SQRT_2, TAU};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{rng_for, stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ManifoldKind {
    Circle,
    Torus2,
    Sphere2,
}

impl ManifoldKind {
    pub const ALL: [ManifoldKind; 3] = [ManifoldKind::Circle, ManifoldKind::Torus2, ManifoldKind::Sphere2];

    pub fn as_str(self) -> &'static str {
        match self {
            ManifoldKind::Circle => "circle",
            ManifoldKind::Torus2 => "torus2",
            ManifoldKind::Sphere2 => "sphere2",
        }
    }
}

impl fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ManifoldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "circle" => Ok(ManifoldKind::Circle),
            "torus2" => Ok(ManifoldKind::Torus2),
            "sphere2" => Ok(ManifoldKind::Sphere2),
            other => Err(Error::Config(format!(
                "unsupported manifold '{other}' (expected circle, torus2 or sphere2)"
            ))),
        }
    }
}

/// A compact manifold together with its uniform probability measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ManifoldModel {
    pub kind: ManifoldKind,
}

impl ManifoldModel {
    pub fn new(kind: ManifoldKind) -> Self {
        ManifoldModel { kind }
    }

    pub fn circle() -> Self {
        Self::new(ManifoldKind::Circle)
    }

    pub fn torus2() -> Self {
        Self::new(ManifoldKind::Torus2)
    }

    pub fn sphere2() -> Self {
        Self::new(ManifoldKind::Sphere2)
    }

    /// Intrinsic dimension `m`.
    pub fn dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Circle => 1,
            ManifoldKind::Torus2 | ManifoldKind::Sphere2 => 2,
        }
    }

    pub fn volume(&self) -> f64 {
        match self.kind {
            ManifoldKind::Circle => TAU,
            ManifoldKind::Torus2 => TAU * TAU,
            ManifoldKind::Sphere2 => 4.0 * PI,
        }
    }

    /// Density `p = 1/vol` of the uniform measure.
    pub fn density(&self) -> f64 {
        1.0 / self.volume()
    }

    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Circle => 2,
            ManifoldKind::Torus2 => 4,
            ManifoldKind::Sphere2 => 3,
        }
    }

    /// Distinct Laplacian eigenvalues in ascending order with their
    /// multiplicities.
    pub fn spectral_levels(&self) -> SpectralLevels {
        SpectralLevels { kind: self.kind, next: 0 }
    }
}

/// Iterator over `(eigenvalue, multiplicity)` pairs.
#[derive(Debug, Clone)]
pub struct SpectralLevels {
    kind: ManifoldKind,
    next: u64,
}

/// Number of integer points `(a, b)` with `a² + b² = n`.
fn lattice_count(n: u64) -> usize {
    if n == 0 {
        return 1;
    }
    let mut count = 0usize;
    let mut a = 0u64;
    while a * a <= n {
        let rest = n - a * a;
        let b = (rest as f64).sqrt().round() as u64;
        if b * b == rest {
            // signs of a and b, without double-counting zeros
            let sa = if a == 0 { 1 } else { 2 };
            let sb = if b == 0 { 1 } else { 2 };
            count += sa * sb;
        }
        a += 1;
    }
    count
}

impl Iterator for SpectralLevels {
    type Item = (f64, usize);

    fn next(&mut self) -> Option<(f64, usize)> {
        match self.kind {
            ManifoldKind::Circle => {
                let j = self.next;
                self.next += 1;
                Some(((j * j) as f64, if j == 0 { 1 } else { 2 }))
            }
            ManifoldKind::Sphere2 => {
                let l = self.next;
                self.next += 1;
                Some(((l * (l + 1)) as f64, (2 * l + 1) as usize))
            }
            ManifoldKind::Torus2 => loop {
                let n = self.next;
                self.next += 1;
                let c = lattice_count(n);
                if c > 0 {
                    return Some((n as f64, c));
                }
            },
        }
    }
}

/// A point on one of the supported manifolds.
///
/// The circle and torus are stored by angle in `[0, 2π)`; the sphere by its
/// unit vector in `ℝ³`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Circle { theta: f64 },
    Torus { theta: f64, phi: f64 },
    Sphere([f64; 3]),
}

impl Point {
    pub fn kind(&self) -> ManifoldKind {
        match self {
            Point::Circle { .. } => ManifoldKind::Circle,
            Point::Torus { .. } => ManifoldKind::Torus2,
            Point::Sphere(_) => ManifoldKind::Sphere2,
        }
    }

    /// Embedding in the ambient Euclidean space (flat torus in ℝ⁴).
    pub fn ambient(&self) -> Vec<f64> {
        match *self {
            Point::Circle { theta } => vec![theta.cos(), theta.sin()],
            Point::Torus { theta, phi } => vec![theta.cos(), theta.sin(), phi.cos(), phi.sin()],
            Point::Sphere(v) => v.to_vec(),
        }
    }

    /// Build a sphere point from any non-zero vector by normalizing it.
    pub fn on_sphere(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Domain("cannot project a zero vector onto the sphere".into()));
        }
        Ok(Point::Sphere([v[0] / norm, v[1] / norm, v[2] / norm]))
    }

    pub fn circle(theta: f64) -> Self {
        Point::Circle { theta: wrap_angle(theta) }
    }

    pub fn torus(theta: f64, phi: f64) -> Self {
        Point::Torus {
            theta: wrap_angle(theta),
            phi: wrap_angle(phi),
        }
    }
}

fn wrap_angle(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// One eigenfunction of the circle: `1`, `√2 cos(jθ)` or `√2 sin(jθ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CircleMode {
    Constant,
    Cos(u32),
    Sin(u32),
}

impl CircleMode {
    /// Mode with position `index` in the circle basis ordering
    /// `1, cos θ, sin θ, cos 2θ, …`.
    pub fn from_index(index: usize) -> Self {
        if index == 0 {
            CircleMode::Constant
        } else {
            let j = index.div_ceil(2) as u32;
            if index % 2 == 1 {
                CircleMode::Cos(j)
            } else {
                CircleMode::Sin(j)
            }
        }
    }

    pub fn frequency(&self) -> u32 {
        match *self {
            CircleMode::Constant => 0,
            CircleMode::Cos(j) | CircleMode::Sin(j) => j,
        }
    }

    fn index(&self) -> usize {
        match *self {
            CircleMode::Constant => 0,
            CircleMode::Cos(j) => 2 * j as usize - 1,
            CircleMode::Sin(j) => 2 * j as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Circle(CircleMode),
    Torus(CircleMode, CircleMode),
    Sphere { l: u32, m: i32 },
}

impl Mode {
    pub fn eigenvalue(&self) -> f64 {
        match *self {
            Mode::Circle(c) => (c.frequency() as f64).powi(2),
            Mode::Torus(a, b) => (a.frequency() as f64).powi(2) + (b.frequency() as f64).powi(2),
            Mode::Sphere { l, .. } => (l as f64) * (l as f64 + 1.0),
        }
    }
}

/// Truncated Laplace–Beltrami eigensystem.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    model: ManifoldModel,
    modes: Vec<Mode>,
    eigenvalues: Vec<f64>,
    // largest circle-mode index (circle, torus) or degree (sphere) in use
    order: usize,
}

impl SpectralBasis {
    pub fn model(&self) -> ManifoldModel {
        self.model
    }

    pub fn kind(&self) -> ManifoldKind {
        self.model.kind
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// The first `k` functions of this basis.
    pub fn truncated(&self, k: usize) -> Result<SpectralBasis> {
        if k == 0 {
            return Err(Error::Parameter("truncation level must be at least 1".into()));
        }
        if k > self.len() {
            return Err(Error::InsufficientBasis {
                required: k,
                available: self.len(),
            });
        }
        build_spectral_basis(self.model, k)
    }

    pub fn check_point(&self, x: &Point) -> Result<()> {
        if x.kind() != self.kind() {
            return Err(Error::ManifoldMismatch {
                expected: self.kind(),
                found: x.kind(),
            });
        }
        Ok(())
    }

    /// Evaluate eigenfunction `k` (0-based) at `x`.
    pub fn eval(&self, k: usize, x: &Point) -> Result<f64> {
        self.check_point(x)?;
        if k >= self.len() {
            return Err(Error::InsufficientBasis {
                required: k + 1,
                available: self.len(),
            });
        }
        if k == 0 {
            return Ok(1.0);
        }
        let v = match (self.modes[k], x) {
            (Mode::Circle(c), Point::Circle { theta }) => circle_value(c, *theta),
            (Mode::Torus(a, b), Point::Torus { theta, phi }) => {
                circle_value(a, *theta) * circle_value(b, *phi)
            }
            (Mode::Sphere { l, m }, Point::Sphere(xyz)) => {
                let (c, s, phi) = harmonics::spherical_angles(xyz);
                let table = harmonics::LegendreTable::compute(l as usize, c, s);
                let am = m.unsigned_abs() as usize;
                let trig: Vec<(f64, f64)> = (0..=am).map(|j| (j as f64 * phi).sin_cos()).collect();
                harmonics::harmonic_from_table(&table, &trig, l as usize, m as i64)
            }
            _ => unreachable!("point kind checked above"),
        };
        Ok(v)
    }

    /// Evaluate every basis function at `x` into `out` (length `len()`).
    pub fn eval_all(&self, x: &Point, out: &mut [f64]) -> Result<()> {
        self.check_point(x)?;
        if out.len() != self.len() {
            return Err(Error::Shape(format!(
                "output buffer has length {} but basis has {} functions",
                out.len(),
                self.len()
            )));
        }
        match *x {
            Point::Circle { theta } => {
                let table = circle_table(self.order, theta);
                for (o, mode) in out.iter_mut().zip(&self.modes) {
                    if let Mode::Circle(c) = mode {
                        *o = table[c.index()];
                    }
                }
            }
            Point::Torus { theta, phi } => {
                let ta = circle_table(self.order, theta);
                let tb = circle_table(self.order, phi);
                for (o, mode) in out.iter_mut().zip(&self.modes) {
                    if let Mode::Torus(a, b) = mode {
                        *o = ta[a.index()] * tb[b.index()];
                    }
                }
            }
            Point::Sphere(ref xyz) => {
                let (c, s, phi) = harmonics::spherical_angles(xyz);
                let table = harmonics::LegendreTable::compute(self.order, c, s);
                let trig: Vec<(f64, f64)> =
                    (0..=self.order).map(|m| (m as f64 * phi).sin_cos()).collect();
                for (o, mode) in out.iter_mut().zip(&self.modes) {
                    if let Mode::Sphere { l, m } = *mode {
                        *o = harmonics::harmonic_from_table(&table, &trig, l as usize, m as i64);
                    }
                }
            }
        }
        out[0] = 1.0;
        Ok(())
    }

    /// Row-major `n × len()` matrix of basis values at `points`.
    pub fn design_matrix(&self, points: &[Point]) -> Result<Vec<f64>> {
        use rayon::prelude::*;
        let k = self.len();
        let mut out = vec![0.0; points.len() * k];
        out.par_chunks_mut(k)
            .zip(points.par_iter())
            .try_for_each(|(row, x)| self.eval_all(x, row))?;
        Ok(out)
    }
}

fn circle_value(c: CircleMode, theta: f64) -> f64 {
    match c {
        CircleMode::Constant => 1.0,
        CircleMode::Cos(j) => SQRT_2 * (j as f64 * theta).cos(),
        CircleMode::Sin(j) => SQRT_2 * (j as f64 * theta).sin(),
    }
}

/// Values of circle modes with index `0..=max_index` at `theta`.
fn circle_table(max_index: usize, theta: f64) -> Vec<f64> {
    let mut t = Vec::with_capacity(max_index + 1);
    t.push(1.0);
    let max_freq = max_index.div_ceil(2);
    for j in 1..=max_freq {
        let (s, c) = (j as f64 * theta).sin_cos();
        t.push(SQRT_2 * c);
        t.push(SQRT_2 * s);
    }
    t.truncate(max_index + 1);
    t
}

/// Build the first `k` eigenpairs of the Laplace–Beltrami operator.
pub fn build_spectral_basis(model: ManifoldModel, k: usize) -> Result<SpectralBasis> {
    if k == 0 {
        return Err(Error::Parameter("truncation level K must be at least 1".into()));
    }
    let modes: Vec<Mode> = match model.kind {
        ManifoldKind::Circle => (0..k).map(|i| Mode::Circle(CircleMode::from_index(i))).collect(),
        ManifoldKind::Sphere2 => {
            let mut modes = Vec::with_capacity(k);
            'outer: for l in 0u32.. {
                for m in -(l as i32)..=(l as i32) {
                    modes.push(Mode::Sphere { l, m });
                    if modes.len() == k {
                        break 'outer;
                    }
                }
            }
            modes
        }
        ManifoldKind::Torus2 => torus_modes(k),
    };
    let eigenvalues: Vec<f64> = modes.iter().map(Mode::eigenvalue).collect();
    let order = modes
        .iter()
        .map(|m| match *m {
            Mode::Circle(c) => c.index(),
            Mode::Torus(a, b) => a.index().max(b.index()),
            Mode::Sphere { l, .. } => l as usize,
        })
        .max()
        .unwrap_or(0);
    Ok(SpectralBasis {
        model,
        modes,
        eigenvalues,
        order,
    })
}

fn torus_modes(k: usize) -> Vec<Mode> {
    // All products with frequencies up to `f` are complete below eigenvalue f².
    let mut f = ((k as f64).sqrt().ceil() as u32).max(1);
    loop {
        let max_index = 2 * f as usize;
        let mut cands: Vec<(u64, usize, usize)> = Vec::new();
        for u in 0..=max_index {
            for v in 0..=max_index {
                let (a, b) = (CircleMode::from_index(u), CircleMode::from_index(v));
                let e = (a.frequency() as u64).pow(2) + (b.frequency() as u64).pow(2);
                if e <= (f as u64).pow(2) {
                    cands.push((e, u, v));
                }
            }
        }
        if cands.len() >= k {
            cands.sort_unstable();
            return cands
                .into_iter()
                .take(k)
                .map(|(_, u, v)| Mode::Torus(CircleMode::from_index(u), CircleMode::from_index(v)))
                .collect();
        }
        f *= 2;
    }
}

/// `n` i.i.d. uniform points, deterministic given `seed`.
pub fn sample_uniform(model: ManifoldModel, n: usize, seed: u64) -> Result<Vec<Point>> {
    if n == 0 {
        return Err(Error::EmptyInput("sample size must be at least 1"));
    }
    let mut rng = rng_for(seed, stream::SAMPLE);
    let angle = |rng: &mut rand_chacha::ChaCha8Rng| wrap_angle(rng.random::<f64>() * TAU);
    let pts = (0..n)
        .map(|_| match model.kind {
            ManifoldKind::Circle => Point::Circle { theta: angle(&mut rng) },
            ManifoldKind::Torus2 => {
                let theta = angle(&mut rng);
                let phi = angle(&mut rng);
                Point::Torus { theta, phi }
            }
            ManifoldKind::Sphere2 => loop {
                let v: [f64; 3] = [
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                    rng.sample(StandardNormal),
                ];
                if let Ok(p) = Point::on_sphere(v) {
                    break p;
                }
            },
        })
        .collect();
    Ok(pts)
}

/// Empirical bounds `c_low k^{2/m} ≤ λ_k ≤ c_up k^{2/m}` over the basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylEnvelope {
    pub c_low: f64,
    pub c_up: f64,
    pub k_min: usize,
}

impl WeylEnvelope {
    pub fn ratio(&self) -> f64 {
        self.c_up / self.c_low
    }
}

/// Fit the Weyl envelope over 1-based indices `k_min..=K`.
pub fn weyl_envelope(basis: &SpectralBasis, k_min: usize) -> Result<WeylEnvelope> {
    if k_min < 2 {
        return Err(Error::Parameter(
            "k_min must be at least 2 (λ_1 = 0 makes the first ratio degenerate)".into(),
        ));
    }
    if basis.len() < k_min {
        return Err(Error::InsufficientBasis {
            required: k_min,
            available: basis.len(),
        });
    }
    let exponent = 2.0 / basis.model().dim() as f64;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for k in k_min..=basis.len() {
        let r = basis.eigenvalues()[k - 1] / (k as f64).powf(exponent);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok(WeylEnvelope {
        c_low: lo,
        c_up: hi,
        k_min,
    })
}
