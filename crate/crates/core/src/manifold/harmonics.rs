//! Real spherical harmonics on S² normalized against the uniform probability
//! measure, and the Legendre polynomial recurrence.
//!
//! The associated Legendre table uses the convention
//! `P̃_l^m = sqrt((2l+1)(l-m)!/(l+m)!) P_l^m` (no Condon–Shortley phase), so
//! that `P̃_0^0 = 1` and the real harmonic
//! `f_lm = P̃_l^{|m|}(cos θ) · {1, √2 cos(mφ), √2 sin(|m|φ)}` has unit
//! `L²(ν)` norm. The recurrences below are stable well past `l = 100`.

use std::f64::consts::SQRT_2;

/// Lower-triangular table of `P̃_l^m(cos θ)` for `0 ≤ m ≤ l ≤ l_max`.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    l_max: usize,
    values: Vec<f64>,
}

impl LegendreTable {
    #[inline]
    fn index(l: usize, m: usize) -> usize {
        l * (l + 1) / 2 + m
    }

    pub fn compute(l_max: usize, cos_theta: f64, sin_theta: f64) -> Self {
        let mut values = vec![0.0; (l_max + 1) * (l_max + 2) / 2];
        values[0] = 1.0;
        // Sectoral terms P̃_m^m.
        for m in 1..=l_max {
            let mf = m as f64;
            let prev = values[Self::index(m - 1, m - 1)];
            values[Self::index(m, m)] = ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_theta * prev;
        }
        for m in 0..=l_max {
            if m + 1 <= l_max {
                let mf = m as f64;
                values[Self::index(m + 1, m)] =
                    (2.0 * mf + 3.0).sqrt() * cos_theta * values[Self::index(m, m)];
            }
            for l in (m + 2)..=l_max {
                let lf = l as f64;
                let mf = m as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0))
                    .sqrt();
                values[Self::index(l, m)] = a
                    * (cos_theta * values[Self::index(l - 1, m)] - b * values[Self::index(l - 2, m)]);
            }
        }
        LegendreTable { l_max, values }
    }

    pub fn get(&self, l: usize, m: usize) -> f64 {
        debug_assert!(m <= l && l <= self.l_max);
        self.values[Self::index(l, m)]
    }
}

/// Spherical angles of a unit vector: `(cos θ, sin θ, φ)`.
pub fn spherical_angles(xyz: &[f64; 3]) -> (f64, f64, f64) {
    let [x, y, z] = *xyz;
    let rho = x.hypot(y);
    let cos_theta = z.clamp(-1.0, 1.0);
    (cos_theta, rho, y.atan2(x))
}

/// All real harmonics with `l ≤ l_max` at one point, in the order
/// `l = 0, 1, …` and within each level `m = -l, …, l`.
pub fn real_harmonics(l_max: usize, xyz: &[f64; 3], out: &mut Vec<f64>) {
    let (cos_theta, sin_theta, phi) = spherical_angles(xyz);
    let table = LegendreTable::compute(l_max, cos_theta, sin_theta);
    let trig: Vec<(f64, f64)> = (0..=l_max).map(|m| (m as f64 * phi).sin_cos()).collect();
    out.clear();
    out.reserve((l_max + 1) * (l_max + 1));
    for l in 0..=l_max {
        for m in -(l as i64)..=(l as i64) {
            out.push(harmonic_from_table(&table, &trig, l, m));
        }
    }
}

#[inline]
pub(crate) fn harmonic_from_table(
    table: &LegendreTable,
    trig: &[(f64, f64)],
    l: usize,
    m: i64,
) -> f64 {
    let am = m.unsigned_abs() as usize;
    let p = table.get(l, am);
    match m.cmp(&0) {
        std::cmp::Ordering::Equal => p,
        std::cmp::Ordering::Greater => SQRT_2 * p * trig[am].1,
        std::cmp::Ordering::Less => SQRT_2 * p * trig[am].0,
    }
}

/// Legendre polynomials `P_0(x), …, P_{l_max}(x)` by Bonnet's recurrence.
pub fn legendre_polynomials(l_max: usize, x: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(l_max + 1);
    p.push(1.0);
    if l_max >= 1 {
        p.push(x);
    }
    for l in 2..=l_max {
        let lf = l as f64;
        let next = ((2.0 * lf - 1.0) * x * p[l - 1] - (lf - 1.0) * p[l - 2]) / lf;
        p.push(next);
    }
    p
}
