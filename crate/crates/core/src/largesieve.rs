//! Large-sieve quantities for the square moduli `q d^2`, `d <= D`: the
//! normalizer `Delta_eps`, the Farey spacing count and its supremum over
//! the circle, the dual quadratic form, and `Phi`-moments sampled at the
//! same fractions.

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{gcd, ramanujan_c};
use crate::harmonics::{phi_big_phase, MOMENT_BUDGET};
use crate::phase::{e, sum_f64, CompensatedSum};
use crate::{Error, Result};

pub const SPACING_CAP: u64 = 1_000_000;
pub const QUADRATIC_DIRECT_CAP: u64 = 100_000;
pub const QUADRATIC_FAST_CAP: u64 = 10_000_000;
pub const QUADRATIC_N_CAP: usize = 10_000;
pub const MOMENT_MODULI_CAP: u64 = 10_000;
/// The `epsilon` used when the large-sieve quantities are compared with
/// `Delta_eps`.
pub const DEFAULT_EPSILON: f64 = 0.1;

/// One cell of a large-sieve sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SieveGrid {
    pub d: u64,
    pub n: u64,
    pub q: u64,
    pub epsilon: f64,
    pub alpha: Option<f64>,
}

impl SieveGrid {
    pub fn new(d: u64, n: u64, q: u64, epsilon: f64) -> Result<Self> {
        let grid = SieveGrid {
            d,
            n,
            q,
            epsilon,
            alpha: None,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.n == 0 || self.q == 0 {
            return Err(Error::Domain("D, N and q must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(Error::range("epsilon", self.epsilon, "0 <= eps < 1"));
        }
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        delta_bound(self.d, self.n, self.q, self.epsilon)
    }
}

/// `Delta_eps = (DN)^eps (1 + q/N) (q D^3 + N sqrt(D))`.
pub fn delta_bound(d: u64, n: u64, q: u64, epsilon: f64) -> f64 {
    let (d, n, q) = (d as f64, n as f64, q as f64);
    (d * n).powf(epsilon) * (1.0 + q / n) * (q * d * d * d + n * d.sqrt())
}

fn moduli_cap(d: u64, q: u64, cap: u64, what: &'static str) -> Result<()> {
    if d == 0 || q == 0 {
        return Err(Error::Domain("D and q must be positive".into()));
    }
    match d.checked_mul(d).and_then(|dd| dd.checked_mul(q)) {
        Some(m) if m <= cap => Ok(()),
        _ => Err(Error::range(what, format!("q*D^2 with q={q}, D={d}"), format!("<= {cap}"))),
    }
}

/// `alpha` as an exact fraction `num / 2^s` with `s <= 62`; finer binary
/// digits are rounded away.
fn dyadic(alpha: f64) -> (i128, i128) {
    let a = alpha - alpha.floor();
    const S: i32 = 62;
    let scaled = (a * (1u64 << S) as f64).round() as i128;
    (scaled, 1i128 << S)
}

/// `||h/m - num/den|| <= 1/n`, exactly.
fn within(h: u64, m: u64, num: i128, den: i128, n: u64) -> bool {
    let period = m as i128 * den;
    let mut r = (h as i128 * den - m as i128 * num).rem_euclid(period);
    if 2 * r > period {
        r = period - r;
    }
    r * n as i128 <= period
}

/// `N` times the number of `h / (q d^2)`, `d <= D`, `(h, q d^2) = 1`,
/// within `1/N` of `alpha` on the circle.
pub fn spacing_count(d_max: u64, n: u64, q: u64, alpha: f64) -> Result<u64> {
    moduli_cap(d_max, q, SPACING_CAP, "spacing_count")?;
    if n == 0 {
        return Err(Error::Domain("N must be positive".into()));
    }
    let (num, den) = dyadic(alpha);
    let a = num as f64 / den as f64;
    let mut count = 0u64;
    for d in 1..=d_max {
        let m = q * d * d;
        if n <= 2 {
            count += crate::arith::euler_phi(m);
            continue;
        }
        let lo = ((a - 1.0 / n as f64) * m as f64).floor() as i64 - 1;
        let hi = (((a + 1.0 / n as f64) * m as f64).ceil() as i64 + 1).min(lo + m as i64 - 1);
        for t in lo..=hi {
            let h = t.rem_euclid(m as i64) as u64;
            if gcd(h, m) == 1 && within(h, m, num, den, n) {
                count += 1;
            }
        }
    }
    Ok(count * n)
}

/// The fractions `h / (q d^2)` for `d <= D`, sorted, ready for window sweeps
/// at any `N`.
#[derive(Debug, Clone)]
pub struct SpacingPoints {
    points: Vec<(u64, u64)>,
}

impl SpacingPoints {
    pub fn new(d_max: u64, q: u64) -> Result<Self> {
        moduli_cap(d_max, q, SPACING_CAP, "spacing_sup")?;
        let mut points = Vec::new();
        for d in 1..=d_max {
            let m = q * d * d;
            points.extend((0..m).filter(|&h| gcd(h, m) == 1).map(|h| (h, m)));
        }
        // reduced fractions with denominators <= 10^6 differ by more than
        // 10^-12, so the float key orders them exactly
        points.sort_by(|a, b| (a.0 as f64 / a.1 as f64).total_cmp(&(b.0 as f64 / b.1 as f64)));
        Ok(SpacingPoints { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `N` times the largest number of points in a closed arc of length `2/N`.
    pub fn sup(&self, n: u64) -> u64 {
        let p = self.points.len();
        if n <= 2 {
            return p as u64 * n;
        }
        // j-th point of the doubled circle, as (numerator, denominator)
        let at = |j: usize| -> (i128, i128) {
            let (h, m) = self.points[j % p];
            let lift = (j / p) as i128 * m as i128;
            (h as i128 + lift, m as i128)
        };
        let mut best = 0usize;
        let mut j = 0usize;
        for i in 0..p {
            let (hi, mi) = at(i);
            if j < i {
                j = i;
            }
            // extend while point j+1 lies within 2/N of point i
            while j + 1 < i + p {
                let (hj, mj) = at(j + 1);
                if (hj * mi - hi * mj) * n as i128 <= 2 * mi * mj {
                    j += 1;
                } else {
                    break;
                }
            }
            best = best.max(j - i + 1);
        }
        best as u64 * n
    }
}

/// `N sup_alpha` of the spacing count, by sweeping windows anchored at the
/// fractions themselves.
pub fn spacing_sup(d_max: u64, n: u64, q: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Domain("N must be positive".into()));
    }
    Ok(SpacingPoints::new(d_max, q)?.sup(n))
}

/// A sequence `gamma_n`, `|n| <= N`, stored from `n = -N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    values: Vec<Complex64>,
}

impl Coefficients {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.len().is_multiple_of(2) {
            return Err(Error::Domain("coefficients are indexed by |n| <= N, an odd count".into()));
        }
        if values.len() > 2 * QUADRATIC_N_CAP + 1 {
            return Err(Error::range("coefficients", values.len(), "N <= 10^4"));
        }
        Ok(Coefficients { values })
    }

    pub fn random_unit<R: rand::Rng>(rng: &mut R, n: usize) -> Self {
        let values = (0..2 * n + 1).map(|_| e(rng.gen::<f64>())).collect();
        Coefficients { values }
    }

    pub fn half_length(&self) -> usize {
        self.values.len() / 2
    }

    pub fn l2(&self) -> f64 {
        sum_f64(self.values.iter().map(|z| z.norm_sqr()))
    }

    /// `A(k) = sum_n gamma_(n+k) conj(gamma_n)` for `0 <= k <= 2N`.
    pub fn autocorrelation(&self) -> Vec<Complex64> {
        let len = self.values.len();
        (0..len)
            .map(|k| {
                let acc: CompensatedSum = (0..len - k)
                    .map(|i| self.values[i + k] * self.values[i].conj())
                    .collect();
                acc.value()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticForm {
    pub value: f64,
    /// `sum |gamma_n|^2`.
    pub l2: f64,
}

/// `c_m(k)` for `0 <= k < len`.
pub fn ramanujan_row(m: u64, len: usize) -> Vec<i64> {
    (0..len).map(|k| ramanujan_c(m, k as i64)).collect()
}

fn form_from_rows(acf: &[Complex64], row: &[i64]) -> f64 {
    // A(-k) = conj A(k) and c_m(-k) = c_m(k), so the k and -k terms pair up
    let mut terms = Vec::with_capacity(acf.len());
    terms.push(acf[0].re * row[0] as f64);
    for k in 1..acf.len() {
        terms.push(2.0 * acf[k].re * row[k] as f64);
    }
    sum_f64(terms)
}

/// `sum_{d <= D} sum*_{h (q d^2)} |sum_{|n| <= N} gamma_n e_{q d^2}(h n)|^2`,
/// evaluated as `sum_d sum_k A(k) c_{q d^2}(k)` with `A` the autocorrelation
/// of `gamma` and `c` Ramanujan's sum.
pub fn ls_quadratic_form(gamma: &Coefficients, d_max: u64, q: u64) -> Result<QuadraticForm> {
    moduli_cap(d_max, q, QUADRATIC_FAST_CAP, "ls_quadratic_form")?;
    let acf = gamma.autocorrelation();
    let value = sum_f64((1..=d_max).map(|d| form_from_rows(&acf, &ramanujan_row(q * d * d, acf.len()))));
    Ok(QuadraticForm {
        value,
        l2: gamma.l2(),
    })
}

/// The same quadratic form summed literally over `d`, `h` and `n`.
pub fn ls_quadratic_form_direct(gamma: &Coefficients, d_max: u64, q: u64) -> Result<QuadraticForm> {
    moduli_cap(d_max, q, QUADRATIC_DIRECT_CAP, "ls_quadratic_form_direct")?;
    let n = gamma.half_length() as i64;
    let mut terms = Vec::new();
    for d in 1..=d_max {
        let m = q * d * d;
        let roots = crate::phase::RootTable::new(m);
        for h in (0..m).filter(|&h| gcd(h, m) == 1) {
            let acc: CompensatedSum = gamma
                .values
                .iter()
                .enumerate()
                .map(|(i, &g)| {
                    let k = ((i as i64 - n) as i128 * h as i128).rem_euclid(m as i128) as u64;
                    g * roots.at(k)
                })
                .collect();
            terms.push(acc.value().norm_sqr());
        }
    }
    Ok(QuadraticForm {
        value: sum_f64(terms),
        l2: gamma.l2(),
    })
}

/// Quadratic forms for every `D <= d_max` at once: entry `D - 1` holds the
/// value for moduli `q d^2`, `d <= D`.
pub fn ls_quadratic_form_prefix(gamma: &Coefficients, d_max: u64, q: u64) -> Result<Vec<f64>> {
    moduli_cap(d_max, q, QUADRATIC_FAST_CAP, "ls_quadratic_form")?;
    let acf = gamma.autocorrelation();
    let mut out = Vec::with_capacity(d_max as usize);
    let mut total = 0.0;
    for d in 1..=d_max {
        total += form_from_rows(&acf, &ramanujan_row(q * d * d, acf.len()));
        out.push(total);
    }
    Ok(out)
}

/// Same as [`ls_quadratic_form_prefix`] with precomputed Ramanujan rows
/// (`rows[d - 1]` for modulus `q d^2`, each at least `2N + 1` long).
pub fn quadratic_prefix_with_rows(gamma: &Coefficients, rows: &[Vec<i64>]) -> Vec<f64> {
    let acf = gamma.autocorrelation();
    let mut total = 0.0;
    rows.iter()
        .map(|row| {
            total += form_from_rows(&acf, &row[..acf.len()]);
            total
        })
        .collect()
}

/// `sum_{d <= D} sum*_{h (q d^2)} Phi_N(h/(q d^2) + beta)^(2K)`.
pub fn phi_moment_square_moduli(b: u32, n: u32, k: u32, q: u64, d_max: u64, beta: f64) -> Result<f64> {
    moduli_cap(d_max, q, MOMENT_MODULI_CAP, "phi_moment_square_moduli")?;
    if b < 2 || k == 0 {
        return Err(Error::Domain("need b >= 2 and K >= 1".into()));
    }
    let load = k as u64 * n.saturating_sub(1) as u64 * (b as u64 - 1);
    if load > MOMENT_BUDGET {
        return Err(Error::range("phi_moment_square_moduli", load, format!("K(N-1)(b-1) <= {MOMENT_BUDGET}")));
    }
    let mut terms = Vec::new();
    for d in 1..=d_max {
        let m = q * d * d;
        for h in (0..m).filter(|&h| gcd(h, m) == 1) {
            terms.push(phi_big_phase(h, m, beta, 1, b, n)?.powi(2 * k as i32));
        }
    }
    Ok(sum_f64(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::euler_phi;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn delta_examples() {
        assert_eq!(delta_bound(1, 1, 1, 0.0), 4.0);
        let expect = 1.75 * (24.0 + 4.0 * 2f64.sqrt());
        assert!((delta_bound(2, 4, 3, 0.0) - expect).abs() < 1e-12);
        assert!((expect - 51.899).abs() < 1e-3);
        assert!(delta_bound(10, 100, 1, 0.1).is_finite());
    }

    #[test]
    fn spacing_examples() {
        assert_eq!(spacing_count(1, 1, 1, 0.0).unwrap(), 1);
        assert_eq!(spacing_count(1, 10, 4, 0.0).unwrap(), 0);
        assert_eq!(spacing_count(2, 10, 1, 0.25).unwrap(), 10);
        assert!(spacing_sup(1, 1, 1).unwrap() >= 1);
        // 0/1, 1/4, 3/4 with arcs of length 1/5: at most one point at a time
        assert_eq!(spacing_sup(2, 10, 1).unwrap(), 10);
        // a closed arc of length 1/2 centred at 0 holds all three
        assert_eq!(spacing_sup(2, 4, 1).unwrap(), 12);
        let s = spacing_sup(3, 5, 2).unwrap();
        assert!(s >= spacing_count(3, 5, 2, 0.5).unwrap());
        assert!(spacing_count(1000, 10, 2, 0.0).is_err());
    }

    #[test]
    fn quadratic_examples() {
        let zero = Coefficients::new(vec![Complex64::new(0.0, 0.0); 11]).unwrap();
        assert_eq!(ls_quadratic_form(&zero, 3, 2).unwrap().value, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = Coefficients::random_unit(&mut rng, 7);
        let total: Complex64 = g.values.iter().sum();
        let v = ls_quadratic_form(&g, 1, 1).unwrap();
        assert!((v.value - total.norm_sqr()).abs() < 1e-9);
        assert!((v.l2 - 15.0).abs() < 1e-9);
        let g = Coefficients::random_unit(&mut rng, 50);
        let fast = ls_quadratic_form(&g, 3, 2).unwrap().value;
        let direct = ls_quadratic_form_direct(&g, 3, 2).unwrap().value;
        assert!((fast - direct).abs() < 1e-8 * direct.max(1.0));
    }

    #[test]
    fn moment_square_examples() {
        let v = phi_moment_square_moduli(3, 1, 2, 5, 3, 0.3).unwrap();
        let expect: u64 = (1..=3).map(|d| euler_phi(5 * d * d)).sum();
        assert!((v - expect as f64).abs() < 1e-9);
        assert!((phi_moment_square_moduli(2, 2, 1, 1, 1, 0.0).unwrap() - 4.0).abs() < 1e-12);
        assert!(phi_moment_square_moduli(2, 2, 2, 3, 2, 0.0).unwrap() > 0.0);
    }

    proptest! {
        #[test]
        fn sup_dominates_points(d in 1u64..6, n in 1u64..30, q in 1u64..8, alpha in 0.0f64..1.0) {
            prop_assert!(spacing_sup(d, n, q).unwrap() >= spacing_count(d, n, q, alpha).unwrap());
        }

        #[test]
        fn monotone_in_d(d in 1u64..10, n in 1u64..20, q in 1u64..6, seed in 0u64..1000) {
            prop_assert!(spacing_sup(d + 1, n, q).unwrap() >= spacing_sup(d, n, q).unwrap());
            let g = Coefficients::random_unit(&mut ChaCha8Rng::seed_from_u64(seed), n as usize);
            let lo = ls_quadratic_form(&g, d, q).unwrap().value;
            let hi = ls_quadratic_form(&g, d + 1, q).unwrap().value;
            prop_assert!(hi >= lo - 1e-9 * hi.abs().max(1.0));
        }

        #[test]
        fn fast_form_matches_direct(d in 1u64..4, n in 0usize..12, q in 1u64..6, seed in 0u64..1000) {
            let g = Coefficients::random_unit(&mut ChaCha8Rng::seed_from_u64(seed), n);
            let fast = ls_quadratic_form(&g, d, q).unwrap().value;
            let direct = ls_quadratic_form_direct(&g, d, q).unwrap().value;
            prop_assert!((fast - direct).abs() <= 1e-9 * direct.max(1.0));
        }
    }
}
