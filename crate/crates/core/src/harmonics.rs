//! Digit harmonics. `phi_b` is the modulus of the exponential sum over one
//! digit, `Phi_N` the product over the free digit pairs of a palindrome of
//! length `2N + 1`; sums of `e(alpha n)` over palindromes factor through
//! them.
//!
//! Arguments are reduced modulo 1 before the trigonometric evaluation, and
//! products `alpha * w` with integer weights `w` go through
//! [`frac_mul`](crate::phase::frac_mul) so that large weights do not wipe
//! out the fractional part.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::{gcd, mul_mod};
use crate::palsets::{iter_pal_block, iter_palindromes_upto};
use crate::phase::{e, frac, frac_mul, CompensatedSum, Phase};
use crate::{Error, Result};

/// Budget on `K (N - 1) (b - 1)` for the exact moment.
pub const MOMENT_BUDGET: u64 = 64;
/// Largest number of partial sums kept during the moment convolution.
pub const MOMENT_SUPPORT_CAP: usize = 20_000_000;

/// Inputs of a harmonic evaluation or moment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicParams {
    pub base: u32,
    pub length: u32,
    /// `2K`; even.
    pub exponent: u32,
    pub alpha: f64,
}

impl HarmonicParams {
    pub fn new(base: u32, length: u32, exponent: u32, alpha: f64) -> Result<Self> {
        if base < 2 {
            return Err(Error::range("base", base, "b >= 2"));
        }
        if exponent == 0 || !exponent.is_multiple_of(2) {
            return Err(Error::Domain(format!("moment exponent must be even and positive, got {exponent}")));
        }
        Ok(HarmonicParams {
            base,
            length,
            exponent,
            alpha,
        })
    }

    pub fn k(&self) -> u32 {
        self.exponent / 2
    }

    pub fn phi(&self) -> f64 {
        phi_big(self.alpha, self.base, self.length)
    }

    pub fn moment(&self) -> Result<u128> {
        phi_moment_exact(self.base, self.length, self.k())
    }
}

/// `phi_b(alpha) = |sum_{0 <= m < b} e(alpha m)|`, through
/// `|sin(pi b t) / sin(pi t)|` with `t` the signed distance to the nearest
/// integer.
pub fn phi_little(alpha: f64, b: u32) -> f64 {
    let mut t = frac(alpha);
    if t > 0.5 {
        t -= 1.0;
    }
    if t == 0.0 {
        return b as f64;
    }
    ((PI * b as f64 * t).sin() / (PI * t).sin()).abs()
}

/// `b^n + b^(2N - n)` for `1 <= n < N`, or `None` past `u64`.
fn weights(b: u32, n: u32) -> Option<Vec<u64>> {
    (1..n)
        .map(|j| {
            let lo = (b as u64).checked_pow(j)?;
            let hi = (b as u64).checked_pow(2 * n - j)?;
            lo.checked_add(hi)
        })
        .collect()
}

/// `Phi_N(alpha)`; 1 when `N <= 1`.
pub fn phi_big(alpha: f64, b: u32, n: u32) -> f64 {
    phi_big_scaled(alpha, b, n, 1)
}

/// `Phi_N(s alpha)` with the integer factor `s` folded into the weights.
pub fn phi_big_scaled(alpha: f64, b: u32, n: u32, scale: u64) -> f64 {
    if n <= 1 {
        return 1.0;
    }
    match weights(b, n) {
        Some(ws) => ws
            .iter()
            .map(|&w| match w.checked_mul(scale) {
                Some(sw) => phi_little(frac_mul(alpha, sw), b),
                None => phi_little(frac_mul(frac_mul(alpha, scale), w), b),
            })
            .product(),
        None => {
            let bf = b as f64;
            let a = frac_mul(alpha, scale);
            (1..n)
                .map(|j| phi_little(a * (bf.powi(j as i32) + bf.powi((2 * n - j) as i32)), b))
                .product()
        }
    }
}

/// `Phi_N` at a split phase `h/q + s beta`, exact in the rational part.
pub(crate) fn phi_big_phase(h: u64, q: u64, beta: f64, scale: u64, b: u32, n: u32) -> Result<f64> {
    if n <= 1 {
        return Ok(1.0);
    }
    let ws = weights(b, n).ok_or_else(|| Error::range("Phi_N weights", format!("{b}^{}", 2 * n), "< 2^64"))?;
    let mut prod = 1.0;
    for w in ws {
        let sw = w
            .checked_mul(scale)
            .ok_or_else(|| Error::range("Phi_N shifted weight", format!("{w}*{scale}"), "< 2^64"))?;
        let rational = mul_mod(h % q, w % q, q) as f64 / q as f64;
        prod *= phi_little(frac(rational + frac_mul(beta, sw)), b);
    }
    Ok(prod)
}

/// `Phi_N` at an arbitrary [`Phase`].
pub fn phi_big_at(phase: &Phase, b: u32, n: u32) -> Result<f64> {
    if n <= 1 {
        return Ok(1.0);
    }
    let ws = weights(b, n).ok_or_else(|| Error::range("Phi_N weights", format!("{b}^{}", 2 * n), "< 2^64"))?;
    Ok(ws.iter().map(|&w| phi_little(phase.times(w), b)).product())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

fn exp_sum(iter: impl Iterator<Item = u64>, alpha: f64) -> (Complex64, u64) {
    let mut count = 0;
    let acc: CompensatedSum = iter
        .inspect(|_| count += 1)
        .map(|n| e(frac_mul(alpha, n)))
        .collect();
    (acc.value(), count)
}

/// `|sum_{n in Pi_b(2N)} e(alpha n)| <= b^2 Phi_N(alpha)`.
pub fn pal_exp_sum_check(alpha: f64, b: u32, n: u32) -> Result<InequalityCheck> {
    if !(b as u64).checked_pow(2 * n + 1).is_some_and(|v| v <= 1_000_000_000_000) {
        return Err(Error::range("pal_exp_sum_check", format!("{b}^{}", 2 * n + 1), "<= 10^12"));
    }
    let (sum, count) = exp_sum(iter_pal_block(b, 2 * n)?, alpha);
    let lhs = sum.norm();
    let rhs = (b as f64).powi(2) * phi_big(alpha, b, n);
    Ok(InequalityCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9 * count.max(1) as f64,
    })
}

/// The incomplete-sum bound over palindromes `n <= x` with an even number
/// of digits past the leading one.
pub fn incomplete_sum_check(alpha: f64, b: u32, x: u64) -> Result<InequalityCheck> {
    if x == 0 || x > 1_000_000_000 {
        return Err(Error::range("incomplete_sum_check", x, "1 <= x <= 10^9"));
    }
    let bb = b as u64;
    let even = iter_palindromes_upto(b, x)?.filter(|&n| crate::digits::digit_count(n, b) % 2 == 1);
    let (sum, count) = exp_sum(even, alpha);
    let lhs = sum.norm();
    let mut rhs = 0.0;
    let mut big_n = 0u32;
    while bb.checked_pow(2 * big_n).is_some_and(|v| v <= x) {
        for m in 0..=big_n {
            rhs += phi_big_scaled(alpha, b, m, bb.pow(big_n - m));
        }
        big_n += 1;
    }
    rhs *= (bb * bb) as f64;
    Ok(InequalityCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9 * count.max(1) as f64,
    })
}

/// Distribution of `sum_{i <= K} (u_i - v_i)` over digit pairs, indexed by
/// offset `K (b - 1)`.
fn difference_distribution(b: u32, k: u32) -> Vec<u128> {
    let single: Vec<u128> = (-(b as i64 - 1)..=(b as i64 - 1))
        .map(|t| (b as i64 - t.abs()) as u128)
        .collect();
    let mut dist = vec![1u128];
    for _ in 0..k {
        let mut next = vec![0u128; dist.len() + single.len() - 1];
        for (i, &x) in dist.iter().enumerate() {
            for (j, &y) in single.iter().enumerate() {
                next[i + j] += x * y;
            }
        }
        dist = next;
    }
    dist
}

/// `int_0^1 Phi_N(alpha)^(2K) d alpha` as the number of `2K`-tuples of digit
/// vectors `(u_n)_{1 <= n < N}` whose weighted differences cancel.
///
/// Weights are processed from the largest down, and a partial sum is dropped
/// once the remaining weights can no longer bring it back to zero.
pub fn phi_moment_exact(b: u32, n: u32, k: u32) -> Result<u128> {
    if b < 2 {
        return Err(Error::range("base", b, "b >= 2"));
    }
    if k == 0 {
        return Err(Error::Domain("moment order K must be >= 1".into()));
    }
    if n <= 1 {
        return Ok(1);
    }
    let load = k as u64 * (n as u64 - 1) * (b as u64 - 1);
    if load > MOMENT_BUDGET {
        return Err(Error::Budget(format!(
            "K(N-1)(b-1) = {load} exceeds the moment budget {MOMENT_BUDGET}"
        )));
    }
    let ws: Vec<i128> = match weights(b, n) {
        Some(ws) => ws.into_iter().map(|w| w as i128).collect(),
        _ => return Err(Error::Budget(format!("weights b^(2N) with b={b}, N={n} overflow"))),
    };
    let dist = difference_distribution(b, k);
    let span = (k * (b - 1)) as i128;
    // weights decrease in n
    let mut remaining: i128 = ws.iter().sum::<i128>() * span;
    let mut states: HashMap<i128, u128> = HashMap::from([(0, 1)]);
    for &w in &ws {
        remaining -= w * span;
        let mut next: HashMap<i128, u128> = HashMap::with_capacity(states.len() * 3);
        for (&s, &count) in &states {
            for (idx, &mult) in dist.iter().enumerate() {
                let t = s + (idx as i128 - span) * w;
                if t.abs() <= remaining {
                    *next.entry(t).or_insert(0) += count * mult;
                }
            }
        }
        if next.len() > MOMENT_SUPPORT_CAP {
            return Err(Error::Budget(format!(
                "moment convolution support {} exceeds {MOMENT_SUPPORT_CAP}",
                next.len()
            )));
        }
        states = next;
    }
    Ok(states.get(&0).copied().unwrap_or(0))
}

/// Exact moment divided by the main factor `b^(2(K-1)N + 2)` of the bound.
pub fn moment_bound_ratio(b: u32, n: u32, k: u32) -> Result<f64> {
    let exact = phi_moment_exact(b, n, k)? as f64;
    Ok(exact / (b as f64).powi((2 * (k - 1) * n + 2) as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub agree: bool,
}

/// Both sides of the shift identity
/// `sum*_h prod_{M < n < N} phi_b((h/q + beta) w_n)^delta
///  = sum*_h Phi_{N-M}(h/q + b^M beta)^delta`.
pub fn algebraic_shift_check(
    q: u64,
    b: u32,
    beta: f64,
    m: u32,
    n: u32,
    delta: f64,
) -> Result<ShiftCheck> {
    if q == 0 || q > 500 {
        return Err(Error::range("algebraic_shift_check", q, "1 <= q <= 500"));
    }
    if gcd(q, b as u64) != 1 {
        return Err(Error::NotCoprime(q, b as u64));
    }
    if m > n {
        return Err(Error::Domain(format!("need M <= N, got M={m}, N={n}")));
    }
    if delta <= 0.0 {
        return Err(Error::Domain("delta must be positive".into()));
    }
    let bb = b as u64;
    let full = weights(b, n).ok_or_else(|| Error::range("algebraic_shift_check", n, "b^(2N) < 2^64"))?;
    let scale = bb.pow(m);
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for h in (0..q).filter(|&h| gcd(h, q) == 1) {
        let mut prod = 1.0;
        for &w in full.iter().skip(m as usize) {
            let rational = mul_mod(h, w % q, q) as f64 / q as f64;
            prod *= phi_little(frac(rational + frac_mul(beta, w)), b);
        }
        lhs.push(prod.powf(delta));
        rhs.push(phi_big_phase(h, q, beta, scale, b, n - m)?.powf(delta));
    }
    let lhs = crate::phase::sum_f64(lhs);
    let rhs = crate::phase::sum_f64(rhs);
    Ok(ShiftCheck {
        lhs,
        rhs,
        agree: (lhs - rhs).abs() <= 1e-9 * q as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{naive_phi_big, quad_moment};
    use proptest::prelude::*;

    #[test]
    fn phi_little_examples() {
        assert_eq!(phi_little(0.0, 7), 7.0);
        assert!(phi_little(0.5, 2).abs() < 1e-15);
        assert!((phi_little(0.25, 2) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(phi_little(3.0, 10), 10.0);
    }

    #[test]
    fn phi_big_examples() {
        assert_eq!(phi_big(0.123, 10, 1), 1.0);
        assert_eq!(phi_big(0.123, 10, 0), 1.0);
        assert!((phi_big(0.0, 3, 4) - 27.0).abs() < 1e-12);
        for b in [2u32, 3, 10] {
            let alpha = 1.0 / (b + b * b * b) as f64;
            assert!((phi_big(alpha, b, 2) - b as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn sum_to_product_examples() {
        let c = pal_exp_sum_check(0.0, 10, 1).unwrap();
        assert!((c.lhs - 90.0).abs() < 1e-9 && c.rhs == 100.0 && c.holds);
        let c = pal_exp_sum_check(0.0, 2, 2).unwrap();
        assert!((c.lhs - 4.0).abs() < 1e-9 && (c.rhs - 8.0).abs() < 1e-12);
        assert!(pal_exp_sum_check(0.37, 10, 2).unwrap().holds);
        assert!(pal_exp_sum_check(0.1, 10, 6).is_err());
    }

    #[test]
    fn incomplete_sum_examples() {
        let c = incomplete_sum_check(0.0, 10, 99).unwrap();
        assert!((c.lhs - 9.0).abs() < 1e-9 && c.holds);
        assert!(incomplete_sum_check(0.5, 2, 500).unwrap().holds);
        assert!(incomplete_sum_check(1.0 / 3.0, 10, 10_000).unwrap().holds);
    }

    #[test]
    fn moment_examples() {
        assert_eq!(phi_moment_exact(7, 1, 3).unwrap(), 1);
        assert_eq!(phi_moment_exact(2, 2, 2).unwrap(), 6);
        assert_eq!(phi_moment_exact(2, 2, 1).unwrap(), 2);
        assert!(matches!(phi_moment_exact(10, 9, 1), Err(Error::Budget(_))));
        for (b, n, k) in [(2, 3, 2), (3, 3, 2), (2, 4, 3)] {
            let exact = phi_moment_exact(b, n, k).unwrap() as f64;
            let quad = quad_moment(b, n, k, None).unwrap();
            assert!((exact - quad).abs() <= 1e-6 * exact, "{b} {n} {k}: {exact} {quad}");
        }
    }

    #[test]
    fn shift_examples() {
        let c = algebraic_shift_check(9, 10, 0.77, 4, 4, 1.5).unwrap();
        assert!(c.agree && (c.lhs - 6.0).abs() < 1e-12);
        assert!(algebraic_shift_check(7, 10, 0.1, 1, 3, 2.0).unwrap().agree);
        assert!(algebraic_shift_check(5, 2, 0.0, 2, 5, 1.0).unwrap().agree);
        assert!(algebraic_shift_check(4, 2, 0.0, 2, 5, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn periodic_even_bounded(num in -5i64 << 20..5 << 20, b in 2u32..11, n in 0u32..6) {
            // dyadic alpha, so alpha + 1 and -alpha are exact
            let alpha = num as f64 / (1u64 << 20) as f64;
            let v = phi_big(alpha, b, n);
            prop_assert!((phi_little(alpha + 1.0, b) - phi_little(alpha, b)).abs() < 1e-9);
            prop_assert!((phi_big(alpha + 1.0, b, n) - v).abs() < 1e-9 * v.max(1.0));
            prop_assert!((phi_big(-alpha, b, n) - v).abs() < 1e-9 * v.max(1.0));
            prop_assert!(v >= 0.0 && v <= (b as f64).powi(n.saturating_sub(1) as i32) * (1.0 + 1e-12));
        }

        #[test]
        fn phi_big_matches_naive(alpha in 0.0f64..1.0, b in 2u32..6, n in 0u32..4) {
            let v = phi_big(alpha, b, n);
            prop_assert!((v - naive_phi_big(alpha, b, n)).abs() < 1e-6 * v.max(1.0));
        }
    }
}
