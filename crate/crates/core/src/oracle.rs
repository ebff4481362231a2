//! Brute-force references.
//!
//! Nothing here calls into the fast paths it is compared against: digits
//! are reversed through strings, factorizations use plain trial division,
//! exponentials are evaluated term by term. The appendix inequalities
//! (van der Corput, the congruence-count bound) live here as well since
//! they are checked by exhaustive evaluation.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::{Error, Result};

const PAL_SET_CAP: u64 = 10_000_000;
const SQUAREFREE_CAP: u64 = 1_000_000_000;

fn to_radix_string(mut n: u64, b: u32) -> String {
    const SYMBOLS: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
    assert!((2..=SYMBOLS.len() as u32).contains(&b));
    if n == 0 {
        return "0".into();
    }
    let mut out = Vec::new();
    while n > 0 {
        out.push(SYMBOLS[(n % b as u64) as usize]);
        n /= b as u64;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

fn reads_same_backwards(n: u64, b: u32) -> bool {
    let s = to_radix_string(n, b);
    s.chars().rev().collect::<String>() == s
}

/// Every `1 <= n <= x` whose base-`b` string equals its reverse.
pub fn naive_pal_set(b: u32, x: u64) -> Result<Vec<u64>> {
    if x > PAL_SET_CAP {
        return Err(Error::range("naive_pal_set", x, "x <= 10^7"));
    }
    Ok((1..=x).filter(|&n| reads_same_backwards(n, b)).collect())
}

/// Palindromes in `[b^L, b^(L+1))` by string reversal.
pub fn naive_pal_block(b: u32, l: u32) -> Result<Vec<u64>> {
    let lo = (b as u64).pow(l);
    let hi = lo * b as u64;
    if hi > PAL_SET_CAP {
        return Err(Error::range("naive_pal_block", hi, "b^(L+1) <= 10^7"));
    }
    Ok((lo..hi).filter(|&n| reads_same_backwards(n, b)).collect())
}

/// Exponents of the full trial-division factorization.
fn naive_exponents(mut n: u64) -> Vec<u32> {
    let mut exps = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            exps.push(e);
        }
        p += 1;
    }
    if n > 1 {
        exps.push(1);
    }
    exps
}

/// `mu(n)^2 = 1` by complete factorization.
pub fn naive_squarefree(n: u64) -> Result<bool> {
    if n == 0 || n > SQUAREFREE_CAP {
        return Err(Error::range("naive_squarefree", n, "1 <= n <= 10^9"));
    }
    Ok(naive_exponents(n).iter().all(|&e| e == 1))
}

fn naive_gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        naive_gcd(b, a % b)
    }
}

/// `c_q(n)` summed directly over the units.
pub fn naive_ramanujan(q: u64, n: i64) -> Complex64 {
    (0..q)
        .filter(|&h| naive_gcd(h, q) == 1)
        .map(|h| {
            let k = (h as i128 * n as i128).rem_euclid(q as i128) as f64;
            Complex64::from_polar(1.0, TAU * k / q as f64)
        })
        .sum()
}

/// `K_2(c, d; q)` term by term with inverses found by search.
pub fn naive_k2(c: i64, d: i64, q: u64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..q {
        if naive_gcd(n, q) != 1 {
            continue;
        }
        let inv = (0..q).find(|&m| (m * n) % q == 1 % q).expect("unit");
        let phase = (c as i128 * (inv * inv % q) as i128 + d as i128 * n as i128)
            .rem_euclid(q as i128) as f64;
        acc += Complex64::from_polar(1.0, TAU * phase / q as f64);
    }
    acc / (q as f64).sqrt()
}

/// Complex numbers `z_1..z_N` with the shift cap `H` of van der Corput.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSample {
    pub z: Vec<Complex64>,
    pub h: usize,
}

impl SequenceSample {
    /// Unit-modulus values with uniform random arguments.
    pub fn random_unit<R: Rng>(rng: &mut R, len: usize, h: usize) -> Self {
        let z = (0..len)
            .map(|_| Complex64::from_polar(1.0, TAU * rng.gen::<f64>()))
            .collect();
        SequenceSample { z, h }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `|sum z_n|^2` against the van der Corput bound
/// `(N + H - 1) / H * sum_{|h| < H} (1 - |h| / H) sum_n z_{n+h} conj(z_n)`.
pub fn vdc_check(s: &SequenceSample) -> Result<InequalityCheck> {
    let n = s.z.len();
    if s.h == 0 || n == 0 {
        return Err(Error::Domain("van der Corput needs N, H >= 1".into()));
    }
    let h_cap = s.h as i64;
    let lhs = s.z.iter().sum::<Complex64>().norm_sqr();
    let mut acc = Complex64::new(0.0, 0.0);
    for h in (1 - h_cap)..h_cap {
        let weight = 1.0 - h.unsigned_abs() as f64 / s.h as f64;
        let mut corr = Complex64::new(0.0, 0.0);
        for i in 0..n as i64 {
            let j = i + h;
            if j >= 0 && j < n as i64 {
                corr += s.z[j as usize] * s.z[i as usize].conj();
            }
        }
        acc += corr * weight;
    }
    let scale = (n as f64 + s.h as f64 - 1.0) / s.h as f64;
    let rhs = scale * acc.re;
    let tol = 1e-7 * (n * n) as f64;
    if acc.im.abs() > tol {
        return Err(Error::Numeric(format!(
            "van der Corput right side not real: imaginary part {}",
            acc.im
        )));
    }
    Ok(InequalityCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CongBoundCheck {
    pub lhs: u64,
    pub rhs: f64,
    pub holds: bool,
}

fn naive_tau(q: u64) -> u64 {
    (1..=q).filter(|d| q.is_multiple_of(*d)).count() as u64
}

/// `sum_{m <= M} max_a #{n <= N : m n = a (q)}` against `M N tau(q) / q + M tau(q)`.
pub fn cong_bound_check(m_max: u64, n_max: u64, q: u64) -> Result<CongBoundCheck> {
    if m_max == 0 || n_max == 0 || q == 0 {
        return Err(Error::Domain("cong_bound_check needs M, N, q >= 1".into()));
    }
    if m_max > 10_000 || n_max > 10_000 || q > 10_000 {
        return Err(Error::range("cong_bound_check", m_max.max(n_max).max(q), "<= 10^4"));
    }
    let mut hist = vec![0u64; q as usize];
    let mut lhs = 0;
    for m in 1..=m_max {
        hist.iter_mut().for_each(|c| *c = 0);
        for n in 1..=n_max {
            hist[((m * n) % q) as usize] += 1;
        }
        lhs += hist.iter().copied().max().unwrap_or(0);
    }
    let t = naive_tau(q) as f64;
    let rhs = (m_max * n_max) as f64 * t / q as f64 + m_max as f64 * t;
    Ok(CongBoundCheck {
        lhs,
        rhs,
        holds: (lhs as f64) <= rhs,
    })
}

/// `Phi_N(alpha)` from its definition, every `phi_b` factor summed term by term.
pub fn naive_phi_big(alpha: f64, b: u32, n: u32) -> f64 {
    let mut prod = 1.0;
    for j in 1..n {
        let w = (b as f64).powi(j as i32) + (b as f64).powi((2 * n - j) as i32);
        let s: Complex64 = (0..b)
            .map(|m| Complex64::from_polar(1.0, TAU * alpha * w * m as f64))
            .sum();
        prod *= s.norm();
    }
    prod
}

/// Periodic trapezoid rule for `int_0^1 Phi_N^(2K)`, doubling the panel
/// count from `panels` (default `4 K b^(2N)`) until two successive values
/// agree to a relative `1e-6`.
pub fn quad_moment(b: u32, n: u32, k: u32, panels: Option<usize>) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("moment order K must be >= 1".into()));
    }
    if n <= 1 {
        return Ok(1.0);
    }
    let start = panels.unwrap_or_else(|| 4 * k as usize * (b as usize).pow(2 * n)).max(8);
    let eval = |m: usize| -> f64 {
        let h = 1.0 / m as f64;
        let s: f64 = (0..m)
            .map(|i| naive_phi_big(i as f64 * h, b, n).powi(2 * k as i32))
            .sum();
        s * h
    };
    let mut m = start;
    let mut prev = eval(m);
    for _ in 0..24 {
        m *= 2;
        let next = eval(m);
        if (next - prev).abs() <= 1e-6 * next.abs() {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Numeric(format!(
        "moment quadrature for b={b} N={n} K={k} did not settle"
    )))
}

/// Literal double loop for the square-divisor pair count of a block.
pub fn naive_square_pair_count(b: u32, l: u32, q: u64, a: i64, n_max: u64) -> Result<u64> {
    if q == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    let a = (a as i128).rem_euclid(q as i128) as u64;
    let block = naive_pal_block(b, l)?;
    let mut count = 0;
    for n in (n_max / 2 + 1)..=n_max {
        for &ell in &block {
            if ell % q == a && naive_gcd(ell, b as u64) == 1 && ell % (n * n) == 0 {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Exact discrepancy sup by recomputing everything at every integer `y <= x`.
pub fn naive_discrepancy(b: u32, x: u64, q: u64) -> Result<f64> {
    if x > 100_000 {
        return Err(Error::range("naive_discrepancy", x, "x <= 10^5"));
    }
    let bb = b as u64;
    let m_b = bb * bb * bb - bb;
    if naive_gcd(q, m_b) != 1 {
        return Err(Error::Domain(format!("q={q} shares a factor with {m_b}")));
    }
    let density = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
    let series = |n: u64| -> f64 {
        let mut s = 1.0;
        let mut p = 2;
        let mut m = n;
        while m > 1 {
            if m.is_multiple_of(p) {
                s *= 1.0 / (1.0 - 1.0 / (p * p) as f64);
                while m.is_multiple_of(p) {
                    m /= p;
                }
            }
            p += 1;
        }
        s
    };
    let factor = density * series(m_b) * series(q) / q as f64;
    let mut star = Vec::new();
    let mut best: f64 = 0.0;
    for y in 0..=x {
        if y >= 1 && reads_same_backwards(y, b) && naive_gcd(y, m_b) == 1 {
            star.push(y);
        }
        let main = factor * star.len() as f64;
        for a in 0..q {
            if naive_gcd(a, q) != 1 {
                continue;
            }
            let count = star
                .iter()
                .filter(|&&n| n % q == a && naive_exponents(n).iter().all(|&e| e == 1))
                .count() as f64;
            best = best.max((count - main).abs());
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pal_set_examples() {
        let mut ten: Vec<u64> = (1..=9).collect();
        ten.extend([11, 22]);
        assert_eq!(naive_pal_set(10, 30).unwrap(), ten);
        assert_eq!(naive_pal_set(2, 10).unwrap(), vec![1, 3, 5, 7, 9]);
        assert!(naive_pal_set(10, 0).unwrap().is_empty());
        assert!(naive_pal_set(10, PAL_SET_CAP + 1).is_err());
    }

    #[test]
    fn squarefree_examples() {
        assert!(naive_squarefree(1).unwrap());
        assert!(!naive_squarefree(49).unwrap());
        assert!(naive_squarefree(210).unwrap());
        assert!(naive_squarefree(0).is_err());
    }

    #[test]
    fn vdc_examples() {
        let ones = |n, h| SequenceSample {
            z: vec![Complex64::new(1.0, 0.0); n],
            h,
        };
        let c = vdc_check(&ones(10, 1)).unwrap();
        assert!((c.lhs - 100.0).abs() < 1e-9 && (c.rhs - 100.0).abs() < 1e-9 && c.holds);
        let c = vdc_check(&ones(10, 10)).unwrap();
        assert!(c.rhs >= 100.0 - 1e-9 && c.holds);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = rng.gen_range(1..=60);
            let h = rng.gen_range(1..=n);
            assert!(vdc_check(&SequenceSample::random_unit(&mut rng, n, h)).unwrap().holds);
        }
    }

    #[test]
    fn cong_examples() {
        let c = cong_bound_check(1, 1, 1).unwrap();
        assert_eq!((c.lhs, c.rhs, c.holds), (1, 2.0, true));
        let c = cong_bound_check(10, 10, 1).unwrap();
        assert_eq!((c.lhs, c.rhs, c.holds), (100, 110.0, true));
        // (4, 10, 6): m = 1, 2, 3, 4 give maxima 2, 4, 5, 4 -> 15
        let c = cong_bound_check(4, 10, 6).unwrap();
        assert_eq!(c.lhs, 15);
        assert!((c.rhs - (40.0 * 4.0 / 6.0 + 16.0)).abs() < 1e-12);
    }

    #[test]
    fn quad_moment_examples() {
        assert_eq!(quad_moment(5, 1, 3, None).unwrap(), 1.0);
        assert!((quad_moment(2, 2, 2, None).unwrap() - 6.0).abs() < 1e-6);
        assert!((quad_moment(2, 2, 1, None).unwrap() - 2.0).abs() < 1e-6);
    }

    #[test]
    fn square_pair_examples() {
        assert_eq!(naive_square_pair_count(2, 4, 1, 0, 2).unwrap(), 0);
        assert_eq!(naive_square_pair_count(10, 2, 1, 0, 40).unwrap(), 0);
    }

    #[test]
    fn ramanujan_direct() {
        assert!((naive_ramanujan(4, 2) - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
        assert!((naive_ramanujan(1, 7) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }
}
