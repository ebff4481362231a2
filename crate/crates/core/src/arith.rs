//! Elementary arithmetic: factorization, the classical multiplicative
//! functions, modular inverses and CRT, Ramanujan sums and the singular
//! series `S(n) = prod_{p | n} (1 - p^-2)^-1`.
//!
//! Integers are `u64` capped at [`INT_CAP`](crate::INT_CAP); products go
//! through `u128`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, INT_CAP};

/// Primes up to this bound are precomputed; it is the cube root of
/// [`INT_CAP`], which is all trial division ever needs.
pub const PRIME_TABLE_LIMIT: u32 = 1_000_000;

/// Natural density of the square-free integers, `6 / pi^2`.
pub const SQUAREFREE_DENSITY: f64 = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);

/// The shared prime table, built on first use.
pub fn small_primes() -> &'static [u32] {
    static TABLE: OnceLock<Vec<u32>> = OnceLock::new();
    TABLE.get_or_init(|| sieve_primes(PRIME_TABLE_LIMIT))
}

fn sieve_primes(limit: u32) -> Vec<u32> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u32);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// `gcd(|a|, q)`, with `gcd(0, q) = q`.
pub fn gcd_signed(a: i64, q: u64) -> u64 {
    gcd(a.unsigned_abs(), q)
}

/// Least nonnegative residue of `a` modulo `q`.
pub fn reduce(a: i64, q: u64) -> u64 {
    debug_assert!(q > 0);
    (a as i128).rem_euclid(q as i128) as u64
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Floor of the square root.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r > 0 && (r as u128) * (r as u128) > n as u128 {
        r -= 1;
    }
    while ((r + 1) as u128) * ((r + 1) as u128) <= n as u128 {
        r += 1;
    }
    r
}

/// Floor of the cube root.
pub fn icbrt(n: u64) -> u64 {
    let mut r = (n as f64).cbrt() as u64;
    let cube = |x: u64| (x as u128) * (x as u128) * (x as u128);
    while r > 0 && cube(r) > n as u128 {
        r -= 1;
    }
    while cube(r + 1) <= n as u128 {
        r += 1;
    }
    r
}

/// Returns `r` when `n = r^2`.
pub fn exact_sqrt(n: u64) -> Option<u64> {
    let r = isqrt(n);
    (r * r == n).then_some(r)
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard-Brent on an odd composite with no small factors.
fn pollard_brent(n: u64) -> u64 {
    let f = |x: u64, c: u64| (mul_mod(x, x, n) + c) % n;
    for c in 1u64.. {
        let (mut y, mut r, mut q, m) = (2u64, 1u64, 1u64, 128u64);
        let mut g = 1;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y, c);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y, c);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys, c);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

/// Prime factorization as `(p, e)` pairs sorted by `p`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Factorization(Vec<(u64, u32)>);

impl Factorization {
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.0
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().map(|&(p, _)| p)
    }

    pub fn value(&self) -> u128 {
        self.0
            .iter()
            .map(|&(p, e)| (p as u128).pow(e))
            .product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.0.iter().all(|&(_, e)| e == 1)
    }

    fn push(&mut self, p: u64, e: u32) {
        if e == 0 {
            return;
        }
        match self.0.iter_mut().find(|(q, _)| *q == p) {
            Some(slot) => slot.1 += e,
            None => self.0.push((p, e)),
        }
    }
}

/// Complete factorization of `1 <= n <= 10^18`.
///
/// Trial division runs while `p^3` does not exceed the unfactored part, so
/// the leftover cofactor has at most two prime factors: it is 1, a prime,
/// a prime square, or a product of two distinct primes split by Pollard-Brent.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain("cannot factor 0".into()));
    }
    if n > INT_CAP {
        return Err(Error::range("factorize", n, "n <= 10^18"));
    }
    let mut out = Factorization::default();
    let mut m = n;
    for &p in small_primes() {
        let p = p as u64;
        if p * p * p > m {
            break;
        }
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        out.push(p, e);
    }
    if m > 1 {
        if let Some(r) = exact_sqrt(m) {
            out.push(r, 2);
        } else if is_prime(m) {
            out.push(m, 1);
        } else {
            let p = pollard_brent(m);
            let q = m / p;
            out.push(p.min(q), 1);
            out.push(p.max(q), 1);
        }
    }
    out.0.sort_unstable();
    Ok(out)
}

/// `mu(n)^2 = 1`, decided without a full factorization: trial division
/// exits on the first repeated prime, and the cofactor left once `p^3`
/// exceeds it is square-full only if it is a perfect square.
pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    for &p in small_primes() {
        let p = p as u64;
        if p * p * p > m {
            break;
        }
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return false;
            }
        }
    }
    m == 1 || exact_sqrt(m).is_none()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ArithmeticFunctions {
    pub phi: u64,
    pub mobius: i8,
    pub tau: u64,
    pub odd_part: u64,
}

pub fn arithmetic_functions(n: u64) -> Result<ArithmeticFunctions> {
    let f = factorize(n)?;
    let mut phi = 1u64;
    let mut tau = 1u64;
    let mut mobius = 1i8;
    for &(p, e) in f.pairs() {
        phi *= (p - 1) * p.pow(e - 1);
        tau *= e as u64 + 1;
        mobius = if e > 1 { 0 } else { -mobius };
    }
    Ok(ArithmeticFunctions {
        phi,
        mobius,
        tau,
        odd_part: n >> n.trailing_zeros(),
    })
}

pub fn euler_phi(n: u64) -> u64 {
    arithmetic_functions(n).map(|f| f.phi).unwrap_or(0)
}

pub fn mobius(n: u64) -> i8 {
    arithmetic_functions(n).map(|f| f.mobius).unwrap_or(0)
}

pub fn tau(n: u64) -> u64 {
    arithmetic_functions(n).map(|f| f.tau).unwrap_or(0)
}

pub fn odd_part(n: u64) -> u64 {
    if n == 0 {
        0
    } else {
        n >> n.trailing_zeros()
    }
}

/// Mobius values `mu(0..=limit)` by a linear sieve (`mu(0)` is set to 0).
pub fn mobius_table(limit: usize) -> Vec<i8> {
    let mut mu = vec![0i8; limit + 1];
    if limit == 0 {
        return mu;
    }
    mu[1] = 1;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p;
            if ip > limit {
                break;
            }
            composite[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    mu
}

/// The inverse of `a` modulo `q` in `[0, q)`; modulo 1 it is 0.
pub fn mod_inverse(a: i64, q: u64) -> Result<u64> {
    if q == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    if q == 1 {
        return Ok(0);
    }
    let (mut r0, mut r1) = (q as i128, reduce(a, q) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (t0, t1) = (t1, t0 - k * t1);
    }
    if r0 != 1 {
        return Err(Error::NoInverse { a, q });
    }
    Ok(t0.rem_euclid(q as i128) as u64)
}

/// The unique `x` in `[0, q1 q2)` with `x = a1 (q1)` and `x = a2 (q2)`.
pub fn crt_combine(a1: i64, q1: u64, a2: i64, q2: u64) -> Result<u64> {
    if q1 == 0 || q2 == 0 {
        return Err(Error::Domain("moduli must be positive".into()));
    }
    if gcd(q1, q2) != 1 {
        return Err(Error::NotCoprime(q1, q2));
    }
    let m = q1 as u128 * q2 as u128;
    if m > u64::MAX as u128 {
        return Err(Error::range("crt_combine", m, "q1 q2 < 2^64"));
    }
    let (r1, r2) = (reduce(a1, q1), reduce(a2, q2));
    // x = r1 + q1 * t with t = (r2 - r1) / q1 mod q2
    let inv = mod_inverse(q1 as i64 % q2 as i64, q2)?;
    let diff = (r2 as i128 - r1 as i128).rem_euclid(q2 as i128) as u64;
    let t = mul_mod(diff, inv, q2);
    Ok((r1 as u128 + q1 as u128 * t as u128) as u64)
}

/// Exact reduced fraction with a positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rational {
    num: i128,
    den: i128,
}

impl Rational {
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd_u128(num.unsigned_abs(), den.unsigned_abs()) as i128;
        let sign = if den < 0 { -1 } else { 1 };
        Rational {
            num: sign * num / g.max(1),
            den: sign * den / g.max(1),
        }
    }

    pub fn integer(n: i128) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    /// Representative in `[0, 1)` of the class modulo 1.
    pub fn fract(&self) -> Self {
        Rational::new(self.num.rem_euclid(self.den), self.den)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        let g = gcd_u128(self.den as u128, rhs.den as u128) as i128;
        let den = self.den / g * rhs.den;
        Rational::new(self.num * (rhs.den / g) + rhs.num * (self.den / g), den)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational {
            num: -self.num,
            den: self.den,
        }
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        self + (-rhs)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        let g1 = gcd_u128(self.num.unsigned_abs(), rhs.den as u128).max(1) as i128;
        let g2 = gcd_u128(rhs.num.unsigned_abs(), self.den as u128).max(1) as i128;
        Rational::new(
            (self.num / g1) * (rhs.num / g2),
            (self.den / g2) * (rhs.den / g1),
        )
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Both sides of `1/(mn) = inv(m)/n + inv(n)/m (mod 1)` for coprime `m, n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BezoutCheck {
    pub lhs: Rational,
    pub rhs: Rational,
    pub holds: bool,
}

pub fn bezout_check(m: u64, n: u64) -> Result<BezoutCheck> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("Bezout identity needs m, n >= 1".into()));
    }
    if gcd(m, n) != 1 {
        return Err(Error::NotCoprime(m, n));
    }
    let m_inv = mod_inverse(m as i64, n)? as i128;
    let n_inv = mod_inverse(n as i64, m)? as i128;
    let lhs = Rational::new(1, m as i128 * n as i128).fract();
    let rhs = (Rational::new(m_inv, n as i128) + Rational::new(n_inv, m as i128)).fract();
    Ok(BezoutCheck {
        lhs,
        rhs,
        holds: lhs == rhs,
    })
}

/// Ramanujan's sum `c_q(n) = sum_{d | (q, n)} d mu(q / d)`.
pub fn ramanujan_c(q: u64, n: i64) -> i64 {
    assert!(q >= 1, "ramanujan_c needs q >= 1");
    let g = gcd_signed(n, q);
    let fq = factorize(q).expect("q within cap");
    // Multiplicative in q: c_{p^k}(n) depends only on v_p(g).
    let mut acc = 1i64;
    for &(p, k) in fq.pairs() {
        let mut v = 0;
        let mut t = g;
        while t.is_multiple_of(p) && v < k {
            t /= p;
            v += 1;
        }
        let local = if v == k {
            (p as i64 - 1) * (p as i64).pow(k - 1)
        } else if v == k - 1 {
            -(p as i64).pow(k - 1)
        } else {
            0
        };
        acc *= local;
        if acc == 0 {
            break;
        }
    }
    acc
}

/// `S(n) = prod_{p | n} p^2 / (p^2 - 1)` as an exact fraction, `S(1) = 1`.
pub fn singular_series(n: u64) -> Result<Rational> {
    let f = factorize(n)?;
    let mut acc = Rational::integer(1);
    for p in f.primes() {
        let p2 = p as i128 * p as i128;
        acc = acc * Rational::new(p2, p2 - 1);
    }
    Ok(acc)
}

/// `sum_{d <= limit, (d, k) = 1} mu(d) / d^2`, which tends to
/// `SQUAREFREE_DENSITY * S(k)` with a tail below `1 / limit`.
pub fn coprime_mobius_square_sum(k: u64, limit: usize) -> f64 {
    let mu = mobius_table(limit);
    let mut acc = 0.0;
    // Largest terms last keeps the float sum tight.
    for d in (1..=limit).rev() {
        if mu[d] != 0 && gcd(d as u64, k) == 1 {
            acc += mu[d] as f64 / (d as f64 * d as f64);
        }
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GcdSumCheck {
    pub lhs: u64,
    pub rhs: u64,
    pub holds: bool,
}

/// `sum_{n <= N} (n, q)` against `N tau(q)`.
pub fn gcd_sum_check(n_max: u64, q: u64) -> Result<GcdSumCheck> {
    if n_max == 0 || q == 0 {
        return Err(Error::Domain("gcd_sum_check needs N, q >= 1".into()));
    }
    let lhs: u64 = (1..=n_max).map(|n| gcd(n, q)).sum();
    let rhs = n_max * tau(q);
    Ok(GcdSumCheck {
        lhs,
        rhs,
        holds: lhs <= rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_function_examples() {
        let f = |n| arithmetic_functions(n).unwrap();
        assert_eq!(
            f(1),
            ArithmeticFunctions { phi: 1, mobius: 1, tau: 1, odd_part: 1 }
        );
        assert_eq!(
            f(12),
            ArithmeticFunctions { phi: 4, mobius: 0, tau: 6, odd_part: 3 }
        );
        assert_eq!(
            f(10),
            ArithmeticFunctions { phi: 4, mobius: 1, tau: 4, odd_part: 5 }
        );
        assert!(arithmetic_functions(0).is_err());
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(1).unwrap().pairs(), &[]);
        assert_eq!(
            factorize(990).unwrap().pairs(),
            &[(2, 1), (3, 2), (5, 1), (11, 1)]
        );
        assert_eq!(factorize(10403).unwrap().pairs(), &[(101, 1), (103, 1)]);
        assert!(factorize(INT_CAP + 1).is_err());
    }

    #[test]
    fn factorize_large_cofactors() {
        // prime square and semiprime beyond the trial bound
        let p = 1_000_003u64;
        let q = 999_999_937u64;
        assert_eq!(factorize(p * p).unwrap().pairs(), &[(p, 2)]);
        assert_eq!(factorize(p * q).unwrap().pairs(), &[(p, 1), (q, 1)]);
        assert_eq!(factorize(7 * p * q).unwrap().pairs(), &[(7, 1), (p, 1), (q, 1)]);
        let f = factorize(999_999_999_999_999_989).unwrap();
        assert_eq!(f.pairs(), &[(999_999_999_999_999_989, 1)]);
        assert!(!is_squarefree(4 * p * p));
        assert!(!is_squarefree(p * p));
        assert!(is_squarefree(p * q));
    }

    #[test]
    fn squarefree_examples() {
        assert!(is_squarefree(1));
        assert!(!is_squarefree(45));
        assert!(is_squarefree(10));
        assert!(!is_squarefree(0));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(1, 7).unwrap(), 1);
        assert_eq!(mod_inverse(3, 10).unwrap(), 7);
        assert!(matches!(mod_inverse(2, 4), Err(Error::NoInverse { .. })));
        assert_eq!(mod_inverse(5, 1).unwrap(), 0);
        assert_eq!(mod_inverse(-3, 10).unwrap(), 3);
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt_combine(0, 1, 5, 7).unwrap(), 5);
        assert_eq!(crt_combine(2, 3, 3, 5).unwrap(), 8);
        assert!(crt_combine(1, 4, 1, 6).is_err());
        let b = bezout_check(3, 5).unwrap();
        assert!(b.holds);
        assert_eq!(b.lhs, Rational::new(1, 15));
        // 2/5 + 2/3 = 16/15 = 1/15 mod 1
        assert_eq!(
            (Rational::new(2, 5) + Rational::new(2, 3)).fract(),
            Rational::new(1, 15)
        );
    }

    #[test]
    fn bezout_sweep() {
        for m in 1..40u64 {
            for n in 1..40u64 {
                if gcd(m, n) == 1 {
                    assert!(bezout_check(m, n).unwrap().holds, "m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn ramanujan_examples() {
        for n in -5..5 {
            assert_eq!(ramanujan_c(1, n), 1);
        }
        assert_eq!(ramanujan_c(4, 2), -2);
        for q in 1..=50 {
            assert_eq!(ramanujan_c(q, 1), mobius(q) as i64, "q={q}");
            assert_eq!(ramanujan_c(q, 0), euler_phi(q) as i64);
        }
    }

    #[test]
    fn singular_series_examples() {
        assert_eq!(singular_series(1).unwrap(), Rational::integer(1));
        assert_eq!(singular_series(2).unwrap(), Rational::new(4, 3));
        assert_eq!(singular_series(990).unwrap(), Rational::new(605, 384));
    }

    #[test]
    fn singular_series_multiplicative() {
        for m in 1..=200u64 {
            for n in 1..=200u64 {
                if gcd(m, n) == 1 {
                    assert_eq!(
                        singular_series(m * n).unwrap(),
                        singular_series(m).unwrap() * singular_series(n).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn mobius_tail_converges_to_density() {
        for k in [1u64, 990] {
            let s = singular_series(k).unwrap().to_f64();
            for limit in [2usize, 10, 100, 1000, 10_000] {
                let partial = coprime_mobius_square_sum(k, limit);
                assert!(
                    (partial - SQUAREFREE_DENSITY * s).abs() <= 1.0 / limit as f64,
                    "k={k} D={limit}"
                );
            }
        }
    }

    #[test]
    fn gcd_sum_examples_and_grid() {
        let c = |n, q| gcd_sum_check(n, q).unwrap();
        assert_eq!(c(1, 1), GcdSumCheck { lhs: 1, rhs: 1, holds: true });
        assert_eq!(c(6, 4), GcdSumCheck { lhs: 11, rhs: 18, holds: true });
        assert_eq!(c(10, 1), GcdSumCheck { lhs: 10, rhs: 10, holds: true });
    }

    #[test]
    fn mobius_table_matches_factorization() {
        let mu = mobius_table(2000);
        for n in 1..=2000u64 {
            assert_eq!(mu[n as usize], mobius(n));
        }
    }

    #[test]
    fn roots() {
        for n in [0u64, 1, 2, 3, 8, 26, 27, 28, 1 << 40, u64::MAX / 3] {
            let r = isqrt(n);
            assert!(r as u128 * r as u128 <= n as u128);
            assert!((r as u128 + 1).pow(2) > n as u128);
            let c = icbrt(n);
            assert!((c as u128).pow(3) <= n as u128 && (c as u128 + 1).pow(3) > n as u128);
        }
    }
}
