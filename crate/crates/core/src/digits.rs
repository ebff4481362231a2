//! Base-`b` digit arithmetic: expansions, the reversal map `rho`, palindrome
//! and quasi-palindrome predicates, and the quasi-palindrome skeleton
//! `A_lambda` that turns the outer digit constraints into a union of short
//! arithmetic progressions.

use serde::Serialize;

use crate::arith::{euler_phi, gcd};
use crate::{Error, Result, INT_CAP};

fn check_base(b: u32) -> Result<()> {
    if b < 2 {
        return Err(Error::range("base", b, "b >= 2"));
    }
    Ok(())
}

/// `b^e`, or `None` past `u64`.
pub fn checked_pow(b: u64, e: u32) -> Option<u64> {
    b.checked_pow(e)
}

/// `b^e` for exponents whose result must stay within [`INT_CAP`].
pub(crate) fn capped_pow(b: u32, e: u32, what: &'static str) -> Result<u64> {
    match checked_pow(b as u64, e) {
        Some(v) if v <= INT_CAP => Ok(v),
        _ => Err(Error::range(what, format!("{b}^{e}"), "<= 10^18")),
    }
}

/// Little-endian digits of an integer with an explicit length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DigitVector {
    base: u32,
    digits: Vec<u32>,
}

impl DigitVector {
    pub fn new(base: u32, digits: Vec<u32>) -> Result<Self> {
        check_base(base)?;
        if digits.is_empty() {
            return Err(Error::Domain("a digit vector has at least one digit".into()));
        }
        if let Some(&d) = digits.iter().find(|&&d| d >= base) {
            return Err(Error::range("digit", d, format!("< {base}")));
        }
        Ok(DigitVector { base, digits })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Digit `j`, zero beyond the stored length.
    pub fn digit(&self, j: usize) -> u32 {
        self.digits.get(j).copied().unwrap_or(0)
    }
}

/// Expansion of `n` in base `b`; minimal length unless `length` is given.
pub fn digits_of(n: u64, b: u32, length: Option<usize>) -> Result<DigitVector> {
    check_base(b)?;
    let mut digits = Vec::new();
    let mut m = n;
    loop {
        digits.push((m % b as u64) as u32);
        m /= b as u64;
        if m == 0 {
            break;
        }
    }
    if let Some(len) = length {
        if len < digits.len() {
            return Err(Error::range("digits_of", n, format!("< {b}^{len}")));
        }
        digits.resize(len, 0);
    }
    Ok(DigitVector { base: b, digits })
}

pub fn value_of(dv: &DigitVector) -> Result<u64> {
    let b = dv.base as u128;
    let mut acc = 0u128;
    for &d in dv.digits.iter().rev() {
        acc = acc * b + d as u128;
        if acc > u64::MAX as u128 {
            return Err(Error::range("value_of", "digit vector", "< 2^64"));
        }
    }
    Ok(acc as u64)
}

/// Number of base-`b` digits of `n >= 1`, i.e. `floor(log_b n) + 1`.
pub fn digit_count(n: u64, b: u32) -> u32 {
    let mut k = 1;
    let mut m = n / b as u64;
    while m > 0 {
        k += 1;
        m /= b as u64;
    }
    k
}

/// Reverses the first `L + 1` digits: `sum_{l <= L} d_l(n) b^(L - l)`.
pub fn rho(n: u64, b: u32, l: u32) -> Result<u64> {
    check_base(b)?;
    let bound = checked_pow(b as u64, l + 1)
        .ok_or_else(|| Error::range("rho", format!("L={l}"), "b^(L+1) < 2^64"))?;
    if n >= bound {
        return Err(Error::range("rho", n, format!("< {b}^{}", l + 1)));
    }
    let mut m = n;
    let mut out = 0u64;
    for _ in 0..=l {
        out = out * b as u64 + m % b as u64;
        m /= b as u64;
    }
    Ok(out)
}

/// Reads the same in both directions. Zero is not a palindrome.
pub fn is_palindrome(n: u64, b: u32) -> bool {
    if n == 0 || b < 2 {
        return false;
    }
    let mut rev = 0u128;
    let mut m = n;
    while m > 0 {
        rev = rev * b as u128 + (m % b as u64) as u128;
        m /= b as u64;
    }
    rev == n as u128
}

/// `d_j(n) = d_{top - j}(n)` for `0 <= j < lambda`, with `top = floor(log_b n)`.
/// Levels past the midpoint only repeat comparisons already made.
pub fn is_quasi_palindrome(n: u64, b: u32, lambda: u32) -> bool {
    if n == 0 || b < 2 {
        return false;
    }
    let dv = digits_of(n, b, None).expect("valid base");
    let top = dv.len() - 1;
    (0..(lambda as usize).min(dv.len())).all(|j| dv.digit(j) == dv.digit(top - j))
}

/// The set `A_lambda` of integers with mirrored outer digits `k_j` at
/// positions `j` and `L - j` (`j < lambda`), a unit last digit and zeros
/// in between.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuasiSkeleton {
    pub base: u32,
    pub block: u32,
    pub level: u32,
    pub members: Vec<u64>,
}

fn check_level(b: u32, l: u32, lambda: u32) -> Result<()> {
    check_base(b)?;
    if lambda < 1 || lambda > l / 2 {
        return Err(Error::range("lambda", lambda, format!("1 <= lambda <= {}", l / 2)));
    }
    capped_pow(b, l + 1, "quasi-palindrome block")?;
    Ok(())
}

pub fn gen_quasi_skeleton(b: u32, l: u32, lambda: u32) -> Result<QuasiSkeleton> {
    check_level(b, l, lambda)?;
    let bb = b as u64;
    let weights: Vec<u64> = (0..lambda)
        .map(|j| bb.pow(j) + bb.pow(l - j))
        .collect();
    let units: Vec<u64> = (1..bb).filter(|&k| gcd(k, bb) == 1).collect();
    let mut members = Vec::with_capacity(units.len() * bb.pow(lambda - 1) as usize);
    // k_0 ranges over units, k_1..k_{lambda-1} over all digits
    let inner = bb.pow(lambda - 1);
    for &k0 in &units {
        for code in 0..inner {
            let mut acc = k0 * weights[0];
            let mut c = code;
            for w in &weights[1..] {
                acc += (c % bb) * w;
                c /= bb;
            }
            members.push(acc);
        }
    }
    members.sort_unstable();
    debug_assert_eq!(members.len() as u64, euler_phi(bb) * inner);
    Ok(QuasiSkeleton {
        base: b,
        block: l,
        level: lambda,
        members,
    })
}

/// One term of the cover `l = a + b^lambda m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoverTriple {
    pub a: u64,
    pub m: u64,
    pub ell: u64,
}

/// All `(a, m, a + b^lambda m)` with `a` in `A_lambda` and
/// `0 <= m < b^(L + 1 - 2 lambda)`: exactly the level-`lambda`
/// quasi-palindromes of `[b^L, b^(L+1))` whose last digit is a unit mod `b`.
pub fn quasi_cover_enumerate(
    b: u32,
    l: u32,
    lambda: u32,
) -> Result<impl Iterator<Item = CoverTriple>> {
    let skeleton = gen_quasi_skeleton(b, l, lambda)?;
    let step = (b as u64).pow(lambda);
    let m_count = (b as u64).pow(l + 1 - 2 * lambda);
    Ok(skeleton.members.into_iter().flat_map(move |a| {
        (0..m_count).map(move |m| CoverTriple {
            a,
            m,
            ell: a + step * m,
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn digits_examples() {
        assert_eq!(digits_of(0, 10, None).unwrap().digits(), &[0]);
        assert_eq!(digits_of(123, 10, Some(5)).unwrap().digits(), &[3, 2, 1, 0, 0]);
        assert_eq!(digits_of(5, 2, None).unwrap().digits(), &[1, 0, 1]);
        assert!(digits_of(123, 10, Some(2)).is_err());
        assert!(digits_of(1, 1, None).is_err());
    }

    #[test]
    fn value_examples() {
        let v = |b, d: &[u32]| value_of(&DigitVector::new(b, d.to_vec()).unwrap()).unwrap();
        assert_eq!(v(10, &[0]), 0);
        assert_eq!(v(10, &[3, 2, 1]), 123);
        assert_eq!(v(2, &[1, 0, 1]), 5);
        assert!(DigitVector::new(10, vec![10]).is_err());
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(0, 10, 4).unwrap(), 0);
        assert_eq!(rho(12321, 10, 4).unwrap(), 12321);
        assert_eq!(rho(123, 10, 4).unwrap(), 32100);
        assert!(rho(100_000, 10, 4).is_err());
    }

    #[test]
    fn palindrome_examples() {
        assert!(is_palindrome(7, 10));
        assert!(is_palindrome(12321, 10));
        assert!(!is_palindrome(12, 10));
        assert!(!is_palindrome(0, 10));
        assert!(is_palindrome(u64::MAX, 2));
    }

    #[test]
    fn quasi_palindrome_examples() {
        assert!(is_quasi_palindrome(12321, 10, 2));
        assert!(!is_quasi_palindrome(12325, 10, 1));
        for n in [1u64, 9, 11, 121, 12321, 9_876_789] {
            assert!(is_quasi_palindrome(n, 10, 1));
        }
        assert!(is_quasi_palindrome(12_345_621, 10, 2));
        assert!(!is_quasi_palindrome(12_345_621, 10, 3));
    }

    #[test]
    fn skeleton_examples() {
        let s = gen_quasi_skeleton(10, 10, 1).unwrap();
        let base = 1 + 10u64.pow(10);
        assert_eq!(s.members, vec![base, 3 * base, 7 * base, 9 * base]);
        assert_eq!(gen_quasi_skeleton(2, 6, 1).unwrap().members, vec![65]);
        assert_eq!(gen_quasi_skeleton(3, 8, 2).unwrap().members.len(), 6);
        assert!(gen_quasi_skeleton(10, 4, 3).is_err());
        assert!(gen_quasi_skeleton(10, 4, 0).is_err());
    }

    #[test]
    fn skeleton_members_have_the_stated_digits() {
        for (b, l, lambda) in [(3u32, 8u32, 2u32), (10, 7, 3), (2, 9, 4)] {
            let s = gen_quasi_skeleton(b, l, lambda).unwrap();
            for &m in &s.members {
                let dv = digits_of(m, b, Some(l as usize + 1)).unwrap();
                for j in 0..lambda as usize {
                    assert_eq!(dv.digit(j), dv.digit(l as usize - j));
                }
                for j in lambda..=(l - lambda) {
                    assert_eq!(dv.digit(j as usize), 0);
                }
            }
        }
    }

    #[test]
    fn cover_examples() {
        let ells: Vec<u64> = quasi_cover_enumerate(2, 2, 1).unwrap().map(|t| t.ell).collect();
        assert_eq!(ells, vec![5, 7]);
        assert_eq!(quasi_cover_enumerate(10, 2, 1).unwrap().count(), 40);
        for t in quasi_cover_enumerate(10, 6, 2).unwrap() {
            assert!(is_quasi_palindrome(t.ell, 10, 2));
        }
    }

    #[test]
    fn rho_is_an_involution_exhaustive() {
        for b in [2u32, 3, 10] {
            for l in 0..=4 {
                let top = (b as u64).pow(l + 1);
                for n in 0..top {
                    assert_eq!(rho(rho(n, b, l).unwrap(), b, l).unwrap(), n);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn digits_round_trip(n in 0u64..u64::MAX, b in 2u32..40) {
            let dv = digits_of(n, b, None).unwrap();
            prop_assert_eq!(value_of(&dv).unwrap(), n);
            prop_assert_eq!(dv.len() as u32, digit_count(n.max(1), b));
        }

        #[test]
        fn padded_digits_round_trip(n in 0u64..1_000_000, extra in 0usize..5, b in 2u32..12) {
            let min = digits_of(n, b, None).unwrap().len();
            let dv = digits_of(n, b, Some(min + extra)).unwrap();
            prop_assert_eq!(value_of(&dv).unwrap(), n);
        }
    }
}
