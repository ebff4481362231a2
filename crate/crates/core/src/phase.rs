//! Phase arithmetic shared by the exponential-sum and harmonic modules:
//! reduction of `alpha * w` modulo 1 without losing the low bits of the
//! product, tables of roots of unity, and compensated complex summation.

use std::f64::consts::TAU;

use num_complex::Complex64;

/// `alpha - floor(alpha)`, always in `[0, 1)`.
pub fn frac(alpha: f64) -> f64 {
    let r = alpha - alpha.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// `frac(alpha * w)` with the rounding error of the product recovered by a
/// fused multiply-add. Exact up to one ulp as long as `w < 2^53`.
pub fn frac_mul(alpha: f64, w: u64) -> f64 {
    let a = frac(alpha);
    let wf = w as f64;
    let p = a * wf;
    let err = a.mul_add(wf, -p);
    frac(frac(p) + err)
}

/// `e(theta) = exp(2 pi i theta)`.
pub fn e(theta: f64) -> Complex64 {
    let (s, c) = (TAU * frac(theta)).sin_cos();
    Complex64::new(c, s)
}

/// A point `num / den + shift` on the circle, kept split so that
/// multiplying by an integer reduces the rational part exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    pub num: i64,
    pub den: u64,
    pub shift: f64,
}

impl Phase {
    pub fn real(alpha: f64) -> Self {
        Phase {
            num: 0,
            den: 1,
            shift: alpha,
        }
    }

    pub fn rational(num: i64, den: u64, shift: f64) -> Self {
        assert!(den > 0, "phase denominator must be positive");
        Phase { num, den, shift }
    }

    /// `frac(w * (num / den + shift))`.
    pub fn times(&self, w: u64) -> f64 {
        let r = (self.num as i128).rem_euclid(self.den as i128) as u128;
        let top = (r * w as u128 % self.den as u128) as f64;
        frac(top / self.den as f64 + frac_mul(self.shift, w))
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64 + self.shift
    }
}

/// `e_m(k)` for `k` in `[0, m)`.
#[derive(Debug, Clone)]
pub struct RootTable {
    modulus: u64,
    roots: Vec<Complex64>,
}

impl RootTable {
    pub fn new(modulus: u64) -> Self {
        assert!(modulus > 0);
        let m = modulus as f64;
        let roots = (0..modulus)
            .map(|k| {
                let (s, c) = (TAU * k as f64 / m).sin_cos();
                Complex64::new(c, s)
            })
            .collect();
        RootTable { modulus, roots }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `e_m(k)` for an already reduced `k`.
    #[inline]
    pub fn at(&self, k: u64) -> Complex64 {
        self.roots[k as usize]
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
}

#[inline]
fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, &mut self.re_c, z.re);
        neumaier(&mut self.im, &mut self.im_c, z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.re_c, self.im + self.im_c)
    }
}

impl std::iter::FromIterator<Complex64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// Compensated real sum.
pub fn sum_f64<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for x in iter {
        neumaier(&mut s, &mut c, x);
    }
    s + c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frac_mul_keeps_low_bits() {
        // 0.1 is not exact; compare with exact rational reduction of the
        // binary value of 0.1 times w
        let w = 1_000_000_001u64;
        let alpha = 0.1f64;
        let bits = alpha.to_bits();
        let mant = (bits & ((1u64 << 52) - 1)) | (1u64 << 52);
        let exp = ((bits >> 52) & 0x7ff) as i32 - 1075;
        // alpha = mant * 2^exp, exp < 0
        let shift = (-exp) as u32;
        let prod = mant as u128 * w as u128;
        let frac_exact = (prod & ((1u128 << shift) - 1)) as f64 / (1u128 << shift) as f64;
        assert!((frac_mul(alpha, w) - frac_exact).abs() < 1e-15);
    }

    #[test]
    fn phase_rational_part_is_exact() {
        let p = Phase::rational(3, 7, 0.0);
        assert!((p.times(7_000_000_000_000_005) - (15 % 7) as f64 / 7.0).abs() < 1e-15);
        assert_eq!(Phase::rational(-1, 4, 0.0).times(1), 0.75);
    }

    #[test]
    fn roots_table() {
        let t = RootTable::new(4);
        assert!((t.at(1) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((e(0.5) + 1.0).norm() < 1e-15);
    }

    #[test]
    fn compensated_sum_cancels() {
        let s: CompensatedSum = [1e16, 1.0, -1e16]
            .into_iter()
            .map(|x| Complex64::new(x, -x))
            .collect();
        assert_eq!(s.value(), Complex64::new(1.0, -1.0));
    }
}
