//! Enumeration and exact counting over palindrome families.
//!
//! `Pi_b(L)` is the set of palindromes in `[b^L, b^(L+1))`; it is produced
//! by mirroring a half counter of `L/2 + 1` digits whose leading digit is
//! nonzero, so the stream comes out ascending. Palindromes up to `x` chain
//! the blocks. The `Star` variant keeps palindromes coprime to `b^3 - b`,
//! the `Even` variant those with an even number `floor(log_b n)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{exact_sqrt, gcd, mod_inverse, reduce, small_primes};
use crate::digits::{capped_pow, is_palindrome};
use crate::{Error, Result, INT_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    All,
    Star,
    Even,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "all" => Ok(Variant::All),
            "star" => Ok(Variant::Star),
            "even" => Ok(Variant::Even),
            other => Err(Error::Config(format!("unknown variant `{other}`"))),
        }
    }
}

/// `m_b = b^3 - b`.
pub fn base_modulus(b: u32) -> u64 {
    let b = b as u64;
    b * b * b - b
}

/// Number of base-`b` palindromes in block `L`: `(b - 1) b^(ceil((L+1)/2) - 1)`.
pub fn block_size(b: u32, l: u32) -> u64 {
    (b as u64 - 1) * (b as u64).pow(l / 2)
}

/// Half-counter layout of block `L`: the top `half` digits are free and the
/// low `low` digits mirror them.
#[derive(Debug, Clone, Copy)]
struct BlockShape {
    b: u64,
    half: u32,
    low: u32,
    low_pow: u64,
    /// the top digits that get mirrored sit above this power
    skip_pow: u64,
}

impl BlockShape {
    fn new(b: u32, l: u32) -> Result<Self> {
        if b < 2 {
            return Err(Error::range("base", b, "b >= 2"));
        }
        capped_pow(b, l + 1, "palindrome block")?;
        let half = l / 2 + 1;
        let low = l + 1 - half;
        let b64 = b as u64;
        Ok(BlockShape {
            b: b64,
            half,
            low,
            low_pow: b64.pow(low),
            skip_pow: b64.pow(half - low),
        })
    }

    fn counter_range(&self) -> std::ops::Range<u64> {
        self.b.pow(self.half - 1)..self.b.pow(self.half)
    }

    #[inline]
    fn mirror(&self, t: u64) -> u64 {
        let mut top = t / self.skip_pow;
        let mut rev = 0;
        for _ in 0..self.low {
            rev = rev * self.b + top % self.b;
            top /= self.b;
        }
        t * self.low_pow + rev
    }

    /// The half counter whose palindrome is the largest one `<= x`, if any,
    /// for `x` inside this block.
    fn count_upto(&self, x: u64) -> u64 {
        let range = self.counter_range();
        let t = x / self.low_pow;
        if t < range.start {
            return 0;
        }
        let t = t.min(range.end - 1);
        let below = t - range.start;
        below + u64::from(self.mirror(t) <= x)
    }
}

/// Ascending stream over `Pi_b(L)`.
#[derive(Debug, Clone)]
pub struct PalBlock {
    shape: BlockShape,
    next: u64,
    end: u64,
}

impl Iterator for PalBlock {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.next >= self.end {
            return None;
        }
        let v = self.shape.mirror(self.next);
        self.next += 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for PalBlock {}

pub fn iter_pal_block(b: u32, l: u32) -> Result<PalBlock> {
    let shape = BlockShape::new(b, l)?;
    let r = shape.counter_range();
    Ok(PalBlock {
        shape,
        next: r.start,
        end: r.end,
    })
}

/// Splits `Pi_b(L)` into ascending contiguous segments of the half counter.
pub fn block_segments(b: u32, l: u32, parts: usize) -> Result<Vec<PalBlock>> {
    let whole = iter_pal_block(b, l)?;
    let len = whole.end - whole.next;
    let parts = (parts.max(1) as u64).min(len.max(1));
    let step = len.div_ceil(parts);
    Ok((0..parts)
        .map(|i| PalBlock {
            shape: whole.shape,
            next: whole.next + i * step,
            end: (whole.next + (i + 1) * step).min(whole.end),
        })
        .collect())
}

/// Blocks `L` whose lower end `b^L` does not exceed `x`.
fn blocks_upto(b: u32, x: u64) -> impl Iterator<Item = u32> {
    let b = b as u64;
    (0u32..)
        .take_while(move |&l| b.checked_pow(l).is_some_and(|p| p <= x))
}

/// Ascending stream of all base-`b` palindromes `<= x`.
pub fn iter_palindromes_upto(b: u32, x: u64) -> Result<impl Iterator<Item = u64>> {
    if x > INT_CAP {
        return Err(Error::range("x", x, "x <= 10^18"));
    }
    if b < 2 {
        return Err(Error::range("base", b, "b >= 2"));
    }
    let blocks: Vec<PalBlock> = blocks_upto(b, x)
        .map(|l| iter_pal_block(b, l))
        .collect::<Result<_>>()?;
    Ok(blocks.into_iter().flatten().take_while(move |&n| n <= x))
}

/// `n` belongs to the `variant` family (palindromicity is assumed).
pub fn variant_accepts(b: u32, variant: Variant, n: u64, block: u32) -> bool {
    match variant {
        Variant::All => true,
        Variant::Star => gcd(n, base_modulus(b)) == 1,
        Variant::Even => block.is_multiple_of(2),
    }
}

/// Palindromes of the given family up to `x`, ascending.
pub fn collect_variant(b: u32, x: u64, variant: Variant) -> Result<Vec<u64>> {
    if x > INT_CAP {
        return Err(Error::range("x", x, "x <= 10^18"));
    }
    let mut out = Vec::new();
    for l in blocks_upto(b, x) {
        if variant == Variant::Even && l % 2 == 1 {
            continue;
        }
        let segments = block_segments(b, l, rayon::current_num_threads() * 4)?;
        let parts: Vec<Vec<u64>> = segments
            .into_par_iter()
            .map(|seg| {
                seg.take_while(|&n| n <= x)
                    .filter(|&n| variant_accepts(b, variant, n, l))
                    .collect()
            })
            .collect();
        out.extend(parts.into_iter().flatten());
    }
    Ok(out)
}

/// `|{n <= x : n in variant}|`.
pub fn count_upto(b: u32, x: u64, variant: Variant) -> Result<u64> {
    if b < 2 {
        return Err(Error::range("base", b, "b >= 2"));
    }
    if x > INT_CAP {
        return Err(Error::range("x", x, "x <= 10^18"));
    }
    match variant {
        Variant::Star => Ok(collect_variant(b, x, variant)?.len() as u64),
        Variant::All | Variant::Even => {
            let mut total = 0;
            for l in blocks_upto(b, x) {
                if variant == Variant::Even && l % 2 == 1 {
                    continue;
                }
                total += BlockShape::new(b, l)?.count_upto(x);
            }
            Ok(total)
        }
    }
}

/// How a palindrome counting task is bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Block(u32),
    UpTo(u64),
}

/// A counting task over one palindrome family, optionally restricted to a
/// residue class and to integers coprime to the base.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PalindromeQuery {
    pub base: u32,
    pub bound: Bound,
    pub variant: Variant,
    pub modulus: Option<u64>,
    pub residue: Option<i64>,
    pub coprime_to_base: bool,
}

impl PalindromeQuery {
    pub fn new(base: u32, bound: Bound) -> Self {
        PalindromeQuery {
            base,
            bound,
            variant: Variant::All,
            modulus: None,
            residue: None,
            coprime_to_base: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.base < 2 {
            return Err(Error::range("base", self.base, "b >= 2"));
        }
        if self.residue.is_some() && self.modulus.is_none() {
            return Err(Error::Config("a residue needs a modulus".into()));
        }
        if self.modulus == Some(0) {
            return Err(Error::Config("modulus must be positive".into()));
        }
        Ok(())
    }

    fn members(&self) -> Result<Vec<u64>> {
        match self.bound {
            Bound::UpTo(x) => collect_variant(self.base, x, self.variant),
            Bound::Block(l) => {
                let it = iter_pal_block(self.base, l)?;
                Ok(it
                    .filter(|&n| variant_accepts(self.base, self.variant, n, l))
                    .collect())
            }
        }
    }

    /// The members satisfying every filter.
    pub fn collect(&self) -> Result<Vec<u64>> {
        self.validate()?;
        let b = self.base as u64;
        let modulus = self.modulus.unwrap_or(1);
        let residue = self.residue.map(|a| reduce(a, modulus));
        Ok(self
            .members()?
            .into_iter()
            .filter(|&n| !self.coprime_to_base || gcd(n, b) == 1)
            .filter(|&n| residue.is_none_or(|a| n % modulus == a))
            .collect())
    }

    pub fn count(&self) -> Result<u64> {
        Ok(self.collect()?.len() as u64)
    }
}

/// `|Pi_b(L, q, a)|`, the palindromes of block `L` in class `a mod q` that
/// are coprime to `b`.
pub fn count_in_ap(b: u32, l: u32, q: u64, a: i64) -> Result<u64> {
    count_in_ap_with(b, l, q, a, true)
}

/// [`count_in_ap`] with the coprimality-to-base filter switchable.
pub fn count_in_ap_with(b: u32, l: u32, q: u64, a: i64, coprime_to_base: bool) -> Result<u64> {
    if q == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    let a = reduce(a, q);
    let bb = b as u64;
    Ok(iter_pal_block(b, l)?
        .filter(|&n| n % q == a && (!coprime_to_base || gcd(n, bb) == 1))
        .count() as u64)
}

/// Counts of `Pi_b(L)` per residue class mod `q` in one pass.
pub fn residue_histogram(b: u32, l: u32, q: u64, coprime_to_base: bool) -> Result<Vec<u64>> {
    if q == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    let bb = b as u64;
    let mut hist = vec![0u64; q as usize];
    for n in iter_pal_block(b, l)? {
        if !coprime_to_base || gcd(n, bb) == 1 {
            hist[(n % q) as usize] += 1;
        }
    }
    Ok(hist)
}

/// `max_a |Pi_b(L, q, a)| / (|Pi_b(L)| / sqrt(q) + 1)`.
pub fn bs_max_ratio(b: u32, l: u32, q: u64) -> Result<f64> {
    let hist = residue_histogram(b, l, q, true)?;
    Ok(ratio_from_histogram(&hist, block_size(b, l), q))
}

pub(crate) fn ratio_from_histogram(hist: &[u64], block: u64, q: u64) -> f64 {
    let max = hist.iter().copied().max().unwrap_or(0);
    max as f64 / (block as f64 / (q as f64).sqrt() + 1.0)
}

/// `#{l in Pi_b(L) : m | l}`.
pub fn count_divisible(b: u32, l: u32, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::Domain("divisor must be positive".into()));
    }
    Ok(iter_pal_block(b, l)?.filter(|&n| n % m == 0).count() as u64)
}

/// Strategies for [`count_square_pairs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairStrategy {
    /// test `n^2 | l` for every palindrome and every `n ~ N`
    TestEach,
    /// compute the square part of every palindrome once
    SquarePart,
    /// walk the multiples of `n^2` in the class and test palindromicity
    Multiples,
}

/// Dyadic range `N/2 < n <= N`.
pub fn dyadic(n_max: u64) -> std::ops::RangeInclusive<u64> {
    (n_max / 2 + 1)..=n_max
}

struct PairTask {
    b: u32,
    l: u32,
    q: u64,
    a: u64,
    n_max: u64,
    lo: u64,
    hi: u64,
}

impl PairTask {
    fn new(b: u32, l: u32, q: u64, a: i64, n_max: u64) -> Result<Self> {
        if q == 0 || n_max == 0 {
            return Err(Error::Domain("q and N must be positive".into()));
        }
        if gcd(q, b as u64) != 1 {
            return Err(Error::Domain(format!("modulus {q} is not coprime to base {b}")));
        }
        let hi = capped_pow(b, l + 1, "palindrome block")?;
        Ok(PairTask {
            b,
            l,
            q,
            a: reduce(a, q),
            n_max,
            lo: hi / b as u64,
            hi,
        })
    }

    /// Useful `n`: coprime to `b` (as `l` is) and with `n^2` below the block end.
    fn divisors(&self) -> impl Iterator<Item = u64> + '_ {
        dyadic(self.n_max)
            .take_while(|&n| (n as u128) * (n as u128) < self.hi as u128)
            .filter(|&n| gcd(n, self.b as u64) == 1)
    }

    fn members(&self) -> Result<impl Iterator<Item = u64> + '_> {
        let bb = self.b as u64;
        Ok(iter_pal_block(self.b, self.l)?
            .filter(move |&n| n % self.q == self.a && gcd(n, bb) == 1))
    }

    fn predicted_costs(&self) -> [(PairStrategy, f64); 3] {
        let pals = block_size(self.b, self.l) as f64;
        let ns = self.divisors().count() as f64;
        let trial = (self.hi as f64).cbrt().max(2.0);
        let trial_primes = trial / trial.ln().max(1.0);
        let multiples: f64 = self
            .divisors()
            .map(|n| {
                let sq = n as f64 * n as f64;
                let g = gcd(((n as u128 * n as u128) % self.q as u128) as u64, self.q) as f64;
                (self.hi - self.lo) as f64 / (sq * self.q as f64 / g) + 1.0
            })
            .sum();
        [
            (PairStrategy::TestEach, pals * ns.max(1.0)),
            (PairStrategy::SquarePart, pals * trial_primes),
            (PairStrategy::Multiples, multiples * self.b as f64 / 2.0),
        ]
    }

    fn run(&self, strategy: PairStrategy) -> Result<u64> {
        let (lo_n, hi_n) = (*dyadic(self.n_max).start(), self.n_max);
        match strategy {
            PairStrategy::TestEach => {
                let ns: Vec<u128> = self.divisors().map(|n| n as u128 * n as u128).collect();
                Ok(self
                    .members()?
                    .map(|ell| ns.iter().filter(|&&sq| (ell as u128).is_multiple_of(sq)).count() as u64)
                    .sum())
            }
            PairStrategy::SquarePart => Ok(self
                .members()?
                .map(|ell| {
                    let root = square_root_part(ell);
                    divisors_of(&root)
                        .into_iter()
                        .filter(|&d| d >= lo_n && d <= hi_n)
                        .count() as u64
                })
                .sum()),
            PairStrategy::Multiples => {
                let bb = self.b as u64;
                let mut total = 0;
                for n in self.divisors() {
                    let sq = n * n;
                    // k sq = a (q): k = k0 (q / g)
                    let g = gcd(sq % self.q, self.q);
                    if !self.a.is_multiple_of(g) {
                        continue;
                    }
                    let qg = self.q / g;
                    let k0 = ((self.a / g) as u128
                        * mod_inverse(((sq / g) % qg) as i64, qg)? as u128
                        % qg as u128) as u64;
                    let k_lo = self.lo.div_ceil(sq);
                    // first k >= k_lo with k = k0 mod qg
                    let mut k = k_lo + (k0 + qg - k_lo % qg) % qg;
                    while (k as u128) * (sq as u128) < self.hi as u128 {
                        let ell = k * sq;
                        if gcd(ell, bb) == 1 && is_palindrome(ell, self.b) {
                            total += 1;
                        }
                        k += qg;
                    }
                }
                Ok(total)
            }
        }
    }
}

/// Largest `s` with `s^2 | n`, as a factorization `[(p, e)]` of `s`.
fn square_root_part(n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
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
        if e >= 2 {
            out.push((p, e / 2));
        }
    }
    // the cofactor has at most two prime factors, all above the trial bound
    if m > 1 {
        if let Some(r) = exact_sqrt(m) {
            out.push((r, 1));
        }
    }
    out
}

fn divisors_of(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut divs = vec![1u64];
    for &(p, e) in factors {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs
}

/// `sum_{N/2 < n <= N} #{l in Pi_b(L, q, a) : n^2 | l}` using the strategy
/// with the smallest predicted cost.
pub fn count_square_pairs(b: u32, l: u32, q: u64, a: i64, n_max: u64) -> Result<u64> {
    let task = PairTask::new(b, l, q, a, n_max)?;
    let strategy = task
        .predicted_costs()
        .into_iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .map(|(s, _)| s)
        .unwrap_or(PairStrategy::TestEach);
    task.run(strategy)
}

pub fn count_square_pairs_with(
    b: u32,
    l: u32,
    q: u64,
    a: i64,
    n_max: u64,
    strategy: PairStrategy,
) -> Result<u64> {
    PairTask::new(b, l, q, a, n_max)?.run(strategy)
}

/// The strategy [`count_square_pairs`] would pick.
pub fn pair_strategy(b: u32, l: u32, q: u64, n_max: u64) -> Result<PairStrategy> {
    let task = PairTask::new(b, l, q, 0, n_max)?;
    Ok(task
        .predicted_costs()
        .into_iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .map(|(s, _)| s)
        .unwrap_or(PairStrategy::TestEach))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    #[test]
    fn block_examples() {
        assert_eq!(iter_pal_block(2, 2).unwrap().collect::<Vec<_>>(), vec![5, 7]);
        let three: Vec<u64> = iter_pal_block(10, 2).unwrap().collect();
        assert_eq!(three.len(), 90);
        assert_eq!((three[0], three[1], three[89]), (101, 111, 999));
        assert_eq!(iter_pal_block(10, 0).unwrap().collect::<Vec<_>>(), (1..=9).collect::<Vec<_>>());
        assert!(iter_pal_block(10, 18).is_err());
        assert!(iter_pal_block(10, 17).is_ok());
    }

    #[test]
    fn blocks_match_brute_force() {
        for b in [2u32, 3, 10] {
            for l in 0..=6 {
                let lo = (b as u64).pow(l);
                let hi = lo * b as u64;
                let brute: Vec<u64> = (lo..hi).filter(|&n| is_palindrome(n, b)).collect();
                assert_eq!(iter_pal_block(b, l).unwrap().collect::<Vec<_>>(), brute);
            }
        }
    }

    #[test]
    fn block_size_closed_form() {
        for b in 2u32..=12 {
            for l in 0..=12 {
                if (b as u64).checked_pow(l + 1).is_none_or(|v| v > INT_CAP) {
                    continue;
                }
                assert_eq!(iter_pal_block(b, l).unwrap().len() as u64, block_size(b, l));
            }
        }
        assert_eq!(iter_pal_block(12, 12).unwrap().count() as u64, block_size(12, 12));
    }

    #[test]
    fn segments_cover_the_block() {
        let whole: Vec<u64> = iter_pal_block(10, 5).unwrap().collect();
        for parts in [1, 3, 7, 1000, 5000] {
            let joined: Vec<u64> = block_segments(10, 5, parts)
                .unwrap()
                .into_iter()
                .flatten()
                .collect();
            assert_eq!(joined, whole);
        }
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_upto(10, 1000, Variant::All).unwrap(), 108);
        assert_eq!(count_upto(10, 100, Variant::Star).unwrap(), 2);
        assert_eq!(collect_variant(10, 100, Variant::Star).unwrap(), vec![1, 7]);
        for v in [Variant::All, Variant::Star, Variant::Even] {
            assert_eq!(count_upto(10, 0, v).unwrap(), 0);
        }
    }

    #[test]
    fn count_upto_matches_enumeration() {
        for b in [2u32, 3, 10] {
            for x in (0..3000u64).step_by(7).chain([9999, 10_000, 10_001, 123_456]) {
                for v in [Variant::All, Variant::Star, Variant::Even] {
                    let brute = oracle::naive_pal_set(b, x)
                        .unwrap()
                        .into_iter()
                        .filter(|&n| {
                            let l = crate::digits::digit_count(n, b) - 1;
                            variant_accepts(b, v, n, l)
                        })
                        .count() as u64;
                    assert_eq!(count_upto(b, x, v).unwrap(), brute, "b={b} x={x} {v:?}");
                }
            }
        }
    }

    #[test]
    fn block_difference_identity() {
        for b in [2u32, 3, 7, 10] {
            for l in 1..=8u32 {
                let top = (b as u64).pow(l + 1) - 1;
                let bottom = (b as u64).pow(l) - 1;
                let d = count_upto(b, top, Variant::All).unwrap()
                    - count_upto(b, bottom, Variant::All).unwrap();
                assert_eq!(d, block_size(b, l));
            }
        }
    }

    #[test]
    fn ap_examples() {
        assert_eq!(count_in_ap(2, 2, 3, 2).unwrap(), 1);
        let coprime = iter_pal_block(10, 4).unwrap().filter(|&n| gcd(n, 10) == 1).count() as u64;
        assert_eq!(count_in_ap(10, 4, 1, 0).unwrap(), coprime);
        let brute = iter_pal_block(10, 2)
            .unwrap()
            .filter(|&n| n % 11 == 0 && gcd(n, 10) == 1)
            .count() as u64;
        assert_eq!(count_in_ap(10, 2, 11, 0).unwrap(), brute);
        assert_eq!(count_in_ap_with(10, 2, 11, 0, false).unwrap(), 8);
    }

    #[test]
    fn ap_partition_identity() {
        for b in [2u32, 10] {
            for l in 0..=8 {
                let coprime = iter_pal_block(b, l)
                    .unwrap()
                    .filter(|&n| gcd(n, b as u64) == 1)
                    .count() as u64;
                for q in 1..=30u64 {
                    let total: u64 = (0..q as i64).map(|a| count_in_ap(b, l, q, a).unwrap()).sum();
                    assert_eq!(total, coprime, "b={b} L={l} q={q}");
                    assert_eq!(residue_histogram(b, l, q, true).unwrap().iter().sum::<u64>(), coprime);
                }
            }
        }
    }

    #[test]
    fn divisible_examples() {
        assert_eq!(count_divisible(10, 2, 11).unwrap(), 8);
        assert_eq!(count_divisible(7, 3, 1).unwrap(), block_size(7, 3));
        assert_eq!(count_divisible(2, 2, 7).unwrap(), 1);
    }

    #[test]
    fn bs_ratio_q_one() {
        for (b, l) in [(10u32, 3u32), (2, 6), (3, 5)] {
            let r = bs_max_ratio(b, l, 1).unwrap();
            assert!(r < 1.0 && r > 0.0);
        }
        assert!(bs_max_ratio(10, 4, 7).unwrap() > 0.0);
        assert!(bs_max_ratio(2, 6, 5).unwrap() > 0.0);
    }

    #[test]
    fn square_pair_examples() {
        // N^2 beyond the block
        assert_eq!(count_square_pairs(10, 2, 1, 0, 40).unwrap(), 0);
        assert_eq!(count_square_pairs(10, 2, 1, 0, 2).unwrap(), 0);
        assert!(count_square_pairs(10, 2, 4, 1, 3).is_err());
        // n = 3 only: 3-digit palindromes = 1 (3) coprime to 10 divisible by 9
        let brute = iter_pal_block(10, 2)
            .unwrap()
            .filter(|&n| gcd(n, 10) == 1 && n % 3 == 1 && n % 9 == 0)
            .count() as u64;
        assert_eq!(count_square_pairs(10, 2, 3, 1, 3).unwrap(), brute);
    }

    #[test]
    fn square_pair_strategies_agree() {
        for (b, l) in [(10u32, 5u32), (2, 12), (3, 7), (10, 6)] {
            for q in [1u64, 7, 13] {
                if gcd(q, b as u64) != 1 {
                    continue;
                }
                for n_max in [2u64, 5, 9, 16, 33, 70, 200] {
                    for a in [0i64, 1, 5] {
                        let runs: Vec<u64> = [
                            PairStrategy::TestEach,
                            PairStrategy::SquarePart,
                            PairStrategy::Multiples,
                        ]
                        .into_iter()
                        .map(|s| count_square_pairs_with(b, l, q, a, n_max, s).unwrap())
                        .collect();
                        assert!(
                            runs.iter().all(|&r| r == runs[0]),
                            "b={b} L={l} q={q} a={a} N={n_max}: {runs:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn square_root_part_examples() {
        assert_eq!(divisors_of(&square_root_part(72)), vec![1, 2, 3, 6]);
        let p = 1_000_003u64;
        assert_eq!(square_root_part(5 * p * p), vec![(p, 1)]);
        assert_eq!(square_root_part(5 * p), vec![]);
    }

    #[test]
    fn query_surface() {
        let mut q = PalindromeQuery::new(10, Bound::Block(2));
        q.modulus = Some(11);
        q.residue = Some(0);
        assert_eq!(q.count().unwrap(), 8);
        q.coprime_to_base = true;
        assert_eq!(q.count().unwrap(), count_in_ap(10, 2, 11, 0).unwrap());
        let bad = PalindromeQuery {
            residue: Some(1),
            ..PalindromeQuery::new(10, Bound::UpTo(100))
        };
        assert!(bad.validate().is_err());
        let star = PalindromeQuery {
            variant: Variant::Star,
            ..PalindromeQuery::new(10, Bound::UpTo(100))
        };
        assert_eq!(star.collect().unwrap(), vec![1, 7]);
    }
}
