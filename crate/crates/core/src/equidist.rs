//! Square-free palindromes coprime to `m_b = b^3 - b` in residue classes,
//! compared with the main term `6 S(m_b) S(q) |P*_b(y)| / (pi^2 q)`.
//!
//! Counting functions of `y` only move at members of `P*_b(x)`, so suprema
//! over `y <= x` are taken exactly by sweeping those members.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{gcd, is_squarefree, singular_series, SQUAREFREE_DENSITY};
use crate::palsets::{base_modulus, collect_variant, Variant};
use crate::{Error, Result, INT_CAP};

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: &str = "x,q,a,count,main_term,abs_err,rel_err,sigma_hat";

fn check_modulus(b: u32, q: u64) -> Result<()> {
    if q == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    let m_b = base_modulus(b);
    if gcd(q, m_b) != 1 {
        return Err(Error::Domain(format!("q={q} shares a factor with m_b={m_b}")));
    }
    Ok(())
}

/// `6 S(m_b) S(q) / (pi^2 q)`, the main term per member of `P*_b(y)`.
pub fn main_term_factor(b: u32, q: u64) -> Result<f64> {
    check_modulus(b, q)?;
    let s_mb = singular_series(base_modulus(b))?.to_f64();
    let s_q = singular_series(q)?.to_f64();
    Ok(SQUAREFREE_DENSITY * s_mb * s_q / q as f64)
}

/// `6 S(m_b) S(q) |P*_b(y)| / (pi^2 q)`.
pub fn main_term(b: u32, q: u64, y: u64) -> Result<f64> {
    let factor = main_term_factor(b, q)?;
    if y == 0 {
        return Ok(0.0);
    }
    let size = crate::palsets::count_upto(b, y, Variant::Star)?;
    Ok(factor * size as f64)
}

/// Members of `P*_b(x)` in ascending order, each with its square-free flag.
#[derive(Debug, Clone)]
pub struct StarSet {
    base: u32,
    x: u64,
    members: Vec<u64>,
    squarefree: Vec<bool>,
}

impl StarSet {
    pub fn new(b: u32, x: u64) -> Result<Self> {
        if x > INT_CAP {
            return Err(Error::range("x", x, "x <= 10^18"));
        }
        let members = collect_variant(b, x, Variant::Star)?;
        let squarefree = members.par_iter().map(|&n| is_squarefree(n)).collect();
        Ok(StarSet {
            base: b,
            x,
            members,
            squarefree,
        })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn squarefree_flags(&self) -> &[bool] {
        &self.squarefree
    }

    /// Number of members `<= y`.
    pub fn size_upto(&self, y: u64) -> usize {
        self.members.partition_point(|&n| n <= y)
    }

    /// Square-free members `<= y` per class modulo `q`.
    pub fn class_counts(&self, y: u64, q: u64) -> Vec<u64> {
        let mut counts = vec![0u64; q as usize];
        let k = self.size_upto(y);
        for (&n, &sf) in self.members[..k].iter().zip(&self.squarefree[..k]) {
            if sf {
                counts[(n % q) as usize] += 1;
            }
        }
        counts
    }

    /// `sup_{y <= x} max_{(a, q) = 1} |count_a(y) - main(y)|`.
    ///
    /// After `k` members the deviation of class `a` is `c_a(k) - f k`, linear
    /// in `k` between two increments of `c_a`; its extremes sit at the run
    /// endpoints, i.e. just before and just after each increment, and at the
    /// final `k`.
    pub fn discrepancy(&self, q: u64) -> Result<f64> {
        let factor = main_term_factor(self.base, q)?;
        let mut counts = vec![0u64; q as usize];
        let mut best: f64 = 0.0;
        for (k, (&n, &sf)) in self.members.iter().zip(&self.squarefree).enumerate() {
            let a = (n % q) as usize;
            if !sf || gcd(a as u64, q) != 1 {
                continue;
            }
            let before = (counts[a] as f64 - factor * k as f64).abs();
            counts[a] += 1;
            let after = (counts[a] as f64 - factor * (k + 1) as f64).abs();
            best = best.max(before).max(after);
        }
        let total = factor * self.members.len() as f64;
        for (a, &c) in counts.iter().enumerate() {
            if gcd(a as u64, q) == 1 {
                best = best.max((c as f64 - total).abs());
            }
        }
        Ok(best)
    }

    /// `sup_y max_{(a, q) = 1} sum_{d ~ D, (d, q m_b) = 1}
    /// |#{n <= y : d^2 | n, n = a (q)} - |P*_b(y)| / (q d^2)|`.
    ///
    /// For fixed `a` the summand is a sum of `|c - k t|` terms, convex in `k`
    /// between changes of the counters of class `a`, so it is evaluated just
    /// before and after each such change and at the end.
    pub fn square_discrepancy(&self, q: u64, d_range: u64) -> Result<f64> {
        check_modulus(self.base, q)?;
        let m_b = base_modulus(self.base);
        let ds: Vec<u64> = ((d_range / 2 + 1)..=d_range)
            .filter(|&d| gcd(d, q) == 1 && gcd(d, m_b) == 1)
            .collect();
        if ds.is_empty() {
            return Ok(0.0);
        }
        let slopes: Vec<f64> = ds.iter().map(|&d| 1.0 / (q * d * d) as f64).collect();
        let mut counts = vec![0u64; q as usize * ds.len()];
        let eval = |row: &[u64], k: usize| -> f64 {
            row.iter()
                .zip(&slopes)
                .map(|(&c, &s)| (c as f64 - k as f64 * s).abs())
                .sum()
        };
        let mut best: f64 = 0.0;
        let width = ds.len();
        for (k, &n) in self.members.iter().enumerate() {
            let a = (n % q) as usize;
            if gcd(a as u64, q) != 1 {
                continue;
            }
            let hits: Vec<usize> = ds
                .iter()
                .enumerate()
                .filter(|&(_, &d)| n % (d * d) == 0)
                .map(|(i, _)| i)
                .collect();
            if hits.is_empty() {
                continue;
            }
            let row = &mut counts[a * width..(a + 1) * width];
            best = best.max(eval(row, k));
            for i in hits {
                row[i] += 1;
            }
            best = best.max(eval(row, k + 1));
        }
        let k = self.members.len();
        for a in (0..q as usize).filter(|&a| gcd(a as u64, q) == 1) {
            best = best.max(eval(&counts[a * width..(a + 1) * width], k));
        }
        Ok(best)
    }
}

/// Square-free members of `P*_b(y)` congruent to `a` modulo `q`.
pub fn sqfree_pal_count(b: u32, y: u64, q: u64, a: i64) -> Result<u64> {
    if q == 0 {
        return Err(Error::Domain("modulus must be positive".into()));
    }
    let set = StarSet::new(b, y)?;
    let a = crate::arith::reduce(a, q);
    Ok(set
        .members
        .iter()
        .zip(&set.squarefree)
        .filter(|&(&n, &sf)| sf && n % q == a)
        .count() as u64)
}

pub fn discrepancy(b: u32, x: u64, q: u64) -> Result<f64> {
    check_modulus(b, q)?;
    StarSet::new(b, x)?.discrepancy(q)
}

/// Which moduli an aggregate runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModulusRange {
    /// `Q/2 < q <= Q`.
    Dyadic,
    /// `1 <= q <= Q`.
    UpTo,
}

impl ModulusRange {
    pub fn moduli(self, b: u32, q_max: u64) -> Vec<u64> {
        let lo = match self {
            ModulusRange::Dyadic => q_max / 2 + 1,
            ModulusRange::UpTo => 1,
        };
        let m_b = base_modulus(b);
        (lo..=q_max).filter(|&q| gcd(q, m_b) == 1).collect()
    }
}

/// `E(Q)`: the discrepancy summed over `q ~ Q` coprime to `m_b`.
pub fn e_of_q(b: u32, x: u64, q_max: u64) -> Result<f64> {
    e_of_q_with(b, x, q_max, ModulusRange::Dyadic)
}

pub fn e_of_q_with(b: u32, x: u64, q_max: u64, range: ModulusRange) -> Result<f64> {
    if q_max == 0 {
        return Err(Error::Domain("Q must be positive".into()));
    }
    let set = StarSet::new(b, x)?;
    let parts = range
        .moduli(b, q_max)
        .par_iter()
        .map(|&q| set.discrepancy(q))
        .collect::<Result<Vec<f64>>>()?;
    Ok(parts.iter().sum())
}

/// `E(Q, D)`: square-divisor discrepancies summed over `q ~ Q`.
pub fn e_of_qd(b: u32, x: u64, q_max: u64, d_range: u64) -> Result<f64> {
    if q_max == 0 || d_range == 0 {
        return Err(Error::Domain("Q and D must be positive".into()));
    }
    let set = StarSet::new(b, x)?;
    let parts = ModulusRange::Dyadic
        .moduli(b, q_max)
        .par_iter()
        .map(|&q| set.square_discrepancy(q, d_range))
        .collect::<Result<Vec<f64>>>()?;
    Ok(parts.iter().sum())
}

/// Where the moduli of an experiment come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModulusSet {
    Explicit(Vec<u64>),
    Range { q_max: u64, range: ModulusRange },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Tsv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "tsv" => Ok(OutputFormat::Tsv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format `{other}`"))),
        }
    }
}

/// Rows are evaluated at `y = x`; aggregates take the sup over `y <= x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum YGrid {
    #[default]
    Endpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub base: u32,
    pub xs: Vec<u64>,
    pub moduli: ModulusSet,
    /// Dyadic square-divisor range `D` for `E(Q, D)`.
    pub d_range: Option<u64>,
    pub coprime_required: bool,
    #[serde(default)]
    pub y_grid: YGrid,
    #[serde(default)]
    pub seed: u64,
    #[serde(skip)]
    pub format: OutputFormat,
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub baseline: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(base: u32, xs: Vec<u64>, moduli: ModulusSet) -> Self {
        ExperimentConfig {
            base,
            xs,
            moduli,
            d_range: None,
            coprime_required: true,
            y_grid: YGrid::Endpoint,
            seed: 0,
            format: OutputFormat::Csv,
            threads: None,
            baseline: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.base < 2 {
            return Err(Error::Config(format!("base must be >= 2, got {}", self.base)));
        }
        if self.xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("scales must be strictly increasing".into()));
        }
        if let Some(&x) = self.xs.iter().find(|&&x| x > INT_CAP) {
            return Err(Error::Config(format!("scale {x} exceeds 10^18")));
        }
        if self.d_range == Some(0) {
            return Err(Error::Config("square-divisor range D must be positive".into()));
        }
        let m_b = base_modulus(self.base);
        if let ModulusSet::Explicit(qs) = &self.moduli {
            if let Some(&q) = qs.iter().find(|&&q| q == 0) {
                return Err(Error::Config(format!("modulus {q} is not positive")));
            }
            if self.coprime_required {
                if let Some(&q) = qs.iter().find(|&&q| gcd(q, m_b) != 1) {
                    return Err(Error::Config(format!(
                        "modulus {q} is not coprime to m_b = {m_b}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The moduli actually used: sorted, deduplicated, coprime to `m_b`.
    pub fn resolved_moduli(&self) -> Vec<u64> {
        let m_b = base_modulus(self.base);
        let mut qs = match &self.moduli {
            ModulusSet::Explicit(qs) => qs.clone(),
            ModulusSet::Range { q_max, range } => range.moduli(self.base, *q_max),
        };
        qs.retain(|&q| q > 0 && gcd(q, m_b) == 1);
        qs.sort_unstable();
        qs.dedup();
        qs
    }

    /// SHA-256 of the scientific part of the configuration (threads, output
    /// format and paths excluded).
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex(&Sha256::digest(canonical.as_bytes()))
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub x: u64,
    pub q: u64,
    pub a: u64,
    pub count: u64,
    pub main_term: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    /// `-ln(abs_err / sqrt x) / sqrt(ln x)`; `None` when the error is 0 or `x <= 1`.
    pub sigma_hat: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleAggregate {
    pub x: u64,
    pub star_size: u64,
    /// Sum over the moduli of the sup-over-`y` discrepancy.
    pub e_q: f64,
    pub e_qd: Option<f64>,
    pub max_abs_err: f64,
    pub avg_abs_err: f64,
    pub max_rel_err: f64,
    /// `sigma_hat` computed from `e_q`.
    pub sigma_hat: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMeta {
    pub config_hash: String,
    pub version: String,
    pub seed: u64,
    pub wall_ms: u64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub metadata: ReportMeta,
    pub rows: Vec<ReportRow>,
    pub aggregates: Vec<ScaleAggregate>,
}

/// `-ln(err / sqrt x) / sqrt(ln x)`.
pub fn sigma_hat(err: f64, x: u64) -> Option<f64> {
    if err <= 0.0 || x <= 1 {
        return None;
    }
    let lx = (x as f64).ln();
    Some(-(err / (x as f64).sqrt()).ln() / lx.sqrt())
}

fn scale_report(
    cfg: &ExperimentConfig,
    moduli: &[u64],
    x: u64,
) -> Result<(Vec<ReportRow>, ScaleAggregate)> {
    let b = cfg.base;
    let set = StarSet::new(b, x)?;
    let size = set.members.len() as u64;
    let per_q = moduli
        .par_iter()
        .map(|&q| -> Result<(Vec<ReportRow>, f64, Option<f64>)> {
            let factor = main_term_factor(b, q)?;
            let main = factor * size as f64;
            let counts = set.class_counts(x, q);
            let rows = (0..q)
                .filter(|&a| gcd(a, q) == 1)
                .map(|a| {
                    let count = counts[a as usize];
                    let abs_err = (count as f64 - main).abs();
                    ReportRow {
                        x,
                        q,
                        a,
                        count,
                        main_term: main,
                        abs_err,
                        rel_err: abs_err / main.max(1.0),
                        sigma_hat: sigma_hat(abs_err, x),
                    }
                })
                .collect();
            let disc = set.discrepancy(q)?;
            let square = cfg.d_range.map(|d| set.square_discrepancy(q, d)).transpose()?;
            Ok((rows, disc, square))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut e_q = 0.0;
    let mut e_qd = cfg.d_range.map(|_| 0.0);
    for (r, disc, square) in per_q {
        rows.extend(r);
        e_q += disc;
        if let (Some(acc), Some(s)) = (e_qd.as_mut(), square) {
            *acc += s;
        }
    }
    let max_abs_err = rows.iter().map(|r| r.abs_err).fold(0.0, f64::max);
    let max_rel_err = rows.iter().map(|r| r.rel_err).fold(0.0, f64::max);
    let avg_abs_err = if rows.is_empty() {
        0.0
    } else {
        rows.iter().map(|r| r.abs_err).sum::<f64>() / rows.len() as f64
    };
    let agg = ScaleAggregate {
        x,
        star_size: size,
        e_q,
        e_qd,
        max_abs_err,
        avg_abs_err,
        max_rel_err,
        sigma_hat: sigma_hat(e_q, x),
    };
    Ok((rows, agg))
}

fn run_inner(cfg: &ExperimentConfig) -> Result<(Vec<ReportRow>, Vec<ScaleAggregate>)> {
    let moduli = cfg.resolved_moduli();
    let mut rows = Vec::new();
    let mut aggregates = Vec::new();
    if moduli.is_empty() {
        return Ok((rows, aggregates));
    }
    for &x in &cfg.xs {
        let (r, agg) = scale_report(cfg, &moduli, x)?;
        rows.extend(r);
        aggregates.push(agg);
    }
    rows.sort_by_key(|r| (r.x, r.q, r.a));
    Ok((rows, aggregates))
}

/// Runs the configured experiment, on a dedicated pool when `threads` is set.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let start = Instant::now();
    let (rows, aggregates) = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| run_inner(cfg))?,
        None => run_inner(cfg)?,
    };
    Ok(ExperimentReport {
        schema: SCHEMA_VERSION,
        metadata: ReportMeta {
            config_hash: cfg.hash(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: cfg.seed,
            wall_ms: start.elapsed().as_millis() as u64,
            note: "rows at y = x; e_q takes max over classes of the per-class sup over y <= x".into(),
        },
        rows,
        aggregates,
    })
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.12e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_else(|| "inf".into())
}

impl ExperimentReport {
    /// Delimited table with a `# schema=1` first line; no timing data, so
    /// the bytes depend only on the configuration.
    pub fn to_delimited(&self, sep: char) -> String {
        let mut out = format!("# schema={}\n", self.schema);
        out.push_str(&CSV_HEADER.replace(',', &sep.to_string()));
        out.push('\n');
        for r in &self.rows {
            let fields = [
                r.x.to_string(),
                r.q.to_string(),
                r.a.to_string(),
                r.count.to_string(),
                fmt_f64(r.main_term),
                fmt_f64(r.abs_err),
                fmt_f64(r.rel_err),
                fmt_opt(r.sigma_hat),
            ];
            out.push_str(&fields.join(&sep.to_string()));
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> String {
        self.to_delimited(',')
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Tsv => self.to_delimited('\t'),
            OutputFormat::Json => self.to_json() + "\n",
        }
    }

    pub fn write(&self, path: &Path, format: OutputFormat) -> Result<()> {
        std::fs::write(path, self.render(format)).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Largest relative error among the rows at scale `x`.
    pub fn max_rel_err_at(&self, x: u64) -> Option<f64> {
        self.aggregates.iter().find(|a| a.x == x).map(|a| a.max_rel_err)
    }
}

/// Result of the directional trend check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendSummary {
    pub xs: Vec<u64>,
    pub max_rel_err: Vec<f64>,
    pub min_sigma_hat: Vec<f64>,
    /// Largest accepted ratio `max_rel_err(last) / max_rel_err(first)`.
    pub threshold: f64,
    pub decreasing: bool,
    pub sigma_positive: bool,
}

/// Default for [`TrendSummary::threshold`]: the last scale must strictly
/// improve on the first.
pub const TREND_THRESHOLD: f64 = 1.0;

pub fn trend_check(report: &ExperimentReport, threshold: f64) -> TrendSummary {
    let xs: Vec<u64> = report.aggregates.iter().map(|a| a.x).collect();
    let max_rel_err: Vec<f64> = report.aggregates.iter().map(|a| a.max_rel_err).collect();
    let min_sigma_hat: Vec<f64> = xs
        .iter()
        .map(|&x| {
            report
                .rows
                .iter()
                .filter(|r| r.x == x)
                .map(|r| r.sigma_hat.unwrap_or(f64::INFINITY))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let decreasing = match (max_rel_err.first(), max_rel_err.last()) {
        (Some(&first), Some(&last)) if max_rel_err.len() >= 2 => last < first * threshold,
        _ => false,
    };
    TrendSummary {
        sigma_positive: !min_sigma_hat.is_empty() && min_sigma_hat.iter().all(|&s| s > 0.0),
        xs,
        max_rel_err,
        min_sigma_hat,
        threshold,
        decreasing,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Rational;
    use crate::oracle::{naive_discrepancy, naive_pal_set, naive_squarefree};
    use std::f64::consts::PI;

    #[test]
    fn main_term_examples() {
        assert_eq!(singular_series(990).unwrap(), Rational::new(605, 384));
        let v = main_term(10, 1, 100).unwrap();
        assert!((v - 6.0 * 605.0 / 384.0 * 2.0 / (PI * PI)).abs() < 1e-12);
        assert!((v - 1.9156).abs() < 1e-4);
        assert_eq!(main_term(10, 7, 0).unwrap(), 0.0);
        let v7 = main_term(10, 7, 100).unwrap();
        assert!((v7 - 6.0 * (605.0 / 384.0) * (49.0 / 48.0) * 2.0 / (7.0 * PI * PI)).abs() < 1e-12);
        assert!(matches!(main_term(10, 11, 100), Err(Error::Domain(_))));
    }

    #[test]
    fn count_examples() {
        assert_eq!(sqfree_pal_count(10, 100, 1, 0).unwrap(), 2);
        assert_eq!(sqfree_pal_count(10, 100, 3, 0).unwrap(), 0);
        let m2 = base_modulus(2);
        let brute = naive_pal_set(2, 100)
            .unwrap()
            .into_iter()
            .filter(|&n| gcd(n, m2) == 1 && n % 5 == 2 && naive_squarefree(n).unwrap())
            .count() as u64;
        assert_eq!(sqfree_pal_count(2, 100, 5, 2).unwrap(), brute);
    }

    #[test]
    fn discrepancy_examples() {
        let d = discrepancy(10, 100, 1).unwrap();
        assert!(d >= (2.0 - main_term(10, 1, 100).unwrap()).abs());
        assert_eq!(discrepancy(10, 0, 7).unwrap(), 0.0);
        for (b, x, q) in [(10u32, 10_000u64, 1u64), (10, 10_000, 7), (2, 10_000, 5), (3, 5_000, 7)] {
            let fast = discrepancy(b, x, q).unwrap();
            let slow = naive_discrepancy(b, x, q).unwrap();
            assert!((fast - slow).abs() < 1e-9, "{b} {x} {q}: {fast} vs {slow}");
        }
        assert!(discrepancy(10, 1000, 3).is_err());
    }

    #[test]
    fn aggregate_examples() {
        assert_eq!(e_of_q(10, 100, 1).unwrap(), discrepancy(10, 100, 1).unwrap());
        assert_eq!(ModulusRange::Dyadic.moduli(10, 8), vec![7]);
        assert_eq!(e_of_q(10, 1_000_000, 8).unwrap(), discrepancy(10, 1_000_000, 7).unwrap());
        assert!(e_of_q(2, 10_000, 4).unwrap().is_finite());
        // D^2 > x: all square counts vanish, only the main terms remain
        let x = 100;
        let star = StarSet::new(10, x).unwrap();
        let expect: f64 = (6..=10u64)
            .filter(|&d| gcd(d, 990) == 1)
            .map(|d| star.members().len() as f64 / (d * d) as f64)
            .sum();
        assert!((e_of_qd(10, x, 1, 10).unwrap() - expect).abs() < 1e-12);
        assert!(e_of_qd(10, 1_000_000, 1, 2).unwrap().is_finite());
        assert!(e_of_qd(2, 100_000, 3, 2).unwrap().is_finite());
    }

    #[test]
    fn partition_identity() {
        for b in [2u32, 10] {
            for y in [1u64, 99, 5_000, 100_000] {
                let set = StarSet::new(b, y).unwrap();
                let total = set.squarefree_flags().iter().filter(|&&s| s).count() as u64;
                for q in 1..=20 {
                    assert_eq!(set.class_counts(y, q).iter().sum::<u64>(), total);
                }
            }
        }
    }

    #[test]
    fn experiment_examples() {
        let cfg = ExperimentConfig::new(10, vec![100], ModulusSet::Explicit(vec![1]));
        let rep = run_experiment(&cfg).unwrap();
        assert_eq!(rep.rows.len(), 1);
        let r = &rep.rows[0];
        assert_eq!((r.x, r.q, r.a, r.count), (100, 1, 0, 2));
        assert!((r.main_term - main_term(10, 1, 100).unwrap()).abs() < 1e-12);
        let csv = rep.to_csv();
        assert!(csv.starts_with("# schema=1\nx,q,a,count,main_term,abs_err,rel_err,sigma_hat\n"));

        let empty = ExperimentConfig::new(10, vec![100], ModulusSet::Explicit(vec![]));
        assert!(run_experiment(&empty).unwrap().rows.is_empty());

        let bad = ExperimentConfig::new(10, vec![100], ModulusSet::Explicit(vec![11]));
        assert!(matches!(run_experiment(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn hash_ignores_threads() {
        let mut cfg = ExperimentConfig::new(10, vec![100, 1000], ModulusSet::Explicit(vec![7]));
        let h = cfg.hash();
        cfg.threads = Some(8);
        cfg.format = OutputFormat::Json;
        assert_eq!(cfg.hash(), h);
        cfg.xs.push(10_000);
        assert_ne!(cfg.hash(), h);
    }
}
