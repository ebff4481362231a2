mod numbers;
mod table;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use palsqf::baseline::Baselines;
use palsqf::equidist::{run_experiment, ExperimentConfig, ModulusRange, ModulusSet, OutputFormat};
use palsqf::expsums::{
    correlation_check, gauss_star, k2, k2_crt_check, k2_salie, kummer2, shparlinski_ratio, twisted_incomplete_k2,
};
use palsqf::harmonics::{moment_bound_ratio, phi_big, phi_moment_exact};
use palsqf::largesieve::{delta_bound, ls_quadratic_form, spacing_sup, Coefficients, DEFAULT_EPSILON};
use palsqf::palsets::{
    block_size, count_square_pairs_with, pair_strategy, residue_histogram, Bound, PairStrategy, PalindromeQuery,
    Variant,
};
use palsqf::verify::{self, VerifyOptions, DEFAULT_SEED};
use palsqf::Error;

use numbers::{parse_i64, parse_u32, parse_u64, parse_u64_list, U64List};
use table::{Cell, Format, Table};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

/// Square-free palindromes in arithmetic progressions: counts, exponential
/// sums, sieve quantities, experiments and identity checks.
///
/// Integer flags accept scientific notation (`1e10`). Tables print as plain
/// text unless `--out` is given; CSV and TSV start with a `# schema=1` line.
#[derive(Debug, Parser)]
#[command(name = "palsqf", version)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_parser = parse_threads)]
    threads: Option<usize>,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED, value_parser = parse_u64)]
    seed: u64,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    out: Option<Format>,

    /// Baseline JSON file (default: the constants compiled into the binary).
    #[arg(long, global = true)]
    baseline: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List palindromes. Columns: n
    Enumerate(SetArgs),
    /// Count palindromes. Columns: count
    Count(SetArgs),
    /// Palindromes of a block per residue class, coprime to the base unless
    /// `--include-noncoprime`. Columns: q,a,count,block_size
    ApCount(ApArgs),
    /// Pairs (n, l) with N/2 < n <= N, n^2 | l, l in the block and class.
    /// Columns: b,L,q,a,N,count,strategy
    SquarePairs(PairArgs),
    /// Complete and incomplete exponential sums. Columns depend on --kind
    /// and are printed in the header.
    Expsum(ExpsumArgs),
    /// Digit harmonics Phi_N. Columns: alpha,phi, or with --moment:
    /// b,N,K,moment,ratio
    Harmonics(HarmonicsArgs),
    /// Large-sieve quantities for moduli q d^2, d <= D.
    /// Columns: D,N,q,epsilon,delta,spacing_sup,spacing_ratio,quadratic_max_ratio
    Sieve(SieveArgs),
    /// Square-free palindromes in progressions against the main term.
    /// Columns: x,q,a,count,main_term,abs_err,rel_err,sigma_hat
    Equidist(EquidistArgs),
    /// Run a named check, or `all`. Columns: id,criterion,passed,cases,failed,elapsed_ms,detail
    Verify(VerifyArgs),
    /// Recompute the frozen constants, print the differences and write the
    /// file given by --baseline.
    Baseline,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    All,
    Star,
    Even,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::All => Variant::All,
            VariantArg::Star => Variant::Star,
            VariantArg::Even => Variant::Even,
        }
    }
}

#[derive(Debug, Args)]
struct SetArgs {
    #[arg(long, value_parser = parse_u32)]
    base: u32,
    /// All palindromes up to x.
    #[arg(long, value_parser = parse_u64, conflicts_with = "block_l", required_unless_present = "block_l")]
    max_x: Option<u64>,
    /// The block [b^L, b^(L+1)).
    #[arg(long = "block-L", value_parser = parse_u32)]
    block_l: Option<u32>,
    #[arg(long, value_enum, default_value = "all")]
    variant: VariantArg,
    #[arg(long, value_parser = parse_u64)]
    modulus: Option<u64>,
    #[arg(long, value_parser = parse_i64, requires = "modulus")]
    residue: Option<i64>,
}

impl SetArgs {
    fn query(&self) -> PalindromeQuery {
        let bound = match (self.max_x, self.block_l) {
            (Some(x), _) => Bound::UpTo(x),
            (None, Some(l)) => Bound::Block(l),
            (None, None) => unreachable!("clap requires one bound"),
        };
        let mut q = PalindromeQuery::new(self.base, bound);
        q.variant = self.variant.into();
        q.modulus = self.modulus;
        q.residue = self.residue;
        q
    }
}

#[derive(Debug, Args)]
struct ApArgs {
    #[arg(long, value_parser = parse_u32)]
    base: u32,
    #[arg(long = "block-L", value_parser = parse_u32)]
    block_l: u32,
    #[arg(long, value_parser = parse_u64)]
    modulus: u64,
    /// Only this class (default: every class).
    #[arg(long, value_parser = parse_i64)]
    residue: Option<i64>,
    #[arg(long)]
    include_noncoprime: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    TestEach,
    SquarePart,
    Multiples,
}

#[derive(Debug, Args)]
struct PairArgs {
    #[arg(long, value_parser = parse_u32)]
    base: u32,
    #[arg(long = "block-L", value_parser = parse_u32)]
    block_l: u32,
    #[arg(long, value_parser = parse_u64, default_value = "1")]
    modulus: u64,
    #[arg(long, value_parser = parse_i64, default_value = "0")]
    residue: i64,
    /// The dyadic parameter N.
    #[arg(long, value_parser = parse_u64)]
    nmax: u64,
    #[arg(long, value_enum, default_value = "auto")]
    strategy: StrategyArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SumKind {
    Gauss,
    K2,
    Kummer,
    Salie,
    Crt,
    Correlation,
    Twisted,
    Laurent,
}

#[derive(Debug, Args)]
struct ExpsumArgs {
    #[arg(long, value_enum)]
    kind: SumKind,
    #[arg(long, value_parser = parse_u64)]
    modulus: u64,
    #[arg(long, value_parser = parse_i64, allow_hyphen_values = true, default_value = "1")]
    c: i64,
    #[arg(long, value_parser = parse_i64, allow_hyphen_values = true, default_value = "1")]
    d: i64,
    /// Multiplier a of gauss and twisted.
    #[arg(long, value_parser = parse_i64, allow_hyphen_values = true, default_value = "1")]
    a: i64,
    /// Second modulus of crt.
    #[arg(long, value_parser = parse_u64)]
    r: Option<u64>,
    /// Frequency of twisted.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    alpha: f64,
    /// Length of twisted.
    #[arg(long, value_parser = parse_u64, default_value = "100")]
    nmax: u64,
    /// Exponents of laurent.
    #[arg(long, allow_hyphen_values = true, default_value_t = -2)]
    k: i32,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
    l: i32,
}

#[derive(Debug, Args)]
struct HarmonicsArgs {
    #[arg(long, value_parser = parse_u32)]
    base: u32,
    /// The length N of Phi_N.
    #[arg(long, value_parser = parse_u32)]
    nmax: u32,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Evaluate on this many equally spaced points of [0, 1).
    #[arg(long, value_parser = parse_u64, default_value = "64", conflicts_with = "alpha")]
    points: u64,
    /// Exact moment of order 2K instead of values.
    #[arg(long, value_parser = parse_u32, conflicts_with = "alpha")]
    moment: Option<u32>,
}

#[derive(Debug, Args)]
struct SieveArgs {
    #[arg(long, value_parser = parse_u64)]
    dmax: u64,
    #[arg(long, value_parser = parse_u64)]
    nmax: u64,
    #[arg(long, value_parser = parse_u64, default_value = "1")]
    modulus: u64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Random unimodular sequences for the quadratic form.
    #[arg(long, value_parser = parse_u64, default_value = "20")]
    trials: u64,
}

#[derive(Debug, Args)]
struct EquidistArgs {
    #[arg(long, value_parser = parse_u32, default_value = "10")]
    base: u32,
    /// Comma-separated scales.
    #[arg(long, value_parser = parse_u64_list)]
    xs: U64List,
    /// Comma-separated moduli.
    #[arg(long, value_parser = parse_u64_list, conflicts_with = "qmax", required_unless_present = "qmax")]
    moduli: Option<U64List>,
    /// All moduli Q/2 < q <= Q coprime to b^3 - b.
    #[arg(long, value_parser = parse_u64)]
    qmax: Option<u64>,
    /// Square-divisor range D of E(Q, D).
    #[arg(long, value_parser = parse_u64)]
    dmax: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Check id, or `all`.
    #[arg(default_value = "all")]
    check: String,
    #[arg(long, value_parser = parse_u64)]
    qmax: Option<u64>,
    #[arg(long, value_parser = parse_u64)]
    trials: Option<u64>,
}

fn parse_threads(s: &str) -> Result<usize, String> {
    match parse_u64(s)? {
        0 => Err("at least one thread".into()),
        t => Ok(t as usize),
    }
}

/// What went wrong, mapped onto an exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } | Error::Json { .. } => Failure::Io(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(EXIT_FAIL),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    let format = cli.out.unwrap_or(Format::Text);
    match &cli.command {
        Command::Enumerate(a) => {
            let mut t = Table::new(&["n"]);
            for n in a.query().collect()? {
                t.push(vec![n.into()]);
            }
            emit(&t.render(format))
        }
        Command::Count(a) => {
            let mut t = Table::new(&["count"]);
            t.push(vec![a.query().count()?.into()]);
            emit(&t.render(format))
        }
        Command::ApCount(a) => emit(&ap_count(a)?.render(format)),
        Command::SquarePairs(a) => emit(&square_pairs(a)?.render(format)),
        Command::Expsum(a) => emit(&expsum(a)?.render(format)),
        Command::Harmonics(a) => emit(&harmonics(a)?.render(format)),
        Command::Sieve(a) => emit(&sieve(a, cli.seed)?.render(format)),
        Command::Equidist(a) => equidist(a, &cli, format),
        Command::Verify(a) => verify_cmd(a, &cli, format),
        Command::Baseline => baseline_cmd(&cli),
    }
}

fn emit(text: &str) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Ok(()) => Ok(()),
        // a closed pipe is not an error for a table printer
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(Failure::Io(format!("stdout: {e}"))),
    }
}

fn ap_count(a: &ApArgs) -> CliResult<Table> {
    let coprime = !a.include_noncoprime;
    let hist = residue_histogram(a.base, a.block_l, a.modulus, coprime)?;
    let size = block_size(a.base, a.block_l);
    let mut t = Table::new(&["q", "a", "count", "block_size"]);
    let classes: Vec<u64> = match a.residue {
        Some(r) => vec![r.rem_euclid(a.modulus as i64) as u64],
        None => (0..a.modulus).collect(),
    };
    for r in classes {
        t.push(vec![a.modulus.into(), r.into(), hist[r as usize].into(), size.into()]);
    }
    Ok(t)
}

fn square_pairs(a: &PairArgs) -> CliResult<Table> {
    let strategy = match a.strategy {
        StrategyArg::Auto => pair_strategy(a.base, a.block_l, a.modulus, a.nmax)?,
        StrategyArg::TestEach => PairStrategy::TestEach,
        StrategyArg::SquarePart => PairStrategy::SquarePart,
        StrategyArg::Multiples => PairStrategy::Multiples,
    };
    let count = count_square_pairs_with(a.base, a.block_l, a.modulus, a.residue, a.nmax, strategy)?;
    let name = match strategy {
        PairStrategy::TestEach => "test_each",
        PairStrategy::SquarePart => "square_part",
        PairStrategy::Multiples => "multiples",
    };
    let mut t = Table::new(&["b", "L", "q", "a", "N", "count", "strategy"]);
    t.push(vec![
        a.base.into(),
        a.block_l.into(),
        a.modulus.into(),
        a.residue.rem_euclid(a.modulus.max(1) as i64).into(),
        a.nmax.into(),
        count.into(),
        name.into(),
    ]);
    Ok(t)
}

fn expsum(a: &ExpsumArgs) -> CliResult<Table> {
    let q = a.modulus;
    let complex = |kind: &str, v: (f64, f64)| {
        let mut t = Table::new(&["kind", "q", "re", "im", "abs"]);
        t.push(vec![kind.into(), q.into(), v.0.into(), v.1.into(), v.0.hypot(v.1).into()]);
        t
    };
    Ok(match a.kind {
        SumKind::Gauss => {
            let s = gauss_star(a.a, q)?;
            complex("gauss", (s.value.re, s.value.im))
        }
        SumKind::K2 => {
            let s = k2(a.c, a.d, q)?;
            complex("k2", (s.value.re, s.value.im))
        }
        SumKind::Kummer => {
            let s = kummer2(a.c, a.d, q)?;
            complex("kummer", (s.value.re, s.value.im))
        }
        SumKind::Salie => {
            let s = k2_salie(a.c, a.d, q)?;
            let mut t = Table::new(&["q", "c", "d", "formula_re", "formula_im", "definition_re", "definition_im", "agree"]);
            t.push(vec![
                q.into(),
                a.c.into(),
                a.d.into(),
                s.via_formula.re.into(),
                s.via_formula.im.into(),
                s.via_definition.re.into(),
                s.via_definition.im.into(),
                s.agree.into(),
            ]);
            t
        }
        SumKind::Crt => {
            let r = a.r.ok_or_else(|| Failure::Usage("--kind crt needs --r".into()))?;
            let s = k2_crt_check(a.c, a.d, q, r)?;
            let mut t = Table::new(&["q", "r", "c", "d", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "agree"]);
            t.push(vec![
                q.into(),
                r.into(),
                a.c.into(),
                a.d.into(),
                s.lhs.re.into(),
                s.lhs.im.into(),
                s.rhs.re.into(),
                s.rhs.im.into(),
                s.agree.into(),
            ]);
            t
        }
        SumKind::Correlation => {
            let s = correlation_check(a.c, a.d, q)?;
            let mut t = Table::new(&["q", "c", "d", "sum_form", "ramanujan_form", "bound", "ok"]);
            t.push(vec![
                q.into(),
                a.c.into(),
                a.d.into(),
                s.sum_form.into(),
                s.ramanujan_form.into(),
                s.bound.into(),
                s.ok.into(),
            ]);
            t
        }
        SumKind::Twisted => {
            let s = twisted_incomplete_k2(a.alpha, a.a, a.c, q, a.nmax)?;
            let mut t = Table::new(&["q", "a", "c", "alpha", "N", "value", "bound1", "bound2", "ratio"]);
            t.push(vec![
                q.into(),
                a.a.into(),
                a.c.into(),
                a.alpha.into(),
                a.nmax.into(),
                s.value.into(),
                s.bound1.into(),
                s.bound2.into(),
                s.ratio.into(),
            ]);
            t
        }
        SumKind::Laurent => {
            let r = shparlinski_ratio(a.c, a.d, a.k, a.l, q)?;
            let mut t = Table::new(&["q", "c", "d", "k", "l", "ratio"]);
            t.push(vec![q.into(), a.c.into(), a.d.into(), (a.k as i64).into(), (a.l as i64).into(), r.into()]);
            t
        }
    })
}

fn harmonics(a: &HarmonicsArgs) -> CliResult<Table> {
    if a.base < 2 {
        return Err(Failure::Usage("--base must be at least 2".into()));
    }
    if let Some(k) = a.moment {
        let moment = phi_moment_exact(a.base, a.nmax, k)?;
        let ratio = moment_bound_ratio(a.base, a.nmax, k)?;
        let mut t = Table::new(&["b", "N", "K", "moment", "ratio"]);
        t.push(vec![a.base.into(), a.nmax.into(), k.into(), moment.into(), ratio.into()]);
        return Ok(t);
    }
    let mut t = Table::new(&["alpha", "phi"]);
    let alphas: Vec<f64> = match a.alpha {
        Some(x) => vec![x],
        None => (0..a.points).map(|i| i as f64 / a.points as f64).collect(),
    };
    for x in alphas {
        t.push(vec![x.into(), phi_big(x, a.base, a.nmax).into()]);
    }
    Ok(t)
}

fn sieve(a: &SieveArgs, seed: u64) -> CliResult<Table> {
    if !(0.0..1.0).contains(&a.epsilon) {
        return Err(Failure::Usage("--epsilon must lie in [0, 1)".into()));
    }
    let delta = delta_bound(a.dmax, a.nmax, a.modulus, a.epsilon);
    let sup = spacing_sup(a.dmax, a.nmax, a.modulus)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..a.trials {
        let gamma = Coefficients::random_unit(&mut rng, a.nmax as usize);
        let f = ls_quadratic_form(&gamma, a.dmax, a.modulus)?;
        worst = worst.max(f.value / (delta * f.l2));
    }
    let mut t = Table::new(&[
        "D",
        "N",
        "q",
        "epsilon",
        "delta",
        "spacing_sup",
        "spacing_ratio",
        "quadratic_max_ratio",
    ]);
    t.push(vec![
        a.dmax.into(),
        a.nmax.into(),
        a.modulus.into(),
        a.epsilon.into(),
        delta.into(),
        sup.into(),
        (sup as f64 / delta).into(),
        worst.into(),
    ]);
    Ok(t)
}

fn equidist(a: &EquidistArgs, cli: &Cli, format: Format) -> CliResult<()> {
    let moduli = match (&a.moduli, a.qmax) {
        (Some(m), _) => ModulusSet::Explicit(m.0.clone()),
        (None, Some(q)) => ModulusSet::Range {
            q_max: q,
            range: ModulusRange::Dyadic,
        },
        (None, None) => unreachable!("clap requires moduli or qmax"),
    };
    let mut cfg = ExperimentConfig::new(a.base, a.xs.0.clone(), moduli);
    cfg.d_range = a.dmax;
    cfg.seed = cli.seed;
    cfg.threads = cli.threads;
    cfg.baseline = cli.baseline.clone();
    cfg.format = match format {
        Format::Json => OutputFormat::Json,
        Format::Tsv => OutputFormat::Tsv,
        Format::Csv | Format::Text => OutputFormat::Csv,
    };
    let report = run_experiment(&cfg)?;
    match &a.output {
        Some(path) => Ok(report.write(path, cfg.format)?),
        None => emit(&report.render(cfg.format)),
    }
}

fn load_baselines(path: Option<&Path>) -> CliResult<Baselines> {
    match path {
        Some(p) => Ok(Baselines::load(p)?),
        None => Ok(Baselines::embedded()),
    }
}

fn verify_cmd(a: &VerifyArgs, cli: &Cli, format: Format) -> CliResult<()> {
    let opts = VerifyOptions {
        seed: cli.seed,
        qmax: a.qmax,
        trials: a.trials.map(|t| t as usize),
        baselines: load_baselines(cli.baseline.as_deref())?,
    };
    let specs: Vec<_> = if a.check == "all" {
        verify::registry().iter().collect()
    } else {
        let spec = verify::find(&a.check).ok_or_else(|| {
            let ids: Vec<&str> = verify::registry().iter().map(|c| c.id).collect();
            Failure::Usage(format!("unknown check `{}`; known: all, {}", a.check, ids.join(", ")))
        })?;
        vec![spec]
    };
    let mut table = Table::new(&["id", "criterion", "passed", "cases", "failed", "elapsed_ms", "detail"]);
    let mut all_passed = true;
    for spec in specs {
        let outcome = match spec.run(&opts) {
            Ok(o) => o,
            Err(e @ (Error::MissingBaseline(_) | Error::BaselineGrid { .. })) => {
                eprintln!("FAIL {:<12} {e}", spec.id);
                all_passed = false;
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        all_passed &= outcome.passed;
        if format == Format::Text {
            emit(&format!("{outcome}\n"))?;
        } else {
            for f in &outcome.failures {
                eprintln!("{}: failing case: {f}", outcome.id);
            }
            table.push(vec![
                outcome.id.into(),
                outcome.criterion.map_or(Cell::Text(String::new()), |c| c.into()),
                outcome.passed.into(),
                outcome.cases.into(),
                outcome.failed.into(),
                outcome.elapsed_ms.into(),
                outcome.detail.clone().into(),
            ]);
        }
    }
    if format != Format::Text {
        emit(&table.render(format))?;
    }
    if all_passed {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn baseline_cmd(cli: &Cli) -> CliResult<()> {
    let old = match cli.baseline.as_deref() {
        Some(p) if p.exists() => Baselines::load(p)?,
        Some(_) => Baselines::default(),
        None => Baselines::embedded(),
    };
    let fresh = verify::regenerate_baselines()?;
    let diff = fresh.diff(&old);
    if diff.is_empty() {
        eprintln!("baselines unchanged");
    }
    for line in &diff {
        eprintln!("{line}");
    }
    match cli.baseline.as_deref() {
        Some(p) => Ok(fresh.save(p)?),
        None => emit(&fresh.to_json()),
    }
}
