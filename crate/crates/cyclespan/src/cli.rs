//! Command-line front end: `pmf`, `moments`, `sample`, `simulate`,
//! `verify`, and `figure`.
//!
//! Payloads go to standard output (or `--output`); metadata — a re-runnable
//! command echo, the effective seed, and the version — goes to standard
//! error as `#`-prefixed lines. Re-running the echoed command reproduces
//! the payload byte-for-byte.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::traits::ToPrimitive;
use thiserror::Error;

use crate::dist::{
    self, count_span_permutations, expectation, full_coverage_probability, moment_report,
    pmf_product, pmf_recurrence, pmf_table, rational_to_f64, recurrence_rows,
    uncovered_fraction_stats, SpanParams,
};
use crate::oracle::{
    count_by_enumeration, exact_distribution_by_enumeration, EnumerationBudget, HARD_CAP,
};
use crate::report::{self, FigureBlock};
use crate::sample::{
    decode, encode, monte_carlo, sample_all_cycles_intersect, sample_conditional_span,
    sample_uniform, RandomSource,
};

pub const ENV_MAX_N: &str = "CYCLE_SPAN_MAX_N";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("verification failed: {0} identit(y/ies) did not hold")]
    VerifyFailed(usize),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<dist::DistError> for CliError {
    fn from(e: dist::DistError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<crate::sample::SampleError> for CliError {
    fn from(e: crate::sample::SampleError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<crate::oracle::OracleError> for CliError {
    fn from(e: crate::oracle::OracleError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct CommonOutput {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    /// Significant digits for float fields; 17 round-trips exactly.
    #[arg(long, default_value_t = 17)]
    float_digits: usize,
    /// Write the payload to a file instead of standard output.
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Debug, Parser)]
#[command(name = "cyclespan", version, about = "Exact and sampled distributions of the combined length of all permutation cycles meeting a marked prefix")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact PMF table of the span length L over [m, n].
    Pmf {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        /// Compute via the recurrence instead of the closed form.
        #[arg(long)]
        recurrence: bool,
        #[command(flatten)]
        out: CommonOutput,
    },
    /// Expectation, variance, rising-factorial moments, and coverage stats.
    Moments {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        /// Highest rising-factorial moment order to include.
        #[arg(long, default_value_t = 4)]
        k_max: u64,
        #[command(flatten)]
        out: CommonOutput,
    },
    /// Sample permutations: uniform, all-cycles-intersect, or conditioned
    /// on span length.
    Sample {
        #[arg(long)]
        n: u64,
        /// Marked-prefix size; required for constrained sampling.
        #[arg(long)]
        m: Option<u64>,
        /// Condition on span length exactly l (requires --m).
        #[arg(long)]
        condition_l: Option<u64>,
        /// Condition on every cycle meeting [m] (requires --m).
        #[arg(long, conflicts_with = "condition_l")]
        all_intersect: bool,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Print cycle notation instead of one-line notation.
        #[arg(long)]
        cycles: bool,
        #[arg(long)]
        output: Option<std::path::PathBuf>,
    },
    /// Monte Carlo estimate of the distribution of L.
    Simulate {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Thread-count hint; the result is identical for any value.
        #[arg(long)]
        threads: Option<usize>,
        #[command(flatten)]
        out: CommonOutput,
    },
    /// Check the exact formulas, the recurrence, the counting identity, and
    /// the profile bijection against brute-force enumeration.
    Verify {
        /// Largest n to enumerate exhaustively.
        #[arg(long, default_value_t = 7)]
        max_n: usize,
    },
    /// Plot-ready PMF data: one block per m over the full range [1, n].
    Figure {
        #[arg(long)]
        n: u64,
        /// Comma-separated prefix sizes, e.g. 1,10,20.
        #[arg(long, value_delimiter = ',', required = true)]
        m_list: Vec<u64>,
        #[command(flatten)]
        out: CommonOutput,
    },
}

/// A rendered report: the payload plus metadata lines.
pub struct Report {
    pub payload: String,
    pub metadata: Vec<String>,
    pub output: Option<std::path::PathBuf>,
}

pub fn parse_command<I, T>(argv: I) -> Result<Cli, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Ok(Cli::try_parse_from(argv)?)
}

pub fn run<I, T>(argv: I) -> Result<Report, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    execute(parse_command(argv)?)
}

fn metadata(echo: String, seed: Option<u64>) -> Vec<String> {
    let mut lines = vec![
        format!("# version: cyclespan {}", env!("CARGO_PKG_VERSION")),
        format!("# command: {echo}"),
    ];
    if let Some(seed) = seed {
        lines.push(format!("# seed: {seed}"));
    }
    lines
}

fn budget_from_env(max_n: usize) -> Result<EnumerationBudget, CliError> {
    match std::env::var(ENV_MAX_N) {
        Ok(raw) => {
            let cap: usize = raw
                .parse()
                .map_err(|_| CliError::Invalid(format!("{ENV_MAX_N} must be an integer")))?;
            if max_n > cap {
                return Err(CliError::Invalid(format!(
                    "max-n {max_n} exceeds {ENV_MAX_N}={cap}"
                )));
            }
            Ok(EnumerationBudget::unchecked(cap))
        }
        Err(_) => {
            if max_n > HARD_CAP {
                return Err(CliError::Invalid(format!(
                    "max-n {max_n} exceeds the hard cap {HARD_CAP}; set {ENV_MAX_N} to override"
                )));
            }
            Ok(EnumerationBudget::unchecked(max_n))
        }
    }
}

pub fn execute(cli: Cli) -> Result<Report, CliError> {
    match cli.command {
        Command::Pmf { n, m, recurrence, out } => {
            let params = SpanParams::new(n, m)?;
            let table = if recurrence { pmf_recurrence(params) } else { pmf_table(params) };
            let payload = match out.format {
                OutputFormat::Csv => report::pmf_csv(&table, out.float_digits),
                OutputFormat::Json => report::pmf_json(&table),
            };
            let echo = format!(
                "cyclespan pmf --n {n} --m {m}{} --format {} --float-digits {}",
                if recurrence { " --recurrence" } else { "" },
                format_name(out.format),
                out.float_digits
            );
            Ok(Report { payload, metadata: metadata(echo, None), output: out.output })
        }
        Command::Moments { n, m, k_max, out } => {
            let params = SpanParams::new(n, m)?;
            if k_max < 1 {
                return Err(CliError::Invalid("--k-max must be at least 1".into()));
            }
            let report_data = moment_report(params, k_max);
            let coverage = full_coverage_probability(params);
            let uncovered = uncovered_fraction_stats(params);
            let payload = match out.format {
                OutputFormat::Csv => {
                    report::moments_csv(&report_data, &coverage, &uncovered, out.float_digits)
                }
                OutputFormat::Json => report::moments_json(&report_data, &coverage, &uncovered),
            };
            let echo = format!(
                "cyclespan moments --n {n} --m {m} --k-max {k_max} --format {} --float-digits {}",
                format_name(out.format),
                out.float_digits
            );
            Ok(Report { payload, metadata: metadata(echo, None), output: out.output })
        }
        Command::Sample { n, m, condition_l, all_intersect, count, seed, cycles, output } => {
            if n < 1 {
                return Err(CliError::Invalid("--n must be at least 1".into()));
            }
            if (condition_l.is_some() || all_intersect) && m.is_none() {
                return Err(CliError::Invalid(
                    "--condition-l and --all-intersect require --m".into(),
                ));
            }
            let params = m.map(|m| SpanParams::new(n, m)).transpose()?;
            let seed = resolve_seed(seed);
            let mut payload = String::new();
            for index in 0..count {
                let mut rng = RandomSource::substream(seed, index);
                let p = if let Some(l) = condition_l {
                    sample_conditional_span(params.expect("checked"), l, &mut rng)?
                } else if all_intersect {
                    sample_all_cycles_intersect(params.expect("checked"), &mut rng)
                } else {
                    sample_uniform(n as usize, &mut rng)
                };
                if cycles {
                    writeln!(payload, "{p}").expect("string write");
                } else {
                    writeln!(payload, "{}", p.to_one_line()).expect("string write");
                }
            }
            let mut echo = format!("cyclespan sample --n {n}");
            if let Some(m) = m {
                write!(echo, " --m {m}").expect("string write");
            }
            if let Some(l) = condition_l {
                write!(echo, " --condition-l {l}").expect("string write");
            }
            if all_intersect {
                echo.push_str(" --all-intersect");
            }
            write!(echo, " --count {count} --seed {seed}").expect("string write");
            if cycles {
                echo.push_str(" --cycles");
            }
            Ok(Report { payload, metadata: metadata(echo, Some(seed)), output })
        }
        Command::Simulate { n, m, trials, seed, threads, out } => {
            let params = SpanParams::new(n, m)?;
            if trials < 1 {
                return Err(CliError::Invalid("--trials must be at least 1".into()));
            }
            let seed = resolve_seed(seed);
            let dist = match threads {
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| CliError::Invalid(e.to_string()))?
                    .install(|| monte_carlo(params, trials, seed)),
                None => monte_carlo(params, trials, seed),
            };
            let payload = match out.format {
                OutputFormat::Csv => report::empirical_csv(&dist, out.float_digits),
                OutputFormat::Json => report::empirical_json(&dist),
            };
            let echo = format!(
                "cyclespan simulate --n {n} --m {m} --trials {trials} --seed {seed} --format {} --float-digits {}",
                format_name(out.format),
                out.float_digits
            );
            Ok(Report { payload, metadata: metadata(echo, Some(seed)), output: out.output })
        }
        Command::Verify { max_n } => {
            let budget = budget_from_env(max_n)?;
            let (payload, failures) = run_verification(budget);
            if failures > 0 {
                eprint!("{payload}");
                return Err(CliError::VerifyFailed(failures));
            }
            let echo = format!("cyclespan verify --max-n {max_n}");
            Ok(Report { payload, metadata: metadata(echo, None), output: None })
        }
        Command::Figure { n, m_list, out } => {
            if m_list.is_empty() {
                return Err(CliError::Invalid("--m-list must name at least one m".into()));
            }
            let blocks = emit_figure_data(n, &m_list)?;
            let payload = match out.format {
                OutputFormat::Csv => report::figure_csv(&blocks),
                OutputFormat::Json => report::figure_json(n, &blocks),
            };
            let echo = format!(
                "cyclespan figure --n {n} --m-list {} --format {} --float-digits {}",
                m_list.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(","),
                format_name(out.format),
                out.float_digits
            );
            Ok(Report { payload, metadata: metadata(echo, None), output: out.output })
        }
    }
}

fn format_name(format: OutputFormat) -> &'static str {
    match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

/// Full PMF of L over `[1, n]` for each requested `m` (exact zeros below
/// the support), plus the expectation marker.
pub fn emit_figure_data(n: u64, m_list: &[u64]) -> Result<Vec<FigureBlock>, CliError> {
    let mut blocks = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let params = SpanParams::new(n, m)?;
        let values = (1..=n)
            .map(|l| (l, rational_to_f64(&dist::pmf(params, l as i64))))
            .collect();
        blocks.push(FigureBlock {
            m,
            expectation: rational_to_f64(&expectation(params)),
            values,
        });
    }
    Ok(blocks)
}

/// Runs each verification identity up to the budget, returning a pass/fail
/// line per identity and the number of failures.
pub fn run_verification(budget: EnumerationBudget) -> (String, usize) {
    let max_n = budget.max_n() as u64;
    let mut out = String::new();
    let mut failures = 0;
    let mut check = |name: &str, ok: bool| {
        writeln!(out, "{} {name}", if ok { "PASS" } else { "FAIL" }).expect("string write");
        if !ok {
            failures += 1;
        }
    };

    let mut oracle_ok = true;
    let mut count_ok = true;
    for n in 1..=max_n {
        for m in 1..=n {
            let params = SpanParams::new(n, m).expect("m <= n");
            let by_enum = exact_distribution_by_enumeration(params, budget).expect("in budget");
            oracle_ok &= by_enum == pmf_table(params);
            for l in m..=n {
                let enumerated = count_by_enumeration(params, l, budget).expect("in budget");
                let formula = count_span_permutations(params, l as i64).expect("in support");
                count_ok &= formula == enumerated.into();
            }
        }
    }
    check("pmf closed form == exhaustive enumeration", oracle_ok);
    check("counting formula == exhaustive enumeration", count_ok);

    let mut paths_ok = true;
    for n in 1..=max_n {
        let rows = recurrence_rows(n, n);
        for m in 1..=n {
            let params = SpanParams::new(n, m).expect("m <= n");
            let closed = pmf_table(params);
            for l in m..=n {
                paths_ok &= closed.probs[&l] == pmf_product(params, l as i64).expect("in support");
                paths_ok &= closed.probs[&l] == rows[(m - 1) as usize][&l];
            }
        }
    }
    check("closed form == product form == recurrence", paths_ok);

    let mut bijection_ok = true;
    for n in 1..=budget.max_n() {
        for p in
            crate::oracle::enumerate_permutations(n, budget).expect("in budget")
        {
            for m in 1..=n {
                let profile = encode(&p, m).expect("m <= n");
                bijection_ok &= decode(&profile).map(|q| q == p).unwrap_or(false);
            }
        }
    }
    check("profile codec round-trips every permutation", bijection_ok);

    let mut moments_ok = true;
    for n in 1..=max_n {
        for m in 1..=n {
            let params = SpanParams::new(n, m).expect("m <= n");
            let table = pmf_table(params);
            let mean: num::BigRational = table
                .probs
                .iter()
                .map(|(&l, p)| p * num::BigRational::from_integer(l.into()))
                .sum();
            moments_ok &= mean == expectation(params);
            moments_ok &= expectation(params).to_f64().expect("small") <= n as f64;
        }
    }
    check("expectation matches the exact pmf", moments_ok);

    (out, failures)
}
