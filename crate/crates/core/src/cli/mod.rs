//! Command-line front end.
//!
//! Every subcommand validates its whole configuration (including enumeration
//! budgets) before any computation starts and renders its output to a
//! string, so reruns with the same flags are byte-identical.
//!
//! Exit statuses: 0 when everything passes, 1 when a verification suite
//! fails, 2 on configuration errors.

mod single;
mod sweep;
mod verify;

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use single::{cmd_moments, cmd_witness, SplitRecord, WitnessBasis, WitnessRecord};
pub use sweep::{cmd_sweep, parse_sweep_csv, SweepRow, SWEEP_COLUMNS};
pub use verify::{cmd_verify, InstanceResult, Suite, SuiteResult, VerifyReport};

use crate::counting::{gaussian_binomial, MAX_COUNT_DIM};
use crate::experiment::sampling::MAX_SAMPLE_DIM;
use crate::experiment::search::MAX_COMPLEMENT_DIM;
use crate::experiment::SamplingParams;
use crate::grassmannian::DEFAULT_BUDGET;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hadamard-kernel",
    version,
    about = "Sparse kernel vectors of row-subsampled Hadamard matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run invariant suites and emit a JSON pass/fail report.
    Verify(VerifyArgs),
    /// Sweep the row-sampling rate and emit one CSV row per grid point.
    Sweep(SweepArgs),
    /// Sample one row set, search for a kernel witness and emit JSON.
    Witness(WitnessArgs),
    /// Emit first/second-moment quantities for one parameter point as JSON.
    Moments(MomentsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for Monte-Carlo trials (results do not depend on it).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Largest ambient dimension for the exhaustive suites.
    #[arg(long)]
    pub n_max: Option<u32>,
    /// Ambient dimension for the t-bound suite.
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, default_value_t = 0.1)]
    pub c: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u32,
    /// Single rate (alternative to --p-hat-grid).
    #[arg(long)]
    pub p_hat: Option<f64>,
    /// `lo:hi:points` or `lo:hi:points,log`.
    #[arg(long)]
    pub p_hat_grid: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    pub c: f64,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct WitnessArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long, default_value_t = 0.0)]
    pub p_hat: f64,
    #[arg(long, default_value_t = 0.1)]
    pub c: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub trial_index: u64,
    /// Also count all witnesses exactly.
    #[arg(long)]
    pub exact_count: bool,
    /// Also search at sparsity exponent k+1 and split that witness into two
    /// 2^k-sparse vectors with equal sampled measurements.
    #[arg(long)]
    pub split: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct MomentsArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u32,
    #[arg(long, default_value_t = 0.0)]
    pub p_hat: f64,
    #[arg(long, default_value_t = 0.1)]
    pub c: f64,
    #[command(flatten)]
    pub common: Common,
}

/// A configuration problem, tied to the offending flag.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: &'static str,
    pub reason: String,
}

impl ConfigError {
    pub(crate) fn new(field: &'static str, reason: impl Into<String>) -> Self {
        Self {
            field,
            reason: reason.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid --{}: {}", self.field, self.reason)
    }
}

impl std::error::Error for ConfigError {}

impl From<crate::Error> for ConfigError {
    fn from(e: crate::Error) -> Self {
        let field = match &e {
            crate::Error::InvalidParameter { name, .. } => match *name {
                "p_hat" => "p-hat",
                other => other,
            },
            _ => "config",
        };
        Self::new(field, e.to_string())
    }
}

/// Sampling-rate grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PHatGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub log: bool,
}

impl PHatGrid {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        let bad = |why: &str| ConfigError::new("p-hat-grid", format!("{why} (got `{s}`)"));
        let (body, log) = match s.split_once(',') {
            Some((body, "log")) => (body, true),
            Some((body, "lin")) => (body, false),
            Some(_) => return Err(bad("spacing must be `log` or `lin`")),
            None => (s, false),
        };
        let parts: Vec<&str> = body.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected lo:hi:points"));
        }
        let lo: f64 = parts[0].parse().map_err(|_| bad("lo is not a number"))?;
        let hi: f64 = parts[1].parse().map_err(|_| bad("hi is not a number"))?;
        let points: usize = parts[2]
            .parse()
            .map_err(|_| bad("points is not an integer"))?;
        if points == 0 {
            return Err(bad("points must be positive"));
        }
        if !(0.0..1.0).contains(&lo) || !(0.0..1.0).contains(&hi) || lo > hi {
            return Err(bad("need 0 <= lo <= hi < 1"));
        }
        if log && lo <= 0.0 {
            return Err(bad("log spacing needs lo > 0"));
        }
        if points == 1 && lo != hi {
            return Err(bad("a single point needs lo == hi"));
        }
        Ok(Self {
            lo,
            hi,
            points,
            log,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.lo];
        }
        let steps = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let t = i as f64 / steps;
                if i + 1 == self.points {
                    self.hi
                } else if self.log {
                    (self.lo.ln() + t * (self.hi.ln() - self.lo.ln())).exp()
                } else {
                    self.lo + t * (self.hi - self.lo)
                }
            })
            .collect()
    }
}

/// Validated configuration for one subcommand.
#[derive(Debug, Clone)]
pub enum RunConfig {
    Verify(VerifyConfig),
    Sweep(SweepConfig),
    Witness(WitnessConfig),
    Moments(MomentsConfig),
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub suites: Vec<Suite>,
    pub n_max: Option<u32>,
    pub n: u32,
    pub k: u32,
    pub c: f64,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub params: SamplingParams,
    pub grid: Vec<f64>,
    pub trials: u64,
}

#[derive(Debug, Clone)]
pub struct WitnessConfig {
    pub params: SamplingParams,
    pub trial_index: u64,
    pub exact_count: bool,
    pub split: bool,
}

#[derive(Debug, Clone)]
pub struct MomentsConfig {
    pub params: SamplingParams,
}

fn check_search_dims(n: u32, k: u32) -> Result<(), ConfigError> {
    if n == 0 || n > MAX_SAMPLE_DIM {
        return Err(ConfigError::new(
            "n",
            format!("sampling needs 1 <= n <= {MAX_SAMPLE_DIM}, got {n}"),
        ));
    }
    if k > n {
        return Err(ConfigError::new("k", format!("need k <= n = {n}, got {k}")));
    }
    if n - k > MAX_COMPLEMENT_DIM {
        return Err(ConfigError::new(
            "k",
            format!("search needs n - k <= {MAX_COMPLEMENT_DIM}, got {}", n - k),
        ));
    }
    Ok(())
}

fn check_format(common: &Common, allowed: Format) -> Result<(), ConfigError> {
    match common.format {
        Some(f) if f != allowed => Err(ConfigError::new(
            "format",
            format!("this subcommand only writes {allowed:?}").to_lowercase(),
        )),
        _ => Ok(()),
    }
}

fn check_threads(common: &Common) -> Result<(), ConfigError> {
    if common.threads == Some(0) {
        return Err(ConfigError::new("threads", "must be positive"));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_command(command: &Command) -> Result<Self, ConfigError> {
        match command {
            Command::Verify(a) => {
                check_format(&a.common, Format::Json)?;
                check_threads(&a.common)?;
                let suites = Suite::parse_list(&a.suite)?;
                let n = a.n.unwrap_or(256);
                let k = a.k.unwrap_or(n / 2);
                if !(2..=MAX_COUNT_DIM).contains(&n) {
                    return Err(ConfigError::new(
                        "n",
                        format!("need 2 <= n <= {MAX_COUNT_DIM}, got {n}"),
                    ));
                }
                if k > n {
                    return Err(ConfigError::new("k", format!("need k <= n = {n}, got {k}")));
                }
                if !(a.c.is_finite() && a.c > 0.0) {
                    return Err(ConfigError::new("c", "must be a positive finite number"));
                }
                Ok(Self::Verify(VerifyConfig {
                    suites,
                    n_max: a.n_max,
                    n,
                    k,
                    c: a.c,
                }))
            }
            Command::Sweep(a) => {
                check_format(&a.common, Format::Csv)?;
                check_threads(&a.common)?;
                check_search_dims(a.n, a.k)?;
                let grid = match (&a.p_hat, &a.p_hat_grid) {
                    (Some(_), Some(_)) => {
                        return Err(ConfigError::new(
                            "p-hat-grid",
                            "give either --p-hat or --p-hat-grid, not both",
                        ))
                    }
                    (Some(p), None) => vec![*p],
                    (None, Some(g)) => PHatGrid::parse(g)?.values(),
                    (None, None) => {
                        return Err(ConfigError::new(
                            "p-hat-grid",
                            "one of --p-hat or --p-hat-grid is required",
                        ))
                    }
                };
                if a.trials == 0 {
                    return Err(ConfigError::new("trials", "must be positive"));
                }
                let params = SamplingParams::new(a.n, a.k, grid[0], a.c, a.seed)?;
                for &p in &grid {
                    params.with_p_hat(p)?;
                }
                Ok(Self::Sweep(SweepConfig {
                    params,
                    grid,
                    trials: a.trials,
                }))
            }
            Command::Witness(a) => {
                check_format(&a.common, Format::Json)?;
                check_threads(&a.common)?;
                check_search_dims(a.n, a.k)?;
                if a.split && a.k + 1 > a.n {
                    return Err(ConfigError::new("split", "needs k + 1 <= n"));
                }
                if a.exact_count {
                    let total = gaussian_binomial(a.n, a.k).map_err(ConfigError::from)?;
                    if total > DEFAULT_BUDGET.into() {
                        return Err(ConfigError::new(
                            "exact-count",
                            format!(
                                "|Gr({}, {})| = {total} exceeds the enumeration budget {DEFAULT_BUDGET}",
                                a.n, a.k
                            ),
                        ));
                    }
                }
                let params = SamplingParams::new(a.n, a.k, a.p_hat, a.c, a.seed)?;
                Ok(Self::Witness(WitnessConfig {
                    params,
                    trial_index: a.trial_index,
                    exact_count: a.exact_count,
                    split: a.split,
                }))
            }
            Command::Moments(a) => {
                check_format(&a.common, Format::Json)?;
                check_threads(&a.common)?;
                let params = SamplingParams::new(a.n, a.k, a.p_hat, a.c, 0)?;
                Ok(Self::Moments(MomentsConfig { params }))
            }
        }
    }
}

fn common(command: &Command) -> &Common {
    match command {
        Command::Verify(a) => &a.common,
        Command::Sweep(a) => &a.common,
        Command::Witness(a) => &a.common,
        Command::Moments(a) => &a.common,
    }
}

/// Runs `f` on a dedicated rayon pool when a thread count is given.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

/// Validated config in, rendered output and exit status out.
pub fn execute(config: &RunConfig) -> Result<(String, i32), crate::Error> {
    match config {
        RunConfig::Verify(c) => {
            let report = cmd_verify(c);
            let status = if report.passed { EXIT_OK } else { EXIT_FAILURE };
            Ok((to_json(&report), status))
        }
        RunConfig::Sweep(c) => Ok((cmd_sweep(c)?, EXIT_OK)),
        RunConfig::Witness(c) => Ok((to_json(&cmd_witness(c)?), EXIT_OK)),
        RunConfig::Moments(c) => Ok((to_json(&cmd_moments(c)?), EXIT_OK)),
    }
}

pub(crate) fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Entry point shared by the binary and the integration tests.
pub fn run(cli: Cli) -> i32 {
    let config = match RunConfig::from_command(&cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let common = common(&cli.command).clone();
    let result = with_threads(common.threads, || execute(&config));
    let (text, status) = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAILURE;
        }
    };
    match &common.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_CONFIG;
            }
        }
        None => print!("{text}"),
    }
    status
}
