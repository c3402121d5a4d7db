//! The `gz` command-line tool.
//!
//! Every subcommand produces a [`report::Report`] and writes it as CSV or as
//! `gz_report_v1` JSON. Exit status is 0 on success, 1 when a verification
//! fails and 2 on usage errors.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod cache;
mod commands;
pub mod config;
mod error;
pub mod report;
mod selfcheck;

pub use error::{CliError, CliResult};

use cache::Cache;
use config::{OutputFormat, RunConfig};
use report::Report;

const CSV_HELP: &str = "\
CSV columns:
  sieve         n, lambda, psi              (rows only with --rows)
  characters    label, order, conductor, parity, primitive, real
  zeros         label, beta, gamma, multiplicity, source
  goldbach      n, g, S
  singular      c, series                   (with --q)
  javg          x, q, c, exact, main, residual, constant
  verify-thm12  x, exact, main, zero_correction, correction_imag, residual, truncation_bound
  verify-thm14  same as verify-thm12
  landau-gonek  label, x, sum_re, sum_im, prediction_re, prediction_im, error, budget
  circle        label, j, j_error, w_mass, selberg
  fit           x, delta
  selfcheck     check, pass, detail";

#[derive(Debug, Parser)]
#[command(name = "gz", version, about = "Goldbach sums in progressions and L-function zeros", after_help = CSV_HELP)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// key = value configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Cache directory; overrides GZ_CACHE_DIR and the config file.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Skip the cache entirely.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// csv or json.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub xmin: Option<f64>,
    #[arg(long)]
    pub xmax: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build (or load) the von Mangoldt table.
    Sieve {
        #[arg(long)]
        limit: Option<u64>,
        /// Emit one row per n.
        #[arg(long)]
        rows: bool,
    },
    /// List the characters mod q.
    Characters {
        #[arg(long)]
        q: u64,
    },
    /// Compute, import or export certified zeros.
    Zeros {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        height: Option<f64>,
        /// Restrict to one character label.
        #[arg(long)]
        label: Option<String>,
        /// Write one zero file per character into this directory.
        #[arg(long)]
        export: Option<PathBuf>,
        /// Validate a zero file for --label instead of computing.
        #[arg(long, requires = "label")]
        import: Option<PathBuf>,
        /// Accept off-line zeros on import.
        #[arg(long, requires = "import")]
        hypothetical: bool,
    },
    /// G(n; q, a, b) and S(n; q, a, b) for n up to xmax.
    Goldbach {
        #[arg(long, default_value_t = 1)]
        q: u64,
        #[arg(long, default_value_t = 0)]
        a: u64,
        #[arg(long, default_value_t = 0)]
        b: u64,
        #[arg(long)]
        xmax: u64,
    },
    /// The twin prime constant and singular series.
    Singular {
        #[arg(long, default_value_t = 1_000_000)]
        cutoff: u64,
        #[arg(long)]
        q: Option<u64>,
    },
    /// Congruence-class averages of J(n).
    Javg {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        xmax: u64,
    },
    /// Zero-corrected comparison for S(x; q, a, b).
    #[command(name = "verify-thm12")]
    VerifyThm12 {
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, default_value_t = 1)]
        a: u64,
        #[arg(long, default_value_t = 1)]
        b: u64,
        #[arg(long)]
        height: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Zero-corrected comparison for the class sums of G(n).
    #[command(name = "verify-thm14")]
    VerifyThm14 {
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, default_value_t = 0)]
        c: u64,
        #[arg(long)]
        height: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Landau-Gonek sums over zeros.
    #[command(name = "landau-gonek")]
    LandauGonek {
        #[arg(long, default_value_t = 1)]
        q: u64,
        /// Primitive character label; all primitive characters when absent.
        #[arg(long)]
        label: Option<String>,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        height: Option<f64>,
    },
    /// Circle-method integrals on DFT grids.
    Circle {
        #[arg(long, default_value_t = 1)]
        q: u64,
        #[arg(long)]
        x: u64,
        #[arg(long, default_value_t = 0.5)]
        xi: f64,
        /// Short-interval length; defaults to sqrt(x).
        #[arg(long)]
        h: Option<f64>,
    },
    /// Residual grid and exponent fit; writes a CSV companion next to --out.
    Fit {
        #[arg(long)]
        mode: String,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, default_value_t = 1)]
        a: u64,
        #[arg(long, default_value_t = 1)]
        b: u64,
        #[arg(long, default_value_t = 0)]
        c: u64,
        #[arg(long)]
        height: Option<f64>,
        /// Check the fitted exponent against 1 + d.
        #[arg(long)]
        d: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run the brute-force oracle suites.
    Selfcheck,
}

/// Resolved configuration and cache for one invocation.
pub struct Context {
    pub config: RunConfig,
    pub cache: Cache,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl Context {
    fn from_args(global: &GlobalArgs) -> CliResult<Self> {
        let mut config = match &global.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        }
        .with_env();
        if let Some(dir) = &global.cache_dir {
            config.cache_dir = dir.clone();
        }
        let format = match &global.format {
            Some(f) => f.parse()?,
            None => config.format,
        };
        let cache = if global.no_cache {
            Cache::disabled()
        } else {
            Cache::new(config.cache_dir.clone())
        };
        Ok(Self {
            config,
            cache,
            format,
            out: global.out.clone(),
        })
    }

    fn emit(&self, report: &Report) -> CliResult<()> {
        let text = match self.format {
            OutputFormat::Csv => report.to_csv(),
            OutputFormat::Json => report.to_json(),
        };
        match &self.out {
            Some(path) => cache::atomic_write(path, text.as_bytes()),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => match report.verified {
            Some(false) => 1,
            _ => 0,
        },
        Err(e) => {
            eprintln!("gz: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> CliResult<Report> {
    let ctx = Context::from_args(&cli.global)?;
    let report = commands::dispatch(&cli.command, &ctx)?;
    ctx.emit(&report)?;
    if report.verified == Some(false) {
        eprintln!("gz: verification failed");
    }
    Ok(report)
}
