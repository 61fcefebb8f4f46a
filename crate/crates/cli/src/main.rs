//! `hermite-lab`: bounds, constants, moment tests, the Kolmogorov-distance
//! experiment and its curve fit, from the command line.

mod commands;
mod input;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hermite_lab::Error;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "hermite-lab", version, about = "Hermite moment tests for Gaussianity and their error bounds")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for every random stream.
    #[arg(long, default_value_t = 42, global = true)]
    pub seed: u64,
    /// Worker threads (0 = all logical cores). Results do not depend on it.
    #[arg(long, env = "HERMITE_LAB_THREADS", default_value_t = 0, global = true)]
    pub threads: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestKind {
    Ht,
    Sb,
    Hm4,
    M5,
    M6,
    Hm2,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Upper and lower bounds, the N_d floor and the exact constant C_d.
    Bounds {
        #[arg(long)]
        n: u64,
        #[arg(long, conflicts_with_all = ["d_min", "d_max"], required_unless_present_all = ["d_min", "d_max"])]
        d: Option<u32>,
        #[arg(long, requires = "d_max")]
        d_min: Option<u32>,
        #[arg(long, requires = "d_min")]
        d_max: Option<u32>,
    },
    /// Exact fourth moments, C_d constants, printed-value checks and lower-rate certificates.
    Constants {
        #[arg(long, default_value_t = 8)]
        d_max: u32,
    },
    /// Run a moment test on a sample.
    Test {
        /// Newline-delimited decimals; `#` lines and an `x` header are skipped.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        test: TestKind,
        /// Order of the Hermite test (required for ht).
        #[arg(long)]
        d: Option<usize>,
        /// Centre and scale by the sample mean and standard deviation first.
        #[arg(long)]
        standardize: bool,
        /// Monte-Carlo p-value for hm4 with this many draws of the limit law.
        #[arg(long, value_name = "M")]
        mc_pvalue: Option<u64>,
    },
    /// Kolmogorov distance of S_{n,d} to N(0,1) for a range of d.
    Experiment {
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d_min: usize,
        #[arg(long, default_value_t = 8)]
        d_max: usize,
        #[arg(long, default_value_t = 100_000)]
        replicates: usize,
    },
    /// Fit ks = a·d^b·e^{cd} to experiment output.
    Fit {
        /// CSV with columns `d` and `ks`.
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NonFinite(_) => CliError::Numeric(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    let text = match cli.command {
        Command::Bounds { n, d, d_min, d_max } => {
            let range = match (d, d_min, d_max) {
                (Some(d), _, _) => d..=d,
                (None, Some(lo), Some(hi)) if lo <= hi => lo..=hi,
                _ => return Err(CliError::Usage("need --d, or --d-min <= --d-max".into())),
            };
            commands::bounds(g, n, range)?
        }
        Command::Constants { d_max } => commands::constants(g, d_max)?,
        Command::Test { input, test, d, standardize, mc_pvalue } => {
            commands::test(g, &input, test, d, standardize, mc_pvalue)?
        }
        Command::Experiment { n, d_min, d_max, replicates } => {
            commands::experiment(g, n, d_min, d_max, replicates)?
        }
        Command::Fit { input } => commands::fit(g, &input)?,
    };
    let io_err = |e: io::Error| CliError::Io(format!("write failed: {e}"));
    match &g.output {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            w.write_all(text.as_bytes()).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(io_err)?;
            out.flush().map_err(io_err)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hermite-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
