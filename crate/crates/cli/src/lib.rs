//! The `toric` command line: subcommands over the quaternionic pipeline,
//! persistence, figures and the invariant suite.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod svg;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_cutoffs, Overrides, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "toric", version, about = "Toric periods of algebraic modular forms on definite quaternion algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Discriminant of the quaternion algebra
    #[arg(long)]
    pub disc: Option<u64>,
    /// Level of the Eichler order
    #[arg(long)]
    pub level: Option<u64>,
    /// Bound on |Δ| and on theta coefficients
    #[arg(long)]
    pub bound: Option<u64>,
    /// Comma-separated statistic cutoffs
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Index of the Galois orbit of eigenforms
    #[arg(long)]
    pub form: Option<usize>,
    /// key=value file; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Suppress progress on standard error
    #[arg(long, short)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The algebra and order: basis, ramification, mass
    Algebra(Common),
    /// Right ideal classes, types and Atkin–Lehner permutations
    Classes(Common),
    /// Normalized Hecke eigenforms of the new N-invariant cusp space
    Eigenforms(Common),
    /// Periods CSV and JSON sidecar for all fundamental −bound < Δ < 0
    Periods(Common),
    /// Symmetry tables, moments, signs and central-limit diagnostics
    Stats(Common),
    /// Non-vanishing conditions over prime discriminants
    Scan {
        #[command(flatten)]
        common: Common,
        /// Largest prime discriminant
        #[arg(long, default_value_t = 2000)]
        max_p: u64,
        /// Evaluate condition (a) also where (b) fails
        #[arg(long)]
        all: bool,
    },
    /// Invariant suite; exit 3 if any check fails
    Verify(Common),
    /// SVG figures of the period distribution
    Figures {
        #[command(flatten)]
        common: Common,
        /// scatter-1d, scatter-2d or clt-hist
        #[arg(long)]
        kind: String,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Algebra(c)
            | Command::Classes(c)
            | Command::Eigenforms(c)
            | Command::Periods(c)
            | Command::Stats(c)
            | Command::Verify(c) => c,
            Command::Scan { common, .. } | Command::Figures { common, .. } => common,
        }
    }
}

impl Common {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let o = Overrides {
            disc_d: self.disc,
            level: self.level,
            bound: self.bound,
            x_cutoffs: self.x.as_deref().map(parse_cutoffs).transpose()?,
            output_dir: self.output_dir.clone(),
            threads: self.threads,
            cache_dir: self.cache_dir.clone(),
            form: self.form,
        };
        RunConfig::resolve(self.config.as_deref(), &o)
    }
}

/// Parses `argv`, runs the subcommand and returns the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let common = cli.command.common();
    let level = if common.quiet { log::LevelFilter::Warn } else { log::LevelFilter::Info };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
    match commands::run(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
