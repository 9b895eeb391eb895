//! Command-line front end behind the `mems-branch` binary.
//!
//! Every command reads an optional JSON [`RunConfig`], applies the flags on
//! top of it, runs, and writes its results into the output directory. Exit
//! codes: 0 success, 1 usage or configuration error, 2 a theorem-mode
//! verification failed, 3 the solver failed.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_branch, cmd_explicit, cmd_report_nonlinearity, cmd_stability, cmd_verify, Outcome};
pub use config::{FamilyFlags, Format, GridFlags, RunConfig};

use crate::error::Error;
use crate::estimates::Mode;
use crate::numerics::Tolerance;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_VERIFICATION: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "mems-branch", version, about = "Radial branches, stability and estimate checks for -Δu = λ f(u) on the unit ball")]
pub struct Cli {
    /// JSON run configuration; flags override its fields
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// output directory (default: $MEMS_BRANCH_OUT, then the working directory)
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// absolute and relative integration tolerance
    #[arg(long, global = true, value_name = "X")]
    pub tol: Option<f64>,
    /// worker threads for the sweeps
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tail quotients, the CR certificate and dimension thresholds of f
    ReportNonlinearity(ProblemArgs),
    /// Sweep the branch s ↦ λ(s)
    Branch(BranchArgs),
    /// Sweep the branch with the first eigenvalue of the linearization
    Stability(StabilityArgs),
    /// Check a priori estimates along the stable branch
    Verify(VerifyArgs),
    /// Stability of the explicit singular solution 1 - |x|^{2/(1+p)}
    Explicit(ExplicitArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// power, exponential, mems, scaled-power, constant, castorina, custom-table
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// two-column CSV (t, f) for custom-table
    #[arg(long, value_name = "PATH")]
    pub table: Option<PathBuf>,
    /// space dimension
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct BranchArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// branch points, split evenly between the uniform and the tail part
    #[arg(long)]
    pub points: Option<usize>,
    /// the sweep stops at s = 1 - cap
    #[arg(long)]
    pub cap: Option<f64>,
    #[arg(long)]
    pub s_min: Option<f64>,
    /// end of the uniform part of the grid
    #[arg(long)]
    pub split: Option<f64>,
    /// csv, json or both (comma separated)
    #[arg(long, value_delimiter = ',')]
    pub formats: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub branch: BranchArgs,
    /// cells of the coarse eigenvalue grid
    #[arg(long)]
    pub cells: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub branch: BranchArgs,
    /// comma separated estimate tags; the inequality checks stability-lemma,
    /// l1-laplacian and subsolution may be added
    #[arg(long, value_delimiter = ',')]
    pub tags: Vec<String>,
    /// theorem or explore
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// integrability exponent for n ≤ 2
    #[arg(long)]
    pub p_bar: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ExplicitArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub n: usize,
}

/// Exit code for an error that reached the command boundary.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => EXIT_CONFIG,
        _ => EXIT_SOLVER,
    }
}

fn parse_mode(s: &str) -> Result<Mode, Error> {
    match s {
        "theorem" => Ok(Mode::Theorem),
        "explore" | "exploration" => Ok(Mode::Explore),
        other => Err(Error::Config(format!("unknown mode {other:?} (theorem, explore)"))),
    }
}

fn parse_formats(list: &[String]) -> Result<Vec<Format>, Error> {
    list.iter()
        .map(|f| match f.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format {other:?} (csv, json)"))),
        })
        .collect()
}

impl ProblemArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), Error> {
        if self.n.is_some() {
            cfg.n = self.n;
        }
        let flags = FamilyFlags {
            family: self.family.clone(),
            p: self.p,
            c: self.c,
            a: self.a,
            b: self.b,
            eps: self.eps,
            table: self.table.clone(),
        };
        cfg.nonlinearity = flags.resolve(cfg.nonlinearity.as_ref(), cfg.n)?;
        Ok(())
    }
}

impl BranchArgs {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), Error> {
        self.problem.apply(cfg)?;
        GridFlags { points: self.points, cap: self.cap, s_min: self.s_min, split: self.split }.apply(&mut cfg.grid)?;
        if !self.formats.is_empty() {
            cfg.formats = parse_formats(&self.formats)?;
        }
        Ok(())
    }
}

/// Loads the config and applies the global flags.
fn base_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    if let Some(tol) = cli.tol {
        cfg.tol = Some(Tolerance::uniform(tol).map_err(config::config_error)?);
    }
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    Ok(cfg)
}

fn dispatch(cli: &Cli, mut cfg: RunConfig) -> Result<Outcome, Error> {
    match &cli.command {
        Command::ReportNonlinearity(args) => {
            args.apply(&mut cfg)?;
            cmd_report_nonlinearity(&cfg)
        }
        Command::Branch(args) => {
            args.apply(&mut cfg)?;
            cmd_branch(&cfg)
        }
        Command::Stability(args) => {
            args.branch.apply(&mut cfg)?;
            if let Some(cells) = args.cells {
                cfg.spectral.cells = cells;
            }
            cmd_stability(&cfg)
        }
        Command::Verify(args) => {
            // tags are checked first so a bad tag is reported before anything else
            if !args.tags.is_empty() {
                cfg.tags = args.tags.iter().map(|t| t.trim().to_string()).collect();
            }
            commands::check_tags(&cfg.tags)?;
            args.branch.apply(&mut cfg)?;
            if let Some(mode) = &args.mode {
                cfg.mode = parse_mode(mode)?;
            }
            if args.beta.is_some() {
                cfg.beta = args.beta;
            }
            if args.p_bar.is_some() {
                cfg.p_bar = args.p_bar;
            }
            cmd_verify(&cfg)
        }
        Command::Explicit(args) => cmd_explicit(args.p, args.n, &cfg),
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let cfg = base_config(cli)?;
    match cfg.threads {
        Some(0) => Err(Error::Config("--threads must be positive".into())),
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {threads} threads: {e}")))?
            .install(|| dispatch(cli, cfg)),
        None => dispatch(cli, cfg),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to stderr, summaries to stdout.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(Outcome::Success) => EXIT_OK,
        Ok(Outcome::VerificationFailed(tags)) => {
            eprintln!("error: verification failed for {}", tags.join(", "));
            EXIT_VERIFICATION
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
