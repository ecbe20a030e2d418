//! Command-line front end: configuration, ingestion, preprocessing and the
//! five subcommands `simulate`, `optimize`, `select`, `fdr` and `asymrisk`.

pub mod commands;
pub mod config;
pub mod envelope;
pub mod error;
pub mod ingest;
pub mod preprocess;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use featsel::fdr::{Correction, GlobalShuffle, NullKind, Statistic};
use featsel::optimizer::{Direction, Pairing};
use featsel::{MethodKind, SamplerKind};

use crate::commands::RunContext;
use crate::config::{ConfigFile, InputConfig};
use crate::envelope::Envelope;
pub use crate::error::{CliError, Result};
use crate::ingest::Orientation;

#[derive(Debug, Parser)]
#[command(name = "featsel", version, about = "Feature selection from cross-covariance matrices")]
pub struct Cli {
    /// TOML or JSON configuration file, or a previous run's envelope.json.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory for envelope.json and payload tables.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo selection probabilities over a grid of model sizes.
    Simulate(SimulateArgs),
    /// Search model sizes for the largest exact vs asymptotic gap.
    Optimize(OptimizeArgs),
    /// Rank the features of X against Y.
    Select(SelectArgs),
    /// Permutation p-values and q-values for every feature of X.
    Fdr(FdrArgs),
    /// Closed-form limit of the thresholding risk.
    Asymrisk(AsymriskArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub p_t: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub p_u: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub q_u: Option<Vec<usize>>,
    /// Total feature count; overrides --p-u.
    #[arg(long)]
    pub p: Option<usize>,
    /// Total response count; overrides --q-u.
    #[arg(long)]
    pub q: Option<usize>,
    /// thres, svd, or both comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub method: Option<Vec<MethodKind>>,
    /// wishart, data or asymptotic.
    #[arg(long)]
    pub sampler: Option<SamplerKind>,
    #[arg(long)]
    pub mc_res: Option<u64>,
    #[arg(long)]
    pub signal_scale: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub method: Option<MethodKind>,
    /// exact-minus-asymptotic or asymptotic-minus-exact.
    #[arg(long)]
    pub direction: Option<Direction>,
    /// discrepancy, or l1:p_t,p_u,q_u.
    #[arg(long)]
    pub objective: Option<String>,
    #[arg(long)]
    pub mc_res: Option<u64>,
    #[arg(long)]
    pub survivors: Option<usize>,
    #[arg(long)]
    pub t_final: Option<usize>,
    #[arg(long)]
    pub perturbations: Option<usize>,
    /// paired or independent.
    #[arg(long)]
    pub pairing: Option<Pairing>,
    /// Exact-side sampler: wishart or data.
    #[arg(long)]
    pub sampler: Option<SamplerKind>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub x: Option<PathBuf>,
    #[arg(long)]
    pub y: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub orientation: Option<Orientation>,
    #[arg(long)]
    pub standardize_x: bool,
    #[arg(long)]
    pub standardize_y: bool,
    /// Y holds counts; convert to log proportions.
    #[arg(long)]
    pub y_counts: bool,
    #[arg(long)]
    pub pseudocount: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub method: Option<MethodKind>,
    /// cov or cor.
    #[arg(long)]
    pub statistic: Option<Statistic>,
}

#[derive(Debug, Args)]
pub struct FdrArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub method: Option<MethodKind>,
    /// global or local.
    #[arg(long)]
    pub null: Option<NullKind>,
    /// none or harmonic; defaults to harmonic for svd and none for thres.
    #[arg(long)]
    pub correction: Option<Correction>,
    #[arg(long)]
    pub mc_res: Option<u64>,
    /// cor or cov.
    #[arg(long)]
    pub statistic: Option<Statistic>,
    /// Use (1 + count) / (1 + denominator).
    #[arg(long)]
    pub add_one: bool,
    /// Global-null shuffle: within-rows or within-columns.
    #[arg(long)]
    pub shuffle: Option<GlobalShuffle>,
}

#[derive(Debug, Args)]
pub struct AsymriskArgs {
    /// CSV of scaled means; omit to draw random signal blocks.
    #[arg(long)]
    pub signal: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p_t: Option<usize>,
    #[arg(long)]
    pub p_u: Option<usize>,
    #[arg(long)]
    pub q_u: Option<usize>,
    #[arg(long)]
    pub draws: Option<u64>,
}

fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

fn apply_input(cfg: &mut InputConfig, args: InputArgs) {
    set(&mut cfg.x, args.x);
    set(&mut cfg.y, args.y);
    set(&mut cfg.orientation, args.orientation);
    set(&mut cfg.pseudocount, args.pseudocount);
    cfg.standardize_x |= args.standardize_x;
    cfg.standardize_y |= args.standardize_y;
    cfg.y_counts |= args.y_counts;
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Parse `args` (including the program name) and run the command.
pub fn run_from<I, T>(args: I) -> Result<Envelope>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            let _ = e.print();
            std::process::exit(0);
        }
        _ => CliError::Config(e.to_string()),
    })?;
    run(cli)
}

pub fn run(cli: Cli) -> Result<Envelope> {
    let started = Instant::now();
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let ctx = RunContext {
        seed: cli.seed.or(file.seed).unwrap_or(config::DEFAULT_SEED),
        workers: cli.workers.or(file.workers).unwrap_or_else(default_workers).max(1),
        out: cli.out.or(file.out.clone()).unwrap_or_else(|| PathBuf::from("featsel-out")),
    };
    let mut echo = ConfigFile { seed: Some(ctx.seed), workers: Some(ctx.workers), out: Some(ctx.out.clone()), ..Default::default() };
    let to_json = |c: &ConfigFile| serde_json::to_value(c).map_err(|e| CliError::Config(e.to_string()));

    let envelope = match cli.command {
        Command::Simulate(a) => {
            let mut c = file.simulate.unwrap_or_default();
            set(&mut c.n, a.n);
            set(&mut c.p_t, a.p_t);
            set(&mut c.p_u, a.p_u);
            set(&mut c.q_u, a.q_u);
            if a.p.is_some() {
                c.p = a.p;
            }
            if a.q.is_some() {
                c.q = a.q;
            }
            set(&mut c.methods, a.method);
            set(&mut c.sampler, a.sampler);
            set(&mut c.mc_res, a.mc_res);
            set(&mut c.signal_scale, a.signal_scale);
            echo.simulate = Some(c.clone());
            ctx.prepare_out()?;
            commands::simulate::run(&c, &ctx, Envelope::new("simulate", to_json(&echo)?))?
        }
        Command::Optimize(a) => {
            let mut c = file.optimize.unwrap_or_default();
            set(&mut c.n, a.n);
            set(&mut c.method, a.method);
            set(&mut c.direction, a.direction);
            set(&mut c.objective, a.objective);
            set(&mut c.mc_res, a.mc_res);
            set(&mut c.survivors, a.survivors);
            set(&mut c.t_final, a.t_final);
            set(&mut c.perturbations, a.perturbations);
            set(&mut c.pairing, a.pairing);
            set(&mut c.exact_sampler, a.sampler);
            echo.optimize = Some(c.clone());
            ctx.prepare_out()?;
            commands::optimize::run(&c, &ctx, Envelope::new("optimize", to_json(&echo)?))?
        }
        Command::Select(a) => {
            let mut c = file.select.unwrap_or_default();
            apply_input(&mut c.input, a.input);
            set(&mut c.method, a.method);
            set(&mut c.statistic, a.statistic);
            echo.select = Some(c.clone());
            ctx.prepare_out()?;
            commands::select::run(&c, &ctx, Envelope::new("select", to_json(&echo)?))?
        }
        Command::Fdr(a) => {
            let mut c = file.fdr.unwrap_or_default();
            apply_input(&mut c.input, a.input);
            set(&mut c.method, a.method);
            set(&mut c.null, a.null);
            if a.correction.is_some() {
                c.correction = a.correction;
            }
            set(&mut c.mc_res, a.mc_res);
            set(&mut c.statistic, a.statistic);
            c.add_one |= a.add_one;
            set(&mut c.shuffle, a.shuffle);
            echo.fdr = Some(c.clone());
            ctx.prepare_out()?;
            commands::fdr::run(&c, &ctx, Envelope::new("fdr", to_json(&echo)?))?
        }
        Command::Asymrisk(a) => {
            let mut c = file.asymrisk.unwrap_or_default();
            if a.signal.is_some() {
                c.signal = a.signal;
            }
            set(&mut c.n, a.n);
            set(&mut c.p_t, a.p_t);
            set(&mut c.p_u, a.p_u);
            set(&mut c.q_u, a.q_u);
            set(&mut c.draws, a.draws);
            echo.asymrisk = Some(c.clone());
            ctx.prepare_out()?;
            commands::asymrisk::run(&c, &ctx, Envelope::new("asymrisk", to_json(&echo)?))?
        }
    };
    let envelope = envelope.finish(started.elapsed());
    envelope.write(&ctx.out)?;
    Ok(envelope)
}
