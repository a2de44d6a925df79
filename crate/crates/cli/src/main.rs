mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use skbench::benchmark::Method;

use crate::commands::{Outcome, RunDir};
use crate::config::{parse_methods, parse_sizes, ConfigError};

const EXIT_CONFIG: u8 = 2;
const EXIT_PARTIAL: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "skbench",
    version,
    about = "Spin-glass heuristic benchmarks and cost projections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML settings file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed for instances and every random stream.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Spin counts, e.g. `8-13` or `8,10,12`.
    #[arg(long, global = true, value_parser = parse_sizes)]
    sizes: Option<SizeList>,

    /// Comma-separated subset of BF,RS,MH,GAS,LHPST.
    #[arg(long, global = true, value_parser = parse_methods)]
    methods: Option<MethodList>,

    /// Instances per size.
    #[arg(long, global = true)]
    instances: Option<usize>,

    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Recompute finished cells and overwrite conflicting files.
    #[arg(long, global = true)]
    force: bool,

    #[arg(long, global = true, default_value = "skbench-run")]
    out_dir: PathBuf,
}

type SizeList = Vec<usize>;
type MethodList = Vec<Method>;

#[derive(Debug, Subcommand)]
enum Command {
    /// Write one JSON file per instance.
    Generate,
    /// Measure steps to target on every (method, size, instance) cell.
    Bench,
    /// Fit b * 2^(c n) to the mean steps of each method.
    Fit,
    /// Project wall-clock time at large sizes from the fits.
    Estimate,
    /// Emit plot data: step series, fits and ratio-gap statistics.
    Report,
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let mut cfg = commands::load_config(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.bench.master_seed = seed;
    }
    if let Some(sizes) = cli.sizes {
        cfg.bench.sizes = sizes;
    }
    if let Some(methods) = cli.methods {
        cfg.bench.methods = methods;
    }
    if let Some(k) = cli.instances {
        cfg.bench.instances_per_size = k;
    }
    cfg.validate()?;
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            anyhow::bail!(ConfigError("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("starting the worker pool")?;
    }

    let dir = RunDir::new(&cli.out_dir);
    match cli.command {
        Command::Generate => {
            commands::cmd_generate(&cfg, &dir, cli.force)?;
            Ok(Outcome::Complete)
        }
        Command::Bench => commands::cmd_bench(&cfg, &dir, cli.force),
        Command::Fit => {
            commands::cmd_fit(&dir)?;
            Ok(Outcome::Complete)
        }
        Command::Estimate => {
            commands::cmd_estimate(&cfg, &dir)?;
            Ok(Outcome::Complete)
        }
        Command::Report => {
            commands::cmd_report(&cfg, &dir)?;
            Ok(Outcome::Complete)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<ConfigError>().is_some() {
            return EXIT_CONFIG;
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_IO;
        }
        if let Some(e) = cause.downcast_ref::<skbench::Error>() {
            return match e {
                skbench::Error::Io(_) => EXIT_IO,
                _ => EXIT_CONFIG,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(Outcome::Complete) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => {
            eprintln!("finished with unresolved cells (step cap reached); see records.csv");
            ExitCode::from(EXIT_PARTIAL)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
