use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::error;
use otreg::output::{write_atomic, write_json};
use otreg::report::aggregate;
use otreg::{CliError, ExperimentConfig, SolveCache, Status};
use otreg_core::solver::SolutionFile;

#[derive(Parser)]
#[command(name = "otreg", version, about = "Semi-discrete optimal transport and boundary regularity experiments")]
struct Cli {
    /// Overrides the seed in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the transport problem of a config and write the solution file.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve and run the configured experiment.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Defaults to `output_dir` from the config.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Aggregate the reports found in a directory and its subdirectories.
    Report {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the JSON schema of experiment configs.
    Schema {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<Status, CliError> {
    match cli.command {
        Command::Solve { config, out } => {
            let cfg = load(&config, cli.seed)?;
            match otreg::solve(&cfg, cfg.n_targets) {
                Ok(sol) => {
                    write_json(&out, &SolutionFile::from(&sol))?;
                    Ok(Status::Pass)
                }
                Err(CliError::Solver(e)) => {
                    error!("{e}");
                    Ok(Status::SolverFail)
                }
                Err(e) => Err(e),
            }
        }
        Command::Run { config, out_dir } => {
            let cfg = load(&config, cli.seed)?;
            let dir = out_dir.or_else(|| cfg.output_dir.clone()).ok_or_else(|| CliError::Config("no --out-dir and no output_dir in the config".into()))?;
            let report = otreg::run(&cfg, &dir, &SolveCache::new())?;
            for c in &report.checks {
                log::info!("{} {} = {} (threshold {})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.threshold);
            }
            if let Some(e) = &report.error {
                error!("{e}");
            }
            Ok(report.status)
        }
        Command::Report { dir, out } => {
            let agg = aggregate(&dir)?;
            write_json(&out, &agg)?;
            Ok(agg.status)
        }
        Command::Schema { out } => {
            let s = otreg::config::schema_json();
            match out {
                Some(p) => write_atomic(&p, s.as_bytes())?,
                None => print!("{s}"),
            }
            Ok(Status::Pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            error!("{e}");
            return ExitCode::from(1);
        }
    }
    match execute(cli) {
        Ok(status) => ExitCode::from(status.exit_code() as u8),
        Err(e) => {
            error!("{e}");
            ExitCode::from(1)
        }
    }
}
