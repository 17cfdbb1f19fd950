use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use uav_aoi::experiments::verify::{run_checks, VerifyOptions};
use uav_aoi::experiments::{run_eval, run_sweep, run_train, ExperimentConfig, RunError};

#[derive(Parser)]
#[command(
    name = "uav-aoi",
    version,
    about = "Age-of-information UAV simulator and DQN trainer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a network and write its checkpoint and learning curve.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Master seed; overrides run.seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; overrides run.out_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a checkpoint against the random walk.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Evaluation episodes; overrides run.eval_episodes.
        #[arg(long)]
        episodes: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train and evaluate at every value of the sweep axis.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in consistency checks.
    Verify {
        /// Random environment steps for the invariant check.
        #[arg(long, default_value_t = 20_000)]
        steps: usize,
    },
}

fn fail(e: RunError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_usage() { 2 } else { 1 })
}

fn load(path: &Path) -> Result<ExperimentConfig, RunError> {
    Ok(ExperimentConfig::load(path)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train { config, seed, out } => load(&config).and_then(|c| {
            let run = run_train(&c, seed, out.as_deref())?;
            println!("wrote {}", run.out_dir.display());
            Ok(())
        }),
        Command::Eval {
            checkpoint,
            config,
            episodes,
            out,
        } => load(&config).and_then(|c| {
            let rec = run_eval(&c, &checkpoint, episodes, out.as_deref())?;
            for p in &rec.policies {
                println!(
                    "{:<4} time-avg AoI {:.4}  final quanta {:.2}",
                    p.policy, p.time_avg_aoi, p.mean_final_energy
                );
            }
            Ok(())
        }),
        Command::Sweep { config, out } => load(&config).and_then(|c| {
            let rec = run_sweep(&c, out.as_deref())?;
            for r in &rec.sweep {
                println!("{:>8} {:<4} AoI {:.4}", r.axis_value, r.policy, r.mean_aoi);
            }
            Ok(())
        }),
        Command::Verify { steps } => {
            let results = run_checks(&VerifyOptions {
                invariant_steps: steps,
                ..VerifyOptions::default()
            });
            for r in &results {
                println!("{r}");
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} checks, {failed} failed", results.len());
            return if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}
