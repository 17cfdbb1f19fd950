use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use super::checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CheckpointError};
use super::config::{ConfigError, ExperimentConfig, Mode};
use super::output::{
    age_curve_csv, energy_curve_csv, learning_curve_csv, sweep_csv, write_atomic, LearningRecord, PolicyRecord,
    RunRecord, SweepRow,
};
use crate::agents::{train, AgentError, GreedyPolicy, QNetwork, RandomWalk, TrainOutcome};
use crate::env::{EnvError, Environment};
use crate::oracle::{rollout, OracleError, RolloutMetrics};

pub const CHECKPOINT_FILE: &str = "checkpoint.aoiq";
pub const LEARNING_CURVE_FILE: &str = "learning_curve.csv";
pub const AGE_CURVE_FILE: &str = "age_curve.csv";
pub const ENERGY_CURVE_FILE: &str = "energy_curve.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const RESOLVED_CONFIG_FILE: &str = "resolved_config.toml";
pub const RUN_RECORD_FILE: &str = "run_record.json";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error(transparent)]
    Agent(#[from] AgentError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    /// Whether the failure stems from the user's input rather than the run.
    pub fn is_usage(&self) -> bool {
        matches!(self, RunError::Config(_) | RunError::Checkpoint(_))
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    write_atomic(path, bytes).map_err(|source| RunError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Trains a network for `cfg` with master seed `seed`; no files are written.
pub fn train_network(cfg: &ExperimentConfig, seed: u64) -> Result<(Checkpoint, TrainOutcome), RunError> {
    let env_cfg = cfg.env_config();
    let env = Environment::new(env_cfg.clone())?;
    let outcome = train(&env_cfg, &cfg.train_config(), seed)?;
    let cp = Checkpoint::new(&env, outcome.net.clone())?;
    Ok((cp, outcome))
}

/// Greedy DQN and random walk on the same layout, `episodes` episodes each.
pub fn evaluate_pair(
    env: &Environment,
    net: &QNetwork,
    episodes: usize,
    seed: u64,
) -> Result<(RolloutMetrics, RolloutMetrics), RunError> {
    let dqn = rollout(env, &mut GreedyPolicy::new(net), episodes, seed)?;
    let rw = rollout(env, &mut RandomWalk::new(seed), episodes, seed)?;
    Ok((dqn, rw))
}

pub struct TrainRun {
    pub record: RunRecord,
    pub checkpoint: Checkpoint,
    pub out_dir: PathBuf,
}

/// `train`: writes the checkpoint, learning curve, resolved config and run record.
pub fn run_train(cfg: &ExperimentConfig, seed: Option<u64>, out: Option<&Path>) -> Result<TrainRun, RunError> {
    cfg.require_mode(&[Mode::Train])?;
    let start = Instant::now();
    let mut snapshot = cfg.resolved();
    if let Some(s) = seed {
        snapshot.run.seed = s;
    }
    if let Some(o) = out {
        snapshot.run.out_dir = o.to_path_buf();
    }
    let seed = snapshot.run.seed;
    let dir = snapshot.run.out_dir.clone();

    let (cp, outcome) = train_network(&snapshot, seed)?;
    let learning = LearningRecord::from_curve(&outcome.curve, outcome.env_steps, outcome.gradient_steps);
    let record = RunRecord {
        command: "train".into(),
        config_hash: snapshot.hash(),
        seed,
        learning: Some(learning),
        policies: Vec::new(),
        sweep: Vec::new(),
        wall_clock_s: start.elapsed().as_secs_f64(),
    };

    save_checkpoint(&dir.join(CHECKPOINT_FILE), &cp)?;
    write(
        &dir.join(LEARNING_CURVE_FILE),
        &learning_curve_csv(record.learning.as_ref().expect("set above")),
    )?;
    write(&dir.join(RESOLVED_CONFIG_FILE), snapshot.to_toml().as_bytes())?;
    write(&dir.join(RUN_RECORD_FILE), record.to_json().as_bytes())?;
    Ok(TrainRun {
        record,
        checkpoint: cp,
        out_dir: dir,
    })
}

/// `eval`: paired rollouts of the checkpoint and the random walk.
///
/// A config written for training is accepted as is.
pub fn run_eval(
    cfg: &ExperimentConfig,
    checkpoint: &Path,
    episodes: Option<usize>,
    out: Option<&Path>,
) -> Result<RunRecord, RunError> {
    cfg.require_mode(&[Mode::Eval, Mode::Train])?;
    let start = Instant::now();
    let env = Environment::new(cfg.env_config())?;
    let cp = load_checkpoint(checkpoint)?;
    cp.ensure_compatible(&env)?;
    let episodes = episodes.unwrap_or(cfg.run.eval_episodes);
    let seed = cfg.run.seed;
    let (dqn, rw) = evaluate_pair(&env, &cp.net, episodes, seed)?;
    let record = RunRecord {
        command: "eval".into(),
        config_hash: cfg.hash(),
        seed,
        learning: None,
        policies: vec![
            PolicyRecord::from_metrics("dqn", &dqn),
            PolicyRecord::from_metrics("rw", &rw),
        ],
        sweep: Vec::new(),
        wall_clock_s: start.elapsed().as_secs_f64(),
    };
    let dir = out.map_or_else(|| cfg.run.out_dir.clone(), Path::to_path_buf);
    let (d, r) = (&record.policies[0], &record.policies[1]);
    write(&dir.join(AGE_CURVE_FILE), &age_curve_csv(d, r))?;
    write(&dir.join(ENERGY_CURVE_FILE), &energy_curve_csv(d, r))?;
    write(&dir.join("eval_record.json"), record.to_json().as_bytes())?;
    Ok(record)
}

/// Cache location of the checkpoint for one sweep point.
pub fn cache_path(dir: &Path, cfg: &ExperimentConfig, seed: u64) -> PathBuf {
    dir.join("cache").join(format!("{}-{seed}.aoiq", cfg.hash()))
}

/// Loads a cached checkpoint for `point`, training and caching one if needed.
pub fn cached_network(point: &ExperimentConfig, dir: &Path, seed: u64) -> Result<Checkpoint, RunError> {
    let env = Environment::new(point.env_config())?;
    let path = cache_path(dir, point, seed);
    if let Ok(cp) = load_checkpoint(&path) {
        if cp.ensure_compatible(&env).is_ok() {
            return Ok(cp);
        }
    }
    let (cp, _) = train_network(point, seed)?;
    save_checkpoint(&path, &cp)?;
    Ok(cp)
}

/// `sweep`: one trained network per axis value, both policies evaluated.
pub fn run_sweep(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<RunRecord, RunError> {
    cfg.require_mode(&[Mode::Sweep])?;
    let start = Instant::now();
    let sweep = cfg.sweep.clone().expect("validated sweep config has a sweep block");
    let dir = out.map_or_else(|| cfg.run.out_dir.clone(), Path::to_path_buf);
    let seed = cfg.run.seed;
    let episodes = cfg.run.eval_episodes;

    let points = sweep
        .values
        .iter()
        .map(|v| cfg.at_point(sweep.axis, v).map(|p| (v.to_string(), p)))
        .collect::<Result<Vec<_>, _>>()
        .expect("validated sweep values apply");

    let per_point: Vec<Result<[SweepRow; 2], RunError>> = points
        .par_iter()
        .map(|(label, point)| {
            let env = Environment::new(point.env_config())?;
            let cp = cached_network(point, &dir, seed)?;
            let (dqn, rw) = evaluate_pair(&env, &cp.net, episodes, seed)?;
            let row = |policy: &str, m: &RolloutMetrics| SweepRow {
                axis_value: label.clone(),
                policy: policy.into(),
                uavs: point.env.uavs,
                mean_aoi: m.time_avg_aoi,
                mean_final_energy: m.mean_final_energy,
                seed,
            };
            Ok([row("dqn", &dqn), row("rw", &rw)])
        })
        .collect();
    let mut rows = Vec::with_capacity(2 * points.len());
    for r in per_point {
        rows.extend(r?);
    }

    let record = RunRecord {
        command: "sweep".into(),
        config_hash: cfg.hash(),
        seed,
        learning: None,
        policies: Vec::new(),
        sweep: rows,
        wall_clock_s: start.elapsed().as_secs_f64(),
    };
    write(&dir.join(SWEEP_FILE), &sweep_csv(&record.sweep))?;
    write(&dir.join("sweep_record.json"), record.to_json().as_bytes())?;
    Ok(record)
}
