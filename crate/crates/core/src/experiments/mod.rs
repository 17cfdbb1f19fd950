//! Configuration files, checkpoints, CSV output and the command runners.

mod checkpoint;
mod config;
mod output;
mod runner;
pub mod verify;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CheckpointError, MAGIC, VERSION};
pub use config::{
    locate_key, AgentBlock, ConfigError, EnvBlock, ExperimentConfig, Mode, RadioConfig, RunBlock, SweepAxis,
    SweepBlock, SweepValue,
};
pub use output::{
    age_curve_csv, energy_curve_csv, learning_curve_csv, sweep_csv, write_atomic, LearningRecord, PolicyRecord,
    RunRecord, SweepRow,
};
pub use runner::{
    cache_path, cached_network, evaluate_pair, run_eval, run_sweep, run_train, train_network, RunError, TrainRun,
    AGE_CURVE_FILE, CHECKPOINT_FILE, ENERGY_CURVE_FILE, LEARNING_CURVE_FILE, RESOLVED_CONFIG_FILE, RUN_RECORD_FILE,
    SWEEP_FILE,
};
