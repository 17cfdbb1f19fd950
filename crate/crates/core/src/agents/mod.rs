//! Joint-action deep Q-network: dense network with hand-written
//! backpropagation, Adam, experience replay, fixed Q-targets and an
//! epsilon-greedy schedule, plus the random-walk baseline.

mod adam;
mod dqn;
mod epsilon;
mod network;
mod policy;
mod replay;

pub use adam::Adam;
pub use dqn::{
    argmax, batch_loss, loss_and_gradient, select_action, sync_target, td_target, train, train_step, train_with,
    EpisodeRecord, Loss, TrainConfig, TrainOutcome,
};
pub use epsilon::EpsilonSchedule;
pub use network::{param_count, QNetwork, Trace};
pub use policy::{random_walk_policy, FixedSequence, GreedyPolicy, Policy, RandomWalk};
pub use replay::{Batch, Experience, ReplayBuffer};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::env::EnvError;

#[derive(Debug, thiserror::Error)]
pub enum AgentError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error("non-finite value during training: {0}")]
    NonFinite(String),
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// Independent ChaCha stream `stream` under `seed`.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
