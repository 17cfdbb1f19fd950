use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dqn::argmax;
use super::network::QNetwork;
use crate::env::{ActionSpace, Environment, WorldState};

/// Maps the current state to a flat joint-action index.
pub trait Policy {
    /// Called before each episode with a per-episode seed.
    fn begin_episode(&mut self, _episode_seed: u64) {}

    fn act(&mut self, env: &Environment, state: &WorldState, features: &[f64]) -> usize;
}

/// Greedy read-out of a trained network.
#[derive(Debug, Clone, Copy)]
pub struct GreedyPolicy<'a> {
    pub net: &'a QNetwork,
}

impl<'a> GreedyPolicy<'a> {
    pub fn new(net: &'a QNetwork) -> Self {
        Self { net }
    }
}

impl Policy for GreedyPolicy<'_> {
    fn act(&mut self, _env: &Environment, _state: &WorldState, features: &[f64]) -> usize {
        argmax(&self.net.forward_batch(features, 1))
    }
}

/// Uniform direction and uniform schedule per UAV, ignoring the state.
pub fn random_walk_policy<R: Rng + ?Sized>(space: &ActionSpace, rng: &mut R) -> usize {
    let dirs = space.model.directions().len();
    let base = space.per_uav();
    let mut index = 0;
    let mut scale = 1;
    for _ in 0..space.uavs {
        let d = rng.gen_range(0..dirs);
        let s = rng.gen_range(0..=space.devices);
        index += scale * (d * (space.devices + 1) + s);
        scale *= base;
    }
    index
}

/// Random-walk baseline; reseeded at every episode.
#[derive(Debug, Clone)]
pub struct RandomWalk {
    rng: ChaCha8Rng,
}

impl RandomWalk {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Policy for RandomWalk {
    fn begin_episode(&mut self, episode_seed: u64) {
        self.rng = ChaCha8Rng::seed_from_u64(episode_seed);
    }

    fn act(&mut self, env: &Environment, _state: &WorldState, _features: &[f64]) -> usize {
        random_walk_policy(&env.action_space(), &mut self.rng)
    }
}

/// Replays a fixed action list, then hovers with no schedule.
#[derive(Debug, Clone)]
pub struct FixedSequence {
    actions: Vec<usize>,
    at: usize,
}

impl FixedSequence {
    pub fn new(actions: Vec<usize>) -> Self {
        Self { actions, at: 0 }
    }
}

impl Policy for FixedSequence {
    fn begin_episode(&mut self, _episode_seed: u64) {
        self.at = 0;
    }

    fn act(&mut self, env: &Environment, _state: &WorldState, _features: &[f64]) -> usize {
        let a = self.actions.get(self.at).copied();
        self.at += 1;
        a.unwrap_or_else(|| {
            let space = env.action_space();
            let hover = space.model.directions().len() - 1;
            (0..space.uavs).fold(0, |acc, _| acc * space.per_uav() + hover * (space.devices + 1))
        })
    }
}
