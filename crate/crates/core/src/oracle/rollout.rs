use rand::Rng;

use super::OracleError;
use crate::agents::{rng_stream, Policy};
use crate::env::Environment;

/// Aggregated evaluation of one policy.
#[derive(Debug, Clone, PartialEq)]
pub struct RolloutMetrics {
    /// Mean weighted age per slot (slot 0 is the reset state), over the
    /// slots every episode reached.
    pub age_curve: Vec<f64>,
    /// Mean UAV battery (quanta) per slot, same slots as `age_curve`.
    pub energy_curve: Vec<f64>,
    /// Time-averaged weighted age, averaged over episodes.
    pub time_avg_aoi: f64,
    pub episode_aoi: Vec<f64>,
    pub episode_lengths: Vec<u32>,
    pub returns: Vec<f64>,
    /// Mean UAV battery at episode end, averaged over episodes.
    pub mean_final_energy: f64,
    /// Full per-episode trajectories `(weighted age, mean battery)` by slot.
    pub trajectories: Vec<Vec<(f64, f64)>>,
}

impl RolloutMetrics {
    pub fn episodes(&self) -> usize {
        self.episode_lengths.len()
    }

    /// Last slot index reached by every episode.
    pub fn common_horizon(&self) -> usize {
        self.age_curve.len().saturating_sub(1)
    }

    pub fn mean_return(&self) -> f64 {
        self.returns.iter().sum::<f64>() / self.returns.len() as f64
    }
}

/// Seed handed to `Policy::begin_episode` for episode `episode`.
pub fn episode_seed(master: u64, episode: u64) -> u64 {
    let mut rng = rng_stream(master, 0x5eed_0000 + episode);
    rng.gen()
}

/// Runs `episodes` episodes of `policy` on the instance's fixed device layout.
pub fn rollout(
    env: &Environment,
    policy: &mut dyn Policy,
    episodes: usize,
    seed: u64,
) -> Result<RolloutMetrics, OracleError> {
    if episodes == 0 {
        return Err(OracleError::NoEpisodes);
    }
    let mut trajectories = Vec::with_capacity(episodes);
    let mut episode_aoi = Vec::with_capacity(episodes);
    let mut episode_lengths = Vec::with_capacity(episodes);
    let mut returns = Vec::with_capacity(episodes);
    let mut features = vec![0.0; env.feature_len()];

    for e in 0..episodes {
        policy.begin_episode(episode_seed(seed, e as u64));
        let mut state = env.reset(env.config().placement_seed)?;
        let mut traj = vec![(state.weighted_age(), state.mean_battery())];
        let mut ret = 0.0;
        while !state.terminal {
            env.encode_into(&state, &mut features);
            let a = policy.act(env, &state, &features);
            let out = env.step_index(&state, a)?;
            ret += out.reward;
            state = out.next;
            traj.push((state.weighted_age(), state.mean_battery()));
        }
        let steps = traj.len() - 1;
        episode_aoi.push(traj[1..].iter().map(|t| t.0).sum::<f64>() / steps as f64);
        episode_lengths.push(steps as u32);
        returns.push(ret);
        trajectories.push(traj);
    }

    let horizon = episode_lengths.iter().copied().min().unwrap_or(0) as usize;
    let n = episodes as f64;
    let age_curve = (0..=horizon)
        .map(|t| trajectories.iter().map(|tr| tr[t].0).sum::<f64>() / n)
        .collect();
    let energy_curve = (0..=horizon)
        .map(|t| trajectories.iter().map(|tr| tr[t].1).sum::<f64>() / n)
        .collect();
    Ok(RolloutMetrics {
        age_curve,
        energy_curve,
        time_avg_aoi: episode_aoi.iter().sum::<f64>() / n,
        mean_final_energy: trajectories.iter().map(|tr| tr[tr.len() - 1].1).sum::<f64>() / n,
        episode_aoi,
        episode_lengths,
        returns,
        trajectories,
    })
}
