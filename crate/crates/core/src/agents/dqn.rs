use rand::Rng;
use serde::{Deserialize, Serialize};

use super::adam::Adam;
use super::epsilon::EpsilonSchedule;
use super::network::QNetwork;
use super::replay::{Batch, ReplayBuffer};
use super::{rng_stream, AgentError};
use crate::env::{EnvConfig, Environment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Loss {
    /// Huber loss with transition point 1.
    Huber,
    /// `0.5 * e^2`.
    Mse,
}

impl Loss {
    /// Mean loss over the batch and its gradient with respect to each prediction.
    pub fn evaluate(self, predicted: &[f64], target: &[f64]) -> (f64, Vec<f64>) {
        let n = predicted.len() as f64;
        let mut total = 0.0;
        let grad = predicted
            .iter()
            .zip(target)
            .map(|(q, y)| {
                let e = q - y;
                match self {
                    Loss::Huber if e.abs() > 1.0 => {
                        total += e.abs() - 0.5;
                        e.signum() / n
                    }
                    _ => {
                        total += 0.5 * e * e;
                        e / n
                    }
                }
            })
            .collect();
        (total / n, grad)
    }
}

/// Hyperparameters of one DQN training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub episodes: u64,
    pub batch: usize,
    pub learning_rate: f64,
    pub discount: f64,
    pub buffer_capacity: usize,
    /// Environment steps between target-network copies.
    pub target_sync_steps: u64,
    /// Environment steps per gradient step.
    pub train_every: u64,
    pub loss: Loss,
    pub epsilon: EpsilonSchedule,
    pub hidden: Vec<usize>,
}

impl TrainConfig {
    /// Desk-scale budget for `uavs` UAVs. A single UAV gets two hidden layers,
    /// more UAVs get five, with larger batches and buffers.
    pub fn for_uavs(uavs: usize) -> Self {
        let one = uavs <= 1;
        Self {
            episodes: if one { 10_000 } else { 25_000 },
            batch: if one { 64 } else { 128 },
            learning_rate: 4e-4,
            discount: 0.99,
            buffer_capacity: if one { 100_000 } else { 1_000_000 },
            target_sync_steps: 1_000,
            train_every: 1,
            loss: Loss::Huber,
            epsilon: EpsilonSchedule::default(),
            hidden: if one {
                vec![64, 64]
            } else {
                vec![64, 128, 256, 128, 128]
            },
        }
    }

    /// Long episode budget: 50,000 episodes for one UAV, 100,000 otherwise.
    pub fn full_budget(uavs: usize) -> Self {
        Self {
            episodes: if uavs <= 1 { 50_000 } else { 100_000 },
            ..Self::for_uavs(uavs)
        }
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        let bad = |m: String| Err(AgentError::Config(m));
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return bad(format!("discount must lie in (0, 1), got {}", self.discount));
        }
        if self.batch == 0 || self.batch > self.buffer_capacity {
            return bad(format!(
                "batch {} must be positive and at most the buffer capacity {}",
                self.batch, self.buffer_capacity
            ));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad(format!("learning rate must be positive, got {}", self.learning_rate));
        }
        if self.target_sync_steps == 0 || self.train_every == 0 {
            return bad("target_sync_steps and train_every must be positive".into());
        }
        if self.hidden.contains(&0) {
            return bad(format!("hidden layer widths must be positive, got {:?}", self.hidden));
        }
        let e = &self.epsilon;
        if !(0.0..=1.0).contains(&e.initial) || !(0.0..=1.0).contains(&e.floor) || !(e.decay > 0.0 && e.decay <= 1.0) {
            return bad(format!("invalid epsilon schedule {e:?}"));
        }
        Ok(())
    }

    pub fn layer_dims(&self, env: &Environment) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.hidden.len() + 2);
        dims.push(env.feature_len());
        dims.extend_from_slice(&self.hidden);
        dims.push(env.action_space().len());
        dims
    }
}

/// Index of the largest value; the lowest index wins ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Epsilon-greedy choice over the network's joint-action head.
pub fn select_action<R: Rng + ?Sized>(net: &QNetwork, features: &[f64], epsilon: f64, rng: &mut R) -> usize {
    if rng.gen::<f64>() < epsilon {
        rng.gen_range(0..net.output_len())
    } else {
        let q = net.forward_batch(features, 1);
        argmax(&q)
    }
}

/// Bootstrapped targets `r + gamma * max_a Q_target(s', a)`, cut at terminals.
pub fn td_target(batch: &Batch, target: &QNetwork, discount: f64) -> Vec<f64> {
    let n = batch.len();
    let width = target.output_len();
    let q_next = target.forward_batch(&batch.next_states, n);
    (0..n)
        .map(|i| {
            if batch.dones[i] {
                batch.rewards[i]
            } else {
                let row = &q_next[i * width..(i + 1) * width];
                let best = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                batch.rewards[i] + discount * best
            }
        })
        .collect()
}

/// Batch loss and its gradient with respect to every network parameter.
pub fn loss_and_gradient(net: &QNetwork, batch: &Batch, targets: &[f64], loss: Loss) -> (f64, Vec<f64>) {
    let trace = net.trace(&batch.states, batch.len());
    let q = net.gather(&trace, &batch.actions);
    let (value, dq) = loss.evaluate(&q, targets);
    let mut grad = vec![0.0; net.params().len()];
    net.backward_gathered(&trace, &batch.actions, &dq, &mut grad);
    (value, grad)
}

pub fn batch_loss(net: &QNetwork, batch: &Batch, targets: &[f64], loss: Loss) -> f64 {
    let trace = net.trace(&batch.states, batch.len());
    let q = net.gather(&trace, &batch.actions);
    loss.evaluate(&q, targets).0
}

/// One Adam step on a uniformly sampled minibatch; `target` is read only.
pub fn train_step<R: Rng + ?Sized>(
    net: &mut QNetwork,
    target: &QNetwork,
    adam: &mut Adam,
    buffer: &ReplayBuffer,
    cfg: &TrainConfig,
    rng: &mut R,
) -> Result<f64, AgentError> {
    if buffer.len() < cfg.batch {
        return Err(AgentError::Config(format!(
            "buffer holds {} transitions, batch needs {}",
            buffer.len(),
            cfg.batch
        )));
    }
    let batch = buffer.sample(cfg.batch, rng);
    let targets = td_target(&batch, target, cfg.discount);
    let (loss, grad) = loss_and_gradient(net, &batch, &targets, cfg.loss);
    if !loss.is_finite() {
        return Err(AgentError::NonFinite(format!(
            "loss {loss} (targets in [{}, {}])",
            targets.iter().copied().fold(f64::INFINITY, f64::min),
            targets.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        )));
    }
    if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
        return Err(AgentError::NonFinite(format!("gradient component {i} is {}", grad[i])));
    }
    adam.update(net.params_mut(), &grad, cfg.learning_rate);
    if !net.is_finite() {
        return Err(AgentError::NonFinite("parameters after Adam update".into()));
    }
    Ok(loss)
}

pub fn sync_target(net: &QNetwork, target: &mut QNetwork) {
    target.copy_from(net);
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub episode: u64,
    pub epsilon: f64,
    pub steps: u32,
    pub episode_return: f64,
    pub rewards: Vec<f64>,
    /// Time-averaged weighted age over the episode's slots.
    pub mean_aoi: f64,
    /// Mean UAV battery (quanta) at episode end.
    pub final_energy: f64,
    /// Mean loss of the gradient steps taken this episode.
    pub loss: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub net: QNetwork,
    pub curve: Vec<EpisodeRecord>,
    pub env_steps: u64,
    pub gradient_steps: u64,
}

/// Full DQN training run; bit-reproducible from `seed`.
pub fn train(env_config: &EnvConfig, cfg: &TrainConfig, seed: u64) -> Result<TrainOutcome, AgentError> {
    train_with(env_config, cfg, seed, |_| {})
}

/// [`train`] with a callback after every episode.
pub fn train_with<F: FnMut(&EpisodeRecord)>(
    env_config: &EnvConfig,
    cfg: &TrainConfig,
    seed: u64,
    mut on_episode: F,
) -> Result<TrainOutcome, AgentError> {
    cfg.validate()?;
    let env = Environment::new(env_config.clone())?;
    let dims = cfg.layer_dims(&env);
    let mut init_rng = rng_stream(seed, 1);
    let mut explore_rng = rng_stream(seed, 2);
    let mut replay_rng = rng_stream(seed, 3);

    let mut net = QNetwork::glorot(&dims, &mut init_rng)?;
    let mut target = net.clone();
    let mut adam = Adam::new(net.params().len());
    let mut buffer = ReplayBuffer::new(cfg.buffer_capacity, env.feature_len());
    let mut curve = Vec::with_capacity(cfg.episodes as usize);
    let mut env_steps = 0u64;
    let mut gradient_steps = 0u64;

    for episode in 0..cfg.episodes {
        let epsilon = cfg.epsilon.value(episode);
        let mut state = env.reset(env_config.placement_seed)?;
        let mut features = env.encode_state(&state);
        let mut rewards = Vec::new();
        let mut age_sum = 0.0;
        let mut loss_sum = 0.0;
        let mut losses = 0u32;
        loop {
            let action = select_action(&net, &features, epsilon, &mut explore_rng);
            let out = env.step_index(&state, action)?;
            let next_features = env.encode_state(&out.next);
            buffer.push(&features, action, out.reward, &next_features, out.terminal);
            env_steps += 1;
            rewards.push(out.reward);
            age_sum += out.next.weighted_age();

            if buffer.len() >= cfg.batch && env_steps.is_multiple_of(cfg.train_every) {
                loss_sum += train_step(&mut net, &target, &mut adam, &buffer, cfg, &mut replay_rng)?;
                losses += 1;
                gradient_steps += 1;
            }
            if env_steps.is_multiple_of(cfg.target_sync_steps) {
                sync_target(&net, &mut target);
            }
            state = out.next;
            features = next_features;
            if out.terminal {
                break;
            }
        }
        let steps = rewards.len() as u32;
        let record = EpisodeRecord {
            episode,
            epsilon,
            steps,
            episode_return: rewards.iter().sum(),
            mean_aoi: age_sum / f64::from(steps),
            final_energy: state.mean_battery(),
            loss: (losses > 0).then(|| loss_sum / f64::from(losses)),
            rewards,
        };
        on_episode(&record);
        curve.push(record);
    }
    Ok(TrainOutcome {
        net,
        curve,
        env_steps,
        gradient_steps,
    })
}
