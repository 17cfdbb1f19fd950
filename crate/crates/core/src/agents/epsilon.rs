use serde::{Deserialize, Serialize};

/// Per-episode exploration rate `max(floor, initial * decay^k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EpsilonSchedule {
    pub initial: f64,
    pub decay: f64,
    pub floor: f64,
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        Self {
            initial: 1.0,
            decay: 0.995,
            floor: 0.01,
        }
    }
}

impl EpsilonSchedule {
    pub fn value(&self, episode: u64) -> f64 {
        let k = i32::try_from(episode).unwrap_or(i32::MAX);
        (self.initial * self.decay.powi(k)).max(self.floor)
    }
}
