use rand::Rng;

use super::OracleError;
use crate::agents::rng_stream;
use crate::env::{DirectionModel, EnergyParams, EnvConfig, Environment, GridSpec, RadioParams};

pub const DEFAULT_STATE_BOUND: u64 = 10_000_000;
pub const MAX_HORIZON: u32 = 15;

/// An environment small enough to solve exactly.
#[derive(Debug, Clone)]
pub struct TinyInstance {
    pub env: Environment,
    pub horizon: u32,
    pub state_bound: u64,
}

impl TinyInstance {
    pub fn new(config: EnvConfig, horizon: u32) -> Result<Self, OracleError> {
        Self::with_bound(config, horizon, DEFAULT_STATE_BOUND)
    }

    pub fn with_bound(config: EnvConfig, horizon: u32, state_bound: u64) -> Result<Self, OracleError> {
        let inst = Self {
            env: Environment::new(config)?,
            horizon,
            state_bound,
        };
        inst.check(horizon)?;
        Ok(inst)
    }

    /// Upper bound on distinct states reachable within `horizon` slots:
    /// `cells^U * min(age_max, horizon + 1)^D * (quanta + 1)^U`.
    pub fn state_count(&self, horizon: u32) -> u64 {
        let cfg = self.env.config();
        let cells = cfg.grid.cell_count() as u64;
        let ages = u64::from(cfg.age_max.min(horizon + 1));
        let battery = u64::from(cfg.energy.quanta) + 1;
        let mut n: u64 = 1;
        for _ in 0..cfg.uavs {
            n = n.saturating_mul(cells).saturating_mul(battery);
        }
        for _ in 0..cfg.devices {
            n = n.saturating_mul(ages);
        }
        n
    }

    pub fn check(&self, horizon: u32) -> Result<(), OracleError> {
        if horizon > MAX_HORIZON {
            return Err(OracleError::HorizonTooLong {
                horizon,
                max: MAX_HORIZON,
            });
        }
        let count = self.state_count(horizon);
        if count > self.state_bound {
            return Err(OracleError::BoundExceeded {
                count,
                bound: self.state_bound,
            });
        }
        Ok(())
    }
}

/// Energy profile where every move or hover costs exactly one quantum, so the
/// battery just counts slots.
pub fn unit_cost_energy(quanta: u32) -> EnergyParams {
    EnergyParams {
        battery_j: 900.0 * f64::from(quanta),
        quanta,
        energy_threshold: Some(0),
        ..EnergyParams::default()
    }
}

/// Environment of the canonical tiny instance: 3x3 grid, one UAV, two
/// devices, five-direction moves, 100 m coverage, eight slots.
pub fn canonical_config() -> EnvConfig {
    EnvConfig {
        grid: GridSpec {
            cells_x: 3,
            cells_y: 3,
            spacing_m: 100.0,
        },
        radio: RadioParams {
            coverage_override_m: Some(100.0),
            ..RadioParams::default()
        },
        energy: unit_cost_energy(12),
        uavs: 1,
        devices: 2,
        device_weights: None,
        model: DirectionModel::Five,
        age_max: 30,
        max_slots: 8,
        depots: None,
        placement_seed: 0,
    }
}

pub fn canonical() -> TinyInstance {
    TinyInstance::new(canonical_config(), 8).expect("canonical tiny instance is within bounds")
}

/// A random small instance for cross-checking the solvers. Device weights are
/// dyadic so that sums of rewards are exact in floating point.
pub fn random_instance(seed: u64, horizon: u32) -> Result<TinyInstance, OracleError> {
    let mut rng = rng_stream(seed, 0x71);
    let devices = if rng.gen_bool(0.5) { 1 } else { 2 };
    let uavs = if devices == 1 && rng.gen_bool(0.3) { 2 } else { 1 };
    let model = if rng.gen_bool(0.5) {
        DirectionModel::Five
    } else {
        DirectionModel::Nine
    };
    let coverage = [0.0, 100.0, 150.0, 250.0][rng.gen_range(0..4)];
    let weights = match devices {
        1 => vec![1.0],
        _ => [vec![0.5, 0.5], vec![0.25, 0.75]][rng.gen_range(0..2)].clone(),
    };
    let quanta = rng.gen_range(4..=10);
    // straight moves cost one quantum, hover and diagonals two; the battery
    // can run out mid-horizon
    let energy = EnergyParams {
        battery_j: 500.0 * f64::from(quanta),
        quanta,
        energy_threshold: Some(rng.gen_range(0..2)),
        penalty_z: [5.0, 0.5][rng.gen_range(0..2)],
        ..EnergyParams::default()
    };
    let config = EnvConfig {
        grid: GridSpec {
            cells_x: 3,
            cells_y: 3,
            spacing_m: 100.0,
        },
        radio: RadioParams {
            coverage_override_m: Some(coverage),
            ..RadioParams::default()
        },
        energy,
        uavs,
        devices,
        device_weights: Some(weights),
        model,
        age_max: rng.gen_range(3..=8),
        max_slots: horizon.max(1),
        depots: None,
        placement_seed: rng.gen(),
    };
    TinyInstance::new(config, horizon)
}
