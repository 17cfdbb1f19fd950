//! Exact solvers for tiny instances and the policy evaluation harness.

mod dp;
mod exhaustive;
mod rollout;
mod tiny;

pub use dp::{finite_horizon_dp, ValueTable};
pub use exhaustive::{enumerate_best_return, exhaustive_best_return};
pub use rollout::{episode_seed, rollout, RolloutMetrics};
pub use tiny::{
    canonical, canonical_config, random_instance, unit_cost_energy, TinyInstance, DEFAULT_STATE_BOUND, MAX_HORIZON,
};

use crate::agents::Policy;
use crate::env::{EnvError, Environment, WorldState};

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("instance has up to {count} states, above the bound of {bound}")]
    BoundExceeded { count: u64, bound: u64 },
    #[error("horizon {horizon} exceeds the maximum of {max}")]
    HorizonTooLong { horizon: u32, max: u32 },
    #[error("rollout needs at least one episode")]
    NoEpisodes,
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// Follows the greedy actions stored in a [`ValueTable`].
pub struct TablePolicy<'a> {
    pub table: &'a ValueTable,
}

impl Policy for TablePolicy<'_> {
    fn act(&mut self, _env: &Environment, state: &WorldState, _features: &[f64]) -> usize {
        self.table.best_action(state).unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::RandomWalk;
    use crate::env::{Direction, EnvConfig, GridSpec, RadioParams};

    fn single_device(coverage: f64, horizon: u32) -> TinyInstance {
        let cfg = EnvConfig {
            grid: GridSpec {
                cells_x: 3,
                cells_y: 3,
                spacing_m: 100.0,
            },
            radio: RadioParams {
                coverage_override_m: Some(coverage),
                ..RadioParams::default()
            },
            energy: unit_cost_energy(20),
            uavs: 1,
            devices: 1,
            max_slots: horizon,
            ..canonical_config()
        };
        TinyInstance::new(cfg, horizon).unwrap()
    }

    #[test]
    fn zero_horizon_is_worth_nothing() {
        let inst = canonical();
        assert_eq!(exhaustive_best_return(&inst, 0).unwrap(), (0.0, vec![]));
        assert_eq!(finite_horizon_dp(&inst, 0).unwrap().root_value(), 0.0);
    }

    #[test]
    fn device_always_in_reach() {
        // 300 m covers the whole 3x3 grid, so serving every slot keeps the age at 1
        let inst = single_device(300.0, 3);
        let (v, seq) = exhaustive_best_return(&inst, 3).unwrap();
        assert_eq!(v, -3.0);
        let space = inst.env.action_space();
        for a in seq {
            assert_eq!(space.decode(a).unwrap().per_uav[0].schedule, 1);
        }
    }

    #[test]
    fn unreachable_device_is_never_scheduled() {
        // zero coverage and the device is two moves away, so scheduling only adds a penalty
        let inst = single_device(0.0, 1);
        let (v, seq) = exhaustive_best_return(&inst, 1).unwrap();
        assert_eq!(v, -2.0);
        let a = inst.env.action_space().decode(seq[0]).unwrap().per_uav[0];
        assert_eq!(a.schedule, 0);
        assert_eq!(a.direction, Direction::North);
    }

    #[test]
    fn canonical_optimum() {
        let inst = canonical();
        let (v, seq) = exhaustive_best_return(&inst, 8).unwrap();
        assert_eq!(v, -13.0);
        assert_eq!(seq.len(), 8);
        assert_eq!(finite_horizon_dp(&inst, 8).unwrap().root_value(), v);
    }

    #[test]
    fn memoized_search_matches_enumeration() {
        let mut checked = 0;
        for seed in 0..40 {
            let inst = random_instance(seed, 4).unwrap();
            if inst.env.action_space().len() > 30 {
                continue;
            }
            let memo = exhaustive_best_return(&inst, 4).unwrap();
            let full = enumerate_best_return(&inst, 4).unwrap();
            assert_eq!(memo, full, "seed {seed}");
            checked += 1;
        }
        assert!(checked >= 10);
    }

    #[test]
    fn dp_matches_exhaustive() {
        for seed in 0..12 {
            let inst = random_instance(seed, 6).unwrap();
            let (v, _) = exhaustive_best_return(&inst, 6).unwrap();
            let table = finite_horizon_dp(&inst, 6).unwrap();
            assert_eq!(table.root_value(), v, "seed {seed}");
            assert!(table.values().all(|x| x <= 0.0));
        }
    }

    #[test]
    fn value_falls_with_horizon() {
        let inst = canonical();
        let mut prev = 0.0;
        for h in 1..=8 {
            let (v, _) = exhaustive_best_return(&inst, h).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn table_policy_attains_root_value() {
        let inst = canonical();
        let table = finite_horizon_dp(&inst, 8).unwrap();
        let m = rollout(&inst.env, &mut TablePolicy { table: &table }, 1, 0).unwrap();
        assert_eq!(m.returns[0], table.root_value());
        let rw = rollout(&inst.env, &mut RandomWalk::new(5), 50, 5).unwrap();
        assert!(rw.returns.iter().all(|&r| r <= table.root_value()));
    }

    struct Constant(usize);

    impl Policy for Constant {
        fn act(&mut self, _env: &Environment, _state: &WorldState, _features: &[f64]) -> usize {
            self.0
        }
    }

    #[test]
    fn rollout_curves() {
        let inst = single_device(300.0, 5);
        let space = inst.env.action_space();
        let hover = space.per_uav() - space.devices - 1;

        let serve = rollout(&inst.env, &mut Constant(hover + 1), 3, 0).unwrap();
        assert_eq!(serve.time_avg_aoi, 1.0);
        assert_eq!(serve.age_curve, vec![1.0; 6]);
        assert_eq!(serve.episode_lengths, vec![5, 5, 5]);

        let idle = rollout(&inst.env, &mut Constant(hover), 2, 0).unwrap();
        assert_eq!(idle.age_curve, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(idle.time_avg_aoi, 4.0);
        assert_eq!(idle.energy_curve, vec![20.0, 19.0, 18.0, 17.0, 16.0, 15.0]);
        assert!(matches!(
            rollout(&inst.env, &mut Constant(0), 0, 0),
            Err(OracleError::NoEpisodes)
        ));
    }
}
