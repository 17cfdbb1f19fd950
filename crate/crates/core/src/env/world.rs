use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::action::{ActionSpace, Direction, DirectionModel, JointAction};
use super::grid::{Cell, GridSpec};
use super::params::{EnergyParams, RadioParams};
use super::physics;
use super::state::{DeviceState, UavState, WorldState};
use super::EnvError;

/// Everything needed to build an [`Environment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub grid: GridSpec,
    pub radio: RadioParams,
    pub energy: EnergyParams,
    pub uavs: usize,
    pub devices: usize,
    /// Per-device importance; `None` means uniform `1 / D`.
    pub device_weights: Option<Vec<f64>>,
    pub model: DirectionModel,
    pub age_max: u32,
    pub max_slots: u32,
    /// Charging depots; `None` means the four grid corners.
    pub depots: Option<Vec<Cell>>,
    pub placement_seed: u64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            radio: RadioParams::default(),
            energy: EnergyParams::default(),
            uavs: 1,
            devices: 5,
            device_weights: None,
            model: DirectionModel::Nine,
            age_max: 30,
            max_slots: 60,
            depots: None,
            placement_seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub next: WorldState,
    pub reward: f64,
    /// Ids of devices whose age was reset this slot, ascending.
    pub served: Vec<usize>,
    pub out_of_range: u32,
    pub terminal: bool,
}

/// Validated environment with every position-dependent cost precomputed.
///
/// Immutable once built; all state lives in [`WorldState`] values.
#[derive(Debug, Clone)]
pub struct Environment {
    config: EnvConfig,
    weights: Vec<f64>,
    depots: Vec<Cell>,
    coverage_m: f64,
    slot_s: f64,
    hover_q: f64,
    straight_q: f64,
    diag_q: f64,
    relay_q: Vec<f64>,
    worst_relay_q: f64,
    threshold: u32,
    depot_steps: Vec<u32>,
    placement_cells: Vec<Cell>,
    space: ActionSpace,
}

impl Environment {
    pub fn new(config: EnvConfig) -> Result<Self, EnvError> {
        let g = config.grid;
        g.validate()?;
        config.radio.validate()?;
        config.energy.validate()?;
        if config.uavs == 0 {
            return Err(EnvError::Config("at least one UAV is required".into()));
        }
        if config.age_max == 0 {
            return Err(EnvError::Config("age_max must be at least 1".into()));
        }
        if config.max_slots == 0 {
            return Err(EnvError::Config("max_slots must be at least 1".into()));
        }

        let weights = match &config.device_weights {
            Some(w) => {
                if w.len() != config.devices {
                    return Err(EnvError::Config(format!(
                        "{} device weights given for {} devices",
                        w.len(),
                        config.devices
                    )));
                }
                if let Some(bad) = w.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                    return Err(EnvError::Config(format!("device weights must be positive, got {bad}")));
                }
                w.clone()
            }
            None => vec![1.0 / config.devices as f64; config.devices],
        };

        let depots = match &config.depots {
            Some(d) => d.clone(),
            None => {
                let mut c = g.corners();
                c.dedup();
                c
            }
        };
        if depots.is_empty() {
            return Err(EnvError::Config("at least one charging depot is required".into()));
        }
        for (i, d) in depots.iter().enumerate() {
            if !g.contains(*d) {
                return Err(EnvError::Config(format!("depot {d:?} lies outside the grid")));
            }
            if depots[..i].contains(d) {
                return Err(EnvError::Config(format!("depot {d:?} listed twice")));
            }
        }
        if config.uavs > depots.len() {
            return Err(EnvError::Config(format!(
                "{} UAVs need distinct start depots but only {} exist",
                config.uavs,
                depots.len()
            )));
        }

        let center = g.center();
        let placement_cells: Vec<Cell> = g.cells().filter(|c| *c != center && !depots.contains(c)).collect();
        if config.devices > placement_cells.len() {
            return Err(EnvError::Config(format!(
                "{} devices requested but only {} free cells exist",
                config.devices,
                placement_cells.len()
            )));
        }

        let e = &config.energy;
        let coverage_m = physics::coverage_radius(&config.radio)?;
        let slot_s = e.slot_seconds(g.spacing_m);
        let hover_q = physics::flight_energy_quanta(Direction::Hover, e, slot_s)?;
        let straight_q = physics::flight_energy_quanta(Direction::East, e, slot_s)?;
        let diag_q = physics::flight_energy_quanta(Direction::NorthEast, e, slot_s)?;
        let relay_q: Vec<f64> = g
            .cells()
            .map(|c| physics::relay_energy_quanta(c, &g, &config.radio, e))
            .collect();
        let worst_relay_q = relay_q.iter().copied().fold(0.0, f64::max);
        if !worst_relay_q.is_finite() {
            return Err(EnvError::InvalidParameter("relay energy is not finite".into()));
        }

        let nearest = |c: Cell, dist: fn(Cell, Cell) -> u32| depots.iter().map(|d| dist(c, *d)).min().unwrap_or(0);
        let depot_steps: Vec<u32> = g
            .cells()
            .map(|c| match config.model {
                DirectionModel::Nine => nearest(c, Cell::chebyshev),
                DirectionModel::Five => nearest(c, Cell::manhattan),
            })
            .collect();

        let threshold = match e.energy_threshold {
            Some(t) => t,
            None => {
                let far = g.cells().map(|c| nearest(c, Cell::chebyshev)).max().unwrap_or(0);
                let t = (f64::from(far) * diag_q).ceil();
                if t >= f64::from(e.quanta) {
                    return Err(EnvError::Config(format!(
                        "derived energy threshold {t} leaves no usable battery out of {} quanta",
                        e.quanta
                    )));
                }
                t as u32
            }
        };

        let space = ActionSpace::new(config.model, config.uavs, config.devices);
        Ok(Self {
            weights,
            depots,
            coverage_m,
            slot_s,
            hover_q,
            straight_q,
            diag_q,
            relay_q,
            worst_relay_q,
            threshold,
            depot_steps,
            placement_cells,
            space,
            config,
        })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn grid(&self) -> &GridSpec {
        &self.config.grid
    }

    pub fn action_space(&self) -> ActionSpace {
        self.space
    }

    pub fn feature_len(&self) -> usize {
        3 * self.config.uavs + self.config.devices
    }

    pub fn coverage_radius(&self) -> f64 {
        self.coverage_m
    }

    pub fn slot_seconds(&self) -> f64 {
        self.slot_s
    }

    pub fn energy_threshold(&self) -> u32 {
        self.threshold
    }

    pub fn depots(&self) -> &[Cell] {
        &self.depots
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn flight_quanta(&self, d: Direction) -> f64 {
        match d {
            Direction::Hover => self.hover_q,
            d if d.is_diagonal() => self.diag_q,
            _ => self.straight_q,
        }
    }

    pub fn relay_quanta(&self, cell: Cell) -> f64 {
        self.relay_q[self.config.grid.index(cell)]
    }

    /// Highest relay cost over the map.
    pub fn worst_relay_quanta(&self) -> f64 {
        self.worst_relay_q
    }

    pub fn in_coverage(&self, uav: Cell, device: Cell) -> bool {
        self.config.grid.ground_distance(uav, device) <= self.coverage_m
    }

    /// Fresh episode: full batteries, all ages 1, UAV `u` on depot `u mod C`,
    /// devices on distinct non-depot, non-center cells drawn from `placement_seed`.
    pub fn reset(&self, placement_seed: u64) -> Result<WorldState, EnvError> {
        let n = self.placement_cells.len();
        if self.config.devices > n {
            return Err(EnvError::Config(format!(
                "{} devices do not fit in {n} cells",
                self.config.devices
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(placement_seed);
        let picks = rand::seq::index::sample(&mut rng, n, self.config.devices);
        let devices = picks
            .into_iter()
            .enumerate()
            .map(|(i, k)| DeviceState {
                id: i + 1,
                cell: self.placement_cells[k],
                weight: self.weights[i],
                age: 1,
            })
            .collect();
        let uavs = (0..self.config.uavs)
            .map(|u| UavState {
                id: u + 1,
                cell: self.depots[u % self.depots.len()],
                battery: self.config.energy.quanta,
            })
            .collect();
        Ok(WorldState {
            slot: 0,
            uavs,
            devices,
            depots: self.depots.clone(),
            terminal: false,
        })
    }

    pub fn is_terminal(&self, slot: u32, uavs: &[UavState]) -> bool {
        slot >= self.config.max_slots || uavs.iter().any(|u| u.battery <= self.threshold)
    }

    pub fn step_index(&self, w: &WorldState, index: usize) -> Result<StepOutcome, EnvError> {
        let a = self.space.decode(index)?;
        self.step(w, &a)
    }

    pub fn step(&self, w: &WorldState, a: &JointAction) -> Result<StepOutcome, EnvError> {
        if w.terminal {
            return Err(EnvError::TerminalState);
        }
        if a.per_uav.len() != w.uavs.len() {
            return Err(EnvError::IllegalAction(format!(
                "{} UAV actions for {} UAVs",
                a.per_uav.len(),
                w.uavs.len()
            )));
        }
        for ua in &a.per_uav {
            if !self.config.model.allows(ua.direction) {
                return Err(EnvError::IllegalAction(format!(
                    "{:?} not allowed under the {} model",
                    ua.direction, self.config.model
                )));
            }
            if ua.schedule > w.devices.len() {
                return Err(EnvError::IllegalAction(format!(
                    "schedule {} has no device",
                    ua.schedule
                )));
            }
        }

        let g = &self.config.grid;
        let mut next = w.clone();
        let mut claimed = vec![false; w.devices.len() + 1];
        let mut served = Vec::new();
        let mut out_of_range = 0u32;
        // (effective direction, relayed) per UAV
        let mut effects = Vec::with_capacity(w.uavs.len());
        for (uav, ua) in next.uavs.iter_mut().zip(&a.per_uav) {
            let (dx, dy) = ua.direction.delta();
            let target = Cell::new(uav.cell.x + dx, uav.cell.y + dy);
            let direction = if g.contains(target) {
                uav.cell = target;
                ua.direction
            } else {
                Direction::Hover
            };

            let mut relayed = false;
            if ua.schedule > 0 && !claimed[ua.schedule] {
                claimed[ua.schedule] = true;
                let device = &w.devices[ua.schedule - 1];
                if self.in_coverage(uav.cell, device.cell) {
                    served.push(device.id);
                    relayed = true;
                } else {
                    out_of_range += 1;
                }
            }
            effects.push((direction, relayed));
        }
        served.sort_unstable();

        age_step(&mut next.devices, &served, self.config.age_max);
        for (uav, (direction, relayed)) in next.uavs.iter_mut().zip(effects) {
            let relay = relayed.then(|| self.relay_quanta(uav.cell));
            uav.battery = battery_step(uav.battery, self.flight_quanta(direction), relay);
        }
        let reward = team_reward(&next.devices, out_of_range, self.config.energy.penalty_z);
        next.slot += 1;
        next.terminal = self.is_terminal(next.slot, &next.uavs);
        Ok(StepOutcome {
            terminal: next.terminal,
            next,
            reward,
            served,
            out_of_range,
        })
    }

    /// Battery left after a worst-case return to the nearest depot: every
    /// remaining step costs one move plus a relay from the farthest cell.
    /// Negative once the UAV is past its safe return point.
    pub fn battery_margin(&self, u: &UavState) -> i64 {
        let steps = self.depot_steps[self.config.grid.index(u.cell)];
        let per_step = match self.config.model {
            DirectionModel::Nine => self.diag_q,
            DirectionModel::Five => self.straight_q,
        } + self.worst_relay_q;
        i64::from(u.battery) - (f64::from(steps) * per_step).ceil() as i64
    }

    /// `[x_1, y_1, .., x_U, y_U, A_1/Amax, .., A_D/Amax, margin_1/q, .., margin_U/q]`
    pub fn encode_state(&self, w: &WorldState) -> Vec<f64> {
        let mut out = vec![0.0; self.feature_len()];
        self.encode_into(w, &mut out);
        out
    }

    pub fn encode_into(&self, w: &WorldState, out: &mut [f64]) {
        let g = &self.config.grid;
        let quanta = f64::from(self.config.energy.quanta);
        let age_max = f64::from(self.config.age_max);
        let mut k = 0;
        for u in &w.uavs {
            let (x, y) = g.normalized(u.cell);
            out[k] = x;
            out[k + 1] = y;
            k += 2;
        }
        for d in &w.devices {
            out[k] = f64::from(d.age) / age_max;
            k += 1;
        }
        for u in &w.uavs {
            out[k] = self.battery_margin(u) as f64 / quanta;
            k += 1;
        }
    }
}

/// Served devices restart at age 1; everyone else ages by one, saturating.
pub fn age_step(devices: &mut [DeviceState], served: &[usize], age_max: u32) {
    for d in devices.iter_mut() {
        d.age = if served.contains(&d.id) {
            1
        } else {
            (d.age + 1).min(age_max)
        };
    }
}

/// `-sum_d theta_d * A_d - z * out_of_range`.
pub fn team_reward(devices: &[DeviceState], out_of_range: u32, penalty_z: f64) -> f64 {
    let age: f64 = devices.iter().map(|d| d.weight * f64::from(d.age)).sum();
    -age - penalty_z * f64::from(out_of_range)
}

/// Battery after one slot; the ceiling applies to the summed cost.
pub fn battery_step(battery: u32, flight_quanta: f64, relay_quanta: Option<f64>) -> u32 {
    let cost = (flight_quanta + relay_quanta.unwrap_or(0.0)).ceil();
    if cost >= f64::from(battery) {
        0
    } else {
        battery - cost as u32
    }
}

#[cfg(test)]
mod tests {
    use super::super::action::UavAction;
    use super::*;

    fn devices(ages: &[u32], weight: f64) -> Vec<DeviceState> {
        ages.iter()
            .enumerate()
            .map(|(i, &age)| DeviceState {
                id: i + 1,
                cell: Cell::new(0, 0),
                weight,
                age,
            })
            .collect()
    }

    #[test]
    fn ages() {
        let mut d = devices(&[7, 30, 5], 1.0);
        age_step(&mut d, &[1], 30);
        assert_eq!(d.iter().map(|d| d.age).collect::<Vec<_>>(), vec![1, 30, 6]);
    }

    #[test]
    fn rewards() {
        assert_eq!(team_reward(&devices(&[1; 5], 0.2), 0, 5.0), -1.0);
        assert_eq!(team_reward(&devices(&[1; 5], 0.2), 1, 5.0), -6.0);
        assert_eq!(team_reward(&devices(&[30, 30], 0.5), 0, 5.0), -30.0);
    }

    #[test]
    fn battery() {
        assert_eq!(battery_step(200, 9.030_069, None), 190);
        assert_eq!(battery_step(200, 9.030_069, Some(4.4795e-7)), 190);
        assert_eq!(battery_step(5, 17.5856, None), 0);
        assert_eq!(battery_step(18, 17.5856, None), 0);
        assert_eq!(battery_step(19, 17.5856, None), 1);
    }

    #[test]
    fn default_threshold_and_margin() {
        let env = Environment::new(EnvConfig::default()).unwrap();
        assert_eq!(env.energy_threshold(), 64);
        let depot = UavState {
            id: 1,
            cell: Cell::new(0, 0),
            battery: 200,
        };
        assert_eq!(env.battery_margin(&depot), 200);
        let away = UavState {
            id: 1,
            cell: Cell::new(3, 3),
            battery: 200,
        };
        assert_eq!(env.battery_margin(&away), 161);
        let low = UavState { battery: 10, ..away };
        assert!(env.battery_margin(&low) < 0);
    }

    #[test]
    fn reset_places_uavs_on_distinct_depots() {
        let env = Environment::new(EnvConfig {
            uavs: 2,
            ..EnvConfig::default()
        })
        .unwrap();
        let w = env.reset(3).unwrap();
        assert_eq!(w.uavs[0].cell, env.depots()[0]);
        assert_eq!(w.uavs[1].cell, env.depots()[1]);
        assert_eq!(w, env.reset(3).unwrap());
        assert!(!w.terminal);
        for d in &w.devices {
            assert!(!env.depots().contains(&d.cell));
            assert_ne!(d.cell, env.grid().center());
            assert_eq!(d.age, 1);
        }
    }

    #[test]
    fn too_many_devices() {
        let cfg = EnvConfig {
            grid: GridSpec {
                cells_x: 3,
                cells_y: 3,
                spacing_m: 100.0,
            },
            devices: 5,
            ..EnvConfig::default()
        };
        assert!(matches!(Environment::new(cfg), Err(EnvError::Config(_))));
    }

    #[test]
    fn terminal_state_rejected() {
        let env = Environment::new(EnvConfig::default()).unwrap();
        let mut w = env.reset(0).unwrap();
        w.terminal = true;
        let a = JointAction::new(vec![UavAction::new(Direction::Hover, 0)]);
        assert!(matches!(env.step(&w, &a), Err(EnvError::TerminalState)));
    }

    #[test]
    fn fresh_features() {
        let env = Environment::new(EnvConfig::default()).unwrap();
        let w = env.reset(0).unwrap();
        let f = env.encode_state(&w);
        assert_eq!(f.len(), 3 + 5);
        assert_eq!(&f[..2], &[0.0, 0.0]);
        assert!(f[2..7].iter().all(|&a| a == 1.0 / 30.0));
        assert_eq!(f[7], 1.0);
    }
}
