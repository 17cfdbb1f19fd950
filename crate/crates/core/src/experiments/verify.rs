//! Self-checks behind the `verify` command.
//!
//! Physical constants are compared against values computed offline at 50
//! significant digits. Environment steps are compared against a separate,
//! straightforward reference model of the transition rules.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use super::checkpoint::Checkpoint;
use super::config::ExperimentConfig;
use crate::agents::{
    batch_loss, loss_and_gradient, rng_stream, Batch, EpsilonSchedule, Loss, QNetwork, ReplayBuffer, TrainConfig,
};
use crate::env::{
    channel_gain, coverage_radius, flight_energy_quanta, physics, relay_energy_quanta, ActionSpace, Cell, Direction,
    DirectionModel, EnergyParams, EnvConfig, EnvError, Environment, GridSpec, RadioParams, WorldState,
};
use crate::oracle::{enumerate_best_return, exhaustive_best_return, finite_horizon_dp, random_instance};

pub const P_HOVER: f64 = 219.82;
/// Rotor power at 25 m/s, split into blade profile, induced and parasite terms.
pub const P25_TERMS: [f64; 3] = [112.636_562_5, 0.009_612_8, 0.229_687_5];
pub const GAIN_CENTER: f64 = 1.384_083_044_982_698_9e-7;
pub const GAIN_CORNER: f64 = 1.971_511_656_562_669_4e-9;
pub const RELAY_CENTER: f64 = 4.4795e-7;
pub const RELAY_CORNER: f64 = 3.144_795e-5;
pub const COVERAGE_RADIUS: f64 = 978.642_904_988_265_4;
pub const HOVER_QUANTA: f64 = 17.5856;
pub const STRAIGHT_QUANTA: f64 = 9.030_069_024;
pub const DIAGONAL_QUANTA: f64 = 12.770_446_082_905_977;

pub const EQUATION_TOLERANCE: f64 = 1e-9;
pub const GRADIENT_TOLERANCE: f64 = 1e-4;

pub type RotorPower = fn(f64, &EnergyParams) -> Result<f64, EnvError>;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn from_result(name: impl Into<String>, r: Result<String, String>) -> Self {
        match r {
            Ok(d) => Self::new(name, true, d),
            Err(d) => Self::new(name, false, d),
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status}  {:<40} {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub rotor_power: RotorPower,
    pub invariant_steps: usize,
    pub gradient_batches: usize,
    pub oracle_instances: u64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            rotor_power: physics::rotor_power,
            invariant_steps: 20_000,
            gradient_batches: 20,
            oracle_instances: 10,
            seed: 0,
        }
    }
}

pub fn relative_error(observed: f64, expected: f64) -> f64 {
    if expected == 0.0 {
        observed.abs()
    } else {
        ((observed - expected) / expected).abs()
    }
}

fn compare(label: &str, observed: f64, expected: f64, tol: f64) -> Result<String, String> {
    let e = relative_error(observed, expected);
    let msg = format!("{label}: observed {observed:.12e}, expected {expected:.12e}, rel err {e:.1e}");
    if e <= tol {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn all(parts: Vec<Result<String, String>>) -> Result<String, String> {
    let mut ok = Vec::new();
    for p in parts {
        ok.push(p?);
    }
    Ok(ok.join("; "))
}

pub fn check_rotor_power(rotor: RotorPower) -> Result<String, String> {
    let e = EnergyParams::default();
    let eval = |v: f64, e: &EnergyParams| rotor(v, e).map_err(|err| err.to_string());
    let hover = eval(0.0, &e)?;
    let cruise = eval(e.speed, &e)?;
    let no_drag = eval(
        e.speed,
        &EnergyParams {
            fuselage_drag: 0.0,
            ..e
        },
    )?;
    all(vec![
        compare("P(0)", hover, P_HOVER, 1e-12),
        compare("P(25)", cruise, P25_TERMS.iter().sum(), EQUATION_TOLERANCE),
        compare("P(25) parasite", cruise - no_drag, P25_TERMS[2], EQUATION_TOLERANCE),
    ])
}

pub fn check_channel_gain() -> Result<String, String> {
    let (g, r) = (GridSpec::default(), RadioParams::default());
    all(vec![
        compare(
            "center",
            channel_gain(g.center(), &g, &r),
            GAIN_CENTER,
            EQUATION_TOLERANCE,
        ),
        compare(
            "corner",
            channel_gain(Cell::new(10, 10), &g, &r),
            GAIN_CORNER,
            EQUATION_TOLERANCE,
        ),
    ])
}

pub fn check_relay_energy() -> Result<String, String> {
    let (g, r, e) = (GridSpec::default(), RadioParams::default(), EnergyParams::default());
    all(vec![
        compare(
            "center",
            relay_energy_quanta(g.center(), &g, &r, &e),
            RELAY_CENTER,
            EQUATION_TOLERANCE,
        ),
        compare(
            "corner",
            relay_energy_quanta(Cell::new(10, 10), &g, &r, &e),
            RELAY_CORNER,
            EQUATION_TOLERANCE,
        ),
    ])
}

pub fn check_coverage_radius() -> Result<String, String> {
    let r = RadioParams::default();
    let derived = coverage_radius(&r).map_err(|e| e.to_string())?;
    let overridden = coverage_radius(&RadioParams {
        coverage_override_m: Some(300.0),
        ..r
    })
    .map_err(|e| e.to_string())?;
    all(vec![
        compare("derived", derived, COVERAGE_RADIUS, EQUATION_TOLERANCE),
        compare("override", overridden, 300.0, 0.0),
    ])
}

pub fn check_flight_energy() -> Result<String, String> {
    let e = EnergyParams::default();
    let slot = e.slot_seconds(GridSpec::default().spacing_m);
    let q = |d| flight_energy_quanta(d, &e, slot).map_err(|err| err.to_string());
    all(vec![
        compare("hover", q(Direction::Hover)?, HOVER_QUANTA, EQUATION_TOLERANCE),
        compare("east", q(Direction::East)?, STRAIGHT_QUANTA, EQUATION_TOLERANCE),
        compare(
            "north-east",
            q(Direction::NorthEast)?,
            DIAGONAL_QUANTA,
            EQUATION_TOLERANCE,
        ),
    ])
}

pub fn check_action_codec() -> Result<String, String> {
    let mut n = 0;
    for model in [DirectionModel::Five, DirectionModel::Nine] {
        for uavs in 1..=2 {
            for devices in 1..=6 {
                let space = ActionSpace { model, uavs, devices };
                for i in 0..space.len() {
                    let a = space.decode(i).map_err(|e| e.to_string())?;
                    let j = space.encode(&a).map_err(|e| e.to_string())?;
                    if i != j {
                        return Err(format!(
                            "{model} U={uavs} D={devices}: {i} decodes and re-encodes to {j}"
                        ));
                    }
                    n += 1;
                }
                if space.decode(space.len()).is_ok() {
                    return Err(format!(
                        "index {} accepted for {model} U={uavs} D={devices}",
                        space.len()
                    ));
                }
            }
        }
    }
    Ok(format!("{n} joint actions round-trip"))
}

/// Random environment covering the supported configuration space.
pub fn random_env_config<R: Rng + ?Sized>(rng: &mut R) -> EnvConfig {
    let side = *[3u32, 5, 7, 11].choose(rng).expect("non-empty");
    let uavs = rng.gen_range(1..=3);
    let devices = rng.gen_range(1..=if side == 3 { 4 } else { 6 });
    let weights: Vec<f64> = (0..devices).map(|_| rng.gen_range(0.1..1.0)).collect();
    let coverage = [None, Some(0.0), Some(150.0), Some(400.0)][rng.gen_range(0..4)];
    EnvConfig {
        grid: GridSpec {
            cells_x: side,
            cells_y: side,
            spacing_m: 100.0,
        },
        radio: RadioParams {
            coverage_override_m: coverage,
            ..RadioParams::default()
        },
        energy: EnergyParams {
            quanta: [100, 200, 400][rng.gen_range(0..3)],
            penalty_z: rng.gen_range(0.0..10.0),
            ..EnergyParams::default()
        },
        uavs,
        devices,
        device_weights: rng.gen_bool(0.5).then_some(weights),
        model: if rng.gen_bool(0.5) {
            DirectionModel::Five
        } else {
            DirectionModel::Nine
        },
        age_max: rng.gen_range(2..=30),
        max_slots: rng.gen_range(3..=60),
        depots: None,
        placement_seed: rng.gen(),
    }
}

/// Expected successor of `w` under `index`, derived from the rules directly.
fn reference_step(env: &Environment, w: &WorldState, index: usize) -> (WorldState, f64) {
    let cfg = env.config();
    let space = env.action_space();
    let dirs = space.model.directions();
    let base = space.per_uav();
    let mut rest = index;
    let mut next = w.clone();
    let mut taken = vec![false; w.devices.len()];
    let mut served = vec![false; w.devices.len()];
    let mut penalties = 0.0;
    let mut costs = Vec::new();
    for uav in next.uavs.iter_mut() {
        let code = rest % base;
        rest /= base;
        let dir = dirs[code / (cfg.devices + 1)];
        let schedule = code % (cfg.devices + 1);
        let (dx, dy) = dir.delta();
        let (x, y) = (uav.cell.x + dx, uav.cell.y + dy);
        let inside = x >= 0 && y >= 0 && x < cfg.grid.cells_x as i32 && y < cfg.grid.cells_y as i32;
        let flown = if inside {
            uav.cell = Cell::new(x, y);
            dir
        } else {
            Direction::Hover
        };
        let mut cost = env.flight_quanta(flown);
        if schedule > 0 && !taken[schedule - 1] {
            taken[schedule - 1] = true;
            let (ux, uy) = cfg.grid.world(uav.cell);
            let (dx, dy) = cfg.grid.world(w.devices[schedule - 1].cell);
            if ((ux - dx).powi(2) + (uy - dy).powi(2)).sqrt() <= env.coverage_radius() {
                served[schedule - 1] = true;
                cost += env.relay_quanta(uav.cell);
            } else {
                penalties += 1.0;
            }
        }
        costs.push(cost.ceil() as i64);
    }
    for (d, s) in next.devices.iter_mut().zip(&served) {
        d.age = if *s { 1 } else { (d.age + 1).min(cfg.age_max) };
    }
    for (u, c) in next.uavs.iter_mut().zip(costs) {
        u.battery = (i64::from(u.battery) - c).max(0) as u32;
    }
    let mut reward = 0.0;
    for d in &next.devices {
        reward -= d.weight * f64::from(d.age);
    }
    reward -= cfg.energy.penalty_z * penalties;
    next.slot += 1;
    next.terminal = next.slot >= cfg.max_slots || next.uavs.iter().any(|u| u.battery <= env.energy_threshold());
    (next, reward)
}

#[derive(Debug, Clone, Default)]
pub struct InvariantStats {
    pub steps: usize,
    pub episodes: usize,
    pub configs: usize,
    pub boundary_hits: usize,
    pub conflicts: usize,
}

/// Drives random configurations with uniform random actions for `steps`
/// steps and checks every transition against the reference model and the
/// state invariants.
pub fn check_invariants(steps: usize, seed: u64) -> Result<InvariantStats, String> {
    let mut rng = rng_stream(seed, 0x1_0000);
    let mut stats = InvariantStats::default();
    while stats.steps < steps {
        let cfg = random_env_config(&mut rng);
        let env = Environment::new(cfg.clone()).map_err(|e| format!("config {cfg:?}: {e}"))?;
        stats.configs += 1;
        for _ in 0..5 {
            let mut w = env.reset(rng.gen()).map_err(|e| e.to_string())?;
            stats.episodes += 1;
            if w.devices.iter().any(|d| d.age != 1) || w.uavs.iter().any(|u| u.battery != cfg.energy.quanta) {
                return Err(format!("reset state not fresh: {w:?}"));
            }
            while !w.terminal && stats.steps < steps {
                let a = rng.gen_range(0..env.action_space().len());
                let out = env.step_index(&w, a).map_err(|e| e.to_string())?;
                let again = env.step_index(&w, a).map_err(|e| e.to_string())?;
                if out != again {
                    return Err(format!("step is not deterministic at {w:?}, action {a}"));
                }
                let (expected, reward) = reference_step(&env, &w, a);
                if out.next != expected || out.reward != reward || out.terminal != expected.terminal {
                    return Err(format!(
                        "transition mismatch from {w:?} under action {a}: got {:?} reward {}, expected {expected:?} reward {reward}",
                        out.next, out.reward
                    ));
                }
                let joint = env.action_space().decode(a).map_err(|e| e.to_string())?;
                for (before, ua) in w.uavs.iter().zip(&joint.per_uav) {
                    let (dx, dy) = ua.direction.delta();
                    if !cfg.grid.contains(Cell::new(before.cell.x + dx, before.cell.y + dy)) {
                        stats.boundary_hits += 1;
                    }
                }
                let mut picks: Vec<usize> = joint.per_uav.iter().map(|u| u.schedule).filter(|&s| s > 0).collect();
                let n = picks.len();
                picks.sort_unstable();
                picks.dedup();
                stats.conflicts += n - picks.len();
                for d in &out.next.devices {
                    if d.age < 1 || d.age > cfg.age_max {
                        return Err(format!("age {} outside [1, {}]", d.age, cfg.age_max));
                    }
                }
                for (b, a) in w.uavs.iter().zip(&out.next.uavs) {
                    if a.battery > b.battery || !cfg.grid.contains(a.cell) {
                        return Err(format!("UAV {} went from {b:?} to {a:?}", b.id));
                    }
                }
                if out.reward > 0.0 {
                    return Err(format!("positive reward {}", out.reward));
                }
                if out.next.terminal && env.step_index(&out.next, 0).is_ok() {
                    return Err("stepping a terminal state succeeded".into());
                }
                w = out.next;
                stats.steps += 1;
            }
        }
    }
    Ok(stats)
}

/// Central differences against backpropagation for the network `dims`.
///
/// Returns the largest relative error `|a - n| / max(|a|, |n|, 1e-5)` over
/// the probed parameters. Probes whose perturbation flips a rectifier or
/// crosses the Huber knee are skipped, since the loss is not differentiable
/// there.
pub fn gradient_check(dims: &[usize], batches: usize, probes: usize, seed: u64) -> Result<f64, String> {
    const H: f64 = 1e-5;
    let mut rng = rng_stream(seed, 0x2_0000);
    let mut net = QNetwork::glorot(dims, &mut rng).map_err(|e| e.to_string())?;
    let (n_in, n_out) = (dims[0], dims[dims.len() - 1]);
    let rows = 8;
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    for b in 0..batches {
        // perturb biases so hidden units are not all at the same kink
        for p in net.params_mut().iter_mut() {
            if *p == 0.0 {
                *p = rng.gen_range(-0.1..0.1);
            }
        }
        let batch = Batch {
            states: (0..rows * n_in).map(|_| rng.gen_range(0.0..1.0)).collect(),
            actions: (0..rows).map(|_| rng.gen_range(0..n_out)).collect(),
            ..Batch::default()
        };
        let targets: Vec<f64> = (0..rows).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let loss = if b % 2 == 0 { Loss::Huber } else { Loss::Mse };
        let (_, grad) = loss_and_gradient(&net, &batch, &targets, loss);

        let mut candidates: Vec<usize> = Vec::with_capacity(probes);
        let last = net.layer_count() - 1;
        for l in 0..net.layer_count() {
            let (w, bias) = net.layer_ranges(l);
            for _ in 0..probes / (2 * (last + 1)) {
                candidates.push(rng.gen_range(w.clone()));
                candidates.push(rng.gen_range(bias.clone()));
            }
        }
        // output rows of the selected actions carry the gradient
        let (w_last, b_last) = net.layer_ranges(last);
        let fan_in = dims[last];
        for &a in &batch.actions {
            candidates.push(w_last.start + a * fan_in + rng.gen_range(0..fan_in));
            candidates.push(b_last.start + a);
        }

        for &i in &candidates {
            let orig = net.params()[i];
            net.params_mut()[i] = orig + H;
            let (lp, pattern_p) = probe(&net, &batch, &targets, loss);
            net.params_mut()[i] = orig - H;
            let (lm, pattern_m) = probe(&net, &batch, &targets, loss);
            net.params_mut()[i] = orig;
            if pattern_p != pattern_m {
                continue;
            }
            let numeric = (lp - lm) / (2.0 * H);
            let analytic = grad[i];
            let err = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-5);
            if !err.is_finite() {
                return Err(format!("non-finite gradient at parameter {i}"));
            }
            worst = worst.max(err);
            checked += 1;
        }
    }
    if checked == 0 {
        return Err("no differentiable probes".into());
    }
    Ok(worst)
}

fn probe(net: &QNetwork, batch: &Batch, targets: &[f64], loss: Loss) -> (f64, Vec<bool>) {
    let trace = net.trace(&batch.states, batch.len());
    let mut pattern: Vec<bool> = trace.acts[1..].iter().flatten().map(|&v| v > 0.0).collect();
    let q = net.gather(&trace, &batch.actions);
    pattern.extend(q.iter().zip(targets).map(|(q, t)| (q - t).abs() > 1.0));
    (batch_loss(net, batch, targets, loss), pattern)
}

/// Layer widths of the default network for `uavs` UAVs and five devices.
pub fn default_architecture(uavs: usize) -> Vec<usize> {
    let env = Environment::new(EnvConfig {
        uavs,
        ..EnvConfig::default()
    })
    .expect("default environment is valid");
    TrainConfig::for_uavs(uavs).layer_dims(&env)
}

fn check_replay() -> Result<String, String> {
    let mut buf = ReplayBuffer::new(5, 1);
    for i in 0..12 {
        buf.push(&[i as f64], i, -(i as f64), &[i as f64 + 1.0], i % 4 == 3);
    }
    let actions: Vec<usize> = buf.iter().map(|e| e.action).collect();
    if actions != [7, 8, 9, 10, 11] {
        return Err(format!("buffer holds {actions:?}, expected [7, 8, 9, 10, 11]"));
    }
    let batch = buf.sample(5, &mut rng_stream(1, 3));
    let mut seen = batch.actions.clone();
    seen.sort_unstable();
    if seen != actions {
        return Err(format!("sample {:?} is not a permutation of the buffer", batch.actions));
    }
    Ok("FIFO order and sampling without replacement".into())
}

fn check_epsilon() -> Result<String, String> {
    let s = EpsilonSchedule::default();
    let v: Vec<f64> = (0..2000).map(|k| s.value(k)).collect();
    if v[0] != s.initial || v.windows(2).any(|w| w[1] > w[0]) || v[1999] != s.floor {
        return Err(format!("schedule starts {} and ends {}", v[0], v[1999]));
    }
    Ok(format!("{} -> {} monotone", v[0], v[1999]))
}

fn check_checkpoint() -> Result<String, String> {
    let env = Environment::new(EnvConfig::default()).map_err(|e| e.to_string())?;
    let dims = TrainConfig::for_uavs(1).layer_dims(&env);
    let net = QNetwork::glorot(&dims, &mut rng_stream(2, 1)).map_err(|e| e.to_string())?;
    let cp = Checkpoint::new(&env, net).map_err(|e| e.to_string())?;
    let bytes = cp.encode();
    let back = Checkpoint::decode(&bytes).map_err(|e| e.to_string())?;
    if back.encode() != bytes || back != cp {
        return Err("decode/encode changed the checkpoint".into());
    }
    Ok(format!("{} bytes round-trip", bytes.len()))
}

fn check_config() -> Result<String, String> {
    let c = ExperimentConfig::default().resolved();
    let again = ExperimentConfig::parse(&c.to_toml(), "snapshot").map_err(|e| e.to_string())?;
    if again != c || again.resolved() != c {
        return Err("resolved snapshot does not reload to itself".into());
    }
    Ok(format!("hash {}", &c.hash()[..16]))
}

/// Runs every check in order.
pub fn run_checks(opts: &VerifyOptions) -> Vec<CheckResult> {
    let mut out = vec![
        CheckResult::from_result("rotor_power", check_rotor_power(opts.rotor_power)),
        CheckResult::from_result("channel_gain", check_channel_gain()),
        CheckResult::from_result("relay_energy_quanta", check_relay_energy()),
        CheckResult::from_result("coverage_radius", check_coverage_radius()),
        CheckResult::from_result("flight_energy_quanta", check_flight_energy()),
        CheckResult::from_result("action_codec", check_action_codec()),
        CheckResult::from_result(
            "mdp_invariants",
            check_invariants(opts.invariant_steps, opts.seed).map(|s| {
                format!(
                    "{} steps, {} episodes, {} configs, {} boundary moves, {} conflicts",
                    s.steps, s.episodes, s.configs, s.boundary_hits, s.conflicts
                )
            }),
        ),
        CheckResult::from_result("replay_buffer", check_replay()),
        CheckResult::from_result("epsilon_schedule", check_epsilon()),
    ];
    for uavs in [1, 2] {
        let dims = default_architecture(uavs);
        let r = gradient_check(&dims, opts.gradient_batches, 64, opts.seed).and_then(|e| {
            let msg = format!("dims {dims:?}: max rel err {e:.2e} (tolerance {GRADIENT_TOLERANCE:.0e})");
            if e < GRADIENT_TOLERANCE {
                Ok(msg)
            } else {
                Err(msg)
            }
        });
        out.push(CheckResult::from_result(format!("gradient[{uavs} uav]"), r));
    }
    for seed in 0..opts.oracle_instances {
        let r = random_instance(seed, 6).map_err(|e| e.to_string()).and_then(|inst| {
            let (v, _) = exhaustive_best_return(&inst, 6).map_err(|e| e.to_string())?;
            let dp = finite_horizon_dp(&inst, 6).map_err(|e| e.to_string())?;
            let msg = format!("dp {} exhaustive {v} over {} states", dp.root_value(), dp.len());
            if dp.root_value() == v {
                Ok(msg)
            } else {
                Err(msg)
            }
        });
        out.push(CheckResult::from_result(format!("oracle_dp_vs_exhaustive[{seed}]"), r));
    }
    let memo = (0..opts.oracle_instances * 4)
        .filter_map(|s| random_instance(s, 4).ok())
        .filter(|i| i.env.action_space().len() <= 30)
        .try_fold(0, |n, inst| {
            let a = exhaustive_best_return(&inst, 4).map_err(|e| e.to_string())?;
            let b = enumerate_best_return(&inst, 4).map_err(|e| e.to_string())?;
            if a == b {
                Ok(n + 1)
            } else {
                Err(format!("memoized {a:?} vs enumerated {b:?}"))
            }
        })
        .map(|n| format!("{n} instances agree"));
    out.push(CheckResult::from_result("oracle_memo_vs_enumeration", memo));
    out.push(CheckResult::from_result("checkpoint_round_trip", check_checkpoint()));
    out.push(CheckResult::from_result("config_fixed_point", check_config()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flipped_parasite(v: f64, e: &EnergyParams) -> Result<f64, EnvError> {
        let parasite = 0.5 * e.fuselage_drag * e.air_density * e.rotor_solidity * e.rotor_disk_area * v.powi(3);
        Ok(physics::rotor_power(v, e)? - 2.0 * parasite)
    }

    #[test]
    fn sign_flip_is_caught() {
        assert!(check_rotor_power(physics::rotor_power).is_ok());
        let err = check_rotor_power(flipped_parasite).unwrap_err();
        assert!(err.contains("P(25)"), "{err}");
    }

    #[test]
    fn invariants_hold_briefly() {
        let s = check_invariants(3_000, 7).unwrap();
        assert!(s.boundary_hits > 0 && s.conflicts > 0, "{s:?}");
    }

    #[test]
    fn small_gradient_check() {
        let e = gradient_check(&[4, 6, 5, 3], 6, 30, 1).unwrap();
        assert!(e < GRADIENT_TOLERANCE, "{e}");
    }

    #[test]
    fn reduced_run_passes() {
        let opts = VerifyOptions {
            invariant_steps: 2_000,
            gradient_batches: 1,
            oracle_instances: 3,
            ..VerifyOptions::default()
        };
        let results = run_checks(&opts);
        for r in &results {
            assert!(r.passed, "{r}");
        }
        assert!(results.iter().any(|r| r.name == "oracle_dp_vs_exhaustive[2]"));
    }
}
