use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::agents::{EpsilonSchedule, Loss, TrainConfig};
use crate::env::{
    db_to_linear, dbm_to_watts, Cell, DirectionModel, EnergyParams, EnvConfig, Environment, GridSpec, RadioParams,
};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}:{line}: {message}")]
    Parse {
        origin: String,
        line: usize,
        message: String,
    },
    #[error("{origin}:{line}: {key}: {message}")]
    Invalid {
        origin: String,
        line: usize,
        key: String,
        message: String,
    },
    #[error("run.mode is `{found}` but the command needs `{expected}`")]
    ModeMismatch { found: Mode, expected: String },
}

/// Radio block in engineering units; converted to [`RadioParams`] on use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadioConfig {
    pub beta0_db: f64,
    pub tx_power_w: f64,
    pub packet_bits: f64,
    pub bandwidth_hz: f64,
    pub noise_dbm: f64,
    pub uav_alt_m: f64,
    pub bs_alt_m: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage_override_m: Option<f64>,
}

impl Default for RadioConfig {
    fn default() -> Self {
        let r = RadioParams::default();
        Self {
            beta0_db: -30.0,
            tx_power_w: r.tx_power_w,
            packet_bits: r.packet_bits,
            bandwidth_hz: r.bandwidth_hz,
            noise_dbm: -100.0,
            uav_alt_m: r.uav_alt_m,
            bs_alt_m: r.bs_alt_m,
            coverage_override_m: None,
        }
    }
}

impl RadioConfig {
    pub fn params(&self) -> RadioParams {
        RadioParams {
            beta0: db_to_linear(self.beta0_db),
            tx_power_w: self.tx_power_w,
            packet_bits: self.packet_bits,
            bandwidth_hz: self.bandwidth_hz,
            noise_w: dbm_to_watts(self.noise_dbm),
            uav_alt_m: self.uav_alt_m,
            bs_alt_m: self.bs_alt_m,
            coverage_override_m: self.coverage_override_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvBlock {
    pub uavs: usize,
    pub devices: usize,
    pub direction_model: DirectionModel,
    pub placement_seed: u64,
    pub age_max: u32,
    pub max_slots: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub device_weights: Option<Vec<f64>>,
    /// `[x, y]` cells; defaults to the grid corners.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depots: Option<Vec<[i32; 2]>>,
    pub grid: GridSpec,
    pub radio: RadioConfig,
    pub energy: EnergyParams,
}

impl Default for EnvBlock {
    fn default() -> Self {
        let e = EnvConfig::default();
        Self {
            uavs: e.uavs,
            devices: e.devices,
            direction_model: e.model,
            placement_seed: e.placement_seed,
            age_max: e.age_max,
            max_slots: e.max_slots,
            device_weights: None,
            depots: None,
            grid: e.grid,
            radio: RadioConfig::default(),
            energy: e.energy,
        }
    }
}

impl EnvBlock {
    pub fn env_config(&self) -> EnvConfig {
        EnvConfig {
            grid: self.grid,
            radio: self.radio.params(),
            energy: self.energy,
            uavs: self.uavs,
            devices: self.devices,
            device_weights: self.device_weights.clone(),
            model: self.direction_model,
            age_max: self.age_max,
            max_slots: self.max_slots,
            depots: self
                .depots
                .as_ref()
                .map(|d| d.iter().map(|&[x, y]| Cell::new(x, y)).collect()),
            placement_seed: self.placement_seed,
        }
    }
}

/// Agent block. Unset fields take the defaults for the configured UAV count.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AgentBlock {
    /// Use the long episode budget instead of the desk-scale one.
    pub full_budget: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub episodes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub batch: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discount: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub buffer_capacity: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_sync_steps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_every: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loss: Option<Loss>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hidden: Option<Vec<usize>>,
    pub epsilon: EpsilonSchedule,
}

impl AgentBlock {
    pub fn train_config(&self, uavs: usize) -> TrainConfig {
        let base = if self.full_budget {
            TrainConfig::full_budget(uavs)
        } else {
            TrainConfig::for_uavs(uavs)
        };
        TrainConfig {
            episodes: self.episodes.unwrap_or(base.episodes),
            batch: self.batch.unwrap_or(base.batch),
            learning_rate: self.learning_rate.unwrap_or(base.learning_rate),
            discount: self.discount.unwrap_or(base.discount),
            buffer_capacity: self.buffer_capacity.unwrap_or(base.buffer_capacity),
            target_sync_steps: self.target_sync_steps.unwrap_or(base.target_sync_steps),
            train_every: self.train_every.unwrap_or(base.train_every),
            loss: self.loss.unwrap_or(base.loss),
            epsilon: self.epsilon,
            hidden: self.hidden.clone().unwrap_or(base.hidden),
        }
    }

    fn resolved(&self, uavs: usize) -> Self {
        let t = self.train_config(uavs);
        Self {
            full_budget: self.full_budget,
            episodes: Some(t.episodes),
            batch: Some(t.batch),
            learning_rate: Some(t.learning_rate),
            discount: Some(t.discount),
            buffer_capacity: Some(t.buffer_capacity),
            target_sync_steps: Some(t.target_sync_steps),
            train_every: Some(t.train_every),
            loss: Some(t.loss),
            hidden: Some(t.hidden),
            epsilon: t.epsilon,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Train,
    Eval,
    Sweep,
    Verify,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Train => "train",
            Mode::Eval => "eval",
            Mode::Sweep => "sweep",
            Mode::Verify => "verify",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunBlock {
    pub mode: Mode,
    pub eval_episodes: usize,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunBlock {
    fn default() -> Self {
        Self {
            mode: Mode::Train,
            eval_episodes: 100,
            out_dir: PathBuf::from("runs"),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    DeviceCount,
    CoverageRadius,
    UavCount,
    DirectionModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepValue {
    Int(i64),
    Float(f64),
    Text(String),
}

impl fmt::Display for SweepValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepValue::Int(v) => write!(f, "{v}"),
            SweepValue::Float(v) => write!(f, "{v}"),
            SweepValue::Text(v) => f.write_str(v),
        }
    }
}

impl SweepValue {
    fn count(&self) -> Option<usize> {
        match *self {
            SweepValue::Int(v) if v > 0 => usize::try_from(v).ok(),
            _ => None,
        }
    }

    fn meters(&self) -> Option<f64> {
        let m = match *self {
            SweepValue::Int(v) => v as f64,
            SweepValue::Float(v) => v,
            SweepValue::Text(_) => return None,
        };
        (m.is_finite() && m >= 0.0).then_some(m)
    }

    fn model(&self) -> Option<DirectionModel> {
        match self {
            SweepValue::Text(s) if s == "five" => Some(DirectionModel::Five),
            SweepValue::Text(s) if s == "nine" => Some(DirectionModel::Nine),
            SweepValue::Int(v) => u8::try_from(*v).ok().and_then(DirectionModel::from_tag),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    pub axis: SweepAxis,
    pub values: Vec<SweepValue>,
}

/// One experiment: environment, agent, run settings and an optional sweep.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub run: RunBlock,
    pub env: EnvBlock,
    pub agent: AgentBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses and validates; `origin` names the source in error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse {
            origin: origin.to_string(),
            line: e.span().map_or(1, |s| line_of(text, s.start)),
            message: e.message().trim_end().to_string(),
        })?;
        cfg.validate().map_err(|(key, message)| ConfigError::Invalid {
            origin: origin.to_string(),
            line: locate_key(text, &key).unwrap_or(1),
            key,
            message,
        })?;
        Ok(cfg)
    }

    /// Semantic checks; the error carries the dotted key it refers to.
    pub fn validate(&self) -> Result<(), (String, String)> {
        let err = |k: &str, m: String| Err((k.to_string(), m));
        let e = &self.env;
        if e.grid.cells_x == 0 || e.grid.cells_x.is_multiple_of(2) {
            return err(
                "env.grid.cells_x",
                format!("must be odd and positive, got {}", e.grid.cells_x),
            );
        }
        if e.grid.cells_y == 0 || e.grid.cells_y.is_multiple_of(2) {
            return err(
                "env.grid.cells_y",
                format!("must be odd and positive, got {}", e.grid.cells_y),
            );
        }
        if !(e.grid.spacing_m.is_finite() && e.grid.spacing_m > 0.0) {
            return err(
                "env.grid.spacing_m",
                format!("must be positive, got {}", e.grid.spacing_m),
            );
        }
        if e.uavs == 0 {
            return err("env.uavs", "at least one UAV is required".into());
        }
        if e.devices == 0 {
            return err("env.devices", "at least one device is required".into());
        }
        if e.age_max == 0 {
            return err("env.age_max", "must be positive".into());
        }
        if e.max_slots == 0 {
            return err("env.max_slots", "must be positive".into());
        }
        if let Some(w) = &e.device_weights {
            if w.len() != e.devices {
                return err(
                    "env.device_weights",
                    format!("{} weights given for {} devices", w.len(), e.devices),
                );
            }
        }
        if let Err(m) = e.radio.params().validate() {
            return err("env.radio", m.to_string());
        }
        if let Err(m) = e.energy.validate() {
            return err("env.energy", m.to_string());
        }
        let env = match Environment::new(e.env_config()) {
            Ok(env) => env,
            Err(m) => return err("env", m.to_string()),
        };
        if let Err(m) = env.reset(e.placement_seed) {
            return err("env.devices", m.to_string());
        }
        if let Err(m) = self.agent.train_config(e.uavs).validate() {
            return err("agent", m.to_string());
        }
        if self.run.eval_episodes == 0 {
            return err("run.eval_episodes", "must be positive".into());
        }
        match &self.sweep {
            None if self.run.mode == Mode::Sweep => {
                return err("run.mode", "sweep mode needs a [sweep] block".into());
            }
            None => {}
            Some(s) => {
                if s.values.is_empty() {
                    return err("sweep.values", "at least one value is required".into());
                }
                for v in &s.values {
                    let point = self.at_point(s.axis, v).map_err(|m| ("sweep.values".to_string(), m))?;
                    if let Err((_, m)) = point.validate() {
                        return err("sweep.values", format!("value {v}: {m}"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn require_mode(&self, allowed: &[Mode]) -> Result<(), ConfigError> {
        if allowed.contains(&self.run.mode) {
            return Ok(());
        }
        let expected = allowed.iter().map(Mode::to_string).collect::<Vec<_>>().join("` or `");
        Err(ConfigError::ModeMismatch {
            found: self.run.mode,
            expected,
        })
    }

    pub fn env_config(&self) -> EnvConfig {
        self.env.env_config()
    }

    pub fn train_config(&self) -> TrainConfig {
        self.agent.train_config(self.env.uavs)
    }

    /// Training configuration of one sweep point.
    pub fn at_point(&self, axis: SweepAxis, value: &SweepValue) -> Result<Self, String> {
        let mut c = self.clone();
        c.sweep = None;
        c.run.mode = Mode::Train;
        let bad = || format!("invalid value {value} for axis {axis:?}");
        match axis {
            SweepAxis::DeviceCount => {
                c.env.devices = value.count().ok_or_else(bad)?;
                c.env.device_weights = None;
            }
            SweepAxis::CoverageRadius => c.env.radio.coverage_override_m = Some(value.meters().ok_or_else(bad)?),
            SweepAxis::UavCount => c.env.uavs = value.count().ok_or_else(bad)?,
            SweepAxis::DirectionModel => c.env.direction_model = value.model().ok_or_else(bad)?,
        }
        Ok(c)
    }

    /// Every default made explicit. Resolving a resolved config is a no-op.
    pub fn resolved(&self) -> Self {
        let mut c = self.clone();
        c.agent = self.agent.resolved(self.env.uavs);
        if c.env.energy.energy_threshold.is_none() {
            if let Ok(env) = Environment::new(self.env_config()) {
                c.env.energy.energy_threshold = Some(env.energy_threshold());
            }
        }
        c
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes to TOML")
    }

    /// SHA-256 over the resolved env and agent blocks, hex encoded.
    pub fn hash(&self) -> String {
        let r = self.resolved();
        let json = serde_json::to_string(&(&r.env, &r.agent)).expect("config serializes to JSON");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text.as_bytes()[..offset.min(text.len())]
        .iter()
        .filter(|&&b| b == b'\n')
        .count()
        + 1
}

/// Line of the first definition of a dotted key (or its table header),
/// falling back to the closest enclosing table that appears in the text.
pub fn locate_key(text: &str, key: &str) -> Option<usize> {
    let mut path = key;
    loop {
        let mut table = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if let Some(h) = line.strip_prefix('[') {
                let h = h.trim_start_matches('[');
                let name: String = h
                    .split(']')
                    .next()
                    .unwrap_or("")
                    .chars()
                    .filter(|c| !c.is_whitespace())
                    .collect();
                if name == path {
                    return Some(i + 1);
                }
                table = name;
                continue;
            }
            let Some((lhs, _)) = line.split_once('=') else { continue };
            let lhs: String = lhs.chars().filter(|c| !c.is_whitespace() && *c != '"').collect();
            let full = if table.is_empty() {
                lhs
            } else {
                format!("{table}.{lhs}")
            };
            if full == path || path.starts_with(&format!("{full}.")) {
                return Some(i + 1);
            }
        }
        path = &path[..path.rfind('.')?];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = ExperimentConfig::parse("", "t").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        let env = c.env_config();
        assert_eq!(env.radio, RadioParams::default());
        assert_eq!(env, EnvConfig::default());
        assert_eq!(c.train_config(), TrainConfig::for_uavs(1));
    }

    #[test]
    fn agent_defaults_follow_uav_count() {
        let c = ExperimentConfig::parse("[env]\nuavs = 2\n", "t").unwrap();
        assert_eq!(c.train_config(), TrainConfig::for_uavs(2));
        let c = ExperimentConfig::parse("[env]\nuavs = 2\n[agent]\nfull_budget = true\nbatch = 32\n", "t").unwrap();
        let t = c.train_config();
        assert_eq!(t.episodes, 100_000);
        assert_eq!(t.batch, 32);
    }

    #[test]
    fn resolution_is_a_fixed_point() {
        let src = "[env]\ndevices = 8\ndirection_model = \"five\"\n[env.radio]\ncoverage_override_m = 300.0\n";
        let c = ExperimentConfig::parse(src, "t").unwrap();
        let r = c.resolved();
        let again = ExperimentConfig::parse(&r.to_toml(), "snapshot").unwrap();
        assert_eq!(again, r);
        assert_eq!(again.resolved(), r);
        assert_eq!(again.hash(), c.hash());
        assert_eq!(r.env.energy.energy_threshold, Some(64));
    }

    #[test]
    fn hash_tracks_env_and_agent_only() {
        let base = ExperimentConfig::default();
        let mut run = base.clone();
        run.run.seed = 9;
        run.run.out_dir = "elsewhere".into();
        assert_eq!(base.hash(), run.hash());
        let mut env = base.clone();
        env.env.age_max = 29;
        assert_ne!(base.hash(), env.hash());
        let mut agent = base.clone();
        agent.agent.epsilon.floor = 0.02;
        assert_ne!(base.hash(), agent.hash());
        assert_eq!(base.hash().len(), 64);
    }

    #[test]
    fn unknown_key_reports_its_line() {
        let src = "[env]\ndevices = 5\n\n[env.grid]\ncells_x = 11\ncolour = 3\n";
        let e = ExperimentConfig::parse(src, "exp.toml").unwrap_err();
        let msg = e.to_string();
        assert!(msg.starts_with("exp.toml:6:"), "{msg}");
        assert!(msg.contains("colour"), "{msg}");
    }

    #[test]
    fn semantic_error_reports_its_line() {
        let src = "[run]\nseed = 1\n\n[env.grid]\ncells_y = 11\ncells_x = 10\n";
        let e = ExperimentConfig::parse(src, "exp.toml").unwrap_err();
        assert_eq!(
            e.to_string(),
            "exp.toml:6: env.grid.cells_x: must be odd and positive, got 10"
        );
        let src = "[env]\ngrid.cells_x = 4\n";
        let e = ExperimentConfig::parse(src, "x").unwrap_err();
        assert!(e.to_string().starts_with("x:2: env.grid.cells_x"), "{e}");
    }

    #[test]
    fn type_errors_are_anchored() {
        let e = ExperimentConfig::parse("[run]\n\nmode = \"fly\"\n", "c").unwrap_err();
        assert!(e.to_string().starts_with("c:3:"), "{e}");
    }

    #[test]
    fn sweep_points() {
        let src = "[run]\nmode = \"sweep\"\n[sweep]\naxis = \"coverage_radius\"\nvalues = [100, 250.5]\n";
        let c = ExperimentConfig::parse(src, "t").unwrap();
        let s = c.sweep.clone().unwrap();
        let p = c.at_point(s.axis, &s.values[1]).unwrap();
        assert_eq!(p.env.radio.coverage_override_m, Some(250.5));
        assert!(p.sweep.is_none());

        let bad = "[run]\nmode = \"sweep\"\n[sweep]\naxis = \"device_count\"\nvalues = [2, 0]\n";
        let e = ExperimentConfig::parse(bad, "t").unwrap_err();
        assert!(e.to_string().starts_with("t:5: sweep.values"), "{e}");

        let models = "[sweep]\naxis = \"direction_model\"\nvalues = [\"five\", \"nine\"]\n";
        let c = ExperimentConfig::parse(models, "t").unwrap();
        let p = c
            .at_point(SweepAxis::DirectionModel, &SweepValue::Text("five".into()))
            .unwrap();
        assert_eq!(p.env.direction_model, DirectionModel::Five);

        let e = ExperimentConfig::parse("[run]\nmode = \"sweep\"\n", "t").unwrap_err();
        assert!(e.to_string().starts_with("t:2: run.mode"), "{e}");
    }

    #[test]
    fn mode_gate() {
        let c = ExperimentConfig::default();
        assert!(c.require_mode(&[Mode::Train]).is_ok());
        let e = c.require_mode(&[Mode::Sweep]).unwrap_err();
        assert!(matches!(e, ConfigError::ModeMismatch { .. }));
    }
}
