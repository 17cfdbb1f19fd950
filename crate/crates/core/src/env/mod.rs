//! Discrete-time multi-UAV relay environment: grid geometry, rotor and radio
//! energy, age-of-information bookkeeping, reward and episode lifecycle.

mod action;
mod grid;
mod params;
pub mod physics;
mod state;
mod world;

pub use action::{ActionSpace, Direction, DirectionModel, JointAction, UavAction};
pub use grid::{Cell, GridSpec};
pub use params::{db_to_linear, dbm_to_watts, EnergyParams, RadioParams};
pub use physics::{channel_gain, coverage_radius, flight_energy_quanta, relay_energy_quanta, rotor_power};
pub use state::{DeviceState, StateKey, UavState, WorldState};
pub use world::{age_step, battery_step, team_reward, EnvConfig, Environment, StepOutcome};

#[derive(Debug, thiserror::Error)]
pub enum EnvError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("radio parameters give no ground coverage (link budget {link} below h_u^2 = {floor})")]
    ZeroCoverage { link: f64, floor: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("step called on a terminal state")]
    TerminalState,
    #[error("illegal action: {0}")]
    IllegalAction(String),
}
