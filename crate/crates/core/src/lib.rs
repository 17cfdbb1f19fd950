//! Multi-UAV age-of-information simulator, deep Q-network trajectory
//! planner, exact tiny-instance solvers and the experiment harness.

pub mod agents;
pub mod env;
pub mod experiments;
pub mod oracle;
