use serde::{Deserialize, Serialize};

use super::grid::Cell;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceState {
    /// 1-based device id; schedule value `id` targets this device.
    pub id: usize,
    pub cell: Cell,
    pub weight: f64,
    pub age: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UavState {
    pub id: usize,
    pub cell: Cell,
    pub battery: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub slot: u32,
    pub uavs: Vec<UavState>,
    pub devices: Vec<DeviceState>,
    pub depots: Vec<Cell>,
    pub terminal: bool,
}

/// The dynamic part of a [`WorldState`], usable as a hash key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateKey {
    pub slot: u32,
    pub uavs: Vec<(Cell, u32)>,
    pub ages: Vec<u32>,
}

impl WorldState {
    pub fn key(&self) -> StateKey {
        StateKey {
            slot: self.slot,
            uavs: self.uavs.iter().map(|u| (u.cell, u.battery)).collect(),
            ages: self.devices.iter().map(|d| d.age).collect(),
        }
    }

    /// `sum_d theta_d * A_d` for the current ages.
    pub fn weighted_age(&self) -> f64 {
        self.devices.iter().map(|d| d.weight * f64::from(d.age)).sum()
    }

    pub fn mean_battery(&self) -> f64 {
        self.uavs.iter().map(|u| f64::from(u.battery)).sum::<f64>() / self.uavs.len() as f64
    }
}
