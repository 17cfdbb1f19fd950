use std::fmt;

use serde::{Deserialize, Serialize};

use super::EnvError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    North,
    South,
    East,
    West,
    NorthEast,
    NorthWest,
    SouthEast,
    SouthWest,
    Hover,
}

impl Direction {
    /// Cell offset `(dx, dy)` for one slot.
    pub fn delta(self) -> (i32, i32) {
        match self {
            Direction::North => (0, 1),
            Direction::South => (0, -1),
            Direction::East => (1, 0),
            Direction::West => (-1, 0),
            Direction::NorthEast => (1, 1),
            Direction::NorthWest => (-1, 1),
            Direction::SouthEast => (1, -1),
            Direction::SouthWest => (-1, -1),
            Direction::Hover => (0, 0),
        }
    }

    pub fn is_diagonal(self) -> bool {
        matches!(
            self,
            Direction::NorthEast | Direction::NorthWest | Direction::SouthEast | Direction::SouthWest
        )
    }
}

const FIVE: [Direction; 5] = [
    Direction::North,
    Direction::South,
    Direction::East,
    Direction::West,
    Direction::Hover,
];

const NINE: [Direction; 9] = [
    Direction::North,
    Direction::South,
    Direction::East,
    Direction::West,
    Direction::NorthEast,
    Direction::NorthWest,
    Direction::SouthEast,
    Direction::SouthWest,
    Direction::Hover,
];

/// Movement action set: cardinal moves plus hover, optionally with diagonals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionModel {
    Five,
    Nine,
}

impl DirectionModel {
    pub fn directions(self) -> &'static [Direction] {
        match self {
            DirectionModel::Five => &FIVE,
            DirectionModel::Nine => &NINE,
        }
    }

    pub fn allows(self, d: Direction) -> bool {
        self == DirectionModel::Nine || !d.is_diagonal()
    }

    /// Tag stored in checkpoints.
    pub fn tag(self) -> u8 {
        match self {
            DirectionModel::Five => 5,
            DirectionModel::Nine => 9,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            5 => Some(DirectionModel::Five),
            9 => Some(DirectionModel::Nine),
            _ => None,
        }
    }
}

impl fmt::Display for DirectionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DirectionModel::Five => f.write_str("five"),
            DirectionModel::Nine => f.write_str("nine"),
        }
    }
}

/// One UAV's move and scheduled device; `schedule == 0` schedules nobody.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct UavAction {
    pub direction: Direction,
    pub schedule: usize,
}

impl UavAction {
    pub fn new(direction: Direction, schedule: usize) -> Self {
        Self { direction, schedule }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JointAction {
    pub per_uav: Vec<UavAction>,
}

impl JointAction {
    pub fn new(per_uav: Vec<UavAction>) -> Self {
        Self { per_uav }
    }
}

/// Flattening between joint actions and a single network-head index.
///
/// A UAV's own action is `direction_index * (D + 1) + schedule`; the joint
/// index is the mixed-radix number with UAV 0 as the least significant digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActionSpace {
    pub model: DirectionModel,
    pub uavs: usize,
    pub devices: usize,
}

impl ActionSpace {
    pub fn new(model: DirectionModel, uavs: usize, devices: usize) -> Self {
        Self { model, uavs, devices }
    }

    pub fn per_uav(&self) -> usize {
        self.model.directions().len() * (self.devices + 1)
    }

    pub fn len(&self) -> usize {
        self.per_uav().pow(self.uavs as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn encode_uav(&self, a: UavAction) -> Result<usize, EnvError> {
        let dir = self
            .model
            .directions()
            .iter()
            .position(|&d| d == a.direction)
            .ok_or_else(|| {
                EnvError::IllegalAction(format!("{:?} not allowed under the {} model", a.direction, self.model))
            })?;
        if a.schedule > self.devices {
            return Err(EnvError::IllegalAction(format!(
                "schedule {} exceeds device count {}",
                a.schedule, self.devices
            )));
        }
        Ok(dir * (self.devices + 1) + a.schedule)
    }

    pub fn decode_uav(&self, index: usize) -> UavAction {
        let k = self.devices + 1;
        UavAction::new(self.model.directions()[index / k], index % k)
    }

    pub fn encode(&self, a: &JointAction) -> Result<usize, EnvError> {
        if a.per_uav.len() != self.uavs {
            return Err(EnvError::IllegalAction(format!(
                "expected {} UAV actions, got {}",
                self.uavs,
                a.per_uav.len()
            )));
        }
        let base = self.per_uav();
        let mut index = 0;
        for ua in a.per_uav.iter().rev() {
            index = index * base + self.encode_uav(*ua)?;
        }
        Ok(index)
    }

    pub fn decode(&self, index: usize) -> Result<JointAction, EnvError> {
        if index >= self.len() {
            return Err(EnvError::IllegalAction(format!(
                "joint index {index} out of range 0..{}",
                self.len()
            )));
        }
        let base = self.per_uav();
        let mut rest = index;
        let per_uav = (0..self.uavs)
            .map(|_| {
                let a = self.decode_uav(rest % base);
                rest /= base;
                a
            })
            .collect();
        Ok(JointAction { per_uav })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(ActionSpace::new(DirectionModel::Five, 1, 5).len(), 30);
        assert_eq!(ActionSpace::new(DirectionModel::Nine, 1, 10).len(), 99);
        assert_eq!(ActionSpace::new(DirectionModel::Nine, 2, 5).len(), 54 * 54);
    }

    #[test]
    fn round_trip_full_spaces() {
        for model in [DirectionModel::Five, DirectionModel::Nine] {
            for uavs in 1..=2 {
                for devices in 0..=10 {
                    let space = ActionSpace::new(model, uavs, devices);
                    for i in 0..space.len() {
                        let a = space.decode(i).unwrap();
                        assert_eq!(space.encode(&a).unwrap(), i);
                    }
                    assert!(space.decode(space.len()).is_err());
                }
            }
        }
    }

    #[test]
    fn diagonal_rejected_under_five() {
        let space = ActionSpace::new(DirectionModel::Five, 1, 3);
        let a = JointAction::new(vec![UavAction::new(Direction::NorthEast, 1)]);
        assert!(space.encode(&a).is_err());
        let a = JointAction::new(vec![UavAction::new(Direction::North, 4)]);
        assert!(space.encode(&a).is_err());
    }
}
