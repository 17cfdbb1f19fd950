use serde::{Deserialize, Serialize};

use super::EnvError;

/// Integer grid coordinates. `x` grows east, `y` grows north.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn chebyshev(self, other: Cell) -> u32 {
        (self.x - other.x).unsigned_abs().max((self.y - other.y).unsigned_abs())
    }

    pub fn manhattan(self, other: Cell) -> u32 {
        (self.x - other.x).unsigned_abs() + (self.y - other.y).unsigned_abs()
    }
}

/// Square lattice of cell centers with the base station above the center cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub cells_x: u32,
    pub cells_y: u32,
    pub spacing_m: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            cells_x: 11,
            cells_y: 11,
            spacing_m: 100.0,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), EnvError> {
        if self.cells_x == 0 || self.cells_x.is_multiple_of(2) || self.cells_y == 0 || self.cells_y.is_multiple_of(2) {
            return Err(EnvError::InvalidParameter(format!(
                "grid dimensions must be odd and positive, got {}x{}",
                self.cells_x, self.cells_y
            )));
        }
        if !(self.spacing_m.is_finite() && self.spacing_m > 0.0) {
            return Err(EnvError::InvalidParameter(format!(
                "grid spacing must be positive, got {}",
                self.spacing_m
            )));
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.cells_x as usize * self.cells_y as usize
    }

    pub fn center(&self) -> Cell {
        Cell::new(((self.cells_x - 1) / 2) as i32, ((self.cells_y - 1) / 2) as i32)
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.x >= 0 && cell.y >= 0 && (cell.x as u32) < self.cells_x && (cell.y as u32) < self.cells_y
    }

    /// World coordinates in meters, base station at the origin.
    pub fn world(&self, cell: Cell) -> (f64, f64) {
        let c = self.center();
        (
            f64::from(cell.x - c.x) * self.spacing_m,
            f64::from(cell.y - c.y) * self.spacing_m,
        )
    }

    /// Squared horizontal distance from the base station.
    pub fn dist2_to_bs(&self, cell: Cell) -> f64 {
        let (x, y) = self.world(cell);
        x * x + y * y
    }

    pub fn ground_distance(&self, a: Cell, b: Cell) -> f64 {
        let (ax, ay) = self.world(a);
        let (bx, by) = self.world(b);
        (ax - bx).hypot(ay - by)
    }

    /// Row-major index, `x` fastest.
    pub fn index(&self, cell: Cell) -> usize {
        cell.y as usize * self.cells_x as usize + cell.x as usize
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.cells_y as i32).flat_map(move |y| (0..self.cells_x as i32).map(move |x| Cell::new(x, y)))
    }

    /// The four corners in the order SW, SE, NW, NE.
    pub fn corners(&self) -> Vec<Cell> {
        let mx = self.cells_x as i32 - 1;
        let my = self.cells_y as i32 - 1;
        vec![Cell::new(0, 0), Cell::new(mx, 0), Cell::new(0, my), Cell::new(mx, my)]
    }

    /// Coordinates scaled to [0, 1] along each axis.
    pub fn normalized(&self, cell: Cell) -> (f64, f64) {
        let nx = if self.cells_x > 1 {
            f64::from(cell.x) / f64::from(self.cells_x - 1)
        } else {
            0.0
        };
        let ny = if self.cells_y > 1 {
            f64::from(cell.y) / f64::from(self.cells_y - 1)
        } else {
            0.0
        };
        (nx, ny)
    }
}
