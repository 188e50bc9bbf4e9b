use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest number of cells accepted for any grid.
pub const MIN_CELLS: usize = 8;

/// Uniform one-dimensional grid with `n_cells + 1` nodes on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    lo: f64,
    hi: f64,
    n_cells: usize,
}

impl Grid1D {
    pub fn new(lo: f64, hi: f64, n_cells: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::InvalidGrid(format!("need finite lo < hi, got [{lo}, {hi}]")));
        }
        if n_cells < MIN_CELLS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_CELLS} cells, got {n_cells}"
            )));
        }
        Ok(Self { lo, hi, n_cells })
    }

    /// Symmetric window `[-half_width, half_width]`.
    pub fn window(half_width: f64, n_cells: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n_cells)
    }

    /// The moment interval `[0, 1]`.
    pub fn unit(n_cells: usize) -> Result<Self> {
        Self::new(0.0, 1.0, n_cells)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / self.n_cells as f64
    }

    /// Position of node `i`. The last node is pinned to `hi` so both endpoints are exact.
    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        if i == self.n_cells {
            self.hi
        } else {
            self.lo + (i as f64) * self.spacing()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes()).map(|i| self.node(i)).collect()
    }

    /// Index of the first node at or above `x` (clamped to the grid).
    pub fn ceil_index(&self, x: f64) -> usize {
        if x <= self.lo {
            return 0;
        }
        let raw = ((x - self.lo) / self.spacing() - 1e-9).ceil();
        (raw.max(0.0) as usize).min(self.n_cells)
    }

    pub fn same_as(&self, other: &Grid1D) -> bool {
        self == other
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_reproducible() {
        let g = Grid1D::unit(1024).unwrap();
        assert_eq!(g.node(0), 0.0);
        assert_eq!(g.node(1024), 1.0);
        assert_eq!(g.node(512), 0.5);
        assert_eq!(g.node(3), 3.0 / 1024.0);
        let w = Grid1D::window(40.0, 4096).unwrap();
        assert_eq!(w.node(2048), 0.0);
        assert_eq!(w.node(4096), 40.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid1D::new(1.0, 0.0, 16).is_err());
        assert!(Grid1D::new(0.0, 1.0, 4).is_err());
        assert!(Grid1D::new(0.0, f64::INFINITY, 16).is_err());
    }

    #[test]
    fn ceil_index_snaps_to_nodes() {
        let g = Grid1D::unit(10).unwrap();
        assert_eq!(g.ceil_index(0.3), 3);
        assert_eq!(g.ceil_index(0.31), 4);
        assert_eq!(g.ceil_index(-1.0), 0);
        assert_eq!(g.ceil_index(2.0), 10);
    }
}
