use super::grid::Grid1D;
use crate::error::{Error, Result};

/// The `+inf` sentinel. IEEE infinity absorbs under `min`/`max` and comparisons,
/// and any `inf - inf` shows up as NaN, which constructors reject.
pub const POS_INF: f64 = f64::INFINITY;

/// Extended-real grid function: finite values or `+inf` over the nodes of a grid.
///
/// The finite nodes always form one contiguous block.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtGridFn {
    grid: Grid1D,
    values: Vec<f64>,
}

impl ExtGridFn {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_nodes() {
            return Err(Error::InvalidFunction(format!(
                "expected {} values, got {}",
                grid.n_nodes(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return Err(Error::Undefined(format!("value at node {i} is {}", values[i])));
        }
        let first = values.iter().position(|v| v.is_finite()).ok_or(Error::EmptyDomain)?;
        let last = values.iter().rposition(|v| v.is_finite()).unwrap();
        if values[first..=last].iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction(
                "finite values must form a contiguous block".into(),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().into_iter().map(f).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// First and last finite node index.
    pub fn dom(&self) -> (usize, usize) {
        let first = self.values.iter().position(|v| v.is_finite()).unwrap();
        let last = self.values.iter().rposition(|v| v.is_finite()).unwrap();
        (first, last)
    }

    /// Endpoints of the effective domain in grid coordinates.
    pub fn dom_bounds(&self) -> (f64, f64) {
        let (a, b) = self.dom();
        (self.grid.node(a), self.grid.node(b))
    }

    pub fn is_finite_everywhere(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Largest finite magnitude, at least 1. Used to scale tolerances.
    pub fn scale(&self) -> f64 {
        self.values
            .iter()
            .filter(|v| v.is_finite())
            .fold(1.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Pointwise map over finite values; `+inf` stays `+inf`.
    pub fn map_finite(&self, f: impl Fn(usize, f64) -> f64) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| if v.is_finite() { f(i, v) } else { POS_INF })
            .collect();
        Self::new(self.grid, values)
    }

    pub fn add_const(&self, c: f64) -> Result<Self> {
        self.map_finite(|_, v| v + c)
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::Mismatch("grid functions live on different grids".into()));
        }
        Ok(())
    }

    pub fn pointwise_min(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.min(*b)).collect();
        Self::new(self.grid, values)
    }

    pub fn pointwise_max(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.max(*b)).collect();
        Self::new(self.grid, values)
    }

    /// `(1 - s) * self + s * other`, with `+inf` wherever either side is infinite.
    pub fn affine_combination(&self, other: &Self, s: f64) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| {
                if a.is_finite() && b.is_finite() {
                    if s == 0.0 {
                        *a
                    } else if s == 1.0 {
                        *b
                    } else {
                        (1.0 - s) * a + s * b
                    }
                } else {
                    POS_INF
                }
            })
            .collect();
        Self::new(self.grid, values)
    }

    /// Sup-norm distance over nodes where both are finite, `+inf` if the domains differ.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        let mut d = 0.0_f64;
        for (a, b) in self.values.iter().zip(&other.values) {
            match (a.is_finite(), b.is_finite()) {
                (true, true) => d = d.max((a - b).abs()),
                (false, false) => {}
                _ => return Ok(POS_INF),
            }
        }
        Ok(d)
    }

    /// Trapezoid integral over the grid; `+inf` if any node is infinite.
    pub fn trapezoid(&self) -> f64 {
        if !self.is_finite_everywhere() {
            return POS_INF;
        }
        let h = self.grid.spacing();
        let n = self.values.len();
        let inner: f64 = self.values[1..n - 1].iter().sum();
        h * (inner + 0.5 * (self.values[0] + self.values[n - 1]))
    }

    /// Linear interpolation between nodes; `+inf` on cells touching an infinite node.
    pub fn interpolate(&self, x: f64) -> f64 {
        let g = &self.grid;
        if x < g.lo() || x > g.hi() {
            return POS_INF;
        }
        let h = g.spacing();
        let s = ((x - g.lo()) / h).min(g.n_cells() as f64);
        let i = (s.floor() as usize).min(g.n_cells() - 1);
        let w = s - i as f64;
        let (a, b) = (self.values[i], self.values[i + 1]);
        if w == 0.0 {
            return a;
        }
        if w == 1.0 {
            return b;
        }
        if !(a.is_finite() && b.is_finite()) {
            return POS_INF;
        }
        (1.0 - w) * a + w * b
    }
}
