//! Two-dimensional product grids over a box or the unit simplex.
//!
//! Only what the smoke tests need: a masked product grid, extended-real values
//! on it, and a convex envelope by directional sweeps.

use super::envelope::lower_hull;
use super::extgrid::POS_INF;
use super::grid::Grid1D;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain2 {
    Box,
    /// Nodes with `i + j <= n`, i.e. `x + y <= 1` on the unit square.
    Simplex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub x: Grid1D,
    pub y: Grid1D,
    pub domain: Domain2,
}

impl Grid2D {
    pub fn unit_simplex(n: usize) -> Result<Self> {
        let g = Grid1D::unit(n)?;
        Ok(Self { x: g, y: g, domain: Domain2::Simplex })
    }

    pub fn product(x: Grid1D, y: Grid1D) -> Self {
        Self { x, y, domain: Domain2::Box }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.x.n_nodes(), self.y.n_nodes())
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        match self.domain {
            Domain2::Box => true,
            Domain2::Simplex => i + j <= self.x.n_cells(),
        }
    }

    fn index(&self, i: usize, j: usize) -> usize {
        i * self.y.n_nodes() + j
    }
}

/// Extended-real values on a [`Grid2D`]; masked-out nodes hold `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtGridFn2 {
    grid: Grid2D,
    values: Vec<f64>,
}

impl ExtGridFn2 {
    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let (nx, ny) = grid.shape();
        let mut values = vec![POS_INF; nx * ny];
        for i in 0..nx {
            for j in 0..ny {
                if grid.contains(i, j) {
                    values[grid.index(i, j)] = f(grid.x.node(i), grid.y.node(j));
                }
            }
        }
        if values.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return Err(Error::Undefined("2D grid function has NaN or -inf".into()));
        }
        if !values.iter().any(|v| v.is_finite()) {
            return Err(Error::EmptyDomain);
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Area of the finite block, counting each finite cell corner with weight 1/4.
    pub fn domain_area(&self) -> f64 {
        let (nx, ny) = self.grid.shape();
        let cell = self.grid.x.spacing() * self.grid.y.spacing();
        let mut area = 0.0;
        for i in 0..nx - 1 {
            for j in 0..ny - 1 {
                let corners = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)];
                let finite = corners.iter().filter(|&&(a, b)| self.value(a, b).is_finite()).count();
                area += match finite {
                    4 => cell,
                    3 => 0.5 * cell,
                    _ => 0.0,
                };
            }
        }
        area
    }

    /// Largest violation of discrete convexity along rows, columns and both diagonals.
    pub fn convexity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for line in self.lines() {
            let vals: Vec<f64> = line.iter().map(|&k| self.values[k]).collect();
            for w in vals.windows(3) {
                if w.iter().all(|v| v.is_finite()) {
                    worst = worst.max(-(w[0] - 2.0 * w[1] + w[2]));
                }
            }
        }
        worst
    }

    /// Flat indices of every grid line in the four stencil directions, restricted
    /// to finite runs.
    fn lines(&self) -> Vec<Vec<usize>> {
        let (nx, ny) = self.grid.shape();
        let mut out = Vec::new();
        let mut push_run = |cells: Vec<(usize, usize)>| {
            let mut run = Vec::new();
            for (i, j) in cells {
                let k = self.grid.index(i, j);
                if self.values[k].is_finite() {
                    run.push(k);
                } else if !run.is_empty() {
                    out.push(std::mem::take(&mut run));
                }
            }
            if !run.is_empty() {
                out.push(run);
            }
        };
        for i in 0..nx {
            push_run((0..ny).map(|j| (i, j)).collect());
        }
        for j in 0..ny {
            push_run((0..nx).map(|i| (i, j)).collect());
        }
        for d in 0..nx + ny - 1 {
            // anti-diagonal i + j = d and diagonal i - j = d - (ny - 1)
            push_run((0..nx).filter(|&i| d >= i && d - i < ny).map(|i| (i, d - i)).collect());
            let off = d as isize - (ny as isize - 1);
            push_run(
                (0..nx)
                    .filter_map(|i| {
                        let j = i as isize - off;
                        (0..ny as isize).contains(&j).then_some((i, j as usize))
                    })
                    .collect(),
            );
        }
        out
    }
}

/// Iterated directional convexification to a fixed point.
///
/// Each sweep replaces the values on every grid line by their lower hull. The
/// values are non-increasing across sweeps. Stops when a sweep moves no value
/// by more than `1e-10`, or fails after `10 * n` sweeps.
pub fn convex_envelope_2d(v: &ExtGridFn2) -> Result<ExtGridFn2> {
    let mut cur = v.clone();
    let lines = v.lines();
    let h = v.grid.x.spacing().min(v.grid.y.spacing());
    let cap = 10 * v.grid.x.n_cells().max(v.grid.y.n_cells());
    for _ in 0..cap {
        let mut moved = 0.0_f64;
        for line in &lines {
            let xs: Vec<f64> = (0..line.len()).map(|k| k as f64 * h).collect();
            let ys: Vec<f64> = line.iter().map(|&k| cur.values[k]).collect();
            let hull = lower_hull(&xs, &ys);
            for w in hull.windows(2) {
                let (a, b) = (w[0], w[1]);
                for k in a + 1..b {
                    let t = (k - a) as f64 / (b - a) as f64;
                    let interp = (1.0 - t) * ys[a] + t * ys[b];
                    if interp < ys[k] {
                        moved = moved.max(ys[k] - interp);
                        cur.values[line[k]] = interp;
                    }
                }
            }
        }
        if moved <= 1e-10 {
            return Ok(cur);
        }
    }
    Err(Error::NotConverged(format!("2D envelope did not settle in {cap} sweeps")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_area_is_one_half() {
        let g = Grid2D::unit_simplex(32).unwrap();
        let f = ExtGridFn2::from_fn(g, |x, y| x * x + y * y).unwrap();
        assert!((f.domain_area() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn convex_data_is_a_fixed_point() {
        let g = Grid2D::unit_simplex(16).unwrap();
        let f = ExtGridFn2::from_fn(g, |x, y| (x - 0.2).powi(2) + x * y + y * y).unwrap();
        assert!(f.convexity_defect() < 1e-14);
        assert_eq!(convex_envelope_2d(&f).unwrap(), f);
    }

    #[test]
    fn envelope_of_bumpy_data_is_convex_and_below() {
        let g = Grid2D::product(Grid1D::unit(16).unwrap(), Grid1D::unit(16).unwrap());
        let f = ExtGridFn2::from_fn(g, |x, y| (7.0 * x).sin() * (5.0 * y).cos() + x * x).unwrap();
        assert!(f.convexity_defect() > 1e-3);
        let env = convex_envelope_2d(&f).unwrap();
        assert!(env.convexity_defect() < 1e-9);
        for i in 0..=16 {
            for j in 0..=16 {
                assert!(env.value(i, j) <= f.value(i, j));
            }
        }
    }
}
