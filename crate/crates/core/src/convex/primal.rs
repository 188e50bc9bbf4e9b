use super::envelope::second_difference_defect;
use super::grid::Grid1D;
use crate::error::{Error, Result};

/// Default relative tolerance for discrete convexity checks.
pub const TOL_CONVEX: f64 = 1e-9;

/// Asymptotic slopes of a primal function, left and right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeData {
    pub slope_left: f64,
    pub slope_right: f64,
}

impl SlopeData {
    pub fn new(slope_left: f64, slope_right: f64) -> Result<Self> {
        if !(slope_left.is_finite() && slope_right.is_finite()) || slope_left > slope_right {
            return Err(Error::InvalidFunction(format!(
                "tail slopes must satisfy left <= right, got ({slope_left}, {slope_right})"
            )));
        }
        Ok(Self { slope_left, slope_right })
    }
}

/// Convex function sampled on a window in the log coordinate, extended by
/// affine tails that are continuous at the window edges.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalFunction {
    window: Grid1D,
    values: Vec<f64>,
    tails: SlopeData,
    tail_offsets: [f64; 2],
}

impl PrimalFunction {
    /// Validates convexity of the window values and of both tail junctions.
    pub fn new(window: Grid1D, values: Vec<f64>, tails: SlopeData) -> Result<Self> {
        let f = Self::new_unchecked(window, values, tails)?;
        let defect = f.convexity_defect();
        let tol = TOL_CONVEX * f.scale();
        if defect > tol {
            return Err(Error::NotConvex { defect, tol });
        }
        Ok(f)
    }

    /// Builds without the convexity check; callers that want envelopes use this
    /// and compose with a convex envelope.
    pub fn new_unchecked(window: Grid1D, values: Vec<f64>, tails: SlopeData) -> Result<Self> {
        if values.len() != window.n_nodes() {
            return Err(Error::InvalidFunction(format!(
                "expected {} window values, got {}",
                window.n_nodes(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction("window values must be finite".into()));
        }
        let n = values.len() - 1;
        let tail_offsets = [
            values[0] - tails.slope_left * window.lo(),
            values[n] - tails.slope_right * window.hi(),
        ];
        Ok(Self { window, values, tails, tail_offsets })
    }

    pub fn window(&self) -> &Grid1D {
        &self.window
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tails(&self) -> SlopeData {
        self.tails
    }

    /// Intercepts of the affine tails: `f(x) = slope * x + offset` outside the window.
    pub fn tail_offsets(&self) -> [f64; 2] {
        self.tail_offsets
    }

    pub fn scale(&self) -> f64 {
        self.values.iter().fold(1.0_f64, |a, v| a.max(v.abs()))
    }

    /// Second-difference defect including the two tail junctions (scaled to
    /// second-difference units).
    pub fn convexity_defect(&self) -> f64 {
        let h = self.window.spacing();
        let n = self.values.len() - 1;
        let first = (self.values[1] - self.values[0]) / h;
        let last = (self.values[n] - self.values[n - 1]) / h;
        let left = (self.tails.slope_left - first) * h;
        let right = (last - self.tails.slope_right) * h;
        second_difference_defect(&self.values).max(left).max(right).max(0.0)
    }

    /// Largest gap between a declared tail slope and the discrete slope of the
    /// outermost window cell.
    pub fn tail_mismatch(&self) -> f64 {
        let h = self.window.spacing();
        let n = self.values.len() - 1;
        let first = (self.values[1] - self.values[0]) / h;
        let last = (self.values[n] - self.values[n - 1]) / h;
        (first - self.tails.slope_left).abs().max((last - self.tails.slope_right).abs())
    }

    /// Piecewise-linear evaluation with affine tails.
    pub fn eval(&self, x: f64) -> f64 {
        let w = &self.window;
        if x <= w.lo() {
            return self.tails.slope_left * x + self.tail_offsets[0];
        }
        if x >= w.hi() {
            return self.tails.slope_right * x + self.tail_offsets[1];
        }
        let s = (x - w.lo()) / w.spacing();
        let i = (s.floor() as usize).min(w.n_cells() - 1);
        let t = s - i as f64;
        (1.0 - t) * self.values[i] + t * self.values[i + 1]
    }
}
