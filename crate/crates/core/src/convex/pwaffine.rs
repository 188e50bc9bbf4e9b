//! Exact whole-line representation of the conjugate of a grid function.
//!
//! For a dual symbol `g` sampled on slope nodes, the conjugate of its
//! piecewise-linear interpolant is `f(x) = max_k (p_k x - g_k)`, a convex
//! piecewise-affine function on all of R. Only the lower-hull vertices of `g`
//! contribute, so the representation keeps those lines. Breakpoints, slope
//! jumps (the Monge-Ampere atoms) and asymptotes are then available in closed form.

use super::envelope::lower_hull;
use super::extgrid::ExtGridFn;

#[derive(Debug, Clone, PartialEq)]
pub struct PwAffine {
    slopes: Vec<f64>,
    duals: Vec<f64>,
    breaks: Vec<f64>,
}

impl PwAffine {
    pub fn from_dual(dual: &ExtGridFn) -> Self {
        let (first, last) = dual.dom();
        let grid = dual.grid();
        let xs: Vec<f64> = (first..=last).map(|i| grid.node(i)).collect();
        let ys = &dual.values()[first..=last];
        let hull = lower_hull(&xs, ys);
        let slopes: Vec<f64> = hull.iter().map(|&k| xs[k]).collect();
        let duals: Vec<f64> = hull.iter().map(|&k| ys[k]).collect();
        Self::from_lines(slopes, duals)
    }

    /// Build from lines `x -> p_k x - g_k` that are already lower-hull vertices.
    fn from_lines(slopes: Vec<f64>, duals: Vec<f64>) -> Self {
        let breaks = slopes
            .windows(2)
            .zip(duals.windows(2))
            .map(|(p, g)| (g[1] - g[0]) / (p[1] - p[0]))
            .collect();
        Self { slopes, duals, breaks }
    }

    pub fn n_lines(&self) -> usize {
        self.slopes.len()
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Kink locations, increasing.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    /// `(location, mass)` of each atom of `f''`; masses sum to the slope range.
    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.breaks
            .iter()
            .zip(self.slopes.windows(2))
            .map(|(&x, p)| (x, p[1] - p[0]))
    }

    pub fn slope_low(&self) -> f64 {
        self.slopes[0]
    }

    pub fn slope_high(&self) -> f64 {
        *self.slopes.last().unwrap()
    }

    /// Intercept of the asymptote at `-inf`: `f(x) - slope_low * x` for `x` left of every kink.
    pub fn intercept_low(&self) -> f64 {
        -self.duals[0]
    }

    pub fn intercept_high(&self) -> f64 {
        -*self.duals.last().unwrap()
    }

    fn line(&self, k: usize, x: f64) -> f64 {
        self.slopes[k] * x - self.duals[k]
    }

    /// Index of the line active at `x`.
    pub fn active_line(&self, x: f64) -> usize {
        self.breaks.partition_point(|&b| b < x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.active_line(x);
        let mut v = self.line(k, x);
        if k > 0 {
            v = v.max(self.line(k - 1, x));
        }
        if k + 1 < self.n_lines() {
            v = v.max(self.line(k + 1, x));
        }
        v
    }

    /// Slope of the active line at `x` (right derivative at kinks).
    pub fn slope_at(&self, x: f64) -> f64 {
        self.slopes[self.breaks.partition_point(|&b| b <= x)]
    }

    /// Evaluate at increasing abscissae in one merge pass.
    pub fn eval_sorted(&self, xs: &[f64]) -> Vec<f64> {
        let mut k = 0;
        xs.iter()
            .map(|&x| {
                while k < self.breaks.len() && self.breaks[k] < x {
                    k += 1;
                }
                let mut v = self.line(k, x);
                if k > 0 {
                    v = v.max(self.line(k - 1, x));
                }
                v
            })
            .collect()
    }

    /// Smallest `L` such that `[-L, L]` contains every kink.
    pub fn required_half_width(&self) -> f64 {
        self.breaks.iter().fold(0.0_f64, |acc, b| acc.max(b.abs()))
    }
}

/// Limit of `a - b` as `x -> -inf`.
fn limit_low(a: &PwAffine, b: &PwAffine) -> f64 {
    use std::cmp::Ordering::*;
    match a.slope_low().partial_cmp(&b.slope_low()).unwrap() {
        Greater => f64::NEG_INFINITY,
        Less => f64::INFINITY,
        Equal => a.intercept_low() - b.intercept_low(),
    }
}

/// Limit of `a - b` as `x -> +inf`.
fn limit_high(a: &PwAffine, b: &PwAffine) -> f64 {
    use std::cmp::Ordering::*;
    match a.slope_high().partial_cmp(&b.slope_high()).unwrap() {
        Greater => f64::INFINITY,
        Less => f64::NEG_INFINITY,
        Equal => a.intercept_high() - b.intercept_high(),
    }
}

/// Exact `(inf, sup)` of `a - b` over the whole real line.
///
/// The difference is piecewise affine with kinks among the kinks of `a` and
/// `b`, so the extrema are attained at a kink or approached at infinity.
pub fn difference_extrema(a: &PwAffine, b: &PwAffine) -> (f64, f64) {
    let mut xs: Vec<f64> = a.breakpoints().iter().chain(b.breakpoints()).copied().collect();
    xs.sort_by(|u, v| u.partial_cmp(v).unwrap());
    let va = a.eval_sorted(&xs);
    let vb = b.eval_sorted(&xs);
    let lo = limit_low(a, b);
    let hi = limit_high(a, b);
    let mut inf = lo.min(hi);
    let mut sup = lo.max(hi);
    for (u, v) in va.iter().zip(&vb) {
        let d = u - v;
        inf = inf.min(d);
        sup = sup.max(d);
    }
    (inf, sup)
}
