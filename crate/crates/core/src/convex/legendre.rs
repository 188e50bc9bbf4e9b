//! Discrete Legendre-Fenchel transforms of piecewise-affine data.
//!
//! Both directions act on the piecewise-linear interpolant of the samples, so
//! conjugates of piecewise-affine convex data are exact.

use super::envelope::lower_hull;
use super::extgrid::{ExtGridFn, POS_INF};
use super::grid::Grid1D;
use super::primal::{PrimalFunction, SlopeData, TOL_CONVEX};
use super::pwaffine::PwAffine;
use crate::error::{Error, Result};

/// Slack used when deciding whether a slope lies inside the tail range.
const SLOPE_EPS: f64 = 1e-12;

fn in_slope_range(p: f64, tails: SlopeData) -> bool {
    p >= tails.slope_left - SLOPE_EPS && p <= tails.slope_right + SLOPE_EPS
}

fn check_convex(f: &PrimalFunction) -> Result<()> {
    let defect = f.convexity_defect();
    let tol = TOL_CONVEX * f.scale();
    if defect > tol {
        return Err(Error::NotConvex { defect, tol });
    }
    Ok(())
}

/// `g(p) = sup_x (p x - f(x))` on the slope grid, by a linear-time merge.
///
/// For convex `f` the maximizing window node is non-decreasing in `p`; slopes
/// outside the tail range give `+inf`.
pub fn legendre(f: &PrimalFunction, target: &Grid1D) -> Result<ExtGridFn> {
    check_convex(f)?;
    let xs = f.window().nodes();
    Ok(conjugate_merge(&xs, f.values(), f.tails(), target))
}

/// Same transform by direct `O(N * M)` evaluation.
pub fn legendre_brute(f: &PrimalFunction, target: &Grid1D) -> Result<ExtGridFn> {
    check_convex(f)?;
    let xs = f.window().nodes();
    let values = target
        .nodes()
        .into_iter()
        .map(|p| {
            if !in_slope_range(p, f.tails()) {
                return POS_INF;
            }
            xs.iter()
                .zip(f.values())
                .map(|(x, v)| p * x - v)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    ExtGridFn::new(*target, values)
}

fn conjugate_merge(xs: &[f64], vals: &[f64], tails: SlopeData, target: &Grid1D) -> ExtGridFn {
    let mut i = 0;
    let values = target
        .nodes()
        .into_iter()
        .map(|p| {
            if !in_slope_range(p, tails) {
                return POS_INF;
            }
            while i + 1 < xs.len() && p * xs[i + 1] - vals[i + 1] >= p * xs[i] - vals[i] {
                i += 1;
            }
            p * xs[i] - vals[i]
        })
        .collect();
    ExtGridFn::new(*target, values).unwrap_or_else(|_| {
        // no slope of the target lies in the tail range
        ExtGridFn::new(*target, vec![POS_INF; target.n_nodes()]).unwrap()
    })
}

/// Conjugate of arbitrary (possibly non-convex) samples with affine tails.
///
/// The conjugate only sees the lower hull of the samples, so the merge runs
/// over hull vertices. Returns [`Error::EmptyDomain`] when no target slope
/// lies inside the tail range.
pub fn conjugate_of_samples(
    xs: &[f64],
    vals: &[f64],
    tails: SlopeData,
    target: &Grid1D,
) -> Result<ExtGridFn> {
    let hull = lower_hull(xs, vals);
    let hx: Vec<f64> = hull.iter().map(|&k| xs[k]).collect();
    let hv: Vec<f64> = hull.iter().map(|&k| vals[k]).collect();
    let out = conjugate_merge(&hx, &hv, tails, target);
    if out.values().iter().all(|v| !v.is_finite()) {
        return Err(Error::EmptyDomain);
    }
    Ok(out)
}

/// `f(x) = sup_p (p x - g(p))` sampled on `window`, with tails set from the
/// endpoints of `dom(g)`.
///
/// Non-convex `g` is allowed: the result is the conjugate of its closed convex
/// hull. An empty effective domain cannot be represented by [`ExtGridFn`].
pub fn legendre_inv(g: &ExtGridFn, window: &Grid1D) -> PrimalFunction {
    let f = PwAffine::from_dual(g);
    let values = f.eval_sorted(&window.nodes());
    let tails = SlopeData::new(f.slope_low(), f.slope_high()).expect("hull slopes are ordered");
    PrimalFunction::new_unchecked(*window, values, tails).expect("finite values")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::envelope::convex_envelope;

    fn window(l: f64, n: usize) -> Grid1D {
        Grid1D::window(l, n).unwrap()
    }

    fn primal(w: Grid1D, f: impl Fn(f64) -> f64, tails: (f64, f64)) -> PrimalFunction {
        let values = w.nodes().into_iter().map(f).collect();
        PrimalFunction::new(w, values, SlopeData::new(tails.0, tails.1).unwrap()).unwrap()
    }

    #[test]
    fn conjugate_of_absolute_value() {
        let f = primal(window(4.0, 64), f64::abs, (-1.0, 1.0));
        let target = Grid1D::new(-2.0, 2.0, 32).unwrap();
        let g = legendre(&f, &target).unwrap();
        for (j, p) in target.nodes().into_iter().enumerate() {
            if p.abs() <= 1.0 {
                assert_eq!(g.value(j), 0.0, "p={p}");
            } else {
                assert_eq!(g.value(j), POS_INF, "p={p}");
            }
        }
    }

    #[test]
    fn half_square_is_self_conjugate() {
        let w = window(10.0, 400);
        let h = w.spacing();
        let last = (10.0_f64 * 10.0 - (10.0 - h) * (10.0 - h)) / (2.0 * h);
        let f = primal(w, |x| 0.5 * x * x, (-last, last));
        let target = Grid1D::new(-5.0, 5.0, 100).unwrap();
        let g = legendre(&f, &target).unwrap();
        for (j, p) in target.nodes().into_iter().enumerate() {
            assert!((g.value(j) - 0.5 * p * p).abs() <= h * h, "p={p}");
        }
    }

    #[test]
    fn softplus_conjugate_is_entropy() {
        let w = window(40.0, 4096);
        let f = primal(w, |x| (1.0 + x.exp()).ln(), (0.0, 1.0));
        let target = Grid1D::unit(64).unwrap();
        let g = legendre(&f, &target).unwrap();
        // brute-force oracle: sup over a finer grid of the exact function
        let oracle = (0..=80_000)
            .map(|i| {
                let x = -40.0 + 1e-3 * i as f64;
                0.5 * x - (1.0 + x.exp()).ln()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((oracle + std::f64::consts::LN_2).abs() < 1e-6);
        assert!((g.value(32) - oracle).abs() < 1e-4);
    }

    #[test]
    fn fast_and_brute_agree() {
        let f = primal(window(6.0, 300), |x| (x - 0.7).abs() + 0.1 * x * x, (-2.3, 2.3));
        let target = Grid1D::new(-3.0, 3.0, 257).unwrap();
        let a = legendre(&f, &target).unwrap();
        let b = legendre_brute(&f, &target).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            if x.is_finite() {
                assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
            } else {
                assert_eq!(y, &POS_INF);
            }
        }
    }

    #[test]
    fn rejects_non_convex() {
        let w = window(2.0, 32);
        let values = w.nodes().into_iter().map(|x| -x * x).collect();
        let f = PrimalFunction::new_unchecked(w, values, SlopeData::new(-1.0, 1.0).unwrap()).unwrap();
        assert!(matches!(legendre(&f, &Grid1D::unit(8).unwrap()), Err(Error::NotConvex { .. })));
    }

    #[test]
    fn inverse_of_zero_on_interval_is_ramp() {
        let g = ExtGridFn::from_fn(Grid1D::unit(32).unwrap(), |_| 0.0).unwrap();
        let w = window(5.0, 100);
        let f = legendre_inv(&g, &w);
        for (i, x) in w.nodes().into_iter().enumerate() {
            assert_eq!(f.values()[i], x.max(0.0));
        }
        assert_eq!(f.tails(), SlopeData { slope_left: 0.0, slope_right: 1.0 });
    }

    #[test]
    fn inverse_of_single_slope_is_linear() {
        let grid = Grid1D::unit(32).unwrap();
        let g = ExtGridFn::from_fn(grid, |p| if (p - 0.25).abs() < 1e-12 { 0.0 } else { POS_INF })
            .unwrap();
        let w = window(3.0, 60);
        let f = legendre_inv(&g, &w);
        for (i, x) in w.nodes().into_iter().enumerate() {
            assert_eq!(f.values()[i], 0.25 * x);
        }
    }

    #[test]
    fn inverse_of_entropy_at_origin() {
        let grid = Grid1D::unit(1024).unwrap();
        let g0 = ExtGridFn::from_fn(grid, entropy).unwrap();
        let f0 = legendre_inv(&g0, &window(40.0, 4096));
        // direct sup evaluation at x = 0
        let direct = (0..=1024)
            .map(|j| -entropy(j as f64 / 1024.0))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((f0.values()[2048] - direct).abs() < 1e-15);
        assert!((direct - std::f64::consts::LN_2).abs() < 1e-6);
    }

    #[test]
    fn round_trip_gives_closed_hull() {
        // dyadic kinks on a bumped cone: the hull is the cone and every hull
        // slope is a window node, so the round trip is exact
        let grid = Grid1D::unit(32).unwrap();
        let v = ExtGridFn::new(
            grid,
            (0..=32)
                .map(|k| {
                    let cone = (k as f64 / 32.0 - 0.5).abs() * 0.75;
                    if k % 3 == 1 && k != 16 { cone + 0.125 * (k % 5) as f64 } else { cone }
                })
                .collect(),
        )
        .unwrap();
        let w = window(64.0, 1024);
        let back = legendre(&legendre_inv(&v, &w), &grid).unwrap();
        assert_eq!(back, convex_envelope(&v));
    }

    pub(crate) fn entropy(p: f64) -> f64 {
        let xlogx = |t: f64| if t <= 0.0 { 0.0 } else { t * t.ln() };
        xlogx(p) + xlogx(1.0 - p)
    }
}
