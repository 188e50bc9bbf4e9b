//! Largest convex minorants and convexity diagnostics for grid functions.

use super::extgrid::{ExtGridFn, POS_INF};

/// Indices of the lower convex hull vertices of the points `(xs[i], ys[i])`.
///
/// `xs` must be strictly increasing. Collinear middle points are dropped, so
/// consecutive returned vertices have strictly increasing slopes.
pub fn lower_hull(xs: &[f64], ys: &[f64]) -> Vec<usize> {
    debug_assert_eq!(xs.len(), ys.len());
    let mut hull: Vec<usize> = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // drop b unless it lies strictly below the chord a -> i
            let lhs = (ys[b] - ys[a]) * (xs[i] - xs[a]);
            let rhs = (ys[i] - ys[a]) * (xs[b] - xs[a]);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

/// Discrete largest convex minorant.
///
/// Lower hull of the finite graph points, evaluated at every node of the
/// finite block. Nodes on the hull keep their original value bit-for-bit,
/// which makes the operation idempotent.
pub fn convex_envelope(v: &ExtGridFn) -> ExtGridFn {
    let grid = *v.grid();
    let (first, last) = v.dom();
    let xs: Vec<f64> = (first..=last).map(|i| grid.node(i)).collect();
    let ys = &v.values()[first..=last];
    let hull = lower_hull(&xs, ys);
    let mut out = vec![POS_INF; grid.n_nodes()];
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        let slope = (ys[b] - ys[a]) / (xs[b] - xs[a]);
        out[first + a] = ys[a];
        for k in a + 1..b {
            let interp = ys[a] + slope * (xs[k] - xs[a]);
            out[first + k] = interp.min(ys[k]);
        }
    }
    let tail = *hull.last().unwrap();
    out[first + tail] = ys[tail];
    ExtGridFn::new(grid, out).expect("envelope of a valid grid function is valid")
}

/// Largest violation of discrete convexity: `max(0, -(v[i-1] - 2 v[i] + v[i+1]))`
/// over interior nodes of the finite block. Zero iff the data is discretely convex.
pub fn convexity_defect(v: &ExtGridFn) -> f64 {
    second_difference_defect(&v.values()[v.dom().0..=v.dom().1])
}

/// Same as [`convexity_defect`] for a plain finite slice.
pub fn second_difference_defect(values: &[f64]) -> f64 {
    values
        .windows(3)
        .map(|w| -(w[0] - 2.0 * w[1] + w[2]))
        .fold(0.0_f64, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::grid::Grid1D;

    #[test]
    fn convex_input_is_unchanged() {
        let g = Grid1D::new(-3.0, 3.0, 60).unwrap();
        let v = ExtGridFn::from_fn(g, |x| x * x + 0.5 * x).unwrap();
        assert_eq!(convex_envelope(&v), v);
        assert_eq!(convexity_defect(&v), 0.0);
    }

    #[test]
    fn double_well_becomes_flat_bottom() {
        // lower-hull oracle: the graph points of min(|x-1|, |x+1|) whose hull is max(|x|-1, 0)
        let g = Grid1D::new(-3.0, 3.0, 60).unwrap();
        let v = ExtGridFn::from_fn(g, |x| (x - 1.0).abs().min((x + 1.0).abs())).unwrap();
        let env = convex_envelope(&v);
        for (i, x) in g.nodes().into_iter().enumerate() {
            let expected = (x.abs() - 1.0).max(0.0);
            assert!((env.value(i) - expected).abs() < 1e-12, "x={x}");
        }
        assert!(convexity_defect(&env) < 1e-14);
    }

    #[test]
    fn defect_of_concave_parabola() {
        let g = Grid1D::new(-1.0, 1.0, 16).unwrap();
        let h = g.spacing();
        let v = ExtGridFn::from_fn(g, |x| -x * x).unwrap();
        assert!((convexity_defect(&v) - 2.0 * h * h).abs() < 1e-14);
        let affine = ExtGridFn::from_fn(g, |x| 3.0 * x - 1.0).unwrap();
        assert!(convexity_defect(&affine) < 1e-14);
    }

    #[test]
    fn envelope_respects_infinite_block() {
        let g = Grid1D::unit(10).unwrap();
        let v = ExtGridFn::from_fn(g, |p| if p < 0.25 { POS_INF } else { (p - 0.6).abs().sqrt() })
            .unwrap();
        let env = convex_envelope(&v);
        assert_eq!(env.dom(), v.dom());
        for i in 0..=10 {
            assert!(env.value(i) <= v.value(i));
        }
    }
}
