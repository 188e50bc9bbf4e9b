//! Weak geodesic segments, their difference quotients and normalization.
//!
//! In the toric model a geodesic is affine in the symbol:
//! `g_t = (1 - t) g_0 + t g_1`. The Perron envelope of the two endpoint
//! primals is computed independently by [`hcma_oracle`].

use crate::convex::{ExtGridFn, Grid1D, PrimalFunction};
use crate::error::{Error, Result};
use crate::toric::{toric_max, ToricPotential};

/// Default number of time samples on a segment.
pub const DEFAULT_T_SAMPLES: usize = 33;

/// `n` uniform samples on `[a, b]`, endpoints exact.
pub fn uniform_samples(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
        .collect()
}

/// Potentials sampled along a path, with cached quotient statistics.
#[derive(Debug, Clone)]
pub struct GeodesicPath {
    t: Vec<f64>,
    pots: Vec<ToricPotential>,
    m: f64,
    big_m: f64,
}

impl GeodesicPath {
    /// `t` must be strictly increasing with one potential per sample.
    pub fn from_samples(t: Vec<f64>, pots: Vec<ToricPotential>) -> Result<Self> {
        if t.len() != pots.len() || t.len() < 2 {
            return Err(Error::Mismatch(format!(
                "{} samples for {} potentials (need at least 2)",
                t.len(),
                pots.len()
            )));
        }
        if t.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Precondition("time samples must increase".into()));
        }
        for p in &pots[1..] {
            pots[0].check_same(p)?;
        }
        let mut path = Self { t, pots, m: 0.0, big_m: 0.0 };
        let (mut m, mut big_m) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 1..path.t.len() {
            let (lo, hi) = path.quotients_at(k - 1, k);
            m = m.min(lo);
            big_m = big_m.max(hi);
        }
        path.m = m;
        path.big_m = big_m;
        Ok(path)
    }

    pub fn t_samples(&self) -> &[f64] {
        &self.t
    }

    pub fn potentials(&self) -> &[ToricPotential] {
        &self.pots
    }

    pub fn duals(&self) -> impl Iterator<Item = &ExtGridFn> {
        self.pots.iter().map(|p| p.dual())
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Smallest inf-quotient over adjacent samples.
    pub fn m(&self) -> f64 {
        self.m
    }

    /// Largest sup-quotient over adjacent samples.
    pub fn big_m(&self) -> f64 {
        self.big_m
    }

    pub fn start(&self) -> &ToricPotential {
        &self.pots[0]
    }

    pub fn end(&self) -> &ToricPotential {
        self.pots.last().unwrap()
    }

    fn index_of(&self, t: f64) -> Result<usize> {
        self.t
            .iter()
            .position(|&s| (s - t).abs() <= 1e-12 * t.abs().max(1.0))
            .ok_or_else(|| Error::Precondition(format!("t = {t} is not a sample of the path")))
    }

    fn quotients_at(&self, i: usize, j: usize) -> (f64, f64) {
        let (inf, sup) = self.pots[i].difference_extrema(&self.pots[j]);
        let dt = self.t[i] - self.t[j];
        if dt > 0.0 {
            (inf / dt, sup / dt)
        } else {
            (sup / dt, inf / dt)
        }
    }

    /// `(inf, sup)` over the orbit of `(u_a - u_b) / (a - b)`.
    pub fn diff_quotients(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        if a == b {
            return Err(Error::Precondition("difference quotient needs a != b".into()));
        }
        let i = self.index_of(a)?;
        let j = self.index_of(b)?;
        Ok(self.quotients_at(i, j))
    }

    /// Quotients for every sample pair `(t_i, t_j)`, `i < j`.
    pub fn all_quotients(&self) -> Vec<(f64, f64, f64, f64)> {
        let mut out = Vec::new();
        for i in 0..self.t.len() {
            for j in i + 1..self.t.len() {
                let (lo, hi) = self.quotients_at(i, j);
                out.push((self.t[i], self.t[j], lo, hi));
            }
        }
        out
    }

    /// Largest spread of inf-quotients and of sup-quotients over all pairs.
    pub fn quotient_spread(&self) -> (f64, f64) {
        let q = self.all_quotients();
        let spread = |f: fn(&(f64, f64, f64, f64)) -> f64| {
            let lo = q.iter().map(f).fold(f64::INFINITY, f64::min);
            let hi = q.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        };
        (spread(|r| r.2), spread(|r| r.3))
    }

    /// Worst excess of `|u_t - u_s|` over `(max(|M|, |m|) + slack) |t - s|` at
    /// window nodes, over all sample pairs.
    pub fn lipschitz_excess(&self, window: &Grid1D, slack: f64) -> f64 {
        let vals: Vec<Vec<f64>> = self.pots.iter().map(|p| p.tilde_on(window)).collect();
        let k = self.big_m.abs().max(self.m.abs()) + slack;
        let mut worst = f64::NEG_INFINITY;
        for i in 0..vals.len() {
            for j in i + 1..vals.len() {
                let bound = k * (self.t[j] - self.t[i]);
                let d = vals[i].iter().zip(&vals[j]).fold(0.0_f64, |a, (x, y)| a.max((x - y).abs()));
                worst = worst.max(d - bound);
            }
        }
        worst
    }

    /// AM at each sample (bounded paths only).
    pub fn energies(&self) -> Result<Vec<f64>> {
        self.pots.iter().map(crate::energy::am).collect()
    }

    /// Largest deviation of `t -> am(u_t)` from the chord through its endpoints.
    pub fn am_chord_deviation(&self) -> Result<Vec<f64>> {
        let e = self.energies()?;
        let (t0, t1) = (self.t[0], *self.t.last().unwrap());
        let (e0, e1) = (e[0], *e.last().unwrap());
        Ok(self
            .t
            .iter()
            .zip(&e)
            .map(|(&t, &v)| v - (e0 + (e1 - e0) * (t - t0) / (t1 - t0)))
            .collect())
    }

    /// Restriction of the path to the samples `i..=j`.
    pub fn restrict(&self, i: usize, j: usize) -> Result<Self> {
        Self::from_samples(self.t[i..=j].to_vec(), self.pots[i..=j].to_vec())
    }
}

/// Symbol of the geodesic at time `s in [0, 1]` between two symbols.
pub fn interpolate(phi0: &ToricPotential, phi1: &ToricPotential, s: f64) -> Result<ToricPotential> {
    let dual = phi0.dual().affine_combination(phi1.dual(), s)?;
    ToricPotential::new(phi0.geom().clone(), dual)
}

/// Geodesic from `phi0` at `t = 0` to `phi1` at `t = 1`, sampled at `t_samples`.
pub fn segment(phi0: &ToricPotential, phi1: &ToricPotential, t_samples: &[f64]) -> Result<GeodesicPath> {
    segment_on(phi0, phi1, 0.0, 1.0, t_samples)
}

/// Geodesic from `phi0` at `alpha` to `phi1` at `beta`.
pub fn segment_on(
    phi0: &ToricPotential,
    phi1: &ToricPotential,
    alpha: f64,
    beta: f64,
    t_samples: &[f64],
) -> Result<GeodesicPath> {
    phi0.check_same(phi1)?;
    if !(phi0.is_bounded() && phi1.is_bounded()) {
        return Err(Error::Unbounded);
    }
    if !(alpha < beta) {
        return Err(Error::Precondition(format!("need alpha < beta, got [{alpha}, {beta}]")));
    }
    let pots = t_samples
        .iter()
        .map(|&t| {
            if !(alpha..=beta).contains(&t) {
                return Err(Error::Precondition(format!("t = {t} outside [{alpha}, {beta}]")));
            }
            interpolate(phi0, phi1, (t - alpha) / (beta - alpha))
        })
        .collect::<Result<Vec<_>>>()?;
    GeodesicPath::from_samples(t_samples.to_vec(), pots)
}

/// Primal values of the Perron envelope on a `(t, x)` grid.
#[derive(Debug, Clone)]
pub struct HcmaSolution {
    pub t_samples: Vec<f64>,
    pub window: Grid1D,
    /// `values[k][i]` is the primal `f` at `(t_k, x_i)`.
    pub values: Vec<Vec<f64>>,
}

impl HcmaSolution {
    /// Max over the `(t, x)` grid of `|F - f_t|` for a path sampled at the same times.
    pub fn distance_to(&self, path: &GeodesicPath) -> Result<f64> {
        if path.t_samples() != self.t_samples.as_slice() {
            return Err(Error::Mismatch("oracle and path use different time samples".into()));
        }
        let xs = self.window.nodes();
        let mut d = 0.0_f64;
        for (row, pot) in self.values.iter().zip(path.potentials()) {
            let exact = pot.primal().eval_sorted(&xs);
            for (a, b) in row.iter().zip(&exact) {
                d = d.max((a - b).abs());
            }
        }
        Ok(d)
    }
}

/// Largest function jointly convex in `(t, x)` with boundary data `f_0`, `f_1`.
///
/// The envelope is the weighted infimal convolution
/// `F(t, x) = min_y (1 - t) f_0(y) + t f_1((x - (1 - t) y) / t)`.
/// The minimum runs over window nodes `y` with the endpoint primals
/// interpolated from their window samples. The objective is convex in `y`,
/// so each value is a binary search.
pub fn hcma_oracle(
    phi0: &ToricPotential,
    phi1: &ToricPotential,
    t_samples: &[f64],
    window: &Grid1D,
) -> Result<HcmaSolution> {
    phi0.check_same(phi1)?;
    if !(phi0.is_bounded() && phi1.is_bounded()) {
        return Err(Error::Unbounded);
    }
    if t_samples.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(Error::Precondition("oracle times must lie in [0, 1]".into()));
    }
    let f0 = phi0.primal_unchecked(window);
    let f1 = phi1.primal_unchecked(window);
    let xs = window.nodes();
    let values = t_samples
        .iter()
        .map(|&t| {
            if t == 0.0 {
                return f0.values().to_vec();
            }
            if t == 1.0 {
                return f1.values().to_vec();
            }
            xs.iter().map(|&x| inf_convolution(&f0, &f1, &xs, t, x)).collect()
        })
        .collect();
    Ok(HcmaSolution { t_samples: t_samples.to_vec(), window: *window, values })
}

fn inf_convolution(f0: &PrimalFunction, f1: &PrimalFunction, ys: &[f64], t: f64, x: f64) -> f64 {
    let obj = |j: usize| {
        let y = ys[j];
        (1.0 - t) * f0.values()[j] + t * f1.eval((x - (1.0 - t) * y) / t)
    };
    // first j where the objective stops decreasing
    let (mut lo, mut hi) = (0, ys.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if obj(mid + 1) < obj(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    obj(lo)
}

/// Reparametrized path with `M = 0, m = -1`.
///
/// Constant paths come back unchanged. A path with `M = m` (affine in time)
/// is rescaled to slope `-1`.
pub fn normalize(path: &GeodesicPath, resolution: f64) -> Result<GeodesicPath> {
    let (m, big_m) = (path.m(), path.big_m());
    let alpha = path.t_samples()[0];
    if big_m.abs() <= resolution && m.abs() <= resolution {
        return Ok(path.clone());
    }
    if big_m - m <= resolution {
        if big_m > 0.0 {
            return Err(Error::Precondition("increasing affine path cannot be normalized".into()));
        }
        // u_alpha + M (t - alpha): rescale time by |M|
        let t: Vec<f64> = path.t_samples().iter().map(|&s| alpha + (s - alpha) * big_m.abs()).collect();
        return GeodesicPath::from_samples(t, path.potentials().to_vec());
    }
    if big_m - m < 2.0 * resolution {
        return Err(Error::Precondition(format!(
            "M - m = {:.3e} is below the grid resolution",
            big_m - m
        )));
    }
    let scale = big_m - m;
    let mut t = Vec::with_capacity(path.len());
    let mut pots = Vec::with_capacity(path.len());
    for (&s, pot) in path.t_samples().iter().zip(path.potentials()) {
        t.push(alpha + (s - alpha) * scale);
        pots.push(pot.shift(-big_m * (s - alpha)));
    }
    GeodesicPath::from_samples(t, pots)
}

/// `gamma_t = max(phi - t, psi)`; requires `psi <= phi`.
pub fn subgeodesic_gamma(phi: &ToricPotential, psi: &ToricPotential, t: f64) -> Result<ToricPotential> {
    check_ordered(psi, phi)?;
    toric_max(&phi.shift(-t), psi)
}

pub(crate) fn check_ordered(lower: &ToricPotential, upper: &ToricPotential) -> Result<()> {
    lower.check_same(upper)?;
    let (_, sup) = lower.difference_extrema(upper);
    if sup > 1e-9 {
        return Err(Error::Precondition(format!("expected psi <= phi, but sup(psi - phi) = {sup:.3e}")));
    }
    Ok(())
}

/// `inf (u_eps - u_0) / eps` for the segment `phi0 -> phi1` and the target
/// `inf(phi1 - phi0)`.
pub fn endpoint_slope_inf(phi0: &ToricPotential, phi1: &ToricPotential, eps: f64) -> Result<(f64, f64)> {
    let u = interpolate(phi0, phi1, eps)?;
    let (inf, _) = u.difference_extrema(phi0);
    Ok((inf / eps, phi1.difference_extrema(phi0).0))
}

/// `sup (u_1 - u_{1-eps}) / eps` and the target `sup(phi1 - phi0)`.
pub fn endpoint_slope_sup(phi0: &ToricPotential, phi1: &ToricPotential, eps: f64) -> Result<(f64, f64)> {
    let u = interpolate(phi0, phi1, 1.0 - eps)?;
    let (_, sup) = phi1.difference_extrema(&u);
    Ok((sup / eps, phi1.difference_extrema(phi0).1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::{ToricGeometry, Zoo};

    fn geom() -> std::sync::Arc<ToricGeometry> {
        ToricGeometry::new(256, 40.0, 1024).unwrap()
    }

    #[test]
    fn constant_and_linear_segments() {
        let g = geom();
        let z = Zoo::Zero.potential(&g).unwrap();
        let t = uniform_samples(0.0, 1.0, 9);
        let c = segment(&z, &z, &t).unwrap();
        assert!(c.m().abs() < 1e-12 && c.big_m().abs() < 1e-12);
        let b = Zoo::Bump(5).potential(&g).unwrap();
        let lin = segment(&b, &b.shift(-1.0), &t).unwrap();
        assert!((lin.m() + 1.0).abs() < 1e-12 && (lin.big_m() + 1.0).abs() < 1e-12);
        let (lo, hi) = lin.diff_quotients(0.25, 0.75).unwrap();
        assert!((lo + 1.0).abs() < 1e-12 && (hi + 1.0).abs() < 1e-12);
        assert!(lin.diff_quotients(0.5, 0.5).is_err());
        assert!(lin.diff_quotients(0.3, 0.5).is_err());
    }

    #[test]
    fn segment_energy_is_affine() {
        let g = geom();
        let a = Zoo::Bump(1).potential(&g).unwrap();
        let b = Zoo::Bump(2).potential(&g).unwrap();
        let p = segment(&a, &b, &uniform_samples(0.0, 1.0, 33)).unwrap();
        let dev = p.am_chord_deviation().unwrap();
        assert!(dev.iter().all(|d| d.abs() < 1e-12));
    }

    #[test]
    fn oracle_matches_affine_in_time_data() {
        let g = geom();
        let b = Zoo::Bump(3).potential(&g).unwrap();
        let t = uniform_samples(0.0, 1.0, 5);
        let p = segment(&b, &b.shift(-1.0), &t).unwrap();
        let o = hcma_oracle(&b, &b.shift(-1.0), &t, g.window()).unwrap();
        assert!(o.distance_to(&p).unwrap() < 1e-12);
    }

    #[test]
    fn normalization_of_affine_and_generic_paths() {
        let g = geom();
        let b = Zoo::Bump(7).potential(&g).unwrap();
        let t = uniform_samples(0.0, 1.0, 5);
        let steep = segment(&b, &b.shift(-2.0), &t).unwrap();
        let n = normalize(&steep, 1e-9).unwrap();
        assert!((n.m() + 1.0).abs() < 1e-12 && (n.big_m() + 1.0).abs() < 1e-12);
        assert!((n.t_samples().last().unwrap() - 2.0).abs() < 1e-12);
        let other = Zoo::Bump(8).potential(&g).unwrap();
        let p = segment(&b, &other, &t).unwrap();
        let n = normalize(&p, 1e-9).unwrap();
        assert!(n.big_m().abs() < 1e-9 && (n.m() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn gamma_saturates() {
        let g = geom();
        let b = Zoo::Bump(2).potential(&g).unwrap();
        assert_eq!(subgeodesic_gamma(&b, &b.shift(-1.0), 0.0).unwrap(), b);
        assert_eq!(subgeodesic_gamma(&b, &b.shift(-1.0), 3.0).unwrap(), b.shift(-1.0));
        assert!(subgeodesic_gamma(&b.shift(-1.0), &b, 1.0).is_err());
    }
}
