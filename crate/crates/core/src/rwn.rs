//! Test curves, the Legendre transform of rays in time, and the ray
//! obtained from a test curve by maximization and inverse transform.
//!
//! A test curve value `-inf` (BOTTOM) is represented by `None`; on the
//! symbol side it would be the constant `+inf`, which is never formed.

use crate::convex::{conjugate_of_samples, convexity_defect, ExtGridFn, Grid1D, SlopeData, POS_INF};
use crate::envelopes::restrict_symbol;
use crate::error::{Error, Result};
use crate::geodesics::{check_ordered, GeodesicPath};
use crate::rays::max_abs_diff;
use crate::toric::ToricPotential;

const TREND_TOL: f64 = 1e-9;

/// Uniform `tau` samples of spacing `1 / (2n)` covering `[-1.5, 0.25]`;
/// `-1` and `0` are samples.
pub fn default_tau_samples(n: usize) -> Vec<f64> {
    let n = n as i64;
    let (lo, hi) = (-3 * n, (n + 1) / 2);
    (lo..=hi).map(|k| k as f64 / (2 * n) as f64).collect()
}

/// `tau -> inf_t (gamma_t - t tau)` for `gamma_t = max(phi - t, psi)`.
///
/// The infimum is attained at `t = phi - psi`, which gives `phi` for
/// `tau <= -1`, `(1 + tau) psi - tau phi` on `[-1, 0]` and BOTTOM for `tau > 0`.
/// Symbols are conjugates of that primal at the polytope nodes.
#[derive(Debug, Clone)]
pub struct TestCurve {
    phi: ToricPotential,
    psi: ToricPotential,
    tau: Vec<f64>,
    /// The curve equals `phi` for `tau <= -c_bound`.
    pub c_bound: f64,
}

/// Identities of a test curve built from `(phi, psi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TcProp {
    /// Largest symbol distance to `g_phi` over the samples `tau <= -1`.
    pub phi_gap: f64,
    /// Window distance between the `tau = 0` value and `psi`, if `0` is sampled.
    pub psi_gap: Option<f64>,
    /// Every sample `tau > 0` is BOTTOM.
    pub bottom_above_zero: bool,
    /// Largest failure of concavity in `tau`, measured as convexity in `tau`
    /// of the symbol at each polytope node.
    pub concavity_defect: f64,
}

impl TestCurve {
    pub fn tau_samples(&self) -> &[f64] {
        &self.tau
    }

    /// Symbol of the curve at `tau`, `None` for BOTTOM.
    pub fn dual_at(&self, tau: f64) -> Result<Option<ExtGridFn>> {
        if tau > 0.0 {
            return Ok(None);
        }
        if tau <= -1.0 {
            return Ok(Some(self.phi.dual().clone()));
        }
        let (a, b) = (self.psi.primal(), self.phi.primal());
        let (wa, wb) = (1.0 + tau, -tau);
        let mut xs: Vec<f64> = a.breakpoints().iter().chain(b.breakpoints()).copied().chain([0.0]).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * (1.0 + b.abs()));
        let vals: Vec<f64> =
            a.eval_sorted(&xs).iter().zip(b.eval_sorted(&xs)).map(|(u, v)| wa * u + wb * v).collect();
        let tails = SlopeData::new(
            wa * a.slope_low() + wb * b.slope_low(),
            wa * a.slope_high() + wb * b.slope_high(),
        )?;
        Ok(Some(conjugate_of_samples(&xs, &vals, tails, self.phi.dual().grid())?))
    }

    /// Domain of the symbol at `tau`, `None` for BOTTOM.
    pub fn domain_at(&self, tau: f64) -> Result<Option<(usize, usize)>> {
        Ok(self.dual_at(tau)?.map(|d| d.dom()))
    }

    pub fn value_at(&self, tau: f64) -> Result<Option<ToricPotential>> {
        match self.dual_at(tau)? {
            Some(d) => Ok(Some(ToricPotential::new(self.phi.geom().clone(), d)?)),
            None => Ok(None),
        }
    }

    pub fn tc_prop(&self) -> Result<TcProp> {
        let window = *self.phi.geom().window();
        let mut phi_gap = 0.0_f64;
        let mut psi_gap = None;
        let mut bottom_above_zero = true;
        let mut columns: Vec<(f64, Vec<f64>)> = Vec::new();
        for &tau in &self.tau {
            let value = self.value_at(tau)?;
            if tau > 0.0 {
                bottom_above_zero &= value.is_none();
            }
            let Some(v) = value else { continue };
            if tau <= -1.0 {
                phi_gap = phi_gap.max(v.dual().sup_distance(self.phi.dual())?);
            }
            if tau == 0.0 {
                psi_gap = Some(max_abs_diff(&v.tilde_on(&window), &self.psi.tilde_on(&window)));
            }
            columns.push((tau, v.dual().values().to_vec()));
        }
        let mut concavity_defect = 0.0_f64;
        for k in 1..columns.len().saturating_sub(1) {
            let (ta, a) = &columns[k - 1];
            let (tb, b) = &columns[k];
            let (tc, c) = &columns[k + 1];
            let s = (tb - ta) / (tc - ta);
            for i in 0..b.len() {
                if a[i].is_finite() && c[i].is_finite() {
                    let chord = (1.0 - s) * a[i] + s * c[i];
                    concavity_defect = concavity_defect.max(b[i] - chord);
                }
            }
        }
        Ok(TcProp { phi_gap, psi_gap, bottom_above_zero, concavity_defect })
    }
}

/// Builds the test curve of `(phi, psi)` on `tau_samples`.
pub fn test_curve(phi: &ToricPotential, psi: &ToricPotential, tau_samples: &[f64]) -> Result<TestCurve> {
    check_ordered(psi, phi)?;
    if !phi.is_bounded() {
        return Err(Error::Unbounded);
    }
    if tau_samples.is_empty() || tau_samples.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Precondition("tau samples must be non-empty and increasing".into()));
    }
    Ok(TestCurve { phi: phi.clone(), psi: psi.clone(), tau: tau_samples.to_vec(), c_bound: 1.0 })
}

/// Legendre transform in time: `inf_t (u_t - t tau)`, `None` for BOTTOM.
///
/// Nodes where the last time secant of the symbols plus `tau` is positive
/// leave the domain.
pub fn ray_legendre(path: &GeodesicPath, tau: f64) -> Result<Option<ToricPotential>> {
    let t = path.t_samples();
    let n = t.len();
    let duals: Vec<&ExtGridFn> = path.duals().collect();
    let geom = path.start().geom().clone();
    let values: Vec<f64> = (0..duals[0].values().len())
        .map(|i| {
            let (a, b) = (duals[n - 2].value(i), duals[n - 1].value(i));
            let trend = (b - a) / (t[n - 1] - t[n - 2]);
            if !b.is_finite() || !a.is_finite() || trend + tau > TREND_TOL * (1.0 + b.abs()) {
                return POS_INF;
            }
            duals.iter().zip(t).map(|(d, &s)| d.value(i) + s * tau).fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    if values.iter().all(|v| !v.is_finite()) {
        return Ok(None);
    }
    let (first, last) = {
        let first = values.iter().position(|v| v.is_finite()).unwrap();
        let last = values.iter().rposition(|v| v.is_finite()).unwrap();
        (first, last)
    };
    if values[first..=last].iter().any(|v| !v.is_finite()) {
        return Err(Error::NotConverged(format!("transform at tau = {tau} has a split domain; extend the time range")));
    }
    let dual = ExtGridFn::new(*geom.grid(), values)?;
    let defect = convexity_defect(&dual);
    if defect > 5.0 * geom.h() {
        return Err(Error::NotConverged(format!(
            "transform at tau = {tau} has convexity defect {defect:.3e}; extend the time range"
        )));
    }
    Ok(Some(ToricPotential::from_hull(geom, &dual)?))
}

/// The ray `usc sup_tau (P_[psi_tau](phi) + t tau)` sampled in time.
#[derive(Debug, Clone)]
pub struct RwnRay {
    pub curve: TestCurve,
    pub path: GeodesicPath,
    /// Largest sampled `tau` whose maximized curve contains each node.
    pub tau_max: Vec<f64>,
}

impl RwnRay {
    pub fn t_samples(&self) -> &[f64] {
        self.path.t_samples()
    }

    pub fn potentials(&self) -> &[ToricPotential] {
        self.path.potentials()
    }
}

pub fn rwn_ray(phi: &ToricPotential, psi: &ToricPotential, tau_samples: &[f64], t_samples: &[f64]) -> Result<RwnRay> {
    let curve = test_curve(phi, psi, tau_samples)?;
    let n_nodes = phi.dual().values().len();
    let mut tau_max = vec![f64::NEG_INFINITY; n_nodes];
    for &tau in tau_samples {
        let Some((first, last)) = curve.domain_at(tau)? else { continue };
        let maximized = restrict_symbol(phi, first, last)?;
        for (i, g) in maximized.dual().values().iter().enumerate() {
            if g.is_finite() {
                tau_max[i] = tau_max[i].max(tau);
            }
        }
    }
    let pots = t_samples
        .iter()
        .map(|&t| {
            let dual = phi
                .dual()
                .map_finite(|i, g| if tau_max[i].is_finite() { g - t * tau_max[i] } else { POS_INF })?;
            ToricPotential::from_hull(phi.geom().clone(), &dual)
        })
        .collect::<Result<Vec<_>>>()?;
    let path = GeodesicPath::from_samples(t_samples.to_vec(), pots)?;
    Ok(RwnRay { curve, path, tau_max })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayComparison {
    /// Largest window distance over samples and nodes.
    pub window_gap: f64,
    /// Largest symbol distance; `+inf` when domains differ.
    pub dual_gap: f64,
}

pub fn compare_rays(a: &GeodesicPath, b: &GeodesicPath) -> Result<RayComparison> {
    if a.t_samples() != b.t_samples() {
        return Err(Error::Mismatch("rays are sampled at different times".into()));
    }
    a.start().check_same(b.start())?;
    let window: Grid1D = *a.start().geom().window();
    let mut window_gap = 0.0_f64;
    let mut dual_gap = 0.0_f64;
    for (u, v) in a.potentials().iter().zip(b.potentials()) {
        window_gap = window_gap.max(max_abs_diff(&u.tilde_on(&window), &v.tilde_on(&window)));
        dual_gap = dual_gap.max(u.dual().sup_distance(v.dual())?);
    }
    Ok(RayComparison { window_gap, dual_gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelopes::p_iterate;
    use crate::geodesics::uniform_samples;
    use crate::rays::{build_ray, default_ray_schedule, default_ray_times};
    use crate::toric::{toric_max, ToricGeometry, Zoo};

    fn geom(n: usize) -> std::sync::Arc<ToricGeometry> {
        ToricGeometry::new(n, 40.0, 4 * n).unwrap()
    }

    #[test]
    fn tau_grid_hits_minus_one_and_zero() {
        let tau = default_tau_samples(256);
        assert!(tau.contains(&-1.0) && tau.contains(&0.0));
        assert_eq!(tau[0], -1.5);
        assert!(*tau.last().unwrap() >= 0.25);
    }

    #[test]
    fn shifted_target_curve_is_explicit() {
        let g = geom(256);
        let phi = Zoo::Bump(5).potential(&g).unwrap();
        let psi = phi.shift(-1.0);
        let tau = uniform_samples(-1.5, 0.25, 15);
        let c = test_curve(&phi, &psi, &tau).unwrap();
        for &s in &tau {
            let v = c.value_at(s).unwrap();
            if s > 0.0 {
                assert!(v.is_none());
                continue;
            }
            let expected = phi.shift(-1.0 - s.max(-1.0));
            let d = v.unwrap().dual().sup_distance(expected.dual()).unwrap();
            assert!(d < 1e-9, "tau {s}: {d}");
        }
    }

    #[test]
    fn curve_identities_for_a_lelong_number() {
        let g = geom(256);
        let phi = Zoo::Zero.potential(&g).unwrap();
        let psi = Zoo::Nu(0.3).potential(&g).unwrap();
        let c = test_curve(&phi, &psi, &uniform_samples(-1.5, 0.25, 71)).unwrap();
        let p = c.tc_prop().unwrap();
        assert!(p.phi_gap <= 1e-12 && p.bottom_above_zero, "{p:?}");
        assert!(p.psi_gap.unwrap() <= 5.0 * g.h(), "{p:?}");
        assert!(p.concavity_defect <= 5.0 * g.h(), "{p:?}");
    }

    /// `sup_t (dual(gamma_t) + t tau)` over sampled times.
    fn sampled_sup(phi: &ToricPotential, psi: &ToricPotential, tau: f64, ts: &[f64]) -> Vec<f64> {
        let duals: Vec<ExtGridFn> =
            ts.iter().map(|&t| toric_max(&phi.shift(-t), psi).unwrap().dual().clone()).collect();
        (0..phi.dual().values().len())
            .map(|i| duals.iter().zip(ts).map(|(d, &t)| d.value(i) + t * tau).fold(f64::NEG_INFINITY, f64::max))
            .collect()
    }

    #[test]
    fn closed_form_dominates_sampled_time_sup() {
        let g = geom(128);
        let phi = Zoo::Bump(3).potential(&g).unwrap();
        let psi = Zoo::Nu(0.4).potential(&g).unwrap().shift(-0.5);
        let c = test_curve(&phi, &psi, &[-0.7, -0.3]).unwrap();
        let ts = uniform_samples(0.0, 64.0, 4097);
        let dt = ts[1];
        for tau in [-0.7, -0.3] {
            let exact = c.dual_at(tau).unwrap().unwrap();
            let sampled = sampled_sup(&phi, &psi, tau, &ts);
            for (i, (e, s)) in exact.values().iter().zip(&sampled).enumerate() {
                if e.is_finite() {
                    assert!(*s <= e + 1e-9, "node {i}: {s} > {e}");
                    let trusted = g.grid().node(i) >= 0.4 * (1.0 + tau) + 0.05;
                    assert!(!trusted || e - s <= dt, "node {i}: {e} vs {s}");
                }
            }
        }
    }

    #[test]
    fn legendre_of_ray_is_a_fixed_point_of_the_envelope() {
        let g = geom(256);
        let phi = Zoo::Zero.potential(&g).unwrap();
        let psi = Zoo::Nu(0.3).potential(&g).unwrap();
        let ray = build_ray(&phi, &psi, &default_ray_schedule(), &default_ray_times(), 1e-9).unwrap();
        for tau in [-0.8, -0.5, -0.2] {
            let star = ray_legendre(&ray.path, tau).unwrap().unwrap();
            for c in [2.0, 8.0, 32.0] {
                let p = p_iterate(&star, &phi, c).unwrap();
                assert!(max_abs_diff(&p.tilde_on(g.window()), &star.tilde_on(g.window())) <= 5.0 * g.h());
            }
        }
        assert!(ray_legendre(&ray.path, 0.1).unwrap().is_none());
    }

    #[test]
    fn rwn_matches_the_cutoff_ray() {
        let mut gaps = Vec::new();
        for n in [128, 256] {
            let g = geom(n);
            let phi = Zoo::Zero.potential(&g).unwrap();
            let psi = Zoo::Nu(0.3).potential(&g).unwrap();
            let t = default_ray_times();
            let a = build_ray(&phi, &psi, &default_ray_schedule(), &t, 1e-9).unwrap();
            let b = rwn_ray(&phi, &psi, &default_tau_samples(n), &t).unwrap();
            let cmp = compare_rays(&a.path, &b.path).unwrap();
            assert!(cmp.window_gap <= 10.0 * g.h(), "{cmp:?}");
            gaps.push(cmp.window_gap);
        }
        assert!(gaps[0] / gaps[1] >= 1.5, "{gaps:?}");
    }

    #[test]
    fn full_mass_and_bounded_targets_give_constant_rays() {
        let g = geom(256);
        let phi = Zoo::Bump(1).potential(&g).unwrap();
        let t = default_ray_times();
        for psi in [phi.shift(-1.0), Zoo::Einf.potential(&g).unwrap().shift(-3.0)] {
            let r = rwn_ray(&phi, &psi, &default_tau_samples(256), &t).unwrap();
            let d = r
                .potentials()
                .iter()
                .map(|p| max_abs_diff(&p.tilde_on(g.window()), &phi.tilde_on(g.window())))
                .fold(0.0, f64::max);
            assert!(d <= 5.0 * g.h_x(), "{d}");
        }
    }
}
