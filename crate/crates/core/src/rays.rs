//! Geodesic rays from a bounded potential toward a singularity type.
//!
//! For each level `l` the segment `u^l` joins `phi` at `t = 0` to
//! `max(phi - l, psi)` at `t = l`. On the symbol side
//! `g^l_t = g_phi + (t / l) (G_l - g_phi)` with `G_l = hull(min(g_phi + l, g_psi))`.
//! `G_l - g_phi` is concave in `l` and vanishes at `l = 0`, so `g^l_t`
//! decreases in `l` and the primal family increases.

use crate::convex::{ExtGridFn, Grid1D};
use crate::energy::am;
use crate::error::{Error, Result};
use crate::geodesics::{check_ordered, subgeodesic_gamma, uniform_samples, GeodesicPath};
use crate::toric::{cutoff, ToricPotential};

/// `1, 2, 4, ..., 2^16`.
pub fn default_ray_schedule() -> Vec<f64> {
    crate::energy::doubling_schedule(16)
}

/// 33 uniform samples on `[0, 8]`.
pub fn default_ray_times() -> Vec<f64> {
    uniform_samples(0.0, 8.0, 33)
}

/// Limit of the increasing segment family, sampled in time.
#[derive(Debug, Clone)]
pub struct RayApprox {
    pub phi: ToricPotential,
    pub psi: ToricPotential,
    pub l_schedule: Vec<f64>,
    pub path: GeodesicPath,
    /// Largest primal increment on the window between the last two levels.
    pub monotone_gap: f64,
    /// Largest increase of a symbol value from one level to the next.
    pub monotone_violation: f64,
    /// Window change of the limit when the last level is dropped.
    pub limit_gap: f64,
    pub converged: bool,
}

impl RayApprox {
    pub fn t_samples(&self) -> &[f64] {
        self.path.t_samples()
    }

    pub fn potentials(&self) -> &[ToricPotential] {
        self.path.potentials()
    }

    /// Largest window distance `|v_t - phi|` over the samples.
    pub fn distance_from_start(&self, window: &Grid1D) -> f64 {
        let base = self.phi.tilde_on(window);
        self.potentials()
            .iter()
            .map(|p| max_abs_diff(&p.tilde_on(window), &base))
            .fold(0.0, f64::max)
    }
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

/// `(G_b - G_a) / (b - a)`: secant of the concave map `l -> G_l`.
fn secant(ga: &ExtGridFn, gb: &ExtGridFn, a: f64, b: f64) -> Vec<f64> {
    ga.values().iter().zip(gb.values()).map(|(x, y)| (y - x) / (b - a)).collect()
}

/// Closed hull of `g_phi + t s`.
fn ray_point(phi: &ToricPotential, s: &[f64], t: f64) -> Result<ToricPotential> {
    let dual = phi.dual().map_finite(|i, g| g + t * s[i])?;
    ToricPotential::from_hull(phi.geom().clone(), &dual)
}

/// Builds the ray from the levels `l_schedule`.
///
/// The symbols `g^l_t` are checked for monotonicity in `l` at every sample
/// with `t <= l`. The limit `g_phi + t lim (G_l - g_phi) / l` uses the
/// last secant of `l -> G_l` for the recession slope, which is exact as soon
/// as `G_l` becomes affine in `l`.
pub fn build_ray(
    phi: &ToricPotential,
    psi: &ToricPotential,
    l_schedule: &[f64],
    t_samples: &[f64],
    gap_tol: f64,
) -> Result<RayApprox> {
    check_ordered(psi, phi)?;
    if !phi.is_bounded() {
        return Err(Error::Unbounded);
    }
    if l_schedule.len() < 3 || l_schedule.windows(2).any(|w| !(w[0] < w[1])) || l_schedule[0] <= 0.0 {
        return Err(Error::ScheduleTooShort("need at least three increasing positive levels".into()));
    }
    let n = l_schedule.len();
    let l_max = l_schedule[n - 1];
    if t_samples.iter().any(|&t| t < 0.0 || t > l_max) {
        return Err(Error::Precondition(format!("time samples must lie in [0, {l_max}]")));
    }
    let window = *phi.geom().window();
    let levels: Vec<ExtGridFn> = l_schedule
        .iter()
        .map(|&l| cutoff(psi, l, phi).map(|p| p.dual().clone()))
        .collect::<Result<_>>()?;
    let g_phi = phi.dual();
    let mut violation = 0.0_f64;
    for &t in t_samples {
        let mut prev: Option<ExtGridFn> = None;
        for (k, &l) in l_schedule.iter().enumerate() {
            if l < t {
                continue;
            }
            let d = g_phi.affine_combination(&levels[k], t / l)?;
            if let Some(p) = &prev {
                for (a, b) in d.values().iter().zip(p.values()) {
                    violation = violation.max(a - b);
                }
            }
            prev = Some(d);
        }
    }
    let t_max = t_samples.iter().copied().fold(0.0, f64::max);
    let raw = |k: usize| -> Result<Vec<f64>> {
        let d = g_phi.affine_combination(&levels[k], t_max / l_schedule[k])?;
        Ok(ToricPotential::new(phi.geom().clone(), d)?.tilde_on(&window))
    };
    let monotone_gap = max_abs_diff(&raw(n - 1)?, &raw(n - 2)?);
    let s = secant(&levels[n - 2], &levels[n - 1], l_schedule[n - 2], l_schedule[n - 1]);
    let s_prev = secant(&levels[n - 3], &levels[n - 2], l_schedule[n - 3], l_schedule[n - 2]);
    let pots = t_samples.iter().map(|&t| ray_point(phi, &s, t)).collect::<Result<Vec<_>>>()?;
    let limit_gap = max_abs_diff(
        &ray_point(phi, &s_prev, t_max)?.tilde_on(&window),
        &pots[pots.len() - 1].tilde_on(&window),
    );
    let path = GeodesicPath::from_samples(t_samples.to_vec(), pots)?;
    Ok(RayApprox {
        phi: phi.clone(),
        psi: psi.clone(),
        l_schedule: l_schedule.to_vec(),
        path,
        monotone_gap,
        monotone_violation: violation,
        limit_gap,
        converged: limit_gap <= gap_tol,
    })
}

/// `t -> am(v_t)` with its least-squares line.
#[derive(Debug, Clone, PartialEq)]
pub struct RayEnergyProfile {
    pub t: Vec<f64>,
    pub am: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub am_phi: f64,
}

impl RayEnergyProfile {
    /// `max_t |am(v_t) - am(phi) - c t|`.
    pub fn law_deviation(&self, c: f64) -> f64 {
        self.t
            .iter()
            .zip(&self.am)
            .map(|(t, a)| (a - self.am_phi - c * t).abs())
            .fold(0.0, f64::max)
    }

    /// Deviation of each sample from the fitted line.
    pub fn chord_deviation(&self) -> Vec<f64> {
        self.t.iter().zip(&self.am).map(|(t, a)| a - self.intercept - self.slope * t).collect()
    }
}

pub fn ray_energy_profile(ray: &RayApprox) -> Result<RayEnergyProfile> {
    if !ray.converged {
        return Err(Error::NotConverged(format!("ray limit gap {:.3e}", ray.limit_gap)));
    }
    let t = ray.t_samples().to_vec();
    let am_vals = ray.path.energies()?;
    let n = t.len() as f64;
    let mt = t.iter().sum::<f64>() / n;
    let ma = am_vals.iter().sum::<f64>() / n;
    let sxy: f64 = t.iter().zip(&am_vals).map(|(x, y)| (x - mt) * (y - ma)).sum();
    let sxx: f64 = t.iter().map(|x| (x - mt) * (x - mt)).sum();
    let slope = sxy / sxx;
    Ok(RayEnergyProfile { intercept: ma - slope * mt, slope, am: am_vals, t, am_phi: am(&ray.phi)? })
}

/// Outcome of the checks defining membership in `R(phi, psi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipReport {
    /// `max_t (sup |v_t - phi| - max(|M|, |m|) t)` on the window.
    pub emanation_excess: f64,
    /// `max (g_{v_T} - g_psi)` over the domain of `g_psi`.
    pub limit_excess: f64,
    pub normalized: bool,
    pub constant: bool,
    /// Worst violation of `gamma_t <= v_t <= phi` on the window.
    pub sandwich_excess: f64,
    /// Worst `v_t - competitor_t` on the window, when a competitor is given.
    pub competitor_excess: Option<f64>,
    pub ok: bool,
}

/// Checks emanation, the limit bound, normalization, the sandwich and
/// minimality against an optional competitor in `R(phi, psi)`.
pub fn membership_check(ray: &RayApprox, competitor: Option<&GeodesicPath>, tol: f64) -> Result<MembershipReport> {
    if !ray.converged {
        return Err(Error::NotConverged(format!("ray limit gap {:.3e}", ray.limit_gap)));
    }
    let window = *ray.phi.geom().window();
    let lip = ray.path.big_m().abs().max(ray.path.m().abs());
    let phi_w = ray.phi.tilde_on(&window);
    let mut emanation_excess = f64::NEG_INFINITY;
    let mut sandwich_excess = 0.0_f64;
    for (&t, v) in ray.t_samples().iter().zip(ray.potentials()) {
        let vw = v.tilde_on(&window);
        emanation_excess = emanation_excess.max(max_abs_diff(&vw, &phi_w) - lip * t);
        let gamma = subgeodesic_gamma(&ray.phi, &ray.psi, t)?.tilde_on(&window);
        for i in 0..vw.len() {
            sandwich_excess = sandwich_excess.max(gamma[i] - vw[i]).max(vw[i] - phi_w[i]);
        }
    }
    let last = ray.path.end().dual();
    let limit_excess = last
        .values()
        .iter()
        .zip(ray.psi.dual().values())
        .filter(|(_, p)| p.is_finite())
        .map(|(v, p)| v - p)
        .fold(f64::NEG_INFINITY, f64::max);
    let constant = ray.distance_from_start(&window) <= tol;
    let normalized = ray.path.big_m().abs() <= tol && (ray.path.m() + 1.0).abs() <= tol;
    let competitor_excess = match competitor {
        None => None,
        Some(c) => Some(competitor_gap(ray, c, tol)?),
    };
    let ok = emanation_excess <= tol
        && limit_excess <= tol
        && (normalized || constant)
        && sandwich_excess <= tol
        && competitor_excess.is_none_or(|e| e <= tol);
    Ok(MembershipReport {
        emanation_excess,
        limit_excess,
        normalized,
        constant,
        sandwich_excess,
        competitor_excess,
        ok,
    })
}

fn competitor_gap(ray: &RayApprox, c: &GeodesicPath, tol: f64) -> Result<f64> {
    if c.t_samples() != ray.t_samples() {
        return Err(Error::Mismatch("competitor must use the ray's time samples".into()));
    }
    let window = *ray.phi.geom().window();
    let start = max_abs_diff(&c.start().tilde_on(&window), &ray.phi.tilde_on(&window));
    let is_constant = c.big_m().abs() <= tol && c.m().abs() <= tol;
    let is_normalized = c.big_m().abs() <= tol && (c.m() + 1.0).abs() <= tol;
    if start > tol || !(is_constant || is_normalized) {
        return Err(Error::Precondition("competitor is not a normalized ray from phi".into()));
    }
    let mut worst = f64::NEG_INFINITY;
    for (v, w) in ray.potentials().iter().zip(c.potentials()) {
        let (vw, ww) = (v.tilde_on(&window), w.tilde_on(&window));
        worst = vw.iter().zip(&ww).fold(worst, |m, (a, b)| m.max(a - b));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::{ToricGeometry, Zoo};

    #[test]
    fn bounded_target_gives_constant_ray() {
        let g = ToricGeometry::new(256, 40.0, 1024).unwrap();
        let phi = Zoo::Bump(3).potential(&g).unwrap();
        let ray = build_ray(&phi, &phi.shift(-1.0), &default_ray_schedule(), &default_ray_times(), 1e-6).unwrap();
        assert!(ray.converged);
        assert!(ray.distance_from_start(g.window()) < 1e-12);
        assert!(ray.monotone_violation <= 1e-9);
    }

    #[test]
    fn singular_target_slope() {
        let g = ToricGeometry::new(256, 40.0, 1024).unwrap();
        let phi = Zoo::Zero.potential(&g).unwrap();
        let psi = Zoo::Nu(0.3).potential(&g).unwrap();
        let ray = build_ray(&phi, &psi, &default_ray_schedule(), &default_ray_times(), 1e-3).unwrap();
        assert!(ray.converged, "gap {}", ray.monotone_gap);
        assert!(ray.monotone_violation <= 1e-9);
        assert!((ray.path.m() + 1.0).abs() < 1e-9 && ray.path.big_m().abs() < 1e-9);
        let prof = ray_energy_profile(&ray).unwrap();
        assert!((prof.slope + 0.15).abs() < 1e-2, "slope {}", prof.slope);
        let rep = membership_check(&ray, None, 5.0 * g.h_x()).unwrap();
        assert!(rep.ok, "{rep:?}");
    }
}
