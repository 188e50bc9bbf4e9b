//! Psh envelopes of obstacles and of singularity types.
//!
//! The largest potential below an obstacle `b0` has symbol
//! `(f0 + b0)*` restricted to the polytope. Obstacles are built from
//! potentials (where the conjugate is exact) or from window samples with
//! declared tails (used as an independent primal-side oracle).

use crate::convex::{conjugate_of_samples, ExtGridFn, Grid1D, SlopeData, POS_INF};
use crate::energy::{is_in_e, Membership};
use crate::error::{Error, Result};
use crate::rays::max_abs_diff;
use crate::toric::{ToricGeometry, ToricPotential};

/// `1, 2, 4, ..., 2^16`.
pub fn default_c_schedule() -> Vec<f64> {
    crate::energy::doubling_schedule(16)
}

/// Obstacle given by samples of `b0~` on a window and the slopes of `b0~` beyond it.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowObstacle {
    pub window: Grid1D,
    pub values: Vec<f64>,
    pub tails: SlopeData,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Obstacle {
    Potential(ToricPotential),
    Min(Vec<Obstacle>),
    Samples(WindowObstacle),
}

impl Obstacle {
    /// `(f0 + b0)*` on the polytope grid.
    fn dual(&self, geom: &ToricGeometry) -> Result<ExtGridFn> {
        match self {
            Obstacle::Potential(p) => {
                if !p.geom().same_as(geom) {
                    return Err(Error::Mismatch("obstacle uses another geometry".into()));
                }
                Ok(p.dual().clone())
            }
            Obstacle::Min(parts) => {
                let mut it = parts.iter();
                let first = it.next().ok_or(Error::EmptyDomain)?.dual(geom)?;
                it.try_fold(first, |acc, o| acc.pointwise_max(&o.dual(geom)?))
            }
            Obstacle::Samples(w) => {
                let xs = w.window.nodes();
                if w.values.len() != xs.len() || w.values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidFunction("obstacle needs finite values on every window node".into()));
                }
                let f0 = geom.f0().eval_sorted(&xs);
                let vals: Vec<f64> = f0.iter().zip(&w.values).map(|(a, b)| a + b).collect();
                let tails = SlopeData::new(w.tails.slope_left, 1.0 + w.tails.slope_right)?;
                conjugate_of_samples(&xs, &vals, tails, geom.grid())
            }
        }
    }

    /// Window samples of `phi~`, tails taken from the symbol's domain.
    pub fn sampled(pot: &ToricPotential, window: &Grid1D) -> Self {
        let (lo, hi) = pot.dual().dom_bounds();
        Obstacle::Samples(WindowObstacle {
            window: *window,
            values: pot.tilde_on(window),
            tails: SlopeData { slope_left: lo, slope_right: hi - 1.0 },
        })
    }
}

/// Largest potential below `b0`.
pub fn proj(geom: &std::sync::Arc<ToricGeometry>, b0: &Obstacle) -> Result<ToricPotential> {
    let dual = b0.dual(geom)?;
    ToricPotential::from_hull(geom.clone(), &dual)
}

/// Both evaluations of the envelope with respect to a singularity type.
#[derive(Debug, Clone)]
pub struct EnvelopeResult {
    /// Closed-form path: `g_phi` on `dom(g_psi)`.
    pub result: ToricPotential,
    /// Last iterate `P(psi + C, phi)` of the schedule.
    pub iterate: ToricPotential,
    pub c_schedule: Vec<f64>,
    pub stabilization_c: Option<f64>,
    /// Window sup-distance between the two paths.
    pub closed_form_gap: f64,
    /// Largest decrease of an iterate's window value as `C` grows.
    pub monotone_violation: f64,
}

/// `P(psi + C, phi)`: the symbol is `max(g_psi - C, g_phi)`.
pub fn p_iterate(psi: &ToricPotential, phi: &ToricPotential, c: f64) -> Result<ToricPotential> {
    proj(phi.geom(), &Obstacle::Min(vec![Obstacle::Potential(psi.shift(c)), Obstacle::Potential(phi.clone())]))
}

/// `g_phi` restricted to the nodes `first..=last`: the envelope of `phi`
/// with respect to any singularity type whose symbol has that domain.
pub fn restrict_symbol(phi: &ToricPotential, first: usize, last: usize) -> Result<ToricPotential> {
    let closed: Vec<f64> = phi
        .dual()
        .values()
        .iter()
        .enumerate()
        .map(|(i, &g)| if (first..=last).contains(&i) { g } else { POS_INF })
        .collect();
    ToricPotential::from_hull(phi.geom().clone(), &ExtGridFn::new(*phi.geom().grid(), closed)?)
}

/// `P_[psi](phi)` by the closed form and by iterating in `C`.
pub fn p_bracket(psi: &ToricPotential, phi: &ToricPotential, c_schedule: &[f64], tol: f64) -> Result<EnvelopeResult> {
    psi.check_same(phi)?;
    if c_schedule.is_empty() || c_schedule.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::ScheduleTooShort("C schedule must be non-empty and increasing".into()));
    }
    let (first, last) = psi.dual().dom();
    let result = restrict_symbol(phi, first, last)?;

    let window = *phi.geom().window();
    let mut stabilization_c = None;
    let mut monotone_violation = 0.0_f64;
    let mut prev: Option<(ToricPotential, Vec<f64>)> = None;
    for &c in c_schedule {
        let it = p_iterate(psi, phi, c)?;
        let w = it.tilde_on(&window);
        if let Some((p, pw)) = &prev {
            for (a, b) in w.iter().zip(pw) {
                monotone_violation = monotone_violation.max(b - a);
            }
            if stabilization_c.is_none() && p.dual().sup_distance(it.dual())? <= 1e-9 {
                stabilization_c = Some(c);
            }
        }
        prev = Some((it, w));
    }
    let (iterate, iw) = prev.unwrap();
    let closed_form_gap = max_abs_diff(&iw, &result.tilde_on(&window));
    if stabilization_c.is_none() && closed_form_gap > tol {
        return Err(Error::Inconsistent(format!(
            "C-iteration did not stabilize and differs from the closed form by {closed_form_gap:.3e}"
        )));
    }
    Ok(EnvelopeResult {
        result,
        iterate,
        c_schedule: c_schedule.to_vec(),
        stabilization_c,
        closed_form_gap,
        monotone_violation,
    })
}

/// Both sides of the class-E characterization by envelopes.
#[derive(Debug, Clone, PartialEq)]
pub struct ECheck {
    pub membership: Membership,
    /// `max |P_[psi](phi)~ - phi~|` on the window.
    pub gap: f64,
    /// The same difference at the left window edge.
    pub edge_gap: f64,
    pub lelong: f64,
}

/// E implies `gap <= tol`; a Lelong number `nu > 0` implies an edge gap of at
/// least `nu |x_min| / 2`. Disagreement is an error.
pub fn e_check(psi: &ToricPotential, phi: &ToricPotential, l_schedule: &[f64], tol: f64) -> Result<ECheck> {
    if !phi.is_bounded() {
        return Err(Error::Unbounded);
    }
    let env = p_bracket(psi, phi, &default_c_schedule(), tol)?.result;
    let window = *phi.geom().window();
    let pw = env.tilde_on(&window);
    let fw = phi.tilde_on(&window);
    let gap = max_abs_diff(&pw, &fw);
    let edge_gap = (pw[0] - fw[0]).abs();
    let membership = is_in_e(psi, l_schedule)?;
    let lelong = psi.lelong(crate::toric::Vertex::Low).max(psi.lelong(crate::toric::Vertex::High));
    let report = ECheck { membership, gap, edge_gap, lelong };
    let envelope_says_e = gap <= tol;
    if report.membership.in_e != envelope_says_e {
        return Err(Error::Inconsistent(format!(
            "class-E verdict {} but envelope gap {gap:.3e}",
            report.membership.in_e
        )));
    }
    if !envelope_says_e && edge_gap < 0.5 * lelong * window.lo().abs() {
        return Err(Error::Inconsistent(format!(
            "edge gap {edge_gap:.3e} is below nu |x_min| / 2 for nu = {lelong}"
        )));
    }
    Ok(report)
}

/// `(∫ |P~ - phi~| dMA(P), mass of MA(P) in the window)` for `P = P_[psi](phi)`.
pub fn maximality_defect(psi: &ToricPotential, phi: &ToricPotential) -> Result<(f64, f64)> {
    let env = p_bracket(psi, phi, &default_c_schedule(), f64::INFINITY)?.result;
    let window = phi.geom().window();
    let mut defect = 0.0;
    let mut mass = 0.0;
    for (x, m) in env.primal().atoms() {
        if (window.lo()..=window.hi()).contains(&x) {
            defect += (env.tilde(x) - phi.tilde(x)).abs() * m;
            mass += m;
        }
    }
    Ok((defect, mass))
}

/// Domination spot check: `u >= v` on the support of `MA(u)` implies `u >= v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domination {
    /// `min (u - v)` over the atoms of `MA(u)` inside the window.
    pub on_support: f64,
    /// `min (u - v)` over the window nodes.
    pub on_window: f64,
    pub ok: bool,
}

pub fn domination_check(u: &ToricPotential, v: &ToricPotential, tol: f64) -> Result<Domination> {
    u.check_same(v)?;
    let window = u.geom().window();
    let on_support = u
        .primal()
        .atoms()
        .filter(|(x, _)| (window.lo()..=window.hi()).contains(x))
        .map(|(x, _)| u.primal().eval(x) - v.primal().eval(x))
        .fold(f64::INFINITY, f64::min);
    let uw = u.tilde_on(window);
    let vw = v.tilde_on(window);
    let on_window = uw.iter().zip(&vw).map(|(a, b)| a - b).fold(f64::INFINITY, f64::min);
    let ok = on_support < -tol || on_window >= -tol;
    Ok(Domination { on_support, on_window, ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::default_l_schedule;
    use crate::toric::Zoo;

    fn geom() -> std::sync::Arc<ToricGeometry> {
        ToricGeometry::new(256, 40.0, 1024).unwrap()
    }

    #[test]
    fn projection_of_a_potential_is_itself() {
        let g = geom();
        let b = Zoo::Bump(2).potential(&g).unwrap();
        assert_eq!(proj(&g, &Obstacle::Potential(b.clone())).unwrap(), b);
    }

    #[test]
    fn min_of_potentials_matches_sampled_oracle() {
        let g = geom();
        let a = Zoo::Bump(2).potential(&g).unwrap();
        let b = Zoo::Bump(3).potential(&g).unwrap();
        let exact = proj(&g, &Obstacle::Min(vec![Obstacle::Potential(a.clone()), Obstacle::Potential(b.clone())])).unwrap();
        let sampled = proj(&g, &Obstacle::Min(vec![Obstacle::sampled(&a, g.window()), Obstacle::sampled(&b, g.window())]))
            .unwrap();
        let d = max_abs_diff(&exact.tilde_on(g.window()), &sampled.tilde_on(g.window()));
        assert!(d < g.h_x() * g.h_x(), "{d}");
    }

    #[test]
    fn slopes_outside_the_polytope_are_clipped() {
        let g = geom();
        let w = *g.window();
        let zero_obstacle = Obstacle::Samples(WindowObstacle {
            window: w,
            values: vec![0.0; w.n_nodes()],
            tails: SlopeData { slope_left: -2.0, slope_right: 2.0 },
        });
        let p = proj(&g, &zero_obstacle).unwrap();
        let (inf, sup) = p.tilde_extrema();
        assert!(sup.max(-inf) <= g.h_x() * g.h_x(), "{inf} {sup}");
    }

    #[test]
    fn bracket_of_bounded_and_full_mass_targets() {
        let g = geom();
        let phi = Zoo::Bump(4).potential(&g).unwrap();
        let r = p_bracket(&Zoo::Const(-5.0).potential(&g).unwrap(), &phi, &default_c_schedule(), 1e-9).unwrap();
        assert_eq!(r.result, phi);
        assert!(r.stabilization_c.is_some());
        let r = p_bracket(&Zoo::Einf.potential(&g).unwrap(), &phi, &default_c_schedule(), 1e-9).unwrap();
        assert!(max_abs_diff(&r.result.tilde_on(g.window()), &phi.tilde_on(g.window())) <= 5.0 * g.h_x());
        assert!(r.closed_form_gap <= 1e-12 && r.monotone_violation <= 1e-12);
    }

    #[test]
    fn singular_target_keeps_its_lelong_number() {
        let g = geom();
        let phi = Zoo::Zero.potential(&g).unwrap();
        let psi = Zoo::Nu(0.3).potential(&g).unwrap();
        let r = p_bracket(&psi, &phi, &default_c_schedule(), 5.0 * g.h_x()).unwrap();
        assert_eq!(r.result.dual().dom_bounds(), psi.dual().dom_bounds());
        assert!(r.result.tilde(-20.0) - phi.tilde(-20.0) < -1.0);
        let e = e_check(&psi, &phi, &default_l_schedule(), 5.0 * g.h_x()).unwrap();
        assert!(!e.membership.in_e && e.edge_gap >= 0.3 * 40.0 * 0.5);
        let (defect, mass) = maximality_defect(&psi, &phi).unwrap();
        assert!(defect <= 5.0 * g.h_x() * mass);
    }
}
