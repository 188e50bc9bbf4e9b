//! Aubin-Mabuchi energy, its bounds, the asymptotic slope `c_psi`, and class E.
//!
//! The dual formula `AM = -∫_P (g - g0)` is the fast path. The mixed-measure
//! and difference formulas integrate against the exact Monge-Ampère atoms of
//! the piecewise-affine primals and serve as independent checks.

use crate::convex::PwAffine;
use crate::error::{Error, Result};
use crate::toric::{cutoff, ToricPotential};

/// Threshold on `|c|` separating class E from its complement.
pub const TOL_C: f64 = 5e-3;
/// Largest accepted tail bound for the mixed formula.
pub const TOL_TAIL: f64 = 1e-9;

/// `1, 2, 4, ..., 1024`.
pub fn default_l_schedule() -> Vec<f64> {
    doubling_schedule(10)
}

/// Doubling schedule `1, 2, ..., 2^k`.
pub fn doubling_schedule(k: u32) -> Vec<f64> {
    (0..=k).map(|j| 2f64.powi(j as i32)).collect()
}

/// Dual formula: trapezoid rule for `-∫ (g - g0)` over the polytope.
pub fn am(pot: &ToricPotential) -> Result<f64> {
    if !pot.is_bounded() {
        return Err(Error::Unbounded);
    }
    let diff = pot.dual().map_finite(|i, g| g - pot.geom().g0().value(i))?;
    Ok(-diff.trapezoid())
}

/// `∫ u dMA(f)` for the exact atoms of `f`, split into the part inside
/// `[lo, hi]` and the total mass outside it.
fn integrate_atoms(f: &PwAffine, u: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let mut inside = 0.0;
    let mut outside = 0.0;
    for (x, mass) in f.atoms() {
        if (lo..=hi).contains(&x) {
            inside += u(x) * mass;
        } else {
            outside += mass;
        }
    }
    (inside, outside)
}

/// Mixed-measure value over a window with a bound on the neglected tails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedEnergy {
    pub value: f64,
    pub tail_bound: f64,
}

/// `(1/2)[∫ phi~ dMA(f0) + ∫ phi~ dMA(f)]` over the atoms inside `window`.
pub fn am_mixed(pot: &ToricPotential, window: &crate::convex::Grid1D) -> Result<MixedEnergy> {
    if !pot.is_bounded() {
        return Err(Error::Unbounded);
    }
    let (lo, hi) = (window.lo(), window.hi());
    let u = |x: f64| pot.tilde(x);
    let (a, out_a) = integrate_atoms(pot.geom().f0(), u, lo, hi);
    let (b, out_b) = integrate_atoms(pot.primal(), u, lo, hi);
    let (inf, sup) = pot.tilde_extrema();
    let tail_bound = inf.abs().max(sup.abs()) * (out_a + out_b);
    if tail_bound > TOL_TAIL {
        let needed = pot.primal().required_half_width().max(pot.geom().f0().required_half_width());
        return Err(Error::WindowTooSmall {
            what: format!("mixed-energy tail bound {tail_bound:.3e}"),
            window: hi.max(-lo),
            required: needed,
        });
    }
    Ok(MixedEnergy { value: 0.5 * (a + b), tail_bound })
}

/// `AM(u) - AM(v) = (1/2)[∫ (u - v) dMA(u) + ∫ (u - v) dMA(v)]` with exact atoms.
pub fn am_difference(u: &ToricPotential, v: &ToricPotential) -> Result<f64> {
    u.check_same(v)?;
    if !(u.is_bounded() && v.is_bounded()) {
        return Err(Error::Unbounded);
    }
    let d = |x: f64| u.primal().eval(x) - v.primal().eval(x);
    let (a, _) = integrate_atoms(u.primal(), d, f64::NEG_INFINITY, f64::INFINITY);
    let (b, _) = integrate_atoms(v.primal(), d, f64::NEG_INFINITY, f64::INFINITY);
    Ok(0.5 * (a + b))
}

/// `∫ u dMA(u) <= AM(u) <= (1/2) ∫ u dMA(u)` for `u <= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmBounds {
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
    pub ok: bool,
}

pub fn am_bounds_check(pot: &ToricPotential) -> Result<AmBounds> {
    if !pot.is_bounded() {
        return Err(Error::Unbounded);
    }
    let sup = pot.sup_tilde();
    if sup > 1e-12 {
        return Err(Error::Precondition(format!("potential has positive part, sup = {sup:.3e}")));
    }
    let (lhs, _) = integrate_atoms(pot.primal(), |x| pot.tilde(x), f64::NEG_INFINITY, f64::INFINITY);
    let mid = am(pot)?;
    let rhs = 0.5 * lhs;
    // quadrature slack: the dual trapezoid and the atom sums agree to rounding
    let slack = 1e-6 + 1e-9 * lhs.abs();
    Ok(AmBounds { lhs, mid, rhs, ok: lhs <= mid + slack && mid <= rhs + slack })
}

/// Per-level values of a `c_psi` study.
#[derive(Debug, Clone, PartialEq)]
pub struct CRow {
    pub l: f64,
    pub am: f64,
    pub am_over_l: f64,
    pub mass_deficit_c: f64,
}

/// Aubin-Mabuchi values and `c_psi` estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub am_dual: Option<f64>,
    pub am_mixed: Option<f64>,
    pub two_path_gap: Option<f64>,
    pub c_energy_slope: f64,
    pub c_mass_deficit: f64,
    pub l_schedule: Vec<f64>,
    pub rows: Vec<CRow>,
    /// `l -> am(psi_l)` is non-increasing and convex along the schedule.
    pub am_convex_decreasing: bool,
}

/// `c = lim` of a sequence behaving like `c + a / l`, from its last two terms.
fn extrapolate(l: &[f64], v: &[f64]) -> f64 {
    let n = l.len();
    let (l1, l2) = (l[n - 2], l[n - 1]);
    (l2 * v[n - 1] - l1 * v[n - 2]) / (l2 - l1)
}

/// Mass of `{psi~ - base~ <= -l}` under `MA(f0)` and `MA(psi_l)`, combined as
/// `-(1/2)(a + b)`.
fn mass_deficit_at(psi: &ToricPotential, base: &ToricPotential, psi_l: &ToricPotential, l: f64) -> f64 {
    let eps = 1e-9 * l.max(1.0);
    let inside = |x: f64| psi.primal().eval(x) - base.primal().eval(x) <= -l + eps;
    let sum = |f: &PwAffine| f.atoms().filter(|&(x, _)| inside(x)).map(|(_, m)| m).sum::<f64>();
    -0.5 * (sum(psi.geom().f0()) + sum(psi_l.primal()))
}

/// Both estimates of `c_psi` along `schedule`, relative to the bounded `base`.
pub fn c_of(psi: &ToricPotential, base: &ToricPotential, schedule: &[f64]) -> Result<EnergyReport> {
    psi.check_same(base)?;
    if schedule.len() < 3 {
        return Err(Error::ScheduleTooShort(format!(
            "need at least 3 levels, got {}",
            schedule.len()
        )));
    }
    if schedule.windows(2).any(|w| !(w[0] < w[1])) || schedule[0] <= 0.0 {
        return Err(Error::Precondition("l schedule must be positive and increasing".into()));
    }
    let am_base = am(base)?;
    let mut rows = Vec::with_capacity(schedule.len());
    for &l in schedule {
        let psi_l = cutoff(psi, l, base)?;
        let a = am(&psi_l)? - am_base;
        rows.push(CRow { l, am: a, am_over_l: a / l, mass_deficit_c: mass_deficit_at(psi, base, &psi_l, l) });
    }
    let ls: Vec<f64> = rows.iter().map(|r| r.l).collect();
    let ams: Vec<f64> = rows.iter().map(|r| r.am).collect();
    let secants: Vec<f64> = ams.windows(2).zip(ls.windows(2)).map(|(a, l)| (a[1] - a[0]) / (l[1] - l[0])).collect();
    let c_energy_slope = extrapolate(&ls[1..], &secants).clamp(-1.0, 0.0);
    let md: Vec<f64> = rows.iter().map(|r| r.mass_deficit_c).collect();
    let c_mass_deficit = extrapolate(&ls, &md).clamp(-1.0, 0.0);
    let slack = 1e-9 * ams.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    let am_convex_decreasing = secants.iter().all(|&s| s <= slack)
        && secants.windows(2).all(|w| w[1] >= w[0] - slack);
    let (am_dual, am_mixed, two_path_gap) = if psi.is_bounded() {
        let d = am(psi)?;
        let m = am_mixed(psi, psi.geom().window())?.value;
        (Some(d), Some(m), Some((d - m).abs()))
    } else {
        (None, None, None)
    };
    Ok(EnergyReport {
        am_dual,
        am_mixed,
        two_path_gap,
        c_energy_slope,
        c_mass_deficit,
        l_schedule: schedule.to_vec(),
        rows,
        am_convex_decreasing,
    })
}

/// Both class-E criteria with their raw numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub in_e: bool,
    pub deficit: f64,
    pub c_energy_slope: f64,
    pub by_mass: bool,
    pub by_slope: bool,
    /// The two criteria agree.
    pub consistent: bool,
}

/// Full mass (deficit at most one polytope cell) and vanishing `c_psi`.
pub fn is_in_e(psi: &ToricPotential, schedule: &[f64]) -> Result<Membership> {
    let geom = psi.geom();
    let deficit = psi.ma_measure(geom.window()).deficit;
    let base = ToricPotential::reference(geom.clone());
    let c = c_of(psi, &base, schedule)?.c_energy_slope;
    let by_mass = deficit <= geom.h() + 1e-12;
    let by_slope = c.abs() <= TOL_C;
    Ok(Membership {
        in_e: by_mass && by_slope,
        deficit,
        c_energy_slope: c,
        by_mass,
        by_slope,
        consistent: by_mass == by_slope,
    })
}
