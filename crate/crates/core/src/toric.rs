//! Torus-invariant potentials on a one-dimensional toric manifold.
//!
//! A potential `phi` is stored through its symbol `g = (f0 + phi)*` on the
//! moment interval `P = [0, 1]`, where `f0` is the reference primal. The
//! primal `f = g*` is kept as an exact [`PwAffine`], so sup/inf statistics
//! over the whole orbit (window plus tails) are exact for the grid data.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convex::{
    convex_envelope, convexity_defect, difference_extrema, ExtGridFn, Grid1D, PrimalFunction,
    PwAffine, SlopeData, POS_INF, TOL_CONVEX,
};
use crate::error::{Error, Result};

/// Default polytope resolution.
pub const DEFAULT_N: usize = 1024;
/// Default half-width of the log-coordinate window.
pub const DEFAULT_L: f64 = 40.0;
/// Default number of window cells.
pub const DEFAULT_M: usize = 4096;
/// Largest accepted gap between a tail slope and the outermost window slope.
pub const TOL_SLOPE: f64 = 1e-6;

fn xlogx(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t * t.ln()
    }
}

/// Reference symbol `p log p + (1 - p) log(1 - p)`.
pub fn entropy(p: f64) -> f64 {
    xlogx(p) + xlogx(1.0 - p)
}

/// Polytope grid, log-coordinate window and the reference potential.
#[derive(Debug, Clone)]
pub struct ToricGeometry {
    grid: Grid1D,
    window: Grid1D,
    g0: ExtGridFn,
    f0: PwAffine,
}

impl ToricGeometry {
    /// `n` polytope cells, window `[-half_width, half_width]` with `m` cells.
    pub fn new(n: usize, half_width: f64, m: usize) -> Result<Arc<Self>> {
        let grid = Grid1D::unit(n)?;
        let window = Grid1D::window(half_width, m)?;
        let g0 = ExtGridFn::from_fn(grid, entropy)?;
        let f0 = PwAffine::from_dual(&g0);
        Ok(Arc::new(Self { grid, window, g0, f0 }))
    }

    pub fn desk() -> Arc<Self> {
        Self::new(DEFAULT_N, DEFAULT_L, DEFAULT_M).expect("default geometry is valid")
    }

    pub fn dim(&self) -> usize {
        1
    }

    pub fn vol(&self) -> f64 {
        1.0
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn window(&self) -> &Grid1D {
        &self.window
    }

    /// Polytope spacing.
    pub fn h(&self) -> f64 {
        self.grid.spacing()
    }

    /// Window spacing.
    pub fn h_x(&self) -> f64 {
        self.window.spacing()
    }

    pub fn g0(&self) -> &ExtGridFn {
        &self.g0
    }

    pub fn f0(&self) -> &PwAffine {
        &self.f0
    }

    /// Reference primal sampled on the window, with tails from the polytope.
    pub fn f0_primal(&self) -> PrimalFunction {
        let values = self.f0.eval_sorted(&self.window.nodes());
        PrimalFunction::new_unchecked(self.window, values, SlopeData { slope_left: 0.0, slope_right: 1.0 })
            .expect("reference primal is finite")
    }

    pub fn same_as(&self, other: &ToricGeometry) -> bool {
        self.grid.same_as(&other.grid) && self.window.same_as(&other.window)
    }
}

/// Torus fixed points of the one-dimensional model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vertex {
    Low,
    High,
}

/// An ω₀-psh torus-invariant potential, stored by its symbol.
#[derive(Debug, Clone)]
pub struct ToricPotential {
    geom: Arc<ToricGeometry>,
    dual: ExtGridFn,
    primal: PwAffine,
}

impl PartialEq for ToricPotential {
    fn eq(&self, other: &Self) -> bool {
        self.geom.same_as(&other.geom) && self.dual == other.dual
    }
}

impl ToricPotential {
    /// Rejects symbols that are not convex within `TOL_CONVEX` of their scale.
    pub fn new(geom: Arc<ToricGeometry>, dual: ExtGridFn) -> Result<Self> {
        if !dual.grid().same_as(geom.grid()) {
            return Err(Error::Mismatch("symbol does not live on the polytope grid".into()));
        }
        let defect = convexity_defect(&dual);
        let tol = TOL_CONVEX * dual.scale();
        if defect > tol {
            return Err(Error::NotConvex { defect, tol });
        }
        let primal = PwAffine::from_dual(&dual);
        Ok(Self { geom, dual, primal })
    }

    /// Closed convex hull of `dual`; the grid version of usc regularization.
    pub fn from_hull(geom: Arc<ToricGeometry>, dual: &ExtGridFn) -> Result<Self> {
        Self::new(geom, convex_envelope(dual))
    }

    pub fn reference(geom: Arc<ToricGeometry>) -> Self {
        let dual = geom.g0.clone();
        Self::new(geom, dual).expect("reference symbol is convex")
    }

    pub fn geom(&self) -> &Arc<ToricGeometry> {
        &self.geom
    }

    pub fn dual(&self) -> &ExtGridFn {
        &self.dual
    }

    pub fn primal(&self) -> &PwAffine {
        &self.primal
    }

    pub fn is_bounded(&self) -> bool {
        self.dual.is_finite_everywhere()
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if !self.geom.same_as(&other.geom) {
            return Err(Error::Mismatch("potentials use different geometries".into()));
        }
        Ok(())
    }

    /// `phi + c`.
    pub fn shift(&self, c: f64) -> Self {
        let dual = self.dual.add_const(-c).expect("shift keeps the domain");
        let primal = PwAffine::from_dual(&dual);
        Self { geom: self.geom.clone(), dual, primal }
    }

    /// `phi~(x) = f(x) - f0(x)`.
    pub fn tilde(&self, x: f64) -> f64 {
        self.primal.eval(x) - self.geom.f0.eval(x)
    }

    /// `phi~` at the nodes of `window`.
    pub fn tilde_on(&self, window: &Grid1D) -> Vec<f64> {
        let xs = window.nodes();
        let f = self.primal.eval_sorted(&xs);
        let f0 = self.geom.f0.eval_sorted(&xs);
        f.iter().zip(&f0).map(|(a, b)| a - b).collect()
    }

    /// Exact `(inf, sup)` of `phi~` over the orbit.
    pub fn tilde_extrema(&self) -> (f64, f64) {
        difference_extrema(&self.primal, &self.geom.f0)
    }

    pub fn sup_tilde(&self) -> f64 {
        self.tilde_extrema().1
    }

    pub fn inf_tilde(&self) -> f64 {
        self.tilde_extrema().0
    }

    /// Exact `(inf, sup)` of `self - other` over the orbit.
    pub fn difference_extrema(&self, other: &Self) -> (f64, f64) {
        difference_extrema(&self.primal, &other.primal)
    }

    /// Primal `f = f0 + phi~` on `window` with tails from the ends of the symbol's domain.
    ///
    /// Fails with a required-width hint when the window does not reach the
    /// affine regime of `f`.
    pub fn to_primal(&self, window: &Grid1D) -> Result<PrimalFunction> {
        let f = self.primal_unchecked(window);
        let mismatch = f.tail_mismatch();
        if mismatch > TOL_SLOPE {
            return Err(Error::WindowTooSmall {
                what: format!("tail slopes off by {mismatch:.3e}"),
                window: window.hi().max(-window.lo()),
                required: self.primal.required_half_width(),
            });
        }
        Ok(f)
    }

    /// Same as [`to_primal`](Self::to_primal) without the tail check.
    pub fn primal_unchecked(&self, window: &Grid1D) -> PrimalFunction {
        let values = self.primal.eval_sorted(&window.nodes());
        let tails = SlopeData { slope_left: self.primal.slope_low(), slope_right: self.primal.slope_high() };
        PrimalFunction::new_unchecked(*window, values, tails).expect("primal values are finite")
    }

    /// Lelong number at a torus fixed point, in the normalization `x = log|z|`.
    pub fn lelong(&self, vertex: Vertex) -> f64 {
        let (lo, hi) = self.dual.dom_bounds();
        match vertex {
            Vertex::Low => lo,
            Vertex::High => 1.0 - hi,
        }
    }

    /// Monge-Ampère measure of `f` on `window`.
    pub fn ma_measure(&self, window: &Grid1D) -> MeasureReport {
        let xs = window.nodes();
        let f = self.primal.eval_sorted(&xs);
        let h = window.spacing();
        let n = f.len() - 1;
        let mut density = vec![0.0; f.len()];
        for i in 1..n {
            density[i] = ((f[i - 1] - 2.0 * f[i] + f[i + 1]) / (h * h)).max(0.0);
        }
        let interior: f64 = density.iter().sum::<f64>() * h;
        let first = (f[1] - f[0]) / h;
        let last = (f[n] - f[n - 1]) / h;
        // the half-cells at the window edges plus the atoms beyond them
        let left = first - self.primal.slope_low();
        let right = self.primal.slope_high() - last;
        let mass = interior + left + right;
        MeasureReport { density, mass, deficit: self.geom.vol() - mass, outside: [left, right] }
    }
}

/// Monge-Ampère density on a window plus the mass carried outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport {
    pub density: Vec<f64>,
    pub mass: f64,
    pub deficit: f64,
    /// Mass left of and right of the interior window nodes.
    pub outside: [f64; 2],
}

/// Pointwise max; the symbol is the hull of the pointwise min of symbols.
pub fn toric_max(a: &ToricPotential, b: &ToricPotential) -> Result<ToricPotential> {
    a.check_same(b)?;
    let lower = a.dual.pointwise_min(&b.dual)?;
    ToricPotential::from_hull(a.geom.clone(), &lower)
}

/// `max(base - l, psi)`.
pub fn cutoff(psi: &ToricPotential, l: f64, base: &ToricPotential) -> Result<ToricPotential> {
    if !(l >= 0.0) {
        return Err(Error::Precondition(format!("cutoff level must be >= 0, got {l}")));
    }
    if !base.is_bounded() {
        return Err(Error::Unbounded);
    }
    toric_max(&base.shift(-l), psi)
}

/// Named potentials spanning the regimes the checks distinguish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Zoo {
    /// The reference potential.
    Zero,
    /// The constant `c`.
    Const(f64),
    /// Symbol `g0` on `[nu, 1]`: Lelong number `nu` at the low vertex.
    Nu(f64),
    /// Symbol `g0 + 1/p - 1`: unbounded with full mass.
    Einf,
    /// A random bounded potential.
    Bump(u64),
}

impl Zoo {
    pub fn potential(&self, geom: &Arc<ToricGeometry>) -> Result<ToricPotential> {
        let grid = *geom.grid();
        let dual = match *self {
            Zoo::Zero => geom.g0.clone(),
            Zoo::Const(c) => geom.g0.add_const(-c)?,
            Zoo::Nu(nu) => {
                if !(0.0..1.0).contains(&nu) {
                    return Err(Error::InvalidFunction(format!("NU needs 0 <= nu < 1, got {nu}")));
                }
                let k = grid.ceil_index(nu);
                ExtGridFn::new(
                    grid,
                    (0..grid.n_nodes())
                        .map(|i| if i < k { POS_INF } else { entropy(grid.node(i)) })
                        .collect(),
                )?
            }
            Zoo::Einf => ExtGridFn::from_fn(grid, |p| {
                if p <= 0.0 {
                    POS_INF
                } else {
                    entropy(p) + 1.0 / p - 1.0
                }
            })?,
            Zoo::Bump(seed) => {
                let bump = BumpCoefficients::from_seed(seed);
                ExtGridFn::from_fn(grid, |p| entropy(p) + bump.eval(p))?
            }
        };
        ToricPotential::new(geom.clone(), dual)
    }

    /// Zoo entries exercised by the verification suites.
    pub fn catalogue() -> Vec<Zoo> {
        vec![
            Zoo::Zero,
            Zoo::Const(-5.0),
            Zoo::Const(1.0),
            Zoo::Nu(0.1),
            Zoo::Nu(0.3),
            Zoo::Nu(0.6),
            Zoo::Einf,
            Zoo::Bump(1),
            Zoo::Bump(2),
        ]
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Zoo::Zero => "reference potential (symbol g0)",
            Zoo::Const(_) => "constant c (symbol g0 - c)",
            Zoo::Nu(_) => "Lelong number nu at the low vertex, not in E",
            Zoo::Einf => "unbounded, Lelong number 0, full mass",
            Zoo::Bump(_) => "random bounded perturbation of the reference",
        }
    }
}

impl fmt::Display for Zoo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Zoo::Zero => write!(f, "ZERO"),
            Zoo::Const(c) => write!(f, "CONST({c})"),
            Zoo::Nu(nu) => write!(f, "NU({nu})"),
            Zoo::Einf => write!(f, "EINF"),
            Zoo::Bump(seed) => write!(f, "BUMP({seed})"),
        }
    }
}

impl FromStr for Zoo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidFunction(format!("unknown potential `{s}`"));
        let (name, arg) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], Some(&s[i + 1..s.len() - 1])),
            Some(_) => return Err(bad()),
            None => (s, None),
        };
        let num = |a: Option<&str>| -> Result<f64> {
            a.ok_or_else(bad)?.trim().parse::<f64>().map_err(|_| bad())
        };
        match name.to_ascii_uppercase().as_str() {
            "ZERO" if arg.is_none() => Ok(Zoo::Zero),
            "EINF" if arg.is_none() => Ok(Zoo::Einf),
            "CONST" => Ok(Zoo::Const(num(arg)?)),
            "NU" => Ok(Zoo::Nu(num(arg)?)),
            "BUMP" => Ok(Zoo::Bump(
                arg.ok_or_else(bad)?.trim().parse::<u64>().map_err(|_| bad())?,
            )),
            _ => Err(bad()),
        }
    }
}

/// `eta(p) = c0 + c1 p + sum_k a_k cos(k pi p)` with `|a_k| (k pi)^2 <= 1`.
///
/// Since `g0'' >= 4` on `[0, 1]` and the three cosine terms contribute at
/// most 3 to `|eta''|`, `g0 + eta` stays strictly convex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpCoefficients {
    pub c0: f64,
    pub c1: f64,
    pub a: [f64; 3],
}

impl BumpCoefficients {
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c0 = rng.gen_range(-1.0..1.0);
        let c1 = rng.gen_range(-0.5..0.5);
        let mut a = [0.0; 3];
        for (k, ak) in a.iter_mut().enumerate() {
            let w = ((k + 1) as f64 * std::f64::consts::PI).powi(2);
            *ak = rng.gen_range(-1.0..1.0) / w;
        }
        Self { c0, c1, a }
    }

    pub fn eval(&self, p: f64) -> f64 {
        let waves: f64 = self
            .a
            .iter()
            .enumerate()
            .map(|(k, ak)| ak * ((k + 1) as f64 * std::f64::consts::PI * p).cos())
            .sum();
        self.c0 + self.c1 * p + waves
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom() -> Arc<ToricGeometry> {
        ToricGeometry::new(256, 40.0, 1024).unwrap()
    }

    #[test]
    fn reference_has_zero_tilde() {
        let g = geom();
        let zero = Zoo::Zero.potential(&g).unwrap();
        assert_eq!(zero.tilde_extrema(), (0.0, 0.0));
        let c = Zoo::Const(2.5).potential(&g).unwrap();
        let (inf, sup) = c.tilde_extrema();
        assert!((inf - 2.5).abs() < 1e-12 && (sup - 2.5).abs() < 1e-12);
    }

    #[test]
    fn reference_primal_at_origin() {
        let g = ToricGeometry::desk();
        assert!((g.f0().eval(0.0) - std::f64::consts::LN_2).abs() < 1e-6);
    }

    #[test]
    fn zoo_names_round_trip() {
        for z in Zoo::catalogue() {
            assert_eq!(z.to_string().parse::<Zoo>().unwrap(), z);
        }
        assert!("NU(x)".parse::<Zoo>().is_err());
        assert!("ZERO(1)".parse::<Zoo>().is_err());
    }

    #[test]
    fn bumps_are_convex_and_bounded() {
        let g = geom();
        for seed in 0..20 {
            let b = Zoo::Bump(seed).potential(&g).unwrap();
            assert!(b.is_bounded());
        }
    }

    #[test]
    fn singular_potential_slope_and_mass() {
        let g = geom();
        let nu = Zoo::Nu(0.3).potential(&g).unwrap();
        let h = g.h();
        assert!((nu.lelong(Vertex::Low) - 0.3).abs() <= h);
        assert_eq!(nu.lelong(Vertex::High), 0.0);
        // asymptote fit on the far left of the window
        let x = [-40.0, -30.0];
        let slope = (nu.tilde(x[1]) - nu.tilde(x[0])) / (x[1] - x[0]);
        assert!((slope - 0.3).abs() <= 2.0 * h);
        let m = nu.ma_measure(g.window());
        assert!((m.mass - 0.7).abs() <= h);
        assert!((m.deficit - 0.3).abs() <= h);
    }

    #[test]
    fn einf_is_unbounded_with_sublinear_decay() {
        let g = ToricGeometry::desk();
        let e = Zoo::Einf.potential(&g).unwrap();
        assert!(!e.is_bounded());
        assert!(e.lelong(Vertex::Low) <= g.h());
        // continuum oracle: brute sup over a fine slope grid minus log(1 + e^x)
        for x in [-10.0_f64, -20.0, -40.0] {
            let sup = (1..=200_000)
                .map(|k| {
                    let p = k as f64 / 200_000.0;
                    p * x - entropy(p) - 1.0 / p + 1.0
                })
                .fold(f64::NEG_INFINITY, f64::max);
            let oracle = sup - x.exp().ln_1p();
            assert!((e.tilde(x) - oracle).abs() < 1e-3, "x={x}");
            // leading behaviour -2 sqrt(|x|) up to O(1)
            assert!((e.tilde(x) + 2.0 * x.abs().sqrt()).abs() < 2.0);
        }
        let m = e.ma_measure(g.window());
        assert!(m.deficit <= g.h() + 1e-12);
    }

    #[test]
    fn max_is_idempotent_and_ordered() {
        let g = geom();
        let b = Zoo::Bump(4).potential(&g).unwrap();
        assert_eq!(toric_max(&b, &b).unwrap(), b);
        assert_eq!(toric_max(&b, &b.shift(-1.0)).unwrap(), b);
    }

    #[test]
    fn cutoff_of_constants() {
        let g = geom();
        let zero = Zoo::Zero.potential(&g).unwrap();
        let m5 = Zoo::Const(-5.0).potential(&g).unwrap();
        let cut = cutoff(&m5, 3.0, &zero).unwrap();
        let (inf, sup) = cut.tilde_extrema();
        assert!((inf + 3.0).abs() < 1e-12 && (sup + 3.0).abs() < 1e-12);
        assert_eq!(cutoff(&m5, 10.0, &zero).unwrap(), m5);
    }

    #[test]
    fn primal_window_check_reports_required_width() {
        let g = geom();
        let e = Zoo::Einf.potential(&g).unwrap();
        match e.to_primal(g.window()) {
            Err(Error::WindowTooSmall { required, .. }) => assert!(required > 40.0),
            other => panic!("expected a window error, got {other:?}"),
        }
        let b = Zoo::Bump(3).potential(&g).unwrap();
        assert!(b.to_primal(g.window()).is_ok());
    }
}
