//! Verification suites: every module invariant measured across the zoo.
//!
//! Tolerances written `k h` use the polytope spacing `h = 1 / N` for symbol
//! and ray comparisons and the window spacing `h_x = 2L / M` for envelope
//! comparisons of primals on the window.

use std::str::FromStr;
use std::sync::Arc;

use crate::convex::{convex_envelope, legendre, legendre_brute, PrimalFunction};
use crate::energy::{am, am_bounds_check, am_difference, am_mixed, c_of, default_l_schedule, is_in_e};
use crate::envelopes::{
    default_c_schedule, domination_check, e_check, maximality_defect, p_bracket, p_iterate, proj, restrict_symbol,
    Obstacle,
};
use crate::error::{Error, Result};
use crate::geodesics::{endpoint_slope_inf, endpoint_slope_sup, hcma_oracle, normalize, segment, uniform_samples};
use crate::rays::{build_ray, default_ray_schedule, default_ray_times, max_abs_diff, membership_check, ray_energy_profile};
use crate::report::{fmt_float, Check, RunReport, Table};
use crate::rwn::{compare_rays, default_tau_samples, ray_legendre, rwn_ray, test_curve};
use crate::toric::{toric_max, ToricGeometry, ToricPotential, Vertex, Zoo, DEFAULT_L, DEFAULT_N};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub n: usize,
    pub half_width: f64,
    /// Window cells; kept at `4 n` unless set explicitly.
    pub m: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self::new(DEFAULT_N, DEFAULT_L)
    }
}

impl VerifyConfig {
    pub fn new(n: usize, half_width: f64) -> Self {
        Self { n, half_width, m: 4 * n }
    }

    fn geometry(&self, n: usize) -> Result<Arc<ToricGeometry>> {
        ToricGeometry::new(n, self.half_width, self.m * n / self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Convex,
    Toric,
    Energy,
    Geodesics,
    Rays,
    Envelopes,
    Rwn,
}

impl Suite {
    pub const MODULES: [Suite; 7] =
        [Suite::Convex, Suite::Toric, Suite::Energy, Suite::Geodesics, Suite::Rays, Suite::Envelopes, Suite::Rwn];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Convex => "convex",
            Suite::Toric => "toric",
            Suite::Energy => "energy",
            Suite::Geodesics => "geodesics",
            Suite::Rays => "rays",
            Suite::Envelopes => "envelopes",
            Suite::Rwn => "rwn",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        std::iter::once(Suite::All)
            .chain(Suite::MODULES)
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown suite `{s}`")))
    }
}

/// Runs one suite, or all of them in module order.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<RunReport> {
    let started = std::time::Instant::now();
    let geom = cfg.geometry(cfg.n)?;
    if !cfg.n.is_multiple_of(4) || cfg.n < 32 {
        return Err(Error::InvalidGrid(format!("verification needs N divisible by 4 and at least 32, got {}", cfg.n)));
    }
    let ctx = Ctx { cfg: *cfg, geom };
    let mut report = RunReport::new(format!("verify {}", suite.name()), (cfg.n, cfg.half_width, cfg.m));
    let selected: Vec<Suite> = if suite == Suite::All { Suite::MODULES.to_vec() } else { vec![suite] };
    for s in selected {
        match s {
            Suite::Convex => convex_suite(&ctx, &mut report),
            Suite::Toric => toric_suite(&ctx, &mut report),
            Suite::Energy => energy_suite(&ctx, &mut report),
            Suite::Geodesics => geodesics_suite(&ctx, &mut report),
            Suite::Rays => rays_suite(&ctx, &mut report),
            Suite::Envelopes => envelopes_suite(&ctx, &mut report),
            Suite::Rwn => rwn_suite(&ctx, &mut report),
            Suite::All => unreachable!(),
        }
    }
    report.wall_clock = Some(started.elapsed());
    Ok(report)
}

struct Ctx {
    cfg: VerifyConfig,
    geom: Arc<ToricGeometry>,
}

impl Ctx {
    fn h(&self) -> f64 {
        self.geom.h()
    }

    fn h_x(&self) -> f64 {
        self.geom.h_x()
    }

    fn zoo(&self, z: Zoo) -> Result<ToricPotential> {
        z.potential(&self.geom)
    }
}

/// Checks and tables collected by one guarded computation.
#[derive(Default)]
struct Sink {
    checks: Vec<Check>,
    tables: Vec<Table>,
}

impl Sink {
    fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    fn table(&mut self, t: Table) {
        self.tables.push(t);
    }
}

/// Runs `f`, recording a failed check named `name` if it errors.
fn guard(report: &mut RunReport, suite: &str, name: &str, f: impl FnOnce(&mut Sink) -> Result<()>) {
    let mut sink = Sink::default();
    let res = f(&mut sink);
    report.checks.extend(sink.checks);
    report.tables.extend(sink.tables);
    if let Err(e) = res {
        report.checks.push(Check::failed(suite, name, &e));
    }
}

/// `psi` shifted down until `psi <= phi`.
pub fn below(psi: &ToricPotential, phi: &ToricPotential) -> ToricPotential {
    let (_, sup) = psi.difference_extrema(phi);
    psi.shift(-sup.max(0.0))
}

fn window_gap(a: &ToricPotential, b: &ToricPotential) -> f64 {
    let w = a.geom().window();
    max_abs_diff(&a.tilde_on(w), &b.tilde_on(w))
}

const C_ZOO: [Zoo; 5] = [Zoo::Const(-5.0), Zoo::Nu(0.1), Zoo::Nu(0.3), Zoo::Nu(0.6), Zoo::Einf];

fn convex_suite(ctx: &Ctx, report: &mut RunReport) {
    const S: &str = "convex";
    let grid = *ctx.geom.grid();
    let window = *ctx.geom.window();
    let primal = |z: Zoo| -> Result<PrimalFunction> { ctx.zoo(z)?.to_primal(&window) };
    guard(report, S, "legendre_fast_vs_brute", |out| {
        let mut worst = 0.0_f64;
        for seed in 1..=5 {
            let f = primal(Zoo::Bump(seed))?;
            let a = legendre(&f, &grid)?;
            let b = legendre_brute(&f, &grid)?;
            for (x, y) in a.values().iter().zip(b.values()) {
                worst = worst.max((x - y).abs() / (1.0 + x.abs()));
            }
        }
        out.push(Check::at_most(S, "legendre_fast_vs_brute", worst, 1e-12));
        Ok(())
    });
    guard(report, S, "legendre_order_reversal", |out| {
        let mut worst = f64::NEG_INFINITY;
        for seed in 1..=5 {
            let u = ctx.zoo(Zoo::Bump(seed))?;
            let v = toric_max(&u, &ctx.zoo(Zoo::Bump(seed + 10))?)?;
            let lu = legendre(&u.to_primal(&window)?, &grid)?;
            let lv = legendre(&v.to_primal(&window)?, &grid)?;
            for (a, b) in lu.values().iter().zip(lv.values()) {
                worst = worst.max(b - a);
            }
        }
        out.push(Check::at_most(S, "legendre_order_reversal", worst, 0.0));
        Ok(())
    });
    guard(report, S, "legendre_shift_covariance", |out| {
        let mut worst = 0.0_f64;
        let f = primal(Zoo::Bump(3))?;
        let base = legendre(&f, &grid)?;
        for c in [-2.5, 0.75, 4.0] {
            let shifted = PrimalFunction::new(window, f.values().iter().map(|v| v + c).collect(), f.tails())?;
            let g = legendre(&shifted, &grid)?;
            for (a, b) in g.values().iter().zip(base.values()) {
                worst = worst.max((a - (b - c)).abs());
            }
        }
        out.push(Check::at_most(S, "legendre_shift_covariance", worst, 1e-12));
        Ok(())
    });
    guard(report, S, "envelope_idempotent", |out| {
        let mut exact = true;
        for seed in 1..=5 {
            let raw = ctx.zoo(Zoo::Bump(seed))?.dual().pointwise_min(ctx.zoo(Zoo::Bump(seed + 5))?.dual())?;
            let once = convex_envelope(&raw);
            exact &= convex_envelope(&once) == once;
        }
        out.push(Check::holds(S, "envelope_idempotent", exact));
        Ok(())
    });
}

fn toric_suite(ctx: &Ctx, report: &mut RunReport) {
    const S: &str = "toric";
    let h = ctx.h();
    for nu in [0.1, 0.3, 0.6] {
        let name = format!("mass_deficit_equals_lelong/NU({nu})");
        guard(report, S, &name, |out| {
            let p = ctx.zoo(Zoo::Nu(nu))?;
            let m = p.ma_measure(ctx.geom.window());
            out.push(Check::at_most(S, name.clone(), (m.deficit - nu).abs(), h));
            out.push(Check::at_most(S, format!("lelong_number/NU({nu})"), (p.lelong(Vertex::Low) - nu).abs(), h));
            Ok(())
        });
    }
    guard(report, S, "full_mass/EINF", |out| {
        let p = ctx.zoo(Zoo::Einf)?;
        out.push(Check::at_most(S, "full_mass/EINF", p.ma_measure(ctx.geom.window()).deficit, h + 1e-12));
        Ok(())
    });
    guard(report, S, "max_idempotent", |out| {
        let mut exact = true;
        for z in Zoo::catalogue() {
            let p = ctx.zoo(z)?;
            exact &= toric_max(&p, &p)? == p;
        }
        out.push(Check::holds(S, "max_idempotent", exact));
        Ok(())
    });
}

fn energy_suite(ctx: &Ctx, report: &mut RunReport) {
    const S: &str = "energy";
    let zero = ToricPotential::reference(ctx.geom.clone());
    guard(report, S, "am_bounds_nonpositive", |out| {
        let mut worst = f64::NEG_INFINITY;
        for seed in 100..120 {
            let b = ctx.zoo(Zoo::Bump(seed))?;
            let u = b.shift(-b.sup_tilde());
            let r = am_bounds_check(&u)?;
            worst = worst.max(r.lhs - r.mid).max(r.mid - r.rhs);
        }
        out.push(Check::at_most(S, "am_bounds_nonpositive", worst, 1e-6));
        Ok(())
    });
    guard(report, S, "am_constant_shift", |out| {
        let mut worst = 0.0_f64;
        for seed in 1..=5 {
            let u = ctx.zoo(Zoo::Bump(seed))?;
            for c in [-2.5, 1.25] {
                worst = worst.max((am(&u.shift(c))? - am(&u)? - c).abs());
            }
        }
        out.push(Check::at_most(S, "am_constant_shift", worst, 1e-12));
        Ok(())
    });
    guard(report, S, "am_three_path", |out| {
        let mut worst = 0.0_f64;
        for seed in 1..=10 {
            let u = ctx.zoo(Zoo::Bump(seed))?;
            let v = ctx.zoo(Zoo::Bump(seed + 10))?;
            let d = am(&u)?;
            worst = worst.max((d - am_mixed(&u, ctx.geom.window())?.value).abs());
            worst = worst.max((d - am(&v)? - am_difference(&u, &v)?).abs());
        }
        out.push(Check::at_most(S, "am_three_path", worst, 5e-3));
        Ok(())
    });
    guard(report, S, "am_strictly_monotone", |out| {
        let mut least = f64::INFINITY;
        let mut equal_is_zero = true;
        for seed in 1..=5 {
            let v = ctx.zoo(Zoo::Bump(seed))?;
            let w = ctx.zoo(Zoo::Bump(seed + 20))?;
            let u = proj(&ctx.geom, &Obstacle::Min(vec![Obstacle::Potential(v.clone()), Obstacle::Potential(w)]))?;
            if window_gap(&u, &v) > 0.0 {
                least = least.min(am(&v)? - am(&u)?);
            }
            equal_is_zero &= am(&v)? - am(&v.clone())? == 0.0;
        }
        out.push(Check::at_least(S, "am_strictly_monotone", least, 1e-12));
        out.push(Check::holds(S, "am_equal_for_equal", equal_is_zero));
        Ok(())
    });
    let schedule = default_l_schedule();
    let bump_base = ctx.zoo(Zoo::Bump(1));
    for z in C_ZOO {
        let tag = format!("c_two_path/{z}");
        guard(report, S, &tag, |out| {
            let psi = ctx.zoo(z)?;
            let r = c_of(&psi, &zero, &schedule)?;
            out.push(Check::at_most(S, tag.clone(), (r.c_energy_slope - r.c_mass_deficit).abs(), 1e-2));
            if let Zoo::Nu(nu) = z {
                out.push(Check::at_most(S, format!("c_equals_minus_half_lelong/{z}"), (r.c_energy_slope + nu / 2.0).abs(), 1e-2));
                if nu == 0.3 {
                    let mut table = Table::new("c_study", &["l", "am_over_l", "mass_deficit_c"]);
                    for row in &r.rows {
                        table.push_floats(&[row.l, row.am_over_l, row.mass_deficit_c]);
                    }
                    out.table(table);
                }
            }
            let base = bump_base.clone()?;
            let other = c_of(&psi, &base, &schedule)?;
            out.push(Check::at_most(
                S,
                format!("c_base_independent/{z}"),
                (r.c_energy_slope - other.c_energy_slope).abs(),
                2e-3,
            ));
            out.push(Check::holds(S, format!("am_cutoff_convex_decreasing/{z}"), r.am_convex_decreasing));
            let m = is_in_e(&psi, &schedule)?;
            out.push(Check::holds(S, format!("e_criteria_agree/{z}"), m.consistent));
            Ok(())
        });
    }
}

fn geodesics_suite(ctx: &Ctx, report: &mut RunReport) {
    const S: &str = "geodesics";
    let (h, window) = (ctx.h(), *ctx.geom.window());
    let t33 = uniform_samples(0.0, 1.0, 33);
    guard(report, S, "segment_energy_affine", |out| {
        let mut dev = 0.0_f64;
        let mut spread = 0.0_f64;
        let mut lip = f64::NEG_INFINITY;
        let mut energy = Table::new("segment_energy", &["t", "am", "am_chord_dev"]);
        let mut quotients = Table::new("segment_quotients", &["a", "b", "inf_q", "sup_q"]);
        for k in 0..20u64 {
            let a = ctx.zoo(Zoo::Bump(10 + 2 * k))?;
            let b = ctx.zoo(Zoo::Bump(11 + 2 * k))?;
            let path = segment(&a, &b, &t33)?;
            let mixed: Vec<f64> =
                path.potentials().iter().map(|p| am_mixed(p, &window).map(|m| m.value)).collect::<Result<_>>()?;
            let (e0, e1) = (mixed[0], mixed[mixed.len() - 1]);
            for (i, (&t, &e)) in t33.iter().zip(&mixed).enumerate() {
                let d = e - (e0 + (e1 - e0) * t);
                dev = dev.max(d.abs());
                if k == 0 {
                    energy.push_floats(&[t, path.energies()?[i], d]);
                }
            }
            let (si, ss) = path.quotient_spread();
            spread = spread.max(si).max(ss);
            lip = lip.max(path.lipschitz_excess(&window, 5.0 * h));
            if k == 0 {
                for (a, b, lo, hi) in path.all_quotients() {
                    quotients.push_floats(&[a, b, lo, hi]);
                }
            }
        }
        out.push(Check::at_most(S, "segment_energy_affine", dev, 5e-3));
        out.push(Check::at_most(S, "segment_quotient_spread", spread, 5.0 * h));
        out.push(Check::at_most(S, "segment_lipschitz_excess", lip, 0.0));
        out.table(energy);
        out.table(quotients);
        Ok(())
    });
    guard(report, S, "oracle_agreement", |out| {
        let t5 = uniform_samples(0.0, 1.0, 5);
        let mut table = Table::new("oracle_refinement", &["n", "error", "error_over_h"]);
        let mut errors = Vec::new();
        for n in [ctx.cfg.n / 4, ctx.cfg.n / 2, ctx.cfg.n] {
            let g = ctx.cfg.geometry(n)?;
            let a = Zoo::Bump(1).potential(&g)?;
            let b = Zoo::Bump(2).potential(&g)?;
            let e = hcma_oracle(&a, &b, &t5, g.window())?.distance_to(&segment(&a, &b, &t5)?)?;
            table.push_floats(&[n as f64, e, e / g.h()]);
            out.push(Check::at_most(S, format!("oracle_agreement/N={n}"), e, g.h()));
            errors.push(e);
        }
        for k in 1..errors.len() {
            out.push(Check::at_least(S, format!("oracle_refinement_ratio/{k}"), errors[k - 1] / errors[k], 1.7));
        }
        out.table(table);
        Ok(())
    });
    guard(report, S, "normalization", |out| {
        let a = ctx.zoo(Zoo::Bump(1))?;
        let b = ctx.zoo(Zoo::Bump(2))?;
        let n = normalize(&segment(&a, &b, &t33)?, 1e-9)?;
        out.push(Check::at_most(S, "normalization", n.big_m().abs().max((n.m() + 1.0).abs()), 1e-9));
        Ok(())
    });
    guard(report, S, "endpoint_slopes", |out| {
        let mut worst = 0.0_f64;
        for seed in 1..=5 {
            let a = ctx.zoo(Zoo::Bump(seed))?;
            let b = ctx.zoo(Zoo::Bump(seed + 5))?;
            let (lo, lo_target) = endpoint_slope_inf(&a, &b, 1e-4)?;
            let (hi, hi_target) = endpoint_slope_sup(&a, &b, 1e-4)?;
            worst = worst.max((lo - lo_target).abs()).max((hi - hi_target).abs());
        }
        out.push(Check::at_most(S, "endpoint_slopes", worst, 5.0 * h));
        Ok(())
    });
}

fn rays_suite(ctx: &Ctx, report: &mut RunReport) {
    const S: &str = "rays";
    let (h, h_x, window) = (ctx.h(), ctx.h_x(), *ctx.geom.window());
    let zero = ToricPotential::reference(ctx.geom.clone());
    for z in Zoo::catalogue() {
        let tag = format!("ray/{z}");
        guard(report, S, &tag, |out| {
            let psi = below(&ctx.zoo(z)?, &zero);
            let ray = build_ray(&zero, &psi, &default_ray_schedule(), &default_ray_times(), 5.0 * h)?;
            out.push(Check::at_most(S, format!("monotone_in_l/{z}"), ray.monotone_violation, 1e-9));
            out.push(Check::at_most(S, format!("limit_converged/{z}"), ray.limit_gap, 5.0 * h));
            let c = c_of(&psi, &zero, &default_l_schedule())?.c_energy_slope;
            let profile = ray_energy_profile(&ray)?;
            out.push(Check::at_most(S, format!("energy_law/{z}"), profile.law_deviation(c), 1e-2));
            let constant = ray.distance_from_start(&window) <= 5.0 * h_x;
            let in_e = is_in_e(&psi, &default_l_schedule())?.in_e;
            let c_zero = c.abs() <= 5e-3;
            out.push(Check::holds(S, format!("constant_iff_full_mass_iff_zero_c/{z}"), constant == in_e && in_e == c_zero));
            let m = membership_check(&ray, None, 5.0 * h_x)?;
            out.push(Check::holds(S, format!("membership/{z}"), m.ok));
            let (si, ss) = ray.path.quotient_spread();
            out.push(Check::at_most(S, format!("quotient_spread/{z}"), si.max(ss), 5.0 * h));
            out.push(Check::at_most(S, format!("lipschitz_excess/{z}"), ray.path.lipschitz_excess(&window, 5.0 * h), 0.0));
            if z == Zoo::Nu(0.3) {
                let mut t = Table::new("ray_energy", &["t", "am", "am_chord_dev"]);
                for ((tt, a), d) in profile.t.iter().zip(&profile.am).zip(profile.chord_deviation()) {
                    t.push_floats(&[*tt, *a, d]);
                }
                out.table(t);
            }
            Ok(())
        });
    }
}

fn envelopes_suite(ctx: &Ctx, report: &mut RunReport) {
    const S: &str = "envelopes";
    let (h, h_x) = (ctx.h(), ctx.h_x());
    let zero = ToricPotential::reference(ctx.geom.clone());
    let cases = [
        (Zoo::Einf, Zoo::Zero),
        (Zoo::Einf, Zoo::Bump(1)),
        (Zoo::Const(-5.0), Zoo::Zero),
        (Zoo::Const(1.0), Zoo::Bump(2)),
    ];
    for (zp, zf) in cases {
        let tag = format!("e_check/{zp}/{zf}");
        guard(report, S, &tag, |out| {
            let phi = ctx.zoo(zf)?;
            let psi = below(&ctx.zoo(zp)?, &phi);
            let r = e_check(&psi, &phi, &default_l_schedule(), 5.0 * h_x)?;
            out.push(Check::at_most(S, tag.clone(), r.gap, 5.0 * h_x));
            Ok(())
        });
    }
    guard(report, S, "e_check_edge_gap/NU(0.3)/ZERO", |out| {
        let psi = ctx.zoo(Zoo::Nu(0.3))?;
        let r = e_check(&psi, &zero, &default_l_schedule(), 5.0 * h_x)?;
        out.push(Check::at_least(S, "e_check_edge_gap/NU(0.3)/ZERO", r.edge_gap, 0.3 * ctx.cfg.half_width * 0.5));
        Ok(())
    });
    for z in Zoo::catalogue() {
        let tag = format!("maximality_defect/{z}");
        guard(report, S, &tag, |out| {
            let psi = below(&ctx.zoo(z)?, &zero);
            let (defect, mass) = maximality_defect(&psi, &zero)?;
            out.push(Check::at_most(S, tag.clone(), defect, 5.0 * h_x * mass));
            Ok(())
        });
    }
    guard(report, S, "transform_fixed_point", |out| {
        let psi = ctx.zoo(Zoo::Nu(0.3))?;
        let ray = build_ray(&zero, &psi, &default_ray_schedule(), &default_ray_times(), 5.0 * h)?;
        let mut worst = 0.0_f64;
        for tau in [-0.8, -0.5, -0.2] {
            let star = ray_legendre(&ray.path, tau)?.ok_or(Error::EmptyDomain)?;
            for c in [2.0, 8.0, 32.0] {
                worst = worst.max(window_gap(&p_iterate(&star, &zero, c)?, &star));
            }
        }
        out.push(Check::at_most(S, "transform_fixed_point", worst, 5.0 * h));
        Ok(())
    });
    guard(report, S, "proj_algebra", |out| {
        let mut idempotent = true;
        let mut monotone = true;
        for seed in 1..=5 {
            let a = ctx.zoo(Zoo::Bump(seed))?;
            let b = ctx.zoo(Zoo::Bump(seed + 5))?;
            let p = proj(&ctx.geom, &Obstacle::Potential(a.clone()))?;
            idempotent &= p == a && proj(&ctx.geom, &Obstacle::Potential(p.clone()))? == p;
            let lower = proj(&ctx.geom, &Obstacle::Min(vec![Obstacle::Potential(a.clone()), Obstacle::Potential(b)]))?;
            monotone &= lower.dual().values().iter().zip(p.dual().values()).all(|(l, u)| l >= u);
        }
        out.push(Check::holds(S, "proj_idempotent", idempotent));
        out.push(Check::holds(S, "proj_monotone", monotone));
        Ok(())
    });
    let phi = ctx.zoo(Zoo::Bump(1));
    for z in Zoo::catalogue() {
        let tag = format!("bracket/{z}");
        guard(report, S, &tag, |out| {
            let phi = phi.clone()?;
            let psi = ctx.zoo(z)?;
            let r = p_bracket(&psi, &phi, &default_c_schedule(), 5.0 * h)?;
            out.push(Check::at_most(S, format!("bracket_two_path/{z}"), r.closed_form_gap, 5.0 * h));
            out.push(Check::at_most(S, format!("bracket_monotone_in_c/{z}"), r.monotone_violation, 1e-12));
            let mut invariant = true;
            for c in [-3.0, 2.0] {
                let s = p_bracket(&psi.shift(c), &phi, &default_c_schedule(), 5.0 * h)?;
                invariant &= s.result.dual().values() == r.result.dual().values();
            }
            out.push(Check::holds(S, format!("bracket_shift_invariant/{z}"), invariant));
            Ok(())
        });
    }
    guard(report, S, "domination", |out| {
        let mut ok = true;
        for seed in 1..=5 {
            let u = ctx.zoo(Zoo::Bump(seed))?;
            let v = ctx.zoo(Zoo::Bump(seed + 5))?;
            ok &= domination_check(&u, &v, 1e-9)?.ok && domination_check(&u, &below(&v, &u), 1e-9)?.ok;
        }
        out.push(Check::holds(S, "domination", ok));
        Ok(())
    });
}

fn rwn_suite(ctx: &Ctx, report: &mut RunReport) {
    const S: &str = "rwn";
    let h = ctx.h();
    let t = default_ray_times();
    let mut table = Table::new("rwn_refinement", &["psi", "n", "window_gap", "gap_over_h"]);
    for z in Zoo::catalogue() {
        let tag = format!("rwn/{z}");
        guard(report, S, &tag, |out| {
            let mut gaps = Vec::new();
            for n in [ctx.cfg.n / 4, ctx.cfg.n / 2, ctx.cfg.n] {
                let g = ctx.cfg.geometry(n)?;
                let phi = ToricPotential::reference(g.clone());
                let psi = below(&z.potential(&g)?, &phi);
                let a = build_ray(&phi, &psi, &default_ray_schedule(), &t, 5.0 * g.h())?;
                let b = rwn_ray(&phi, &psi, &default_tau_samples(n), &t)?;
                let gap = compare_rays(&a.path, &b.path)?.window_gap;
                table.push(vec![z.to_string(), n.to_string(), fmt_float(gap), fmt_float(gap / g.h())]);
                gaps.push(gap);
                if n != ctx.cfg.n {
                    continue;
                }
                out.push(Check::at_most(S, format!("rwn_equals_cutoff_ray/{z}"), gap, 10.0 * h));
                let ordering = a
                    .potentials()
                    .iter()
                    .zip(b.potentials())
                    .flat_map(|(u, r)| {
                        let w = g.window();
                        let (uu, rr) = (u.tilde_on(w), r.tilde_on(w));
                        uu.into_iter().zip(rr).map(|(x, y)| y - x).collect::<Vec<_>>()
                    })
                    .fold(f64::NEG_INFINITY, f64::max);
                out.push(Check::at_most(S, format!("rwn_below_members/{z}"), ordering, 5.0 * h));
                let dev = b.path.am_chord_deviation()?.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
                out.push(Check::at_most(S, format!("rwn_energy_affine/{z}"), dev, 5e-3));
                let mut round_trip = 0.0_f64;
                for tau in [-0.75, -0.5, -0.25] {
                    let back = ray_legendre(&b.path, tau)?;
                    let expected = match b.curve.domain_at(tau)? {
                        Some((first, last)) => Some(restrict_symbol(&phi, first, last)?),
                        None => None,
                    };
                    round_trip = round_trip.max(match (back, expected) {
                        (Some(x), Some(y)) => window_gap(&x, &y),
                        (None, None) => 0.0,
                        _ => f64::INFINITY,
                    });
                }
                out.push(Check::at_most(S, format!("transform_round_trip/{z}"), round_trip, 10.0 * h));
                let tc = test_curve(&phi, &psi, &default_tau_samples(n))?.tc_prop()?;
                out.push(Check::at_most(S, format!("curve_equals_phi_below_minus_one/{z}"), tc.phi_gap, 1e-12));
                out.push(Check::at_most(S, format!("curve_at_zero_equals_psi/{z}"), tc.psi_gap.unwrap_or(f64::NAN), 5.0 * h));
                out.push(Check::holds(S, format!("curve_bottom_above_zero/{z}"), tc.bottom_above_zero));
                out.push(Check::at_most(S, format!("curve_concave_in_tau/{z}"), tc.concavity_defect, 5.0 * h));
            }
            let ratio = (1..gaps.len())
                .map(|k| if gaps[k - 1] <= 1e-12 { f64::INFINITY } else { gaps[k - 1] / gaps[k] })
                .fold(f64::INFINITY, f64::min);
            out.push(Check::at_least(S, format!("rwn_refinement_ratio/{z}"), ratio, 1.5));
            Ok(())
        });
    }
    report.tables.push(table);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in std::iter::once(Suite::All).chain(Suite::MODULES) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}
