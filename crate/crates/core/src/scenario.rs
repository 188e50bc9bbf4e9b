//! JSON scenarios: parsing, validation and execution.
//!
//! See `docs/scenario.md` for the schema.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::Deserialize;

use crate::convex::{ExtGridFn, POS_INF};
use crate::energy::{c_of, default_l_schedule};
use crate::envelopes::{default_c_schedule, e_check, maximality_defect, p_bracket};
use crate::error::Error;
use crate::geodesics::{segment, uniform_samples, GeodesicPath};
use crate::rays::{build_ray, default_ray_schedule, default_ray_times, max_abs_diff, ray_energy_profile};
use crate::report::{Check, RunReport, Table};
use crate::rwn::{default_tau_samples, rwn_ray};
use crate::toric::{ToricGeometry, ToricPotential, Vertex, Zoo, DEFAULT_L, DEFAULT_M, DEFAULT_N};
use crate::verify::{run_suite, Suite, VerifyConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{0}")]
    Input(String),
    #[error("cannot write outputs: {0}")]
    Io(#[from] std::io::Error),
}

impl From<Error> for ScenarioError {
    fn from(e: Error) -> Self {
        ScenarioError::Input(e.to_string())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default)]
    pub geometry: GeometrySpec,
    pub task: Task,
    pub phi: Option<PotentialSpec>,
    pub phi0: Option<PotentialSpec>,
    pub phi1: Option<PotentialSpec>,
    pub psi: Option<PotentialSpec>,
    #[serde(default)]
    pub schedules: Schedules,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySpec {
    pub dim: usize,
    pub n: usize,
    pub window: f64,
    pub m: usize,
}

impl Default for GeometrySpec {
    fn default() -> Self {
        Self { dim: 1, n: DEFAULT_N, window: DEFAULT_L, m: DEFAULT_M }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Segment,
    Ray,
    Envelope,
    ECheck,
    RwnCompare,
    VerifyAll,
}

/// A zoo name, a shifted zoo entry, or an explicit table of symbol values
/// (`null` for `+inf`).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PotentialSpec {
    Name(String),
    Shifted { zoo: String, shift: f64 },
    Table { dual: Vec<Option<f64>> },
}

impl PotentialSpec {
    fn build(&self, geom: &Arc<ToricGeometry>) -> Result<ToricPotential, ScenarioError> {
        match self {
            PotentialSpec::Name(s) => Ok(s.parse::<Zoo>()?.potential(geom)?),
            PotentialSpec::Shifted { zoo, shift } => Ok(zoo.parse::<Zoo>()?.potential(geom)?.shift(*shift)),
            PotentialSpec::Table { dual } => {
                let values: Vec<f64> = dual.iter().map(|v| v.unwrap_or(POS_INF)).collect();
                let g = ExtGridFn::new(*geom.grid(), values)?;
                Ok(ToricPotential::new(geom.clone(), g)?)
            }
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Schedules {
    pub l: Option<Vec<f64>>,
    pub c: Option<Vec<f64>>,
    pub tau: Option<Vec<f64>>,
    pub t: Option<Vec<f64>>,
}

/// Tolerances; `*_h` entries are multiples of the grid spacing.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub am_chord: f64,
    pub energy_law: f64,
    pub quotient_h: f64,
    pub envelope_hx: f64,
    pub ray_h: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { am_chord: 5e-3, energy_law: 1e-2, quotient_h: 5.0, envelope_hx: 5.0, ray_h: 10.0 }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    /// Relative paths resolve against the scenario file's directory.
    pub dir: Option<PathBuf>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| ScenarioError::Input(format!("scenario: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |m: String| Err(ScenarioError::Input(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", self.schema_version));
        }
        if self.geometry.dim != 1 {
            return bad(format!("geometry.dim = {}: only dim 1 scenarios are supported", self.geometry.dim));
        }
        let t = self.tolerances;
        for (name, v) in [
            ("am_chord", t.am_chord),
            ("energy_law", t.energy_law),
            ("quotient_h", t.quotient_h),
            ("envelope_hx", t.envelope_hx),
            ("ray_h", t.ray_h),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("tolerances.{name} must be positive, got {v}"));
            }
        }
        let need = |field: &str, v: &Option<PotentialSpec>| match v {
            Some(_) => Ok(()),
            None => Err(ScenarioError::Input(format!("task {:?} needs field `{field}`", self.task))),
        };
        match self.task {
            Task::Segment => {
                need("phi0", &self.phi0)?;
                need("phi1", &self.phi1)?;
            }
            Task::Ray | Task::Envelope | Task::ECheck | Task::RwnCompare => need("psi", &self.psi)?,
            Task::VerifyAll => {}
        }
        Ok(())
    }

    fn geometry(&self) -> Result<Arc<ToricGeometry>, ScenarioError> {
        let g = self.geometry;
        Ok(ToricGeometry::new(g.n, g.window, g.m)?)
    }
}

/// Parses, runs and writes the outputs of the scenario at `path`.
pub fn run_scenario(path: &Path) -> Result<(RunReport, Vec<PathBuf>), ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ScenarioError::Input(format!("cannot read {}: {e}", path.display())))?;
    let scenario = Scenario::parse(&text)?;
    let report = execute(&scenario)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let dir = match &scenario.output.dir {
        Some(d) => base.join(d),
        None => {
            let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "scenario".into());
            base.join(format!("{stem}_out"))
        }
    };
    let written = report.write(&dir)?;
    Ok((report, written))
}

pub fn execute(s: &Scenario) -> Result<RunReport, ScenarioError> {
    let start = Instant::now();
    let geom = s.geometry()?;
    let g = s.geometry;
    let mut report = RunReport::new(format!("{:?}", s.task), (g.n, g.window, g.m));
    let pot = |spec: &Option<PotentialSpec>, default: Zoo| -> Result<ToricPotential, ScenarioError> {
        match spec {
            Some(p) => p.build(&geom),
            None => Ok(default.potential(&geom)?),
        }
    };
    match s.task {
        Task::Segment => {
            let a = pot(&s.phi0, Zoo::Zero)?;
            let b = pot(&s.phi1, Zoo::Zero)?;
            let t = s.schedules.t.clone().unwrap_or_else(|| uniform_samples(0.0, 1.0, 33));
            let path = segment(&a, &b, &t)?;
            path_checks(&mut report, "segment", &path, s)?;
        }
        Task::Ray => {
            let phi = pot(&s.phi, Zoo::Zero)?;
            let psi = pot(&s.psi, Zoo::Zero)?;
            let l = s.schedules.l.clone().unwrap_or_else(default_ray_schedule);
            let t = s.schedules.t.clone().unwrap_or_else(default_ray_times);
            let tol = s.tolerances;
            let c = c_of(&psi, &phi, &default_l_schedule())?;
            let mut study = Table::new("c_study", &["l", "am_over_l", "mass_deficit_c"]);
            for r in &c.rows {
                study.push_floats(&[r.l, r.am_over_l, r.mass_deficit_c]);
            }
            report.tables.push(study);
            let ray = build_ray(&phi, &psi, &l, &t, tol.quotient_h * geom.h())?;
            report.checks.push(Check::at_most("ray", "monotone_in_l", ray.monotone_violation, 1e-9));
            report.checks.push(Check::at_most("ray", "limit_converged", ray.limit_gap, tol.quotient_h * geom.h()));
            match ray_energy_profile(&ray) {
                Ok(p) => {
                    report.checks.push(Check::at_most(
                        "ray",
                        "energy_law",
                        p.law_deviation(c.c_energy_slope),
                        tol.energy_law,
                    ));
                    let mut energy = Table::new("energy", &["t", "am", "am_chord_dev"]);
                    for ((t, a), d) in p.t.iter().zip(&p.am).zip(p.chord_deviation()) {
                        energy.push_floats(&[*t, *a, d]);
                    }
                    report.tables.push(energy);
                    let mut slope = Table::new("am_slope", &["am_slope", "c_energy_slope", "c_mass_deficit"]);
                    slope.push_floats(&[p.slope, c.c_energy_slope, c.c_mass_deficit]);
                    report.tables.push(slope);
                }
                Err(e) => report.checks.push(Check::failed("ray", "energy_law", &e)),
            }
            quotient_checks(&mut report, "ray", &ray.path, s)?;
        }
        Task::Envelope => {
            let phi = pot(&s.phi, Zoo::Zero)?;
            let psi = pot(&s.psi, Zoo::Zero)?;
            let cs = s.schedules.c.clone().unwrap_or_else(default_c_schedule);
            let tol = s.tolerances.envelope_hx * geom.h_x();
            match p_bracket(&psi, &phi, &cs, tol) {
                Ok(r) => {
                    report.checks.push(Check::at_most("envelope", "two_path_gap", r.closed_form_gap, tol));
                    report.checks.push(Check::at_most("envelope", "monotone_in_c", r.monotone_violation, 1e-12));
                    let (defect, mass) = maximality_defect(&psi, &phi)?;
                    report.checks.push(Check::at_most("envelope", "maximality_defect", defect, tol * mass));
                    let w = geom.window();
                    let mut t = Table::new("envelope", &["x", "phi_tilde", "psi_tilde", "envelope_tilde"]);
                    let (a, b, c) = (phi.tilde_on(w), psi.tilde_on(w), r.result.tilde_on(w));
                    for (i, x) in w.nodes().into_iter().enumerate() {
                        t.push_floats(&[x, a[i], b[i], c[i]]);
                    }
                    report.tables.push(t);
                }
                Err(e) => report.checks.push(Check::failed("envelope", "two_path_gap", &e)),
            }
        }
        Task::ECheck => {
            let phi = pot(&s.phi, Zoo::Zero)?;
            let psi = pot(&s.psi, Zoo::Zero)?;
            let tol = s.tolerances.envelope_hx * geom.h_x();
            match e_check(&psi, &phi, &default_l_schedule(), tol) {
                Ok(r) => {
                    report.checks.push(Check::holds("e_check", "criteria_agree", true));
                    if r.membership.in_e {
                        report.checks.push(Check::at_most("e_check", "envelope_gap", r.gap, tol));
                    } else {
                        let nu = psi.lelong(Vertex::Low).max(psi.lelong(Vertex::High));
                        let floor = 0.5 * nu * geom.window().lo().abs();
                        report.checks.push(Check::at_least("e_check", "edge_gap", r.edge_gap, floor));
                    }
                    let mut t = Table::new("e_check", &["in_e", "mass_deficit", "c_energy_slope", "gap", "edge_gap"]);
                    let flag = if r.membership.in_e { 1.0 } else { 0.0 };
                    t.push_floats(&[flag, r.membership.deficit, r.membership.c_energy_slope, r.gap, r.edge_gap]);
                    report.tables.push(t);
                }
                Err(e) => report.checks.push(Check::failed("e_check", "criteria_agree", &e)),
            }
        }
        Task::RwnCompare => {
            let phi = pot(&s.phi, Zoo::Zero)?;
            let psi = pot(&s.psi, Zoo::Zero)?;
            let t = s.schedules.t.clone().unwrap_or_else(default_ray_times);
            let tau = s.schedules.tau.clone().unwrap_or_else(|| default_tau_samples(g.n));
            let l = s.schedules.l.clone().unwrap_or_else(default_ray_schedule);
            let a = build_ray(&phi, &psi, &l, &t, s.tolerances.quotient_h * geom.h())?;
            let b = rwn_ray(&phi, &psi, &tau, &t)?;
            let w = geom.window();
            let mut table = Table::new("rwn_compare", &["t", "am_cutoff", "am_rwn", "window_gap"]);
            let (ea, eb) = (a.path.energies()?, b.path.energies()?);
            let mut worst = 0.0_f64;
            for (k, (u, v)) in a.potentials().iter().zip(b.potentials()).enumerate() {
                let gap = max_abs_diff(&u.tilde_on(w), &v.tilde_on(w));
                worst = worst.max(gap);
                table.push_floats(&[t[k], ea[k], eb[k], gap]);
            }
            report.tables.push(table);
            report.checks.push(Check::at_most("rwn_compare", "ray_gap", worst, s.tolerances.ray_h * geom.h()));
        }
        Task::VerifyAll => {
            let mut cfg = VerifyConfig::new(g.n, g.window);
            cfg.m = g.m;
            let r = run_suite(Suite::All, &cfg)?;
            report.checks = r.checks;
            report.tables = r.tables;
        }
    }
    report.wall_clock = Some(start.elapsed());
    Ok(report)
}

fn path_checks(report: &mut RunReport, suite: &str, path: &GeodesicPath, s: &Scenario) -> Result<(), ScenarioError> {
    let dev = path.am_chord_deviation()?;
    let mut energy = Table::new("energy", &["t", "am", "am_chord_dev"]);
    for ((t, a), d) in path.t_samples().iter().zip(path.energies()?).zip(&dev) {
        energy.push_floats(&[*t, a, *d]);
    }
    report.tables.push(energy);
    let worst = dev.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    report.checks.push(Check::at_most(suite, "am_affine", worst, s.tolerances.am_chord));
    quotient_checks(report, suite, path, s)
}

fn quotient_checks(report: &mut RunReport, suite: &str, path: &GeodesicPath, s: &Scenario) -> Result<(), ScenarioError> {
    let geom = path.start().geom();
    let tol = s.tolerances.quotient_h * geom.h();
    let mut q = Table::new("quotients", &["a", "b", "inf_q", "sup_q"]);
    for (a, b, lo, hi) in path.all_quotients() {
        q.push_floats(&[a, b, lo, hi]);
    }
    report.tables.push(q);
    let (si, ss) = path.quotient_spread();
    report.checks.push(Check::at_most(suite, "quotient_spread", si.max(ss), tol));
    report.checks.push(Check::at_most(suite, "lipschitz_excess", path.lipschitz_excess(geom.window(), tol), 0.0));
    Ok(())
}
