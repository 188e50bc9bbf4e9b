//! C ABI for the toricray workbench.
//!
//! Every object crosses the boundary as an opaque pointer created by a
//! `tr_*_new`-style constructor and released with the matching `tr_*_free`.
//! Fallible calls return a [`TrStatus`]; on failure the message is available
//! from [`tr_last_error_message`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use toricray::energy::{am, c_of, default_l_schedule, is_in_e};
use toricray::envelopes::{default_c_schedule, p_bracket};
use toricray::geodesics::GeodesicPath;
use toricray::rays::{build_ray, default_ray_schedule};
use toricray::rwn::{compare_rays, default_tau_samples, rwn_ray};
use toricray::toric::{ToricGeometry, ToricPotential, Zoo};
use toricray::convex::ExtGridFn;
use toricray::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    WindowTooSmall = 3,
    NotConverged = 4,
    Inconsistent = 5,
    Panic = 6,
}

/// Polytope grid, primal window and reference potential.
pub struct TrGeometry(Arc<ToricGeometry>);

/// A torus-invariant potential stored through its symbol.
pub struct TrPotential(ToricPotential);

/// A sampled ray or segment.
pub struct TrRay(GeodesicPath);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> TrStatus {
    match err {
        Error::WindowTooSmall { .. } => TrStatus::WindowTooSmall,
        Error::NotConverged(_) | Error::ScheduleTooShort(_) => TrStatus::NotConverged,
        Error::Inconsistent(_) => TrStatus::Inconsistent,
        _ => TrStatus::InvalidArgument,
    }
}

enum Fail {
    Null(&'static str),
    Arg(String),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TrStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            TrStatus::NullPointer
        }
        Ok(Err(Fail::Arg(msg))) => {
            set_error(msg);
            TrStatus::InvalidArgument
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            TrStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null("out"));
    }
    *out = value;
    Ok(())
}

/// Message of the last failing call on this thread, or null.
///
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Creates a geometry with `n` polytope cells and `m` cells on `[-half_width, half_width]`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn tr_geometry_new(n: usize, half_width: f64, m: usize, out: *mut *mut TrGeometry) -> TrStatus {
    guard(|| put(out, TrGeometry(ToricGeometry::new(n, half_width, m)?)))
}

/// # Safety
/// `geom` must be null or a pointer returned by `tr_geometry_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tr_geometry_free(geom: *mut TrGeometry) {
    if !geom.is_null() {
        drop(Box::from_raw(geom));
    }
}

/// Polytope spacing `1/N`, or NaN for a null handle.
///
/// # Safety
/// `geom` must be null or a live geometry handle.
#[no_mangle]
pub unsafe extern "C" fn tr_geometry_h(geom: *const TrGeometry) -> f64 {
    geom.as_ref().map_or(f64::NAN, |g| g.0.h())
}

/// Number of symbol nodes (`N + 1`), or 0 for a null handle.
///
/// # Safety
/// `geom` must be null or a live geometry handle.
#[no_mangle]
pub unsafe extern "C" fn tr_geometry_nodes(geom: *const TrGeometry) -> usize {
    geom.as_ref().map_or(0, |g| g.0.grid().n_nodes())
}

/// Builds a catalogue potential such as `"NU(0.3)"`, `"EINF"` or `"BUMP(7)"`.
///
/// # Safety
/// `geom` must be a live geometry handle, `name` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tr_potential_zoo(
    geom: *const TrGeometry,
    name: *const c_char,
    out: *mut *mut TrPotential,
) -> TrStatus {
    guard(|| {
        let g = get(geom, "geom")?;
        if name.is_null() {
            return Err(Fail::Null("name"));
        }
        let name = CStr::from_ptr(name).to_str().map_err(|_| Fail::Arg("name is not UTF-8".into()))?;
        let zoo: Zoo = name.parse().map_err(|e: Error| Fail::Arg(e.to_string()))?;
        put(out, TrPotential(zoo.potential(&g.0)?))
    })
}

/// Builds a potential from its symbol at the `N + 1` polytope nodes.
///
/// `+inf` marks nodes outside the effective domain. The values must be convex.
///
/// # Safety
/// `values` must point to `len` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_potential_from_symbol(
    geom: *const TrGeometry,
    values: *const f64,
    len: usize,
    out: *mut *mut TrPotential,
) -> TrStatus {
    guard(|| {
        let g = get(geom, "geom")?;
        let v = slice(values, len, "values")?;
        let dual = ExtGridFn::new(*g.0.grid(), v.to_vec())?;
        put(out, TrPotential(ToricPotential::new(g.0.clone(), dual)?))
    })
}

/// # Safety
/// `pot` must be null or a live potential handle.
#[no_mangle]
pub unsafe extern "C" fn tr_potential_free(pot: *mut TrPotential) {
    if !pot.is_null() {
        drop(Box::from_raw(pot));
    }
}

/// `pot + c` as a new handle.
///
/// # Safety
/// `pot` must be a live potential handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tr_potential_shift(pot: *const TrPotential, c: f64, out: *mut *mut TrPotential) -> TrStatus {
    guard(|| {
        let p = get(pot, "pot")?;
        if !c.is_finite() {
            return Err(Fail::Arg("shift must be finite".into()));
        }
        put(out, TrPotential(p.0.shift(c)))
    })
}

/// Copies the symbol into `values`, which must hold `N + 1` doubles.
///
/// # Safety
/// `values` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tr_potential_symbol(pot: *const TrPotential, values: *mut f64, len: usize) -> TrStatus {
    guard(|| {
        let p = get(pot, "pot")?;
        let src = p.0.dual().values();
        if len != src.len() {
            return Err(Fail::Arg(format!("buffer holds {len} values, symbol has {}", src.len())));
        }
        if values.is_null() {
            return Err(Fail::Null("values"));
        }
        std::slice::from_raw_parts_mut(values, len).copy_from_slice(src);
        Ok(())
    })
}

/// Relative potential `phi~(x) = f(x) - f0(x)` at a real point `x`.
///
/// # Safety
/// `pot` must be a live potential handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tr_potential_eval(pot: *const TrPotential, x: f64, out: *mut f64) -> TrStatus {
    guard(|| {
        let p = get(pot, "pot")?;
        if !x.is_finite() {
            return Err(Fail::Arg("x must be finite".into()));
        }
        write(out, p.0.tilde(x))
    })
}

/// Aubin-Mabuchi energy of a bounded potential.
///
/// # Safety
/// `pot` must be a live potential handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tr_am(pot: *const TrPotential, out: *mut f64) -> TrStatus {
    guard(|| write(out, am(&get(pot, "pot")?.0)?))
}

/// Energy-slope and mass-deficit estimates of `c_psi` relative to `phi`.
///
/// # Safety
/// Both handles must be live; `c_slope` and `c_mass` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_c_psi(
    psi: *const TrPotential,
    phi: *const TrPotential,
    c_slope: *mut f64,
    c_mass: *mut f64,
) -> TrStatus {
    guard(|| {
        let r = c_of(&get(psi, "psi")?.0, &get(phi, "phi")?.0, &default_l_schedule())?;
        write(c_slope, r.c_energy_slope)?;
        write(c_mass, r.c_mass_deficit)
    })
}

/// Full-mass membership; fails with `Inconsistent` when the two criteria disagree.
///
/// # Safety
/// `psi` must be a live potential handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tr_is_in_e(psi: *const TrPotential, out: *mut bool) -> TrStatus {
    guard(|| {
        let m = is_in_e(&get(psi, "psi")?.0, &default_l_schedule())?;
        if !m.consistent {
            return Err(Error::Inconsistent(format!(
                "mass deficit {:.3e} and energy slope {:.3e} disagree",
                m.deficit, m.c_energy_slope
            ))
            .into());
        }
        write(out, m.in_e)
    })
}

/// Envelope `P[psi](phi)`.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tr_envelope(
    psi: *const TrPotential,
    phi: *const TrPotential,
    out: *mut *mut TrPotential,
) -> TrStatus {
    guard(|| {
        let phi = &get(phi, "phi")?.0;
        let tol = 5.0 * phi.geom().h();
        let r = p_bracket(&get(psi, "psi")?.0, phi, &default_c_schedule(), tol)?;
        put(out, TrPotential(r.result))
    })
}

/// Ray from `phi` towards the singularity type of `psi <= phi`, by cutoffs.
///
/// # Safety
/// Both handles must be live, `t` must point to `nt` readable doubles and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_ray_cutoff(
    phi: *const TrPotential,
    psi: *const TrPotential,
    t: *const f64,
    nt: usize,
    out: *mut *mut TrRay,
) -> TrStatus {
    guard(|| {
        let phi = &get(phi, "phi")?.0;
        let t = slice(t, nt, "t")?;
        let ray = build_ray(phi, &get(psi, "psi")?.0, &default_ray_schedule(), t, 5.0 * phi.geom().h())?;
        put(out, TrRay(ray.path))
    })
}

/// The same ray built through the Legendre transform in time of the test curve.
///
/// # Safety
/// Same as `tr_ray_cutoff`.
#[no_mangle]
pub unsafe extern "C" fn tr_ray_rwn(
    phi: *const TrPotential,
    psi: *const TrPotential,
    t: *const f64,
    nt: usize,
    out: *mut *mut TrRay,
) -> TrStatus {
    guard(|| {
        let phi = &get(phi, "phi")?.0;
        let t = slice(t, nt, "t")?;
        let n = phi.geom().grid().n_cells();
        let ray = rwn_ray(phi, &get(psi, "psi")?.0, &default_tau_samples(n), t)?;
        put(out, TrRay(ray.path))
    })
}

/// # Safety
/// `ray` must be null or a live ray handle.
#[no_mangle]
pub unsafe extern "C" fn tr_ray_free(ray: *mut TrRay) {
    if !ray.is_null() {
        drop(Box::from_raw(ray));
    }
}

/// Number of time samples, or 0 for a null handle.
///
/// # Safety
/// `ray` must be null or a live ray handle.
#[no_mangle]
pub unsafe extern "C" fn tr_ray_len(ray: *const TrRay) -> usize {
    ray.as_ref().map_or(0, |r| r.0.len())
}

/// Copy of the potential at sample `k`.
///
/// # Safety
/// `ray` must be a live ray handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tr_ray_potential(ray: *const TrRay, k: usize, out: *mut *mut TrPotential) -> TrStatus {
    guard(|| {
        let r = get(ray, "ray")?;
        let p = r.0.potentials().get(k).ok_or_else(|| Fail::Arg(format!("sample {k} out of range")))?;
        put(out, TrPotential(p.clone()))
    })
}

/// Energies along the ray into `values`, which must hold `tr_ray_len` doubles.
///
/// # Safety
/// `values` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tr_ray_energies(ray: *const TrRay, values: *mut f64, len: usize) -> TrStatus {
    guard(|| {
        let e = get(ray, "ray")?.0.energies()?;
        if len != e.len() {
            return Err(Fail::Arg(format!("buffer holds {len} values, ray has {}", e.len())));
        }
        if values.is_null() {
            return Err(Fail::Null("values"));
        }
        std::slice::from_raw_parts_mut(values, len).copy_from_slice(&e);
        Ok(())
    })
}

/// Largest window distance between two rays sampled at the same times.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tr_ray_distance(a: *const TrRay, b: *const TrRay, out: *mut f64) -> TrStatus {
    guard(|| write(out, compare_rays(&get(a, "a")?.0, &get(b, "b")?.0)?.window_gap))
}
