use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use toricray_ffi::*;

struct Geom(*mut TrGeometry);

impl Drop for Geom {
    fn drop(&mut self) {
        unsafe { tr_geometry_free(self.0) }
    }
}

struct Pot(*mut TrPotential);

impl Drop for Pot {
    fn drop(&mut self) {
        unsafe { tr_potential_free(self.0) }
    }
}

struct Ray(*mut TrRay);

impl Drop for Ray {
    fn drop(&mut self) {
        unsafe { tr_ray_free(self.0) }
    }
}

fn geom(n: usize) -> Geom {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { tr_geometry_new(n, 40.0, 4 * n, &mut g) }, TrStatus::Ok);
    Geom(g)
}

fn zoo(g: &Geom, name: &str) -> Pot {
    let name = CString::new(name).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { tr_potential_zoo(g.0, name.as_ptr(), &mut p) }, TrStatus::Ok);
    Pot(p)
}

fn last_error() -> String {
    let p = tr_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn geometry_reports_spacing() {
    let g = geom(128);
    assert_eq!(unsafe { tr_geometry_h(g.0) }, 1.0 / 128.0);
    assert_eq!(unsafe { tr_geometry_nodes(g.0) }, 129);
    assert!(unsafe { tr_geometry_h(ptr::null()) }.is_nan());
}

#[test]
fn bad_geometry_is_an_argument_error() {
    let mut g = ptr::null_mut();
    let s = unsafe { tr_geometry_new(2, 40.0, 64, &mut g) };
    assert_eq!(s, TrStatus::InvalidArgument);
    assert!(g.is_null());
    assert!(last_error().contains("cells"));
}

#[test]
fn null_handles_are_rejected() {
    let mut out = 0.0;
    assert_eq!(unsafe { tr_am(ptr::null(), &mut out) }, TrStatus::NullPointer);
    assert!(last_error().contains("pot"));
    let g = geom(64);
    let p = zoo(&g, "ZERO");
    assert_eq!(unsafe { tr_am(p.0, ptr::null_mut()) }, TrStatus::NullPointer);
}

#[test]
fn unknown_zoo_name() {
    let g = geom(64);
    let name = CString::new("NOPE").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { tr_potential_zoo(g.0, name.as_ptr(), &mut p) }, TrStatus::InvalidArgument);
    assert!(last_error().contains("NOPE"));
}

#[test]
fn energy_of_a_constant_is_the_constant() {
    let g = geom(64);
    let z = zoo(&g, "ZERO");
    let mut shifted = ptr::null_mut();
    assert_eq!(unsafe { tr_potential_shift(z.0, -2.5, &mut shifted) }, TrStatus::Ok);
    let shifted = Pot(shifted);
    let mut e = f64::NAN;
    assert_eq!(unsafe { tr_am(shifted.0, &mut e) }, TrStatus::Ok);
    assert!((e + 2.5).abs() < 1e-12, "{e}");
    let mut v = f64::NAN;
    assert_eq!(unsafe { tr_potential_eval(shifted.0, 3.0, &mut v) }, TrStatus::Ok);
    assert!((v + 2.5).abs() < 1e-12);
}

#[test]
fn symbol_round_trip() {
    let g = geom(64);
    let nu = zoo(&g, "NU(0.3)");
    let mut buf = vec![0.0; 65];
    assert_eq!(unsafe { tr_potential_symbol(nu.0, buf.as_mut_ptr(), buf.len()) }, TrStatus::Ok);
    assert!(buf[0].is_infinite() && buf[64].is_finite());
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { tr_potential_from_symbol(g.0, buf.as_ptr(), buf.len(), &mut p) }, TrStatus::Ok);
    let p = Pot(p);
    let mut again = vec![0.0; 65];
    assert_eq!(unsafe { tr_potential_symbol(p.0, again.as_mut_ptr(), again.len()) }, TrStatus::Ok);
    assert_eq!(buf, again);
    assert_eq!(unsafe { tr_potential_symbol(p.0, again.as_mut_ptr(), 3) }, TrStatus::InvalidArgument);
}

#[test]
fn nonconvex_symbol_is_rejected() {
    let g = geom(32);
    let mut v = vec![0.0; 33];
    v[16] = 1.0;
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { tr_potential_from_symbol(g.0, v.as_ptr(), v.len(), &mut p) }, TrStatus::InvalidArgument);
    assert!(p.is_null());
}

#[test]
fn lelong_number_gives_energy_slope() {
    let g = geom(256);
    let nu = zoo(&g, "NU(0.3)");
    let z = zoo(&g, "ZERO");
    let (mut slope, mut mass) = (f64::NAN, f64::NAN);
    assert_eq!(unsafe { tr_c_psi(nu.0, z.0, &mut slope, &mut mass) }, TrStatus::Ok);
    assert!((slope + 0.15).abs() < 5e-3, "{slope}");
    assert!((mass + 0.15).abs() < 5e-3, "{mass}");
    let mut in_e = true;
    assert_eq!(unsafe { tr_is_in_e(nu.0, &mut in_e) }, TrStatus::Ok);
    assert!(!in_e);
    let einf = zoo(&g, "EINF");
    assert_eq!(unsafe { tr_is_in_e(einf.0, &mut in_e) }, TrStatus::Ok);
    assert!(in_e);
}

#[test]
fn envelope_of_full_mass_is_the_base() {
    let g = geom(128);
    let einf = zoo(&g, "EINF");
    let z = zoo(&g, "ZERO");
    let mut env = ptr::null_mut();
    assert_eq!(unsafe { tr_envelope(einf.0, z.0, &mut env) }, TrStatus::Ok);
    let env = Pot(env);
    for x in [-8.0, -1.0, 0.0, 2.5, 8.0] {
        let mut v = f64::NAN;
        assert_eq!(unsafe { tr_potential_eval(env.0, x, &mut v) }, TrStatus::Ok);
        assert!(v.abs() <= 5.0 / 128.0, "{x}: {v}");
    }
    let mut e = 0.0;
    assert_eq!(unsafe { tr_am(env.0, &mut e) }, TrStatus::InvalidArgument);
    assert!(last_error().contains("unbounded"));
}

#[test]
fn both_ray_constructions_agree() {
    let g = geom(128);
    let nu = zoo(&g, "NU(0.3)");
    let z = zoo(&g, "ZERO");
    let t: Vec<f64> = (0..=8).map(|k| k as f64).collect();
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { tr_ray_cutoff(z.0, nu.0, t.as_ptr(), t.len(), &mut a) }, TrStatus::Ok);
    assert_eq!(unsafe { tr_ray_rwn(z.0, nu.0, t.as_ptr(), t.len(), &mut b) }, TrStatus::Ok);
    let (a, b) = (Ray(a), Ray(b));
    assert_eq!(unsafe { tr_ray_len(a.0) }, 9);
    let mut d = f64::NAN;
    assert_eq!(unsafe { tr_ray_distance(a.0, b.0, &mut d) }, TrStatus::Ok);
    assert!(d <= 10.0 / 128.0, "{d}");

    let mut e = vec![0.0; 9];
    assert_eq!(unsafe { tr_ray_energies(a.0, e.as_mut_ptr(), e.len()) }, TrStatus::Ok);
    for (k, v) in e.iter().enumerate() {
        assert!((v + 0.15 * k as f64).abs() < 1e-2 * (1.0 + k as f64), "{k}: {v}");
    }

    let mut p = ptr::null_mut();
    assert_eq!(unsafe { tr_ray_potential(a.0, 9, &mut p) }, TrStatus::InvalidArgument);
    assert_eq!(unsafe { tr_ray_potential(a.0, 0, &mut p) }, TrStatus::Ok);
    drop(Pot(p));
}

#[test]
fn ray_needs_an_ordered_pair() {
    let g = geom(64);
    let z = zoo(&g, "ZERO");
    let mut up = ptr::null_mut();
    assert_eq!(unsafe { tr_potential_shift(z.0, 1.0, &mut up) }, TrStatus::Ok);
    let up = Pot(up);
    let t = [0.0, 1.0];
    let mut r = ptr::null_mut();
    assert_ne!(unsafe { tr_ray_cutoff(z.0, up.0, t.as_ptr(), t.len(), &mut r) }, TrStatus::Ok);
    assert!(r.is_null());
}

#[test]
fn freeing_null_is_a_no_op() {
    unsafe {
        tr_geometry_free(ptr::null_mut());
        tr_potential_free(ptr::null_mut());
        tr_ray_free(ptr::null_mut());
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/toricray.h");
    let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-x", "c", "-std=c11", "-Wall", "-Werror", header]).output()
    else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
