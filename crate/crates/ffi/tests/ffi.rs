use std::ffi::{CStr, CString};
use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::ptr;

use marchenko_ffi::*;

fn last_error() -> String {
    let p = mk_last_error_message();
    assert!(!p.is_null(), "expected an error message");
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { mk_string_free(p) };
    s
}

fn robin(theta: f64) -> *mut MkScattering {
    let mut pot = ptr::null_mut();
    let mut bc = ptr::null_mut();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(mk_potential_zero(1, 40.0, &mut pot), MkStatus::MkOk);
        assert_eq!(mk_boundary_from_angles(1, &theta, &mut bc), MkStatus::MkOk);
        assert_eq!(mk_direct(pot, bc, ptr::null(), &mut s), MkStatus::MkOk);
        mk_potential_free(pot);
        mk_boundary_free(bc);
    }
    s
}

#[test]
fn robin_data_through_the_c_api() {
    let theta = PI / 4.0;
    let s = robin(theta);
    unsafe {
        assert_eq!(mk_scattering_dim(s), 1);
        assert_eq!(mk_scattering_len(s), 2048);
        assert_eq!(mk_scattering_bound_count(s), 1);
        let (mut kappa, mut mult, mut re, mut im) = (0.0, 0usize, 0.0, 0.0);
        assert_eq!(mk_scattering_bound_state(s, 0, &mut kappa, &mut mult, &mut re, &mut im), MkStatus::MkOk);
        assert!((kappa - 1.0).abs() < 1e-10 && mult == 1);
        assert!((re - 2f64.sqrt()).abs() < 1e-10 && im.abs() < 1e-10);

        let (mut k, mut sre, mut sim) = (0.0, 0.0, 0.0);
        assert_eq!(mk_scattering_point(s, 1500, &mut k, &mut sre, &mut sim), MkStatus::MkOk);
        // -(1 - ik)/(1 + ik) for θ = π/4
        let d = 1.0 + k * k;
        let (ere, eim) = (-(1.0 - k * k) / d, 2.0 * k / d);
        assert!((sre - ere).abs() < 1e-10 && (sim - eim).abs() < 1e-10, "{sre} {sim} vs {ere} {eim}");

        let mut json = ptr::null_mut();
        assert_eq!(mk_scattering_to_json(s, &mut json), MkStatus::MkOk);
        let text = CString::new(take_string(json)).unwrap();
        let mut back = ptr::null_mut();
        assert_eq!(mk_scattering_from_json(text.as_ptr(), &mut back), MkStatus::MkOk);
        assert_eq!(mk_scattering_len(back), 2048);
        mk_scattering_free(back);

        let mut rec = ptr::null_mut();
        assert_eq!(mk_invert(s, ptr::null(), &mut rec), MkStatus::MkOk);
        let mut pot = ptr::null_mut();
        assert_eq!(mk_recovered_potential(rec, &mut pot), MkStatus::MkOk);
        let mut v = 1.0;
        assert_eq!(mk_potential_eval(pot, 1.0, &mut v, ptr::null_mut()), MkStatus::MkOk);
        assert!(v.abs() < 1e-4, "V(1) = {v}");
        let (mut got, mut want) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(mk_recovered_boundary(rec, &mut got), MkStatus::MkOk);
        assert_eq!(mk_boundary_from_angles(1, &theta, &mut want), MkStatus::MkOk);
        let mut dist = 1.0;
        assert_eq!(mk_boundary_distance(got, want, &mut dist), MkStatus::MkOk);
        assert!(dist < 1e-9, "distance {dist}");
        let mut rjson = ptr::null_mut();
        assert_eq!(mk_recovered_to_json(rec, &mut rjson), MkStatus::MkOk);
        assert!(take_string(rjson).contains("\"diagnostics\""));

        let mut verdict = MkVerdict::MkFail;
        let mut report = ptr::null_mut();
        assert_eq!(mk_validate(s, ptr::null(), &mut verdict, &mut report), MkStatus::MkOk);
        assert_eq!(verdict, MkVerdict::MkPass);
        assert!(take_string(report).contains("levinson"));

        mk_boundary_free(got);
        mk_boundary_free(want);
        mk_potential_free(pot);
        mk_recovered_free(rec);
        mk_scattering_free(s);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        assert_eq!(mk_potential_zero(1, 1.0, ptr::null_mut()), MkStatus::MkNullPointer);
        assert!(last_error().contains("null"));

        let zeros = [0.0f64; 4];
        let mut bc = ptr::null_mut();
        assert_eq!(
            mk_boundary_new(2, zeros.as_ptr(), ptr::null(), zeros.as_ptr(), ptr::null(), &mut bc),
            MkStatus::MkInvalidInput
        );
        assert!(bc.is_null());
        assert!(last_error().contains("rank"));

        let mut pot = ptr::null_mut();
        assert_eq!(mk_potential_zero(2, 10.0, &mut pot), MkStatus::MkOk);
        assert!(mk_last_error_message().is_null());
        let theta = 0.3;
        assert_eq!(mk_boundary_from_angles(1, &theta, &mut bc), MkStatus::MkOk);
        let mut s = ptr::null_mut();
        assert_eq!(mk_direct(pot, bc, ptr::null(), &mut s), MkStatus::MkInvalidInput);
        assert!(last_error().contains("dimension"));

        let bad = CString::new("{\"k_max\": -1}").unwrap();
        let mut p1 = ptr::null_mut();
        assert_eq!(mk_potential_zero(1, 10.0, &mut p1), MkStatus::MkOk);
        assert_eq!(mk_direct(p1, bc, bad.as_ptr(), &mut s), MkStatus::MkInvalidInput);
        let unknown = CString::new("{\"bogus\": 1}").unwrap();
        assert_eq!(mk_direct(p1, bc, unknown.as_ptr(), &mut s), MkStatus::MkInvalidInput);
        assert!(last_error().contains("bogus"));

        let garbage = CString::new("not json").unwrap();
        assert_eq!(mk_scattering_from_json(garbage.as_ptr(), &mut s), MkStatus::MkInvalidInput);

        let sd = robin(PI / 3.0);
        let (mut k, mut re) = (0.0, 0.0);
        assert_eq!(mk_scattering_point(sd, 1 << 20, &mut k, &mut re, ptr::null_mut()), MkStatus::MkOutOfRange);
        assert_eq!(mk_scattering_point(sd, 0, &mut k, ptr::null_mut(), ptr::null_mut()), MkStatus::MkNullPointer);

        mk_scattering_free(sd);
        mk_potential_free(p1);
        mk_potential_free(pot);
        mk_boundary_free(bc);
        // null handles are accepted by the destructors
        mk_potential_free(ptr::null_mut());
        mk_scattering_free(ptr::null_mut());
    }
}

#[test]
fn potential_constructors() {
    unsafe {
        let amp_re = [-2.0, 0.5, 0.5, 1.0];
        let amp_im = [0.0, 0.25, -0.25, 0.0];
        let mut p = ptr::null_mut();
        assert_eq!(mk_potential_exponential(2, amp_re.as_ptr(), amp_im.as_ptr(), 3.0, 5.0, &mut p), MkStatus::MkOk);
        assert_eq!(mk_potential_dim(p), 2);
        let (mut re, mut im) = ([0.0; 4], [0.0; 4]);
        assert_eq!(mk_potential_eval(p, 0.5, re.as_mut_ptr(), im.as_mut_ptr()), MkStatus::MkOk);
        let f = (-1.5f64).exp();
        assert!((re[1] - 0.5 * f).abs() < 1e-14 && (im[2] + 0.25 * f).abs() < 1e-14);
        mk_potential_free(p);

        let not_hermitian = [0.0, 1.0, 0.0, 0.0];
        assert_eq!(
            mk_potential_exponential(2, not_hermitian.as_ptr(), ptr::null(), 3.0, 5.0, &mut p),
            MkStatus::MkInvalidInput
        );

        let ends = [1.0, 2.0];
        let layers = [-3.0, 0.5];
        assert_eq!(mk_potential_step(1, 2, ends.as_ptr(), layers.as_ptr(), ptr::null(), 10.0, &mut p), MkStatus::MkOk);
        let mut v = 0.0;
        mk_potential_eval(p, 1.5, &mut v, ptr::null_mut());
        assert_eq!(v, 0.5);
        mk_potential_eval(p, 2.5, &mut v, ptr::null_mut());
        assert_eq!(v, 0.0);
        mk_potential_free(p);

        let x = [0.0, 0.5, 1.0, 1.5];
        let vals = [1.0, 0.5, 0.25, 0.0];
        assert_eq!(mk_potential_sampled(1, 4, x.as_ptr(), vals.as_ptr(), ptr::null(), 10.0, &mut p), MkStatus::MkOk);
        mk_potential_eval(p, 0.5, &mut v, ptr::null_mut());
        assert!((v - 0.5).abs() < 1e-14);
        mk_potential_free(p);

        let a = [0.0, 0.0, 0.0, 0.0];
        let b = [1.0, 0.0, 0.0, 1.0];
        let mut bc = ptr::null_mut();
        assert_eq!(mk_boundary_new(2, a.as_ptr(), ptr::null(), b.as_ptr(), ptr::null(), &mut bc), MkStatus::MkOk);
        let (mut ar, mut br) = ([9.0; 4], [9.0; 4]);
        assert_eq!(
            mk_boundary_matrices(bc, ar.as_mut_ptr(), ptr::null_mut(), br.as_mut_ptr(), ptr::null_mut()),
            MkStatus::MkOk
        );
        assert_eq!(ar, a);
        assert_eq!(br, b);
        mk_boundary_free(bc);
    }
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/marchenko.h");
    let text = std::fs::read_to_string(&header).expect("generated header");
    for name in ["mk_direct", "mk_invert", "mk_validate", "mk_last_error_message", "MK_TAIL_NOT_SETTLED"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(cc) = Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler; syntax check skipped");
        return;
    };
    assert!(cc.status.success());
    for (lang, std) in [("c", "-std=c99"), ("c++", "-std=c++11")] {
        let status = Command::new("cc")
            .args(["-fsyntax-only", "-Wall", "-Werror", std, "-x", lang])
            .arg(&header)
            .status()
            .expect("run cc");
        assert!(status.success(), "header does not compile as {lang}");
    }
}
