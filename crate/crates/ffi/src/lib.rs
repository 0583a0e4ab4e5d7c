//! C ABI over the `marchenko` crate.
//!
//! Objects are opaque heap handles released with their `mk_*_free`
//! function. Every fallible call returns an [`MkStatus`]; on anything but
//! `MK_OK` the message is available from [`mk_last_error_message`] on the
//! same thread. Matrices cross the boundary as row-major `n×n` arrays of
//! real and imaginary parts; a null imaginary pointer means zero on input
//! and "not wanted" on output. Configurations are JSON objects with the
//! same fields as the command line's `--config` sections; null selects
//! the defaults.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use marchenko::characterize::{marchenko_class_report, Verdict};
use marchenko::direct::{solve_direct, DirectConfig};
use marchenko::inverse::{invert, InverseConfig, RecoveredInput};
use marchenko::io::{self, RecoveredFile, ScatteringFile};
use marchenko::linalg::{cx, CMat};
use marchenko::{
    validate_boundary, validate_potential, BoundaryCondition, Potential, ScatterError, ScatteringData,
    StepPotentialSpec,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MkStatus {
    MkOk = 0,
    /// A required pointer argument was null.
    MkNullPointer = 1,
    /// Input data or configuration did not validate.
    MkInvalidInput = 2,
    /// A solver stage failed.
    MkSolverFailure = 3,
    /// The scattering matrix had not settled on the tail window.
    MkTailNotSettled = 4,
    /// Index out of range.
    MkOutOfRange = 5,
    /// Internal panic; the handle arguments should be considered unusable.
    MkPanic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MkVerdict {
    MkPass = 0,
    MkFail = 1,
    MkInconclusive = 2,
}

pub struct MkPotential(Potential);
pub struct MkBoundary(BoundaryCondition);
pub struct MkScattering(ScatteringData);
pub struct MkRecovered(RecoveredInput);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Failure {
    Null(&'static str),
    Range(String),
    Scatter(ScatterError),
}

impl From<ScatterError> for Failure {
    fn from(e: ScatterError) -> Self {
        Failure::Scatter(e)
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn status_of(e: &ScatterError) -> MkStatus {
    use ScatterError::*;
    match e {
        SelfadjointnessViolated { .. }
        | RankDeficient { .. }
        | DimensionMismatch { .. }
        | NotHermitian { .. }
        | NonFiniteSample { .. }
        | AsymmetricGrid { .. }
        | BadBoundState(_)
        | InvalidInput(_)
        | InvalidConfig(_) => MkStatus::MkInvalidInput,
        TailNotSettled { .. } => MkStatus::MkTailNotSettled,
        _ => MkStatus::MkSolverFailure,
    }
}

fn guard(f: impl FnOnce() -> Outcome) -> MkStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MkStatus::MkOk,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            MkStatus::MkNullPointer
        }
        Ok(Err(Failure::Range(msg))) => {
            set_error(msg);
            MkStatus::MkOutOfRange
        }
        Ok(Err(Failure::Scatter(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            MkStatus::MkPanic
        }
    }
}

unsafe fn href<'a, T>(p: *const T, what: &'static str) -> Outcome<&'a T> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out<T>(p: *mut T, value: T, what: &'static str) -> Outcome {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    p.write(value);
    Ok(())
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Outcome<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Outcome<&'a str> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| ScatterError::InvalidInput(format!("{what}: {e}")).into())
}

unsafe fn config<T: Default + serde::de::DeserializeOwned>(p: *const c_char) -> Outcome<T> {
    if p.is_null() {
        return Ok(T::default());
    }
    let s = text(p, "config")?;
    serde_json::from_str(s).map_err(|e| ScatterError::InvalidConfig(e.to_string()).into())
}

/// `count` consecutive `n×n` matrices from row-major parts.
unsafe fn read_mats(n: usize, count: usize, re: *const f64, im: *const f64, what: &'static str) -> Outcome<Vec<CMat>> {
    let len = count * n * n;
    let re = slice(re, len, what)?;
    let im = if im.is_null() { None } else { Some(slice(im, len, what)?) };
    Ok((0..count)
        .map(|m| {
            CMat::from_fn(n, n, |i, j| {
                let idx = m * n * n + i * n + j;
                cx(re[idx], im.map_or(0.0, |v| v[idx]))
            })
        })
        .collect())
}

unsafe fn write_mat(m: &CMat, re: *mut f64, im: *mut f64) -> Outcome {
    if re.is_null() {
        return Err(Failure::Null("re"));
    }
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            re.add(i * n + j).write(m[(i, j)].re);
            if !im.is_null() {
                im.add(i * n + j).write(m[(i, j)].im);
            }
        }
    }
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

unsafe fn json_out(s: String, dst: *mut *mut c_char) -> Outcome {
    let c = CString::new(s).map_err(|e| ScatterError::InvalidInput(e.to_string()))?;
    out(dst, c.into_raw(), "out")
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn mk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by the library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---- potentials ------------------------------------------------------------

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mk_potential_zero(n: usize, x_max: f64, out_p: *mut *mut MkPotential) -> MkStatus {
    guard(|| {
        if n == 0 || !(x_max > 0.0) {
            return Err(ScatterError::InvalidInput("n and x_max must be positive".into()).into());
        }
        out(out_p, boxed(MkPotential(Potential::zero(n, x_max))), "out")
    })
}

/// `amplitude · exp(-rate · x)` with a hermitian `n×n` amplitude.
///
/// # Safety
/// `amp_re` (and `amp_im` unless null) must hold `n·n` values.
#[no_mangle]
pub unsafe extern "C" fn mk_potential_exponential(
    n: usize,
    amp_re: *const f64,
    amp_im: *const f64,
    rate: f64,
    x_max: f64,
    out_p: *mut *mut MkPotential,
) -> MkStatus {
    guard(|| {
        let amp = read_mats(n, 1, amp_re, amp_im, "amplitude")?.remove(0);
        out(out_p, boxed(MkPotential(Potential::exponential(amp, rate, x_max)?)), "out")
    })
}

/// Piecewise-constant potential: layer `l` occupies `(ends[l-1], ends[l])`
/// with `ends[-1] = 0`.
///
/// # Safety
/// `ends` must hold `layers` values, `re`/`im` `layers·n·n` values.
#[no_mangle]
pub unsafe extern "C" fn mk_potential_step(
    n: usize,
    layers: usize,
    ends: *const f64,
    re: *const f64,
    im: *const f64,
    x_max: f64,
    out_p: *mut *mut MkPotential,
) -> MkStatus {
    guard(|| {
        let ends = slice(ends, layers, "ends")?.to_vec();
        let mats = read_mats(n, layers, re, im, "layers")?;
        let spec = StepPotentialSpec::new(ends, mats)?;
        out(out_p, boxed(MkPotential(Potential::step(spec, x_max)?)), "out")
    })
}

/// Samples on an increasing grid, interpolated by cubic Hermite splines.
///
/// # Safety
/// `x` must hold `count` values, `re`/`im` `count·n·n` values.
#[no_mangle]
pub unsafe extern "C" fn mk_potential_sampled(
    n: usize,
    count: usize,
    x: *const f64,
    re: *const f64,
    im: *const f64,
    x_max: f64,
    out_p: *mut *mut MkPotential,
) -> MkStatus {
    guard(|| {
        let xs = slice(x, count, "x")?.to_vec();
        let values = read_mats(n, count, re, im, "values")?;
        out(out_p, boxed(MkPotential(validate_potential(xs, values, x_max)?)), "out")
    })
}

/// # Safety
/// `json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mk_potential_from_json(json: *const c_char, out_p: *mut *mut MkPotential) -> MkStatus {
    guard(|| out(out_p, boxed(MkPotential(io::parse_potential(text(json, "json")?)?)), "out"))
}

/// Dimension `n`, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mk_potential_dim(p: *const MkPotential) -> usize {
    p.as_ref().map_or(0, |p| p.0.n())
}

/// `V(x)` into `n·n` row-major buffers.
///
/// # Safety
/// `re` (and `im` unless null) must have room for `n·n` values.
#[no_mangle]
pub unsafe extern "C" fn mk_potential_eval(p: *const MkPotential, x: f64, re: *mut f64, im: *mut f64) -> MkStatus {
    guard(|| write_mat(&href(p, "potential")?.0.eval(x), re, im))
}

/// # Safety
/// `p` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn mk_potential_free(p: *mut MkPotential) {
    free(p)
}

// ---- boundary conditions ---------------------------------------------------

/// `-B†ψ(0) + A†ψ′(0) = 0` from row-major `A` and `B`.
///
/// # Safety
/// Each non-null array must hold `n·n` values.
#[no_mangle]
pub unsafe extern "C" fn mk_boundary_new(
    n: usize,
    a_re: *const f64,
    a_im: *const f64,
    b_re: *const f64,
    b_im: *const f64,
    out_b: *mut *mut MkBoundary,
) -> MkStatus {
    guard(|| {
        let a = read_mats(n, 1, a_re, a_im, "A")?.remove(0);
        let b = read_mats(n, 1, b_re, b_im, "B")?.remove(0);
        out(out_b, boxed(MkBoundary(validate_boundary(a, b)?)), "out")
    })
}

/// `A = diag(-sin θ)`, `B = diag(cos θ)`.
///
/// # Safety
/// `thetas` must hold `n` values.
#[no_mangle]
pub unsafe extern "C" fn mk_boundary_from_angles(n: usize, thetas: *const f64, out_b: *mut *mut MkBoundary) -> MkStatus {
    guard(|| {
        if n == 0 {
            return Err(ScatterError::InvalidInput("n must be positive".into()).into());
        }
        let t = slice(thetas, n, "thetas")?;
        out(out_b, boxed(MkBoundary(BoundaryCondition::from_angles(t))), "out")
    })
}

/// # Safety
/// `bc` must be a live handle; output arrays must have room for `n·n` values.
#[no_mangle]
pub unsafe extern "C" fn mk_boundary_matrices(
    bc: *const MkBoundary,
    a_re: *mut f64,
    a_im: *mut f64,
    b_re: *mut f64,
    b_im: *mut f64,
) -> MkStatus {
    guard(|| {
        let bc = &href(bc, "boundary")?.0;
        write_mat(bc.a(), a_re, a_im)?;
        write_mat(bc.b(), b_re, b_im)
    })
}

/// Distance of the projectors onto the column spaces of `[A; B]`; zero
/// exactly when the two conditions are equivalent.
///
/// # Safety
/// `x` and `y` must be live handles; `dist` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mk_boundary_distance(x: *const MkBoundary, y: *const MkBoundary, dist: *mut f64) -> MkStatus {
    guard(|| {
        let d = href(x, "x")?.0.equivalence_distance(&href(y, "y")?.0)?;
        out(dist, d, "dist")
    })
}

/// # Safety
/// `bc` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn mk_boundary_free(bc: *mut MkBoundary) {
    free(bc)
}

// ---- scattering data -------------------------------------------------------

/// Scattering matrix on the configured k-grid plus bound states.
///
/// # Safety
/// Handles must be live; `config_json` null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn mk_direct(
    p: *const MkPotential,
    bc: *const MkBoundary,
    config_json: *const c_char,
    out_s: *mut *mut MkScattering,
) -> MkStatus {
    guard(|| {
        let cfg: DirectConfig = config(config_json)?;
        let (p, bc) = (&href(p, "potential")?.0, &href(bc, "boundary")?.0);
        if p.n() != bc.n() {
            return Err(ScatterError::DimensionMismatch { expected: p.n(), found: bc.n() }.into());
        }
        out(out_s, boxed(MkScattering(solve_direct(p, bc, &cfg)?.data)), "out")
    })
}

/// # Safety
/// `json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mk_scattering_from_json(json: *const c_char, out_s: *mut *mut MkScattering) -> MkStatus {
    guard(|| out(out_s, boxed(MkScattering(io::parse_scattering(text(json, "json")?)?)), "out"))
}

/// Serializes to the `scattering.json` layout; free with [`mk_string_free`].
///
/// # Safety
/// `s` must be a live handle; `json` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mk_scattering_to_json(s: *const MkScattering, json: *mut *mut c_char) -> MkStatus {
    guard(|| json_out(io::to_json(&ScatteringFile::from_data(&href(s, "scattering")?.0)), json))
}

/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mk_scattering_dim(s: *const MkScattering) -> usize {
    s.as_ref().map_or(0, |s| s.0.n())
}

/// Number of k-grid points.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mk_scattering_len(s: *const MkScattering) -> usize {
    s.as_ref().map_or(0, |s| s.0.len())
}

/// `k_i` and `S(k_i)`.
///
/// # Safety
/// `s` must be a live handle, `k` valid for writes and `re`/`im` room for `n·n` values.
#[no_mangle]
pub unsafe extern "C" fn mk_scattering_point(
    s: *const MkScattering,
    index: usize,
    k: *mut f64,
    re: *mut f64,
    im: *mut f64,
) -> MkStatus {
    guard(|| {
        let d = &href(s, "scattering")?.0;
        if index >= d.len() {
            return Err(Failure::Range(format!("k index {index} out of range ({} points)", d.len())));
        }
        out(k, d.k_grid()[index], "k")?;
        write_mat(&d.s_values()[index], re, im)
    })
}

/// Number of distinct bound states.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mk_scattering_bound_count(s: *const MkScattering) -> usize {
    s.as_ref().map_or(0, |s| s.0.bound_states().len())
}

/// `κ_j`, multiplicity and `M_j`.
///
/// # Safety
/// `s` must be a live handle, scalar outputs valid for writes and `re`/`im` room for `n·n` values.
#[no_mangle]
pub unsafe extern "C" fn mk_scattering_bound_state(
    s: *const MkScattering,
    index: usize,
    kappa: *mut f64,
    multiplicity: *mut usize,
    re: *mut f64,
    im: *mut f64,
) -> MkStatus {
    guard(|| {
        let d = &href(s, "scattering")?.0;
        let b = d
            .bound_states()
            .get(index)
            .ok_or_else(|| Failure::Range(format!("bound state {index} out of range")))?;
        out(kappa, b.kappa, "kappa")?;
        out(multiplicity, b.multiplicity, "multiplicity")?;
        write_mat(&b.m, re, im)
    })
}

/// # Safety
/// `s` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn mk_scattering_free(s: *mut MkScattering) {
    free(s)
}

// ---- inversion and validation ----------------------------------------------

/// Potential and boundary condition recovered from scattering data.
///
/// # Safety
/// `s` must be a live handle; `config_json` null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn mk_invert(
    s: *const MkScattering,
    config_json: *const c_char,
    out_r: *mut *mut MkRecovered,
) -> MkStatus {
    guard(|| {
        let cfg: InverseConfig = config(config_json)?;
        out(out_r, boxed(MkRecovered(invert(&href(s, "scattering")?.0, &cfg)?)), "out")
    })
}

/// Copy of the recovered potential as a new handle.
///
/// # Safety
/// `r` must be a live handle; `out_p` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mk_recovered_potential(r: *const MkRecovered, out_p: *mut *mut MkPotential) -> MkStatus {
    guard(|| out(out_p, boxed(MkPotential(href(r, "recovered")?.0.potential.clone())), "out"))
}

/// Copy of the recovered boundary condition as a new handle.
///
/// # Safety
/// `r` must be a live handle; `out_b` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mk_recovered_boundary(r: *const MkRecovered, out_b: *mut *mut MkBoundary) -> MkStatus {
    guard(|| out(out_b, boxed(MkBoundary(href(r, "recovered")?.0.bc.clone())), "out"))
}

/// Serializes to the `recovered.json` layout; free with [`mk_string_free`].
///
/// # Safety
/// `r` must be a live handle; `json` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mk_recovered_to_json(r: *const MkRecovered, json: *mut *mut c_char) -> MkStatus {
    guard(|| json_out(io::to_json(&RecoveredFile::from_recovered(&href(r, "recovered")?.0)), json))
}

/// # Safety
/// `r` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn mk_recovered_free(r: *mut MkRecovered) {
    free(r)
}

/// Marchenko-class and Levinson checks. `config_json` is an inverse
/// configuration; `report_json` may be null, otherwise it receives the
/// report to be freed with [`mk_string_free`].
///
/// # Safety
/// `s` must be a live handle and `verdict` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn mk_validate(
    s: *const MkScattering,
    config_json: *const c_char,
    verdict: *mut MkVerdict,
    report_json: *mut *mut c_char,
) -> MkStatus {
    guard(|| {
        let cfg: InverseConfig = config(config_json)?;
        cfg.validate()?;
        let report = marchenko_class_report(&href(s, "scattering")?.0, None, &cfg);
        let v = match report.overall() {
            Verdict::Pass => MkVerdict::MkPass,
            Verdict::Fail => MkVerdict::MkFail,
            Verdict::Inconclusive => MkVerdict::MkInconclusive,
        };
        out(verdict, v, "verdict")?;
        if !report_json.is_null() {
            json_out(io::to_json(&report), report_json)?;
        }
        Ok(())
    })
}
