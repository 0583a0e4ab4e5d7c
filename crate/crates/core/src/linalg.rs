//! Small dense complex matrix helpers on top of `faer`.
//!
//! Everything in the crate passes `n×n` blocks around as [`CMat`]; the
//! helpers here collect the handful of decompositions the solvers need
//! (singular values, hermitian eigenpairs, projectors, inverse square roots).

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::{Mat, Side};

pub use faer::c64;

pub type CMat = Mat<c64>;

#[inline]
pub fn cx(re: f64, im: f64) -> c64 {
    c64::new(re, im)
}

pub const I: c64 = c64 { re: 0.0, im: 1.0 };

pub fn eye(n: usize) -> CMat {
    Mat::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMat {
    Mat::zeros(r, c)
}

pub fn scale(m: &CMat, s: c64) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * s)
}

pub fn scale_re(m: &CMat, s: f64) -> CMat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * s)
}

pub fn adjoint(m: &CMat) -> CMat {
    m.adjoint().to_owned()
}

pub fn transpose(m: &CMat) -> CMat {
    m.transpose().to_owned()
}

pub fn diag(values: &[c64]) -> CMat {
    let n = values.len();
    Mat::from_fn(n, n, |i, j| if i == j { values[i] } else { c64::new(0.0, 0.0) })
}

pub fn diag_re(values: &[f64]) -> CMat {
    let n = values.len();
    Mat::from_fn(n, n, |i, j| if i == j { cx(values[i], 0.0) } else { cx(0.0, 0.0) })
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMat) -> f64 {
    let mut out = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out = out.max(m[(i, j)].norm());
        }
    }
    out
}

pub fn is_finite(m: &CMat) -> bool {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return false;
            }
        }
    }
    true
}

/// Singular values, largest first.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    if m.nrows() == 1 && m.ncols() == 1 {
        return vec![m[(0, 0)].norm()];
    }
    m.singular_values().expect("svd did not converge")
}

/// Spectral (operator) norm.
pub fn op_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn cond(m: &CMat) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Numerical rank with a singular-value cutoff relative to `reference`.
pub fn rank_with(m: &CMat, rel_tol: f64, reference: f64) -> usize {
    singular_values(m)
        .iter()
        .filter(|&&s| s > rel_tol * reference)
        .count()
}

pub fn hermitian_part(m: &CMat) -> CMat {
    let n = m.nrows();
    Mat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

/// Distance from hermiticity, as a max-entry magnitude.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut out = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            out = out.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    out
}

/// Eigenpairs of the hermitian part of `m`; eigenvalues ascending, eigenvectors as columns.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let h = hermitian_part(m);
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .expect("hermitian eigensolver did not converge");
    let vals = evd.S().column_vector().iter().map(|z| z.re).collect();
    (vals, evd.U().to_owned())
}

pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    hermitian_part(m)
        .self_adjoint_eigenvalues(Side::Lower)
        .expect("hermitian eigensolver did not converge")
}

/// `U diag(f(λ)) U†` for the hermitian part of `m`.
pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, u) = hermitian_eigen(m);
    let n = vals.len();
    let fd: Vec<f64> = vals.into_iter().map(f).collect();
    Mat::from_fn(n, n, |i, j| {
        let mut acc = c64::new(0.0, 0.0);
        for (l, &fl) in fd.iter().enumerate() {
            acc += u[(i, l)] * u[(j, l)].conj() * fl;
        }
        acc
    })
}

pub fn inverse(m: &CMat) -> CMat {
    if m.nrows() == 1 {
        return Mat::from_fn(1, 1, |_, _| m[(0, 0)].inv());
    }
    m.partial_piv_lu().inverse()
}

/// Solves `a x = b`.
pub fn solve(a: &CMat, b: &CMat) -> CMat {
    a.partial_piv_lu().solve(b)
}

pub fn det(m: &CMat) -> c64 {
    match m.nrows() {
        0 => c64::new(1.0, 0.0),
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        _ => m.determinant(),
    }
}

/// Stacks `a` on top of `b`.
pub fn vstack(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.ncols(), b.ncols());
    let ra = a.nrows();
    Mat::from_fn(ra + b.nrows(), a.ncols(), |i, j| {
        if i < ra {
            a[(i, j)]
        } else {
            b[(i - ra, j)]
        }
    })
}

fn outer_projector(u: faer::MatRef<'_, c64>, cols: impl Iterator<Item = usize> + Clone) -> CMat {
    let n = u.nrows();
    Mat::from_fn(n, n, |i, j| {
        let mut acc = c64::new(0.0, 0.0);
        for l in cols.clone() {
            acc += u[(i, l)] * u[(j, l)].conj();
        }
        acc
    })
}

/// Orthogonal projector onto the column space of `m`, rank decided by
/// singular values above `rel_tol` times the largest one.
pub fn column_space_projector(m: &CMat, rel_tol: f64) -> CMat {
    let svd = m.svd().expect("svd did not converge");
    let s: Vec<f64> = svd.S().column_vector().iter().map(|z| z.re).collect();
    let top = s.first().copied().unwrap_or(0.0);
    let r = s.iter().filter(|&&x| x > rel_tol * top).count();
    outer_projector(svd.U(), 0..r)
}

/// Orthogonal projector onto the left null space of a square `m`
/// (the kernel of `m†`), counting singular values below `abs_tol`.
/// Returns the projector and its rank.
pub fn left_kernel_projector(m: &CMat, abs_tol: f64) -> (CMat, usize) {
    let n = m.nrows();
    let svd = m.svd().expect("svd did not converge");
    let s: Vec<f64> = svd.S().column_vector().iter().map(|z| z.re).collect();
    let first_small = s.iter().position(|&x| x < abs_tol).unwrap_or(n);
    (outer_projector(svd.U(), first_small..n), n - first_small)
}

/// Principal inverse square root of a hermitian positive definite matrix.
pub fn inv_sqrt_hpd(m: &CMat) -> Option<CMat> {
    let vals = hermitian_eigenvalues(m);
    if vals.first().is_none_or(|&v| v <= 0.0) {
        return None;
    }
    Some(hermitian_fn(m, |x| 1.0 / x.sqrt()))
}

/// Max over entries of `|a - b|`.
pub fn max_diff(a: &CMat, b: &CMat) -> f64 {
    max_abs(&(a - b))
}

/// Row-major nested re/im arrays into a matrix.
pub fn from_parts(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Option<CMat> {
    let r = re.len();
    let c = re.first().map_or(0, Vec::len);
    if re.iter().any(|row| row.len() != c) {
        return None;
    }
    if let Some(im) = im {
        if im.len() != r || im.iter().any(|row| row.len() != c) {
            return None;
        }
    }
    Some(Mat::from_fn(r, c, |i, j| {
        cx(re[i][j], im.map_or(0.0, |m| m[i][j]))
    }))
}

pub fn to_parts(m: &CMat) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let re = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect())
        .collect();
    let im = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect())
        .collect();
    (re, im)
}
