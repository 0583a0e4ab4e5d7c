//! Inverse problem: recover `{V, A, B}` from scattering data through the
//! Marchenko integral equation.

use std::f64::consts::PI;

use faer::linalg::solvers::{Solve, SolveLstsq};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScatterError};
use crate::linalg::{self, c64, cx, CMat};
use crate::quadrature::{self, QuadRule};
use crate::types::{
    validate_boundary, validate_potential, BoundState, BoundaryCondition, MarchenkoKernel, Potential,
    ScatteringData,
};

/// Default `|F(y_max)|` above which the kernel truncation is rejected.
pub const TRUNCATION_TOL: f64 = 1e-8;
/// Tail-fit residual (relative to `‖S‖`) above which the data are not asymptotic.
pub const TAIL_TOL: f64 = 1e-3;
/// Default allowed distance of the eigenvalues of `S_∞` from `±1`.
pub const SPECTRAL_TOL: f64 = 1e-6;
/// Condition estimate above which the discretized operator is singular.
pub const SINGULAR_OPERATOR_COND: f64 = 1e10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InverseConfig {
    /// Right end of the reconstructed potential.
    pub x_max: f64,
    /// Kernel truncation; `2·x_max` when absent.
    pub y_max: Option<f64>,
    /// Lattice step shared by the Nyström nodes and the finite differences.
    pub h: f64,
    /// Lower edge of the tail window; `k_max / 2` when absent.
    pub k_lo: Option<f64>,
    /// Number of inverse powers of `ik + β` in the tail model.
    pub tail_terms: usize,
    pub tail_beta: f64,
    pub quad: QuadRule,
    pub solver_tol: f64,
    /// Accepted distance of the fitted `S_∞` eigenvalues from `±1`.
    pub spectral_tol: f64,
    /// Largest accepted `|F(y_max)|`.
    pub truncation_tol: f64,
}

impl Default for InverseConfig {
    fn default() -> Self {
        Self {
            x_max: 4.0,
            y_max: None,
            h: 0.02,
            k_lo: None,
            tail_terms: 6,
            tail_beta: 1.0,
            quad: QuadRule::Gregory,
            solver_tol: 1e-12,
            spectral_tol: SPECTRAL_TOL,
            truncation_tol: TRUNCATION_TOL,
        }
    }
}

impl InverseConfig {
    pub fn y_max(&self) -> f64 {
        self.y_max.unwrap_or(2.0 * self.x_max)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("x_max", self.x_max),
            ("y_max", self.y_max()),
            ("h", self.h),
            ("tail_beta", self.tail_beta),
            ("solver_tol", self.solver_tol),
            ("spectral_tol", self.spectral_tol),
            ("truncation_tol", self.truncation_tol),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ScatterError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.y_max() < self.x_max {
            return Err(ScatterError::InvalidConfig("y_max must be at least x_max".into()));
        }
        if self.tail_terms == 0 {
            return Err(ScatterError::InvalidConfig("tail_terms must be positive".into()));
        }
        if let Some(k_lo) = self.k_lo {
            if !(k_lo > 0.0) {
                return Err(ScatterError::InvalidConfig("k_lo must be positive".into()));
            }
        }
        Ok(())
    }

    pub(crate) fn steps(&self, len: f64) -> usize {
        (len / self.h).round() as usize
    }
}

/// Large-k model `S(k) ≈ S_∞ + Σ_m C_m (ik + β)^{-m}`; `C_1 = G₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailFit {
    /// Hermitian part of the unconstrained constant term.
    pub s_inf_raw: CMat,
    /// `s_inf_raw` with its eigenvalues snapped to `±1`.
    pub s_inf: CMat,
    pub coeffs: Vec<CMat>,
    pub beta: f64,
    pub k_lo: f64,
    /// RMS over the window of the max-entry misfit, relative to `‖S‖`.
    pub residual: f64,
    /// Largest distance of an eigenvalue of `s_inf_raw` from `±1`.
    pub deviation: f64,
}

impl TailFit {
    pub fn g1(&self) -> &CMat {
        &self.coeffs[0]
    }

    pub fn model(&self, k: f64) -> CMat {
        let u = (cx(self.beta, k)).inv();
        let mut out = self.s_inf.clone();
        let mut p = cx(1.0, 0.0);
        for c in &self.coeffs {
            p *= u;
            out = &out + &linalg::scale(c, p);
        }
        out
    }

    /// Exact Fourier transform `(1/2π)∫ (model - S_∞) e^{iky} dk`, taking
    /// the right limit at `y = 0`.
    pub fn model_transform(&self, y: f64) -> CMat {
        let n = self.s_inf.nrows();
        let mut out = linalg::zeros(n, n);
        if y < 0.0 {
            return out;
        }
        let e = (-self.beta * y).exp();
        let mut term = e;
        for (m, c) in self.coeffs.iter().enumerate() {
            if m > 0 {
                term *= y / m as f64;
            }
            out = &out + &linalg::scale_re(c, term);
        }
        out
    }
}

fn lstsq(design: &CMat, rhs: &CMat) -> CMat {
    let sol = design.qr().solve_lstsq(rhs);
    sol
}

/// Least-squares fit of the tail model over `k_lo ≤ |k| ≤ k_max`.
pub fn tail_fit(data: &ScatteringData, cfg: &InverseConfig) -> Result<TailFit> {
    let n = data.n();
    let k_max = data.k_max();
    let k_lo = cfg.k_lo.unwrap_or(0.5 * k_max);
    if !(k_lo < k_max) {
        return Err(ScatterError::InvalidConfig(format!("k_lo = {k_lo} must be below k_max = {k_max}")));
    }
    let idx: Vec<usize> = (0..data.len()).filter(|&i| data.k_grid()[i].abs() >= k_lo).collect();
    let terms = cfg.tail_terms;
    if idx.len() < 2 * (terms + 1) {
        return Err(ScatterError::InvalidConfig("tail window holds too few grid points".into()));
    }
    let beta = cfg.tail_beta;
    let scale = k_lo;
    // column m holds (k_lo·u)^m so that all columns are of order one
    let powers = |k: f64, m: usize| (cx(beta, k).inv() * scale).powi(m as i32);
    // rows weighted by a sin² taper over the window keep oscillating tail terms (jumps in V)
    // from leaking into the smooth coefficients
    let taper: Vec<f64> = idx
        .iter()
        .map(|&i| {
            let t = (data.k_grid()[i].abs() - k_lo) / (k_max - k_lo);
            (PI * t.clamp(0.0, 1.0)).sin()
        })
        .collect();
    let rhs_of = |sub: Option<&CMat>| {
        CMat::from_fn(idx.len(), n * n, |r, c| {
            let s = &data.s_values()[idx[r]];
            let v = s[(c / n, c % n)];
            (v - sub.map_or(cx(0.0, 0.0), |m| m[(c / n, c % n)])) * taper[r]
        })
    };
    let unpack = |sol: &CMat, row: usize, factor: f64| CMat::from_fn(n, n, |i, j| sol[(row, i * n + j)] * factor);

    let design = CMat::from_fn(idx.len(), terms + 1, |r, m| powers(data.k_grid()[idx[r]], m) * taper[r]);
    let sol = lstsq(&design, &rhs_of(None));
    let s_inf_raw = linalg::hermitian_part(&unpack(&sol, 0, 1.0));
    let (vals, vecs) = linalg::hermitian_eigen(&s_inf_raw);
    let deviation = vals.iter().map(|v| (v.abs() - 1.0).abs()).fold(0.0, f64::max);
    let signs: Vec<f64> = vals.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
    let s_inf = CMat::from_fn(n, n, |i, j| {
        let mut acc = cx(0.0, 0.0);
        for (l, s) in signs.iter().enumerate() {
            acc += vecs[(i, l)] * vecs[(j, l)].conj() * *s;
        }
        acc
    });

    let design = CMat::from_fn(idx.len(), terms, |r, m| powers(data.k_grid()[idx[r]], m + 1) * taper[r]);
    let sol = lstsq(&design, &rhs_of(Some(&s_inf)));
    let coeffs: Vec<CMat> = (0..terms)
        .map(|m| linalg::hermitian_part(&unpack(&sol, m, scale.powi(m as i32 + 1))))
        .collect();

    let mut fit = TailFit { s_inf_raw, s_inf, coeffs, beta, k_lo, residual: 0.0, deviation };
    let s_norm = idx.iter().map(|&i| linalg::op_norm(&data.s_values()[i])).fold(0.0, f64::max).max(1e-300);
    let sq: f64 = idx
        .iter()
        .map(|&i| linalg::max_diff(&data.s_values()[i], &fit.model(data.k_grid()[i])).powi(2))
        .sum();
    fit.residual = (sq / idx.len() as f64).sqrt() / s_norm;
    if !fit.residual.is_finite() {
        return Err(ScatterError::NonFinite("tail fit"));
    }
    if fit.residual > TAIL_TOL {
        return Err(ScatterError::TailNotSettled { residual: fit.residual });
    }
    Ok(fit)
}

/// Trapezoid weights over the full symmetric grid (periodic-style: the grid
/// is treated as a sampling of a function that is negligible past `±k_max`).
fn k_weights(k: &[f64]) -> Vec<f64> {
    let len = k.len();
    (0..len)
        .map(|i| {
            let left = if i == 0 { k[1] - k[0] } else { k[i] - k[i - 1] };
            let right = if i + 1 == len { k[len - 1] - k[len - 2] } else { k[i + 1] - k[i] };
            0.5 * (left + right)
        })
        .collect()
}

/// `F_s(y) = (1/2π)∫ [S(k) - S_∞] e^{iky} dk` at each `y`: exact transform
/// of the tail model plus a trapezoid sum of the remainder.
pub fn fourier_fs(data: &ScatteringData, fit: &TailFit, ys: &[f64]) -> Vec<CMat> {
    let n = data.n();
    let k = data.k_grid();
    let w = k_weights(k);
    let rem: Vec<CMat> = k
        .iter()
        .zip(data.s_values())
        .map(|(&kk, s)| s - &fit.model(kk))
        .collect();
    ys.par_iter()
        .map(|&y| {
            let mut acc = vec![cx(0.0, 0.0); n * n];
            for ((kk, wk), r) in k.iter().zip(&w).zip(&rem) {
                let e = cx(0.0, kk * y).exp() * *wk;
                for i in 0..n {
                    for j in 0..n {
                        acc[i * n + j] += r[(i, j)] * e;
                    }
                }
            }
            let model = fit.model_transform(y);
            CMat::from_fn(n, n, |i, j| acc[i * n + j] / (2.0 * std::f64::consts::PI) + model[(i, j)])
        })
        .collect()
}

/// `F(y) = F_s(y) + Σ_j M_j² e^{-κ_j y}` on `y ≥ 0`.
pub fn assemble_f(fs: &[CMat], ys: &[f64], bound_states: &[BoundState]) -> Vec<CMat> {
    fs.iter()
        .zip(ys)
        .map(|(f, &y)| {
            bound_states.iter().fold(f.clone(), |acc, b| {
                &acc + &linalg::scale_re(&(&b.m * &b.m), (-b.kappa * y).exp())
            })
        })
        .collect()
}

/// One Nyström solve of the Marchenko equation.
#[derive(Debug, Clone, PartialEq)]
pub struct MarchenkoRow {
    /// `K(x, x + j·h)` for `j = 0..`.
    pub k: Vec<CMat>,
    pub cond: f64,
    pub residual: f64,
}

/// Solves `K(x,y) + F(x+y) + ∫_x^{y_max} K(x,z) F(z+y) dz = 0` at `x = p·h`,
/// with `f[m] = F(m·h)` for `m = 0..=2·y_max/h`.
pub fn solve_marchenko(f: &[CMat], p: usize, nodes: usize, h: f64, rule: QuadRule) -> Result<MarchenkoRow> {
    let n = f[0].nrows();
    let count = nodes - p + 1;
    if f.len() < 2 * nodes + 1 {
        return Err(ScatterError::InvalidInput("F lattice does not reach 2·y_max".into()));
    }
    let w = quadrature::weights(rule, count, h);
    let dim = n * count;
    // transposed row form: K(x,y_j)ᵀ + Σ_i w_i F(z_i + y_j)ᵀ K(x,z_i)ᵀ = -F(x + y_j)ᵀ
    let a = CMat::from_fn(dim, dim, |r, c| {
        let (j, a) = (r / n, r % n);
        let (i, b) = (c / n, c % n);
        let mut v = f[2 * p + i + j][(b, a)] * w[i];
        if r == c {
            v += 1.0;
        }
        v
    });
    let rhs = CMat::from_fn(dim, n, |r, c| -f[p + p + r / n][(c, r % n)]);
    let lu = a.partial_piv_lu();
    let x = lu.solve(&rhs);
    let u = lu.U();
    let mut dmax = 0.0f64;
    let mut dmin = f64::INFINITY;
    for i in 0..dim {
        let d = u[(i, i)].norm();
        dmax = dmax.max(d);
        dmin = dmin.min(d);
    }
    let cond = if dmin > 0.0 { dmax / dmin } else { f64::INFINITY };
    let x_pos = p as f64 * h;
    if !(cond <= SINGULAR_OPERATOR_COND) {
        return Err(ScatterError::SingularOperator { x: x_pos, cond });
    }
    if !linalg::is_finite(&x) {
        return Err(ScatterError::NonFinite("Marchenko solution"));
    }
    let residual = linalg::max_abs(&(&(&a * &x) - &rhs));
    let k = (0..count)
        .map(|j| CMat::from_fn(n, n, |r, c| x[(j * n + c, r)]))
        .collect();
    Ok(MarchenkoRow { k, cond, residual })
}

/// `V(x) = -2 d/dx K(x,x)`: fourth-order central differences inside,
/// fourth-order one-sided stencils near the ends, then hermitian
/// symmetrization.
pub fn recover_potential(diag: &[CMat], h: f64, x_max: f64) -> Result<Potential> {
    let len = diag.len();
    if len < 5 {
        return Err(ScatterError::InvalidInput("need at least five diagonal samples".into()));
    }
    let stencil = |i: usize| -> (usize, [f64; 5]) {
        match i {
            0 => (0, [-25.0, 48.0, -36.0, 16.0, -3.0]),
            1 => (0, [-3.0, -10.0, 18.0, -6.0, 1.0]),
            i if i + 2 == len => (len - 5, [-1.0, 6.0, -18.0, 10.0, 3.0]),
            i if i + 1 == len => (len - 5, [3.0, -16.0, 36.0, -48.0, 25.0]),
            i => (i - 2, [1.0, -8.0, 0.0, 8.0, -1.0]),
        }
    };
    let values: Vec<CMat> = (0..len)
        .map(|i| {
            let (start, c) = stencil(i);
            let n = diag[0].nrows();
            let mut d = linalg::zeros(n, n);
            for (l, cl) in c.iter().enumerate() {
                d = &d + &linalg::scale_re(&diag[start + l], *cl);
            }
            linalg::hermitian_part(&linalg::scale_re(&d, -2.0 / (12.0 * h)))
        })
        .collect();
    if values.iter().any(|v| !linalg::is_finite(v)) {
        return Err(ScatterError::NonFinite("recovered potential"));
    }
    let xs: Vec<f64> = (0..len).map(|i| i as f64 * h).collect();
    validate_potential(xs, values, x_max.max((len - 1) as f64 * h))
}

/// Boundary matrices from `(I - S_∞)A = 0` and
/// `(I + S_∞)B = [G₁ - S_∞K(0,0) - K(0,0)S_∞]A`, pinned to `A = P₊`,
/// `B = ½P₊CP₊ + P₋`.
pub fn recover_boundary(s_inf: &CMat, g1: &CMat, k00: &CMat) -> Result<BoundaryCondition> {
    let n = s_inf.nrows();
    let (vals, vecs) = linalg::hermitian_eigen(s_inf);
    let deviation = vals.iter().map(|v| (v.abs() - 1.0).abs()).fold(0.0, f64::max);
    if deviation > SPECTRAL_TOL {
        return Err(ScatterError::SpectralFailure { deviation });
    }
    let proj = |sign: f64| {
        CMat::from_fn(n, n, |i, j| {
            let mut acc = cx(0.0, 0.0);
            for (l, v) in vals.iter().enumerate() {
                if v.signum() == sign {
                    acc += vecs[(i, l)] * vecs[(j, l)].conj();
                }
            }
            acc
        })
    };
    let p_plus = proj(1.0);
    let p_minus = proj(-1.0);
    let s = &p_plus - &p_minus;
    let c = linalg::hermitian_part(&(&(g1 - &(&s * k00)) - &(k00 * &s)));
    let b = &linalg::scale_re(&(&p_plus * &c * &p_plus), 0.5) + &p_minus;
    validate_boundary(p_plus, b)
}

/// Jost solution rebuilt from a kernel row:
/// `f(k,x) = e^{ikx} I + ∫_x^{y_max} K(x,y) e^{iky} dy`.
pub fn reconstruct_jost(row: &[CMat], x: f64, h: f64, k: c64, rule: QuadRule) -> CMat {
    let n = row[0].nrows();
    let w = quadrature::weights(rule, row.len(), h);
    let mut acc = linalg::scale(&linalg::eye(n), (linalg::I * k * x).exp());
    for (j, (kk, wj)) in row.iter().zip(&w).enumerate() {
        let y = x + j as f64 * h;
        acc = &acc + &linalg::scale(kk, (linalg::I * k * y).exp() * *wj);
    }
    acc
}

/// `(f(k,0), f'(k,0))` from the kernel, using
/// `f'(k,0) = ikI - K(0,0) + ∫ ∂ₓK(0,y) e^{iky} dy` with a one-sided
/// second-order difference in `x` (extrapolated for `y < 2h`).
pub fn reconstruct_jost_at_origin(kernel: &MarchenkoKernel, k: c64, rule: QuadRule) -> (CMat, CMat) {
    let h = kernel.h;
    let n = kernel.f_values[0].nrows();
    let row0 = &kernel.k_rows[0];
    let f0 = reconstruct_jost(row0, 0.0, h, k, rule);
    let len = row0.len();
    let mut dk: Vec<CMat> = vec![linalg::zeros(n, n); len];
    for (m, slot) in dk.iter_mut().enumerate().take(len).skip(2) {
        let a = &row0[m];
        let b = kernel.k_at(1, m);
        let c = kernel.k_at(2, m);
        *slot = linalg::scale_re(&(&(&linalg::scale_re(&b, 4.0) - &linalg::scale_re(a, 3.0)) - &c), 1.0 / (2.0 * h));
    }
    if len > 3 {
        let slope = &dk[3] - &dk[2];
        dk[1] = &dk[2] - &slope;
        dk[0] = &dk[1] - &slope;
    }
    let w = quadrature::weights(rule, len, h);
    let mut fp = &linalg::scale(&linalg::eye(n), linalg::I * k) - &row0[0];
    for (m, (d, wm)) in dk.iter().zip(&w).enumerate() {
        let y = m as f64 * h;
        fp = &fp + &linalg::scale(d, (linalg::I * k * y).exp() * *wm);
    }
    (f0, fp)
}

/// Per-stage residuals of an inversion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseDiagnostics {
    pub tail_residual: f64,
    pub s_inf_deviation: f64,
    pub fs_hermiticity: f64,
    pub f_at_y_max: f64,
    pub max_condition: f64,
    pub max_marchenko_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredInput {
    pub potential: Potential,
    pub bc: BoundaryCondition,
    pub diagnostics: InverseDiagnostics,
    pub kernel: MarchenkoKernel,
    pub tail: TailFit,
}

/// `F_s` on `[-2·y_max, 2·y_max]` and `F` on `[0, 2·y_max]`, both with step `h`.
pub fn marchenko_data(data: &ScatteringData, fit: &TailFit, h: f64, y_max: f64) -> (Vec<CMat>, Vec<CMat>) {
    let half = (2.0 * y_max / h).round() as usize;
    let ys: Vec<f64> = (0..=2 * half).map(|m| (m as f64 - half as f64) * h).collect();
    let fs = fourier_fs(data, fit, &ys);
    let f = assemble_f(&fs[half..], &ys[half..], data.bound_states());
    (fs, f)
}

/// Full inverse pipeline.
pub fn invert(data: &ScatteringData, cfg: &InverseConfig) -> Result<RecoveredInput> {
    cfg.validate()?;
    let fit = tail_fit(data, cfg)?;
    if fit.deviation > cfg.spectral_tol {
        return Err(ScatterError::SpectralFailure { deviation: fit.deviation });
    }
    let h = cfg.h;
    let y_max = cfg.y_max();
    let nodes = cfg.steps(y_max);
    let xp = cfg.steps(cfg.x_max);
    let (fs, f) = marchenko_data(data, &fit, h, y_max);
    let fs_hermiticity = fs.iter().map(linalg::hermiticity_defect).fold(0.0, f64::max);
    let f_at_y_max = linalg::max_abs(&f[nodes]);
    if f_at_y_max > cfg.truncation_tol {
        return Err(ScatterError::TruncationTooShort { value: f_at_y_max });
    }
    let rows: Vec<MarchenkoRow> = (0..=xp)
        .into_par_iter()
        .map(|p| solve_marchenko(&f, p, nodes, h, cfg.quad))
        .collect::<Result<_>>()?;
    let diag: Vec<CMat> = rows.iter().map(|r| r.k[0].clone()).collect();
    let potential = recover_potential(&diag, h, cfg.x_max)?;
    let bc = recover_boundary(&fit.s_inf, fit.g1(), &diag[0])?;
    let diagnostics = InverseDiagnostics {
        tail_residual: fit.residual,
        s_inf_deviation: fit.deviation,
        fs_hermiticity,
        f_at_y_max,
        max_condition: rows.iter().map(|r| r.cond).fold(0.0, f64::max),
        max_marchenko_residual: rows.iter().map(|r| r.residual).fold(0.0, f64::max),
    };
    let kernel = MarchenkoKernel {
        h,
        y_max,
        fs_values: fs,
        f_values: f,
        x_grid: (0..=xp).map(|p| p as f64 * h).collect(),
        k_rows: rows.into_iter().map(|r| r.k).collect(),
    };
    Ok(RecoveredInput { potential, bc, diagnostics, kernel, tail: fit })
}
