//! Direct problem: Jost solutions, Jost matrix, scattering matrix, bound
//! states and their normalization matrices for a data set `{V, A, B}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScatterError};
use crate::linalg::{self, c64, cx, CMat};
use crate::ode::Dopri5;
use crate::quadrature::simpson;
use crate::types::{
    symmetric_grid, validate_scattering_data, BoundState, BoundaryCondition, JostBundle, Potential,
    ScatteringData,
};

/// Condition number of `J(k)` above which a real-axis point is singular.
const SINGULAR_JOST_COND: f64 = 1e12;
/// Spacing bound for the Gram-matrix quadrature of bound-state profiles.
const PROFILE_STEP: f64 = 0.005;
/// Root separation under which two bound states are considered unresolved.
const CLUSTER_TOL: f64 = 1e-8;
/// Absolute κ tolerance of the root refinement.
const KAPPA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DirectConfig {
    /// Integration starts at `min(x_max, end of support of V)`.
    pub x_max: f64,
    pub ode_tol: f64,
    pub k_max: f64,
    pub k_count: usize,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub kappa_step: f64,
    /// Relative smallest-singular-value threshold for zeros of `J(iκ)`.
    pub det_tol: f64,
}

impl Default for DirectConfig {
    fn default() -> Self {
        Self {
            x_max: 40.0,
            ode_tol: 1e-10,
            k_max: 60.0,
            k_count: 2048,
            kappa_min: 1e-3,
            kappa_max: 10.0,
            kappa_step: 1e-2,
            det_tol: 1e-7,
        }
    }
}

impl DirectConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("x_max", self.x_max),
            ("ode_tol", self.ode_tol),
            ("k_max", self.k_max),
            ("kappa_min", self.kappa_min),
            ("kappa_step", self.kappa_step),
            ("det_tol", self.det_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ScatterError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if self.k_count < 4 || self.k_count % 2 != 0 {
            return Err(ScatterError::InvalidConfig(format!(
                "k_count must be even and at least 4, got {}",
                self.k_count
            )));
        }
        if !(self.kappa_max > self.kappa_min) {
            return Err(ScatterError::InvalidConfig("kappa_max must exceed kappa_min".into()));
        }
        Ok(())
    }

    /// Symmetric midpoint grid; never contains `k = 0`.
    pub fn k_grid(&self) -> Vec<f64> {
        symmetric_grid(self.k_max, self.k_count)
    }
}

/// Jost solution and its derivative at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct JostPoint {
    pub x: f64,
    pub f: CMat,
    pub fp: CMat,
}

fn x_end(potential: &Potential, cfg: &DirectConfig) -> f64 {
    potential.support_end().min(cfg.x_max)
}

fn mat_from_row_major(n: usize, v: &[c64]) -> CMat {
    CMat::from_fn(n, n, |i, j| v[i * n + j])
}

/// Integrates the Jost solution backwards from the end of the support, in
/// the variable `g = e^{-ikx} f`, and reports `f`, `f'` at each requested
/// abscissa (returned in the order given).
pub fn jost_profile(potential: &Potential, k: c64, xs: &[f64], cfg: &DirectConfig) -> Result<Vec<JostPoint>> {
    if k.im < 0.0 {
        return Err(ScatterError::InvalidInput(format!("Jost solution needs Im k >= 0, got {k}")));
    }
    let n = potential.n();
    let nn = n * n;
    let end = x_end(potential, cfg);
    let free = |x: f64| -> JostPoint {
        let e = (linalg::I * k * x).exp();
        JostPoint { x, f: linalg::scale(&linalg::eye(n), e), fp: linalg::scale(&linalg::eye(n), e * linalg::I * k) }
    };

    // stops in descending order: outputs inside the support and breakpoints
    let mut stops: Vec<(f64, Option<usize>)> = Vec::new();
    let mut out: Vec<Option<JostPoint>> = vec![None; xs.len()];
    for (idx, &x) in xs.iter().enumerate() {
        if !(x >= 0.0) {
            return Err(ScatterError::InvalidInput(format!("profile abscissa {x} is negative")));
        }
        if x >= end {
            out[idx] = Some(free(x));
        } else {
            stops.push((x, Some(idx)));
        }
    }
    for b in potential.breakpoints() {
        if b < end {
            stops.push((b, None));
        }
    }
    stops.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut y = vec![c64::new(0.0, 0.0); 2 * nn];
    for i in 0..n {
        y[i * n + i] = c64::new(1.0, 0.0);
    }
    let two_ik = linalg::I * k * 2.0;
    let mut vbuf = vec![c64::new(0.0, 0.0); nn];
    let mut rhs = |x: f64, y: &[c64], dy: &mut [c64]| {
        potential.eval_into(x, &mut vbuf);
        let (g, p) = y.split_at(nn);
        let (dg, dp) = dy.split_at_mut(nn);
        dg.copy_from_slice(p);
        for i in 0..n {
            for j in 0..n {
                let mut acc = -two_ik * p[i * n + j];
                for l in 0..n {
                    acc += vbuf[i * n + l] * g[l * n + j];
                }
                dp[i * n + j] = acc;
            }
        }
    };
    // local tolerance a decade below ode_tol keeps the global error near it
    let mut ode = Dopri5::new(2 * nn, 0.1 * cfg.ode_tol, 1e-4 * cfg.ode_tol);
    let mut x = end;
    let record = |x: f64, y: &[c64]| -> JostPoint {
        let e = (linalg::I * k * x).exp();
        let g = mat_from_row_major(n, &y[..nn]);
        let p = mat_from_row_major(n, &y[nn..]);
        let fp = &p + &linalg::scale(&g, linalg::I * k);
        JostPoint { x, f: linalg::scale(&g, e), fp: linalg::scale(&fp, e) }
    };
    for (stop, idx) in stops {
        ode.advance(&mut rhs, &mut y, x, stop)?;
        x = stop;
        if let Some(idx) = idx {
            out[idx] = Some(record(x, &y));
        }
    }
    Ok(out.into_iter().map(|p| p.expect("every abscissa is filled")).collect())
}

/// `(f(k,0), f'(k,0))`.
pub fn jost_solution(potential: &Potential, k: c64, cfg: &DirectConfig) -> Result<(CMat, CMat)> {
    let p = jost_profile(potential, k, &[0.0], cfg)?.pop().expect("one point requested");
    if !linalg::is_finite(&p.f) || !linalg::is_finite(&p.fp) {
        return Err(ScatterError::NonFinite("Jost solution"));
    }
    Ok((p.f, p.fp))
}

/// `J(k) = f(-k*,0)†B - f'(-k*,0)†A` from the values at `-k*`.
pub fn jost_matrix(f0_minus: &CMat, fp0_minus: &CMat, bc: &BoundaryCondition) -> Result<CMat> {
    let n = bc.n();
    for m in [f0_minus, fp0_minus] {
        if m.nrows() != n || m.ncols() != n {
            return Err(ScatterError::DimensionMismatch { expected: n, found: m.nrows() });
        }
    }
    Ok(&(f0_minus.adjoint() * bc.b()) - &(fp0_minus.adjoint() * bc.a()))
}

/// `J(k)` for any `k` with `Im k ≥ 0`, integrating at `-k*`.
pub fn jost_matrix_at(potential: &Potential, bc: &BoundaryCondition, k: c64, cfg: &DirectConfig) -> Result<CMat> {
    let (f0, fp0) = jost_solution(potential, -k.conj(), cfg)?;
    jost_matrix(&f0, &fp0, bc)
}

/// `S(k) = -J(-k) J(k)^{-1}`.
pub fn scattering_from_jost(j_minus: &CMat, j_plus: &CMat, k: f64) -> Result<CMat> {
    let c = linalg::cond(j_plus);
    if !(c <= SINGULAR_JOST_COND) {
        return Err(ScatterError::SingularJost { k, cond: c });
    }
    Ok(linalg::scale_re(&(j_minus * linalg::inverse(j_plus)), -1.0))
}

/// Jost data on a symmetric grid: `f`, `f'` at every node and `J` built from
/// the mirrored node.
pub fn jost_bundle(
    potential: &Potential,
    bc: &BoundaryCondition,
    k_grid: &[f64],
    cfg: &DirectConfig,
) -> Result<JostBundle> {
    if potential.n() != bc.n() {
        return Err(ScatterError::DimensionMismatch { expected: bc.n(), found: potential.n() });
    }
    let values: Vec<(CMat, CMat)> = k_grid
        .par_iter()
        .map(|&k| jost_solution(potential, cx(k, 0.0), cfg))
        .collect::<Result<_>>()?;
    let (f0, fp0): (Vec<CMat>, Vec<CMat>) = values.into_iter().unzip();
    let len = k_grid.len();
    let j_values = (0..len)
        .map(|i| jost_matrix(&f0[len - 1 - i], &fp0[len - 1 - i], bc))
        .collect::<Result<_>>()?;
    Ok(JostBundle { k_grid: k_grid.to_vec(), f0, fp0, j_values, bound_j: Vec::new() })
}

/// Scattering matrix on a symmetric grid, with the Jost data that produced it.
pub fn scattering_matrix(
    potential: &Potential,
    bc: &BoundaryCondition,
    k_grid: &[f64],
    cfg: &DirectConfig,
) -> Result<(Vec<CMat>, JostBundle)> {
    let bundle = jost_bundle(potential, bc, k_grid, cfg)?;
    let len = k_grid.len();
    let s = (0..len)
        .map(|i| scattering_from_jost(&bundle.j_values[len - 1 - i], &bundle.j_values[i], k_grid[i]))
        .collect::<Result<_>>()?;
    Ok((s, bundle))
}

/// Regular solution with `φ(k,0) = A`, `φ'(k,0) = B`, at ascending `xs`.
pub fn regular_solution(
    potential: &Potential,
    bc: &BoundaryCondition,
    k: c64,
    xs: &[f64],
    cfg: &DirectConfig,
) -> Result<Vec<JostPoint>> {
    let n = potential.n();
    if bc.n() != n {
        return Err(ScatterError::DimensionMismatch { expected: n, found: bc.n() });
    }
    let nn = n * n;
    let mut stops: Vec<(f64, Option<usize>)> = xs.iter().enumerate().map(|(i, &x)| (x, Some(i))).collect();
    if stops.iter().any(|s| !(s.0 >= 0.0)) {
        return Err(ScatterError::InvalidInput("profile abscissae must be nonnegative".into()));
    }
    stops.extend(potential.breakpoints().into_iter().map(|b| (b, None)));
    stops.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut y = vec![c64::new(0.0, 0.0); 2 * nn];
    for i in 0..n {
        for j in 0..n {
            y[i * n + j] = bc.a()[(i, j)];
            y[nn + i * n + j] = bc.b()[(i, j)];
        }
    }
    let k2 = k * k;
    let mut vbuf = vec![c64::new(0.0, 0.0); nn];
    let mut rhs = |x: f64, y: &[c64], dy: &mut [c64]| {
        potential.eval_into(x, &mut vbuf);
        let (phi, dphi) = y.split_at(nn);
        let (d0, d1) = dy.split_at_mut(nn);
        d0.copy_from_slice(dphi);
        for i in 0..n {
            for j in 0..n {
                let mut acc = -k2 * phi[i * n + j];
                for l in 0..n {
                    acc += vbuf[i * n + l] * phi[l * n + j];
                }
                d1[i * n + j] = acc;
            }
        }
    };
    // local tolerance a decade below ode_tol keeps the global error near it
    let mut ode = Dopri5::new(2 * nn, 0.1 * cfg.ode_tol, 1e-4 * cfg.ode_tol);
    let mut out: Vec<Option<JostPoint>> = vec![None; xs.len()];
    let mut x = 0.0;
    for (stop, idx) in stops {
        ode.advance(&mut rhs, &mut y, x, stop)?;
        x = stop;
        if let Some(idx) = idx {
            out[idx] = Some(JostPoint {
                x,
                f: mat_from_row_major(n, &y[..nn]),
                fp: mat_from_row_major(n, &y[nn..]),
            });
        }
    }
    Ok(out.into_iter().map(|p| p.expect("every abscissa is filled")).collect())
}

/// `Ψ(k,x) = f(-k,x) + f(k,x) S(k)`.
pub fn physical_solution(f_minus: &CMat, f_plus: &CMat, s: &CMat) -> CMat {
    f_minus + &(f_plus * s)
}

/// `Ψ_j(x) = f(iκ_j, x) M_j` along a profile.
pub fn bound_state_solutions(profile: &[JostPoint], m: &CMat) -> Vec<JostPoint> {
    profile
        .iter()
        .map(|p| JostPoint { x: p.x, f: &p.f * m, fp: &p.fp * m })
        .collect()
}

/// A zero of `det J(iκ)` with its kernel projector.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundStateCandidate {
    pub kappa: f64,
    pub multiplicity: usize,
    pub projector: CMat,
    /// `J(iκ)` for the boundary matrices as given.
    pub jost: CMat,
}

struct Probe {
    rho: f64,
    det: c64,
    j: CMat,
    reference: f64,
}

fn probe(potential: &Potential, bcn: &BoundaryCondition, kappa: f64, cfg: &DirectConfig) -> Result<Probe> {
    let (f0, fp0) = jost_solution(potential, cx(0.0, kappa), cfg)?;
    let j = jost_matrix(&f0, &fp0, bcn)?;
    // scale of J = [f0; fp0]†[B; -A] that cannot vanish with J itself
    let reference = linalg::op_norm(&linalg::vstack(&f0, &fp0)) * linalg::op_norm(&linalg::vstack(bcn.a(), bcn.b()));
    let sv = linalg::singular_values(&j);
    let rho = sv[sv.len() - 1] / reference;
    Ok(Probe { rho, det: linalg::det(&j), j, reference })
}

/// Scans `κ ∈ [κ_min, κ_max]` for zeros of `det J(iκ)` and refines each one.
pub fn locate_bound_states(
    potential: &Potential,
    bc: &BoundaryCondition,
    cfg: &DirectConfig,
) -> Result<Vec<BoundStateCandidate>> {
    cfg.validate()?;
    let bcn = bc.normalized();
    let count = ((cfg.kappa_max - cfg.kappa_min) / cfg.kappa_step).ceil() as usize;
    let kappas: Vec<f64> = (0..=count)
        .map(|i| (cfg.kappa_min + i as f64 * cfg.kappa_step).min(cfg.kappa_max))
        .collect();
    let probes: Vec<Probe> = kappas
        .par_iter()
        .map(|&kappa| probe(potential, &bcn, kappa, cfg))
        .collect::<Result<_>>()?;
    let rho: Vec<f64> = probes.iter().map(|p| p.rho).collect();
    let last = rho.len() - 1;

    // a dip at either end of the scan may hide a zero outside the window
    let edge_small = 1e-3;
    if rho[0] < edge_small && rho[0] <= rho[1] {
        // a zero-energy resonance pushes the linear extrapolation to κ ≤ 0;
        // only a zero inside (0, κ_min) is inconclusive
        let slope = (rho[1] - rho[0]) / (kappas[1] - kappas[0]);
        let zero_at = kappas[0] - rho[0] / slope;
        if !(zero_at < 0.5 * kappas[0]) {
            return Err(ScatterError::ScanInconclusive { kappa: kappas[0] });
        }
    }
    if rho[last] < edge_small && rho[last] <= rho[last - 1] {
        return Err(ScatterError::ScanInconclusive { kappa: kappas[last] });
    }

    let mut roots: Vec<f64> = Vec::new();
    for i in 1..last {
        if !(rho[i] <= rho[i - 1] && rho[i] < rho[i + 1]) {
            continue;
        }
        let (lo, hi) = (kappas[i - 1], kappas[i + 1]);
        let kappa = refine_root(potential, &bcn, cfg, (lo, &probes[i - 1]), (kappas[i], &probes[i]), (hi, &probes[i + 1]))?;
        let p = probe(potential, &bcn, kappa, cfg)?;
        if p.rho < cfg.det_tol {
            if kappa >= cfg.kappa_max - cfg.kappa_step * 1e-3 {
                return Err(ScatterError::ScanInconclusive { kappa });
            }
            roots.push(kappa);
        }
    }
    roots.sort_by(f64::total_cmp);
    for w in roots.windows(2) {
        if w[1] - w[0] < CLUSTER_TOL {
            return Err(ScatterError::ClusterUnresolved { first: w[0], second: w[1] });
        }
    }

    roots
        .into_iter()
        .map(|kappa| {
            let p = probe(potential, &bcn, kappa, cfg)?;
            let (projector, multiplicity) = linalg::left_kernel_projector(&p.j, cfg.det_tol * p.reference);
            let jost = jost_matrix_at(potential, bc, cx(0.0, kappa), cfg)?;
            Ok(BoundStateCandidate { kappa, multiplicity: multiplicity.max(1), projector, jost })
        })
        .collect()
}

/// Refines a zero of `det J(iκ)` around a dip of the scaled smallest
/// singular value: Illinois on the phase-aligned determinant when it changes
/// sign across the bracket, golden-section on the singular value otherwise.
fn refine_root(
    potential: &Potential,
    bcn: &BoundaryCondition,
    cfg: &DirectConfig,
    left: (f64, &Probe),
    mid: (f64, &Probe),
    right: (f64, &Probe),
) -> Result<f64> {
    let phase = if left.1.det.norm() > 0.0 { left.1.det.conj() / left.1.det.norm() } else { cx(1.0, 0.0) };
    let signed = |p: &Probe| (p.det * phase).re / p.reference.powi(bcn.n() as i32);
    let fl = signed(left.1);
    let fm = signed(mid.1);
    let fr = signed(right.1);
    let bracket = if fl * fm <= 0.0 {
        Some(((left.0, fl), (mid.0, fm)))
    } else if fm * fr <= 0.0 {
        Some(((mid.0, fm), (right.0, fr)))
    } else {
        None
    };
    if let Some(((mut a, mut fa), (mut b, mut fb))) = bracket {
        let mut side = 0i32;
        for _ in 0..200 {
            if (b - a).abs() < KAPPA_TOL {
                break;
            }
            let c = (a * fb - b * fa) / (fb - fa);
            let c = if c.is_finite() && c > a.min(b) && c < a.max(b) { c } else { 0.5 * (a + b) };
            let fc = signed(&probe(potential, bcn, c, cfg)?);
            if fc == 0.0 {
                return Ok(c);
            }
            if fc * fb < 0.0 {
                a = b;
                fa = fb;
                side = 0;
            } else {
                fa *= if side == -1 { 0.5 } else { 1.0 };
                side = -1;
            }
            b = c;
            fb = fc;
        }
        let root = if fa.abs() < fb.abs() { a } else { b };
        let p = probe(potential, bcn, root, cfg)?;
        if p.rho < cfg.det_tol {
            return Ok(root);
        }
    }
    // golden-section search on the scaled smallest singular value
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (left.0, right.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = probe(potential, bcn, c, cfg)?.rho;
    let mut fd = probe(potential, bcn, d, cfg)?.rho;
    while (b - a).abs() > KAPPA_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = probe(potential, bcn, c, cfg)?.rho;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = probe(potential, bcn, d, cfg)?.rho;
        }
    }
    Ok(0.5 * (a + b))
}

/// Gram matrix `∫₀^∞ f(iκ,x)† f(iκ,x) dx`: Simpson on each smooth piece of
/// the support plus the exact free tail.
pub fn jost_gram(potential: &Potential, kappa: f64, cfg: &DirectConfig) -> Result<CMat> {
    let n = potential.n();
    let end = x_end(potential, cfg);
    let mut knots = vec![0.0];
    knots.extend(potential.breakpoints().into_iter().filter(|&b| b < end));
    knots.push(end);
    knots.dedup();
    let mut gram = linalg::scale_re(&linalg::eye(n), (-2.0 * kappa * end).exp() / (2.0 * kappa));
    if end <= 0.0 {
        return Ok(gram);
    }
    let mut xs: Vec<f64> = Vec::new();
    let mut pieces: Vec<(usize, usize, f64)> = Vec::new();
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut m = ((b - a) / PROFILE_STEP).ceil() as usize;
        m = m.max(2);
        m += m % 2;
        let h = (b - a) / m as f64;
        let start = xs.len();
        xs.extend((0..=m).map(|i| if i == m { b } else { a + i as f64 * h }));
        pieces.push((start, m + 1, h));
    }
    let profile = jost_profile(potential, cx(0.0, kappa), &xs, cfg)?;
    let integrand: Vec<CMat> = profile.iter().map(|p| p.f.adjoint() * &p.f).collect();
    for (start, len, h) in pieces {
        for i in 0..n {
            for j in 0..n {
                let re: Vec<f64> = integrand[start..start + len].iter().map(|m| m[(i, j)].re).collect();
                let im: Vec<f64> = integrand[start..start + len].iter().map(|m| m[(i, j)].im).collect();
                gram[(i, j)] += cx(simpson(&re, h), simpson(&im, h));
            }
        }
    }
    Ok(linalg::hermitian_part(&gram))
}

/// `M_j = B_j^{-1/2} P_j` with `B_j = (I - P_j) + P_j A_j P_j`.
pub fn normalization_matrices(
    potential: &Potential,
    candidates: &[BoundStateCandidate],
    cfg: &DirectConfig,
) -> Result<Vec<BoundState>> {
    let n = potential.n();
    candidates
        .iter()
        .map(|c| {
            let gram = jost_gram(potential, c.kappa, cfg)?;
            let p = &c.projector;
            let b = &(&linalg::eye(n) - p) + &(p * &gram * p);
            let eig = linalg::hermitian_eigenvalues(&b);
            if !(eig[0] > 0.0) {
                return Err(ScatterError::NotPositive { kappa: c.kappa, min_eig: eig[0] });
            }
            let m = linalg::hermitian_part(&(linalg::hermitian_fn(&b, |x| 1.0 / x.sqrt()) * p));
            BoundState::new(c.kappa, m)
        })
        .collect()
}

/// Everything `solve_direct` computes.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectOutput {
    pub data: ScatteringData,
    pub jost: JostBundle,
}

/// Scattering matrix on the configured grid plus bound states.
pub fn solve_direct(potential: &Potential, bc: &BoundaryCondition, cfg: &DirectConfig) -> Result<DirectOutput> {
    cfg.validate()?;
    let grid = cfg.k_grid();
    let (s, mut jost) = scattering_matrix(potential, bc, &grid, cfg)?;
    let candidates = locate_bound_states(potential, bc, cfg)?;
    let bound_states = normalization_matrices(potential, &candidates, cfg)?;
    jost.bound_j = candidates.iter().map(|c| (c.kappa, c.jost.clone())).collect();
    let data = validate_scattering_data(grid, s, bound_states)?;
    Ok(DirectOutput { data, jost })
}
