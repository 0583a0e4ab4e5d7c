//! Grid-resolution checks of the Marchenko-class conditions and of
//! Levinson's theorem for a scattering data set.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScatterError};
use crate::inverse::{self, InverseConfig, TailFit};
use crate::linalg::{self, c64, cx, CMat};
use crate::quadrature::{self, QuadRule};
use crate::types::{BoundState, BoundaryCondition, JostBundle, ScatteringData};

pub const UNITARITY_TOL: f64 = 1e-6;
pub const JOST_TOL: f64 = 1e-6;
/// Reconstructed Jost matrices carry quadrature error; residuals between
/// [`JOST_TOL`] and this bound are inconclusive rather than failures.
pub const JOST_RECONSTRUCTED_TOL: f64 = 1e-2;
pub const UNIQUENESS_TOL: f64 = 1e-6;
pub const VC_SMALL: f64 = 1e-4;
pub const VC_GAP: f64 = 1e-2;
pub const VB_TOL: f64 = 1e-6;
pub const SNAP_TOL: f64 = 1e-3;
pub const LEVINSON_TOL: f64 = 0.05 * PI;
/// Largest admissible phase step of `det S` between adjacent nodes.
pub const PHASE_JUMP_LIMIT: f64 = PI / 4.0;
/// Share of the `F_s'` moment allowed past `y_max`.
pub const TAIL_SHARE: f64 = 0.01;
/// Moment densities and remainders below this are roundoff.
pub const REMAINDER_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    fn from_bound(residual: f64, tol: f64) -> Self {
        if residual <= tol {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub verdict: Verdict,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn new(verdict: Verdict, residual: f64) -> Self {
        Self { verdict, residual, note: None }
    }

    fn inconclusive(note: impl Into<String>) -> Self {
        Self { verdict: Verdict::Inconclusive, residual: f64::NAN, note: Some(note.into()) }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// `max_k max(‖S(-k) - S(k)†‖, ‖S(k)S(k)† - I‖)` in the operator norm.
pub fn check_unitarity_symmetry(data: &ScatteringData) -> f64 {
    let s = data.s_values();
    let n = data.n();
    (0..data.len())
        .map(|i| {
            let sym = linalg::op_norm(&(&s[data.mirror(i)] - &s[i].adjoint().to_owned()));
            let uni = linalg::op_norm(&(&(&s[i] * s[i].adjoint()) - &linalg::eye(n)));
            sym.max(uni)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FsRegularity {
    pub verdict: Verdict,
    pub sup: f64,
    /// `∫ (1 + y) |F_s'(y)| dy` over the sampled `y ≥ 0`.
    pub moment: f64,
    /// Estimated share of the moment beyond `y_max`.
    pub tail_share: f64,
    /// `L¹` and `L²` norms of `F_s'` on `[-y_max, -y_max/2]`; diagnostic only.
    pub negative_tail_l1: f64,
    pub negative_tail_l2: f64,
}

/// Boundedness and first-moment estimates of `F_s`, sampled at `y = (m - offset)·h`.
pub fn check_fs_regularity(fs: &[CMat], offset: usize, h: f64) -> FsRegularity {
    let sup = fs.iter().map(linalg::op_norm).fold(0.0, f64::max);
    let pos = &fs[offset..];
    let deriv = |v: &[CMat], i: usize| -> f64 {
        let d = if i == 0 {
            &v[1] - &v[0]
        } else if i + 1 == v.len() {
            &v[i] - &v[i - 1]
        } else {
            linalg::scale_re(&(&v[i + 1] - &v[i - 1]), 0.5)
        };
        linalg::op_norm(&d) / h
    };
    let len = pos.len();
    let half = len / 2;
    let w = quadrature::weights(QuadRule::Trapezoid, len, h);
    let density: Vec<f64> = (0..len).map(|i| (1.0 + i as f64 * h) * deriv(pos, i)).collect();
    let moment: f64 = density.iter().zip(&w).map(|(d, w)| d * w).sum();
    // remainder past y_max, assuming the decay seen between y_max/2 and y_max continues
    let (d_half, d_end) = (density[half], density[len - 1]);
    let remainder = if d_end <= REMAINDER_FLOOR {
        0.0
    } else if d_half > d_end {
        d_end * ((len - 1 - half) as f64 * h) / (d_half / d_end).ln()
    } else {
        f64::INFINITY
    };
    let tail_share = if remainder <= REMAINDER_FLOOR { 0.0 } else { remainder / moment };
    let neg: Vec<CMat> = fs[..=offset].to_vec();
    let quarter = neg.len() / 2;
    let (mut l1, mut l2) = (0.0, 0.0);
    for i in 0..=quarter.min(neg.len().saturating_sub(1)) {
        let d = deriv(&neg, i);
        l1 += h * d;
        l2 += h * d * d;
    }
    let verdict = if !(sup.is_finite() && moment.is_finite()) {
        Verdict::Fail
    } else if tail_share < TAIL_SHARE {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    FsRegularity { verdict, sup, moment, tail_share, negative_tail_l1: l1, negative_tail_l2: l2.sqrt() }
}

/// `max_k ‖J(-k) + S(k)J(k)‖ / ‖J(k)‖` over grid points with `|k| ≤ k_limit`.
pub fn check_jost_consistency(data: &ScatteringData, j_values: &[CMat], k_limit: f64) -> f64 {
    let len = data.len();
    (0..len)
        .filter(|&i| data.k_grid()[i].abs() <= k_limit)
        .map(|i| {
            let r = &j_values[len - 1 - i] + &(&data.s_values()[i] * &j_values[i]);
            linalg::op_norm(&r) / linalg::op_norm(&j_values[i]).max(1e-300)
        })
        .fold(0.0, f64::max)
}

/// Eigenvalue magnitudes (ascending) of the symmetrized Nyström matrix of
/// `X(y) + ∫₀^{y_max} X(z) F(z + y) dz` with `f[m] = F(m·h)`.
pub fn operator_spectrum(f: &[CMat], nodes: usize, h: f64, rule: QuadRule) -> Vec<f64> {
    let n = f[0].nrows();
    let count = nodes + 1;
    let w: Vec<f64> = quadrature::weights(rule, count, h).into_iter().map(f64::sqrt).collect();
    let dim = n * count;
    let m = CMat::from_fn(dim, dim, |r, c| {
        let (j, a) = (r / n, r % n);
        let (i, b) = (c / n, c % n);
        let mut v = f[i + j][(b, a)] * (w[i] * w[j]);
        if r == c {
            v += 1.0;
        }
        v
    });
    let mut mags: Vec<f64> = linalg::hermitian_eigenvalues(&m).into_iter().map(f64::abs).collect();
    mags.sort_by(f64::total_cmp);
    mags
}

/// Smallest singular value of the discretized `I + 𝔉` at `x = 0`.
pub fn check_marchenko_uniqueness(f: &[CMat], nodes: usize, h: f64, rule: QuadRule) -> f64 {
    operator_spectrum(f, nodes, h, rule)[0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VcCount {
    pub verdict: Verdict,
    pub count: usize,
    pub expected: usize,
    /// Relative magnitude of the `expected`-th smallest eigenvalue (0 when none expected).
    pub last_small: f64,
    /// Relative magnitude of the `(expected + 1)`-th smallest eigenvalue.
    pub first_large: f64,
}

/// Counts near-null directions of `I + 𝔉_s` on `[0, y_max]`.
pub fn count_vc_solutions(fs_pos: &[CMat], nodes: usize, h: f64, rule: QuadRule, expected: usize) -> VcCount {
    let mags = operator_spectrum(fs_pos, nodes, h, rule);
    let top = mags.last().copied().unwrap_or(1.0).max(1e-300);
    let rel: Vec<f64> = mags.iter().map(|m| m / top).collect();
    let count = rel.iter().filter(|&&m| m < VC_SMALL).count();
    let last_small = if expected == 0 { 0.0 } else { rel.get(expected - 1).copied().unwrap_or(f64::INFINITY) };
    let first_large = rel.get(expected).copied().unwrap_or(f64::INFINITY);
    let verdict = if count != expected {
        if (count as i64 - expected as i64).abs() == 1
            && rel.get(count.min(expected)).is_some_and(|&m| m > VC_SMALL && m < VC_GAP)
        {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        }
    } else if last_small < VC_SMALL && first_large > VC_GAP {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    VcCount { verdict, count, expected, last_small, first_large }
}

/// `max_j ‖J(iκ_j)† M_j‖ / max(1, ‖J(iκ_j)‖ ‖M_j‖)`.
pub fn check_vb(bound_j: &[(f64, CMat)], bound_states: &[BoundState]) -> f64 {
    bound_states
        .iter()
        .map(|b| {
            let j = bound_j
                .iter()
                .find(|(k, _)| (k - b.kappa).abs() <= 1e-12 * b.kappa.max(1.0))
                .map(|(_, j)| j);
            match j {
                Some(j) => {
                    linalg::op_norm(&(j.adjoint() * &b.m)) / (linalg::op_norm(j) * linalg::op_norm(&b.m)).max(1.0)
                }
                None => f64::INFINITY,
            }
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Levinson {
    pub verdict: Verdict,
    pub lhs: f64,
    pub rhs: f64,
    /// `𝒩 = Σ m_j` from the bound-state list.
    pub n_data: usize,
    /// `𝒩` implied by the phase winding.
    pub n_levinson: f64,
    pub mu: usize,
    pub n_dirichlet: usize,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn count_near(vals: &[f64], target: f64) -> (usize, bool) {
    let count = vals.iter().filter(|v| (*v - target).abs() <= SNAP_TOL).count();
    let all_snapped = vals.iter().all(|v| (v.abs() - 1.0).abs() <= SNAP_TOL);
    (count, all_snapped)
}

/// `S(0⁺)` from the two smallest positive nodes: the hermitian part
/// `(S(k) + S(-k))/2` is even in `k`, so a Richardson step in `k²`.
pub fn s_at_zero(data: &ScatteringData) -> CMat {
    let half = data.len() / 2;
    let (i1, i2) = (half, half + 1);
    let k = data.k_grid();
    let s = data.s_values();
    let (k1, k2) = (k[i1], k[i2]);
    let h1 = linalg::hermitian_part(&s[i1]);
    let h2 = linalg::hermitian_part(&s[i2]);
    let d = k2 * k2 - k1 * k1;
    linalg::hermitian_part(&(&linalg::scale_re(&h1, k2 * k2 / d) - &linalg::scale_re(&h2, k1 * k1 / d)))
}

/// Unwound `arg det S(0⁺) - arg det S(∞)`.
pub fn levinson_lhs(data: &ScatteringData, fit: &TailFit) -> Result<f64> {
    let half = data.len() / 2;
    let k = &data.k_grid()[half..];
    let s = &data.s_values()[half..];
    let mut phase = Vec::with_capacity(k.len());
    let mut prev = linalg::det(&s[0]).arg();
    phase.push(prev);
    for (i, m) in s.iter().enumerate().skip(1) {
        let raw = linalg::det(m).arg();
        let mut step = raw - (prev.rem_euclid(2.0 * PI));
        step = (step + PI).rem_euclid(2.0 * PI) - PI;
        if step.abs() > PHASE_JUMP_LIMIT {
            return Err(ScatterError::PhaseUnwrapFailure { k: k[i], jump: step });
        }
        prev += step;
        phase.push(prev);
    }
    // det S(-k) = conj det S(k), so the phase is odd about its value at 0⁺:
    // fit φ₀ + a·k + b·k³ through the three smallest nodes
    let at_zero = if k.len() >= 3 { odd_intercept(&k[..3], &phase[..3]) } else {
        phase[0] - k[0] * (phase[1] - phase[0]) / (k[1] - k[0])
    };
    // remaining winding past k_max from the tail model
    let last = k.len() - 1;
    let model_end = fit.model(k[last]);
    let rest = (linalg::det(&model_end) / linalg::det(&fit.s_inf)).arg();
    let at_inf = phase[last] - rest;
    Ok(at_zero - at_inf)
}

/// Intercept of `c₀ + c₁k + c₃k³` through three points.
fn odd_intercept(k: &[f64], p: &[f64]) -> f64 {
    let m = CMat::from_fn(3, 3, |i, j| cx([1.0, k[i], k[i].powi(3)][j], 0.0));
    let rhs = CMat::from_fn(3, 1, |i, _| cx(p[i], 0.0));
    linalg::solve(&m, &rhs)[(0, 0)].re
}

pub fn levinson_check(data: &ScatteringData, fit: &TailFit) -> Levinson {
    let n = data.n();
    let n_data = data.total_multiplicity();
    let s0 = s_at_zero(data);
    let (mu, snapped0) = count_near(&linalg::hermitian_eigenvalues(&s0), 1.0);
    let (n_dirichlet, snapped_inf) = count_near(&linalg::hermitian_eigenvalues(&fit.s_inf_raw), -1.0);
    let rhs = PI * (2.0 * n_data as f64 + mu as f64 + n_dirichlet as f64 - n as f64);
    let mut out = Levinson {
        verdict: Verdict::Inconclusive,
        lhs: f64::NAN,
        rhs,
        n_data,
        n_levinson: f64::NAN,
        mu,
        n_dirichlet,
        n,
        note: None,
    };
    match levinson_lhs(data, fit) {
        Ok(lhs) => {
            out.lhs = lhs;
            out.n_levinson = 0.5 * (lhs / PI - mu as f64 - n_dirichlet as f64 + n as f64);
            out.verdict = if !(snapped0 && snapped_inf) {
                out.note = Some("eigenvalues of S(0+) or S_inf not within snapping tolerance of ±1".into());
                Verdict::Inconclusive
            } else {
                Verdict::from_bound((lhs - rhs).abs(), LEVINSON_TOL)
            };
        }
        Err(e) => out.note = Some(e.to_string()),
    }
    out
}

/// Per-condition verdicts with their residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterizationReport {
    pub unitarity: Check,
    pub tail: Check,
    pub fs_regularity: Option<FsRegularity>,
    pub jost_consistency: Check,
    pub uniqueness: Check,
    pub vc: Option<VcCount>,
    pub vb: Check,
    pub levinson: Option<Levinson>,
}

impl CharacterizationReport {
    pub fn verdicts(&self) -> Vec<(&'static str, Verdict)> {
        let missing = Verdict::Inconclusive;
        vec![
            ("unitarity", self.unitarity.verdict),
            ("tail", self.tail.verdict),
            ("fs_regularity", self.fs_regularity.as_ref().map_or(missing, |c| c.verdict)),
            ("jost_consistency", self.jost_consistency.verdict),
            ("uniqueness", self.uniqueness.verdict),
            ("vc", self.vc.as_ref().map_or(missing, |c| c.verdict)),
            ("vb", self.vb.verdict),
            ("levinson", self.levinson.as_ref().map_or(missing, |c| c.verdict)),
        ]
    }

    /// `Fail` if any check fails, else `Inconclusive` if any is, else `Pass`.
    pub fn overall(&self) -> Verdict {
        let v = self.verdicts();
        if v.iter().any(|(_, v)| *v == Verdict::Fail) {
            Verdict::Fail
        } else if v.iter().any(|(_, v)| *v == Verdict::Inconclusive) {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        }
    }

    /// Plain-text table, one condition per line.
    pub fn table(&self) -> String {
        let fmt = |x: f64| if x.is_nan() { "-".to_string() } else { format!("{x:.3e}") };
        let mut out = String::from("condition          verdict       residual\n");
        let mut line = |name: &str, v: Verdict, r: String| {
            out.push_str(&format!("{name:<18} {:<13} {r}\n", v.to_string()));
        };
        line("unitarity", self.unitarity.verdict, fmt(self.unitarity.residual));
        line("tail", self.tail.verdict, fmt(self.tail.residual));
        match &self.fs_regularity {
            Some(c) => line("fs_regularity", c.verdict, format!("moment {} tail share {}", fmt(c.moment), fmt(c.tail_share))),
            None => line("fs_regularity", Verdict::Inconclusive, "-".into()),
        }
        line("jost_consistency", self.jost_consistency.verdict, fmt(self.jost_consistency.residual));
        line("uniqueness", self.uniqueness.verdict, fmt(self.uniqueness.residual));
        match &self.vc {
            Some(c) => line("vc", c.verdict, format!("count {} expected {}", c.count, c.expected)),
            None => line("vc", Verdict::Inconclusive, "-".into()),
        }
        line("vb", self.vb.verdict, fmt(self.vb.residual));
        match &self.levinson {
            Some(c) => line("levinson", c.verdict, format!("lhs {} rhs {}", fmt(c.lhs), fmt(c.rhs))),
            None => line("levinson", Verdict::Inconclusive, "-".into()),
        }
        out
    }
}

/// Jost data rebuilt from the Marchenko kernel near `x = 0`.
struct Reconstruction {
    bc: BoundaryCondition,
    f0: Vec<CMat>,
    fp0: Vec<CMat>,
    bound_j: Vec<(f64, CMat)>,
}

fn reconstruct(data: &ScatteringData, fit: &TailFit, f: &[CMat], cfg: &InverseConfig) -> Result<Reconstruction> {
    let h = cfg.h;
    let nodes = cfg.steps(cfg.y_max());
    let rows = (0..3)
        .map(|p| inverse::solve_marchenko(f, p, nodes, h, cfg.quad).map(|r| r.k))
        .collect::<Result<Vec<_>>>()?;
    let bc = inverse::recover_boundary(&fit.s_inf, fit.g1(), &rows[0][0])?;
    let kernel = crate::types::MarchenkoKernel {
        h,
        y_max: cfg.y_max(),
        fs_values: Vec::new(),
        f_values: f.to_vec(),
        x_grid: vec![0.0, h, 2.0 * h],
        k_rows: rows,
    };
    let at = |k: c64| inverse::reconstruct_jost_at_origin(&kernel, k, cfg.quad);
    let (f0, fp0): (Vec<CMat>, Vec<CMat>) = data.k_grid().iter().map(|&k| at(cx(k, 0.0))).unzip();
    let bound_j = data
        .bound_states()
        .iter()
        .map(|b| {
            let (f, fp) = at(cx(0.0, b.kappa));
            (b.kappa, &(f.adjoint() * bc.b()) - &(fp.adjoint() * bc.a()))
        })
        .collect();
    Ok(Reconstruction { bc, f0, fp0, bound_j })
}

/// Runs every implemented check. Jost-based checks use `jost` when given
/// and otherwise a reconstruction from the Marchenko kernel, whose
/// quadrature error only supports a three-valued verdict.
pub fn marchenko_class_report(
    data: &ScatteringData,
    jost: Option<&JostBundle>,
    cfg: &InverseConfig,
) -> CharacterizationReport {
    let unitarity_residual = check_unitarity_symmetry(data);
    let unitarity = Check::new(Verdict::from_bound(unitarity_residual, UNITARITY_TOL), unitarity_residual);

    let fit = inverse::tail_fit(data, cfg);
    let tail = match &fit {
        Ok(fit) => Check::new(Verdict::Pass, fit.residual),
        Err(ScatterError::TailNotSettled { residual }) => Check::new(Verdict::Fail, *residual),
        Err(e) => Check::inconclusive(e.to_string()),
    };
    let Ok(fit) = fit else {
        let skipped = || Check::inconclusive("tail fit unavailable");
        let vb = match jost {
            Some(j) => {
                let r = check_vb(&j.bound_j, data.bound_states());
                Check::new(Verdict::from_bound(r, VB_TOL), r)
            }
            None => skipped(),
        };
        let jost_consistency = match jost {
            Some(j) => {
                let r = check_jost_consistency(data, &j.j_values, f64::INFINITY);
                Check::new(Verdict::from_bound(r, JOST_TOL), r)
            }
            None => skipped(),
        };
        return CharacterizationReport {
            unitarity,
            tail,
            fs_regularity: None,
            jost_consistency,
            uniqueness: skipped(),
            vc: None,
            vb,
            levinson: None,
        };
    };

    let h = cfg.h;
    let y_max = cfg.y_max();
    let nodes = cfg.steps(y_max);
    let (fs, f) = inverse::marchenko_data(data, &fit, h, y_max);
    let offset = fs.len() / 2;
    // regularity is judged on the whole transformed range [-2 y_max, 2 y_max]
    let fs_regularity = Some(check_fs_regularity(&fs, offset, h));

    let sigma = check_marchenko_uniqueness(&f, nodes, h, cfg.quad);
    let uniqueness = Check::new(if sigma > UNIQUENESS_TOL { Verdict::Pass } else { Verdict::Fail }, sigma);
    let vc = Some(count_vc_solutions(&fs[offset..], nodes, h, cfg.quad, data.total_multiplicity()));

    let (jost_consistency, vb) = match jost {
        Some(j) => {
            let r = check_jost_consistency(data, &j.j_values, f64::INFINITY);
            let rb = check_vb(&j.bound_j, data.bound_states());
            (
                Check::new(Verdict::from_bound(r, JOST_TOL), r).with_note("solver Jost matrix"),
                Check::new(Verdict::from_bound(rb, VB_TOL), rb).with_note("solver Jost matrix"),
            )
        }
        None => match reconstruct(data, &fit, &f, cfg) {
            Ok(rec) => {
                let len = data.len();
                let j: Vec<CMat> = (0..len)
                    .map(|i| &(rec.f0[len - 1 - i].adjoint() * rec.bc.b()) - &(rec.fp0[len - 1 - i].adjoint() * rec.bc.a()))
                    .collect();
                let r = check_jost_consistency(data, &j, fit.k_lo);
                let rb = check_vb(&rec.bound_j, data.bound_states());
                let three = |r: f64, tol: f64| {
                    if r <= tol {
                        Verdict::Pass
                    } else if r <= JOST_RECONSTRUCTED_TOL {
                        Verdict::Inconclusive
                    } else {
                        Verdict::Fail
                    }
                };
                (
                    Check::new(three(r, JOST_TOL), r).with_note("reconstructed from the Marchenko kernel"),
                    Check::new(three(rb, VB_TOL), rb).with_note("reconstructed from the Marchenko kernel"),
                )
            }
            Err(e) => (Check::inconclusive(e.to_string()), Check::inconclusive(e.to_string())),
        },
    };

    let levinson = Some(levinson_check(data, &fit));
    CharacterizationReport { unitarity, tail, fs_regularity, jost_consistency, uniqueness, vc, vb, levinson }
}
