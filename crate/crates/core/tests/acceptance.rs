//! Acceptance suite. Prints one `criterion N: pass|fail` line per criterion
//! and fails if any criterion fails. Run with `--nocapture` to see the lines.

use std::f64::consts::PI;
use std::time::Instant;

use marchenko::characterize::{
    check_jost_consistency, check_unitarity_symmetry, check_vb, count_vc_solutions, levinson_check,
    marchenko_class_report, CharacterizationReport, Verdict,
};
use marchenko::direct::{jost_solution, solve_direct, DirectConfig, DirectOutput};
use marchenko::fixtures::{self, Fixture};
use marchenko::inverse::{invert, marchenko_data, tail_fit, InverseConfig};
use marchenko::linalg::{self, c64, cx, CMat};
use marchenko::oracles::step_jost_oracle;
use marchenko::roundtrip::round_trip;
use marchenko::{boundary_equivalent, BoundState, BoundaryCondition, Potential, PotentialShape, ScatteringData};

const SIGN_TOL: f64 = 1e-10;
const ROBIN_TOL: f64 = 1e-8;
const CANCEL_F_TOL: f64 = 1e-6;
const CANCEL_V_TOL: f64 = 1e-4;
const UNITARITY_TOL: f64 = 1e-8;
const JOST_TOL: f64 = 1e-6;
const LEVINSON_TOL: f64 = 0.05 * PI;
const ORACLE_TOL: f64 = 1e-8;
const DOUBLING_RATIO: f64 = 2.0;
/// Residuals below this are rounding noise; their ratios are not meaningful.
const NOISE_FLOOR: f64 = 1e-10;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn e(x: f64) -> String {
    format!("{x:.2e}")
}

fn direct_cfg() -> DirectConfig {
    DirectConfig::default()
}

/// Robin `S(k)` written out directly.
fn robin_s(theta: f64, k: f64) -> c64 {
    let (s, c) = theta.sin_cos();
    -(cx(c, -k * s)) / cx(c, k * s)
}

fn criterion_1() -> Outcome {
    let cfg = direct_cfg();
    let mut worst: f64 = 0.0;
    let mut separation = f64::INFINITY;
    for n in [1, 2] {
        let zero = Potential::zero(n, 40.0);
        let dir = solve_direct(&zero, &BoundaryCondition::dirichlet(n), &cfg).expect("dirichlet");
        let neu = solve_direct(&zero, &BoundaryCondition::neumann(n), &cfg).expect("neumann");
        let minus = linalg::scale_re(&linalg::eye(n), -1.0);
        let plus = linalg::eye(n);
        for (sd, sn) in dir.data.s_values().iter().zip(neu.data.s_values()) {
            worst = worst.max(linalg::max_diff(sd, &minus)).max(linalg::max_diff(sn, &plus));
            separation = separation.min(linalg::max_diff(sd, sn));
        }
        worst = worst.max(dir.data.total_multiplicity() as f64).max(neu.data.total_multiplicity() as f64);
    }
    outcome(
        worst <= SIGN_TOL && separation > 1.0,
        format!("max |S - (∓I)| {} (tol {}), min |S_D - S_N| {}", e(worst), e(SIGN_TOL), e(separation)),
    )
}

fn robin_thetas() -> [f64; 3] {
    [PI / 6.0, PI / 4.0, PI / 3.0]
}

fn criterion_2() -> Outcome {
    let cfg = direct_cfg();
    let (mut ds, mut dk, mut dm) = (0.0f64, 0.0f64, 0.0f64);
    let mut counts = Vec::new();
    for theta in robin_thetas() {
        let out = solve_direct(&Potential::zero(1, 40.0), &BoundaryCondition::from_angles(&[theta]), &cfg).expect("robin");
        for (k, s) in out.data.k_grid().iter().zip(out.data.s_values()) {
            if k.abs() <= 60.0 {
                ds = ds.max((s[(0, 0)] - robin_s(theta, *k)).norm());
            }
        }
        let kappa = theta.cos() / theta.sin();
        let m = (2.0 * kappa).sqrt();
        counts.push(out.data.bound_states().len());
        match out.data.bound_states() {
            [b] => {
                dk = dk.max((b.kappa - kappa).abs());
                dm = dm.max((b.m[(0, 0)] - cx(m, 0.0)).norm());
            }
            _ => {
                dk = f64::INFINITY;
                dm = f64::INFINITY;
            }
        }
    }
    outcome(
        ds <= ROBIN_TOL && dk <= ROBIN_TOL && dm <= ROBIN_TOL,
        format!("S {} κ {} M {} (tol {}), bound states {:?}", e(ds), e(dk), e(dm), e(ROBIN_TOL), counts),
    )
}

fn criterion_3() -> Outcome {
    let cfg = direct_cfg();
    let inv = InverseConfig::default();
    let (mut f_sup, mut v_sup) = (0.0f64, 0.0f64);
    let mut equivalent = true;
    for theta in robin_thetas() {
        let bc = BoundaryCondition::from_angles(&[theta]);
        let out = solve_direct(&Potential::zero(1, 40.0), &bc, &cfg).expect("robin");
        match invert(&out.data, &inv) {
            Ok(rec) => {
                f_sup = rec.kernel.f_values.iter().map(linalg::max_abs).fold(f_sup, f64::max);
                let steps = (inv.x_max / inv.h).round() as usize;
                v_sup = (0..=steps)
                    .map(|i| linalg::max_abs(&rec.potential.eval(i as f64 * inv.h)))
                    .fold(v_sup, f64::max);
                equivalent &= boundary_equivalent(&rec.bc, &bc).unwrap_or(false);
            }
            Err(err) => return outcome(false, format!("θ = {theta:.4}: {err}")),
        }
    }
    outcome(
        f_sup <= CANCEL_F_TOL && v_sup <= CANCEL_V_TOL && equivalent,
        format!(
            "‖F‖∞ {} (tol {}), ‖V‖∞ {} (tol {}), boundary equivalent {}",
            e(f_sup),
            e(CANCEL_F_TOL),
            e(v_sup),
            e(CANCEL_V_TOL),
            equivalent
        ),
    )
}

/// Forward data of every fixture; nontrivial ones come out of their round trip.
struct Forward {
    fixture: Fixture,
    out: DirectOutput,
}

fn criterion_4(forward: &mut Vec<Forward>) -> Outcome {
    let cfg = direct_cfg();
    let mut passed = true;
    let mut lines = Vec::new();
    let corpus = fixtures::nontrivial();
    let scalar = corpus.iter().filter(|f| f.potential.n() == 1).count();
    let bound = corpus.iter().filter(|f| f.bound_states > 0).count();
    for f in corpus {
        let t = Instant::now();
        match round_trip(&f.potential, &f.bc, &cfg, &f.inverse, &f.tolerances) {
            Ok(rt) => {
                let r = &rt.report;
                passed &= r.passed;
                lines.push(format!(
                    "    {:<22} {} V {} bc {} (tol {}) S {} [{:.1}s]",
                    f.name,
                    if r.passed { "pass" } else { "fail" },
                    e(r.potential_error),
                    e(r.bc_distance),
                    e(f.tolerances.boundary),
                    e(r.s_error),
                    t.elapsed().as_secs_f64()
                ));
                forward.push(Forward { fixture: f, out: rt.forward });
            }
            Err(err) => {
                passed = false;
                lines.push(format!("    {:<22} fail {err}", f.name));
                let out = solve_direct(&f.potential, &f.bc, &cfg).expect("forward");
                forward.push(Forward { fixture: f, out });
            }
        }
    }
    let n = lines.len();
    let coverage = n >= 5 && scalar > 0 && scalar < n && bound > 0 && bound < n;
    outcome(
        passed && coverage,
        format!("{n} fixtures ({scalar} scalar, {bound} with bound states)\n{}", lines.join("\n")),
    )
}

fn criterion_5(forward: &[Forward]) -> Outcome {
    let worst = forward
        .iter()
        .map(|f| (f.fixture.name, check_unitarity_symmetry(&f.out.data)))
        .fold(("", 0.0f64), |a, b| if b.1 > a.1 { b } else { a });
    outcome(worst.1 <= UNITARITY_TOL, format!("worst {} on {} (tol {})", e(worst.1), worst.0, e(UNITARITY_TOL)))
}

fn criterion_6(forward: &[Forward]) -> Outcome {
    let (mut jost, mut orth) = (("", 0.0f64), ("", 0.0f64));
    for f in forward {
        let r = check_jost_consistency(&f.out.data, &f.out.jost.j_values, f64::INFINITY);
        let b = check_vb(&f.out.jost.bound_j, f.out.data.bound_states());
        if r > jost.1 {
            jost = (f.fixture.name, r);
        }
        if b > orth.1 {
            orth = (f.fixture.name, b);
        }
    }
    outcome(
        jost.1 <= JOST_TOL && orth.1 <= JOST_TOL,
        format!(
            "Jost relation {} on {}, orthogonality {} on {} (tol {})",
            e(jost.1),
            jost.0,
            e(orth.1),
            orth.0,
            e(JOST_TOL)
        ),
    )
}

fn criterion_7(forward: &[Forward]) -> Outcome {
    let mut passed = true;
    let mut lines = Vec::new();
    for f in forward {
        let fit = match tail_fit(&f.out.data, &f.fixture.inverse) {
            Ok(fit) => fit,
            Err(err) => {
                passed = false;
                lines.push(format!("    {:<22} fail {err}", f.fixture.name));
                continue;
            }
        };
        let lev = levinson_check(&f.out.data, &fit);
        let gap = (lev.lhs - lev.rhs).abs();
        let mut ok = gap <= LEVINSON_TOL;
        if f.fixture.name == "mixed-dirichlet-robin" {
            ok &= (lev.rhs - PI).abs() < 1e-12 && (lev.lhs - PI).abs() <= LEVINSON_TOL;
        }
        passed &= ok;
        lines.push(format!(
            "    {:<22} {} lhs/π {:.6} rhs/π {:.0} (N {} μ {} n_D {} n {})",
            f.fixture.name,
            if ok { "pass" } else { "fail" },
            lev.lhs / PI,
            lev.rhs / PI,
            lev.n_data,
            lev.mu,
            lev.n_dirichlet,
            lev.n
        ));
    }
    outcome(passed, format!("tol 0.05π\n{}", lines.join("\n")))
}

fn vc(data: &ScatteringData, cfg: &InverseConfig) -> marchenko::characterize::VcCount {
    let fit = tail_fit(data, cfg).expect("tail fit");
    let (fs, _) = marchenko_data(data, &fit, cfg.h, cfg.y_max());
    let offset = fs.len() / 2;
    let nodes = (cfg.y_max() / cfg.h).round() as usize;
    count_vc_solutions(&fs[offset..], nodes, cfg.h, cfg.quad, data.total_multiplicity())
}

fn spurious(data: &ScatteringData) -> ScatteringData {
    let n = data.n();
    let taken: Vec<f64> = data.bound_states().iter().map(|b| b.kappa).collect();
    let kappa = [1.7, 2.3, 0.6].into_iter().find(|k| taken.iter().all(|t| (t - k).abs() > 0.1)).expect("free κ");
    let mut m = linalg::zeros(n, n);
    m[(0, 0)] = cx((2.0 * kappa).sqrt(), 0.0);
    let mut states: Vec<BoundState> = data.bound_states().to_vec();
    states.push(BoundState::new(kappa, m).expect("valid bound state"));
    data.with_bound_states(states).expect("valid data")
}

fn criterion_8(forward: &[Forward]) -> Outcome {
    let mut passed = true;
    let mut lines = Vec::new();
    for f in forward {
        let cfg = &f.fixture.inverse;
        let real = vc(&f.out.data, cfg);
        let fake = vc(&spurious(&f.out.data), cfg);
        let ok = real.count == real.expected && real.verdict == Verdict::Pass && fake.verdict == Verdict::Fail;
        passed &= ok;
        lines.push(format!(
            "    {:<22} {} count {} expected {} gap {} / {}, spurious -> {} (count {} expected {})",
            f.fixture.name,
            if ok { "pass" } else { "fail" },
            real.count,
            real.expected,
            e(real.last_small),
            e(real.first_large),
            fake.verdict,
            fake.count,
            fake.expected
        ));
    }
    outcome(passed, format!("{} fixtures\n{}", lines.len(), lines.join("\n")))
}

/// Relative agreement of the step oracle with the integrator for `k ∈ [0.05, 50]`.
fn oracle_agreement() -> (f64, usize) {
    let cfg = direct_cfg();
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for f in fixtures::nontrivial() {
        let PotentialShape::Step(spec) = f.potential.shape() else { continue };
        for i in 0..=30 {
            let k = 0.05 * 10f64.powf(i as f64 / 10.0);
            for kk in [cx(k, 0.0), cx(0.0, k.min(10.0))] {
                let (fo, fpo) = step_jost_oracle(spec, f.potential.n(), kk);
                let (fi, fpi) = jost_solution(&f.potential, kk, &cfg).expect("integrator");
                let rel = |a: &CMat, b: &CMat| linalg::max_diff(a, b) / linalg::max_abs(a).max(1e-300);
                worst = worst.max(rel(&fo, &fi)).max(rel(&fpo, &fpi));
                points += 1;
            }
        }
    }
    (worst, points)
}

fn residuals(r: &CharacterizationReport) -> Vec<(&'static str, f64)> {
    let mut v = vec![
        ("unitarity", r.unitarity.residual),
        ("tail", r.tail.residual),
        ("jost", r.jost_consistency.residual),
        ("uniqueness", r.uniqueness.residual),
        ("vb", r.vb.residual),
    ];
    if let Some(l) = &r.levinson {
        v.push(("levinson", (l.lhs - l.rhs).abs()));
    }
    v
}

fn vc_summary(r: &CharacterizationReport) -> (usize, f64) {
    r.vc.as_ref().map_or((usize::MAX, f64::NAN), |c| (c.count, c.last_small))
}

fn report_for(f: &Fixture, direct: &DirectConfig, inverse: &InverseConfig) -> CharacterizationReport {
    let out = solve_direct(&f.potential, &f.bc, direct).expect("forward");
    marchenko_class_report(&out.data, Some(&out.jost), inverse)
}

fn criterion_9() -> Outcome {
    let (agree, points) = oracle_agreement();
    let mut passed = agree <= ORACLE_TOL;
    let mut lines = vec![format!("    oracle vs integrator {} over {points} k values (tol {})", e(agree), e(ORACLE_TOL))];
    for name in ["exp-robin", "mixed-dirichlet-robin"] {
        let f = fixtures::by_name(name).expect("fixture");
        let base_direct = direct_cfg();
        let base = report_for(&f, &base_direct, &f.inverse);
        let fine_k = report_for(&f, &DirectConfig { k_count: 2 * base_direct.k_count, ..base_direct.clone() }, &f.inverse);
        let fine_h = report_for(&f, &base_direct, &InverseConfig { h: f.inverse.h / 2.0, ..f.inverse.clone() });
        for (grid, other) in [("k", &fine_k), ("h", &fine_h)] {
            let mut worst = ("", 1.0f64);
            for ((label, a), (_, b)) in residuals(&base).into_iter().zip(residuals(other)) {
                let (a, b) = (a.max(NOISE_FLOOR), b.max(NOISE_FLOOR));
                let ratio = if a.is_finite() && b.is_finite() { a.max(b) / a.min(b) } else { f64::INFINITY };
                if ratio > worst.1 {
                    worst = (label, ratio);
                }
            }
            let (count, small) = vc_summary(&base);
            let (count2, small2) = vc_summary(other);
            let ok = worst.1 < DOUBLING_RATIO && count == count2;
            passed &= ok;
            lines.push(format!(
                "    {name:<22} {grid}-grid doubled: {} largest change ×{:.3} ({}), vc count {count} -> {count2} (near-null {} -> {})",
                if ok { "pass" } else { "fail" },
                worst.1,
                worst.0,
                e(small),
                e(small2)
            ));
        }
    }
    outcome(passed, format!("residual floor {}\n{}", e(NOISE_FLOOR), lines.join("\n")))
}

#[test]
fn acceptance() {
    let mut results: Vec<(usize, Outcome)> = Vec::new();
    let mut run = |n: usize, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        println!(
            "criterion {n}: {} [{:.1}s] {}",
            if o.passed { "pass" } else { "fail" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
        results.push((n, o));
    };

    run(1, &mut criterion_1);
    run(2, &mut criterion_2);
    run(3, &mut criterion_3);

    let mut forward = Vec::new();
    run(4, &mut || criterion_4(&mut forward));
    let cfg = direct_cfg();
    for f in fixtures::trivial() {
        let out = solve_direct(&f.potential, &f.bc, &cfg).expect("forward");
        forward.push(Forward { fixture: f, out });
    }
    run(5, &mut || criterion_5(&forward));
    run(6, &mut || criterion_6(&forward));
    run(7, &mut || criterion_7(&forward));
    run(8, &mut || criterion_8(&forward));
    run(9, &mut criterion_9);

    let failed: Vec<usize> = results.iter().filter(|(_, o)| !o.passed).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
