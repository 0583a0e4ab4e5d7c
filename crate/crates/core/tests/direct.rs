use std::f64::consts::PI;

use marchenko::direct::{
    bound_state_solutions, jost_matrix_at, jost_profile, jost_solution, locate_bound_states,
    physical_solution, regular_solution, scattering_matrix, solve_direct, DirectConfig,
};
use marchenko::linalg::{self, c64, cx, CMat};
use marchenko::oracles::{step_jost_oracle, zero_potential_oracle};
use marchenko::{validate_boundary, BoundaryCondition, Potential, StepPotentialSpec};

fn small_cfg() -> DirectConfig {
    DirectConfig { k_max: 30.0, k_count: 256, ..DirectConfig::default() }
}

fn re(x: f64) -> CMat {
    CMat::from_fn(1, 1, |_, _| cx(x, 0.0))
}

fn well_2x2() -> (StepPotentialSpec, Potential) {
    let spec = StepPotentialSpec::new(
        vec![1.0, 2.0],
        vec![linalg::diag_re(&[-3.0, -0.5]), linalg::diag_re(&[1.0, -2.0])],
    )
    .unwrap();
    let pot = Potential::step(spec.clone(), 10.0).unwrap();
    (spec, pot)
}

fn coupled_exponential() -> Potential {
    let amp = CMat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => cx(-4.0, 0.0),
        (1, 1) => cx(1.0, 0.0),
        (0, 1) => cx(1.0, 0.5),
        _ => cx(1.0, -0.5),
    });
    Potential::exponential(amp, 2.0, 12.0).unwrap()
}

#[test]
fn free_jost_solution() {
    let cfg = DirectConfig::default();
    let pot = Potential::zero(2, 40.0);
    for k in [cx(0.7, 0.0), cx(-3.0, 0.0), cx(0.0, 1.0)] {
        let (f0, fp0) = jost_solution(&pot, k, &cfg).unwrap();
        assert!(linalg::max_diff(&f0, &linalg::eye(2)) < 1e-14);
        assert!(linalg::max_diff(&fp0, &linalg::scale(&linalg::eye(2), linalg::I * k)) < 1e-14);
    }
    let (f0, fp0) = jost_solution(&pot, cx(0.0, 1.0), &cfg).unwrap();
    assert!((f0[(0, 0)] - 1.0).norm() < 1e-14 && (fp0[(0, 0)] + 1.0).norm() < 1e-14);
}

#[test]
fn jost_matrix_zero_potential() {
    let cfg = DirectConfig::default();
    let pot = Potential::zero(1, 40.0);
    let t = PI / 4.0;
    let bc = BoundaryCondition::from_angles(&[t]);
    let j = jost_matrix_at(&pot, &bc, cx(1.0, 0.0), &cfg).unwrap();
    assert!((j[(0, 0)] - cx(1.0, 1.0) / 2f64.sqrt()).norm() < 1e-14);
    let dir = jost_matrix_at(&pot, &BoundaryCondition::dirichlet(1), cx(2.5, 0.0), &cfg).unwrap();
    assert!((dir[(0, 0)] - 1.0).norm() < 1e-14);
}

#[test]
fn free_scattering_matrices() {
    let cfg = small_cfg();
    let grid = cfg.k_grid();
    let pot = Potential::zero(1, 40.0);
    let (s, _) = scattering_matrix(&pot, &BoundaryCondition::dirichlet(1), &grid, &cfg).unwrap();
    assert!(s.iter().all(|m| (m[(0, 0)] + 1.0).norm() < 1e-14));
    let (s, _) = scattering_matrix(&pot, &BoundaryCondition::neumann(1), &grid, &cfg).unwrap();
    assert!(s.iter().all(|m| (m[(0, 0)] - 1.0).norm() < 1e-14));
    let (s, _) = scattering_matrix(&pot, &BoundaryCondition::from_angles(&[PI / 4.0]), &[-1.0, 1.0], &cfg).unwrap();
    assert!((s[1][(0, 0)] - linalg::I).norm() < 1e-14);
}

#[test]
fn robin_bound_state() {
    let cfg = small_cfg();
    let out = solve_direct(&Potential::zero(1, 40.0), &BoundaryCondition::from_angles(&[PI / 4.0]), &cfg).unwrap();
    let bs = out.data.bound_states();
    assert_eq!(bs.len(), 1);
    assert!((bs[0].kappa - 1.0).abs() < 1e-10);
    assert!((bs[0].m[(0, 0)].re - 2f64.sqrt()).abs() < 1e-9);
    let psi = bound_state_solutions(
        &jost_profile(&Potential::zero(1, 40.0), cx(0.0, bs[0].kappa), &[0.0, 1.0], &cfg).unwrap(),
        &bs[0].m,
    );
    assert!((psi[1].f[(0, 0)].re - 2f64.sqrt() * (-1f64).exp()).abs() < 1e-9);
}

#[test]
fn no_bound_states_for_dirichlet_or_obtuse_angle() {
    let cfg = small_cfg();
    let pot = Potential::zero(1, 40.0);
    assert!(locate_bound_states(&pot, &BoundaryCondition::dirichlet(1), &cfg).unwrap().is_empty());
    let bc = BoundaryCondition::from_angles(&[3.0 * PI / 4.0]);
    assert!(locate_bound_states(&pot, &bc, &cfg).unwrap().is_empty());
}

#[test]
fn decoupled_channels() {
    let cfg = small_cfg();
    let out = solve_direct(&Potential::zero(2, 40.0), &BoundaryCondition::from_angles(&[PI, PI / 2.0]), &cfg).unwrap();
    for s in out.data.s_values() {
        assert!(linalg::max_diff(s, &linalg::diag_re(&[-1.0, 1.0])) < 1e-14);
    }
    assert!(out.data.bound_states().is_empty());
}

#[test]
fn step_potential_matches_transfer_oracle() {
    let cfg = DirectConfig::default();
    let (spec, pot) = well_2x2();
    for &k in &[0.05, 0.3, 1.0, 4.0, 17.0, 50.0] {
        for kk in [cx(k, 0.0), cx(-k, 0.0), cx(0.0, k)] {
            let (f0, fp0) = jost_solution(&pot, kk, &cfg).unwrap();
            let (g0, gp0) = step_jost_oracle(&spec, 2, kk);
            let scale = linalg::max_abs(&g0).max(1.0);
            assert!(linalg::max_diff(&f0, &g0) < 1e-8 * scale, "k = {kk} {}", linalg::max_diff(&f0, &g0) / scale);
            let scale = linalg::max_abs(&gp0).max(1.0);
            assert!(linalg::max_diff(&fp0, &gp0) < 1e-8 * scale, "k = {kk} {}", linalg::max_diff(&fp0, &gp0) / scale);
        }
    }
}

#[test]
fn scalar_layer_oracle_agrees() {
    let spec = StepPotentialSpec::new(vec![1.0], vec![re(-1.0)]).unwrap();
    let pot = Potential::step(spec.clone(), 5.0).unwrap();
    let (f0, fp0) = jost_solution(&pot, cx(2.0, 0.0), &DirectConfig::default()).unwrap();
    let (g0, gp0) = step_jost_oracle(&spec, 1, cx(2.0, 0.0));
    assert!((f0[(0, 0)] - g0[(0, 0)]).norm() < 1e-9);
    assert!((fp0[(0, 0)] - gp0[(0, 0)]).norm() < 1e-9);
}

fn unitarity(s: &[CMat]) -> f64 {
    let len = s.len();
    let n = s[0].nrows();
    (0..len)
        .map(|i| {
            let sym = linalg::max_diff(&s[len - 1 - i], &s[i].adjoint().to_owned());
            let uni = linalg::max_diff(&(&s[i] * s[i].adjoint()), &linalg::eye(n));
            sym.max(uni)
        })
        .fold(0.0, f64::max)
}

#[test]
fn unitarity_and_jost_relation() {
    let cfg = small_cfg();
    let pot = coupled_exponential();
    let bc = validate_boundary(
        CMat::from_fn(2, 2, |i, j| if i == j { cx(-0.6, 0.0) } else { cx(0.0, 0.0) }),
        linalg::eye(2),
    )
    .unwrap();
    let out = solve_direct(&pot, &bc, &cfg).unwrap();
    assert!(unitarity(out.data.s_values()) < 1e-8);
    let len = out.data.len();
    for i in 0..len {
        let j = &out.jost.j_values;
        let r = &j[len - 1 - i] + &(&out.data.s_values()[i] * &j[i]);
        assert!(linalg::max_abs(&r) < 1e-8);
    }
    assert!(out.jost.consistency_residual(&bc) < 1e-10);
    for (bs, (kappa, j)) in out.data.bound_states().iter().zip(&out.jost.bound_j) {
        assert_eq!(bs.kappa, *kappa);
        let r = linalg::max_abs(&(j.adjoint() * &bs.m));
        assert!(r < 1e-8, "orthogonality residual {r}");
    }
    assert!(!out.data.bound_states().is_empty());
}

#[test]
fn boundary_transformation_leaves_s_invariant() {
    let cfg = DirectConfig { k_max: 10.0, k_count: 32, ..DirectConfig::default() };
    let pot = coupled_exponential();
    let bc = BoundaryCondition::from_angles(&[0.4, 2.0]);
    let t = CMat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => cx(1.3, 0.2),
        (0, 1) => cx(-0.4, 0.7),
        (1, 0) => cx(0.5, 0.0),
        _ => cx(0.9, -1.1),
    });
    let bct = bc.transformed(&t).unwrap();
    let grid = cfg.k_grid();
    let (s1, b1) = scattering_matrix(&pot, &bc, &grid, &cfg).unwrap();
    let (s2, b2) = scattering_matrix(&pot, &bct, &grid, &cfg).unwrap();
    for i in 0..grid.len() {
        assert!(linalg::max_diff(&s1[i], &s2[i]) < 1e-9);
        assert!(linalg::max_diff(&(&b1.j_values[i] * &t), &b2.j_values[i]) < 1e-9);
    }
}

#[test]
fn regular_solution_identities() {
    let cfg = DirectConfig::default();
    let pot = Potential::zero(1, 40.0);
    let xs = [0.3, 1.7];
    let k = 2.2;
    let phi = regular_solution(&pot, &BoundaryCondition::dirichlet(1), cx(k, 0.0), &xs, &cfg).unwrap();
    for (p, x) in phi.iter().zip(xs) {
        assert!((p.f[(0, 0)].re - (k * x).sin() / k).abs() < 1e-9);
    }
    let phi = regular_solution(&pot, &BoundaryCondition::neumann(1), cx(k, 0.0), &xs, &cfg).unwrap();
    for (p, x) in phi.iter().zip(xs) {
        assert!((p.f[(0, 0)].re - (k * x).cos()).abs() < 1e-9);
    }

    // φ(k,x) = (1/2ik)[f(k,x)J(-k) - f(-k,x)J(k)] on a coupled potential
    let pot = coupled_exponential();
    let bc = BoundaryCondition::from_angles(&[0.4, 2.0]);
    for k in [0.5, 3.0] {
        let kc = cx(k, 0.0);
        let phi = regular_solution(&pot, &bc, kc, &xs, &cfg).unwrap();
        let fp = jost_profile(&pot, kc, &xs, &cfg).unwrap();
        let fm = jost_profile(&pot, -kc, &xs, &cfg).unwrap();
        let jp = jost_matrix_at(&pot, &bc, kc, &cfg).unwrap();
        let jm = jost_matrix_at(&pot, &bc, -kc, &cfg).unwrap();
        for i in 0..xs.len() {
            let rhs = linalg::scale(&(&(&fp[i].f * &jm) - &(&fm[i].f * &jp)), (linalg::I * kc * 2.0).inv());
            assert!(linalg::max_diff(&phi[i].f, &rhs) < 1e-8);
        }
    }
}

#[test]
fn physical_solution_meets_boundary_condition() {
    let cfg = DirectConfig::default();
    let (_, pot) = well_2x2();
    let bc = BoundaryCondition::from_angles(&[0.7, 2.5]);
    for k in [0.4, 2.0, 9.0] {
        let kc = cx(k, 0.0);
        let (s, _) = scattering_matrix(&pot, &bc, &[-k, k], &cfg).unwrap();
        let (fp, fpp) = jost_solution(&pot, kc, &cfg).unwrap();
        let (fm, fmp) = jost_solution(&pot, -kc, &cfg).unwrap();
        let psi = physical_solution(&fm, &fp, &s[1]);
        let dpsi = physical_solution(&fmp, &fpp, &s[1]);
        let r = &(bc.a().adjoint() * &dpsi) - &(bc.b().adjoint() * &psi);
        assert!(linalg::max_abs(&r) < 1e-8);
    }
    let free = Potential::zero(1, 40.0);
    let (s, _) = scattering_matrix(&free, &BoundaryCondition::dirichlet(1), &[-1.3, 1.3], &cfg).unwrap();
    let (f0, _) = jost_solution(&free, cx(1.3, 0.0), &cfg).unwrap();
    let psi = physical_solution(&f0.adjoint().to_owned(), &f0, &s[1]);
    assert!(psi[(0, 0)].norm() < 1e-14);
}

#[test]
fn diagonal_well_multiplicities() {
    let cfg = small_cfg();
    let (_, pot) = well_2x2();
    let out = solve_direct(&pot, &BoundaryCondition::dirichlet(2), &cfg).unwrap();
    assert!(!out.data.bound_states().is_empty());
    for bs in out.data.bound_states() {
        assert_eq!(linalg::rank_with(&bs.m, 1e-9, linalg::op_norm(&bs.m)), bs.multiplicity);
        // channels decouple, so each bound state lives in exactly one channel
        assert_eq!(bs.multiplicity, 1);
        let off = bs.m[(0, 1)].norm();
        assert!(off < 1e-8);
    }
}

#[test]
fn degenerate_robin_pair_has_multiplicity_two() {
    let cfg = small_cfg();
    let bc = BoundaryCondition::from_angles(&[PI / 4.0, PI / 4.0]);
    let out = solve_direct(&Potential::zero(2, 40.0), &bc, &cfg).unwrap();
    let bs = out.data.bound_states();
    assert_eq!(bs.len(), 1);
    assert_eq!(bs[0].multiplicity, 2);
    assert!(linalg::max_diff(&bs[0].m, &linalg::scale_re(&linalg::eye(2), 2f64.sqrt())) < 1e-8);
    let oracle = zero_potential_oracle(&[PI / 4.0, PI / 4.0], c64::new(0.0, 1.0));
    assert_eq!(oracle.bound_states.len(), 2);
}

#[test]
fn dirichlet_square_well_bound_state() {
    // V = -4 on (0, 1): f(iκ,0) = e^{-κ}(cos q + κ/q sin q) with q² + κ² = 4
    let pot = Potential::step(StepPotentialSpec::new(vec![1.0], vec![re(-4.0)]).unwrap(), 40.0).unwrap();
    let found = locate_bound_states(&pot, &BoundaryCondition::dirichlet(1), &DirectConfig::default()).unwrap();
    assert_eq!(found.len(), 1);
    let kappa = found[0].kappa;
    let q = (4.0 - kappa * kappa).sqrt();
    assert!((q / q.tan() + kappa).abs() < 1e-9);
    // ∫|f(iκ,x)|² by midpoint inside the well plus the exact outer tail
    let steps = 200_000;
    let mut norm = (-2.0 * kappa).exp() / (2.0 * kappa);
    for i in 0..steps {
        let x = (i as f64 + 0.5) / steps as f64;
        let v = (-kappa).exp() * ((q * (x - 1.0)).cos() - kappa / q * (q * (x - 1.0)).sin());
        norm += v * v / steps as f64;
    }
    let out = solve_direct(&pot, &BoundaryCondition::dirichlet(1), &small_cfg()).unwrap();
    let m = out.data.bound_states()[0].m[(0, 0)].re;
    assert!((m * m - 1.0 / norm).abs() < 1e-8, "{} vs {}", m * m, 1.0 / norm);
}
