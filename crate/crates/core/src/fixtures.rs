//! Named input data sets used by the acceptance suite and `marchenko fixtures`.

use std::f64::consts::PI;

use crate::inverse::InverseConfig;
use crate::linalg::{self, cx, CMat};
use crate::roundtrip::RoundTripTolerances;
use crate::types::{BoundaryCondition, Potential, StepPotentialSpec};

pub const STEP_SPECTRAL_TOL: f64 = 1e-3;
pub const STEP_TRUNCATION_TOL: f64 = 1e-4;
pub const STEP_BC_TOL: f64 = 1e-2;

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub potential: Potential,
    pub bc: BoundaryCondition,
    /// Bound states expected, counted with multiplicity.
    pub bound_states: usize,
    /// Inverse settings suited to the data.
    pub inverse: InverseConfig,
    pub tolerances: RoundTripTolerances,
}

fn fixture(name: &'static str, potential: Potential, bc: BoundaryCondition, bound_states: usize) -> Fixture {
    Fixture { name, potential, bc, bound_states, inverse: InverseConfig::default(), tolerances: RoundTripTolerances::default() }
}

/// Band-limited data of a discontinuous potential keep an `O(k_max^{-2})`
/// oscillation in the tail, which floors the `S_∞` fit, `F(y_max)` and
/// the recovered `G₁`, hence `B`.
fn discontinuous(mut f: Fixture) -> Fixture {
    f.inverse.spectral_tol = STEP_SPECTRAL_TOL;
    f.inverse.truncation_tol = STEP_TRUNCATION_TOL;
    f.tolerances.boundary = STEP_BC_TOL;
    f
}

fn step(boundaries: Vec<f64>, layers: Vec<CMat>) -> Potential {
    Potential::step(StepPotentialSpec::new(boundaries, layers).expect("valid layers"), 40.0).expect("valid step")
}

fn coupled(d0: f64, d1: f64, off: (f64, f64)) -> CMat {
    CMat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => cx(d0, 0.0),
        (1, 1) => cx(d1, 0.0),
        (0, 1) => cx(off.0, off.1),
        _ => cx(off.0, -off.1),
    })
}

/// Zero-potential data sets with closed-form scattering data.
pub fn trivial() -> Vec<Fixture> {
    vec![
        fixture("zero-dirichlet", Potential::zero(1, 40.0), BoundaryCondition::dirichlet(1), 0),
        fixture("zero-neumann", Potential::zero(1, 40.0), BoundaryCondition::neumann(1), 0),
        fixture("robin-pi4", Potential::zero(1, 40.0), BoundaryCondition::from_angles(&[PI / 4.0]), 1),
        fixture("mixed-dirichlet-robin", Potential::zero(2, 40.0), BoundaryCondition::from_angles(&[0.0, PI / 4.0]), 1),
    ]
}

/// Step and exponential potentials, scalar and 2×2, with and without bound states.
pub fn nontrivial() -> Vec<Fixture> {
    vec![
        discontinuous(fixture(
            "step-well-dirichlet",
            step(vec![1.0], vec![linalg::diag_re(&[-4.0])]),
            BoundaryCondition::dirichlet(1),
            1,
        )),
        discontinuous(fixture(
            "step-barrier-neumann",
            step(vec![0.5, 1.5], vec![linalg::diag_re(&[2.0]), linalg::diag_re(&[0.5])]),
            BoundaryCondition::neumann(1),
            0,
        )),
        fixture(
            "exp-robin",
            Potential::exponential(linalg::diag_re(&[-4.0]), 4.5, 4.0).expect("valid"),
            BoundaryCondition::from_angles(&[1.2]),
            1,
        ),
        discontinuous(fixture(
            "step-2x2",
            step(vec![1.0, 2.0], vec![coupled(-1.5, -0.5, (0.3, 0.0)), coupled(0.5, -1.0, (0.0, 0.2))]),
            BoundaryCondition::from_angles(&[0.3, 1.0]),
            2,
        )),
        fixture(
            "exp-2x2",
            Potential::exponential(coupled(-6.0, 2.0, (1.0, 0.5)), 4.0, 4.0).expect("valid"),
            BoundaryCondition::from_angles(&[0.5, 2.0]),
            1,
        ),
        fixture(
            "exp-2x2-repulsive",
            Potential::exponential(coupled(2.0, 1.0, (0.5, -0.5)), 4.0, 4.0).expect("valid"),
            BoundaryCondition::from_angles(&[0.0, 2.5]),
            0,
        ),
    ]
}

pub fn all() -> Vec<Fixture> {
    let mut v = trivial();
    v.extend(nontrivial());
    v
}

pub fn by_name(name: &str) -> Option<Fixture> {
    all().into_iter().find(|f| f.name == name)
}
