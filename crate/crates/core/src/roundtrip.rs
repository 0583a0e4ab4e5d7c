//! `D → S → D′ → S′` discrepancies.

use serde::{Deserialize, Serialize};

use crate::direct::{solve_direct, DirectConfig, DirectOutput};
use crate::error::Result;
use crate::inverse::{invert, InverseConfig, RecoveredInput};
use crate::linalg;
use crate::types::{boundary_equivalent_within, BoundaryCondition, Potential};

/// Projector distance accepted as the same boundary condition after a
/// round trip; the recovered `(A, B)` inherits the kernel's quadrature error.
pub const ROUNDTRIP_BC_TOL: f64 = 1e-5;
pub const ROUNDTRIP_V_TOL: f64 = 5e-2;
pub const ROUNDTRIP_S_TOL: f64 = 1e-3;
/// `S` is compared on `|k| ≤ S_COMPARE_K`.
pub const S_COMPARE_K: f64 = 30.0;
/// Potentials are compared on `[0, V_COMPARE_SHARE · x_max]` of the inverse window.
pub const V_COMPARE_SHARE: f64 = 0.8;

/// Pass thresholds of a round trip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RoundTripTolerances {
    pub potential: f64,
    pub boundary: f64,
    pub scattering: f64,
}

impl Default for RoundTripTolerances {
    fn default() -> Self {
        Self { potential: ROUNDTRIP_V_TOL, boundary: ROUNDTRIP_BC_TOL, scattering: ROUNDTRIP_S_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTripReport {
    /// `∫|V′ - V| / ∫|V|` (absolute when `V ≡ 0`).
    pub potential_error: f64,
    pub potential_relative: bool,
    pub bc_distance: f64,
    pub bc_equivalent: bool,
    pub s_error: f64,
    pub n_bound: usize,
    pub n_bound_recovered: usize,
    pub passed: bool,
}

pub struct RoundTrip {
    pub forward: DirectOutput,
    pub recovered: RecoveredInput,
    pub backward: DirectOutput,
    pub report: RoundTripReport,
}

/// Trapezoid `(∫‖a - b‖, ∫‖b‖)` over `[0, x_end]` with step `h`.
pub fn potential_l1(a: &Potential, b: &Potential, x_end: f64, h: f64) -> (f64, f64) {
    let count = (x_end / h).round().max(1.0) as usize;
    let dx = x_end / count as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..=count {
        let x = i as f64 * dx;
        let w = if i == 0 || i == count { 0.5 * dx } else { dx };
        let vb = b.eval(x);
        num += w * linalg::op_norm(&(&a.eval(x) - &vb));
        den += w * linalg::op_norm(&vb);
    }
    (num, den)
}

pub fn round_trip(
    potential: &Potential,
    bc: &BoundaryCondition,
    direct: &DirectConfig,
    inverse: &InverseConfig,
    tol: &RoundTripTolerances,
) -> Result<RoundTrip> {
    let forward = solve_direct(potential, bc, direct)?;
    let recovered = invert(&forward.data, inverse)?;
    let back_cfg = DirectConfig { x_max: inverse.x_max, ..direct.clone() };
    let backward = solve_direct(&recovered.potential, &recovered.bc, &back_cfg)?;

    let (num, den) = potential_l1(&recovered.potential, potential, V_COMPARE_SHARE * inverse.x_max, inverse.h);
    let potential_relative = den > 1e-12;
    let potential_error = if potential_relative { num / den } else { num };
    let bc_distance = recovered.bc.equivalence_distance(bc)?;
    let bc_equivalent = boundary_equivalent_within(&recovered.bc, bc, tol.boundary)?;
    let s_error = forward
        .data
        .k_grid()
        .iter()
        .zip(forward.data.s_values().iter().zip(backward.data.s_values()))
        .filter(|(k, _)| k.abs() <= S_COMPARE_K)
        .map(|(_, (a, b))| linalg::max_diff(a, b))
        .fold(0.0, f64::max);
    let passed = potential_error <= tol.potential && bc_equivalent && s_error <= tol.scattering;
    let report = RoundTripReport {
        potential_error,
        potential_relative,
        bc_distance,
        bc_equivalent,
        s_error,
        n_bound: forward.data.total_multiplicity(),
        n_bound_recovered: backward.data.total_multiplicity(),
        passed,
    };
    Ok(RoundTrip { forward, recovered, backward, report })
}
