//! Closed-form reference solutions: zero potential with diagonal boundary
//! conditions, scalar Robin Marchenko data, layered step potentials and a
//! separable Marchenko kernel. None of these share code with the solvers.

use crate::linalg::{self, c64, cx, CMat};
use crate::types::{BoundaryCondition, StepPotentialSpec};

/// Everything known in closed form for `V ≡ 0` with `A = diag(-sin θ_j)`,
/// `B = diag(cos θ_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroOracle {
    pub f0: CMat,
    pub fp0: CMat,
    pub j: CMat,
    pub s: CMat,
    /// `(κ, M)` per channel with `cot θ_j > 0`, in channel order.
    pub bound_states: Vec<(f64, CMat)>,
}

pub fn zero_potential_oracle(thetas: &[f64], k: c64) -> ZeroOracle {
    let n = thetas.len();
    let ik = linalg::I * k;
    let j: Vec<c64> = thetas.iter().map(|t| t.cos() + ik * t.sin()).collect();
    let s: Vec<c64> = thetas
        .iter()
        .map(|t| -(t.cos() - ik * t.sin()) / (t.cos() + ik * t.sin()))
        .collect();
    let bound_states = thetas
        .iter()
        .enumerate()
        .filter_map(|(ch, t)| {
            let cot = t.cos() / t.sin();
            (t.sin().abs() > 1e-15 && cot > 1e-12).then(|| {
                let mut m = linalg::zeros(n, n);
                m[(ch, ch)] = cx((2.0 * cot).sqrt(), 0.0);
                (cot, m)
            })
        })
        .collect();
    ZeroOracle {
        f0: linalg::eye(n),
        fp0: linalg::scale(&linalg::eye(n), ik),
        j: linalg::diag(&j),
        s: linalg::diag(&s),
        bound_states,
    }
}

/// Boundary matrices of the diagonal angle form.
pub fn angle_boundary(thetas: &[f64]) -> BoundaryCondition {
    BoundaryCondition::from_angles(thetas)
}

/// `exp(m)` by scaling and squaring with a diagonal Padé(6,6) approximant.
pub fn expm(m: &CMat) -> CMat {
    const P: usize = 6;
    let n = m.nrows();
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut s = 0u32;
    while norm1 / f64::powi(2.0, s as i32) > 0.5 {
        s += 1;
    }
    let x = linalg::scale_re(m, 1.0 / f64::powi(2.0, s as i32));
    let mut c = [0.0f64; P + 1];
    c[0] = 1.0;
    for j in 1..=P {
        c[j] = c[j - 1] * (P + 1 - j) as f64 / (j * (2 * P + 1 - j)) as f64;
    }
    let mut num = linalg::eye(n);
    let mut den = linalg::eye(n);
    let mut power = linalg::eye(n);
    for (j, cj) in c.iter().enumerate().skip(1) {
        power = &power * &x;
        let term = linalg::scale_re(&power, *cj);
        num = &num + &term;
        den = if j % 2 == 0 { &den + &term } else { &den - &term };
    }
    let mut r = linalg::solve(&den, &num);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// `(f(k,0), f'(k,0))` for a layered potential by exact per-layer propagators.
pub fn step_jost_oracle(spec: &StepPotentialSpec, n: usize, k: c64) -> (CMat, CMat) {
    let ik = linalg::I * k;
    let end = spec.end();
    // balanced variables w = [f; f'/σ] keep the companion matrix well scaled
    let sigma = k.norm().max(1.0);
    let e = (ik * end).exp();
    let mut f = linalg::scale(&linalg::eye(n), e);
    let mut g = linalg::scale(&linalg::eye(n), e * ik / sigma);
    let mut right = end;
    for l in (0..spec.layers.len()).rev() {
        let left = if l == 0 { 0.0 } else { spec.boundaries[l - 1] };
        let width = right - left;
        let v = &spec.layers[l];
        let comp = CMat::from_fn(2 * n, 2 * n, |i, j| {
            match (i < n, j < n) {
                (true, false) if i == j - n => cx(sigma, 0.0),
                (false, true) => {
                    let shift = if i - n == j { k * k } else { cx(0.0, 0.0) };
                    (v[(i - n, j)] - shift) / sigma
                }
                _ => cx(0.0, 0.0),
            }
        });
        let prop = expm(&linalg::scale_re(&comp, -width));
        let w = linalg::vstack(&f, &g);
        let w = &prop * &w;
        f = CMat::from_fn(n, n, |i, j| w[(i, j)]);
        g = CMat::from_fn(n, n, |i, j| w[(i + n, j)]);
        right = left;
    }
    (f, linalg::scale_re(&g, sigma))
}

/// Scalar Robin data `θ ∈ (0, π/2)` with `V ≡ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobinOracle {
    pub theta: f64,
    pub kappa: f64,
    pub m: f64,
}

pub fn robin_marchenko_oracle(theta: f64) -> RobinOracle {
    let kappa = theta.cos() / theta.sin();
    RobinOracle { theta, kappa, m: (2.0 * kappa).sqrt() }
}

impl RobinOracle {
    /// `F_s(y) = -2 cot θ · e^{-y cot θ}` for `y > 0`, zero for `y < 0`.
    pub fn fs(&self, y: f64) -> f64 {
        if y < 0.0 {
            0.0
        } else {
            -2.0 * self.kappa * (-self.kappa * y).exp()
        }
    }

    /// `F(y) = F_s(y) + M² e^{-κ y}`, identically zero.
    pub fn f(&self, y: f64) -> f64 {
        self.fs(y) + self.m * self.m * (-self.kappa * y).exp()
    }

    pub fn s(&self, k: f64) -> c64 {
        zero_potential_oracle(&[self.theta], cx(k, 0.0)).s[(0, 0)]
    }

    pub fn boundary(&self) -> BoundaryCondition {
        BoundaryCondition::from_angles(&[self.theta])
    }
}

/// Solution of the Marchenko equation for `F(y) = c e^{-κ y}`.
pub fn separable_kernel(c: f64, kappa: f64, x: f64, y: f64) -> f64 {
    -c * (-kappa * (x + y)).exp() / (1.0 + c / (2.0 * kappa) * (-2.0 * kappa * x).exp())
}

/// `V(x) = -2 d/dx K(x,x)` for the separable kernel, differentiated by hand.
pub fn separable_potential(c: f64, kappa: f64, x: f64) -> f64 {
    let e = (-2.0 * kappa * x).exp();
    let d = 1.0 + c / (2.0 * kappa) * e;
    // K(x,x) = -c e / d,  d/dx = -c (e' d - e d') / d² with e' = -2κ e, d' = -c e
    let de = -2.0 * kappa * e;
    let dd = -c * e;
    let dk = -c * (de * d - e * dd) / (d * d);
    -2.0 * dk
}
