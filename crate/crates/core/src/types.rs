//! Domain types shared by the direct and inverse solvers, with their
//! validation and the boundary-condition equivalence algebra.

use crate::error::{Result, ScatterError};
use crate::linalg::{self, c64, CMat};

/// Relative singular-value cutoff for every rank decision in the crate.
pub const RANK_TOL: f64 = 1e-9;
/// Tolerance for the selfadjointness relation and sample hermiticity.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Projector distance under which two boundary conditions are equivalent.
pub const EQUIVALENCE_TOL: f64 = 1e-9;

/// Selfadjoint boundary condition `-B†ψ(0) + A†ψ'(0) = 0`.
///
/// `(A, B)` and `(AT, BT)` describe the same condition for any invertible `T`;
/// the pair is stored as given and never canonicalized.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCondition {
    a: CMat,
    b: CMat,
}

/// Counts of Dirichlet, Neumann and mixed channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BoundaryClass {
    pub n_dirichlet: usize,
    pub n_neumann: usize,
    pub n_mixed: usize,
}

/// Checks `-B†A + A†B = 0` and `A†A + B†B > 0`.
pub fn validate_boundary(a: CMat, b: CMat) -> Result<BoundaryCondition> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(ScatterError::DimensionMismatch { expected: n, found: a.ncols() });
    }
    if b.nrows() != n || b.ncols() != n {
        return Err(ScatterError::DimensionMismatch { expected: n, found: b.nrows().max(b.ncols()) });
    }
    if n == 0 {
        return Err(ScatterError::InvalidInput("boundary matrices are empty".into()));
    }
    if !linalg::is_finite(&a) || !linalg::is_finite(&b) {
        return Err(ScatterError::NonFinite("boundary matrices"));
    }
    let residual = linalg::max_abs(&(&(a.adjoint() * &b) - &(b.adjoint() * &a)));
    let scale = 1.0f64.max(linalg::max_abs(&a) * linalg::max_abs(&b));
    if residual > HERMITIAN_TOL * scale {
        return Err(ScatterError::SelfadjointnessViolated { residual });
    }
    let gram = &(a.adjoint() * &a) + &(b.adjoint() * &b);
    let eig = linalg::hermitian_eigenvalues(&gram);
    let (lo, hi) = (eig[0], eig[n - 1]);
    let ratio = if hi > 0.0 { lo / hi } else { 0.0 };
    if ratio <= HERMITIAN_TOL {
        return Err(ScatterError::RankDeficient { ratio });
    }
    Ok(BoundaryCondition { a, b })
}

impl BoundaryCondition {
    pub fn a(&self) -> &CMat {
        &self.a
    }

    pub fn b(&self) -> &CMat {
        &self.b
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn dirichlet(n: usize) -> Self {
        Self { a: linalg::zeros(n, n), b: linalg::eye(n) }
    }

    pub fn neumann(n: usize) -> Self {
        Self { a: linalg::eye(n), b: linalg::zeros(n, n) }
    }

    /// Diagonal form `A = diag(-sin θ_j)`, `B = diag(cos θ_j)`.
    pub fn from_angles(thetas: &[f64]) -> Self {
        let a: Vec<f64> = thetas.iter().map(|t| -t.sin()).collect();
        let b: Vec<f64> = thetas.iter().map(|t| t.cos()).collect();
        Self { a: linalg::diag_re(&a), b: linalg::diag_re(&b) }
    }

    /// `(AT, BT)`; errors when the result is no longer admissible.
    pub fn transformed(&self, t: &CMat) -> Result<Self> {
        validate_boundary(&self.a * t, &self.b * t)
    }

    pub fn scaled(&self, c: c64) -> Result<Self> {
        validate_boundary(linalg::scale(&self.a, c), linalg::scale(&self.b, c))
    }

    /// Representative with `A†A + B†B = I`.
    pub fn normalized(&self) -> Self {
        let gram = &(self.a.adjoint() * &self.a) + &(self.b.adjoint() * &self.b);
        let t = linalg::inv_sqrt_hpd(&gram).expect("validated boundary has positive Gram matrix");
        Self { a: &self.a * &t, b: &self.b * &t }
    }

    fn stacked(&self) -> CMat {
        linalg::vstack(&self.a, &self.b)
    }

    /// Projector onto the column space of `[A; B]`.
    pub fn projector(&self) -> CMat {
        linalg::column_space_projector(&self.stacked(), RANK_TOL)
    }

    /// Max-entry distance between the column-space projectors of the two pairs.
    pub fn equivalence_distance(&self, other: &Self) -> Result<f64> {
        if self.n() != other.n() {
            return Err(ScatterError::DimensionMismatch { expected: self.n(), found: other.n() });
        }
        Ok(linalg::max_diff(&self.projector(), &other.projector()))
    }

    pub fn classify(&self) -> BoundaryClass {
        classify_boundary(self)
    }
}

/// True iff the column spaces of `[A₁; B₁]` and `[A₂; B₂]` coincide.
pub fn boundary_equivalent(bc1: &BoundaryCondition, bc2: &BoundaryCondition) -> Result<bool> {
    boundary_equivalent_within(bc1, bc2, EQUIVALENCE_TOL)
}

pub fn boundary_equivalent_within(
    bc1: &BoundaryCondition,
    bc2: &BoundaryCondition,
    tol: f64,
) -> Result<bool> {
    Ok(bc1.equivalence_distance(bc2)? <= tol)
}

/// `n_D = n - rank A`, `n_N = n - rank B`, `n_M` the rest.
pub fn classify_boundary(bc: &BoundaryCondition) -> BoundaryClass {
    let n = bc.n();
    let reference = linalg::op_norm(&bc.stacked());
    let rank_a = linalg::rank_with(&bc.a, RANK_TOL, reference);
    let rank_b = linalg::rank_with(&bc.b, RANK_TOL, reference);
    let n_dirichlet = n - rank_a;
    let n_neumann = n - rank_b;
    BoundaryClass { n_dirichlet, n_neumann, n_mixed: n - n_dirichlet - n_neumann }
}

/// Layered potential: constant hermitian `layers[l]` on `(x_l, x_{l+1})` with
/// `x_0 = 0` and `boundaries = [x_1, …, x_m]`; zero beyond `x_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepPotentialSpec {
    pub boundaries: Vec<f64>,
    pub layers: Vec<CMat>,
}

impl StepPotentialSpec {
    pub fn new(boundaries: Vec<f64>, layers: Vec<CMat>) -> Result<Self> {
        if boundaries.len() != layers.len() {
            return Err(ScatterError::InvalidInput(format!(
                "{} layer boundaries for {} layers",
                boundaries.len(),
                layers.len()
            )));
        }
        let mut prev = 0.0;
        for &x in &boundaries {
            if !(x > prev) || !x.is_finite() {
                return Err(ScatterError::InvalidInput("layer boundaries must ascend from 0".into()));
            }
            prev = x;
        }
        let n = layers.first().map_or(1, |m| m.nrows());
        for (l, v) in layers.iter().enumerate() {
            if v.nrows() != n || v.ncols() != n {
                return Err(ScatterError::DimensionMismatch { expected: n, found: v.nrows() });
            }
            let defect = linalg::hermiticity_defect(v);
            if defect > HERMITIAN_TOL * 1f64.max(linalg::max_abs(v)) {
                let x = if l == 0 { 0.0 } else { boundaries[l - 1] };
                return Err(ScatterError::NotHermitian { x, defect });
            }
        }
        Ok(Self { boundaries, layers })
    }

    pub fn n(&self) -> usize {
        self.layers.first().map_or(1, |m| m.nrows())
    }

    pub fn end(&self) -> f64 {
        self.boundaries.last().copied().unwrap_or(0.0)
    }

    fn layer_at(&self, x: f64) -> Option<&CMat> {
        let idx = self.boundaries.partition_point(|&b| b <= x);
        self.layers.get(idx)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialShape {
    Zero,
    Step(StepPotentialSpec),
    /// `amplitude · exp(-rate · x)`.
    Exponential { amplitude: CMat, rate: f64 },
    /// Cubic Hermite interpolation of samples; zero past the last sample.
    Sampled { x: Vec<f64>, values: Vec<CMat> },
}

/// Hermitian matrix potential on `[0, x_max]`, zero beyond the truncation radius.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    n: usize,
    x_max: f64,
    shape: PotentialShape,
    first_moment: f64,
}

impl Potential {
    pub fn zero(n: usize, x_max: f64) -> Self {
        Self { n, x_max, shape: PotentialShape::Zero, first_moment: 0.0 }
    }

    pub fn step(spec: StepPotentialSpec, x_max: f64) -> Result<Self> {
        check_x_max(x_max)?;
        let n = spec.n();
        let mut p = Self { n, x_max, shape: PotentialShape::Step(spec), first_moment: 0.0 };
        p.first_moment = p.compute_first_moment();
        Ok(p)
    }

    pub fn exponential(amplitude: CMat, rate: f64, x_max: f64) -> Result<Self> {
        check_x_max(x_max)?;
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(ScatterError::InvalidInput("exponential decay rate must be positive".into()));
        }
        let n = amplitude.nrows();
        if amplitude.ncols() != n {
            return Err(ScatterError::DimensionMismatch { expected: n, found: amplitude.ncols() });
        }
        let defect = linalg::hermiticity_defect(&amplitude);
        if defect > HERMITIAN_TOL * 1f64.max(linalg::max_abs(&amplitude)) {
            return Err(ScatterError::NotHermitian { x: 0.0, defect });
        }
        let amplitude = linalg::hermitian_part(&amplitude);
        let mut p = Self { n, x_max, shape: PotentialShape::Exponential { amplitude, rate }, first_moment: 0.0 };
        p.first_moment = p.compute_first_moment();
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn shape(&self) -> &PotentialShape {
        &self.shape
    }

    /// Discretized `∫₀^{x_max} (1 + x) |V(x)| dx` with the operator norm.
    pub fn first_moment(&self) -> f64 {
        self.first_moment
    }

    /// Right end of the region where `V` can be nonzero.
    pub fn support_end(&self) -> f64 {
        let end = match &self.shape {
            PotentialShape::Zero => 0.0,
            PotentialShape::Step(s) => s.end(),
            PotentialShape::Exponential { .. } => self.x_max,
            PotentialShape::Sampled { x, .. } => x.last().copied().unwrap_or(0.0),
        };
        end.min(self.x_max)
    }

    /// Points in `(0, support_end)` where `V` jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        let end = self.support_end();
        let raw: Vec<f64> = match &self.shape {
            PotentialShape::Step(s) => s.boundaries.clone(),
            // the cubic Hermite interpolant is C¹ across samples
            _ => Vec::new(),
        };
        raw.into_iter().filter(|&b| b > 0.0 && b < end).collect()
    }

    pub fn eval(&self, x: f64) -> CMat {
        let mut buf = vec![c64::new(0.0, 0.0); self.n * self.n];
        self.eval_into(x, &mut buf);
        CMat::from_fn(self.n, self.n, |i, j| buf[i * self.n + j])
    }

    /// Writes `V(x)` row-major into `out`.
    pub fn eval_into(&self, x: f64, out: &mut [c64]) {
        let n = self.n;
        out.iter_mut().for_each(|z| *z = c64::new(0.0, 0.0));
        if x > self.x_max || x < 0.0 {
            return;
        }
        match &self.shape {
            PotentialShape::Zero => {}
            PotentialShape::Step(s) => {
                if let Some(v) = s.layer_at(x) {
                    for i in 0..n {
                        for j in 0..n {
                            out[i * n + j] = v[(i, j)];
                        }
                    }
                }
            }
            PotentialShape::Exponential { amplitude, rate } => {
                let e = (-rate * x).exp();
                for i in 0..n {
                    for j in 0..n {
                        out[i * n + j] = amplitude[(i, j)] * e;
                    }
                }
            }
            PotentialShape::Sampled { x: xs, values } => {
                let last = xs.len() - 1;
                if x > xs[last] {
                    return;
                }
                if x <= xs[0] || last == 0 {
                    for i in 0..n {
                        for j in 0..n {
                            out[i * n + j] = values[0][(i, j)];
                        }
                    }
                    return;
                }
                // cubic Hermite with centered slopes (linear ones at the ends)
                let hi = xs.partition_point(|&s| s < x).min(last);
                let lo = hi - 1;
                let dx = xs[hi] - xs[lo];
                let t = (x - xs[lo]) / dx;
                let (t2, t3) = (t * t, t * t * t);
                let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
                let h10 = t3 - 2.0 * t2 + t;
                let h01 = -2.0 * t3 + 3.0 * t2;
                let h11 = t3 - t2;
                let slope = |k: usize, i: usize, j: usize| -> c64 {
                    let (a, b) = (k.saturating_sub(1), (k + 1).min(last));
                    (values[b][(i, j)] - values[a][(i, j)]) / (xs[b] - xs[a])
                };
                for i in 0..n {
                    for j in 0..n {
                        out[i * n + j] = values[lo][(i, j)] * h00
                            + values[hi][(i, j)] * h01
                            + (slope(lo, i, j) * h10 + slope(hi, i, j) * h11) * dx;
                    }
                }
            }
        }
    }

    fn compute_first_moment(&self) -> f64 {
        match &self.shape {
            PotentialShape::Zero => 0.0,
            PotentialShape::Step(s) => {
                let mut total = 0.0;
                let mut left = 0.0f64;
                for (right, v) in s.boundaries.iter().zip(&s.layers) {
                    let r = right.min(self.x_max);
                    if r > left {
                        let w = (r - left) + 0.5 * (r * r - left * left);
                        total += linalg::op_norm(v) * w;
                    }
                    left = *right;
                }
                total
            }
            PotentialShape::Exponential { amplitude, rate } => {
                // ∫₀^X (1+x) e^{-r x} dx in closed form
                let r = *rate;
                let xm = self.x_max;
                let e = (-r * xm).exp();
                let i0 = (1.0 - e) / r;
                let i1 = (1.0 - e * (1.0 + r * xm)) / (r * r);
                linalg::op_norm(amplitude) * (i0 + i1)
            }
            PotentialShape::Sampled { x, values } => {
                let g: Vec<f64> = x
                    .iter()
                    .zip(values)
                    .map(|(xi, v)| (1.0 + xi) * linalg::op_norm(v))
                    .collect();
                x.windows(2)
                    .zip(g.windows(2))
                    .map(|(xw, gw)| 0.5 * (xw[1] - xw[0]) * (gw[0] + gw[1]))
                    .sum()
            }
        }
    }
}

fn check_x_max(x_max: f64) -> Result<()> {
    if !(x_max > 0.0) || !x_max.is_finite() {
        return Err(ScatterError::InvalidConfig(format!("x_max must be positive, got {x_max}")));
    }
    Ok(())
}

/// Validates raw samples into a sampled [`Potential`]; each sample is
/// replaced by its hermitian part once it passes the hermiticity check.
pub fn validate_potential(x: Vec<f64>, values: Vec<CMat>, x_max: f64) -> Result<Potential> {
    check_x_max(x_max)?;
    if x.is_empty() || x.len() != values.len() {
        return Err(ScatterError::InvalidInput(format!(
            "{} abscissae for {} samples",
            x.len(),
            values.len()
        )));
    }
    let n = values[0].nrows();
    for (xi, w) in x.windows(2).map(|w| (w[1], w)) {
        if !(w[1] > w[0]) {
            return Err(ScatterError::InvalidInput(format!("abscissae not ascending at x = {xi}")));
        }
    }
    if x[0] < 0.0 {
        return Err(ScatterError::InvalidInput("abscissae must lie in [0, x_max]".into()));
    }
    let mut clean = Vec::with_capacity(values.len());
    for (xi, v) in x.iter().zip(values) {
        if !xi.is_finite() {
            return Err(ScatterError::NonFiniteSample { x: *xi });
        }
        if v.nrows() != n || v.ncols() != n {
            return Err(ScatterError::DimensionMismatch { expected: n, found: v.nrows().max(v.ncols()) });
        }
        if !linalg::is_finite(&v) {
            return Err(ScatterError::NonFiniteSample { x: *xi });
        }
        let defect = linalg::hermiticity_defect(&v);
        if defect > HERMITIAN_TOL * 1f64.max(linalg::max_abs(&v)) {
            return Err(ScatterError::NotHermitian { x: *xi, defect });
        }
        clean.push(linalg::hermitian_part(&v));
    }
    // samples past the truncation radius are dropped
    let keep = x.iter().take_while(|&&xi| xi <= x_max).count().max(1);
    let x: Vec<f64> = x.into_iter().take(keep).collect();
    clean.truncate(keep);
    let mut p = Potential { n, x_max, shape: PotentialShape::Sampled { x, values: clean }, first_moment: 0.0 };
    p.first_moment = p.compute_first_moment();
    if !p.first_moment.is_finite() {
        return Err(ScatterError::NonFinite("first moment"));
    }
    Ok(p)
}

/// One bound state `(κ_j, M_j)`; `multiplicity` is the rank of `M_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundState {
    pub kappa: f64,
    pub m: CMat,
    pub multiplicity: usize,
}

impl BoundState {
    pub fn new(kappa: f64, m: CMat) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(ScatterError::BadBoundState(format!("kappa must be positive, got {kappa}")));
        }
        let n = m.nrows();
        if m.ncols() != n || n == 0 {
            return Err(ScatterError::BadBoundState("normalization matrix must be square".into()));
        }
        if !linalg::is_finite(&m) {
            return Err(ScatterError::BadBoundState("normalization matrix is not finite".into()));
        }
        let scale = 1f64.max(linalg::max_abs(&m));
        if linalg::hermiticity_defect(&m) > HERMITIAN_TOL * scale {
            return Err(ScatterError::BadBoundState(format!("M at kappa = {kappa} is not hermitian")));
        }
        let eig = linalg::hermitian_eigenvalues(&m);
        if eig[0] < -HERMITIAN_TOL * scale {
            return Err(ScatterError::BadBoundState(format!("M at kappa = {kappa} is not nonnegative")));
        }
        let sv = linalg::singular_values(&m);
        let multiplicity = sv.iter().filter(|&&s| s > RANK_TOL * sv[0]).count();
        if multiplicity == 0 {
            return Err(ScatterError::BadBoundState(format!("M at kappa = {kappa} vanishes")));
        }
        Ok(Self { kappa, m: linalg::hermitian_part(&m), multiplicity })
    }
}

/// Sampled scattering matrix on a symmetric k-grid plus bound-state data.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringData {
    n: usize,
    k_grid: Vec<f64>,
    s_values: Vec<CMat>,
    bound_states: Vec<BoundState>,
}

/// Checks shapes, grid symmetry and the bound-state list.
pub fn validate_scattering_data(
    k_grid: Vec<f64>,
    s_values: Vec<CMat>,
    bound_states: Vec<BoundState>,
) -> Result<ScatteringData> {
    if k_grid.len() < 2 || k_grid.len() != s_values.len() {
        return Err(ScatterError::InvalidInput(format!(
            "{} grid points for {} scattering matrices",
            k_grid.len(),
            s_values.len()
        )));
    }
    let n = s_values[0].nrows();
    if n == 0 {
        return Err(ScatterError::InvalidInput("empty scattering matrix".into()));
    }
    for w in k_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(ScatterError::InvalidInput(format!("k-grid not ascending at k = {}", w[1])));
        }
    }
    let len = k_grid.len();
    let kmax = k_grid[len - 1].abs().max(k_grid[0].abs());
    for i in 0..len {
        if (k_grid[i] + k_grid[len - 1 - i]).abs() > 1e-12 * kmax.max(1.0) {
            return Err(ScatterError::AsymmetricGrid { k: k_grid[i] });
        }
    }
    for (k, s) in k_grid.iter().zip(&s_values) {
        if s.nrows() != n || s.ncols() != n {
            return Err(ScatterError::DimensionMismatch { expected: n, found: s.nrows().max(s.ncols()) });
        }
        if !linalg::is_finite(s) {
            return Err(ScatterError::NonFiniteSample { x: *k });
        }
    }
    let mut kappas: Vec<f64> = Vec::new();
    for bs in &bound_states {
        if bs.m.nrows() != n {
            return Err(ScatterError::DimensionMismatch { expected: n, found: bs.m.nrows() });
        }
        // re-run the per-state checks: the fields are public
        BoundState::new(bs.kappa, bs.m.clone())?;
        if kappas.iter().any(|&k| (k - bs.kappa).abs() <= 1e-12 * k.max(1.0)) {
            return Err(ScatterError::BadBoundState(format!("duplicate kappa {}", bs.kappa)));
        }
        kappas.push(bs.kappa);
    }
    Ok(ScatteringData { n, k_grid, s_values, bound_states })
}

impl ScatteringData {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k_grid(&self) -> &[f64] {
        &self.k_grid
    }

    pub fn s_values(&self) -> &[CMat] {
        &self.s_values
    }

    pub fn bound_states(&self) -> &[BoundState] {
        &self.bound_states
    }

    pub fn len(&self) -> usize {
        self.k_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_grid.is_empty()
    }

    /// Index of `-k_i`.
    pub fn mirror(&self, i: usize) -> usize {
        self.k_grid.len() - 1 - i
    }

    pub fn k_max(&self) -> f64 {
        self.k_grid[self.k_grid.len() - 1]
    }

    /// `𝒩 = Σ m_j`.
    pub fn total_multiplicity(&self) -> usize {
        self.bound_states.iter().map(|b| b.multiplicity).sum()
    }

    pub fn with_bound_states(&self, bound_states: Vec<BoundState>) -> Result<Self> {
        validate_scattering_data(self.k_grid.clone(), self.s_values.clone(), bound_states)
    }

    pub fn with_s_values(&self, s_values: Vec<CMat>) -> Result<Self> {
        validate_scattering_data(self.k_grid.clone(), s_values, self.bound_states.clone())
    }
}

/// Jost data on the k-grid: `f(k,0)`, `f'(k,0)` and `J(k)`, plus `J(iκ_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JostBundle {
    pub k_grid: Vec<f64>,
    pub f0: Vec<CMat>,
    pub fp0: Vec<CMat>,
    pub j_values: Vec<CMat>,
    pub bound_j: Vec<(f64, CMat)>,
}

impl JostBundle {
    /// Max over the grid of `|J(k) - [f(-k,0)†B - f'(-k,0)†A]|`.
    pub fn consistency_residual(&self, bc: &BoundaryCondition) -> f64 {
        let len = self.k_grid.len();
        (0..len)
            .map(|i| {
                let m = len - 1 - i;
                let j = &(self.f0[m].adjoint() * bc.b()) - &(self.fp0[m].adjoint() * bc.a());
                linalg::max_diff(&j, &self.j_values[i])
            })
            .fold(0.0, f64::max)
    }
}

/// Marchenko data on the uniform lattice `y_m = m·h`.
///
/// `fs_values[m]` holds `F_s(y)` for `y = (m - offset)·h` with
/// `offset = fs_values.len() / 2`, so both half-lines are present;
/// `f_values[m] = F(m·h)` on `[0, 2·y_max]`. Row `p` of `k_rows` is
/// `K(x_p, x_p + j·h)` for `j = 0, 1, …`; `K` is zero for `y < x`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarchenkoKernel {
    pub h: f64,
    pub y_max: f64,
    pub fs_values: Vec<CMat>,
    pub f_values: Vec<CMat>,
    pub x_grid: Vec<f64>,
    pub k_rows: Vec<Vec<CMat>>,
}

impl MarchenkoKernel {
    pub fn fs_offset(&self) -> usize {
        self.fs_values.len() / 2
    }

    /// `F_s` on `y ≥ 0` (index `m` is `y = m·h`).
    pub fn fs_positive(&self) -> &[CMat] {
        &self.fs_values[self.fs_offset()..]
    }

    /// `K(x_p, x_p⁺)`.
    pub fn k_diagonal(&self) -> Vec<CMat> {
        self.k_rows.iter().map(|r| r[0].clone()).collect()
    }

    /// `K(x_p, m·h)` with the zero convention below the diagonal.
    pub fn k_at(&self, p: usize, m: usize) -> CMat {
        let n = self.f_values[0].nrows();
        if m < p {
            return linalg::zeros(n, n);
        }
        self.k_rows[p].get(m - p).cloned().unwrap_or_else(|| linalg::zeros(n, n))
    }
}

/// Default symmetric midpoint grid `±(j + ½)Δk` on `(-k_max, k_max)`.
pub fn symmetric_grid(k_max: f64, count: usize) -> Vec<f64> {
    let dk = 2.0 * k_max / count as f64;
    (0..count).map(|j| -k_max + (j as f64 + 0.5) * dk).collect()
}

#[cfg(test)]
pub(crate) fn scalar(z: c64) -> CMat {
    CMat::from_fn(1, 1, |_, _| z)
}

#[cfg(test)]
pub(crate) fn real_scalar(x: f64) -> CMat {
    scalar(linalg::cx(x, 0.0))
}
