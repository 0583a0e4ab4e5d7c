use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScatterError {
    #[error("boundary matrices violate -B†A + A†B = 0 (residual {residual:.3e})")]
    SelfadjointnessViolated { residual: f64 },
    #[error("stacked boundary matrix [A; B] is rank deficient (smallest eigenvalue ratio {ratio:.3e})")]
    RankDeficient { ratio: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("sample at x = {x} is not hermitian (defect {defect:.3e})")]
    NotHermitian { x: f64, defect: f64 },
    #[error("non-finite sample at x = {x}")]
    NonFiniteSample { x: f64 },
    #[error("k-grid is not symmetric about 0 near k = {k}")]
    AsymmetricGrid { k: f64 },
    #[error("invalid bound state: {0}")]
    BadBoundState(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("ODE integration failed near x = {x}: step size underflow")]
    IntegrationFailure { x: f64 },
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("Jost matrix is numerically singular at k = {k} (condition number {cond:.3e})")]
    SingularJost { k: f64, cond: f64 },
    #[error("bound-state scan is inconclusive: candidate zero at the scan boundary kappa = {kappa}")]
    ScanInconclusive { kappa: f64 },
    #[error("two bound states at kappa = {first} and {second} could not be separated")]
    ClusterUnresolved { first: f64, second: f64 },
    #[error("Gram matrix for the bound state at kappa = {kappa} is not positive (min eigenvalue {min_eig:.3e})")]
    NotPositive { kappa: f64, min_eig: f64 },
    #[error("scattering matrix has not settled to its asymptotic form on the tail window (residual {residual:.3e})")]
    TailNotSettled { residual: f64 },
    #[error("discretized Marchenko operator is singular at x = {x} (condition estimate {cond:.3e})")]
    SingularOperator { x: f64, cond: f64 },
    #[error("kernel truncation too short: |F(y_max)| = {value:.3e}")]
    TruncationTooShort { value: f64 },
    #[error("S_inf eigenvalues are not ±1 (deviation {deviation:.3e})")]
    SpectralFailure { deviation: f64 },
    #[error("phase of det S jumps by {jump:.3} rad between adjacent nodes near k = {k}")]
    PhaseUnwrapFailure { k: f64, jump: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = ScatterError> = std::result::Result<T, E>;
