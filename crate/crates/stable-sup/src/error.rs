//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alpha must lie in (0,2); got {0}")]
    OutOfRange(f64),
    #[error("rho = {rho} outside the admissible range [{lo}, {hi}] for alpha = {alpha}")]
    DegenerateRho { alpha: f64, rho: f64, lo: f64, hi: f64 },
    #[error("time horizon must be positive; got {0}")]
    NonPositiveT(f64),
    #[error("argument {0} outside the valid domain: {1}")]
    DomainError(f64, &'static str),
    #[error("operation requires alpha != 1; the parameters are in Cauchy mode")]
    CauchyMode,
    #[error("moment of order {q} does not exist (requires {range})")]
    MomentDoesNotExist { q: f64, range: &'static str },
    #[error("kappa = {kappa} violates kappa^alpha >= max(rho, 1-rho); minimal admissible kappa = {min_kappa}")]
    KappaTooSmall { kappa: f64, min_kappa: f64 },
    #[error("noise record holds {capacity} entries but level {requested} was requested")]
    CapacityExceeded { capacity: usize, requested: usize },
    #[error("weight evaluation needs m >= n >= 1; got n = {n}, m = {m}")]
    LevelOrder { n: usize, m: usize },
    #[error("expression mode does not match the parameter regime (standard vs Cauchy)")]
    CauchyModeMismatch,
    #[error("derivative order ({0}, {1}) missing from the supplied grid")]
    MissingOrder(u32, u32),
    #[error("point ({x}, {y}) outside the support y > max(x, 0)")]
    OutsideSupport { x: f64, y: f64 },
    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),
    #[error("grid of estimates is empty")]
    EmptyGrid,
    #[error("indices must satisfy 1 <= j <= k <= n; got j = {j}, k = {k}, n = {n}")]
    IndexOrder { j: usize, k: usize, n: usize },
    #[error("integral diverges: requires q > p, got p = {p}, q = {q}")]
    DivergentIntegral { p: f64, q: f64 },
    #[error("quadrature failed to reach tolerance {tol} (best error estimate {err})")]
    QuadratureFailure { tol: f64, err: f64 },
    #[error("I/O error: {0}")]
    Io(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
