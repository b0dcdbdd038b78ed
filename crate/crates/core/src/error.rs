use thiserror::Error;

/// Outcome classes used for process exit codes.
///
/// Walks the analytic routines refuse (monotone, non-positive drift) are
/// reported as numeric failures: the input parsed and validated as a
/// distribution, but the requested computation is undefined for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or out-of-domain input.
    Input,
    /// A numerical routine failed or an internal cross-check disagreed.
    Numeric,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("negative probability mass {p} at support point {k}")]
    NegativeMass { k: i64, p: f64 },
    #[error("probabilities sum to {sum}, expected 1 within 1e-9")]
    MassNotOne { sum: f64 },
    #[error("support point {0} listed more than once")]
    DuplicateSupportPoint(i64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("argument {x} outside [-1,0) U (0,1]")]
    DomainError { x: f64 },
    #[error("operation requires increments >= -1, distribution starts at {min_support}")]
    UnsupportedSupport { min_support: i64 },
    #[error("walk never steps down (p_-1 = 0)")]
    MonotoneWalk,
    #[error("drift {drift} is not positive")]
    NonPositiveDrift { drift: f64 },
    #[error("offspring law is deterministic (xi = {0} a.s.)")]
    Deterministic(usize),
    #[error("no sign change on [{lo}, {hi}]")]
    RootNotBracketed { lo: f64, hi: f64 },
    #[error("root finder did not converge (last iterate {at})")]
    RootNotConverged { at: f64 },
    #[error("rho = {rho} leaves residual |g(rho) - 1| = {residual}")]
    InconsistentRho { rho: f64, residual: f64 },
    #[error("{count} roots of g(y) = -1 and the series oracle cannot single one out")]
    AmbiguousRoot { count: usize },
    #[error("tau = 0: positive excursions never complete")]
    DegenerateExcursion,
    #[error("{name} = {value} outside its admissible range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
    #[error("I - Q is singular (determinant {det})")]
    SingularSystem { det: f64 },
    #[error("invalid absorbing chain: {0}")]
    InvalidChain(String),
    #[error("closed form {closed} and chain absorption {chain} disagree for {quantity}")]
    ChainMismatch { quantity: &'static str, closed: f64, chain: f64 },
    #[error("window [{lo}, {hi}] cannot hold the walk after {n} steps")]
    WindowTooSmall { lo: i64, hi: i64, n: u64 },
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("{0}")]
    Io(String),
    #[error("cannot parse distribution spec: {0}")]
    Parse(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            NegativeMass { .. }
            | MassNotOne { .. }
            | DuplicateSupportPoint(_)
            | InvalidParameter(_)
            | DomainError { .. }
            | UnsupportedSupport { .. }
            | WindowTooSmall { .. }
            | InvalidConfig(_)
            | InvalidChain(_)
            | Io(_)
            | Parse(_) => ErrorClass::Input,
            MonotoneWalk
            | NonPositiveDrift { .. }
            | Deterministic(_)
            | RootNotBracketed { .. }
            | RootNotConverged { .. }
            | InconsistentRho { .. }
            | AmbiguousRoot { .. }
            | DegenerateExcursion
            | OutOfRange { .. }
            | InvariantViolated(_)
            | SingularSystem { .. }
            | ChainMismatch { .. } => ErrorClass::Numeric,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
