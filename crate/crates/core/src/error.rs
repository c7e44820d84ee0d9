use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |m - m^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue = {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("coupling is not normalized: |u|^2 + |v|^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("decay rate must be finite and positive, got {0}")]
    InvalidRate(f64),

    #[error("coupling vectors u and v are both zero")]
    DegenerateCoupling,

    #[error("coupling is not dissipative (|u x v| = {cross_norm:e})")]
    NotDissipative { cross_norm: f64 },

    #[error("invalid time {0}: must be non-negative")]
    InvalidTime(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid Choi matrix: {0}")]
    InvalidChoi(String),

    #[error("Kraus set is not complete (max deviation from identity = {deviation:e})")]
    IncompleteKraus { deviation: f64 },

    #[error("population weight {0} outside [0, 1]")]
    InvalidWeight(f64),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("initial state is not entangled (concurrence = {concurrence:e})")]
    NotEntangled { concurrence: f64 },

    #[error("coupling of qubit {qubit} is not a {expected} coupling")]
    WrongClass { qubit: usize, expected: &'static str },

    #[error("sign change of lambda straddles a grid gap of {gap} (> 0.5 in units of 1/gamma)")]
    GridTooCoarse { gap: f64 },

    #[error("lambda_inf = {lambda_inf:e} is negative but no zero crossing was found up to t = {horizon}")]
    TauNotBracketed { lambda_inf: f64, horizon: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
