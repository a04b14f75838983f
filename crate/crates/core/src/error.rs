use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("a party needs at least two settings, got {0}")]
    TooFewSettings(usize),

    #[error("displacement {index} is not finite")]
    NonFinite { index: usize },

    #[error("displacements {first} and {second} are {distance:e} apart (minimum {minimum:e})")]
    Degenerate {
        first: usize,
        second: usize,
        distance: f64,
        minimum: f64,
    },

    #[error("Cholesky factorization failed (regularization shift {shift:e})")]
    FactorizationFailure { shift: f64 },

    #[error("parties have different setting counts: {x} vs {y}")]
    LengthMismatch { x: usize, y: usize },

    #[error("top eigenvalue is degenerate: {value} vs {runner_up}")]
    DegenerateTop { value: f64, runner_up: f64 },

    #[error("Fock truncation {n_trunc} leaves tail {tail:e} above target {target:e}")]
    TruncationTooSmall { n_trunc: usize, tail: f64, target: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("least-squares fit: {0}")]
    Fit(#[from] crate::regression::FitError),

    #[error(transparent)]
    Store(#[from] crate::store::StoreError),
}
