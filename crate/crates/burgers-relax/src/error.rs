//! Crate-wide error type.

use thiserror::Error;

/// Errors reported by model construction, solvers, and I/O.
///
/// Every variant renders as a single line so CLI failure paths stay
/// machine-parsable.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected d={expected}, got d={got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("matrix is not symmetric positive definite: min eigenvalue {min_eig:.3e}")]
    NotSpd { min_eig: f64 },

    #[error("tensor family does not commute: pair (C{i}, C{j}) has relative commutator residual {residual:.3e} > {tol:.3e}")]
    NotCommuting {
        i: usize,
        j: usize,
        residual: f64,
        tol: f64,
    },

    #[error("pole extraction failed: {0}")]
    PoleExtraction(String),

    #[error("partial fractions ill-conditioned (cond {cond:.3e} > {limit:.3e}); increase the pole merge tolerance")]
    IllConditioned { cond: f64, limit: f64 },

    #[error("decay certificate failed: item {item} at t={t:.6e}: {detail}")]
    CertificateFailed {
        item: &'static str,
        t: f64,
        detail: String,
    },

    #[error("invalid strain history: {0}")]
    InvalidHistory(String),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("csv error: {0}")]
    Csv(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
