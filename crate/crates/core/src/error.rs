use thiserror::Error;

/// Errors raised by the filtering, design, synthesis and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("state vector has zero norm")]
    ZeroVector,

    #[error("state vector norm {norm} deviates from 1 by more than {tolerance}")]
    NotNormalized { norm: f64, tolerance: f64 },

    #[error("state dimension {found} is not supported (expected {expected})")]
    Dimension { expected: String, found: usize },

    #[error("states have mismatched dimensions: {first} vs {other}")]
    DimensionMismatch { first: usize, other: usize },

    #[error("invalid priors: {0}")]
    InvalidPriors(String),

    #[error("psi_2 and psi_3 are parallel (|<psi_2|psi_3>| = {overlap}); span is one-dimensional")]
    DegenerateSubspace { overlap: f64 },

    #[error("prior of the target state is zero; the filtering target never occurs")]
    DegeneratePrior,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("inconsistent solution: {0}")]
    InconsistentSolution(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("no unitary exists: Gram entry ({i},{j}) differs by {deviation:e}")]
    NoUnitary { i: usize, j: usize, deviation: f64 },

    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("states are linearly dependent (smallest Gram eigenvalue {min_eigenvalue:e})")]
    LinearlyDependent { min_eigenvalue: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
