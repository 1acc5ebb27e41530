use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("point with modulus {modulus} is not strictly inside the unit disc")]
    PointOutsideDisc { modulus: f64 },

    #[error("path needs at least two samples with consecutive samples distinct")]
    DegeneratePath,

    #[error("nodes must be pairwise distinct (indices {i} and {j} coincide)")]
    DegenerateNodes { i: usize, j: usize },

    #[error("at least {needed} points required, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("value with modulus {modulus} lies outside the closed unit disc")]
    ValueOutsideClosedDisc { modulus: f64 },

    #[error("rotation must be unimodular, got modulus {modulus}")]
    NotUnimodular { modulus: f64 },

    #[error("|f(z)| = {modulus} is too close to the unit circle for a hyperbolic derivative")]
    DegenerateBoundary { modulus: f64 },

    #[error("boundary modulus sample at theta = {theta} is {value}, expected > 0")]
    InvalidBoundaryData { theta: f64, value: f64 },

    #[error("evaluation point modulus {modulus} exceeds the quadrature margin 1 - {margin}")]
    OutsideQuadratureMargin { modulus: f64, margin: f64 },

    #[error("diagonal limit extrapolation did not converge (spread {spread})")]
    LimitDivergence { spread: f64 },

    #[error("problem is not strictly solvable: classified {status}")]
    NotStrictlySolvable { status: &'static str },

    #[error("node {index} lies within tolerance of a Blaschke zero")]
    PoleAtNode { index: usize },

    #[error("every family member was excluded (degenerate capacity)")]
    DegenerateFamily,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
