use thiserror::Error;

/// Errors produced by the spectral solver and the experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SebaError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("cutoff {cutoff} lies below the ground eigenvalue {ground}")]
    EmptyBasis { cutoff: f64, ground: f64 },

    #[error("basis would hold more than {limit} modes")]
    BasisOverflow { limit: usize },

    #[error("point ({x}, {y}) lies outside the rectangle [0, {a}] x [0, {b}]")]
    OutsideDomain { x: f64, y: f64, a: f64, b: f64 },

    #[error("z = {z} is within tolerance of the pole at E = {pole}")]
    PoleProximity { z: f64, pole: f64 },

    #[error("z = {z} is not below the basis cutoff {cutoff}")]
    BeyondCutoff { z: f64, cutoff: f64 },

    #[error("no root of F(z) = {alpha} below {bound}")]
    NoRoot { alpha: f64, bound: f64 },

    #[error("invalid interval ({lo}, {hi})")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("{value} is not an eigenvalue of the basis")]
    NotAnEigenvalue { value: f64 },

    #[error("basis too small: need {needed} eigenvalues below {limit}, found {found}")]
    InsufficientBasis {
        needed: usize,
        found: usize,
        limit: f64,
    },

    #[error("mode coefficients are not normalized (sum of squares {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("amplitude cutoff {requested} exceeds the basis cutoff {basis}")]
    AmplitudeCutoff { requested: f64, basis: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, SebaError>;
