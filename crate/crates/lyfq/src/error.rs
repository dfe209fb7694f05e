use num_complex::Complex64;
use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("zero polynomial is not allowed here")]
    ZeroPolynomial,

    #[error("exponent arithmetic overflow")]
    ExponentOverflow,

    #[error("matrix is not unitary: ||U*U - I|| = {deviation:.3e} exceeds {tol:.3e}")]
    NotUnitary { deviation: f64, tol: f64 },

    #[error("dimension {n} exceeds the principal-minor expansion guard ({max})")]
    MinorExpansionTooLarge { n: usize, max: usize },

    #[error("root finding did not converge; worst residual {residual:.3e}")]
    RootsNonConvergence { residual: f64 },

    #[error("eigenvalue iteration did not converge")]
    EigNonConvergence,

    #[error("root {root} is off the unit circle by {deviation:.3e} (tol {tol:.3e})")]
    OffCircleRoot {
        root: Complex64,
        deviation: f64,
        tol: f64,
    },

    #[error("substituted polynomial degree {degree} exceeds the cap {cap}")]
    DegreeCapExceeded { degree: usize, cap: usize },

    #[error("polynomial is not self-inversive up to a unimodular factor")]
    NotSelfInversive,

    #[error("anchor lies on (or too close to) the torus zero set: |p| = {value:.3e}")]
    AnchorOnZeroSet { value: f64 },

    #[error("phase lift is ambiguous at t = {t:.6} with step {dt:.3e}")]
    AmbiguousLift { t: f64, dt: f64 },

    #[error("phase tracking failed at t = {t:.6}: {reason}")]
    TrackingFailed { t: f64, reason: String },

    #[error("residual check failed at x = {x:.12}: |f| = {residual:.3e} > {tol:.3e}")]
    ResidualCheck { x: f64, residual: f64, tol: f64 },

    #[error("point is not on the torus zero set: |f| = {value:.3e}")]
    NotOnZeroSet { value: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
