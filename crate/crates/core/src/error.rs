//! Error type shared across the library.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the library.
///
/// Input validation failures (`InvalidScene`, `InvalidInput`, …) mean the
/// caller handed us data that violates a documented precondition; numerical
/// failures (`CgDidNotConverge`) carry enough state to diagnose the solve.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("direction must be a unit vector (got |omega| = {norm:.17e})")]
    NonUnitDirection { norm: f64 },

    #[error("point ({x}, {y}) lies inside the shape's closure; distance is undefined")]
    PointInsideShape { x: f64, y: f64 },

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("probe point coincides with the evaluation point (singular)")]
    ProbeSingularity,

    #[error("fluid region is disconnected ({components} components); the method requires a connected exterior")]
    DisconnectedFluid { components: usize },

    #[error("conjugate gradients did not converge in {iters} iterations (relative residual {residual:.3e}, tolerance {tol:.3e})")]
    CgDidNotConverge {
        iters: usize,
        residual: f64,
        tol: f64,
    },

    #[error("trace was generated with tau = {trace_tau} but the probe carries tau = {probe_tau}")]
    TauMismatch { trace_tau: f64, probe_tau: f64 },

    #[error("regression design matrix is rank deficient (need >= 3 distinct tau values)")]
    RankDeficient,

    #[error("half-plane intersection is empty; the support estimates are mutually inconsistent: {detail}")]
    EmptyIntersection { detail: String },
}
