use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    InvalidParam(String),

    #[error("state left the working domain |U| < 1: |U| = {norm:.6}")]
    DomainExit { norm: f64 },

    #[error("Newton iteration failed to converge ({context}): residual {residual:.3e} after {iters} iterations")]
    NewtonDiverged {
        context: String,
        residual: f64,
        iters: usize,
    },

    #[error("bracketing/bisection failed: {0}")]
    BracketFailure(String),

    #[error("flux is not uniformly convex: f'' ({value:.6e}) < required lower bound {bound:.6e}")]
    NonConvexFlux { value: f64, bound: f64 },

    #[error("eigen-structure certification failed at U=({u:.4},{v:.4},{w:.4}): {reason}")]
    CertificationFailure {
        u: f64,
        v: f64,
        w: f64,
        reason: String,
    },

    #[error("front budget exhausted: run truncated at t={t:.6} with {fronts} fronts created")]
    Truncated { t: f64, fronts: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("mollification failed: TV difference {tv:.3e} still above budget {budget:.3e} after {attempts} radius halvings")]
    MollifyFailure {
        tv: f64,
        budget: f64,
        attempts: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
