use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("|q| must lie strictly between 0 and 1 (got |q| = {0})")]
    InvalidQ(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no convergence within {terms} terms (tail bound {tail_bound:e})")]
    NonConvergent { terms: usize, tail_bound: f64 },
    #[error("series argument |z| = {0} lies outside the unit disc")]
    Divergence(f64),
    #[error("pole: {0}")]
    Pole(String),
    #[error("parameters collide on a q-spiral: {0}")]
    SpiralCollision(String),
    #[error("resonant system: {0}")]
    Resonant(String),
    #[error("coefficient pole met after {step} q-shifts")]
    PoleChain { step: usize },
    #[error("eigenvector matrix is ill-conditioned (condition number {0:e})")]
    IllConditioned(f64),
    #[error("matrix is not unimodular (|det - 1| = {0:e})")]
    NotUnimodular(f64),
    #[error("invalid index pair")]
    BadIndex,
    #[error("extrapolation diverged: {0}")]
    ExtrapolationDiverged(String),
    #[error("fundamental solution is singular at the requested point: {0}")]
    SingularSolution(String),
    #[error("base point is singular")]
    BasePointSingular,
    #[error("need at least {needed} sample points, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("parameters are not q-real")]
    NotQReal,
}

pub type Result<T> = std::result::Result<T, Error>;
