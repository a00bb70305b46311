//! Error type shared by all solver modules.

use thiserror::Error;

/// Errors produced by grid construction, discretization and eigensolvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("potential is not finite at node {index} (t = {position})")]
    NonFinitePotential { index: usize, position: f64 },

    #[error("minimization bracket [{a}, {b}] does not enclose a minimum")]
    BracketFailed { a: f64, b: f64 },

    #[error(
        "eigensolver did not converge after {iterations} iterations \
         (best value {value}, residual {residual:.3e}, tolerance {tolerance:.3e})"
    )]
    NoConvergence {
        value: f64,
        residual: f64,
        iterations: usize,
        tolerance: f64,
    },

    #[error("domain too short: {0}")]
    DomainTooShort(String),

    #[error("second-derivative estimators disagree: difference {difference:.3e} > {threshold:.3e} (fd {fd}, fit {fit})")]
    EstimatorDisagreement {
        fd: f64,
        fit: f64,
        difference: f64,
        threshold: f64,
    },

    #[error("resolvent system ill-conditioned: condition estimate {condition:.3e}")]
    IllConditioned { condition: f64 },

    #[error("parameter out of range: {0}")]
    InvalidParameter(String),

    #[error("chart parameter {param} outside the open interval (-1, 1)")]
    ChartEndpoint { param: f64 },

    #[error("frame or finite-difference step degenerate: {0}")]
    DegenerateStep(String),

    #[error("quadrature grid does not contain the cut-off support: {0}")]
    GridTooSmall(String),

    #[error("no zero crossing of B·N found on the sampled surface")]
    NoZeroCrossing,

    #[error("missing spectral constants: {0}")]
    MissingConstants(String),
}

pub type Result<T> = std::result::Result<T, Error>;
