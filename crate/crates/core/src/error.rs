use num_complex::Complex64;
use thiserror::Error;

use crate::space::PointE3;

/// Failure to evaluate a mapping at a point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("component F{component} evaluated at xi = {xi} lies {distance:e} from pole {pole}")]
    NearPole {
        component: usize,
        xi: Complex64,
        pole: Complex64,
        distance: f64,
    },
    #[error("non-finite value at ({}, {}, {})", point.x, point.y, point.z)]
    NonFinite { point: PointE3 },
}

/// Errors raised by geometry and integration routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("generator triple is degenerate (smallest singular value {sigma_min:e})")]
    DegenerateGenerators { sigma_min: f64 },
    #[error("rho = {rho} outside the open interval (0, {max}) (half the curve length)")]
    RhoOutOfRange { rho: f64, max: f64 },
    #[error("resolution must be at least {min}, got {got}")]
    Resolution { min: usize, got: usize },
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid homotopy: {0}")]
    InvalidHomotopy(String),
    #[error("invalid quadrature: {0}")]
    InvalidQuadrature(String),
    #[error("evaluation failed at curve parameter t = {t} (segment {index}): {source}")]
    Evaluation {
        t: f64,
        index: usize,
        #[source]
        source: EvalError,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
