use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Zone of the plane: `x <= 0` is left, `x > 0` is right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    L,
    R,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::L => f.write_str("L"),
            Side::R => f.write_str("R"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("zone {0} is not of focus type (T^2 - 4D >= 0)")]
    NonFocusZone(Side),

    #[error("series order {requested} exceeds the configured cap {cap}")]
    OrderTooLarge { requested: usize, cap: usize },

    #[error("series order must be at least 1")]
    ZeroOrder,

    #[error("no return to the switching line from zone {side} (y_in = {y_in})")]
    NoCrossing { side: Side, y_in: f64 },

    #[error("orbit through zone {side} touches the sliding segment (y = {y}, |b| = {b_abs})")]
    SlidingContact { side: Side, y: f64, b_abs: f64 },

    #[error(
        "parameter combination `{name}` = {value:e} lies in the ambiguity band ({tol:e}, {band:e}]"
    )]
    AmbiguousNearBoundary {
        name: &'static str,
        value: f64,
        tol: f64,
        band: f64,
    },

    #[error("no u0 in (0, {u0_max}] produces crossing orbits")]
    EmptyRange { u0_max: f64 },

    #[error("leading coefficient {0:e} is numerically zero")]
    DegenerateLeading(f64),

    #[error("unfolding target component {index} = {value} exceeds the locality bound {bound}")]
    TargetOutOfRange {
        index: usize,
        value: f64,
        bound: f64,
    },

    #[error("Newton iterate left the locality ball (distance {distance} > {radius})")]
    OutsideLocality { distance: f64, radius: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("finite-difference step {h:e} gives extrapolation disagreement {disagreement:e}")]
    StepTooSmall { h: f64, disagreement: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
