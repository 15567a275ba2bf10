//! Analysis of the periodic orbit at infinity for planar piecewise linear
//! systems with two focus zones separated by the line `x = 0`.
//!
//! The family is written in the five-parameter canonical form
//!
//! ```text
//!   x <= 0:  x' = 2 gamma_L x - y - b,  y' = (1 + gamma_L^2) x - alpha_L
//!   x >  0:  x' = 2 gamma_R x - y + b,  y' = (1 + gamma_R^2) x - alpha_R
//! ```
//!
//! Orbits near infinity are tracked through `u0 = 1/y0`, the inverse of the
//! ordinate where they cross the positive `y` axis. The displacement map
//! `Delta(u0) = L(u0) - R(u0)` compares the left and right half-return maps;
//! its positive zeros are big-amplitude limit cycles.
//!
//! Modules:
//! - [`params`]: the three parametrizations, conversions and symmetries.
//! - [`series`]: Taylor coefficients of `L`, `R` and `Delta` to any order.
//! - [`flow`]: exact zone flows, numeric half-return maps and orbit tracing.
//! - [`classify`]: hyperbolic / weak-focus / center verdict at infinity.
//! - [`cycles`]: limit-cycle search and quartic truncation roots.
//! - [`unfold`]: order-3 unfolding, parameter Jacobians, model quartic regions.
//! - [`cli`]: command-line adapters and report rendering.

pub mod classify;
pub mod cli;
pub mod cycles;
pub mod error;
pub mod flow;
pub mod io;
pub mod params;
pub mod poly;
pub mod rootfind;
pub mod series;
pub mod unfold;

pub use classify::{classify_infinity, CenterType, InfinityClass, InfinityKind, Stability};
pub use cycles::{find_cycles, truncation_roots, CycleScan, LimitCycle};
pub use error::{Error, Result, Side};
pub use flow::{displacement_numeric, half_return_numeric, trace_orbit, zone_flow, ZoneFlow};
pub use params::{
    apply_symmetry, canonicalize, from_equilibrium, is_continuous, to_equilibrium, EquilibriumSpec,
    LienardSpec, Symmetry, SystemSpec,
};
pub use series::{
    closed_form_coeffs, displacement_series, half_return_series, DisplacementSeries,
    HalfReturnSeries, TruncatedSeries,
};
pub use unfold::{
    delta_jacobian, model_region_count, order3_unfold, region_boundaries, UnfoldingResult,
    UnfoldingTarget,
};
