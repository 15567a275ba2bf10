//! Limit cycles near infinity as positive zeros of the displacement map.
//!
//! The scan is complete only relative to its grid: two roots closer than
//! one grid cell, or an even-multiplicity root, are not detected.

use serde::Serialize;

use crate::classify::Stability;
use crate::error::{Error, Result};
use crate::flow::{displacement_eval, DisplacementEval};
use crate::params::SystemSpec;
use crate::poly::{monic_cubic_roots, RealRoot};
use crate::rootfind::{safeguarded_newton, NewtonOptions};

pub const DEFAULT_GRID: usize = 400;
/// The scan starts at `SCAN_FLOOR * u0_max`.
pub const SCAN_FLOOR: f64 = 1e-6;
/// `|Delta(u)| <= NOISE_FLOOR * u` is indistinguishable from zero.
pub const NOISE_FLOOR: f64 = 1e-12;
pub const ROOT_TOL: f64 = 1e-13;
pub const SLOPE_TOL: f64 = 1e-12;
const DEDUP_REL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitCycle {
    pub u0_root: f64,
    /// `1 / u0_root`, the upper crossing of the switching line.
    pub y_top: f64,
    /// Lower crossing reached by the left half map.
    pub y_bottom: f64,
    #[serde(rename = "tau_L")]
    pub tau_l: f64,
    #[serde(rename = "tau_R")]
    pub tau_r: f64,
    pub displacement: f64,
    pub displacement_slope: f64,
    /// `L'(u0) / R'(u0)`: the derivative of the return map through the cycle.
    pub multiplier_proxy: f64,
    pub hyperbolic: bool,
    /// Stable iff the slope is positive: `Delta < 0` inside and `> 0` outside
    /// both push orbits toward the cycle.
    pub stability: Stability,
}

impl LimitCycle {
    fn from_eval(e: &DisplacementEval) -> Self {
        let hyperbolic = e.slope.abs() > SLOPE_TOL;
        LimitCycle {
            u0_root: e.u0,
            y_top: 1.0 / e.u0,
            y_bottom: e.left.y_out,
            tau_l: e.left.flight_time,
            tau_r: e.right.flight_time,
            displacement: e.delta,
            displacement_slope: e.slope,
            multiplier_proxy: e.l_prime / e.r_prime,
            hyperbolic,
            stability: if !hyperbolic {
                Stability::NonIsolated
            } else if e.slope > 0.0 {
                Stability::Stable
            } else {
                Stability::Unstable
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleScan {
    /// Sorted by `u0_root` ascending.
    pub cycles: Vec<LimitCycle>,
    /// Largest scanned `u0`; below the request if crossing failed beyond it.
    pub effective_u0_max: f64,
    /// Every scanned value was below the noise floor.
    pub period_annulus: bool,
    pub grid_points: usize,
}

/// Log-spaced grid of `n` points on `[SCAN_FLOOR * u0_max, u0_max]`.
pub fn scan_grid(u0_max: f64, n: usize) -> Vec<f64> {
    let lo = (SCAN_FLOOR * u0_max).ln();
    let hi = u0_max.ln();
    (0..n)
        .map(|i| {
            if i + 1 == n {
                u0_max
            } else {
                (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

pub fn find_cycles(spec: &SystemSpec, u0_max: f64, grid: usize) -> Result<CycleScan> {
    if !(u0_max > 0.0 && u0_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "u0_max must be positive, got {u0_max}"
        )));
    }
    if grid < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid needs at least 2 points, got {grid}"
        )));
    }
    let mut samples: Vec<(f64, f64)> = Vec::with_capacity(grid);
    for u in scan_grid(u0_max, grid) {
        match displacement_eval(spec, u) {
            Ok(e) => samples.push((u, e.delta)),
            Err(Error::NoCrossing { .. } | Error::SlidingContact { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    let Some(&(effective_u0_max, _)) = samples.last() else {
        return Err(Error::EmptyRange { u0_max });
    };
    if samples.iter().all(|&(u, d)| d.abs() <= NOISE_FLOOR * u) {
        return Ok(CycleScan {
            cycles: Vec::new(),
            effective_u0_max,
            period_annulus: true,
            grid_points: samples.len(),
        });
    }

    let mut roots = Vec::new();
    for (i, &(u, d)) in samples.iter().enumerate() {
        if d == 0.0 {
            roots.push(displacement_eval(spec, u)?);
        }
        if let Some(&(u_next, d_next)) = samples.get(i + 1) {
            if d * d_next < 0.0 {
                roots.push(polish(spec, u, u_next)?);
            }
        }
    }
    roots.sort_by(|a, b| a.u0.total_cmp(&b.u0));
    roots.dedup_by(|b, a| (b.u0 - a.u0).abs() <= DEDUP_REL * a.u0);
    Ok(CycleScan {
        cycles: roots.iter().map(LimitCycle::from_eval).collect(),
        effective_u0_max,
        period_annulus: false,
        grid_points: samples.len(),
    })
}

fn polish(spec: &SystemSpec, lo: f64, hi: f64) -> Result<DisplacementEval> {
    let root = safeguarded_newton(
        |u| displacement_eval(spec, u).map(|e| (e.delta, e.slope)),
        lo,
        hi,
        NewtonOptions::default(),
    )?;
    let e = displacement_eval(spec, root.x)?;
    let bound = ROOT_TOL * e.slope.abs().max(1.0);
    if e.delta.abs() > bound {
        return Err(Error::NoConvergence {
            iterations: root.iterations,
            residual: e.delta.abs(),
        });
    }
    Ok(e)
}

/// Positive roots of `D1 u + D2 u^2 + D3 u^3 + D4 u^4`, ascending, from the
/// closed-form roots of the cubic cofactor.
pub fn truncation_roots(deltas: [f64; 4]) -> Result<Vec<RealRoot>> {
    let [d1, d2, d3, d4] = deltas;
    if !(d4.abs() >= 1e-300) {
        return Err(Error::DegenerateLeading(d4));
    }
    let cubic = monic_cubic_roots(d3 / d4, d2 / d4, d1 / d4);
    Ok(cubic.roots.into_iter().filter(|r| r.value > 0.0).collect())
}
