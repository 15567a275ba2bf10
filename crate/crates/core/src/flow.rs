//! Exact affine flows of each zone, numeric half-return maps and orbit tracing.
//!
//! Each zone is a linear focus with eigenvalues `gamma +- i`, so
//! `exp(A t) = exp(gamma t) (cos t I + sin t (A - gamma I))` and no ODE
//! stepping is needed anywhere.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result, Side};
use crate::params::SystemSpec;
use crate::rootfind::{safeguarded_newton, NewtonOptions};

/// Samples used to bracket the first return of a half-turn.
const RETURN_SCAN_SAMPLES: usize = 192;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZoneFlow {
    pub gamma: f64,
    /// Focus `(x*, y*)` of the zone.
    pub equilibrium: (f64, f64),
}

impl ZoneFlow {
    pub fn new(gamma: f64, equilibrium: (f64, f64)) -> Self {
        let z = Self { gamma, equilibrium };
        debug_assert!(z.rotation_defect() <= 1e-14 * (1.0 + gamma * gamma));
        z
    }

    pub fn for_side(spec: &SystemSpec, side: Side) -> Self {
        match side {
            Side::L => Self::new(spec.gamma_l, (spec.x_l(), spec.y_l())),
            Side::R => Self::new(spec.gamma_r, (spec.x_r(), spec.y_r())),
        }
    }

    /// Zone matrix `[[2 gamma, -1], [1 + gamma^2, 0]]`.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [
            [2.0 * self.gamma, -1.0],
            [1.0 + self.gamma * self.gamma, 0.0],
        ]
    }

    /// Largest entry of `(A - gamma I)^2 + I`.
    pub fn rotation_defect(&self) -> f64 {
        let g = self.gamma;
        let m = [[g, -1.0], [1.0 + g * g, -g]];
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let v = m[i][0] * m[0][j] + m[i][1] * m[1][j] + if i == j { 1.0 } else { 0.0 };
                worst = worst.max(v.abs());
            }
        }
        worst
    }

    /// `exp(A t)`.
    pub fn propagator(&self, t: f64) -> [[f64; 2]; 2] {
        let g = self.gamma;
        let (s, c) = t.sin_cos();
        let k = (g * t).exp();
        [
            [k * (c + g * s), -k * s],
            [k * (1.0 + g * g) * s, k * (c - g * s)],
        ]
    }

    pub fn velocity(&self, p: (f64, f64)) -> (f64, f64) {
        let dx = p.0 - self.equilibrium.0;
        let dy = p.1 - self.equilibrium.1;
        (
            2.0 * self.gamma * dx - dy,
            (1.0 + self.gamma * self.gamma) * dx,
        )
    }
}

/// `x(t) = exp(A t) (x0 - x*) + x*`, any sign of `t`.
pub fn zone_flow(zone: &ZoneFlow, state: (f64, f64), t: f64) -> (f64, f64) {
    let m = zone.propagator(t);
    let (ex, ey) = zone.equilibrium;
    let dx = state.0 - ex;
    let dy = state.1 - ey;
    (
        m[0][0] * dx + m[0][1] * dy + ex,
        m[1][0] * dx + m[1][1] * dy + ey,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfReturnResult {
    pub y_out: f64,
    /// Elapsed time, always positive (the right map runs backward in time).
    pub flight_time: f64,
    /// `flight_time - pi`.
    pub s_correction: f64,
    /// `d y_out / d y_in`.
    pub dy_out_dy_in: f64,
}

/// First return to `x = 0` of the zone flow started at `(0, y_in)`.
///
/// The left map flows forward through `x <= 0`; the right map flows backward
/// through `x > 0`. Both end on the negative `y` axis below the sliding
/// segment.
pub fn half_return_numeric(spec: &SystemSpec, side: Side, y_in: f64) -> Result<HalfReturnResult> {
    let b_abs = spec.b.abs();
    if !(y_in > b_abs) {
        return Err(Error::SlidingContact {
            side,
            y: y_in,
            b_abs,
        });
    }
    let zone = ZoneFlow::for_side(spec, side);
    let (direction, inside) = match side {
        Side::L => (1.0, -1.0),
        Side::R => (-1.0, 1.0),
    };
    let start = (0.0, y_in);
    // Positive while the arc is inside its zone.
    let depth = |tau: f64| inside * zone_flow(&zone, start, direction * tau).0;

    let t_max = 1.5 * PI;
    let step = t_max / RETURN_SCAN_SAMPLES as f64;
    let mut bracket = None;
    let mut prev = 0.0;
    for j in 1..=RETURN_SCAN_SAMPLES {
        let tau = j as f64 * step;
        let h = depth(tau);
        if h <= 0.0 {
            if j > 1 {
                bracket = Some((prev, tau));
            }
            break;
        }
        prev = tau;
    }
    let (lo, hi) = bracket.ok_or(Error::NoCrossing { side, y_in })?;
    if hi <= 0.5 * PI {
        return Err(Error::NoCrossing { side, y_in });
    }

    let root = safeguarded_newton(
        |tau| {
            let p = zone_flow(&zone, start, direction * tau);
            let v = zone.velocity(p);
            Ok((inside * p.0, inside * direction * v.0))
        },
        lo,
        hi,
        NewtonOptions::default(),
    )?;
    let tau = root.x;
    if !(tau > 0.5 * PI && tau < t_max) {
        return Err(Error::NoCrossing { side, y_in });
    }
    let end = zone_flow(&zone, start, direction * tau);
    let y_out = end.1;
    if !(y_out < -b_abs) {
        return Err(Error::SlidingContact {
            side,
            y: y_out,
            b_abs,
        });
    }
    let m = zone.propagator(direction * tau);
    let v = zone.velocity((0.0, y_out));
    let dy_out_dy_in = m[1][1] - v.1 * m[0][1] / v.0;
    Ok(HalfReturnResult {
        y_out,
        flight_time: tau,
        s_correction: tau - PI,
        dy_out_dy_in,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisplacementEval {
    pub u0: f64,
    pub delta: f64,
    /// `d Delta / d u0`.
    pub slope: f64,
    /// `L'(u0)` and `R'(u0)`.
    pub l_prime: f64,
    pub r_prime: f64,
    pub left: HalfReturnResult,
    pub right: HalfReturnResult,
}

pub fn displacement_eval(spec: &SystemSpec, u0: f64) -> Result<DisplacementEval> {
    if !(u0 > 0.0 && u0.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "u0 must be positive, got {u0}"
        )));
    }
    let y_in = 1.0 / u0;
    let left = half_return_numeric(spec, Side::L, y_in)?;
    let right = half_return_numeric(spec, Side::R, y_in)?;
    // u_out = 1 / y_out(1 / u0)  =>  du_out/du0 = y'(y_in) y_in^2 / y_out^2
    let chain = |r: &HalfReturnResult| r.dy_out_dy_in * (y_in / r.y_out).powi(2);
    let l_prime = chain(&left);
    let r_prime = chain(&right);
    Ok(DisplacementEval {
        u0,
        delta: 1.0 / left.y_out - 1.0 / right.y_out,
        slope: l_prime - r_prime,
        l_prime,
        r_prime,
        left,
        right,
    })
}

/// `Delta(u0) = 1/y1 - 1/y2` from the exact half-return maps.
pub fn displacement_numeric(spec: &SystemSpec, u0: f64) -> Result<f64> {
    displacement_eval(spec, u0).map(|d| d.delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceEvent {
    Start,
    Sample,
    Crossing,
    Sliding,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub event: TraceEvent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceStop {
    /// The orbit reached the sliding segment.
    SlidingContact,
    /// No return to the switching line within the search window.
    NoReturn,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitTrace {
    pub points: Vec<OrbitPoint>,
    /// Indices into `points` of the switching-line crossings.
    pub crossings: Vec<usize>,
    pub stopped: Option<TraceStop>,
}

impl OrbitTrace {
    pub fn last(&self) -> Option<&OrbitPoint> {
        self.points.last()
    }

    pub fn crossing_points(&self) -> impl Iterator<Item = &OrbitPoint> {
        self.crossings.iter().map(|&i| &self.points[i])
    }
}

/// Longest arc searched for a return before reporting [`TraceStop::NoReturn`].
const TRACE_ARC_LIMIT: f64 = 4.0 * PI;
const TRACE_SCAN_STEP: f64 = PI / 96.0;

fn zone_at(spec: &SystemSpec, p: (f64, f64)) -> Option<Side> {
    let b_abs = spec.b.abs();
    if p.0 < 0.0 {
        Some(Side::L)
    } else if p.0 > 0.0 {
        Some(Side::R)
    } else if p.1 > b_abs {
        Some(Side::L)
    } else if p.1 < -b_abs {
        Some(Side::R)
    } else {
        None
    }
}

/// Samples a crossing orbit for `turns` full turns (two half-turns each)
/// using the exact zone flows. Stops early, with a flag, if the orbit reaches
/// the sliding segment or never returns to the switching line.
pub fn trace_orbit(
    spec: &SystemSpec,
    start: (f64, f64),
    turns: usize,
    samples_per_turn: usize,
) -> OrbitTrace {
    let per_arc = (samples_per_turn / 2).max(2);
    let mut points = vec![OrbitPoint {
        t: 0.0,
        x: start.0,
        y: start.1,
        event: TraceEvent::Start,
    }];
    let mut crossings = Vec::new();
    let mut t0 = 0.0;
    let mut p = start;
    let b_abs = spec.b.abs();

    for _ in 0..2 * turns {
        let Some(side) = zone_at(spec, p) else {
            points.last_mut().unwrap().event = TraceEvent::Sliding;
            return OrbitTrace {
                points,
                crossings,
                stopped: Some(TraceStop::SlidingContact),
            };
        };
        let zone = ZoneFlow::for_side(spec, side);
        let inside = if side == Side::L { -1.0 } else { 1.0 };
        let from = p;
        let depth = |tau: f64| inside * zone_flow(&zone, from, tau).0;

        let mut bracket = None;
        let mut prev = 0.0;
        let mut tau = TRACE_SCAN_STEP;
        while tau <= TRACE_ARC_LIMIT {
            if depth(tau) <= 0.0 {
                bracket = Some((prev, tau));
                break;
            }
            prev = tau;
            tau += TRACE_SCAN_STEP;
        }
        let hit = bracket.and_then(|(lo, hi)| {
            let lo = if lo == 0.0 && from.0 == 0.0 {
                hi * 1e-9
            } else {
                lo
            };
            safeguarded_newton(
                |tau| {
                    let q = zone_flow(&zone, from, tau);
                    Ok((inside * q.0, inside * zone.velocity(q).0))
                },
                lo,
                hi,
                NewtonOptions::default(),
            )
            .ok()
        });
        let arc_end = hit.map_or(TRACE_ARC_LIMIT, |r| r.x);
        for k in 1..per_arc {
            let tau = arc_end * k as f64 / per_arc as f64;
            let q = zone_flow(&zone, from, tau);
            points.push(OrbitPoint {
                t: t0 + tau,
                x: q.0,
                y: q.1,
                event: TraceEvent::Sample,
            });
        }
        let end = zone_flow(&zone, from, arc_end);
        t0 += arc_end;
        let Some(_) = hit else {
            points.push(OrbitPoint {
                t: t0,
                x: end.0,
                y: end.1,
                event: TraceEvent::Sample,
            });
            return OrbitTrace {
                points,
                crossings,
                stopped: Some(TraceStop::NoReturn),
            };
        };
        p = (0.0, end.1);
        let crossing_ok = match side {
            Side::L => p.1 < -b_abs,
            Side::R => p.1 > b_abs,
        };
        crossings.push(points.len());
        points.push(OrbitPoint {
            t: t0,
            x: 0.0,
            y: p.1,
            event: if crossing_ok {
                TraceEvent::Crossing
            } else {
                TraceEvent::Sliding
            },
        });
        if !crossing_ok {
            return OrbitTrace {
                points,
                crossings,
                stopped: Some(TraceStop::SlidingContact),
            };
        }
    }
    OrbitTrace {
        points,
        crossings,
        stopped: None,
    }
}
