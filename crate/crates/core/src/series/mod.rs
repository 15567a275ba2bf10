//! Taylor coefficients of the half-return maps near infinity.
//!
//! For the left zone the closing condition, written in `u0 = 1/y0`,
//! `u1 = 1/y1` and the time correction `s = tau - pi`, reads
//!
//! ```text
//!   e [u0 + b u0 u1, alpha u0]^T + diag(u1, 1) exp(A s) [1 + b u0, alpha u0]^T = 0
//! ```
//!
//! with `e = exp(-gamma pi)`. Since `(A - gamma I)^2 = -I` the exponential is
//! `exp(gamma s) (cos s I + sin s (A - gamma I))`, so both components are
//! compositions of scalar series. At order `k` the unknowns `L_k`, `beta_k`
//! enter linearly with the constant Jacobian `diag(1, 1 + gamma^2)`, and the
//! second component does not involve `u1` at all.
//!
//! The right map is the left map of the mirrored system
//! `(x, t, gamma, alpha, b) -> (-x, -t, -gamma_R, -alpha_R, -b)`, which is
//! exactly the backward-time right flow.

mod closed_form;
mod power;

pub use closed_form::{closed_form_coeffs, ClosedFormCoeffs};

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result, Side};
use crate::params::SystemSpec;
use power::PowerSeries;

pub const DEFAULT_ORDER_CAP: usize = 32;

/// Series with zero constant term: `coeffs[i]` multiplies `u^(i+1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct TruncatedSeries {
    coeffs: Vec<f64>,
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::ZeroOrder);
        }
        Ok(Self { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of `u^i`, `1 <= i <= order`.
    pub fn coeff(&self, i: usize) -> f64 {
        assert!(
            i >= 1 && i <= self.order(),
            "index {i} outside 1..={}",
            self.order()
        );
        self.coeffs[i - 1]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| (acc + c) * u)
    }

    pub fn eval_derivative(&self, u: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (i, c)| acc * u + (i + 1) as f64 * c)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self {
            coeffs: self.coeffs[..order.min(self.order())].to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfReturnSeries {
    pub side: Side,
    /// `L_i` or `R_i`.
    pub u_series: TruncatedSeries,
    /// Flight-time correction `tau - pi` as a series in `u0`.
    pub time_series: TruncatedSeries,
    /// `e_L^- = exp(-gamma_L pi)` or `e_R^+ = exp(gamma_R pi)`.
    pub exp_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisplacementSeries {
    pub order: usize,
    pub deltas: Vec<f64>,
}

impl DisplacementSeries {
    pub fn eval(&self, u: f64) -> f64 {
        self.deltas.iter().rev().fold(0.0, |acc, c| (acc + c) * u)
    }

    /// Index (1-based) of the first coefficient with `|Delta_i| > tol`.
    pub fn first_nonvanishing(&self, tol: f64) -> Option<usize> {
        self.deltas
            .iter()
            .position(|d| d.abs() > tol)
            .map(|i| i + 1)
    }
}

/// Left-type closing problem for one zone: the left zone itself or the mirrored right zone.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ClosingKernel {
    gamma: f64,
    alpha: f64,
    b: f64,
}

impl ClosingKernel {
    pub fn for_side(spec: &SystemSpec, side: Side) -> Self {
        match side {
            Side::L => Self {
                gamma: spec.gamma_l,
                alpha: spec.alpha_l,
                b: spec.b,
            },
            Side::R => Self {
                gamma: -spec.gamma_r,
                alpha: -spec.alpha_r,
                b: -spec.b,
            },
        }
    }

    fn e(&self) -> f64 {
        (-self.gamma * std::f64::consts::PI).exp()
    }

    /// Both components of the desingularized closing equation.
    fn residual(&self, u1: &PowerSeries, s: &PowerSeries) -> (PowerSeries, PowerSeries) {
        let n = u1.order().min(s.order());
        let g1 = 1.0 + self.gamma * self.gamma;
        let u = PowerSeries::variable(n);
        let one = PowerSeries::constant(1.0, n);

        let v1 = &one + &u.scale(self.b);
        let v2 = u.scale(self.alpha);
        let growth = s.scale(self.gamma).exp();
        let (sin_s, cos_s) = s.sin_cos();

        let rot1 = &v1.scale(self.gamma) - &v2;
        let rot2 = &v1.scale(g1) - &v2.scale(self.gamma);
        let ev1 = &growth * &(&(&cos_s * &v1) + &(&sin_s * &rot1));
        let ev2 = &growth * &(&(&cos_s * &v2) + &(&sin_s * &rot2));

        let e = self.e();
        let u_u1 = &u * u1;
        let f1 = &(&u + &u_u1.scale(self.b)).scale(e) + &(u1 * &ev1);
        let f2 = &u.scale(e * self.alpha) + &ev2;
        (f1, f2)
    }

    /// Returns `(u-series, time-series)` coefficients `1..=order`.
    fn solve(&self, order: usize) -> (Vec<f64>, Vec<f64>) {
        let g1 = 1.0 + self.gamma * self.gamma;
        let mut l = vec![0.0; order];
        let mut beta = vec![0.0; order];
        for k in 1..=order {
            // beta_k from the second component; it only sees the time series.
            let s = PowerSeries::from_tail(&beta[..k], k);
            let u1 = PowerSeries::from_tail(&l[..k], k);
            let (_, f2) = self.residual(&u1, &s);
            beta[k - 1] = -f2.coeff(k) / g1;

            let s = PowerSeries::from_tail(&beta[..k], k);
            let (f1, _) = self.residual(&u1, &s);
            l[k - 1] = -f1.coeff(k);
        }
        (l, beta)
    }
}

fn check_order(order: usize, cap: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::ZeroOrder);
    }
    if order > cap {
        return Err(Error::OrderTooLarge {
            requested: order,
            cap,
        });
    }
    Ok(())
}

pub fn half_return_series(spec: &SystemSpec, side: Side, order: usize) -> Result<HalfReturnSeries> {
    half_return_series_capped(spec, side, order, DEFAULT_ORDER_CAP)
}

pub fn half_return_series_capped(
    spec: &SystemSpec,
    side: Side,
    order: usize,
    cap: usize,
) -> Result<HalfReturnSeries> {
    check_order(order, cap)?;
    let kernel = ClosingKernel::for_side(spec, side);
    let (l, beta) = kernel.solve(order);
    Ok(HalfReturnSeries {
        side,
        u_series: TruncatedSeries { coeffs: l },
        time_series: TruncatedSeries { coeffs: beta },
        exp_factor: kernel.e(),
    })
}

/// Per-order residual `max(|F1_k|, |F2_k|)`, `k = 1..=order`, of the closing
/// equation after substituting the given half-return series.
pub fn closing_residual(spec: &SystemSpec, series: &HalfReturnSeries) -> Vec<f64> {
    let kernel = ClosingKernel::for_side(spec, series.side);
    let n = series.u_series.order();
    let u1 = PowerSeries::from_tail(series.u_series.coeffs(), n);
    let s = PowerSeries::from_tail(series.time_series.coeffs(), n);
    let (f1, f2) = kernel.residual(&u1, &s);
    (1..=n)
        .map(|k| f1.coeff(k).abs().max(f2.coeff(k).abs()))
        .collect()
}

pub fn displacement_from_halves(
    left: &HalfReturnSeries,
    right: &HalfReturnSeries,
) -> DisplacementSeries {
    let deltas: Vec<f64> = left
        .u_series
        .coeffs()
        .iter()
        .zip(right.u_series.coeffs())
        .map(|(l, r)| l - r)
        .collect();
    DisplacementSeries {
        order: deltas.len(),
        deltas,
    }
}

pub fn displacement_series(spec: &SystemSpec, order: usize) -> Result<DisplacementSeries> {
    let left = half_return_series(spec, Side::L, order)?;
    let right = half_return_series(spec, Side::R, order)?;
    let mut d = displacement_from_halves(&left, &right);
    // e_R - e_L without cancellation: near a weak focus the roots of the
    // truncation are very sensitive to Delta_1.
    d.deltas[0] = spec.e_l_minus() * ((spec.gamma_l + spec.gamma_r) * PI).exp_m1();
    Ok(d)
}
