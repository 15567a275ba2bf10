//! Printed closed forms for the first four coefficients of each half-return
//! map and the first two flight-time corrections of the left map.
//!
//! Kept deliberately separate from the recurrence in [`super`]: the two are
//! compared against each other in the tests.

use serde::Serialize;

use crate::params::SystemSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormCoeffs {
    #[serde(rename = "L")]
    pub l: [f64; 4],
    #[serde(rename = "R")]
    pub r: [f64; 4],
    pub beta: [f64; 2],
}

impl ClosedFormCoeffs {
    pub fn deltas(&self) -> [f64; 4] {
        std::array::from_fn(|i| self.l[i] - self.r[i])
    }
}

/// Coefficients of one half map as functions of `e` (`e_L^-` or `e_R^+`),
/// `gamma`, and the focus `(x, y)` of that zone.
fn half_map(e: f64, gamma: f64, x: f64, y: f64) -> [f64; 4] {
    let g1 = 1.0 + gamma * gamma;
    let c1 = -e;
    let c2 = -e * (1.0 + e) * y;
    let c3 = -e * (1.0 + e) * (g1 * (e - 1.0) / 2.0 * x * x + (1.0 + e) * y * y);
    let q = g1
        * (2.0 * gamma * (1.0 - e + e * e) / 3.0 * x.powi(3)
            + (e - 1.0) * (2.0 * e + 3.0) / 2.0 * x * x * y)
        + (1.0 + e).powi(2) * y.powi(3);
    let c4 = -e * (1.0 + e) * q;
    [c1, c2, c3, c4]
}

pub fn closed_form_coeffs(spec: &SystemSpec) -> ClosedFormCoeffs {
    let e_l = spec.e_l_minus();
    let e_r = spec.e_r_plus();
    let (x_l, y_l) = (spec.x_l(), spec.y_l());
    let (x_r, y_r) = (spec.x_r(), spec.y_r());

    let beta1 = -(1.0 + e_l) * x_l;
    let beta2 = -spec.b * beta1 - spec.gamma_l * beta1 * beta1;

    ClosedFormCoeffs {
        l: half_map(e_l, spec.gamma_l, x_l, y_l),
        r: half_map(e_r, spec.gamma_r, x_r, y_r),
        beta: [beta1, beta2],
    }
}
