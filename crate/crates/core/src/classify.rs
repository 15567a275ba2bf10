//! Classification of the periodic orbit at infinity.
//!
//! The verdict is taken from exact parameter conditions rather than from
//! thresholded `Delta_i` values. Each quantity is compared with `tol`; values
//! in `(tol, 10 tol]` are refused with [`Error::AmbiguousNearBoundary`].

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::SystemSpec;

pub const DEFAULT_TOL: f64 = 1e-11;
const AMBIGUITY_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InfinityKind {
    Hyperbolic,
    WeakFocus,
    Center,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    NonIsolated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CenterType {
    /// Two linear centers, reversible with respect to `y = 0`.
    A,
    /// Boundary focus at the origin from both sides.
    B,
    /// Foci at `x_L = -x_R != 0`.
    C,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfinityClass {
    pub kind: InfinityKind,
    pub stability: Stability,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center_type: Option<CenterType>,
    /// For centers: whether at least one focus is real (`x_L < 0` or `x_R > 0`).
    /// A hint about the extent of the period annulus, not a certificate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub real_equilibria: Option<bool>,
    pub witness: BTreeMap<&'static str, f64>,
}

impl InfinityClass {
    /// Index of the first non-vanishing displacement coefficient implied by the verdict.
    pub fn first_nonzero_delta(&self) -> Option<usize> {
        match self.kind {
            InfinityKind::Hyperbolic => Some(1),
            InfinityKind::WeakFocus => self.order.map(|o| o as usize + 1),
            InfinityKind::Center => None,
        }
    }

    /// Sign of `Delta(u0)` for small `u0 > 0`: positive means infinity attracts.
    pub fn delta_sign(&self) -> Option<f64> {
        match self.stability {
            Stability::Stable => Some(1.0),
            Stability::Unstable => Some(-1.0),
            Stability::NonIsolated => None,
        }
    }
}

struct Judge {
    tol: f64,
    witness: BTreeMap<&'static str, f64>,
}

impl Judge {
    /// `Ok(true)` if clearly non-zero, `Ok(false)` if zero within `tol`.
    fn nonzero(&mut self, name: &'static str, value: f64) -> Result<bool> {
        self.witness.insert(name, value);
        let band = AMBIGUITY_FACTOR * self.tol;
        let a = value.abs();
        if a <= self.tol {
            Ok(false)
        } else if a <= band {
            Err(Error::AmbiguousNearBoundary {
                name,
                value,
                tol: self.tol,
                band,
            })
        } else {
            Ok(true)
        }
    }

    fn verdict(self, kind: InfinityKind, stable: Option<bool>, order: Option<u8>) -> InfinityClass {
        InfinityClass {
            kind,
            stability: match stable {
                Some(true) => Stability::Stable,
                Some(false) => Stability::Unstable,
                None => Stability::NonIsolated,
            },
            order,
            center_type: None,
            real_equilibria: None,
            witness: self.witness,
        }
    }
}

pub fn classify_infinity(spec: &SystemSpec, tol: f64) -> Result<InfinityClass> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut j = Judge {
        tol,
        witness: BTreeMap::new(),
    };
    let (g_l, g_r) = (spec.gamma_l, spec.gamma_r);
    let (x_l, x_r) = (spec.x_l(), spec.x_r());
    let (y_l, y_r) = (spec.y_l(), spec.y_r());

    let g_sum = g_l + g_r;
    if j.nonzero("gamma_L+gamma_R", g_sum)? {
        return Ok(j.verdict(InfinityKind::Hyperbolic, Some(g_sum > 0.0), None));
    }
    let dy = y_r - y_l;
    if j.nonzero("y_R-y_L", dy)? {
        return Ok(j.verdict(InfinityKind::WeakFocus, Some(dy > 0.0), Some(1)));
    }
    let g_l_nz = j.nonzero("gamma_L", g_l)?;
    if g_l_nz {
        let dx2 = x_l * x_l - x_r * x_r;
        if j.nonzero("x_L^2-x_R^2", dx2)? {
            return Ok(j.verdict(InfinityKind::WeakFocus, Some(g_l * dx2 > 0.0), Some(2)));
        }
        let x_l_nz = j.nonzero("x_L", x_l)?;
        let same_x = !j.nonzero("x_L-x_R", x_l - x_r)?;
        let y_zero = !j.nonzero("y_L", y_l)? && !j.nonzero("y_R", y_r)?;
        if same_x && x_l_nz && y_zero {
            j.witness.insert("gamma_L*x_L", g_l * x_l);
            return Ok(j.verdict(InfinityKind::WeakFocus, Some(g_l * x_l < 0.0), Some(3)));
        }
    }

    let opposite_gamma = !j.nonzero("gamma_L+gamma_R", g_sum)?;
    let b_nz = j.nonzero("b", spec.b)?;
    let center = if !g_l_nz && !j.nonzero("gamma_R", g_r)? && !b_nz {
        Some(CenterType::A)
    } else if g_l_nz && opposite_gamma && !b_nz {
        let x_l_nz = j.nonzero("x_L", x_l)?;
        let x_r_nz = j.nonzero("x_R", x_r)?;
        if !x_l_nz && !x_r_nz {
            Some(CenterType::B)
        } else if x_l_nz && !j.nonzero("x_L+x_R", x_l + x_r)? {
            Some(CenterType::C)
        } else {
            None
        }
    } else {
        None
    };
    match center {
        Some(t) => {
            let mut v = j.verdict(InfinityKind::Center, None, None);
            v.center_type = Some(t);
            v.real_equilibria = Some(x_l < 0.0 || x_r > 0.0);
            Ok(v)
        }
        // The conditions above are exhaustive in exact arithmetic; only
        // rounding across the band can land here.
        None => Err(Error::AmbiguousNearBoundary {
            name: "center_conditions",
            value: spec.b,
            tol,
            band: AMBIGUITY_FACTOR * tol,
        }),
    }
}
