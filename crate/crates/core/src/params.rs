//! Parametrizations of the two-zone family and the maps between them.
//!
//! - [`LienardSpec`]: traces, determinants and offsets per zone.
//! - [`SystemSpec`]: the reduced five-parameter canonical form.
//! - [`EquilibriumSpec`]: focus positions `(x_L, y_L)`, `(x_R, y_R)` plus `b`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Side};

/// Tolerance on the sliding-centering condition before a `y` translation is applied.
pub const CENTERING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LienardSpec {
    #[serde(rename = "T_L")]
    pub t_l: f64,
    #[serde(rename = "D_L")]
    pub d_l: f64,
    #[serde(rename = "a_L")]
    pub a_l: f64,
    #[serde(rename = "T_R")]
    pub t_r: f64,
    #[serde(rename = "D_R")]
    pub d_r: f64,
    #[serde(rename = "a_R")]
    pub a_r: f64,
    pub b: f64,
}

/// Canonical form: focus eigenvalues `gamma +- i` in both zones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    #[serde(rename = "gamma_L")]
    pub gamma_l: f64,
    #[serde(rename = "gamma_R")]
    pub gamma_r: f64,
    #[serde(rename = "alpha_L")]
    pub alpha_l: f64,
    #[serde(rename = "alpha_R")]
    pub alpha_r: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSpec {
    #[serde(rename = "gamma_L")]
    pub gamma_l: f64,
    #[serde(rename = "gamma_R")]
    pub gamma_r: f64,
    #[serde(rename = "x_L")]
    pub x_l: f64,
    #[serde(rename = "x_R")]
    pub x_r: f64,
    #[serde(rename = "y_L")]
    pub y_l: f64,
    #[serde(rename = "y_R")]
    pub y_r: f64,
    pub b: f64,
}

/// Result of [`from_equilibrium`]: the canonical spec and the `y` translation
/// that was needed to put the sliding segment symmetric about the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Recentered {
    pub spec: SystemSpec,
    pub shift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    /// `(x, y, t) -> (-x, y, -t)`
    XFlip,
    /// `(x, y, t) -> (x, -y, -t)`
    YFlip,
    /// `(x, y, t) -> (-x, -y, t)`
    Both,
}

impl SystemSpec {
    pub fn new(gamma_l: f64, gamma_r: f64, alpha_l: f64, alpha_r: f64, b: f64) -> Self {
        Self {
            gamma_l,
            gamma_r,
            alpha_l,
            alpha_r,
            b,
        }
    }

    /// Builds the canonical spec from focus abscissas (the `x_L, x_R, b` form).
    pub fn from_abscissas(gamma_l: f64, gamma_r: f64, x_l: f64, x_r: f64, b: f64) -> Self {
        Self {
            gamma_l,
            gamma_r,
            alpha_l: (1.0 + gamma_l * gamma_l) * x_l,
            alpha_r: (1.0 + gamma_r * gamma_r) * x_r,
            b,
        }
    }

    pub fn is_finite(&self) -> bool {
        [
            self.gamma_l,
            self.gamma_r,
            self.alpha_l,
            self.alpha_r,
            self.b,
        ]
        .iter()
        .all(|v| v.is_finite())
    }

    pub fn x_l(&self) -> f64 {
        self.alpha_l / (1.0 + self.gamma_l * self.gamma_l)
    }

    pub fn x_r(&self) -> f64 {
        self.alpha_r / (1.0 + self.gamma_r * self.gamma_r)
    }

    pub fn y_l(&self) -> f64 {
        2.0 * self.gamma_l * self.x_l() - self.b
    }

    pub fn y_r(&self) -> f64 {
        2.0 * self.gamma_r * self.x_r() + self.b
    }

    /// `e^{-gamma_L pi}`
    pub fn e_l_minus(&self) -> f64 {
        (-self.gamma_l * PI).exp()
    }

    /// `e^{gamma_R pi}`
    pub fn e_r_plus(&self) -> f64 {
        (self.gamma_r * PI).exp()
    }

    pub fn gamma(&self, side: Side) -> f64 {
        match side {
            Side::L => self.gamma_l,
            Side::R => self.gamma_r,
        }
    }

    /// Liénard form with the given positive frequencies (`omega = 1` keeps time unscaled).
    pub fn to_lienard(&self, omega_l: f64, omega_r: f64) -> LienardSpec {
        LienardSpec {
            t_l: 2.0 * self.gamma_l * omega_l,
            d_l: omega_l * omega_l * (1.0 + self.gamma_l * self.gamma_l),
            a_l: self.alpha_l * omega_l,
            t_r: 2.0 * self.gamma_r * omega_r,
            d_r: omega_r * omega_r * (1.0 + self.gamma_r * self.gamma_r),
            a_r: self.alpha_r * omega_r,
            b: self.b,
        }
    }
}

impl EquilibriumSpec {
    /// Focus abscissas plus `b`; ordinates follow from the centering condition.
    pub fn from_abscissas(gamma_l: f64, gamma_r: f64, x_l: f64, x_r: f64, b: f64) -> Self {
        Self {
            gamma_l,
            gamma_r,
            x_l,
            x_r,
            y_l: 2.0 * gamma_l * x_l - b,
            y_r: 2.0 * gamma_r * x_r + b,
            b,
        }
    }

    /// The two values that must both equal `b`: `2 gamma_L x_L - y_L` and `y_R - 2 gamma_R x_R`.
    pub fn centering_pair(&self) -> (f64, f64) {
        (
            2.0 * self.gamma_l * self.x_l - self.y_l,
            self.y_r - 2.0 * self.gamma_r * self.x_r,
        )
    }

    pub fn is_centered(&self, tol: f64) -> bool {
        let (p, q) = self.centering_pair();
        (p - self.b).abs() <= tol && (q - self.b).abs() <= tol
    }
}

/// Removes the time and abscissa scaling of each zone.
pub fn canonicalize(spec: &LienardSpec) -> Result<SystemSpec> {
    let zone = |t: f64, d: f64, a: f64, side: Side| -> Result<(f64, f64)> {
        let omega_sq = d - 0.25 * t * t;
        if !(omega_sq > 0.0) {
            return Err(Error::NonFocusZone(side));
        }
        let omega = omega_sq.sqrt();
        Ok((0.5 * t / omega, a / omega))
    };
    let (gamma_l, alpha_l) = zone(spec.t_l, spec.d_l, spec.a_l, Side::L)?;
    let (gamma_r, alpha_r) = zone(spec.t_r, spec.d_r, spec.a_r, Side::R)?;
    Ok(SystemSpec::new(gamma_l, gamma_r, alpha_l, alpha_r, spec.b))
}

pub fn to_equilibrium(spec: &SystemSpec) -> EquilibriumSpec {
    EquilibriumSpec {
        gamma_l: spec.gamma_l,
        gamma_r: spec.gamma_r,
        x_l: spec.x_l(),
        x_r: spec.x_r(),
        y_l: spec.y_l(),
        y_r: spec.y_r(),
        b: spec.b,
    }
}

/// Inverse of [`to_equilibrium`]. Inputs whose ordinates are not centered on
/// the sliding segment are translated in `y` first; the translation is
/// returned as `shift` (it is `0` when the input is centered within
/// [`CENTERING_TOL`]).
pub fn from_equilibrium(spec: &EquilibriumSpec) -> Recentered {
    let (p, q) = spec.centering_pair();
    // Adding s to both ordinates moves p by -s and q by +s.
    let (b, shift) = if spec.is_centered(CENTERING_TOL) {
        (spec.b, 0.0)
    } else {
        (0.5 * (p + q), 0.5 * (q - p))
    };
    Recentered {
        spec: SystemSpec::from_abscissas(spec.gamma_l, spec.gamma_r, spec.x_l, spec.x_r, b),
        shift,
    }
}

/// Continuous across `x = 0` iff `b = 0` and `alpha_L = alpha_R` (exact comparison).
pub fn is_continuous(spec: &SystemSpec) -> bool {
    spec.b == 0.0 && spec.alpha_l == spec.alpha_r
}

pub fn apply_symmetry(spec: &EquilibriumSpec, which: Symmetry) -> EquilibriumSpec {
    let (gamma_l, x_l, b, gamma_r, x_r) = match which {
        Symmetry::XFlip => (-spec.gamma_r, -spec.x_r, -spec.b, -spec.gamma_l, -spec.x_l),
        Symmetry::YFlip => (-spec.gamma_l, spec.x_l, -spec.b, -spec.gamma_r, spec.x_r),
        Symmetry::Both => (spec.gamma_r, -spec.x_r, spec.b, spec.gamma_l, -spec.x_l),
    };
    EquilibriumSpec::from_abscissas(gamma_l, gamma_r, x_l, x_r, b)
}
