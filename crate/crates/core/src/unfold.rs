//! Unfolding of the third-order weak focus at infinity and the geometry of
//! the model quartic `q(u) = d1 u + d2 u^2 + d3 u^3 + u^4`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SystemSpec;
use crate::poly::{cubic_discriminant, monic_cubic_roots, RealRoot};
use crate::series::displacement_series;

/// Largest admissible `|delta_i|` target.
pub const TARGET_BOUND: f64 = 0.1;
/// Newton iterates must stay within this distance of the critical point.
pub const LOCALITY_RADIUS: f64 = 0.5;
pub const MAX_NEWTON_ITERS: usize = 50;
/// Required `max_i |Delta_i - target_i|`, `i <= 3`, at the solution.
pub const UNFOLD_RESIDUAL_TOL: f64 = 1e-12;
/// Boundary varieties of the model map are flagged within this distance.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnfoldingTarget {
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
}

impl UnfoldingTarget {
    pub fn new(delta1: f64, delta2: f64, delta3: f64) -> Self {
        Self {
            delta1,
            delta2,
            delta3,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.delta1, self.delta2, self.delta3]
    }

    fn validate(&self) -> Result<()> {
        for (i, v) in self.as_array().into_iter().enumerate() {
            if !(v.abs() <= TARGET_BOUND) {
                return Err(Error::TargetOutOfRange {
                    index: i + 1,
                    value: v,
                    bound: TARGET_BOUND,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnfoldingResult {
    #[serde(rename = "gamma_L")]
    pub gamma_l: f64,
    #[serde(rename = "x_L")]
    pub x_l: f64,
    #[serde(rename = "gamma_R")]
    pub gamma_r: f64,
    pub b: f64,
    #[serde(rename = "x_R")]
    pub x_r: f64,
    /// `Delta_1..Delta_4` at the solution.
    pub achieved: [f64; 4],
    pub residual: f64,
    pub newton_iters: usize,
}

impl UnfoldingResult {
    pub fn spec(&self) -> SystemSpec {
        SystemSpec::from_abscissas(self.gamma_l, self.gamma_r, self.x_l, self.x_r, self.b)
    }
}

/// `(gamma_R, b, x_R)` at which `(gamma_L, x_L)` is a third-order weak focus.
pub fn critical_point(gamma_l: f64, x_l: f64) -> [f64; 3] {
    [-gamma_l, 2.0 * gamma_l * x_l, x_l]
}

fn leading_deltas(spec: &SystemSpec) -> Result<[f64; 4]> {
    let d = displacement_series(spec, 4)?;
    Ok([d.deltas[0], d.deltas[1], d.deltas[2], d.deltas[3]])
}

/// `d(Delta_1, Delta_2, Delta_3) / d(gamma_R, b, x_R)` from the closed forms
/// of the first three coefficients, with `gamma_L`, `x_L` held fixed.
pub fn unfold_jacobian(spec: &SystemSpec) -> [[f64; 3]; 3] {
    let e_l = spec.e_l_minus();
    let e_r = spec.e_r_plus();
    let g_r = spec.gamma_r;
    let (x_r, y_r) = (spec.x_r(), spec.y_r());
    let y_l = spec.y_l();
    let g1_r = 1.0 + g_r * g_r;
    let de_r = PI * e_r;

    // R_2 = -h y_R and R_3 = -h P with h = e(1 + e).
    let h = e_r * (1.0 + e_r);
    let dh = de_r * (1.0 + 2.0 * e_r);
    let p = g1_r * (e_r - 1.0) / 2.0 * x_r * x_r + (1.0 + e_r) * y_r * y_r;
    // y_R = 2 gamma_R x_R + b
    let dp_dg = g_r * (e_r - 1.0) * x_r * x_r
        + g1_r * de_r / 2.0 * x_r * x_r
        + de_r * y_r * y_r
        + (1.0 + e_r) * 2.0 * y_r * 2.0 * x_r;
    let dp_db = (1.0 + e_r) * 2.0 * y_r;
    let dp_dx = g1_r * (e_r - 1.0) * x_r + (1.0 + e_r) * 2.0 * y_r * 2.0 * g_r;

    let h_l = e_l * (1.0 + e_l);
    [
        [de_r, 0.0, 0.0],
        [dh * y_r + h * 2.0 * x_r, h_l + h, h * 2.0 * g_r],
        [
            dh * p + h * dp_dg,
            2.0 * h_l * (1.0 + e_l) * y_l + h * dp_db,
            h * dp_dx,
        ],
    ]
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn solve3(m: &[[f64; 3]; 3], rhs: [f64; 3]) -> Option<[f64; 3]> {
    let d = det3(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let col = |j: usize| {
        let mut c = *m;
        for i in 0..3 {
            c[i][j] = rhs[i];
        }
        det3(&c) / d
    };
    Some([col(0), col(1), col(2)])
}

/// Solves `(Delta_1, Delta_2, Delta_3)(gamma_R, b, x_R) = target` by Newton's
/// method from the critical point, with `gamma_L` and `x_L` fixed.
pub fn order3_unfold(gamma_l: f64, x_l: f64, target: &UnfoldingTarget) -> Result<UnfoldingResult> {
    if !(gamma_l.abs() > 1e-6) || !(x_l.abs() > 1e-6) || !gamma_l.is_finite() || !x_l.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "gamma_L and x_L must be finite with magnitude above 1e-6, got ({gamma_l}, {x_l})"
        )));
    }
    target.validate()?;
    let t = target.as_array();
    let start = critical_point(gamma_l, x_l);
    let mut z = start;
    let spec_at = |z: [f64; 3]| SystemSpec::from_abscissas(gamma_l, z[0], x_l, z[2], z[1]);

    for iter in 0..=MAX_NEWTON_ITERS {
        let spec = spec_at(z);
        let achieved = leading_deltas(&spec)?;
        let r = [achieved[0] - t[0], achieved[1] - t[1], achieved[2] - t[2]];
        let residual = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if residual <= 1e-16 {
            return Ok(finish(gamma_l, x_l, z, achieved, residual, iter));
        }
        if iter == MAX_NEWTON_ITERS {
            return Err(Error::NoConvergence {
                iterations: iter,
                residual,
            });
        }
        let j = unfold_jacobian(&spec);
        let Some(step) = solve3(&j, r) else {
            return Err(Error::NoConvergence {
                iterations: iter,
                residual,
            });
        };
        let next = [z[0] - step[0], z[1] - step[1], z[2] - step[2]];
        let distance = (0..3)
            .map(|i| (next[i] - start[i]).powi(2))
            .sum::<f64>()
            .sqrt();
        if !(distance <= LOCALITY_RADIUS) {
            return Err(Error::OutsideLocality {
                distance,
                radius: LOCALITY_RADIUS,
            });
        }
        let step_size = (0..3).fold(0.0f64, |m, i| m.max(step[i].abs() / (1.0 + z[i].abs())));
        z = next;
        if step_size <= 4.0 * f64::EPSILON {
            let achieved = leading_deltas(&spec_at(z))?;
            let residual = (0..3).fold(0.0f64, |m, i| m.max((achieved[i] - t[i]).abs()));
            if residual > UNFOLD_RESIDUAL_TOL {
                return Err(Error::NoConvergence {
                    iterations: iter + 1,
                    residual,
                });
            }
            return Ok(finish(gamma_l, x_l, z, achieved, residual, iter + 1));
        }
    }
    unreachable!("the loop returns on its last iteration")
}

fn finish(
    gamma_l: f64,
    x_l: f64,
    z: [f64; 3],
    achieved: [f64; 4],
    residual: f64,
    iters: usize,
) -> UnfoldingResult {
    UnfoldingResult {
        gamma_l,
        x_l,
        gamma_r: z[0],
        b: z[1],
        x_r: z[2],
        achieved,
        residual,
        newton_iters: iters,
    }
}

/// Coordinates of the full parameter vector `(gamma_L, gamma_R, b, x_L, x_R)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Param {
    #[serde(rename = "gamma_L")]
    GammaL,
    #[serde(rename = "gamma_R")]
    GammaR,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "x_L")]
    XL,
    #[serde(rename = "x_R")]
    XR,
}

impl Param {
    pub const ALL: [Param; 5] = [Param::GammaL, Param::GammaR, Param::B, Param::XL, Param::XR];

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Param::GammaL => "gamma_L",
            Param::GammaR => "gamma_R",
            Param::B => "b",
            Param::XL => "x_L",
            Param::XR => "x_R",
        })
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Param::ALL
            .into_iter()
            .find(|p| p.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown parameter `{s}`")))
    }
}

/// A point `(gamma_L, gamma_R, b, x_L, x_R)` in parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterPoint(pub [f64; 5]);

impl ParameterPoint {
    pub fn new(gamma_l: f64, gamma_r: f64, b: f64, x_l: f64, x_r: f64) -> Self {
        Self([gamma_l, gamma_r, b, x_l, x_r])
    }

    pub fn spec(&self) -> SystemSpec {
        let [g_l, g_r, b, x_l, x_r] = self.0;
        SystemSpec::from_abscissas(g_l, g_r, x_l, x_r, b)
    }

    fn shifted(&self, p: Param, h: f64) -> Self {
        let mut v = self.0;
        v[p.index()] += h;
        Self(v)
    }
}

/// `rows[i][j] = d Delta_{i+1} / d directions[j]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaJacobian {
    pub directions: Vec<Param>,
    pub rows: [Vec<f64>; 4],
    /// Largest `|extrapolated - fine|` over all entries.
    pub disagreement: f64,
}

impl DeltaJacobian {
    pub fn entry(&self, delta_index: usize, p: Param) -> Option<f64> {
        let j = self.directions.iter().position(|&d| d == p)?;
        self.rows.get(delta_index.checked_sub(1)?).map(|r| r[j])
    }

    /// Determinant of the square block of rows `Delta_1..Delta_n`, `n = directions.len() <= 4`.
    pub fn determinant(&self) -> Option<f64> {
        let n = self.directions.len();
        if n == 0 || n > 4 {
            return None;
        }
        let mut m: Vec<Vec<f64>> = self.rows[..n].to_vec();
        let mut det = 1.0;
        for c in 0..n {
            let piv = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
            if m[piv][c] == 0.0 {
                return Some(0.0);
            }
            if piv != c {
                m.swap(piv, c);
                det = -det;
            }
            det *= m[c][c];
            for r in c + 1..n {
                let f = m[r][c] / m[c][c];
                for k in c..n {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
        Some(det)
    }
}

/// Central-difference Jacobian of `Delta_1..Delta_4` with one Richardson
/// halving: `(4 D(h/2) - D(h)) / 3`.
pub fn delta_jacobian(
    point: &ParameterPoint,
    directions: &[Param],
    h: f64,
) -> Result<DeltaJacobian> {
    if !(1e-7..=1e-4).contains(&h) {
        return Err(Error::InvalidArgument(format!(
            "step h = {h:e} outside [1e-7, 1e-4]"
        )));
    }
    let central = |p: Param, h: f64| -> Result<[f64; 4]> {
        let plus = leading_deltas(&point.shifted(p, h).spec())?;
        let minus = leading_deltas(&point.shifted(p, -h).spec())?;
        Ok(std::array::from_fn(|i| (plus[i] - minus[i]) / (2.0 * h)))
    };
    let mut rows: [Vec<f64>; 4] = Default::default();
    let mut disagreement = 0.0f64;
    let mut scale = 0.0f64;
    for &p in directions {
        let coarse = central(p, h)?;
        let fine = central(p, 0.5 * h)?;
        for i in 0..4 {
            let rich = (4.0 * fine[i] - coarse[i]) / 3.0;
            disagreement = disagreement.max((rich - fine[i]).abs());
            scale = scale.max(rich.abs());
            rows[i].push(rich);
        }
    }
    if disagreement > 1e-5 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::StepTooSmall { h, disagreement });
    }
    Ok(DeltaJacobian {
        directions: directions.to_vec(),
        rows,
        disagreement,
    })
}

/// Positive roots of the model quartic and the boundary varieties it sits on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionCount {
    /// Positive roots counted with multiplicity.
    pub count: u8,
    pub distinct: u8,
    pub roots: Vec<RealRoot>,
    /// `|delta1| <= BOUNDARY_TOL`: a root passes through `u = 0`.
    pub on_delta1_zero: bool,
    /// The cofactor cubic has a repeated root.
    pub on_discriminant: bool,
    /// `(delta1, delta2) = (delta3^3 / 27, delta3^2 / 3)`: a triple root.
    pub at_cusp: bool,
}

/// Number of positive roots of `d1 u + d2 u^2 + d3 u^3 + u^4`.
pub fn model_region_count(delta: [f64; 3]) -> RegionCount {
    let [d1, d2, d3] = delta;
    let cubic = monic_cubic_roots(d3, d2, d1);
    let roots: Vec<RealRoot> = cubic.roots.into_iter().filter(|r| r.value > 0.0).collect();
    let (c1, c2) = cusp(d3);
    RegionCount {
        count: roots.iter().map(|r| r.multiplicity).sum(),
        distinct: roots.len() as u8,
        on_delta1_zero: d1.abs() <= BOUNDARY_TOL,
        on_discriminant: cubic_discriminant(d3, d2, d1).abs() <= BOUNDARY_TOL,
        at_cusp: (d1 - c1).abs() <= BOUNDARY_TOL && (d2 - c2).abs() <= BOUNDARY_TOL,
        roots,
    }
}

/// `(delta1, delta2)` of the cusp for a given `delta3`.
pub fn cusp(delta3: f64) -> (f64, f64) {
    (delta3.powi(3) / 27.0, delta3 * delta3 / 3.0)
}

/// Point on the discriminant curve whose cofactor cubic has the double root `r`.
pub fn discriminant_point(delta3: f64, r: f64) -> (f64, f64) {
    (
        2.0 * r.powi(3) + delta3 * r * r,
        -3.0 * r * r - 2.0 * delta3 * r,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub delta1_min: f64,
    pub delta1_max: f64,
    pub delta2_min: f64,
    pub delta2_max: f64,
}

impl Window {
    pub fn square(half_width: f64) -> Self {
        Self {
            delta1_min: -half_width,
            delta1_max: half_width,
            delta2_min: -half_width,
            delta2_max: half_width,
        }
    }

    pub fn contains(&self, p: (f64, f64)) -> bool {
        (self.delta1_min..=self.delta1_max).contains(&p.0)
            && (self.delta2_min..=self.delta2_max).contains(&p.1)
    }

    fn is_valid(&self) -> bool {
        self.delta1_min < self.delta1_max && self.delta2_min < self.delta2_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionLabel {
    pub delta1: f64,
    pub delta2: f64,
    pub count: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionMap {
    pub delta3: f64,
    pub window: Window,
    /// Samples of the line `delta1 = 0`.
    pub delta1_zero: Vec<(f64, f64)>,
    /// Samples of the discriminant curve, ordered by the double root.
    pub discriminant: Vec<(f64, f64)>,
    pub cusp: (f64, f64),
    pub cusp_in_window: bool,
    /// Row-major `resolution x resolution` grid, `delta2` outer.
    pub labels: Vec<RegionLabel>,
}

/// Boundary curves and root-count labels of the model map in a window of
/// the `(delta1, delta2)` plane at fixed `delta3`.
pub fn region_boundaries(delta3: f64, window: &Window, resolution: usize) -> Result<RegionMap> {
    if resolution < 16 {
        return Err(Error::InvalidArgument(format!(
            "resolution must be at least 16, got {resolution}"
        )));
    }
    if !window.is_valid() {
        return Err(Error::InvalidArgument(format!("empty window {window:?}")));
    }
    let lerp = |lo: f64, hi: f64, i: usize, n: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;

    let delta1_zero = if window.delta1_min <= 0.0 && window.delta1_max >= 0.0 {
        (0..resolution)
            .map(|i| {
                (
                    0.0,
                    lerp(window.delta2_min, window.delta2_max, i, resolution),
                )
            })
            .collect()
    } else {
        Vec::new()
    };

    // |delta2| grows like 3 r^2, so this range of r covers the window.
    let extent = [
        window.delta1_min,
        window.delta1_max,
        window.delta2_min,
        window.delta2_max,
    ]
    .iter()
    .fold(0.0f64, |m, v| m.max(v.abs()));
    let r_max = delta3.abs() + extent.sqrt() + extent.cbrt() + 1.0;
    let n_curve = 64 * resolution;
    let discriminant = (0..n_curve)
        .map(|i| discriminant_point(delta3, lerp(-r_max, r_max, i, n_curve)))
        .filter(|&p| window.contains(p))
        .collect();

    let mut labels = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        let d2 = lerp(window.delta2_min, window.delta2_max, i, resolution);
        for k in 0..resolution {
            let d1 = lerp(window.delta1_min, window.delta1_max, k, resolution);
            labels.push(RegionLabel {
                delta1: d1,
                delta2: d2,
                count: model_region_count([d1, d2, delta3]).count,
            });
        }
    }
    let cusp = cusp(delta3);
    Ok(RegionMap {
        delta3,
        window: *window,
        delta1_zero,
        discriminant,
        cusp,
        cusp_in_window: window.contains(cusp),
        labels,
    })
}
