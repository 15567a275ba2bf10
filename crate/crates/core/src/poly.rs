//! Real roots of monic cubics in closed form.

use std::f64::consts::PI;

use serde::Serialize;

/// Scaled discriminant / depressed coefficients below this are treated as zero.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: u8,
}

/// Shape of the root set of a monic cubic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CubicShape {
    ThreeSimple,
    OneReal,
    DoubleRoot,
    TripleRoot,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubicRoots {
    /// Ascending.
    pub roots: Vec<RealRoot>,
    pub shape: CubicShape,
}

fn horner(a: f64, b: f64, c: f64, u: f64) -> (f64, f64) {
    (((u + a) * u + b) * u + c, (3.0 * u + 2.0 * a) * u + b)
}

fn polish(a: f64, b: f64, c: f64, mut u: f64) -> f64 {
    let (mut f, _) = horner(a, b, c, u);
    for _ in 0..8 {
        let (_, df) = horner(a, b, c, u);
        if df == 0.0 || f == 0.0 {
            break;
        }
        let next = u - f / df;
        let (fn_, _) = horner(a, b, c, next);
        if fn_.abs() >= f.abs() {
            break;
        }
        u = next;
        f = fn_;
    }
    u
}

/// Real roots of `u^3 + a u^2 + b u + c`.
///
/// The variable is rescaled so that the coefficients are `O(1)`, the cubic
/// is depressed, and Cardano's formula (one real root) or the trigonometric
/// form (three real roots) is applied. Simple roots are polished by Newton.
pub fn monic_cubic_roots(a: f64, b: f64, c: f64) -> CubicRoots {
    let s = a.abs().max(b.abs().sqrt()).max(c.abs().cbrt());
    if s == 0.0 {
        return CubicRoots {
            roots: vec![RealRoot {
                value: 0.0,
                multiplicity: 3,
            }],
            shape: CubicShape::TripleRoot,
        };
    }
    let (sa, sb, sc) = (a / s, b / (s * s), c / (s * s * s));
    let shift = sa / 3.0;
    let p = sb - sa * sa / 3.0;
    let q = 2.0 * sa.powi(3) / 27.0 - sa * sb / 3.0 + sc;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);

    let unscale = |w: f64| s * (w - shift);
    let mut out: Vec<RealRoot>;
    let shape;
    if p.abs() <= DEGENERACY_TOL && q.abs() <= DEGENERACY_TOL {
        shape = CubicShape::TripleRoot;
        out = vec![RealRoot {
            value: unscale(0.0),
            multiplicity: 3,
        }];
    } else if disc.abs() <= DEGENERACY_TOL {
        shape = CubicShape::DoubleRoot;
        let simple = unscale(3.0 * q / p);
        let double = unscale(-1.5 * q / p);
        out = vec![
            RealRoot {
                value: polish(a, b, c, simple),
                multiplicity: 1,
            },
            RealRoot {
                value: double,
                multiplicity: 2,
            },
        ];
    } else if disc > 0.0 {
        shape = CubicShape::OneReal;
        let r = disc.sqrt();
        let w = (-q / 2.0 + r).cbrt() + (-q / 2.0 - r).cbrt();
        out = vec![RealRoot {
            value: polish(a, b, c, unscale(w)),
            multiplicity: 1,
        }];
    } else {
        shape = CubicShape::ThreeSimple;
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = ((3.0 * q) / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        out = (0..3)
            .map(|k| {
                let w = m * (theta - 2.0 * PI * k as f64 / 3.0).cos();
                RealRoot {
                    value: polish(a, b, c, unscale(w)),
                    multiplicity: 1,
                }
            })
            .collect();
    }
    out.sort_by(|x, y| x.value.total_cmp(&y.value));
    CubicRoots { roots: out, shape }
}

/// Scale-free discriminant of `u^3 + a u^2 + b u + c`, the standard
/// `18abc - 4a^3 c + a^2 b^2 - 4b^3 - 27c^2`.
pub fn cubic_discriminant(a: f64, b: f64, c: f64) -> f64 {
    18.0 * a * b * c - 4.0 * a.powi(3) * c + a * a * b * b - 4.0 * b.powi(3) - 27.0 * c * c
}
