//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use pwl_infinity::flow::displacement_eval;
use pwl_infinity::SystemSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on `[lo, hi]` with a random sign.
pub fn signed(r: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    let m = r.gen_range(lo..=hi);
    if r.gen_bool(0.5) {
        m
    } else {
        -m
    }
}

/// Worked example: third-order weak focus.
pub fn critical() -> SystemSpec {
    SystemSpec::from_abscissas(-0.125, 0.125, 1.0, 1.0, -0.25)
}

/// Worked example: perturbation with three big-amplitude cycles.
pub fn perturbed() -> SystemSpec {
    SystemSpec::from_abscissas(
        -0.125,
        1638355.0 / 13106841.0,
        1.0,
        552751.0 / 556327.0,
        -260534.0 / 1045519.0,
    )
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Dormand-Prince 5(4) with adaptive steps for `z' = f(z)` on `[0, t_end]`.
pub fn rk45<F>(f: F, z0: (f64, f64), t_end: f64, rtol: f64) -> (f64, f64)
where
    F: Fn((f64, f64)) -> (f64, f64),
{
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let mut t = 0.0;
    let mut z = z0;
    let mut h = 1e-3;
    while t < t_end {
        if t + h > t_end {
            h = t_end - t;
        }
        let mut k = [(0.0, 0.0); 7];
        for i in 0..7 {
            let mut s = z;
            for j in 0..i {
                s.0 += h * A[i][j] * k[j].0;
                s.1 += h * A[i][j] * k[j].1;
            }
            k[i] = f(s);
        }
        let mut z5 = z;
        let mut z4 = z;
        for i in 0..7 {
            z5.0 += h * B5[i] * k[i].0;
            z5.1 += h * B5[i] * k[i].1;
            z4.0 += h * B4[i] * k[i].0;
            z4.1 += h * B4[i] * k[i].1;
        }
        let scale = 1.0 + z.0.abs().max(z.1.abs());
        let err = (z5.0 - z4.0).abs().max((z5.1 - z4.1).abs()) / (rtol * scale);
        if err <= 1.0 {
            t += h;
            z = z5;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    z
}

/// Sign changes of `displacement_numeric` on a log grid over `[1e-6 u0_max, u0_max]`,
/// stopping where crossing fails.
pub fn dense_sign_changes(spec: &SystemSpec, u0_max: f64, n: usize) -> usize {
    let lo = (1e-6 * u0_max).ln();
    let hi = u0_max.ln();
    let mut prev: Option<f64> = None;
    let mut count = 0;
    for i in 0..n {
        let u = (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp();
        let Ok(e) = displacement_eval(spec, u) else {
            break;
        };
        if let Some(p) = prev {
            if p * e.delta < 0.0 {
                count += 1;
            }
        }
        if e.delta != 0.0 {
            prev = Some(e.delta);
        }
    }
    count
}

/// Positive roots of `u^3 + d3 u^2 + d2 u + d1` by sign changes over a
/// partition of `(0, 10]` (or the Cauchy bound, if larger) refined at the
/// cubic's critical points, between which the cubic is monotone.
pub fn brute_force_positive_roots(d1: f64, d2: f64, d3: f64) -> usize {
    let f = |u: f64| ((u + d3) * u + d2) * u + d1;
    let bound = (1.0 + d1.abs().max(d2.abs()).max(d3.abs())).max(10.0);
    let mut pts: Vec<f64> = (1..=400).map(|i| bound * i as f64 / 400.0).collect();
    // f'(u) = 3u^2 + 2 d3 u + d2
    let disc = d3 * d3 - 3.0 * d2;
    if disc >= 0.0 {
        for c in [(-d3 - disc.sqrt()) / 3.0, (-d3 + disc.sqrt()) / 3.0] {
            if c > 0.0 && c < bound {
                pts.push(c);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    let mut prev = d1;
    let mut count = 0;
    for u in pts {
        let v = f(u);
        if v != 0.0 {
            if prev * v < 0.0 {
                count += 1;
            }
            prev = v;
        }
    }
    count
}
