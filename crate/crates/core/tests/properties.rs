mod support;

use std::f64::consts::PI;

use proptest::prelude::*;
use pwl_infinity::classify::DEFAULT_TOL;
use pwl_infinity::series::closing_residual;
use pwl_infinity::unfold::{cusp, discriminant_point, RegionCount, Window};
use pwl_infinity::{
    apply_symmetry, canonicalize, classify_infinity, displacement_series, find_cycles,
    from_equilibrium, half_return_numeric, half_return_series, model_region_count, order3_unfold,
    region_boundaries, to_equilibrium, truncation_roots, zone_flow, EquilibriumSpec, InfinityKind,
    Side, Symmetry, SystemSpec, UnfoldingTarget, ZoneFlow,
};
use rand::Rng;
use support::*;

fn spec_strategy() -> impl Strategy<Value = SystemSpec> {
    (
        -2.0..2.0f64,
        -2.0..2.0f64,
        -5.0..5.0f64,
        -5.0..5.0f64,
        -2.0..2.0f64,
    )
        .prop_map(|(gl, gr, al, ar, b)| SystemSpec::new(gl, gr, al, ar, b))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn same_spec(a: &SystemSpec, b: &SystemSpec, tol: f64) -> bool {
    close(a.gamma_l, b.gamma_l, tol)
        && close(a.gamma_r, b.gamma_r, tol)
        && close(a.alpha_l, b.alpha_l, tol)
        && close(a.alpha_r, b.alpha_r, tol)
        && close(a.b, b.b, tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lienard_round_trip(spec in spec_strategy(), wl in 0.2..3.0f64, wr in 0.2..3.0f64) {
        let back = canonicalize(&spec.to_lienard(wl, wr)).unwrap();
        prop_assert!(same_spec(&back, &spec, 1e-12), "{spec:?} -> {back:?}");
    }

    #[test]
    fn equilibrium_round_trip(spec in spec_strategy()) {
        let r = from_equilibrium(&to_equilibrium(&spec));
        prop_assert_eq!(r.shift, 0.0);
        prop_assert!(same_spec(&r.spec, &spec, 1e-12));
    }

    #[test]
    fn off_center_ordinates_are_recentered(spec in spec_strategy(), s in -3.0..3.0f64) {
        prop_assume!(s.abs() > 1e-6);
        let mut e = to_equilibrium(&spec);
        e.y_l += s;
        e.y_r += s;
        let r = from_equilibrium(&e);
        prop_assert!(close(r.shift, s, 1e-12));
        prop_assert!(same_spec(&r.spec, &spec, 1e-12));
    }

    #[test]
    fn symmetries_are_involutions(spec in spec_strategy()) {
        let e = to_equilibrium(&spec);
        for which in [Symmetry::XFlip, Symmetry::YFlip, Symmetry::Both] {
            let twice = apply_symmetry(&apply_symmetry(&e, which), which);
            let back = from_equilibrium(&twice).spec;
            prop_assert!(same_spec(&back, &spec, 1e-12), "{which:?}");
        }
    }

    /// The right map is the left map of the mirrored system.
    #[test]
    fn right_series_is_left_series_of_x_flip(spec in spec_strategy()) {
        let flipped = from_equilibrium(&apply_symmetry(&to_equilibrium(&spec), Symmetry::XFlip)).spec;
        let r = half_return_series(&spec, Side::R, 8).unwrap();
        let l = half_return_series(&flipped, Side::L, 8).unwrap();
        for (a, b) in r.u_series.coeffs().iter().zip(l.u_series.coeffs()) {
            prop_assert!(close(*a, *b, 1e-10), "R {a:e} vs L {b:e}");
        }
    }

    #[test]
    fn series_satisfy_the_closing_equation(spec in spec_strategy()) {
        for side in [Side::L, Side::R] {
            let s = half_return_series(&spec, side, 8).unwrap();
            let scale = 1.0 + s.u_series.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs()));
            let worst = closing_residual(&spec, &s).into_iter().fold(0.0, f64::max);
            prop_assert!(worst <= 1e-10 * scale, "{side}: residual {worst:e}, scale {scale:e}");
        }
    }

    #[test]
    fn deltas_are_left_minus_right(spec in spec_strategy()) {
        let l = half_return_series(&spec, Side::L, 10).unwrap();
        let r = half_return_series(&spec, Side::R, 10).unwrap();
        let d = displacement_series(&spec, 10).unwrap();
        for i in 0..10 {
            let (li, ri) = (l.u_series.coeffs()[i], r.u_series.coeffs()[i]);
            prop_assert!((d.deltas[i] - (li - ri)).abs() <= 1e-12 * (1.0 + li.abs().max(ri.abs())));
        }
    }

    #[test]
    fn first_delta_sign_follows_damping_sum(spec in spec_strategy()) {
        prop_assume!((spec.gamma_l + spec.gamma_r).abs() > 1e-9);
        let d1 = displacement_series(&spec, 1).unwrap().deltas[0];
        prop_assert_eq!(d1.signum(), (spec.gamma_l + spec.gamma_r).signum());
    }

    /// Linear centers on both sides make the system reversible under `y -> -y`.
    #[test]
    fn reversible_half_map_is_reflection(x_l in -3.0..3.0f64, x_r in -3.0..3.0f64, y in 20.0..1e4f64) {
        let spec = SystemSpec::from_abscissas(0.0, 0.0, x_l, x_r, 0.0);
        for side in [Side::L, Side::R] {
            let h = half_return_numeric(&spec, side, y).unwrap();
            prop_assert!(close(h.y_out, -y, 1e-11), "{side}: {} vs {}", h.y_out, -y);
        }
    }

    #[test]
    fn half_return_lands_on_switching_line(spec in spec_strategy(), y in 50.0..1e3f64) {
        for (side, dir) in [(Side::L, 1.0), (Side::R, -1.0)] {
            // Strong contraction can end on the sliding segment; that is reported, not a landing.
            let Ok(h) = half_return_numeric(&spec, side, y) else { continue };
            let p = zone_flow(&ZoneFlow::for_side(&spec, side), (0.0, y), dir * h.flight_time);
            prop_assert!(p.0.abs() <= 1e-9 * y, "{side}: x = {:e}", p.0);
            prop_assert!(close(p.1, h.y_out, 1e-12));
        }
    }
}

#[test]
fn zone_flow_matches_adaptive_integrator() {
    let mut r = rng(11);
    for _ in 0..100 {
        let zone = ZoneFlow::new(
            r.gen_range(-1.0..=1.0),
            (r.gen_range(-3.0..=3.0), r.gen_range(-3.0..=3.0)),
        );
        let z0 = (r.gen_range(-5.0..=5.0), r.gen_range(-5.0..=5.0));
        for k in 1..=8 {
            let t = 2.0 * PI * k as f64 / 8.0;
            let exact = zone_flow(&zone, z0, t);
            let oracle = rk45(|p| zone.velocity(p), z0, t, 1e-13);
            let scale = 1.0 + exact.0.abs().max(exact.1.abs());
            let dev = (exact.0 - oracle.0).abs().max((exact.1 - oracle.1).abs());
            assert!(
                dev <= 1e-9 * scale,
                "{zone:?} from {z0:?}, t = {t}: deviation {dev:e}"
            );
        }
        let (s, t) = (r.gen_range(-PI..=PI), r.gen_range(-PI..=PI));
        let two_steps = zone_flow(&zone, zone_flow(&zone, z0, s), t);
        let one_step = zone_flow(&zone, z0, s + t);
        assert!(close(two_steps.0, one_step.0, 1e-12) && close(two_steps.1, one_step.1, 1e-12));
    }
}

/// Center families with the parameters that pin each one: perturbing any of
/// them alone leaves every family.
fn center_families(r: &mut impl Rng) -> [(EquilibriumSpec, &'static [usize]); 3] {
    let eta = signed(r, 0.05, 0.6);
    let xi = signed(r, 0.1, 2.0);
    [
        (
            EquilibriumSpec::from_abscissas(
                0.0,
                0.0,
                signed(r, 0.0, 3.0),
                signed(r, 0.0, 3.0),
                0.0,
            ),
            &[0, 1, 4],
        ),
        (
            EquilibriumSpec::from_abscissas(eta, -eta, 0.0, 0.0, 0.0),
            &[0, 2, 3, 4],
        ),
        (
            EquilibriumSpec::from_abscissas(eta, -eta, xi, -xi, 0.0),
            &[0, 2, 4],
        ),
    ]
}

#[test]
fn centers_classify_and_declassify() {
    let mut r = rng(12);
    for _ in 0..200 {
        for (e, pinned) in center_families(&mut r) {
            let spec = from_equilibrium(&e).spec;
            let c = classify_infinity(&spec, DEFAULT_TOL).unwrap();
            assert_eq!(c.kind, InfinityKind::Center, "{spec:?}");
            for &k in pinned {
                let mut p = [e.gamma_l, e.gamma_r, e.x_l, e.x_r, e.b];
                p[k] += 1e-3;
                let s = SystemSpec::from_abscissas(p[0], p[1], p[2], p[3], p[4]);
                let c = classify_infinity(&s, DEFAULT_TOL).unwrap();
                assert_ne!(c.kind, InfinityKind::Center, "{s:?}");
            }
        }
    }
}

#[test]
fn cycle_counts_match_dense_scan_near_critical_point() {
    let mut r = rng(13);
    let mut with_cycles = 0;
    for k in 0..200 {
        let spec = if k % 2 == 0 {
            let eps = 10f64.powf(r.gen_range(-7.0..=-3.0));
            let mut p = || 1.0 + eps * r.gen_range(-1.0..=1.0);
            SystemSpec::from_abscissas(-0.125 * p(), 0.125 * p(), p(), p(), -0.25 * p())
        } else {
            let t = UnfoldingTarget::new(
                r.gen_range(-1e-7..=1e-7),
                r.gen_range(-1e-4..=1e-4),
                r.gen_range(-1.5e-2..=1.5e-2),
            );
            order3_unfold(-0.125, 1.0, &t).unwrap().spec()
        };
        let scan = find_cycles(&spec, 0.01, 400).unwrap();
        let dense = dense_sign_changes(&spec, 0.01, 4000);
        assert_eq!(scan.cycles.len(), dense, "{spec:?}");
        with_cycles += (dense > 0) as usize;
    }
    assert!(with_cycles >= 20, "only {with_cycles} specs with cycles");
}

#[test]
fn perturbed_cycles_alternate_stability() {
    let scan = find_cycles(&perturbed(), 0.01, 400).unwrap();
    assert_eq!(scan.cycles.len(), 3);
    for w in scan.cycles.windows(2) {
        assert!(w[0].displacement_slope * w[1].displacement_slope < 0.0);
        assert_ne!(w[0].stability, w[1].stability);
    }
}

fn double_root(c: &RegionCount) -> bool {
    c.on_discriminant && c.roots.iter().any(|r| r.multiplicity >= 2)
}

#[test]
fn discriminant_at_zero_delta3_is_4d2_cubed_plus_27d1_squared() {
    let mut r = rng(14);
    for _ in 0..1000 {
        let root: f64 = r.gen_range(0.01..=1.0);
        // 4 d2^3 + 27 d1^2 = 0
        let (d1, d2) = (2.0 * root.powi(3), -3.0 * root * root);
        assert_eq!(discriminant_point(0.0, root), (d1, d2));
        let c = model_region_count([d1, d2, 0.0]);
        assert!(double_root(&c), "({d1}, {d2}): {c:?}");
        // 4 d2^3 - 27 d1^2 = 0 is not a double-root curve.
        let c = model_region_count([d1, 3.0 * root * root, 0.0]);
        assert!(!double_root(&c), "{c:?}");
    }
}

#[test]
fn region_maps_respect_cusp_geometry() {
    let w = Window::square(0.1);
    let m = region_boundaries(1.0, &w, 64).unwrap();
    assert!(m.labels.iter().all(|l| l.count < 3));
    let m = region_boundaries(-1.0, &w, 64).unwrap();
    assert!(!m.cusp_in_window);
    assert_eq!(m.cusp, cusp(-1.0));
    let m = region_boundaries(-0.3, &w, 64).unwrap();
    assert!(m.cusp_in_window);
    // Roots (0.2, 0.3, 0.5) put (-0.03, 0.31) inside the wedge for delta3 = -1.
    let w = Window {
        delta1_min: -0.05,
        delta1_max: 0.0,
        delta2_min: 0.2,
        delta2_max: 0.35,
    };
    let m = region_boundaries(-1.0, &w, 64).unwrap();
    assert!(m.labels.iter().any(|l| l.count == 3));
}

#[test]
fn unfolding_hits_targets() {
    let mut r = rng(15);
    for _ in 0..20 {
        let (g_l, x_l) = (signed(&mut r, 0.05, 0.5), signed(&mut r, 0.5, 2.0));
        for _ in 0..100 {
            let t = UnfoldingTarget::new(
                r.gen_range(-1e-2..=1e-2),
                r.gen_range(-1e-2..=1e-2),
                r.gen_range(-1e-2..=1e-2),
            );
            let sol =
                order3_unfold(g_l, x_l, &t).unwrap_or_else(|e| panic!("({g_l}, {x_l}) {t:?}: {e}"));
            let worst = (0..3)
                .map(|i| (sol.achieved[i] - t.as_array()[i]).abs())
                .fold(0.0, f64::max);
            assert!(
                worst <= 1e-12 && sol.residual <= 1e-12,
                "({g_l}, {x_l}) {t:?}: {worst:e}"
            );
        }
    }
}

#[test]
fn published_targets_recover_rational_parameters() {
    let t = UnfoldingTarget::new(-4.43719886e-8, 3.993655760e-5, -1.15001344e-2);
    let sol = order3_unfold(-0.125, 1.0, &t).unwrap();
    let p = perturbed();
    for (a, b) in [(sol.gamma_r, p.gamma_r), (sol.b, p.b), (sol.x_r, p.x_r())] {
        assert!(relative_error(a, b) <= 1e-6, "{a} vs {b}");
    }
}

/// The printed truncation coefficients carry 8-10 digits; the roots are
/// sensitive enough to Delta_1 that this caps agreement near 2e-10.
#[test]
fn printed_truncation_gives_published_roots() {
    let roots =
        truncation_roots([-4.43719886e-8, 3.993655760e-5, -1.15001344e-2, 1.054869499]).unwrap();
    let expected = [0.002467460261, 0.003358360933, 0.005076128658];
    assert_eq!(roots.len(), 3);
    for (r, e) in roots.iter().zip(expected) {
        assert!((r.value - e).abs() <= 5e-10, "{} vs {e}", r.value);
    }
}
