mod common;

use std::f64::consts::PI;

use common::{arc, graded_breaks, quarter_circle};
use gmsurf_core::{ArcLengthTable, KnotVector, NurbsCurve, Vec2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A rational quadratic curve with non-uniform knots and uneven weights.
fn wavy_curve() -> NurbsCurve {
    let kv = KnotVector::new(vec![0.0, 0.0, 0.0, 0.13, 0.4, 0.45, 0.8, 1.0, 1.0, 1.0], 2).unwrap();
    let pts = [
        (0.0, 0.0),
        (0.4, 0.9),
        (1.1, 1.2),
        (1.7, 0.2),
        (2.4, -0.5),
        (3.0, 0.3),
        (3.5, 1.0),
    ];
    NurbsCurve::new(
        kv,
        pts.iter().map(|&(x, y)| Vec2::new(x, y)).collect(),
        vec![1.0, 0.8, 1.3, 0.6, 1.1, 0.9, 1.0],
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rational_basis_is_a_partition_of_unity(xi in 0.0..=1.0f64) {
        let b = wavy_curve().rational_basis(xi, 2).unwrap();
        let s0: f64 = b.table[0].iter().sum();
        prop_assert!((s0 - 1.0).abs() < 1e-12);
        prop_assert!(b.table[0].iter().all(|&v| v >= -1e-15));
        prop_assert!(b.table[1].iter().sum::<f64>().abs() < 1e-9);
        prop_assert!(b.table[2].iter().sum::<f64>().abs() < 1e-9);
    }

    #[test]
    fn bspline_basis_is_a_partition_of_unity(xi in 0.0..=1.0f64) {
        let kv = KnotVector::new(vec![0.0, 0.0, 0.0, 0.0, 0.2, 0.5, 0.55, 1.0, 1.0, 1.0, 1.0], 3).unwrap();
        let t = kv.basis_derivs(xi, 3).unwrap();
        prop_assert!((t.values().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for k in 1..=3 {
            prop_assert!(t.order(k).iter().sum::<f64>().abs() < 1e-9);
        }
    }

    #[test]
    fn frame_is_orthonormal(xi in 0.0..=1.0f64) {
        let f = wavy_curve().frame(xi).unwrap();
        let (t, n) = (f.tangent(), f.normal());
        prop_assert!(t.dot(n).abs() < 1e-12);
        prop_assert!((t.norm() - 1.0).abs() < 1e-12);
        prop_assert!((n.norm() - 1.0).abs() < 1e-12);
        prop_assert!((f.normal_angle - (f.tangent_angle - PI / 2.0)).abs() < 1e-12);
    }
}

#[test]
fn quarter_circle_is_exact() {
    let r0 = 2.5;
    let c = quarter_circle(r0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let xi: f64 = rng.gen_range(0.0..=1.0);
        assert!((c.point(xi).unwrap().norm() - r0).abs() < 1e-12);
    }
    // refined and elevated copies describe the same circle
    let refined = c.refine(&graded_breaks(9, 1.3)).unwrap();
    for k in 0..=200 {
        let xi = k as f64 / 200.0;
        assert!((refined.point(xi).unwrap().norm() - r0).abs() < 1e-12);
        assert!((refined.frame(xi).unwrap().curvature - 1.0 / r0).abs() < 1e-10);
    }
}

#[test]
fn derivatives_match_central_differences() {
    let c = wavy_curve();
    let h = 1e-6;
    let knots = [0.13, 0.4, 0.45, 0.8];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 200 {
        let xi: f64 = rng.gen_range(0.01..0.99);
        // differences across a knot see the jump in the second derivative
        if knots.iter().any(|k| (k - xi).abs() < 10.0 * h) {
            continue;
        }
        let p = c.eval(xi).unwrap();
        let (a, b) = (c.eval(xi - h).unwrap(), c.eval(xi + h).unwrap());
        let d1 = (b.point - a.point) * (0.5 / h);
        let d2 = (b.d1 - a.d1) * (0.5 / h);
        assert!((d1 - p.d1).norm() <= 1e-6 * p.d1.norm(), "d1 at {xi}");
        assert!(
            (d2 - p.d2).norm() <= 1e-6 * p.d2.norm().max(1.0),
            "d2 at {xi}"
        );
        checked += 1;
    }
}

#[test]
fn quarter_circle_arc_length() {
    for r0 in [1.0, 3.0, 0.2] {
        let t = ArcLengthTable::new(&quarter_circle(r0)).unwrap();
        assert!((t.total() - 0.5 * PI * r0).abs() < 1e-10);
        // each half of the symmetric arc has half the length
        assert!((t.normalized(0.5).unwrap() - 0.5).abs() < 1e-12);
    }
}

#[test]
fn arc_apex_has_vertical_normal() {
    let c = arc(1.0, PI / 4.0, 3.0 * PI / 4.0, &graded_breaks(50, 1.2));
    let f = c.frame(0.5).unwrap();
    let (s, c) = f.normal_angle.sin_cos();
    assert!((s - 1.0).abs() < 1e-12 && c.abs() < 1e-12);
    assert!((f.normal() - Vec2::new(0.0, 1.0)).norm() < 1e-12);
    assert!((f.curvature - 1.0).abs() < 1e-12);
}

#[test]
fn graded_mesh_shrinks_toward_tips() {
    let c = arc(1.0, PI / 4.0, 3.0 * PI / 4.0, &graded_breaks(50, 1.2));
    let lens: Vec<f64> = c.mesh().elements.iter().map(|e| e.len()).collect();
    assert_eq!(lens.len(), 50);
    for k in 0..24 {
        assert!(lens[k] < lens[k + 1]);
        assert!(lens[49 - k] < lens[48 - k]);
    }
}
