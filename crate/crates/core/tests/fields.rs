mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};

use common::{arc, benchmark_arc, graded_breaks, segment, solve};
use gmsurf_core::{
    bie_residual, ArcLengthTable, Assembler, AssemblyOptions, BulkMaterial, FarFieldLoad,
    FieldEvaluator, FieldOptions, Problem, SurfaceMaterial, SurfaceSolution, Sym2, Vec2,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_points(
    ev: &FieldEvaluator<'_>,
    count: usize,
    half: f64,
    clearance: f64,
    seed: u64,
) -> Vec<Vec2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = Vec2::new(rng.gen_range(-half..half), rng.gen_range(-half..half));
        if ev.distance_to_surface(x) > clearance {
            out.push(x);
        }
    }
    out
}

fn tensor_norm(s: &Sym2) -> f64 {
    (s.xx * s.xx + 2.0 * s.xy * s.xy + s.yy * s.yy).sqrt()
}

#[test]
fn analytic_gradient_matches_finite_differences() {
    let sol = solve(&benchmark_arc(&graded_breaks(30, 1.2)));
    let ev = FieldEvaluator::new(&sol, FieldOptions::default()).unwrap();
    let h = 1e-4 * FRAC_PI_4;
    for x in random_points(&ev, 50, 2.0, 0.1, 3) {
        let g = ev.stress_at(x).unwrap().grad;
        let mut fd = [[0.0; 2]; 2];
        for (m, e) in [Vec2::new(h, 0.0), Vec2::new(0.0, h)]
            .into_iter()
            .enumerate()
        {
            let d = (ev.displacement_at(x + e).unwrap() - ev.displacement_at(x - e).unwrap())
                * (0.5 / h);
            fd[0][m] = d.x;
            fd[1][m] = d.y;
        }
        let norm = g.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        for k in 0..2 {
            for m in 0..2 {
                assert!(
                    (g[k][m] - fd[k][m]).abs() < 1e-5 * norm,
                    "{x:?}: {g:?} vs {fd:?}"
                );
            }
        }
    }
}

#[test]
fn stress_field_is_in_equilibrium() {
    let sol = solve(&benchmark_arc(&graded_breaks(30, 1.2)));
    let ev = FieldEvaluator::new(&sol, FieldOptions::default()).unwrap();
    let remote = tensor_norm(&sol.problem.load.as_tensor());
    let h = 1e-3;
    for x in random_points(&ev, 30, 2.0, 0.2, 5) {
        let s = |dx: f64, dy: f64| ev.stress_at(x + Vec2::new(dx, dy)).unwrap().stress.plane;
        let (xp, xm, yp, ym) = (s(h, 0.0), s(-h, 0.0), s(0.0, h), s(0.0, -h));
        let div1 = (xp.xx - xm.xx + yp.xy - ym.xy) / (2.0 * h);
        let div2 = (xp.xy - xm.xy + yp.yy - ym.yy) / (2.0 * h);
        assert!(
            div1.abs() < 1e-5 * remote && div2.abs() < 1e-5 * remote,
            "{x:?}: {div1:e} {div2:e}"
        );
    }
}

#[test]
fn far_field_is_recovered_and_perturbation_decays() {
    let sol = solve(&benchmark_arc(&graded_breaks(30, 1.2)));
    let ev = FieldEvaluator::new(&sol, FieldOptions::default()).unwrap();
    let ell = FRAC_PI_4;
    let remote = sol.problem.load.as_tensor();
    let u_inf = |x: Vec2| {
        gmsurf_core::kernels::farfield_displacement(&sol.problem.load, &sol.problem.bulk, x)
    };
    for dir in [0.3, 1.9, 4.0] {
        let e = Vec2::from_angle(dir);
        let near = e * (100.0 * ell);
        let st = ev.stress_at(near).unwrap().stress.plane;
        let diff = Sym2::new(st.xx - remote.xx, st.xy - remote.xy, st.yy - remote.yy);
        assert!(tensor_norm(&diff) < 1e-2 * tensor_norm(&remote));
        let du1 = (ev.displacement_at(near).unwrap() - u_inf(near)).norm();
        let du2 = (ev.displacement_at(near * 2.0).unwrap() - u_inf(near * 2.0)).norm();
        assert!(((du2 / du1) - 0.5).abs() < 0.05, "ratio {}", du2 / du1);
    }
}

#[test]
fn degenerate_surface_reproduces_the_remote_field() {
    let p = Problem::new(
        arc(1.5, 0.2, 2.4, &graded_breaks(16, 1.2)),
        BulkMaterial::new(1.3, 0.28).unwrap(),
        SurfaceMaterial::degenerate(),
        FarFieldLoad::new(0.4, -0.25, 0.9),
    )
    .unwrap();
    let sol = solve(&p);
    let ev = FieldEvaluator::new(&sol, FieldOptions::default()).unwrap();
    let remote = p.load.stress_state(&p.bulk);
    for x in random_points(&ev, 100, 3.0, 0.05, 9) {
        let f = ev.stress_at(x).unwrap();
        assert!((f.stress.plane.xx - remote.plane.xx).abs() < 1e-12);
        assert!((f.stress.plane.xy - remote.plane.xy).abs() < 1e-12);
        assert!((f.stress.plane.yy - remote.plane.yy).abs() < 1e-12);
        assert!((f.relative_von_mises.unwrap() - 1.0).abs() < 1e-10);
    }
}

fn profile(sol: &SurfaceSolution, samples: usize) -> Vec<(f64, f64)> {
    (0..samples)
        .map(|k| {
            let (st, _) = sol.surface_state(k as f64 / (samples - 1) as f64).unwrap();
            (st.sigma, st.omega)
        })
        .collect()
}

#[test]
fn solution_is_affine_in_the_load() {
    let base = benchmark_arc(&graded_breaks(20, 1.2));
    let (l1, l2) = (
        FarFieldLoad::new(0.3, 0.1, -0.2),
        FarFieldLoad::new(-0.5, 0.4, 0.7),
    );
    let with = |surface: SurfaceMaterial, load: FarFieldLoad| {
        solve(&Problem {
            surface,
            load,
            ..base.clone()
        })
        .unknowns()
    };
    let close = |a: &[f64], b: &[f64]| {
        let m = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-10 * m)
    };
    // without tension the problem is linear in the load
    let bare = SurfaceMaterial::from_stiffness(base.surface.stiffness(), 0.0).unwrap();
    let (a, b) = (2.5, -0.75);
    let x1 = with(bare, l1);
    let x2 = with(bare, l2);
    let x12 = with(bare, l1.scaled(a).plus(&l2.scaled(b)));
    let combo: Vec<f64> = x1.iter().zip(&x2).map(|(p, q)| a * p + b * q).collect();
    assert!(close(&x12, &combo));
    // σ₀ adds a load-independent part: affine combinations are preserved
    let s = base.surface;
    let (a, b) = (1.8, -0.8);
    let y1 = with(s, l1);
    let y2 = with(s, l2);
    let y12 = with(s, l1.scaled(a).plus(&l2.scaled(b)));
    let combo: Vec<f64> = y1.iter().zip(&y2).map(|(p, q)| a * p + b * q).collect();
    assert!(close(&y12, &combo));
}

#[test]
fn rigid_rotation_is_objective() {
    let base = benchmark_arc(&graded_breaks(20, 1.2));
    let sol = solve(&base);
    let ev = FieldEvaluator::new(&sol, FieldOptions::default()).unwrap();
    let pts = random_points(&ev, 10, 2.0, 0.2, 13);
    for th in [FRAC_PI_6, FRAC_PI_2] {
        let p = Problem::new(
            base.curve.rotated(th),
            base.bulk,
            base.surface,
            base.load.rotated(th),
        )
        .unwrap();
        let rs = solve(&p);
        let (a, b) = (profile(&sol, 101), profile(&rs, 101));
        let (ms, mo) = sol.max_abs(101).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.0 - y.0).abs() < 1e-8 * ms && (x.1 - y.1).abs() < 1e-8 * mo);
        }
        let rev = FieldEvaluator::new(&rs, FieldOptions::default()).unwrap();
        for &x in &pts {
            let f = ev.stress_at(x).unwrap();
            let g = rev.stress_at(x.rotated(th)).unwrap();
            let u = f.u.rotated(th);
            assert!((u - g.u).norm() < 1e-8 * f.u.norm().max(1.0));
            let s = f.stress.plane.rotated(th);
            let scale = tensor_norm(&f.stress.plane);
            assert!((s.xx - g.stress.plane.xx).abs() < 1e-8 * scale);
            assert!((s.xy - g.stress.plane.xy).abs() < 1e-8 * scale);
            assert!((s.yy - g.stress.plane.yy).abs() < 1e-8 * scale);
        }
    }
}

#[test]
fn reversing_the_traversal_changes_nothing_physical() {
    let p = Problem::new(
        arc(1.2, 0.4, 2.1, &graded_breaks(20, 1.2)),
        BulkMaterial::new(1.0, 0.3).unwrap(),
        SurfaceMaterial::from_stiffness(0.8, 0.02).unwrap(),
        FarFieldLoad::new(0.3, 0.2, 0.6),
    )
    .unwrap();
    let rp = Problem {
        curve: p.curve.reversed(),
        ..p.clone()
    };
    let (s, r) = (solve(&p), solve(&rp));
    let (ms, mo) = s.max_abs(201).unwrap();
    for k in 0..=200 {
        let xi = k as f64 / 200.0;
        let (a, _) = s.surface_state(xi).unwrap();
        let (b, _) = r.surface_state(1.0 - xi).unwrap();
        assert!((a.sigma - b.sigma).abs() < 1e-8 * ms);
        assert!((a.omega - b.omega).abs() < 1e-8 * mo);
    }
    let (es, er) = (
        FieldEvaluator::new(&s, FieldOptions::default()).unwrap(),
        FieldEvaluator::new(&r, FieldOptions::default()).unwrap(),
    );
    for x in random_points(&es, 20, 2.5, 0.1, 17) {
        let (u, v) = (
            es.displacement_at(x).unwrap(),
            er.displacement_at(x).unwrap(),
        );
        assert!((u - v).norm() < 1e-8 * u.norm());
    }
}

#[test]
fn traction_jumps_agree_with_differentiated_profiles() {
    let sol = solve(&benchmark_arc(&graded_breaks(30, 1.2)));
    let table = ArcLengthTable::new(sol.curve()).unwrap();
    let s0 = sol.problem.surface.sigma0();
    let h = 1e-5;
    let (ms, _) = sol.max_abs(401).unwrap();
    for k in 1..40 {
        let xi = k as f64 / 40.0 + 0.003;
        let f = sol.surface_fields(&table, xi).unwrap();
        let (a, b) = (
            sol.surface_fields(&table, xi - h).unwrap(),
            sol.surface_fields(&table, xi + h).unwrap(),
        );
        let ds = table.arc_length(xi + h).unwrap() - table.arc_length(xi - h).unwrap();
        let dsig = (b.sigma_s - a.sigma_s) / ds;
        let dom = (b.omega_s - a.omega_s) / ds;
        let curv = sol.curve().frame(xi).unwrap().curvature;
        let jl = dsig + s0 * f.omega_s * curv;
        let jn = -f.sigma_s * curv + s0 * dom;
        let scale = ms * 10.0;
        assert!(
            (jl - f.jump.l).abs() < 1e-6 * scale,
            "{xi}: {jl} vs {}",
            f.jump.l
        );
        assert!((jn - f.jump.n).abs() < 1e-6 * scale);
    }
}

#[test]
fn residual_vanishes_at_collocation_points() {
    let p = benchmark_arc(&graded_breaks(20, 1.2));
    let sol = solve(&p);
    let asm = Assembler::new(&p, AssemblyOptions::default()).unwrap();
    let g = p.curve.greville();
    for &xi in &g[1..g.len() - 1] {
        let (rs, ro) = bie_residual(&sol, &asm, xi).unwrap();
        assert!(rs.abs() < 1e-8 && ro.abs() < 1e-8, "{xi}: {rs:e} {ro:e}");
    }
}

/// Largest normalized residual over 50 parameters `(k+1)/51`, which avoid
/// every knot and Greville point of the meshes used here.
fn max_residual(ne: usize) -> f64 {
    let p = benchmark_arc(&graded_breaks(ne, 1.2));
    let sol = solve(&p);
    let asm = Assembler::new(&p, AssemblyOptions::default()).unwrap();
    (0..50)
        .map(|k| {
            let (a, b) = bie_residual(&sol, &asm, (k + 1) as f64 / 51.0).unwrap();
            a.abs().max(b.abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn residual_decreases_under_refinement() {
    let r: Vec<f64> = [10, 20, 40].iter().map(|&n| max_residual(n)).collect();
    assert!(r[0] > r[1] && r[1] > r[2], "{r:?}");
}

#[test]
fn straight_segment_profiles_are_symmetric() {
    let p = Problem::new(
        segment(
            Vec2::new(0.5 * PI, 0.0),
            Vec2::new(-0.5 * PI, 0.0),
            &graded_breaks(30, 1.2),
        ),
        BulkMaterial::new(2.0, 0.35).unwrap(),
        SurfaceMaterial::from_stiffness(2.0 * 2.0 * 0.5 * PI / 0.12, 0.025 * 2.0 * 0.5 * PI)
            .unwrap(),
        FarFieldLoad::new(0.0, 0.0, 0.1),
    )
    .unwrap();
    let sol = solve(&p);
    let (ms, mo) = sol.max_abs(201).unwrap();
    assert!(mo < 1e-6 * ms);
    for k in 0..=100 {
        let xi = k as f64 / 100.0;
        let (a, _) = sol.surface_state(xi).unwrap();
        let (b, _) = sol.surface_state(1.0 - xi).unwrap();
        assert!((a.sigma - b.sigma).abs() < 1e-10 * ms);
    }
}
