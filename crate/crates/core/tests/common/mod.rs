#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_4, PI};

use gmsurf_core::{
    AssemblyOptions, BulkMaterial, FarFieldLoad, KnotVector, NurbsCurve, Problem, SurfaceMaterial,
    SurfaceSolution, Vec2,
};

/// Interior breakpoints of `ne` uniform elements on `[0, 1]`.
pub fn uniform_breaks(ne: usize) -> Vec<f64> {
    (1..ne).map(|k| k as f64 / ne as f64).collect()
}

/// Interior breakpoints shrinking by `ratio` toward both ends.
pub fn graded_breaks(ne: usize, ratio: f64) -> Vec<f64> {
    let half = ne / 2;
    let mut lens: Vec<f64> = (0..half).map(|k| ratio.powi(k as i32)).collect();
    let mut all = lens.clone();
    if ne % 2 == 1 {
        all.push(ratio.powi(half as i32));
    }
    lens.reverse();
    all.extend(lens);
    let total: f64 = all.iter().sum();
    let mut acc = 0.0;
    all[..all.len() - 1]
        .iter()
        .map(|l| {
            acc += l / total;
            acc
        })
        .collect()
}

/// Quadratic segment from `a` to `b` with collinear control points.
pub fn segment(a: Vec2, b: Vec2, breaks: &[f64]) -> NurbsCurve {
    NurbsCurve::non_rational(
        KnotVector::uniform(2, 1).unwrap(),
        vec![a, (a + b) * 0.5, b],
    )
    .unwrap()
    .refine(breaks)
    .unwrap()
}

/// Exact circular arc of radius `r` about the origin from angle `t1` to `t2`
/// (counter-clockwise, span below π).
pub fn arc(r: f64, t1: f64, t2: f64, breaks: &[f64]) -> NurbsCurve {
    let w = (0.5 * (t2 - t1)).cos();
    let tm = 0.5 * (t1 + t2);
    NurbsCurve::new(
        KnotVector::uniform(2, 1).unwrap(),
        vec![
            Vec2::from_angle(t1) * r,
            Vec2::from_angle(tm) * (r / w),
            Vec2::from_angle(t2) * r,
        ],
        vec![1.0, w, 1.0],
    )
    .unwrap()
    .refine(breaks)
    .unwrap()
}

/// Unit quarter circle, control points (1,0), (1,1), (0,1).
pub fn quarter_circle(radius: f64) -> NurbsCurve {
    NurbsCurve::new(
        KnotVector::uniform(2, 1).unwrap(),
        vec![
            Vec2::new(radius, 0.0),
            Vec2::new(radius, radius),
            Vec2::new(0.0, radius),
        ],
        vec![1.0, std::f64::consts::FRAC_1_SQRT_2, 1.0],
    )
    .unwrap()
}

/// Unit arc over `[π/4, 3π/4]` with `γ = 1`, `σ̃₀ = 0.01`, `ν = 0.33` and
/// `σ̃₂₂ = 1`, in units where `μ = 1`, `ℓ = π/4`.
pub fn benchmark_arc(breaks: &[f64]) -> Problem {
    let mu = 1.0;
    let ell = PI / 4.0;
    Problem::new(
        arc(1.0, FRAC_PI_4, 3.0 * FRAC_PI_4, breaks),
        BulkMaterial::new(mu, 0.33).unwrap(),
        SurfaceMaterial::from_stiffness(2.0 * mu * ell, 0.01 * mu * ell).unwrap(),
        FarFieldLoad::new(0.0, 0.0, mu),
    )
    .unwrap()
}

/// Segment `2a = 10` along `angle`, `γ = 0.12`, `σ̃₀ = 0.025`, `σ̃₁₁ = 0.05`,
/// `μ = 2`, `ν = 0.35`.
pub fn benchmark_segment(angle: f64, breaks: &[f64]) -> Problem {
    let (mu, a) = (2.0, 5.0);
    let d = Vec2::from_angle(angle) * a;
    Problem::new(
        segment(d * -1.0, d, breaks),
        BulkMaterial::new(mu, 0.35).unwrap(),
        SurfaceMaterial::from_stiffness(2.0 * mu * a / 0.12, 0.025 * mu * a).unwrap(),
        FarFieldLoad::new(0.05 * mu, 0.0, 0.0),
    )
    .unwrap()
}

pub fn sequential() -> AssemblyOptions {
    AssemblyOptions {
        parallel: false,
        ..AssemblyOptions::default()
    }
}

pub fn solve(p: &Problem) -> SurfaceSolution {
    SurfaceSolution::solve(p, &AssemblyOptions::default()).unwrap()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
