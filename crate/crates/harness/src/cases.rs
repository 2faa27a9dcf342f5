//! Built-in case configurations for the benchmarks and the curvature study.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::config::{
    BulkSpec, CaseConfig, GridSpec, MeshSpec, OutputSpec, QuadratureSpec, RadialScan,
};
use crate::nondim::{LoadSpec, SurfaceSpec};
use crate::presets::{GeometrySpec, Grading};

/// Inclination of the benchmark segment; the source gives none.
pub const BENCHMARK_SEGMENT_ANGLE: f64 = FRAC_PI_4;

/// Bulk modulus used where only dimensionless data is given.
pub const DEFAULT_MU: f64 = 2.0;

fn base(
    name: &str,
    geometry: GeometrySpec,
    bulk: BulkSpec,
    surface: SurfaceSpec,
    load: LoadSpec,
) -> CaseConfig {
    CaseConfig {
        name: name.into(),
        geometry,
        bulk,
        surface,
        load,
        mesh: MeshSpec::default(),
        quadrature: QuadratureSpec::default(),
        output: OutputSpec::default(),
        reference_length: None,
    }
}

/// Segment `2a = 10` nm through the origin, `γ = 0.12`, `σ̃₀ = 0.025`,
/// `σ̃₁₁ = 0.05`, `μ = 2` GPa, `ν = 0.35`.
pub fn benchmark_segment(angle: f64) -> CaseConfig {
    base(
        "benchmark_segment",
        GeometrySpec::centred_segment([0.0, 0.0], 5.0, angle),
        BulkSpec { mu: 2.0, nu: 0.35 },
        SurfaceSpec::Dimensionless {
            gamma: 0.12,
            sigma0_tilde: 0.025,
        },
        LoadSpec::Dimensionless {
            s11: 0.05,
            s12: 0.0,
            s22: 0.0,
        },
    )
}

/// Unit circular arc `β ∈ [π/4, 3π/4]`, `γ = 1`, `σ̃₀ = 0.01`, `ν = 0.33`,
/// `σ̃₂₂ = 1`.
pub fn benchmark_arc() -> CaseConfig {
    base(
        "benchmark_arc",
        GeometrySpec::CircularArc {
            center: [0.0, 0.0],
            radius: 1.0,
            beta_start: FRAC_PI_4,
            beta_end: 3.0 * FRAC_PI_4,
        },
        BulkSpec {
            mu: DEFAULT_MU,
            nu: 0.33,
        },
        SurfaceSpec::Dimensionless {
            gamma: 1.0,
            sigma0_tilde: 0.01,
        },
        LoadSpec::Dimensionless {
            s11: 0.0,
            s12: 0.0,
            s22: 1.0,
        },
    )
}

/// Arc of radius 5 nm used for the radial stress comparisons, with scans at
/// `β = 3π/8` and `β = π/2` out to `r = 3R`.
pub fn field_arc() -> CaseConfig {
    let mut c = base(
        "field_arc",
        GeometrySpec::CircularArc {
            center: [0.0, 0.0],
            radius: 5.0,
            beta_start: FRAC_PI_4,
            beta_end: 3.0 * FRAC_PI_4,
        },
        BulkSpec { mu: 2.0, nu: 0.35 },
        SurfaceSpec::Dimensionless {
            gamma: 0.12,
            sigma0_tilde: 0.025,
        },
        LoadSpec::Dimensionless {
            s11: 0.0,
            s12: 0.0,
            s22: 0.05,
        },
    );
    c.output.radial = [3.0 * PI / 8.0, FRAC_PI_2]
        .iter()
        .map(|&beta| RadialScan {
            beta,
            r_min: 0.0,
            r_max: 15.0,
            samples: 301,
            origin: [0.0, 0.0],
        })
        .collect();
    c
}

/// The four shapes of length `π` nm: (i) straight, (ii) ellipse `a = 2`,
/// `b = 1`, (iii) circle of radius 2, (iv) ellipse `a = 2`, `b = 4`. All are
/// traversed from the right tip to the left tip.
pub fn curvature_cases(grid_resolution: usize) -> Vec<CaseConfig> {
    let length = PI;
    let ellipse = |a: f64, b: f64| GeometrySpec::EllipseArc {
        center: [0.0, 0.0],
        a,
        b,
        theta_start: None,
        theta_end: None,
        arc_length: Some(length),
    };
    let shapes = [
        (
            "case_i_straight",
            GeometrySpec::Segment {
                start: [0.5 * length, 0.0],
                end: [-0.5 * length, 0.0],
            },
        ),
        ("case_ii_ellipse_2_1", ellipse(2.0, 1.0)),
        ("case_iii_circle_2", ellipse(2.0, 2.0)),
        ("case_iv_ellipse_2_4", ellipse(2.0, 4.0)),
    ];
    shapes
        .into_iter()
        .map(|(name, g)| {
            let mut c = base(
                name,
                g,
                BulkSpec { mu: 2.0, nu: 0.35 },
                SurfaceSpec::Dimensionless {
                    gamma: 0.12,
                    sigma0_tilde: 0.025,
                },
                LoadSpec::Dimensionless {
                    s11: 0.0,
                    s12: 0.0,
                    s22: 0.05,
                },
            );
            c.output.grid = Some(GridSpec {
                center: Some([0.0, 0.0]),
                half_width: Some(length),
                resolution: grid_resolution,
            });
            c
        })
        .collect()
}

/// Anchored variant of a configuration's grading: the configured mesh is
/// one member of a family in which every element shrinks.
pub fn anchored(mut c: CaseConfig) -> CaseConfig {
    if let Grading::Geometric { ratio } = c.mesh.grading {
        c.mesh.grading = Grading::Anchored {
            ratio,
            anchor_elements: c.mesh.elements,
        };
    }
    c
}
