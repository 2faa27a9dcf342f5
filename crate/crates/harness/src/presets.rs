//! Exact NURBS representations of the built-in surface shapes and the
//! graded element layouts applied to them.
//!
//! Conic arcs are a single rational quadratic Bézier span (middle weight
//! `cos(Δθ/2)`), degree-elevated if needed and then knot-refined. Knot
//! insertion keeps the parametrization, so every mesh of one preset shares
//! the same map `ξ ↦ C(ξ)` and solutions on different meshes can be
//! compared pointwise in `ξ`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::PathBuf;

use gmsurf_core::{KnotVector, NurbsCurve, QuadratureRule, Vec2};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Element-length layout along the parameter domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Grading {
    Uniform,
    /// Adjacent elements differ by `ratio`, smallest at both tips.
    Geometric {
        ratio: f64,
    },
    /// Largest-to-smallest ratio frozen at the value the geometric layout
    /// has with `anchor_elements` elements; every element shrinks under
    /// refinement.
    Anchored {
        ratio: f64,
        anchor_elements: usize,
    },
}

impl Default for Grading {
    fn default() -> Self {
        Grading::Geometric { ratio: 1.2 }
    }
}

impl Grading {
    fn validate(&self) -> Result<()> {
        let ratio = match *self {
            Grading::Uniform => return Ok(()),
            Grading::Geometric { ratio } => ratio,
            Grading::Anchored {
                ratio,
                anchor_elements,
            } => {
                if anchor_elements < 2 {
                    return Err(HarnessError::Config(
                        "anchored grading needs anchor_elements >= 2".into(),
                    ));
                }
                ratio
            }
        };
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(HarnessError::Config(format!(
                "grading ratio must be positive and finite, got {ratio}"
            )));
        }
        Ok(())
    }

    /// Ratio between neighbouring elements for a mesh of `elements`.
    pub fn adjacent_ratio(&self, elements: usize) -> f64 {
        match *self {
            Grading::Uniform => 1.0,
            Grading::Geometric { ratio } => ratio,
            Grading::Anchored {
                ratio,
                anchor_elements,
            } => {
                let steps = (elements / 2).saturating_sub(1);
                if steps == 0 {
                    return 1.0;
                }
                let anchor_steps = (anchor_elements / 2).saturating_sub(1) as f64;
                ratio.powf(anchor_steps / steps as f64)
            }
        }
    }

    /// Interior breakpoints in `(0, 1)` for `elements` spans, mirrored
    /// about `ξ = 1/2`.
    pub fn breakpoints(&self, elements: usize) -> Result<Vec<f64>> {
        self.validate()?;
        if elements == 0 {
            return Err(HarnessError::Config(
                "at least one element is required".into(),
            ));
        }
        let r = self.adjacent_ratio(elements);
        let half = elements / 2;
        let rising: Vec<f64> = (0..half).map(|k| r.powi(k as i32)).collect();
        let mut lengths = rising.clone();
        if elements % 2 == 1 {
            lengths.push(r.powi(half as i32));
        }
        lengths.extend(rising.iter().rev());
        let total: f64 = lengths.iter().sum();
        let mut acc = 0.0;
        let mut out: Vec<f64> = lengths[..elements - 1]
            .iter()
            .map(|l| {
                acc += l;
                acc / total
            })
            .collect();
        // exact mirror so symmetric shapes give symmetric meshes
        for k in 0..out.len() / 2 {
            let j = out.len() - 1 - k;
            out[j] = 1.0 - out[k];
        }
        if out.len() % 2 == 1 {
            let mid = out.len() / 2;
            out[mid] = 0.5;
        }
        Ok(out)
    }
}

/// Shape of the material surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometrySpec {
    /// Straight segment from `start` to `end`.
    Segment { start: [f64; 2], end: [f64; 2] },
    /// Arc of the circle about `center`; `beta_*` are polar angles and the
    /// arc runs from `beta_start` to `beta_end`.
    CircularArc {
        center: [f64; 2],
        radius: f64,
        beta_start: f64,
        beta_end: f64,
    },
    /// Arc of `x = a cos θ, y = b sin θ` about `center`. Either both
    /// `theta_*` are given, or `arc_length` for an arc symmetric about
    /// `θ = π/2`.
    EllipseArc {
        center: [f64; 2],
        a: f64,
        b: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta_start: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        theta_end: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        arc_length: Option<f64>,
    },
    /// Curve in the plain-text NURBS format. Single-span curves are
    /// refined like the presets; multi-span curves are used as given.
    CustomFile { path: PathBuf },
}

impl GeometrySpec {
    /// Segment of the given half length centred at `center`, inclined at
    /// `angle` to the `x₁` axis.
    pub fn centred_segment(center: [f64; 2], half_length: f64, angle: f64) -> Self {
        let d = Vec2::from_angle(angle) * half_length;
        GeometrySpec::Segment {
            start: [center[0] - d.x, center[1] - d.y],
            end: [center[0] + d.x, center[1] + d.y],
        }
    }
}

fn v(p: [f64; 2]) -> Vec2 {
    Vec2::new(p[0], p[1])
}

/// Base (unrefined) curve of degree `degree` for `spec`.
pub fn base_curve(spec: &GeometrySpec, degree: usize) -> Result<NurbsCurve> {
    if degree < 2 {
        return Err(HarnessError::Config(format!("degree {degree} < 2")));
    }
    match spec {
        GeometrySpec::Segment { start, end } => {
            let (a, b) = (v(*start), v(*end));
            if !(a.is_finite() && b.is_finite()) {
                return Err(HarnessError::Config(
                    "segment end points must be finite".into(),
                ));
            }
            if (b - a).norm() <= 1e-12 * (a.norm() + b.norm()).max(1.0) {
                return Err(HarnessError::Config("segment tips coincide".into()));
            }
            let pts = (0..=degree)
                .map(|i| a + (b - a) * (i as f64 / degree as f64))
                .collect();
            let kv = KnotVector::uniform(degree, 1).map_err(HarnessError::geometry)?;
            NurbsCurve::non_rational(kv, pts).map_err(HarnessError::geometry)
        }
        GeometrySpec::CircularArc {
            center,
            radius,
            beta_start,
            beta_end,
        } => {
            if !(radius.is_finite() && *radius > 0.0) {
                return Err(HarnessError::Config(format!(
                    "arc radius must be positive, got {radius}"
                )));
            }
            conic_arc(v(*center), *radius, *radius, *beta_start, *beta_end, degree)
        }
        GeometrySpec::EllipseArc {
            center,
            a,
            b,
            theta_start,
            theta_end,
            arc_length,
        } => {
            if !(a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0) {
                return Err(HarnessError::Config(format!(
                    "ellipse semi-axes must be positive, got a = {a}, b = {b}"
                )));
            }
            let (t0, t1) = match (theta_start, theta_end, arc_length) {
                (Some(t0), Some(t1), None) => (*t0, *t1),
                (None, None, Some(len)) => {
                    let h = symmetric_half_angle(*a, *b, *len)?;
                    (FRAC_PI_2 - h, FRAC_PI_2 + h)
                }
                _ => {
                    return Err(HarnessError::Config(
                        "ellipse_arc needs either theta_start and theta_end, or arc_length".into(),
                    ))
                }
            };
            conic_arc(v(*center), *a, *b, t0, t1, degree)
        }
        GeometrySpec::CustomFile { path } => {
            let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
            let c = NurbsCurve::from_text(&text).map_err(HarnessError::geometry)?;
            if c.degree() != degree {
                return Err(HarnessError::Config(format!(
                    "{} has degree {}, mesh asks for {degree}",
                    path.display(),
                    c.degree()
                )));
            }
            Ok(c)
        }
    }
}

/// Affine image `center + diag(a, b)·(cos θ, sin θ)` of a unit-circle arc.
fn conic_arc(center: Vec2, a: f64, b: f64, t0: f64, t1: f64, degree: usize) -> Result<NurbsCurve> {
    let span = t1 - t0;
    if !(t0.is_finite() && t1.is_finite()) || span == 0.0 {
        return Err(HarnessError::Config(
            "arc angles must be finite and distinct".into(),
        ));
    }
    // One rational Bézier span needs cos(Δ/2) > 0; splitting would leave a
    // C0 knot that the solver refuses.
    if span.abs() >= PI {
        return Err(HarnessError::Config(format!(
            "arc span {span} rad is not below π; wider arcs are not supported"
        )));
    }
    let w = (0.5 * span).cos();
    let map = |p: Vec2| center + Vec2::new(a * p.x, b * p.y);
    let mid = Vec2::from_angle(0.5 * (t0 + t1)) * (1.0 / w);
    let kv = KnotVector::uniform(2, 1).map_err(HarnessError::geometry)?;
    let mut c = NurbsCurve::new(
        kv,
        vec![
            map(Vec2::from_angle(t0)),
            map(mid),
            map(Vec2::from_angle(t1)),
        ],
        vec![1.0, w, 1.0],
    )
    .map_err(HarnessError::geometry)?;
    for _ in 2..degree {
        c = c.elevate_bezier().map_err(HarnessError::geometry)?;
    }
    Ok(c)
}

/// Arc length of `θ ↦ (a cos θ, b sin θ)` over `[t0, t1]`.
pub fn ellipse_arc_length(a: f64, b: f64, t0: f64, t1: f64) -> f64 {
    let rule = QuadratureRule::gauss_legendre(64).expect("order 64 is valid");
    let pieces = 8;
    (0..pieces)
        .map(|k| {
            let lo = t0 + (t1 - t0) * k as f64 / pieces as f64;
            let hi = t0 + (t1 - t0) * (k + 1) as f64 / pieces as f64;
            rule.mapped(lo, hi)
                .map(|(t, w)| w * (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt())
                .sum::<f64>()
        })
        .sum()
}

/// Half-angle `h` such that the arc `θ ∈ [π/2 − h, π/2 + h]` has the given
/// length.
pub fn symmetric_half_angle(a: f64, b: f64, length: f64) -> Result<f64> {
    let max_h = 0.5 * PI;
    let full = ellipse_arc_length(a, b, FRAC_PI_2 - max_h, FRAC_PI_2 + max_h);
    if !(length > 0.0 && length < full) {
        return Err(HarnessError::Config(format!(
            "arc length {length} is not attainable below a span of π (limit {full})"
        )));
    }
    let (mut lo, mut hi) = (0.0, max_h);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ellipse_arc_length(a, b, FRAC_PI_2 - mid, FRAC_PI_2 + mid) < length {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Preset curve with its element layout applied.
pub fn preset_geometry(
    spec: &GeometrySpec,
    degree: usize,
    elements: usize,
    grading: &Grading,
) -> Result<NurbsCurve> {
    let base = base_curve(spec, degree)?;
    let single_span = base.knot_vector().interior_breaks().is_empty();
    let curve = if single_span {
        let (lo, hi) = base.domain();
        let breaks: Vec<f64> = grading
            .breakpoints(elements)?
            .into_iter()
            .map(|t| lo + (hi - lo) * t)
            .collect();
        base.refine(&breaks).map_err(HarnessError::geometry)?
    } else {
        base
    };
    curve
        .validate_for_solver()
        .map_err(HarnessError::geometry)?;
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use gmsurf_core::ArcLengthTable;

    #[test]
    fn segment_of_length_ten() {
        let s = GeometrySpec::centred_segment([0.0, 0.0], 5.0, 0.0);
        let c = preset_geometry(&s, 2, 50, &Grading::default()).unwrap();
        assert_eq!(c.point(0.0).unwrap(), Vec2::new(-5.0, 0.0));
        assert_eq!(c.point(1.0).unwrap(), Vec2::new(5.0, 0.0));
        let t = ArcLengthTable::new(&c).unwrap();
        assert_relative_eq!(t.total(), 10.0, epsilon = 1e-12);
    }

    #[test]
    fn unit_arc_stays_on_circle() {
        let s = GeometrySpec::CircularArc {
            center: [0.0, 0.0],
            radius: 1.0,
            beta_start: PI / 4.0,
            beta_end: 3.0 * PI / 4.0,
        };
        let c = preset_geometry(&s, 2, 50, &Grading::default()).unwrap();
        let p0 = c.point(0.0).unwrap();
        assert_relative_eq!(p0.y.atan2(p0.x), PI / 4.0, epsilon = 1e-12);
        let p1 = c.point(1.0).unwrap();
        assert_relative_eq!(p1.y.atan2(p1.x), 3.0 * PI / 4.0, epsilon = 1e-12);
        for k in 0..=1000 {
            let p = c.point(k as f64 / 1000.0).unwrap();
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
        let t = ArcLengthTable::new(&c).unwrap();
        assert_relative_eq!(t.total(), PI / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn ellipse_arc_with_printed_end_points() {
        let s = GeometrySpec::EllipseArc {
            center: [0.0, 0.0],
            a: 2.0,
            b: 4.0,
            theta_start: None,
            theta_end: None,
            arc_length: Some(PI),
        };
        let c = preset_geometry(&s, 2, 50, &Grading::default()).unwrap();
        let (p0, p1) = (c.point(0.0).unwrap(), c.point(1.0).unwrap());
        assert!(
            (p0.x - 1.2374).abs() < 1e-3 && (p0.y - 3.1425).abs() < 1e-3,
            "{p0:?}"
        );
        assert!(
            (p1.x + 1.2374).abs() < 1e-3 && (p1.y - 3.1425).abs() < 1e-3,
            "{p1:?}"
        );
        for k in 0..=200 {
            let p = c.point(k as f64 / 200.0).unwrap();
            let r = (p.x / 2.0).powi(2) + (p.y / 4.0).powi(2);
            assert!((r - 1.0).abs() < 1e-12);
        }
        let t = ArcLengthTable::new(&c).unwrap();
        assert!((t.total() - PI).abs() < 1e-3);
    }

    #[test]
    fn flat_ellipse_end_points() {
        let h = symmetric_half_angle(2.0, 1.0, PI).unwrap();
        let (x, y) = (2.0 * (FRAC_PI_2 - h).cos(), (FRAC_PI_2 - h).sin());
        assert!(
            (x - 1.5149).abs() < 1e-3 && (y - 0.6529).abs() < 1e-3,
            "{x} {y}"
        );
    }

    #[test]
    fn wide_and_degenerate_shapes_rejected() {
        let wide = GeometrySpec::CircularArc {
            center: [0.0, 0.0],
            radius: 1.0,
            beta_start: 0.0,
            beta_end: 2.0 * PI,
        };
        assert!(matches!(base_curve(&wide, 2), Err(HarnessError::Config(_))));
        let flat = GeometrySpec::EllipseArc {
            center: [0.0, 0.0],
            a: 0.0,
            b: 1.0,
            theta_start: Some(0.0),
            theta_end: Some(1.0),
            arc_length: None,
        };
        assert!(matches!(base_curve(&flat, 2), Err(HarnessError::Config(_))));
        let dot = GeometrySpec::Segment {
            start: [1.0, 1.0],
            end: [1.0, 1.0],
        };
        assert!(matches!(base_curve(&dot, 2), Err(HarnessError::Config(_))));
    }

    #[test]
    fn graded_breakpoints_are_mirrored() {
        for n in [4, 5, 10, 49, 50] {
            let b = Grading::default().breakpoints(n).unwrap();
            assert_eq!(b.len(), n - 1);
            for (x, y) in b.iter().zip(b.iter().rev()) {
                assert!((x + y - 1.0).abs() <= f64::EPSILON);
            }
            assert!(b.windows(2).all(|w| w[1] > w[0]));
            let first = b[0];
            let second = b[1] - b[0];
            assert_relative_eq!(second / first, 1.2, epsilon = 1e-9);
        }
    }

    #[test]
    fn anchored_matches_geometric_at_anchor() {
        let g = Grading::Geometric { ratio: 1.2 };
        let a = Grading::Anchored {
            ratio: 1.2,
            anchor_elements: 50,
        };
        let bg = g.breakpoints(50).unwrap();
        let ba = a.breakpoints(50).unwrap();
        for (x, y) in bg.iter().zip(&ba) {
            assert_relative_eq!(x, y, epsilon = 1e-14);
        }
        // finer anchored meshes keep the tip-to-middle ratio
        let b = a.breakpoints(100).unwrap();
        let smallest = b[0];
        let largest = b[49] - b[48];
        assert_relative_eq!(largest / smallest, 1.2f64.powi(24), epsilon = 1e-9);
    }

    #[test]
    fn higher_degree_keeps_geometry() {
        let s = GeometrySpec::CircularArc {
            center: [1.0, -2.0],
            radius: 3.0,
            beta_start: 0.3,
            beta_end: 2.1,
        };
        let c2 = preset_geometry(&s, 2, 8, &Grading::Uniform).unwrap();
        let c4 = preset_geometry(&s, 4, 8, &Grading::Uniform).unwrap();
        for k in 0..=50 {
            let xi = k as f64 / 50.0;
            let (a, b) = (c2.point(xi).unwrap(), c4.point(xi).unwrap());
            assert!((a - b).norm() < 1e-12);
        }
    }
}
