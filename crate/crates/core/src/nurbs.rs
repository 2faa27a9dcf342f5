//! Open-knot B-spline / NURBS curves.
//!
//! The same rational basis describes the surface geometry and the two
//! unknown surface stress fields, so everything downstream (collocation,
//! element loops, field recovery) is driven from the types in this module.
//!
//! Indices are 0-based throughout. The Greville abscissa of basis function
//! `a` is the mean of knots `a+1 ..= a+p`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::geom::Vec2;

/// Relative slack when deciding whether a parameter lies in the knot domain.
const DOMAIN_SLACK: f64 = 1e-12;

/// Non-decreasing, clamped knot vector of a degree-`p` spline.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    knots: Vec<f64>,
    degree: usize,
}

impl KnotVector {
    pub fn new(knots: Vec<f64>, degree: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::KnotVector("degree must be at least 1".into()));
        }
        if knots.len() < 2 * degree + 2 {
            return Err(Error::KnotVector(format!(
                "{} knots is too few for degree {degree}",
                knots.len()
            )));
        }
        if knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::KnotVector("non-finite knot".into()));
        }
        if knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::KnotVector("knots must be non-decreasing".into()));
        }
        let m = knots.len();
        let clamped_start = knots[..=degree].iter().all(|&k| k == knots[0]);
        let clamped_end = knots[m - degree - 1..].iter().all(|&k| k == knots[m - 1]);
        if !clamped_start || !clamped_end {
            return Err(Error::KnotVector(format!(
                "knot vector is not open: first and last {} knots must repeat",
                degree + 1
            )));
        }
        if knots[m - 1] <= knots[0] {
            return Err(Error::KnotVector(
                "no interior span of positive length".into(),
            ));
        }
        Ok(Self { knots, degree })
    }

    /// Open uniform knot vector on [0, 1] with `elements` spans.
    pub fn uniform(degree: usize, elements: usize) -> Result<Self> {
        let breaks: Vec<f64> = (0..=elements).map(|i| i as f64 / elements as f64).collect();
        Self::from_breakpoints(degree, &breaks)
    }

    /// Open knot vector with simple interior knots at the given breakpoints
    /// (first and last entries are the domain ends).
    pub fn from_breakpoints(degree: usize, breaks: &[f64]) -> Result<Self> {
        if breaks.len() < 2 {
            return Err(Error::KnotVector("need at least two breakpoints".into()));
        }
        let mut knots = vec![breaks[0]; degree + 1];
        knots.extend_from_slice(&breaks[1..breaks.len() - 1]);
        knots.extend(std::iter::repeat(breaks[breaks.len() - 1]).take(degree + 1));
        Self::new(knots, degree)
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of basis functions, `n = m - p - 1`.
    pub fn basis_count(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    pub fn first(&self) -> f64 {
        self.knots[0]
    }

    pub fn last(&self) -> f64 {
        self.knots[self.knots.len() - 1]
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.first(), self.last())
    }

    /// Clamp `xi` into the domain, tolerating round-off at the ends.
    pub fn check_domain(&self, xi: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        let slack = DOMAIN_SLACK * (hi - lo);
        if !(xi >= lo - slack && xi <= hi + slack) {
            return Err(Error::Domain { xi, lo, hi });
        }
        Ok(xi.clamp(lo, hi))
    }

    /// Index `i` with `knot[i] <= xi < knot[i+1]`; the right end of the
    /// domain maps to the last span of positive length.
    pub fn find_span(&self, xi: f64) -> Result<usize> {
        let xi = self.check_domain(xi)?;
        let n = self.basis_count();
        let p = self.degree;
        if xi >= self.knots[n] {
            let mut i = n - 1;
            while self.knots[i] >= self.knots[i + 1] {
                i -= 1;
            }
            return Ok(i);
        }
        let (mut lo, mut hi) = (p, n);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if xi < self.knots[mid] {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(lo)
    }

    /// Multiplicity of the knot value `xi`.
    pub fn multiplicity(&self, xi: f64) -> usize {
        self.knots.iter().filter(|&&k| k == xi).count()
    }

    /// Distinct interior knot values with their multiplicities.
    pub fn interior_breaks(&self) -> Vec<(f64, usize)> {
        let (lo, hi) = self.domain();
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &k in &self.knots {
            if k <= lo || k >= hi {
                continue;
            }
            match out.last_mut() {
                Some((v, m)) if *v == k => *m += 1,
                _ => out.push((k, 1)),
            }
        }
        out
    }

    /// Nonzero B-spline values `N_{span-p..=span, p}(xi)`.
    pub fn basis(&self, xi: f64) -> Result<(usize, Vec<f64>)> {
        let span = self.find_span(xi)?;
        let xi = self.check_domain(xi)?;
        Ok((span, self.basis_at_span(span, xi)))
    }

    fn basis_at_span(&self, span: usize, xi: f64) -> Vec<f64> {
        let p = self.degree;
        let u = &self.knots;
        let mut n = vec![0.0; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        n[0] = 1.0;
        for j in 1..=p {
            left[j] = xi - u[span + 1 - j];
            right[j] = u[span + j] - xi;
            let mut saved = 0.0;
            for r in 0..j {
                let temp = n[r] / (right[r + 1] + left[j - r]);
                n[r] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            n[j] = saved;
        }
        n
    }

    /// B-spline values and derivatives up to `order`: `table[k][l]` is the
    /// k-th derivative of local function `l`. Orders above the degree are
    /// identically zero.
    pub fn basis_derivs(&self, xi: f64, order: usize) -> Result<BasisTable> {
        let span = self.find_span(xi)?;
        let xi = self.check_domain(xi)?;
        Ok(BasisTable {
            first: span - self.degree,
            span,
            table: self.basis_derivs_at_span(span, xi, order),
        })
    }

    fn basis_derivs_at_span(&self, span: usize, xi: f64, order: usize) -> Vec<Vec<f64>> {
        let p = self.degree;
        let u = &self.knots;
        let mut ndu = vec![vec![0.0; p + 1]; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        ndu[0][0] = 1.0;
        for j in 1..=p {
            left[j] = xi - u[span + 1 - j];
            right[j] = u[span + j] - xi;
            let mut saved = 0.0;
            for r in 0..j {
                // lower triangle holds knot differences
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }

        let mut ders = vec![vec![0.0; p + 1]; order + 1];
        for j in 0..=p {
            ders[0][j] = ndu[j][p];
        }
        let kmax = order.min(p);
        let mut a = vec![vec![0.0; p + 1]; 2];
        for r in 0..=p {
            let (mut s1, mut s2) = (0usize, 1usize);
            a[0][0] = 1.0;
            for k in 1..=kmax {
                let mut d = 0.0;
                let rk = r as isize - k as isize;
                let pk = p - k;
                if r >= k {
                    a[s2][0] = a[s1][0] / ndu[pk + 1][rk as usize];
                    d = a[s2][0] * ndu[rk as usize][pk];
                }
                let j1 = if rk >= -1 { 1 } else { (-rk) as usize };
                let j2 = if (r as isize) - 1 <= pk as isize {
                    k - 1
                } else {
                    p - r
                };
                for j in j1..=j2 {
                    let idx = (rk + j as isize) as usize;
                    a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                    d += a[s2][j] * ndu[idx][pk];
                }
                if r <= pk {
                    a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                    d += a[s2][k] * ndu[r][pk];
                }
                ders[k][r] = d;
                std::mem::swap(&mut s1, &mut s2);
            }
        }
        let mut factor = p as f64;
        for k in 1..=kmax {
            for v in ders[k].iter_mut() {
                *v *= factor;
            }
            factor *= (p - k) as f64;
        }
        ders
    }

    /// Greville abscissae, one per basis function.
    pub fn greville(&self) -> Vec<f64> {
        let p = self.degree;
        (0..self.basis_count())
            .map(|a| self.knots[a + 1..=a + p].iter().sum::<f64>() / p as f64)
            .collect()
    }
}

/// Basis values (and derivatives) of the functions active on one span.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisTable {
    /// Global index of local function 0.
    pub first: usize,
    pub span: usize,
    /// `table[order][local]`.
    pub table: Vec<Vec<f64>>,
}

impl BasisTable {
    pub fn values(&self) -> &[f64] {
        &self.table[0]
    }

    pub fn order(&self, k: usize) -> &[f64] {
        &self.table[k]
    }

    pub fn len(&self) -> usize {
        self.table[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.table[0].is_empty()
    }
}

/// Point on the curve with its first two parametric derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub point: Vec2,
    pub d1: Vec2,
    pub d2: Vec2,
}

/// Local geometry at one parameter value.
///
/// The normal is `(sin α, −cos α)`, i.e. the tangent turned clockwise, and
/// its angle is `β = α − π/2`. Curvature is signed as `dα/ds`, so a circle
/// traversed counter-clockwise has positive curvature and an outward normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame {
    pub xi: f64,
    pub point: Vec2,
    pub first_deriv: Vec2,
    pub second_deriv: Vec2,
    /// `J₁ = |dC/dξ|`.
    pub jacobian: f64,
    pub tangent_angle: f64,
    pub normal_angle: f64,
    /// Signed `1/R`.
    pub curvature: f64,
    tangent: Vec2,
}

impl LocalFrame {
    pub fn tangent(&self) -> Vec2 {
        self.tangent
    }

    pub fn normal(&self) -> Vec2 {
        Vec2::new(self.tangent.y, -self.tangent.x)
    }
}

/// Rational (NURBS) curve over an open knot vector.
#[derive(Debug, Clone, PartialEq)]
pub struct NurbsCurve {
    knots: KnotVector,
    control_points: Vec<Vec2>,
    weights: Vec<f64>,
}

impl NurbsCurve {
    pub fn new(knots: KnotVector, control_points: Vec<Vec2>, weights: Vec<f64>) -> Result<Self> {
        let n = knots.basis_count();
        if control_points.len() != n || weights.len() != n {
            return Err(Error::Curve(format!(
                "{} control points and {} weights for {n} basis functions",
                control_points.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::Curve("weights must be finite and positive".into()));
        }
        if control_points.iter().any(|p| !p.is_finite()) {
            return Err(Error::Curve("non-finite control point".into()));
        }
        Ok(Self {
            knots,
            control_points,
            weights,
        })
    }

    /// Polynomial B-spline (all weights one).
    pub fn non_rational(knots: KnotVector, control_points: Vec<Vec2>) -> Result<Self> {
        let w = vec![1.0; control_points.len()];
        Self::new(knots, control_points, w)
    }

    pub fn knot_vector(&self) -> &KnotVector {
        &self.knots
    }

    pub fn degree(&self) -> usize {
        self.knots.degree()
    }

    pub fn control_points(&self) -> &[Vec2] {
        &self.control_points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn basis_count(&self) -> usize {
        self.control_points.len()
    }

    pub fn domain(&self) -> (f64, f64) {
        self.knots.domain()
    }

    /// Rational basis values and derivatives up to `order`.
    pub fn rational_basis(&self, xi: f64, order: usize) -> Result<BasisTable> {
        let b = self.knots.basis_derivs(xi, order)?;
        Ok(self.rationalize(b))
    }

    fn rationalize(&self, b: BasisTable) -> BasisTable {
        let order = b.table.len() - 1;
        let nloc = b.len();
        let w = &self.weights[b.first..b.first + nloc];
        let wders: Vec<f64> = (0..=order)
            .map(|k| (0..nloc).map(|l| b.table[k][l] * w[l]).sum())
            .collect();
        let mut r = vec![vec![0.0; nloc]; order + 1];
        for k in 0..=order {
            for l in 0..nloc {
                let mut v = w[l] * b.table[k][l];
                for j in 1..=k {
                    v -= binomial(k, j) * wders[j] * r[k - j][l];
                }
                r[k][l] = v / wders[0];
            }
        }
        BasisTable {
            first: b.first,
            span: b.span,
            table: r,
        }
    }

    /// `C(ξ)` and its first two parametric derivatives.
    pub fn eval(&self, xi: f64) -> Result<CurvePoint> {
        let rb = self.rational_basis(xi, 2)?;
        let mut out = CurvePoint {
            point: Vec2::ZERO,
            d1: Vec2::ZERO,
            d2: Vec2::ZERO,
        };
        for l in 0..rb.len() {
            let p = self.control_points[rb.first + l];
            out.point += rb.table[0][l] * p;
            out.d1 += rb.table[1][l] * p;
            out.d2 += rb.table[2][l] * p;
        }
        Ok(out)
    }

    pub fn point(&self, xi: f64) -> Result<Vec2> {
        let rb = self.rational_basis(xi, 0)?;
        Ok((0..rb.len()).fold(Vec2::ZERO, |acc, l| {
            acc + rb.table[0][l] * self.control_points[rb.first + l]
        }))
    }

    /// `C(ξ) − origin`, accumulated from control points taken relative to
    /// `origin`. Loses far less precision than subtracting two evaluated
    /// points when `C(ξ)` is close to `origin`.
    pub fn point_relative(&self, xi: f64, origin: Vec2) -> Result<Vec2> {
        let rb = self.rational_basis(xi, 0)?;
        Ok((0..rb.len()).fold(Vec2::ZERO, |acc, l| {
            acc + rb.table[0][l] * (self.control_points[rb.first + l] - origin)
        }))
    }

    pub fn frame(&self, xi: f64) -> Result<LocalFrame> {
        let cp = self.eval(xi)?;
        let jacobian = cp.d1.norm();
        let scale = self.parametric_scale();
        if !(jacobian > 1e-12 * scale) {
            return Err(Error::Geometry { xi, jacobian });
        }
        let tangent = cp.d1 * (1.0 / jacobian);
        let alpha = cp.d1.y.atan2(cp.d1.x);
        Ok(LocalFrame {
            xi,
            point: cp.point,
            first_deriv: cp.d1,
            second_deriv: cp.d2,
            jacobian,
            tangent_angle: alpha,
            normal_angle: alpha - FRAC_PI_2,
            curvature: cp.d1.cross(cp.d2) / (jacobian * jacobian * jacobian),
            tangent,
        })
    }

    /// Control-polygon extent divided by parametric length; the natural size
    /// of `|dC/dξ|`.
    fn parametric_scale(&self) -> f64 {
        let (lo, hi) = self.domain();
        let mut ext = 0.0f64;
        for p in &self.control_points {
            for q in &self.control_points {
                ext = ext.max((*p - *q).norm());
            }
        }
        ext.max(f64::MIN_POSITIVE) / (hi - lo)
    }

    pub fn greville(&self) -> Vec<f64> {
        self.knots.greville()
    }

    pub fn mesh(&self) -> ElementMesh {
        ElementMesh::new(&self.knots)
    }

    /// Same curve traversed in the opposite direction over the same domain.
    pub fn reversed(&self) -> NurbsCurve {
        let (lo, hi) = self.domain();
        let knots: Vec<f64> = self
            .knots
            .knots()
            .iter()
            .rev()
            .map(|k| lo + hi - k)
            .collect();
        NurbsCurve {
            knots: KnotVector {
                knots,
                degree: self.degree(),
            },
            control_points: self.control_points.iter().rev().copied().collect(),
            weights: self.weights.iter().rev().copied().collect(),
        }
    }

    /// Image under a map applied to the control points. Exact for affine maps.
    pub fn map_points(&self, f: impl Fn(Vec2) -> Vec2) -> NurbsCurve {
        NurbsCurve {
            knots: self.knots.clone(),
            control_points: self.control_points.iter().map(|&p| f(p)).collect(),
            weights: self.weights.clone(),
        }
    }

    pub fn scaled(&self, factor: f64) -> NurbsCurve {
        self.map_points(|p| p * factor)
    }

    pub fn rotated(&self, angle: f64) -> NurbsCurve {
        self.map_points(|p| p.rotated(angle))
    }

    /// Insert `xi` once (Boehm's algorithm in homogeneous coordinates).
    pub fn insert_knot(&self, xi: f64) -> Result<NurbsCurve> {
        let (lo, hi) = self.domain();
        if !(xi > lo && xi < hi) {
            return Err(Error::Domain { xi, lo, hi });
        }
        let p = self.degree();
        let u = self.knots.knots();
        let k = self.knots.find_span(xi)?;
        let s = self.knots.multiplicity(xi);
        if s >= p {
            return Err(Error::KnotVector(format!(
                "knot {xi} already has multiplicity {s}"
            )));
        }
        let n = self.basis_count();
        let hom: Vec<(Vec2, f64)> = self
            .control_points
            .iter()
            .zip(&self.weights)
            .map(|(&pt, &w)| (pt * w, w))
            .collect();
        let mut q = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let v = if i + p <= k {
                hom[i]
            } else if i <= k - s {
                let a = (xi - u[i]) / (u[i + p] - u[i]);
                (
                    a * hom[i].0 + (1.0 - a) * hom[i - 1].0,
                    a * hom[i].1 + (1.0 - a) * hom[i - 1].1,
                )
            } else {
                hom[i - 1]
            };
            q.push(v);
        }
        let mut knots = u.to_vec();
        knots.insert(k + 1, xi);
        let weights: Vec<f64> = q.iter().map(|v| v.1).collect();
        let points = q.iter().map(|v| v.0 * (1.0 / v.1)).collect();
        NurbsCurve::new(KnotVector::new(knots, p)?, points, weights)
    }

    /// Insert every value of `xis` once.
    pub fn refine(&self, xis: &[f64]) -> Result<NurbsCurve> {
        let mut c = self.clone();
        for &xi in xis {
            c = c.insert_knot(xi)?;
        }
        Ok(c)
    }

    /// Raise the degree of a single-span (Bézier) curve by one.
    pub fn elevate_bezier(&self) -> Result<NurbsCurve> {
        if !self.knots.interior_breaks().is_empty() {
            return Err(Error::Curve(
                "degree elevation is only supported for single-span curves".into(),
            ));
        }
        let p = self.degree();
        let hom: Vec<(Vec2, f64)> = self
            .control_points
            .iter()
            .zip(&self.weights)
            .map(|(&pt, &w)| (pt * w, w))
            .collect();
        let mut q = Vec::with_capacity(p + 2);
        q.push(hom[0]);
        for i in 1..=p {
            let a = i as f64 / (p + 1) as f64;
            q.push((
                a * hom[i - 1].0 + (1.0 - a) * hom[i].0,
                a * hom[i - 1].1 + (1.0 - a) * hom[i].1,
            ));
        }
        q.push(hom[p]);
        let (lo, hi) = self.domain();
        let mut knots = vec![lo; p + 2];
        knots.extend(std::iter::repeat(hi).take(p + 2));
        NurbsCurve::new(
            KnotVector::new(knots, p + 1)?,
            q.iter().map(|v| v.0 * (1.0 / v.1)).collect(),
            q.iter().map(|v| v.1).collect(),
        )
    }

    /// Checks required before the curve can carry the boundary integral
    /// equations: degree at least two, no C⁰ interior knots, non-vanishing
    /// Jacobian and distinct tips.
    pub fn validate_for_solver(&self) -> Result<()> {
        let p = self.degree();
        if p < 2 {
            return Err(Error::Curve(format!(
                "degree {p} is too low; at least 2 is required"
            )));
        }
        for (k, m) in self.knots.interior_breaks() {
            if m >= p {
                return Err(Error::Curve(format!(
                    "interior knot {k} has multiplicity {m}; the curve is only C0 there"
                )));
            }
        }
        let mesh = self.mesh();
        for el in &mesh.elements {
            for j in 0..=8 {
                let xi = el.start + (el.end - el.start) * j as f64 / 8.0;
                self.frame(xi)?;
            }
        }
        let (lo, hi) = self.domain();
        let tips = (self.point(hi)? - self.point(lo)?).norm();
        if !(tips > 1e-12 * self.parametric_scale() * (hi - lo)) {
            return Err(Error::Curve(
                "tips coincide; the surface must be open".into(),
            ));
        }
        Ok(())
    }

    /// Parse the plain-text curve format:
    ///
    /// ```text
    /// # comment
    /// degree 2
    /// knots 0 0 0 1 1 1
    /// cp 1 0 1
    /// cp 1 1 0.7071067811865476
    /// cp 0 1 1
    /// ```
    pub fn from_text(text: &str) -> Result<NurbsCurve> {
        let mut degree: Option<usize> = None;
        let mut knots: Option<Vec<f64>> = None;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tok = line.split_whitespace();
            let key = tok.next().unwrap_or_default();
            let nums: Vec<f64> = tok
                .map(|t| {
                    t.parse::<f64>().map_err(|_| Error::Parse {
                        line: line_no,
                        message: format!("not a number: {t:?}"),
                    })
                })
                .collect::<Result<_>>()?;
            match key {
                "degree" => {
                    if nums.len() != 1 || nums[0] < 1.0 || nums[0].fract() != 0.0 {
                        return Err(Error::Parse {
                            line: line_no,
                            message: "degree takes one positive integer".into(),
                        });
                    }
                    degree = Some(nums[0] as usize);
                }
                "knots" => knots = Some(nums),
                "cp" => {
                    if nums.len() != 3 {
                        return Err(Error::Parse {
                            line: line_no,
                            message: "cp takes x y w".into(),
                        });
                    }
                    points.push(Vec2::new(nums[0], nums[1]));
                    weights.push(nums[2]);
                }
                other => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("unknown keyword {other:?}"),
                    })
                }
            }
        }
        let degree = degree.ok_or(Error::Parse {
            line: 0,
            message: "missing degree".into(),
        })?;
        let knots = knots.ok_or(Error::Parse {
            line: 0,
            message: "missing knots".into(),
        })?;
        NurbsCurve::new(KnotVector::new(knots, degree)?, points, weights)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("degree {}\nknots", self.degree());
        for k in self.knots.knots() {
            s.push_str(&format!(" {k:?}"));
        }
        s.push('\n');
        for (p, w) in self.control_points.iter().zip(&self.weights) {
            s.push_str(&format!("cp {:?} {:?} {:?}\n", p.x, p.y, w));
        }
        s
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// One integration element: a knot span of positive length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element {
    pub start: f64,
    pub end: f64,
    /// Knot-span index `i` with `knot[i] = start`.
    pub span: usize,
    /// Global index of the first of the `p+1` active basis functions.
    pub first_basis: usize,
}

impl Element {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn contains(&self, xi: f64) -> bool {
        xi >= self.start && xi <= self.end
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementMesh {
    pub degree: usize,
    pub elements: Vec<Element>,
    pub collocation: Vec<f64>,
}

impl ElementMesh {
    pub fn new(kv: &KnotVector) -> Self {
        let p = kv.degree();
        let u = kv.knots();
        let elements = (p..kv.basis_count())
            .filter(|&i| u[i + 1] > u[i])
            .map(|i| Element {
                start: u[i],
                end: u[i + 1],
                span: i,
                first_basis: i - p,
            })
            .collect();
        Self {
            degree: p,
            elements,
            collocation: kv.greville(),
        }
    }

    /// Global basis index of local function `local` on element `e`.
    pub fn conn(&self, e: usize, local: usize) -> usize {
        self.elements[e].first_basis + local
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    /// Elements whose closed interval contains `xi` (one, or two at a knot).
    pub fn elements_containing(&self, xi: f64) -> Vec<usize> {
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, e)| e.contains(xi))
            .map(|(i, _)| i)
            .collect()
    }
}
