//! Collocation of the coupled surface-stress integral equations.
//!
//! Unknowns are the control coefficients `d` of σ^S followed by `q` of ω^S.
//! Every collocation point yields one σ^S row and one ω^S row:
//!
//! ```text
//! σ^S(y₀) − ∫ K_σ · Δt ds = σ₀ + (λ_S + 2μ_S) t₀·∂u^∞/∂s
//! ω^S(y₀) − ∫ K_ω · Δt ds = n₀·∂u^∞/∂s
//! ```
//!
//! with `Δt` the traction jump generated by the basis functions.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::kernels::{
    farfield_projections, phi_sin_cos, BulkMaterial, FarFieldLoad, SurfaceMaterial,
};
use crate::linalg::{self, DenseMatrix, DenseSolve};
use crate::nurbs::{ElementMesh, LocalFrame, NurbsCurve};
use crate::quadrature::{graded_pieces, singular_plan, PieceKind, QuadratureRule, SingularPolicy};

/// Parametric distance, relative to the domain, below which a point is
/// moved onto an element boundary.
const KNOT_SNAP: f64 = 1e-10;
/// Cap on the bisection depth of an element adjacent to the point.
const MAX_NEAR_LEVELS: usize = 60;

/// Which Jacobian multiplies the curvature inside the jump densities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CurvatureScaling {
    /// `J₁(ξ)/R(ξ)` at the integration point.
    #[default]
    Local,
    /// `J₁(ξ′)/R(ξ)` with the Jacobian frozen at the collocation point.
    Collocation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyOptions {
    /// Gauss order on every regular element (and sub-piece).
    pub regular_order: usize,
    pub singular: SingularPolicy,
    /// Bisection depth toward `ξ′` for elements close to, but not
    /// containing, it. Deeper splits are added when `ξ′` lies closer to
    /// the element than its length over `2^near_levels`.
    pub near_levels: usize,
    pub curvature_scaling: CurvatureScaling,
    pub parallel: bool,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self {
            regular_order: 200,
            singular: SingularPolicy::default(),
            near_levels: 3,
            curvature_scaling: CurvatureScaling::Local,
            parallel: true,
        }
    }
}

/// Curve, materials and load of one boundary-value problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub curve: NurbsCurve,
    pub bulk: BulkMaterial,
    pub surface: SurfaceMaterial,
    pub load: FarFieldLoad,
}

impl Problem {
    pub fn new(
        curve: NurbsCurve,
        bulk: BulkMaterial,
        surface: SurfaceMaterial,
        load: FarFieldLoad,
    ) -> Result<Self> {
        curve.validate_for_solver()?;
        Ok(Self {
            curve,
            bulk,
            surface,
            load,
        })
    }

    pub fn basis_count(&self) -> usize {
        self.curve.basis_count()
    }
}

/// `A·X = B` with `X = (d₁…d_n, q₁…q_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
    /// Basis count `n`; the system has `2n` rows.
    pub n: usize,
    /// Rows overwritten by tip constraints.
    pub replaced_rows: Vec<usize>,
}

/// The σ^S and ω^S equations collocated at one parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct RowPair {
    pub xi: f64,
    pub sigma: Vec<f64>,
    pub omega: Vec<f64>,
    pub rhs_sigma: f64,
    pub rhs_omega: f64,
}

/// Analytic `lim (ξ − ξ′) f(ξ)` of one column's integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnLimit {
    pub column: usize,
    pub sigma: f64,
    pub omega: f64,
}

/// Geometry and basis data at one integration point.
#[derive(Debug, Clone)]
struct Sample {
    weight: f64,
    /// Position relative to the origin it was sampled against.
    rel: Vec2,
    tangent: Vec2,
    normal: Vec2,
    jacobian: f64,
    curvature: f64,
    first: usize,
    r: Vec<f64>,
    dr: Vec<f64>,
}

fn sample(curve: &NurbsCurve, xi: f64, weight: f64, origin: Vec2) -> Result<Sample> {
    let b = curve.rational_basis(xi, 2)?;
    let cps = curve.control_points();
    let (mut rel, mut d1, mut d2) = (Vec2::ZERO, Vec2::ZERO, Vec2::ZERO);
    for l in 0..b.len() {
        let p = cps[b.first + l];
        rel += b.table[0][l] * (p - origin);
        d1 += b.table[1][l] * p;
        d2 += b.table[2][l] * p;
    }
    let jacobian = d1.norm();
    if !(jacobian > 0.0) {
        return Err(Error::Geometry { xi, jacobian });
    }
    let tangent = d1 * (1.0 / jacobian);
    Ok(Sample {
        weight,
        rel,
        tangent,
        normal: Vec2::new(tangent.y, -tangent.x),
        jacobian,
        curvature: d1.cross(d2) / (jacobian * jacobian * jacobian),
        first: b.first,
        r: b.table[0].clone(),
        dr: b.table[1].clone(),
    })
}

/// Builds collocation rows for one problem. Regular element data is sampled
/// once and shared by all rows.
pub struct Assembler<'a> {
    problem: &'a Problem,
    opts: AssemblyOptions,
    mesh: ElementMesh,
    regular: QuadratureRule,
    singular: QuadratureRule,
    cache: Vec<Vec<Sample>>,
}

struct RowContext {
    y0: Vec2,
    t0: Vec2,
    n0: Vec2,
    sin0: f64,
    cos0: f64,
    j0: f64,
    xi0: f64,
}

impl<'a> Assembler<'a> {
    pub fn new(problem: &'a Problem, opts: AssemblyOptions) -> Result<Self> {
        opts.singular.validate()?;
        let mesh = problem.curve.mesh();
        let regular = QuadratureRule::gauss_legendre(opts.regular_order)?;
        let singular = QuadratureRule::gauss_legendre(opts.singular.gauss_order_singular)?;
        let cache = mesh
            .elements
            .iter()
            .map(|el| {
                regular
                    .mapped(el.start, el.end)
                    .map(|(x, w)| sample(&problem.curve, x, w, Vec2::ZERO))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            problem,
            opts,
            mesh,
            regular,
            singular,
            cache,
        })
    }

    pub fn mesh(&self) -> &ElementMesh {
        &self.mesh
    }

    pub fn options(&self) -> &AssemblyOptions {
        &self.opts
    }

    fn n(&self) -> usize {
        self.problem.basis_count()
    }

    fn stiffness(&self) -> f64 {
        self.problem.surface.stiffness()
    }

    fn context(&self, frame: &LocalFrame) -> RowContext {
        let (sin0, cos0) = frame.normal_angle.sin_cos();
        RowContext {
            y0: frame.point,
            t0: frame.tangent(),
            n0: frame.normal(),
            sin0,
            cos0,
            j0: frame.jacobian,
            xi0: frame.xi,
        }
    }

    /// Cartesian jump densities (times `J₁`) produced by local function `l`
    /// through `d` and through `q`.
    fn densities(&self, s: &Sample, l: usize, j0: f64) -> (Vec2, Vec2) {
        let jfac = match self.opts.curvature_scaling {
            CurvatureScaling::Local => s.jacobian,
            CurvatureScaling::Collocation => j0,
        };
        let kr = jfac * s.curvature * s.r[l];
        let phid = s.tangent * s.dr[l] - s.normal * kr;
        let phiq = (s.tangent * kr + s.normal * s.dr[l]) * self.problem.surface.sigma0();
        (phid, phiq)
    }

    /// `lim (ξ − ξ′) f(ξ)` for every column active at `ξ′`.
    pub fn singular_limits(&self, frame: &LocalFrame) -> Result<Vec<ColumnLimit>> {
        let s = sample(&self.problem.curve, frame.xi, 0.0, frame.point)?;
        let ctx = self.context(frame);
        Ok(self.limits_from(&s, &ctx))
    }

    fn limits_from(&self, s: &Sample, ctx: &RowContext) -> Vec<ColumnLimit> {
        let n = self.n();
        let bulk = &self.problem.bulk;
        let c = bulk.kappa() / bulk.kernel_denominator();
        let stiff = self.stiffness();
        let mut out = Vec::with_capacity(2 * s.r.len());
        for l in 0..s.r.len() {
            let (phid, phiq) = self.densities(s, l, ctx.j0);
            let g = s.first + l;
            for (col, phi) in [(g, phid), (n + g, phiq)] {
                out.push(ColumnLimit {
                    column: col,
                    sigma: stiff * c * phi.dot(ctx.t0) / ctx.j0,
                    omega: c * phi.dot(ctx.n0) / ctx.j0,
                });
            }
        }
        out
    }

    /// Adds `w · K · Δt` for all columns at one sample into the integral
    /// accumulators.
    fn accumulate(
        &self,
        s: &Sample,
        offset: Vec2,
        ctx: &RowContext,
        sig: &mut [f64],
        om: &mut [f64],
        element: usize,
    ) -> Result<()> {
        let n = self.n();
        let bulk = &self.problem.bulk;
        let kap = bulk.kappa();
        let cinv = 1.0 / bulk.kernel_denominator();
        let stiff = self.stiffness();
        let k = phi_sin_cos(offset, ctx.sin0, ctx.cos0).map_err(|e| Error::Assembly {
            xi: ctx.xi0,
            element,
            reason: e.to_string(),
        })?;
        // the density-side kernels act with r = y0 − y
        let (p1, p2, p3) = (-k.phi1, -k.phi2, -k.phi3);
        let (s0, c0) = (ctx.sin0, ctx.cos0);
        let a_sig = (Vec2::new(s0, -c0) * (kap * p1) - Vec2::new(s0, c0) * p2
            + Vec2::new(c0, -s0) * p3)
            * (stiff * cinv);
        let a_om =
            (Vec2::new(c0, s0) * (-kap * p1) + Vec2::new(c0, -s0) * p2 + Vec2::new(s0, c0) * p3)
                * cinv;
        for l in 0..s.r.len() {
            let (phid, phiq) = self.densities(s, l, ctx.j0);
            let g = s.first + l;
            sig[g] += s.weight * a_sig.dot(phid);
            sig[n + g] += s.weight * a_sig.dot(phiq);
            om[g] += s.weight * a_om.dot(phid);
            om[n + g] += s.weight * a_om.dot(phiq);
        }
        Ok(())
    }

    /// Element boundaries closer than round-off are taken as the point itself;
    /// otherwise the adjacent element would be near-singular at distance ~1e-16.
    fn snap_to_knot(&self, xi: f64) -> f64 {
        let (lo, hi) = self.problem.curve.domain();
        let tol = KNOT_SNAP * (hi - lo);
        self.mesh
            .elements
            .iter()
            .flat_map(|e| [e.start, e.end])
            .find(|k| (k - xi).abs() <= tol)
            .unwrap_or(xi)
    }

    /// Both equations collocated at `ξ′` (any parameter in the domain).
    pub fn rows_at(&self, xi0: f64) -> Result<RowPair> {
        let curve = &self.problem.curve;
        let n = self.n();
        let frame = curve.frame(self.snap_to_knot(xi0))?;
        let ctx = self.context(&frame);
        let mut sig = vec![0.0; 2 * n];
        let mut om = vec![0.0; 2 * n];
        // Offsets near ξ′ are taken from a nearby control point, so their
        // rounding scales with the element size rather than with |y₀|.
        let anchor = curve.control_points()[curve.rational_basis(frame.xi, 0)?.first];
        let y0a = curve.point_relative(frame.xi, anchor)?;

        let near: Vec<usize> = self.mesh.elements_containing(frame.xi);
        let lo = self.mesh.elements[near[0]].start;
        let hi = self.mesh.elements[*near.last().expect("non-empty")].end;

        for (e, el) in self.mesh.elements.iter().enumerate() {
            if near.contains(&e) {
                continue;
            }
            let dist = (el.start - frame.xi).max(frame.xi - el.end);
            if dist < el.len() {
                // at least `near_levels`, more when the point hugs the element
                let levels = self
                    .opts
                    .near_levels
                    .max((el.len() / dist).log2().ceil() as usize + 1);
                for (a, b) in graded_pieces(el.start, el.end, frame.xi, levels.min(MAX_NEAR_LEVELS))
                {
                    for (x, w) in self.regular.mapped(a, b) {
                        let s = sample(curve, x, w, anchor)?;
                        self.accumulate(&s, s.rel - y0a, &ctx, &mut sig, &mut om, e)?;
                    }
                }
            } else {
                for s in &self.cache[e] {
                    self.accumulate(s, s.rel - ctx.y0, &ctx, &mut sig, &mut om, e)?;
                }
            }
        }

        let plan = singular_plan(lo, hi, frame.xi, &self.opts.singular)?;
        let mut pole_sum = 0.0;
        for piece in &plan.pieces {
            let rule = match piece.kind {
                PieceKind::Regular => &self.regular,
                PieceKind::Subtracted => &self.singular,
            };
            for (x, w) in rule.mapped(piece.a, piece.b) {
                let s = sample(curve, x, w, anchor)?;
                let e = if x <= self.mesh.elements[near[0]].end {
                    near[0]
                } else {
                    near[near.len() - 1]
                };
                self.accumulate(&s, s.rel - y0a, &ctx, &mut sig, &mut om, e)?;
                if piece.kind == PieceKind::Subtracted {
                    pole_sum += w / (x - frame.xi);
                }
            }
        }
        let at0 = sample(curve, frame.xi, 0.0, ctx.y0)?;
        for lim in self.limits_from(&at0, &ctx) {
            let corr = plan.log_weight - pole_sum;
            sig[lim.column] += lim.sigma * corr;
            om[lim.column] += lim.omega * corr;
        }

        let mut sigma: Vec<f64> = sig.iter().map(|v| -v).collect();
        let mut omega: Vec<f64> = om.iter().map(|v| -v).collect();
        for (l, &r) in at0.r.iter().enumerate() {
            sigma[at0.first + l] += r;
            omega[n + at0.first + l] += r;
        }
        if let Some(bad) = sigma.iter().chain(&omega).position(|v| !v.is_finite()) {
            return Err(Error::Assembly {
                xi: frame.xi,
                element: near[0],
                reason: format!("non-finite entry in column {}", bad % (2 * n)),
            });
        }
        let (pt, pn) =
            farfield_projections(&self.problem.load, &self.problem.bulk, frame.normal_angle);
        Ok(RowPair {
            xi: frame.xi,
            sigma,
            omega,
            rhs_sigma: self.problem.surface.sigma0() + self.stiffness() * pt,
            rhs_omega: pn,
        })
    }

    /// Raw collocation system at the Greville abscissae, before tip
    /// constraints.
    pub fn assemble(&self) -> Result<LinearSystem> {
        let n = self.n();
        let pts = &self.mesh.collocation;
        let rows: Vec<RowPair> = if self.opts.parallel {
            pts.par_iter()
                .map(|&x| self.rows_at(x))
                .collect::<Result<_>>()?
        } else {
            pts.iter()
                .map(|&x| self.rows_at(x))
                .collect::<Result<_>>()?
        };
        let mut matrix = DenseMatrix::zeros(2 * n);
        let mut rhs = vec![0.0; 2 * n];
        for (a, rp) in rows.into_iter().enumerate() {
            matrix.row_mut(a).copy_from_slice(&rp.sigma);
            matrix.row_mut(n + a).copy_from_slice(&rp.omega);
            rhs[a] = rp.rhs_sigma;
            rhs[n + a] = rp.rhs_omega;
        }
        Ok(LinearSystem {
            matrix,
            rhs,
            n,
            replaced_rows: Vec::new(),
        })
    }
}

/// Replace tip rows by `σ^S(tip) = 0`, and by `ω^S(tip) = 0` when `σ₀ ≠ 0`.
pub fn apply_tip_conditions(
    mut sys: LinearSystem,
    curve: &NurbsCurve,
    sigma0: f64,
) -> Result<LinearSystem> {
    let n = sys.n;
    if curve.basis_count() != n {
        return Err(Error::Dimension {
            expected: n,
            found: curve.basis_count(),
        });
    }
    let (lo, hi) = curve.domain();
    let mut tips = vec![(0usize, lo), (n - 1, hi)];
    if sigma0 != 0.0 {
        tips.extend([(n, lo), (2 * n - 1, hi)]);
    }
    for (row, xi) in tips {
        let b = curve.rational_basis(xi, 0)?;
        let offset = if row >= n { n } else { 0 };
        let r = sys.matrix.row_mut(row);
        r.iter_mut().for_each(|v| *v = 0.0);
        for (l, &v) in b.values().iter().enumerate() {
            r[offset + b.first + l] = v;
        }
        sys.rhs[row] = 0.0;
        sys.replaced_rows.push(row);
    }
    Ok(sys)
}

pub fn solve_dense(sys: &LinearSystem) -> Result<DenseSolve> {
    linalg::solve(&sys.matrix, &sys.rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nurbs::KnotVector;
    use approx::assert_relative_eq;

    fn segment(ne: usize) -> NurbsCurve {
        let kv = KnotVector::uniform(2, ne).unwrap();
        let pts = kv
            .greville()
            .iter()
            .map(|&g| Vec2::new(-5.0 + 10.0 * g, 0.0))
            .collect();
        NurbsCurve::non_rational(kv, pts).unwrap()
    }

    fn problem(curve: NurbsCurve, stiff: f64, s0: f64, load: FarFieldLoad) -> Problem {
        Problem::new(
            curve,
            BulkMaterial::new(2.0, 0.35).unwrap(),
            SurfaceMaterial::from_stiffness(stiff, s0).unwrap(),
            load,
        )
        .unwrap()
    }

    fn opts() -> AssemblyOptions {
        AssemblyOptions {
            regular_order: 40,
            ..Default::default()
        }
    }

    #[test]
    fn tip_rows_are_unit_rows() {
        let p = problem(segment(6), 100.0, 0.2, FarFieldLoad::new(0.1, 0.0, 0.0));
        let asm = Assembler::new(&p, opts()).unwrap();
        let sys = asm.assemble().unwrap();
        let n = sys.n;
        let t = apply_tip_conditions(sys.clone(), &p.curve, 0.2).unwrap();
        assert_eq!(t.replaced_rows.len(), 4);
        for &r in &[0, n - 1, n, 2 * n - 1] {
            let nz: Vec<_> = t.matrix.row(r).iter().filter(|v| **v != 0.0).collect();
            assert_eq!(nz, vec![&1.0]);
            assert_eq!(t.rhs[r], 0.0);
        }
        let t0 = apply_tip_conditions(sys, &p.curve, 0.0).unwrap();
        assert_eq!(t0.replaced_rows.len(), 2);
    }

    #[test]
    fn zero_load_without_tension_gives_zero_rhs() {
        let p = problem(segment(6), 100.0, 0.0, FarFieldLoad::default());
        let sys = Assembler::new(&p, opts()).unwrap().assemble().unwrap();
        assert!(sys.rhs.iter().all(|&v| v == 0.0));
        let p = problem(segment(6), 100.0, 0.3, FarFieldLoad::default());
        let sys = Assembler::new(&p, opts()).unwrap().assemble().unwrap();
        let n = sys.n;
        assert!(sys.rhs[..n].iter().all(|&v| v == 0.3));
        assert!(sys.rhs[n..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn straight_segment_limits() {
        let p = problem(segment(4), 1.0, 0.0, FarFieldLoad::default());
        let asm = Assembler::new(&p, opts()).unwrap();
        let f = p.curve.frame(0.375).unwrap();
        let lims = asm.singular_limits(&f).unwrap();
        let b = p.curve.rational_basis(0.375, 1).unwrap();
        let c = p.bulk.kappa() / p.bulk.kernel_denominator();
        for (l, lim) in lims
            .iter()
            .filter(|x| x.column < p.basis_count())
            .enumerate()
        {
            // on a straight line only R' t survives: h = c κ R'/J1 per unit density
            assert_relative_eq!(lim.sigma, c * b.table[1][l] / f.jacobian, epsilon = 1e-14);
            assert_eq!(lim.omega, 0.0);
        }
    }

    #[test]
    fn assembly_is_deterministic() {
        let p = problem(segment(8), 50.0, 0.1, FarFieldLoad::new(0.05, 0.01, 0.02));
        let mut o = opts();
        let a = Assembler::new(&p, o).unwrap().assemble().unwrap();
        let b = Assembler::new(&p, o).unwrap().assemble().unwrap();
        o.parallel = false;
        let c = Assembler::new(&p, o).unwrap().assemble().unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }
}
