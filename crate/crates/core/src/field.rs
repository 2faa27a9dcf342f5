//! Post-processing of a solved surface: stress profiles along the curve,
//! traction jumps, and bulk displacement/stress anywhere off the surface.

use std::time::Instant;

use crate::assembly::{apply_tip_conditions, solve_dense, Assembler, AssemblyOptions, Problem};
use crate::error::{Error, Result};
use crate::geom::{Sym2, Vec2};
use crate::kernels::{
    farfield_displacement, kelvin, kelvin_gradient, local_jump, LocalJump, StressState,
    SurfaceState,
};
use crate::nurbs::{ElementMesh, NurbsCurve};
use crate::quadrature::QuadratureRule;

/// Points closer to an element than this fraction of its length are refused.
pub const NEAR_FIELD_FRACTION: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveDiagnostics {
    pub relative_residual: f64,
    pub condition_1: f64,
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
    pub unknowns: usize,
}

/// Control coefficients of σ^S (`d`) and ω^S (`q`) on the curve basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSolution {
    pub problem: Problem,
    pub d: Vec<f64>,
    pub q: Vec<f64>,
    pub diagnostics: SolveDiagnostics,
}

impl SurfaceSolution {
    pub fn solve(problem: &Problem, opts: &AssemblyOptions) -> Result<Self> {
        let t0 = Instant::now();
        let asm = Assembler::new(problem, *opts)?;
        let sys = asm.assemble()?;
        let sys = apply_tip_conditions(sys, &problem.curve, problem.surface.sigma0())?;
        let t1 = Instant::now();
        let sol = solve_dense(&sys)?;
        let t2 = Instant::now();
        Self::from_unknowns(
            problem.clone(),
            &sol.x,
            SolveDiagnostics {
                relative_residual: sol.relative_residual,
                condition_1: sol.condition_1,
                assembly_seconds: (t1 - t0).as_secs_f64(),
                solve_seconds: (t2 - t1).as_secs_f64(),
                unknowns: sys.n * 2,
            },
        )
    }

    pub fn from_unknowns(
        problem: Problem,
        x: &[f64],
        diagnostics: SolveDiagnostics,
    ) -> Result<Self> {
        let n = problem.basis_count();
        if x.len() != 2 * n {
            return Err(Error::Dimension {
                expected: 2 * n,
                found: x.len(),
            });
        }
        Ok(Self {
            problem,
            d: x[..n].to_vec(),
            q: x[n..].to_vec(),
            diagnostics,
        })
    }

    pub fn unknowns(&self) -> Vec<f64> {
        self.d.iter().chain(&self.q).copied().collect()
    }

    pub fn curve(&self) -> &NurbsCurve {
        &self.problem.curve
    }

    /// σ^S, ω^S and their arc-length derivatives at `ξ`.
    pub fn surface_state(&self, xi: f64) -> Result<(SurfaceState, f64)> {
        let b = self.curve().rational_basis(xi, 1)?;
        let f = self.curve().frame(xi)?;
        let mut st = SurfaceState {
            sigma: 0.0,
            omega: 0.0,
            dsigma_ds: 0.0,
            domega_ds: 0.0,
        };
        for l in 0..b.len() {
            let g = b.first + l;
            st.sigma += b.table[0][l] * self.d[g];
            st.omega += b.table[0][l] * self.q[g];
            st.dsigma_ds += b.table[1][l] * self.d[g];
            st.domega_ds += b.table[1][l] * self.q[g];
        }
        st.dsigma_ds /= f.jacobian;
        st.domega_ds /= f.jacobian;
        Ok((st, f.curvature))
    }

    /// Surface profile sample at `ξ`.
    pub fn surface_fields(&self, table: &ArcLengthTable, xi: f64) -> Result<SurfaceFieldSample> {
        let (st, curv) = self.surface_state(xi)?;
        let s0 = self.problem.surface.sigma0();
        let k = self.problem.surface.stiffness();
        let jump = local_jump(curv, &st, s0);
        Ok(SurfaceFieldSample {
            xi,
            s_tilde: table.normalized(xi)?,
            sigma_s: st.sigma,
            omega_s: st.omega,
            dsigma_ds: st.dsigma_ds,
            domega_ds: st.domega_ds,
            eps_s: if k > 0.0 {
                Some((st.sigma - s0) / k)
            } else {
                None
            },
            jump,
        })
    }

    /// Largest `|σ^S|` and `|ω^S|` over `samples` uniform parameters.
    pub fn max_abs(&self, samples: usize) -> Result<(f64, f64)> {
        let (lo, hi) = self.curve().domain();
        let mut m = (0.0f64, 0.0f64);
        for k in 0..samples {
            let xi = lo + (hi - lo) * k as f64 / (samples - 1) as f64;
            let (st, _) = self.surface_state(xi)?;
            m.0 = m.0.max(st.sigma.abs());
            m.1 = m.1.max(st.omega.abs());
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceFieldSample {
    pub xi: f64,
    pub s_tilde: f64,
    pub sigma_s: f64,
    pub omega_s: f64,
    pub dsigma_ds: f64,
    pub domega_ds: f64,
    /// Undefined for a surface with zero stiffness.
    pub eps_s: Option<f64>,
    pub jump: LocalJump,
}

/// Cumulative arc length per element, 64-point Gauss.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcLengthTable {
    curve: NurbsCurve,
    mesh: ElementMesh,
    cumulative: Vec<f64>,
    rule: QuadratureRule,
}

impl ArcLengthTable {
    pub fn new(curve: &NurbsCurve) -> Result<Self> {
        let mesh = curve.mesh();
        let rule = QuadratureRule::gauss_legendre(64)?;
        let mut cumulative = vec![0.0];
        for el in &mesh.elements {
            let len = element_length(curve, &rule, el.start, el.end)?;
            cumulative.push(cumulative.last().expect("non-empty") + len);
        }
        Ok(Self {
            curve: curve.clone(),
            mesh,
            cumulative,
            rule,
        })
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().expect("non-empty")
    }

    pub fn element_lengths(&self) -> Vec<f64> {
        self.cumulative.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn arc_length(&self, xi: f64) -> Result<f64> {
        let xi = self.curve.knot_vector().check_domain(xi)?;
        let e = self
            .mesh
            .elements
            .iter()
            .position(|el| xi <= el.end)
            .unwrap_or(self.mesh.elements.len() - 1);
        let el = self.mesh.elements[e];
        Ok(self.cumulative[e] + element_length(&self.curve, &self.rule, el.start, xi)?)
    }

    /// `s̃ = s / L`.
    pub fn normalized(&self, xi: f64) -> Result<f64> {
        Ok(self.arc_length(xi)? / self.total())
    }

    /// Parameter at normalized arc length `s̃`, by bisection.
    pub fn parameter_at(&self, s_tilde: f64) -> Result<f64> {
        let (mut lo, mut hi) = self.curve.domain();
        let target = s_tilde.clamp(0.0, 1.0) * self.total();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.arc_length(mid)? < target {
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
}

fn element_length(curve: &NurbsCurve, rule: &QuadratureRule, a: f64, b: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let mut acc = 0.0;
    for (x, w) in rule.mapped(a, b) {
        acc += w * curve.eval(x)?.d1.norm();
    }
    Ok(acc)
}

/// Bulk fields at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub point: Vec2,
    pub u: Vec2,
    /// `∂u_k/∂x_m` stored row-wise as `[[u1,1, u1,2], [u2,1, u2,2]]`.
    pub grad: [[f64; 2]; 2],
    pub eps: Sym2,
    pub stress: StressState,
    pub von_mises: f64,
    /// `σ_v / σ_v^∞`; `None` when the remote Von Mises stress vanishes.
    pub relative_von_mises: Option<f64>,
}

pub fn von_mises(stress: &StressState) -> f64 {
    stress.von_mises()
}

pub fn relative_von_mises(stress: &StressState, reference: &StressState) -> Result<f64> {
    let r = reference.von_mises();
    if r == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok(stress.von_mises() / r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldOptions {
    pub gauss_order: usize,
    pub near_fraction: f64,
    pub max_depth: usize,
}

impl Default for FieldOptions {
    fn default() -> Self {
        Self {
            gauss_order: 32,
            near_fraction: NEAR_FIELD_FRACTION,
            max_depth: 40,
        }
    }
}

#[derive(Debug, Clone)]
struct JumpPoint {
    y: Vec2,
    /// `Δt · J₁ · w`.
    jump_w: Vec2,
}

/// Evaluates single-layer bulk fields for one solution. Element quadrature
/// data is cached; elements close to the field point are subdivided.
#[derive(Debug, Clone)]
pub struct FieldEvaluator<'a> {
    sol: &'a SurfaceSolution,
    opts: FieldOptions,
    rule: QuadratureRule,
    mesh: ElementMesh,
    cached: Vec<Vec<JumpPoint>>,
    polylines: Vec<Vec<Vec2>>,
    lengths: Vec<f64>,
    reference: StressState,
}

impl<'a> FieldEvaluator<'a> {
    pub fn new(sol: &'a SurfaceSolution, opts: FieldOptions) -> Result<Self> {
        let rule = QuadratureRule::gauss_legendre(opts.gauss_order)?;
        let mesh = sol.curve().mesh();
        let mut cached = Vec::with_capacity(mesh.element_count());
        let mut polylines = Vec::with_capacity(mesh.element_count());
        for el in &mesh.elements {
            cached.push(
                rule.mapped(el.start, el.end)
                    .map(|(x, w)| jump_point(sol, x, w))
                    .collect::<Result<Vec<_>>>()?,
            );
            polylines.push(
                (0..=32)
                    .map(|k| {
                        sol.curve()
                            .point(el.start + (el.end - el.start) * k as f64 / 32.0)
                    })
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let lengths = ArcLengthTable::new(sol.curve())?.element_lengths();
        Ok(Self {
            reference: sol.problem.load.stress_state(&sol.problem.bulk),
            sol,
            opts,
            rule,
            mesh,
            cached,
            polylines,
            lengths,
        })
    }

    /// Distance from `x` to the curve (polyline approximation).
    pub fn distance_to_surface(&self, x: Vec2) -> f64 {
        self.polylines
            .iter()
            .map(|p| polyline_distance(p, x))
            .fold(f64::INFINITY, f64::min)
    }

    fn check_near(&self, x: Vec2) -> Result<Vec<f64>> {
        let mut dists = Vec::with_capacity(self.polylines.len());
        for (p, &len) in self.polylines.iter().zip(&self.lengths) {
            let d = polyline_distance(p, x);
            let threshold = self.opts.near_fraction * len;
            if d < threshold {
                return Err(Error::NearSurface {
                    distance: d,
                    threshold,
                });
            }
            dists.push(d);
        }
        Ok(dists)
    }

    /// Visits every `(y, Δt J₁ w)` quadrature pair needed for point `x`.
    fn for_each_point(&self, x: Vec2, mut f: impl FnMut(Vec2, Vec2) -> Result<()>) -> Result<()> {
        let dists = self.check_near(x)?;
        for (e, el) in self.mesh.elements.iter().enumerate() {
            if dists[e] >= self.lengths[e] {
                for jp in &self.cached[e] {
                    f(jp.y, jp.jump_w)?;
                }
            } else {
                self.subdivide(x, el.start, el.end, 0, &mut f)?;
            }
        }
        Ok(())
    }

    fn subdivide(
        &self,
        x: Vec2,
        a: f64,
        b: f64,
        depth: usize,
        f: &mut impl FnMut(Vec2, Vec2) -> Result<()>,
    ) -> Result<()> {
        let pts: Vec<Vec2> = (0..=4)
            .map(|k| self.sol.curve().point(a + (b - a) * k as f64 / 4.0))
            .collect::<Result<_>>()?;
        let len: f64 = pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
        let dist = polyline_distance(&pts, x);
        if len <= dist || depth >= self.opts.max_depth {
            for (xi, w) in self.rule.mapped(a, b) {
                let jp = jump_point(self.sol, xi, w)?;
                f(jp.y, jp.jump_w)?;
            }
            return Ok(());
        }
        let m = 0.5 * (a + b);
        self.subdivide(x, a, m, depth + 1, f)?;
        self.subdivide(x, m, b, depth + 1, f)
    }

    pub fn displacement_at(&self, x: Vec2) -> Result<Vec2> {
        let bulk = &self.sol.problem.bulk;
        let mut u = farfield_displacement(&self.sol.problem.load, bulk, x);
        self.for_each_point(x, |y, dt| {
            let g = kelvin(x, y, bulk)?;
            u.x += g[0][0] * dt.x + g[0][1] * dt.y;
            u.y += g[1][0] * dt.x + g[1][1] * dt.y;
            Ok(())
        })?;
        Ok(u)
    }

    pub fn stress_at(&self, x: Vec2) -> Result<FieldSample> {
        let bulk = &self.sol.problem.bulk;
        let load = &self.sol.problem.load;
        let h = load.displacement_gradient(bulk);
        let mut u = farfield_displacement(load, bulk, x);
        let mut grad = [[h.xx, h.xy], [h.xy, h.yy]];
        self.for_each_point(x, |y, dt| {
            let g = kelvin(x, y, bulk)?;
            let dg = kelvin_gradient(x, y, bulk)?;
            u.x += g[0][0] * dt.x + g[0][1] * dt.y;
            u.y += g[1][0] * dt.x + g[1][1] * dt.y;
            for (k, row) in grad.iter_mut().enumerate() {
                for (m, v) in row.iter_mut().enumerate() {
                    *v += dg[m][k][0] * dt.x + dg[m][k][1] * dt.y;
                }
            }
            Ok(())
        })?;
        let eps = Sym2::new(grad[0][0], 0.5 * (grad[0][1] + grad[1][0]), grad[1][1]);
        let stress = bulk.hooke(eps);
        Ok(FieldSample {
            point: x,
            u,
            grad,
            eps,
            von_mises: stress.von_mises(),
            relative_von_mises: relative_von_mises(&stress, &self.reference).ok(),
            stress,
        })
    }
}

fn jump_point(sol: &SurfaceSolution, xi: f64, w: f64) -> Result<JumpPoint> {
    let (st, _) = sol.surface_state(xi)?;
    let f = sol.curve().frame(xi)?;
    let j = local_jump(f.curvature, &st, sol.problem.surface.sigma0());
    let dt = f.tangent() * j.l + f.normal() * j.n;
    Ok(JumpPoint {
        y: f.point,
        jump_w: dt * (f.jacobian * w),
    })
}

fn polyline_distance(pts: &[Vec2], x: Vec2) -> f64 {
    pts.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let ab = b - a;
            let t = if ab.norm_sq() > 0.0 {
                ((x - a).dot(ab) / ab.norm_sq()).clamp(0.0, 1.0)
            } else {
                0.0
            };
            (x - (a + ab * t)).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Defects of both continuous equations at `ξ` for a solved surface,
/// normalized by `max |σ^S|` and `max |ω^S|`.
pub fn bie_residual(sol: &SurfaceSolution, asm: &Assembler<'_>, xi: f64) -> Result<(f64, f64)> {
    let rows = asm.rows_at(xi)?;
    let x = sol.unknowns();
    let dot = |r: &[f64]| r.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
    let (ms, mo) = sol.max_abs(401)?;
    let rs = dot(&rows.sigma) - rows.rhs_sigma;
    let ro = dot(&rows.omega) - rows.rhs_omega;
    Ok((
        if ms > 0.0 { rs / ms } else { rs },
        if mo > 0.0 { ro / mo } else { ro },
    ))
}

/// Solve with the given assembly options (helper combining the pipeline).
pub fn solve(problem: &Problem, opts: &AssemblyOptions) -> Result<SurfaceSolution> {
    SurfaceSolution::solve(problem, opts)
}
