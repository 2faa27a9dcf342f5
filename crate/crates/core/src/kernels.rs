//! Plane-strain elastic building blocks: materials, the Kelvin solution and
//! its gradient, the uniform far field, the kernel functions of the surface
//! integral equations and the traction-jump densities.
//!
//! Units are GPa for bulk stress, nm for length and N/m for surface stress;
//! N/m over GPa·nm is dimensionless, so no conversion factors appear.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::{Sym2, Vec2};
use crate::nurbs::LocalFrame;

/// Distances below this (nm) are treated as coincident points.
pub const SINGULARITY_GUARD: f64 = 1e-12;

/// Isotropic bulk matrix in plane strain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulkMaterial {
    mu: f64,
    nu: f64,
}

impl BulkMaterial {
    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::Material(format!(
                "shear modulus must be positive, got {mu}"
            )));
        }
        if !(nu > -1.0 && nu < 0.5) {
            return Err(Error::Material(format!(
                "Poisson ratio must lie in (-1, 0.5), got {nu}"
            )));
        }
        Ok(Self { mu, nu })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// `κ = 3 − 4ν`.
    pub fn kappa(&self) -> f64 {
        3.0 - 4.0 * self.nu
    }

    /// Plane-strain Lamé constant `λ = 2μν / (1 − 2ν)`.
    pub fn lambda(&self) -> f64 {
        2.0 * self.mu * self.nu / (1.0 - 2.0 * self.nu)
    }

    /// `2πμ(κ + 1)`, the common denominator of every kernel.
    pub fn kernel_denominator(&self) -> f64 {
        2.0 * PI * self.mu * (self.kappa() + 1.0)
    }

    /// In-plane stress and `σ₃₃` from a small-strain tensor.
    pub fn hooke(&self, eps: Sym2) -> StressState {
        let lam = self.lambda();
        let tr = eps.trace();
        let s = Sym2::new(
            lam * tr + 2.0 * self.mu * eps.xx,
            2.0 * self.mu * eps.xy,
            lam * tr + 2.0 * self.mu * eps.yy,
        );
        StressState::plane_strain(s, self.nu)
    }
}

/// In-plane stress with the out-of-plane normal stress carried along.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressState {
    pub plane: Sym2,
    pub s33: f64,
}

impl StressState {
    pub fn plane_strain(plane: Sym2, nu: f64) -> Self {
        Self {
            plane,
            s33: nu * plane.trace(),
        }
    }

    /// Plane-strain Von Mises stress.
    pub fn von_mises(&self) -> f64 {
        let Sym2 { xx, xy, yy } = self.plane;
        let zz = self.s33;
        (0.5 * ((xx - yy).powi(2) + (yy - zz).powi(2) + (zz - xx).powi(2)) + 3.0 * xy * xy).sqrt()
    }
}

/// Gurtin–Murdoch surface constants (N/m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceMaterial {
    mu_s: f64,
    lambda_s: f64,
    sigma0: f64,
}

impl SurfaceMaterial {
    pub fn new(mu_s: f64, lambda_s: f64, sigma0: f64) -> Result<Self> {
        if !(mu_s.is_finite() && lambda_s.is_finite() && sigma0.is_finite()) {
            return Err(Error::Material("surface constants must be finite".into()));
        }
        let stiffness = lambda_s + 2.0 * mu_s;
        if stiffness < 0.0 {
            return Err(Error::Material(format!(
                "lambda_s + 2 mu_s must be non-negative, got {stiffness}"
            )));
        }
        if stiffness == 0.0 && sigma0 != 0.0 {
            return Err(Error::Material(
                "a surface with zero stiffness cannot carry residual tension".into(),
            ));
        }
        Ok(Self {
            mu_s,
            lambda_s,
            sigma0,
        })
    }

    /// Only `λ_S + 2μ_S` enters the equations; it is stored as `μ_S = k/2`,
    /// `λ_S = 0`.
    pub fn from_stiffness(stiffness: f64, sigma0: f64) -> Result<Self> {
        Self::new(0.5 * stiffness, 0.0, sigma0)
    }

    /// No surface at all.
    pub fn degenerate() -> Self {
        Self {
            mu_s: 0.0,
            lambda_s: 0.0,
            sigma0: 0.0,
        }
    }

    pub fn mu_s(&self) -> f64 {
        self.mu_s
    }

    pub fn lambda_s(&self) -> f64 {
        self.lambda_s
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    /// `λ_S + 2μ_S`.
    pub fn stiffness(&self) -> f64 {
        self.lambda_s + 2.0 * self.mu_s
    }
}

/// Uniform remote stress.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FarFieldLoad {
    pub s11: f64,
    pub s12: f64,
    pub s22: f64,
}

impl FarFieldLoad {
    pub const fn new(s11: f64, s12: f64, s22: f64) -> Self {
        Self { s11, s12, s22 }
    }

    pub fn as_tensor(&self) -> Sym2 {
        Sym2::new(self.s11, self.s12, self.s22)
    }

    pub fn from_tensor(t: Sym2) -> Self {
        Self::new(t.xx, t.xy, t.yy)
    }

    pub fn scaled(&self, f: f64) -> Self {
        Self::new(self.s11 * f, self.s12 * f, self.s22 * f)
    }

    pub fn plus(&self, o: &FarFieldLoad) -> Self {
        Self::new(self.s11 + o.s11, self.s12 + o.s12, self.s22 + o.s22)
    }

    /// Load expressed in axes rotated by `angle`.
    pub fn rotated(&self, angle: f64) -> Self {
        Self::from_tensor(self.as_tensor().rotated(angle))
    }

    pub fn is_zero(&self) -> bool {
        self.s11 == 0.0 && self.s12 == 0.0 && self.s22 == 0.0
    }

    /// Stress state of the undisturbed matrix.
    pub fn stress_state(&self, bulk: &BulkMaterial) -> StressState {
        StressState::plane_strain(self.as_tensor(), bulk.nu())
    }

    /// Constant displacement gradient `H = ∂u^∞/∂x` of the remote field.
    ///
    /// The field is the symmetric one with no rigid rotation, so `H` is also
    /// the strain tensor.
    pub fn displacement_gradient(&self, bulk: &BulkMaterial) -> Sym2 {
        let (mu, k) = (bulk.mu(), bulk.kappa());
        Sym2::new(
            ((k + 1.0) * self.s11 + (k - 3.0) * self.s22) / (8.0 * mu),
            self.s12 / (2.0 * mu),
            ((k - 3.0) * self.s11 + (k + 1.0) * self.s22) / (8.0 * mu),
        )
    }
}

/// `u^∞(x)`, vanishing at the origin.
pub fn farfield_displacement(load: &FarFieldLoad, bulk: &BulkMaterial, x: Vec2) -> Vec2 {
    load.displacement_gradient(bulk).apply(x)
}

/// Load terms `(Σ₁, Σ₂)` at a point whose normal makes angle `β₀` with the
/// x₁ axis. They are the Cartesian components of `∂u^∞/∂s`.
pub fn farfield_rhs_sigma(load: &FarFieldLoad, bulk: &BulkMaterial, beta0: f64) -> (f64, f64) {
    let h = load.displacement_gradient(bulk);
    let (s, c) = beta0.sin_cos();
    (-h.xx * s + h.xy * c, -h.xy * s + h.yy * c)
}

/// Right-hand sides of the σ^S and ω^S equations built from `(Σ₁, Σ₂)`:
/// `(−sin β₀ Σ₁ + cos β₀ Σ₂, cos β₀ Σ₁ + sin β₀ Σ₂)`.
pub fn farfield_projections(load: &FarFieldLoad, bulk: &BulkMaterial, beta0: f64) -> (f64, f64) {
    let (s1, s2) = farfield_rhs_sigma(load, bulk, beta0);
    let (s, c) = beta0.sin_cos();
    (-s * s1 + c * s2, c * s1 + s * s2)
}

/// The same load terms computed in parameter space from `du^∞/dξ` along the
/// curve: returns `(Σ₃, Σ₄)`, where `Σ₃` already carries the surface
/// stiffness.
pub fn farfield_parametric(
    load: &FarFieldLoad,
    bulk: &BulkMaterial,
    stiffness: f64,
    frame: &LocalFrame,
) -> (f64, f64) {
    let du = load.displacement_gradient(bulk).apply(frame.first_deriv);
    let (s, c) = frame.normal_angle.sin_cos();
    let j = frame.jacobian;
    (
        stiffness / j * (-s * du.x + c * du.y),
        (c * du.x + s * du.y) / j,
    )
}

/// Kelvin displacement tensor `G_kj(x, y)` as `[[G11, G12], [G21, G22]]`.
pub fn kelvin(x: Vec2, y: Vec2, bulk: &BulkMaterial) -> Result<[[f64; 2]; 2]> {
    let r = x - y;
    let d = guard(r)?;
    let k = bulk.kappa();
    let den = bulk.kernel_denominator();
    let ln = d.ln();
    let (e1, e2) = (r.x / d, r.y / d);
    let g12 = e1 * e2 / den;
    Ok([
        [(-k * ln + e1 * e1) / den, g12],
        [g12, (-k * ln + e2 * e2) / den],
    ])
}

/// `∂G_kj/∂x_m` as `grad[m][k][j]`.
pub fn kelvin_gradient(x: Vec2, y: Vec2, bulk: &BulkMaterial) -> Result<[[[f64; 2]; 2]; 2]> {
    let r = x - y;
    let d = guard(r)?;
    let k = bulk.kappa();
    let den = bulk.kernel_denominator();
    let rv = [r.x, r.y];
    let r2 = d * d;
    let r4 = r2 * r2;
    let mut g = [[[0.0; 2]; 2]; 2];
    for (m, gm) in g.iter_mut().enumerate() {
        for (i, gmi) in gm.iter_mut().enumerate() {
            for (j, v) in gmi.iter_mut().enumerate() {
                let dij = if i == j { 1.0 } else { 0.0 };
                let dim = if i == m { 1.0 } else { 0.0 };
                let djm = if j == m { 1.0 } else { 0.0 };
                *v = (-k * dij * rv[m] / r2 + (dim * rv[j] + rv[i] * djm) / r2
                    - 2.0 * rv[i] * rv[j] * rv[m] / r4)
                    / den;
            }
        }
    }
    Ok(g)
}

fn guard(r: Vec2) -> Result<f64> {
    let d = r.norm();
    if !(d >= SINGULARITY_GUARD) {
        return Err(Error::Singularity {
            distance: d,
            threshold: SINGULARITY_GUARD,
        });
    }
    Ok(d)
}

/// Kernel values at one source/field pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelEval {
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
    pub r1: f64,
    pub r2: f64,
    pub r: f64,
}

/// `φ₁..φ₃` with `r = y − y₀` and `β₀` the normal angle at `y₀`.
pub fn phi_kernels(frame0: &LocalFrame, y: Vec2) -> Result<KernelEval> {
    phi_from_offset(y - frame0.point, frame0.normal_angle)
}

/// `φ₁..φ₃` from the offset `r = y − y₀` directly; lets callers form the
/// offset without cancellation.
pub fn phi_from_offset(r: Vec2, beta0: f64) -> Result<KernelEval> {
    let (s, c) = beta0.sin_cos();
    phi_sin_cos(r, s, c)
}

/// As [`phi_from_offset`] with `sin β₀`, `cos β₀` precomputed.
pub fn phi_sin_cos(r: Vec2, s: f64, c: f64) -> Result<KernelEval> {
    let d = guard(r)?;
    let (r1, r2) = (r.x, r.y);
    let rr = d * d;
    let r4 = rr * rr;
    let phi1 = (-r1 * s + r2 * c) / rr;
    let phi2 = 2.0 * r1 * r2 * (-r2 * s - r1 * c) / r4;
    let phi3 = -(r2 / rr - 2.0 * r1 * r1 * r2 / r4) * s + (r1 / rr - 2.0 * r1 * r2 * r2 / r4) * c;
    Ok(KernelEval {
        phi1,
        phi2,
        phi3,
        r1,
        r2,
        r: d,
    })
}

/// Traction jump in the local (tangent, normal) basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalJump {
    pub l: f64,
    pub n: f64,
}

/// Surface stress data at one point of the curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceState {
    pub sigma: f64,
    pub omega: f64,
    pub dsigma_ds: f64,
    pub domega_ds: f64,
}

/// `Δt_l = σ′ + σ₀ω/R`, `Δt_n = −σ/R + σ₀ω′`.
pub fn local_jump(curvature: f64, s: &SurfaceState, sigma0: f64) -> LocalJump {
    LocalJump {
        l: s.dsigma_ds + sigma0 * s.omega * curvature,
        n: -s.sigma * curvature + sigma0 * s.domega_ds,
    }
}

/// Cartesian traction jump `(g₁, g₂) = (Δt₁, Δt₂)`.
pub fn density_g(frame: &LocalFrame, s: &SurfaceState, sigma0: f64) -> (f64, f64) {
    let j = local_jump(frame.curvature, s, sigma0);
    let (sb, cb) = frame.normal_angle.sin_cos();
    (-sb * j.l + cb * j.n, cb * j.l + sb * j.n)
}
