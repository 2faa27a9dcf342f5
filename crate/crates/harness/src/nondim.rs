//! Conversion between dimensional inputs and the dimensionless groups
//! `γ = 2μℓ/(2μ_S + λ_S)`, `σ̃₀ = σ₀/(μℓ)`, `σ̃^S = σ^S/(μℓ)`, `σ̃_ij = σ_ij/μ`.
//!
//! Units only need to be consistent: with μ in GPa and lengths in nm,
//! surface quantities come out in N/m.

use gmsurf_core::{FarFieldLoad, SurfaceMaterial};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Bulk shear modulus and reference length of one case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub mu: f64,
    pub reference_length: f64,
}

impl Scaling {
    pub fn new(mu: f64, reference_length: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(HarnessError::Config(format!(
                "shear modulus must be positive, got {mu}"
            )));
        }
        if !(reference_length.is_finite() && reference_length > 0.0) {
            return Err(HarnessError::Config(format!(
                "reference length must be positive, got {reference_length}"
            )));
        }
        Ok(Self {
            mu,
            reference_length,
        })
    }

    /// `μℓ`, the unit of surface stress.
    pub fn surface_unit(&self) -> f64 {
        self.mu * self.reference_length
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceSpec {
    Dimensional {
        mu_s: f64,
        lambda_s: f64,
        sigma0: f64,
    },
    /// `gamma = inf` describes a surface without stiffness.
    Dimensionless { gamma: f64, sigma0_tilde: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoadSpec {
    Dimensional { s11: f64, s12: f64, s22: f64 },
    Dimensionless { s11: f64, s12: f64, s22: f64 },
}

/// Dimensionless surface description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceGroups {
    pub gamma: f64,
    pub sigma0_tilde: f64,
}

pub fn surface_material(spec: &SurfaceSpec, scaling: &Scaling) -> Result<SurfaceMaterial> {
    match *spec {
        SurfaceSpec::Dimensional {
            mu_s,
            lambda_s,
            sigma0,
        } => SurfaceMaterial::new(mu_s, lambda_s, sigma0)
            .map_err(|e| HarnessError::Config(e.to_string())),
        SurfaceSpec::Dimensionless {
            gamma,
            sigma0_tilde,
        } => {
            if gamma == 0.0 {
                return Err(HarnessError::Config(
                    "gamma = 0 means an infinitely stiff surface".into(),
                ));
            }
            if gamma.is_nan() || gamma < 0.0 {
                return Err(HarnessError::Config(format!(
                    "gamma must be positive, got {gamma}"
                )));
            }
            if !sigma0_tilde.is_finite() {
                return Err(HarnessError::Config("sigma0_tilde must be finite".into()));
            }
            let stiffness = if gamma.is_infinite() {
                0.0
            } else {
                2.0 * scaling.surface_unit() / gamma
            };
            SurfaceMaterial::from_stiffness(stiffness, sigma0_tilde * scaling.surface_unit())
                .map_err(|e| HarnessError::Config(e.to_string()))
        }
    }
}

/// Inverse of [`surface_material`] for the dimensionless form.
pub fn surface_groups(material: &SurfaceMaterial, scaling: &Scaling) -> SurfaceGroups {
    let k = material.stiffness();
    SurfaceGroups {
        gamma: if k == 0.0 {
            f64::INFINITY
        } else {
            2.0 * scaling.surface_unit() / k
        },
        sigma0_tilde: material.sigma0() / scaling.surface_unit(),
    }
}

pub fn far_field(spec: &LoadSpec, scaling: &Scaling) -> Result<FarFieldLoad> {
    let (load, factor) = match *spec {
        LoadSpec::Dimensional { s11, s12, s22 } => (FarFieldLoad::new(s11, s12, s22), 1.0),
        LoadSpec::Dimensionless { s11, s12, s22 } => (FarFieldLoad::new(s11, s12, s22), scaling.mu),
    };
    if ![load.s11, load.s12, load.s22].iter().all(|x| x.is_finite()) {
        return Err(HarnessError::Config(
            "load components must be finite".into(),
        ));
    }
    Ok(load.scaled(factor))
}

pub fn dimensionless_load(load: &FarFieldLoad, scaling: &Scaling) -> FarFieldLoad {
    load.scaled(1.0 / scaling.mu)
}

pub fn sigma_s_tilde(sigma_s: f64, scaling: &Scaling) -> f64 {
    sigma_s / scaling.surface_unit()
}

pub fn stress_tilde(stress: f64, scaling: &Scaling) -> f64 {
    stress / scaling.mu
}
