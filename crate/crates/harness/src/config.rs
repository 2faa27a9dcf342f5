//! Case configuration, read from and written to TOML.
//!
//! A run manifest embeds the full configuration under `[config]`, so a
//! manifest can be fed back to `matsurf solve` to reproduce a run.

use std::path::Path;

use gmsurf_core::{AssemblyOptions, BulkMaterial, CurvatureScaling, FieldOptions, SingularPolicy};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::nondim::{LoadSpec, SurfaceSpec};
use crate::presets::{GeometrySpec, Grading};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BulkSpec {
    pub mu: f64,
    pub nu: f64,
}

impl BulkSpec {
    pub fn material(&self) -> Result<BulkMaterial> {
        BulkMaterial::new(self.mu, self.nu).map_err(|e| HarnessError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    #[serde(default = "default_elements")]
    pub elements: usize,
    #[serde(default = "default_degree")]
    pub degree: usize,
    #[serde(default)]
    pub grading: Grading,
}

fn default_elements() -> usize {
    50
}

fn default_degree() -> usize {
    2
}

impl Default for MeshSpec {
    fn default() -> Self {
        Self {
            elements: default_elements(),
            degree: default_degree(),
            grading: Grading::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureScalingSpec {
    #[default]
    Local,
    Collocation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    #[serde(default = "default_regular")]
    pub regular_order: usize,
    #[serde(default = "default_singular")]
    pub singular_order: usize,
    #[serde(default = "default_near_levels")]
    pub near_levels: usize,
    #[serde(default = "default_field_order")]
    pub field_order: usize,
    #[serde(default)]
    pub curvature_scaling: CurvatureScalingSpec,
}

fn default_regular() -> usize {
    200
}

fn default_singular() -> usize {
    SingularPolicy::default().gauss_order_singular
}

fn default_near_levels() -> usize {
    AssemblyOptions::default().near_levels
}

fn default_field_order() -> usize {
    FieldOptions::default().gauss_order
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            regular_order: default_regular(),
            singular_order: default_singular(),
            near_levels: default_near_levels(),
            field_order: default_field_order(),
            curvature_scaling: CurvatureScalingSpec::Local,
        }
    }
}

impl QuadratureSpec {
    pub fn assembly_options(&self) -> AssemblyOptions {
        AssemblyOptions {
            regular_order: self.regular_order,
            singular: SingularPolicy {
                gauss_order_singular: self.singular_order,
                ..SingularPolicy::default()
            },
            near_levels: self.near_levels,
            curvature_scaling: match self.curvature_scaling {
                CurvatureScalingSpec::Local => CurvatureScaling::Local,
                CurvatureScalingSpec::Collocation => CurvatureScaling::Collocation,
            },
            parallel: true,
        }
    }

    pub fn field_options(&self) -> FieldOptions {
        FieldOptions {
            gauss_order: self.field_order,
            ..FieldOptions::default()
        }
    }
}

/// Square window of field points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Defaults to the arc-length centroid of the surface.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 2]>,
    /// Defaults to twice the reference length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
}

fn default_resolution() -> usize {
    201
}

/// Field samples along the ray `origin + r (cos β, sin β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialScan {
    pub beta: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub samples: usize,
    #[serde(default)]
    pub origin: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_profile_samples")]
    pub profile_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub radial: Vec<RadialScan>,
}

fn default_profile_samples() -> usize {
    201
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            profile_samples: default_profile_samples(),
            grid: None,
            radial: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub geometry: GeometrySpec,
    pub bulk: BulkSpec,
    pub surface: SurfaceSpec,
    pub load: LoadSpec,
    #[serde(default)]
    pub mesh: MeshSpec,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub output: OutputSpec,
    /// Length used in the dimensionless groups; half the arc length when
    /// absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_length: Option<f64>,
}

fn default_name() -> String {
    "case".into()
}

/// Wrapper used to pull the embedded configuration out of a manifest.
#[derive(Deserialize)]
struct ManifestConfig {
    config: CaseConfig,
}

impl CaseConfig {
    /// Parse a case file, or a run manifest carrying a `[config]` table.
    pub fn from_toml_str(text: &str) -> std::result::Result<Self, toml::de::Error> {
        let value: toml::Table = text.parse()?;
        if value.contains_key("config") {
            Ok(toml::from_str::<ManifestConfig>(text)?.config)
        } else {
            toml::from_str(text)
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let cfg = Self::from_toml_str(&text).map_err(|source| HarnessError::ConfigParse {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.mesh.elements < 4 {
            return bad(format!("mesh.elements = {} < 4", self.mesh.elements));
        }
        if self.mesh.degree < 2 {
            return bad(format!("mesh.degree = {} < 2", self.mesh.degree));
        }
        let q = &self.quadrature;
        if q.regular_order == 0 || q.singular_order == 0 || q.field_order == 0 {
            return bad("quadrature orders must be positive".into());
        }
        if self.output.profile_samples < 2 {
            return bad("output.profile_samples must be at least 2".into());
        }
        if let Some(g) = &self.output.grid {
            if g.resolution < 2 {
                return bad("output.grid.resolution must be at least 2".into());
            }
            if let Some(h) = g.half_width {
                if !(h.is_finite() && h > 0.0) {
                    return bad(format!("output.grid.half_width must be positive, got {h}"));
                }
            }
        }
        for r in &self.output.radial {
            if r.samples < 2 || !(r.r_max > r.r_min) || r.r_min < 0.0 {
                return bad(format!("invalid radial scan {r:?}"));
            }
        }
        if let Some(l) = self.reference_length {
            if !(l.is_finite() && l > 0.0) {
                return bad(format!("reference_length must be positive, got {l}"));
            }
        }
        self.bulk.material()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
name = "segment"

[geometry]
kind = "segment"
start = [-5.0, 0.0]
end = [5.0, 0.0]

[bulk]
mu = 2.0
nu = 0.35

[surface]
form = "dimensionless"
gamma = 0.12
sigma0_tilde = 0.025

[load]
form = "dimensionless"
s11 = 0.05
s12 = 0.0
s22 = 0.0

[mesh]
elements = 40
grading = { kind = "geometric", ratio = 1.2 }
"#;

    #[test]
    fn parses_and_round_trips() {
        let c = CaseConfig::from_toml_str(SAMPLE).unwrap();
        c.validate().unwrap();
        assert_eq!(c.mesh.elements, 40);
        assert_eq!(c.mesh.degree, 2);
        assert_eq!(c.quadrature.regular_order, 200);
        let text = c.to_toml_string().unwrap();
        assert_eq!(CaseConfig::from_toml_str(&text).unwrap(), c);
    }

    #[test]
    fn manifest_wrapper_is_accepted() {
        let c = CaseConfig::from_toml_str(SAMPLE).unwrap();
        let mut t = toml::Table::new();
        t.insert("schema_version".into(), toml::Value::Integer(1));
        t.insert("config".into(), toml::Value::try_from(&c).unwrap());
        let text = toml::to_string(&t).unwrap();
        assert_eq!(CaseConfig::from_toml_str(&text).unwrap(), c);
    }

    #[test]
    fn coarse_mesh_rejected() {
        let mut c = CaseConfig::from_toml_str(SAMPLE).unwrap();
        c.mesh.elements = 3;
        assert!(matches!(c.validate(), Err(HarnessError::Config(_))));
    }

    #[test]
    fn both_surface_forms_cannot_be_mixed() {
        let text = SAMPLE.replace(
            "form = \"dimensionless\"\ngamma = 0.12",
            "form = \"dimensionless\"\nmu_s = 1.0\ngamma = 0.12",
        );
        assert!(CaseConfig::from_toml_str(&text).is_err());
    }
}
