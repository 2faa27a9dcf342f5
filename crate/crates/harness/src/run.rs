//! Single-case pipeline: configuration → curve → solve → sampled outputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use gmsurf_core::{
    ArcLengthTable, FieldEvaluator, FieldSample, NurbsCurve, Problem, QuadratureRule,
    SurfaceSolution, Vec2,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::CaseConfig;
use crate::error::{HarnessError, Result};
use crate::nondim::{self, Scaling, SurfaceGroups};
use crate::presets::preset_geometry;

/// Bumped whenever a CSV column list changes.
pub const SCHEMA_VERSION: u32 = 1;

pub const PROFILE_COLUMNS: [&str; 8] = [
    "s_tilde",
    "xi",
    "x1",
    "x2",
    "sigma_s_tilde",
    "omega_s",
    "dt_l",
    "dt_n",
];

pub const GRID_COLUMNS: [&str; 10] = [
    "x1",
    "x2",
    "u1",
    "u2",
    "s11",
    "s12",
    "s22",
    "s33",
    "von_mises",
    "relative_von_mises",
];

pub const RADIAL_COLUMNS: [&str; 12] = [
    "beta",
    "r",
    "x1",
    "x2",
    "u1",
    "u2",
    "s11",
    "s12",
    "s22",
    "s33",
    "von_mises",
    "relative_von_mises",
];

/// Everything derived from a configuration before solving.
#[derive(Debug, Clone)]
pub struct PreparedCase {
    pub config: CaseConfig,
    pub scaling: Scaling,
    pub groups: SurfaceGroups,
    pub problem: Problem,
    pub arc_length: f64,
}

impl PreparedCase {
    pub fn new(config: &CaseConfig) -> Result<Self> {
        config.validate()?;
        let curve = preset_geometry(
            &config.geometry,
            config.mesh.degree,
            config.mesh.elements,
            &config.mesh.grading,
        )?;
        Self::with_curve(config, curve)
    }

    /// Use an explicit curve instead of building the configured one.
    pub fn with_curve(config: &CaseConfig, curve: NurbsCurve) -> Result<Self> {
        let bulk = config.bulk.material()?;
        let arc_length = ArcLengthTable::new(&curve)
            .map_err(HarnessError::geometry)?
            .total();
        let scaling = Scaling::new(
            config.bulk.mu,
            config.reference_length.unwrap_or(0.5 * arc_length),
        )?;
        let surface = nondim::surface_material(&config.surface, &scaling)?;
        let load = nondim::far_field(&config.load, &scaling)?;
        let problem = Problem::new(curve, bulk, surface, load).map_err(HarnessError::geometry)?;
        Ok(Self {
            config: config.clone(),
            scaling,
            groups: nondim::surface_groups(&surface, &scaling),
            problem,
            arc_length,
        })
    }

    pub fn solve(&self) -> Result<SurfaceSolution> {
        Ok(SurfaceSolution::solve(
            &self.problem,
            &self.config.quadrature.assembly_options(),
        )?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub s_tilde: f64,
    pub xi: f64,
    pub point: Vec2,
    pub sigma_s_tilde: f64,
    pub omega_s: f64,
    /// Traction jump components divided by μ.
    pub dt_l: f64,
    pub dt_n: f64,
}

/// Field values at one point; `None` where the point is too close to the
/// surface for the quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRow {
    pub point: Vec2,
    pub sample: Option<FieldSample>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialRows {
    pub beta: f64,
    pub rows: Vec<(f64, FieldRow)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timings {
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
    pub output_seconds: f64,
}

/// Solved case with its sampled outputs, all in memory.
#[derive(Debug, Clone)]
pub struct CaseResult {
    pub prepared: PreparedCase,
    pub solution: SurfaceSolution,
    pub profile: Vec<ProfileRow>,
    pub grid: Option<Vec<FieldRow>>,
    pub radial: Vec<RadialRows>,
    pub timings: Timings,
}

/// Uniform parametric profile of the surface stresses.
pub fn surface_profile(
    sol: &SurfaceSolution,
    scaling: &Scaling,
    samples: usize,
) -> Result<Vec<ProfileRow>> {
    let table = ArcLengthTable::new(sol.curve())?;
    let (lo, hi) = sol.curve().domain();
    (0..samples)
        .map(|k| {
            let xi = lo + (hi - lo) * k as f64 / (samples - 1) as f64;
            let f = sol.surface_fields(&table, xi)?;
            Ok(ProfileRow {
                s_tilde: f.s_tilde,
                xi,
                point: sol.curve().point(xi)?,
                sigma_s_tilde: nondim::sigma_s_tilde(f.sigma_s, scaling),
                omega_s: f.omega_s,
                dt_l: nondim::stress_tilde(f.jump.l, scaling),
                dt_n: nondim::stress_tilde(f.jump.n, scaling),
            })
        })
        .collect()
}

/// Arc-length centroid of a curve.
pub fn centroid(curve: &NurbsCurve) -> Result<Vec2> {
    let rule = QuadratureRule::gauss_legendre(16)?;
    let mut acc = Vec2::ZERO;
    let mut len = 0.0;
    for el in &curve.mesh().elements {
        for (xi, w) in rule.mapped(el.start, el.end) {
            let f = curve.frame(xi)?;
            acc += f.point * (w * f.jacobian);
            len += w * f.jacobian;
        }
    }
    Ok(acc * (1.0 / len))
}

fn field_row(eval: &FieldEvaluator<'_>, x: Vec2) -> Result<FieldRow> {
    match eval.stress_at(x) {
        Ok(s) => Ok(FieldRow {
            point: x,
            sample: Some(s),
        }),
        Err(gmsurf_core::Error::NearSurface { .. }) => Ok(FieldRow {
            point: x,
            sample: None,
        }),
        Err(e) => Err(e.into()),
    }
}

/// Field rows on a `resolution × resolution` grid, `x₂` outer, `x₁` inner.
pub fn field_grid(
    eval: &FieldEvaluator<'_>,
    center: Vec2,
    half_width: f64,
    resolution: usize,
) -> Result<Vec<FieldRow>> {
    let step = 2.0 * half_width / (resolution - 1) as f64;
    let coord = |k: usize| -half_width + step * k as f64;
    (0..resolution * resolution)
        .into_par_iter()
        .map(|idx| {
            let (j, i) = (idx / resolution, idx % resolution);
            field_row(eval, center + Vec2::new(coord(i), coord(j)))
        })
        .collect()
}

pub fn radial_scan(
    eval: &FieldEvaluator<'_>,
    scan: &crate::config::RadialScan,
) -> Result<RadialRows> {
    let dir = Vec2::from_angle(scan.beta);
    let origin = Vec2::new(scan.origin[0], scan.origin[1]);
    let rows = (0..scan.samples)
        .into_par_iter()
        .map(|k| {
            let r = scan.r_min + (scan.r_max - scan.r_min) * k as f64 / (scan.samples - 1) as f64;
            Ok((r, field_row(eval, origin + dir * r)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RadialRows {
        beta: scan.beta,
        rows,
    })
}

/// Solve and sample one case without touching the file system.
pub fn solve_case(config: &CaseConfig) -> Result<CaseResult> {
    let prepared = PreparedCase::new(config)?;
    let solution = prepared.solve()?;
    let t0 = Instant::now();
    let out = &config.output;
    let profile = surface_profile(&solution, &prepared.scaling, out.profile_samples)?;
    let (grid, radial) = if out.grid.is_some() || !out.radial.is_empty() {
        let eval = FieldEvaluator::new(&solution, config.quadrature.field_options())?;
        let grid = match &out.grid {
            Some(g) => {
                let center = match g.center {
                    Some(c) => Vec2::new(c[0], c[1]),
                    None => centroid(solution.curve())?,
                };
                let hw = g
                    .half_width
                    .unwrap_or(2.0 * prepared.scaling.reference_length);
                Some(field_grid(&eval, center, hw, g.resolution)?)
            }
            None => None,
        };
        let radial = out
            .radial
            .iter()
            .map(|s| radial_scan(&eval, s))
            .collect::<Result<Vec<_>>>()?;
        (grid, radial)
    } else {
        (None, Vec::new())
    };
    let timings = Timings {
        assembly_seconds: solution.diagnostics.assembly_seconds,
        solve_seconds: solution.diagnostics.solve_seconds,
        output_seconds: t0.elapsed().as_secs_f64(),
    };
    Ok(CaseResult {
        prepared,
        solution,
        profile,
        grid,
        radial,
        timings,
    })
}

/// 17 significant digits; missing values are written as `NaN`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.16e}")
    }
}

fn field_values(row: &FieldRow, scaling: &Scaling) -> [f64; 10] {
    let p = row.point;
    match &row.sample {
        Some(s) => {
            let t = |v: f64| nondim::stress_tilde(v, scaling);
            [
                p.x,
                p.y,
                s.u.x,
                s.u.y,
                t(s.stress.plane.xx),
                t(s.stress.plane.xy),
                t(s.stress.plane.yy),
                t(s.stress.s33),
                t(s.von_mises),
                s.relative_von_mises.unwrap_or(f64::NAN),
            ]
        }
        None => {
            let mut v = [f64::NAN; 10];
            v[0] = p.x;
            v[1] = p.y;
            v
        }
    }
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|&x| fmt_num(x)))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))?;
    Ok(())
}

pub fn write_profile(path: &Path, rows: &[ProfileRow]) -> Result<()> {
    write_csv(
        path,
        &PROFILE_COLUMNS,
        rows.iter().map(|r| {
            vec![
                r.s_tilde,
                r.xi,
                r.point.x,
                r.point.y,
                r.sigma_s_tilde,
                r.omega_s,
                r.dt_l,
                r.dt_n,
            ]
        }),
    )
}

pub fn write_grid(path: &Path, rows: &[FieldRow], scaling: &Scaling) -> Result<()> {
    write_csv(
        path,
        &GRID_COLUMNS,
        rows.iter().map(|r| field_values(r, scaling).to_vec()),
    )
}

pub fn write_radial(path: &Path, scan: &RadialRows, scaling: &Scaling) -> Result<()> {
    write_csv(
        path,
        &RADIAL_COLUMNS,
        scan.rows.iter().map(|(r, row)| {
            let mut v = vec![scan.beta, *r];
            v.extend_from_slice(&field_values(row, scaling));
            v
        }),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub file: String,
    pub columns: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingRecord {
    pub mu: f64,
    pub reference_length: f64,
    pub arc_length: f64,
    pub stiffness: f64,
    pub sigma0: f64,
    pub gamma: f64,
    pub sigma0_tilde: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsRecord {
    pub elements: usize,
    pub basis_functions: usize,
    pub unknowns: usize,
    pub relative_residual: f64,
    pub condition_1: f64,
}

/// Run manifest. The embedded configuration reproduces the run.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub generator: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub config: CaseConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<DiagnosticsRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
    pub outputs: Vec<OutputRecord>,
}

impl Manifest {
    fn new(config: &CaseConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            generator: format!("matsurf {}", env!("CARGO_PKG_VERSION")),
            status: "ok".into(),
            failure: None,
            config: config.clone(),
            scaling: None,
            diagnostics: None,
            timings: None,
            outputs: Vec::new(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = toml::to_string(self)?;
        fs::write(path, text).map_err(|e| HarnessError::io(path, e))
    }
}

fn record(file: &str, cols: &[&str]) -> OutputRecord {
    OutputRecord {
        file: file.into(),
        columns: cols.iter().map(|c| c.to_string()).collect(),
    }
}

/// Write every artifact of a solved case into `dir`.
pub fn write_case(dir: &Path, result: &CaseResult) -> Result<Manifest> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let p = &result.prepared;
    let mut m = Manifest::new(&p.config);
    write_profile(&dir.join("profile.csv"), &result.profile)?;
    m.outputs.push(record("profile.csv", &PROFILE_COLUMNS));
    if let Some(g) = &result.grid {
        write_grid(&dir.join("grid.csv"), g, &p.scaling)?;
        m.outputs.push(record("grid.csv", &GRID_COLUMNS));
    }
    for (k, scan) in result.radial.iter().enumerate() {
        let name = format!("radial_{k}.csv");
        write_radial(&dir.join(&name), scan, &p.scaling)?;
        m.outputs.push(record(&name, &RADIAL_COLUMNS));
    }
    m.scaling = Some(ScalingRecord {
        mu: p.scaling.mu,
        reference_length: p.scaling.reference_length,
        arc_length: p.arc_length,
        stiffness: p.problem.surface.stiffness(),
        sigma0: p.problem.surface.sigma0(),
        gamma: p.groups.gamma,
        sigma0_tilde: p.groups.sigma0_tilde,
    });
    let d = &result.solution.diagnostics;
    m.diagnostics = Some(DiagnosticsRecord {
        elements: p.problem.curve.mesh().element_count(),
        basis_functions: p.problem.basis_count(),
        unknowns: d.unknowns,
        relative_residual: d.relative_residual,
        condition_1: d.condition_1,
    });
    m.timings = Some(result.timings);
    m.write(&dir.join("manifest.toml"))?;
    Ok(m)
}

/// Solve a case and write its artifacts. On failure a manifest carrying the
/// error is still written before the error is returned.
pub fn run_case(config: &CaseConfig, dir: &Path) -> Result<(CaseResult, Manifest)> {
    match solve_case(config) {
        Ok(r) => {
            let m = write_case(dir, &r)?;
            Ok((r, m))
        }
        Err(e) => {
            fs::create_dir_all(dir).map_err(|io| HarnessError::io(dir, io))?;
            let mut m = Manifest::new(config);
            m.status = "failed".into();
            m.failure = Some(e.to_string());
            m.write(&dir.join("manifest.toml"))?;
            Err(e)
        }
    }
}

/// Output directory for a case name below `root`.
pub fn case_dir(root: &Path, name: &str) -> PathBuf {
    root.join(name)
}
