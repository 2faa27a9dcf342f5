//! Mesh-convergence and curvature studies.

use std::fs;
use std::path::Path;

use gmsurf_core::SurfaceSolution;
use rayon::prelude::*;
use serde::Serialize;

use crate::cases::curvature_cases;
use crate::config::CaseConfig;
use crate::error::{HarnessError, Result};
use crate::nondim::{self, Scaling};
use crate::run::{fmt_num, run_case, solve_case, CaseResult, PreparedCase};

/// Default number of uniform parametric samples in the error norms.
pub const ERROR_SAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceLevel {
    pub elements: usize,
    pub degrees_of_freedom: usize,
    pub e_sigma: f64,
    pub e_omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub ladder: Vec<usize>,
    pub reference: usize,
    pub samples: usize,
    pub levels: Vec<ConvergenceLevel>,
    /// Set when a ladder solve failed; `levels` then holds the levels
    /// finished before it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

/// `σ̃^S` and `ω^S` at `samples` uniform parameters including both ends.
pub fn sample_profile(
    sol: &SurfaceSolution,
    scaling: &Scaling,
    samples: usize,
) -> Result<Vec<(f64, f64)>> {
    let (lo, hi) = sol.curve().domain();
    (0..samples)
        .map(|k| {
            let xi = lo + (hi - lo) * k as f64 / (samples - 1) as f64;
            let (st, _) = sol.surface_state(xi)?;
            Ok((nondim::sigma_s_tilde(st.sigma, scaling), st.omega))
        })
        .collect()
}

/// Relative discrete L² error `sqrt(Σ e² / Σ ref²)`.
pub fn relative_l2(
    values: impl Iterator<Item = f64>,
    reference: impl Iterator<Item = f64>,
) -> Result<f64> {
    let (num, den) = values.zip(reference).fold((0.0, 0.0), |(n, d), (v, r)| {
        (n + (v - r).powi(2), d + r * r)
    });
    if den == 0.0 {
        return Err(HarnessError::Solver(gmsurf_core::Error::ZeroReference));
    }
    Ok((num / den).sqrt())
}

fn solve_at(config: &CaseConfig, elements: usize) -> Result<(PreparedCase, SurfaceSolution)> {
    let mut c = config.clone();
    c.mesh.elements = elements;
    let p = PreparedCase::new(&c)?;
    let s = p.solve()?;
    Ok((p, s))
}

/// Errors of each ladder mesh against the reference mesh, sampled at
/// `samples` uniform parameters. All meshes share one parametrization.
pub fn convergence_study(
    config: &CaseConfig,
    ladder: &[usize],
    reference: usize,
    samples: usize,
) -> Result<ConvergenceReport> {
    if let Some(&bad) = ladder.iter().find(|&&n| n > reference) {
        return Err(HarnessError::Config(format!(
            "ladder entry {bad} is finer than the reference {reference}"
        )));
    }
    if samples < 2 {
        return Err(HarnessError::Config(
            "at least two samples are needed".into(),
        ));
    }
    let (rp, rs) = solve_at(config, reference)?;
    let refv = sample_profile(&rs, &rp.scaling, samples)?;
    let mut report = ConvergenceReport {
        ladder: ladder.to_vec(),
        reference,
        samples,
        levels: Vec::new(),
        failure: None,
    };
    let results: Vec<Result<ConvergenceLevel>> = ladder
        .par_iter()
        .map(|&n| {
            let (p, s) = solve_at(config, n)?;
            let v = sample_profile(&s, &p.scaling, samples)?;
            Ok(ConvergenceLevel {
                elements: n,
                degrees_of_freedom: p.problem.basis_count(),
                e_sigma: relative_l2(v.iter().map(|x| x.0), refv.iter().map(|x| x.0))?,
                e_omega: relative_l2(v.iter().map(|x| x.1), refv.iter().map(|x| x.1))?,
            })
        })
        .collect();
    for r in results {
        match r {
            Ok(l) => report.levels.push(l),
            Err(e) => {
                report.failure = Some(e.to_string());
                break;
            }
        }
    }
    Ok(report)
}

pub fn write_convergence(path: &Path, report: &ConvergenceReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["elements", "degrees_of_freedom", "e_sigma_tilde", "e_omega"])?;
    for l in &report.levels {
        w.write_record([
            l.elements.to_string(),
            l.degrees_of_freedom.to_string(),
            fmt_num(l.e_sigma),
            fmt_num(l.e_omega),
        ])?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))?;
    Ok(())
}

/// Run the four curvature cases. With `dir` set, each case is written to
/// its own subdirectory and a combined profile CSV is added.
pub fn curvature_study(grid_resolution: usize, dir: Option<&Path>) -> Result<Vec<CaseResult>> {
    let configs = curvature_cases(grid_resolution);
    let results = match dir {
        Some(root) => configs
            .iter()
            .map(|c| run_case(c, &root.join(&c.name)).map(|(r, _)| r))
            .collect::<Result<Vec<_>>>()?,
        None => configs.iter().map(solve_case).collect::<Result<Vec<_>>>()?,
    };
    if let Some(root) = dir {
        fs::create_dir_all(root).map_err(|e| HarnessError::io(root, e))?;
        let path = root.join("curvature_profiles.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["case", "s_tilde", "xi", "sigma_s_tilde", "omega_s"])?;
        for r in &results {
            for p in &r.profile {
                w.write_record([
                    r.prepared.config.name.clone(),
                    fmt_num(p.s_tilde),
                    fmt_num(p.xi),
                    fmt_num(p.sigma_s_tilde),
                    fmt_num(p.omega_s),
                ])?;
            }
        }
        w.flush().map_err(|e| HarnessError::io(&path, e))?;
    }
    Ok(results)
}
