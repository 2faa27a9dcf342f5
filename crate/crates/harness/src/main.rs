use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gmsurf_harness::config::CaseConfig;
use gmsurf_harness::run::{run_case, PreparedCase};
use gmsurf_harness::studies::{
    convergence_study, curvature_study, write_convergence, ERROR_SAMPLES,
};
use gmsurf_harness::{HarnessError, Result};

#[derive(Parser)]
#[command(
    name = "matsurf",
    version,
    about = "Plane-strain solver for an open material surface in an elastic plane"
)]
struct Cli {
    /// Root directory for all outputs.
    #[arg(
        long,
        global = true,
        env = "MATSURF_OUTPUT_DIR",
        default_value = "matsurf-output"
    )]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one case (a case file or a previous run manifest).
    Solve { config: PathBuf },
    /// Errors of a mesh ladder against a reference mesh.
    Converge {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [10usize, 20, 40, 80])]
        ladder: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        reference: usize,
        #[arg(long, default_value_t = ERROR_SAMPLES)]
        samples: usize,
    },
    /// The four built-in shapes of equal length.
    CurvatureStudy {
        #[arg(long, default_value_t = 201)]
        grid_resolution: usize,
    },
    /// Parse a case and build its curve without solving.
    Validate { config: PathBuf },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve { config } => {
            let c = CaseConfig::load(&config)?;
            let dir = cli.out.join(&c.name);
            let (r, _) = run_case(&c, &dir)?;
            let d = &r.solution.diagnostics;
            println!(
                "{}: {} unknowns, residual {:.3e}, condition {:.3e} -> {}",
                c.name,
                d.unknowns,
                d.relative_residual,
                d.condition_1,
                dir.display()
            );
        }
        Command::Converge {
            config,
            ladder,
            reference,
            samples,
        } => {
            let c = CaseConfig::load(&config)?;
            let report = convergence_study(&c, &ladder, reference, samples)?;
            let dir = cli.out.join(&c.name);
            std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
            write_convergence(&dir.join("convergence.csv"), &report)?;
            for l in &report.levels {
                println!(
                    "N_e = {:4}  dof = {:4}  E_sigma = {:.3e}  E_omega = {:.3e}",
                    l.elements, l.degrees_of_freedom, l.e_sigma, l.e_omega
                );
            }
            if let Some(f) = report.failure {
                return Err(HarnessError::StudyAborted(f));
            }
        }
        Command::CurvatureStudy { grid_resolution } => {
            if grid_resolution < 2 {
                return Err(HarnessError::Config(
                    "grid resolution must be at least 2".into(),
                ));
            }
            let dir = cli.out.join("curvature_study");
            for r in curvature_study(grid_resolution, Some(&dir))? {
                println!("{} -> {}", r.prepared.config.name, dir.display());
            }
        }
        Command::Validate { config } => {
            let c = CaseConfig::load(&config)?;
            let p = PreparedCase::new(&c)?;
            println!(
                "{}: {} elements, {} basis functions, arc length {}, gamma {}, sigma0_tilde {}",
                c.name,
                p.problem.curve.mesh().element_count(),
                p.problem.basis_count(),
                p.arc_length,
                p.groups.gamma,
                p.groups.sigma0_tilde
            );
        }
    }
    Ok(())
}

fn io_err(path: &Path, e: std::io::Error) -> HarnessError {
    HarnessError::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("matsurf: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
