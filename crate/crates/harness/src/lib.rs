//! Configuration, geometry presets and study drivers around the
//! material-surface solver, plus the `matsurf` command-line tool.

pub mod cases;
pub mod config;
pub mod error;
pub mod nondim;
pub mod presets;
pub mod run;
pub mod studies;

pub use config::CaseConfig;
pub use error::{HarnessError, Result};
pub use presets::{preset_geometry, GeometrySpec, Grading};
pub use run::{run_case, solve_case, CaseResult, PreparedCase};
pub use studies::{convergence_study, curvature_study, ConvergenceReport};
