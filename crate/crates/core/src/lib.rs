//! Isogeometric boundary-element solver for an infinite plane-strain matrix
//! containing one open Gurtin–Murdoch material surface.
//!
//! The surface is a NURBS curve; its two surface-stress components σ^S and
//! ω^S are expanded in the curve's own basis and found by Greville
//! collocation of the coupled singular integral equations. Bulk fields
//! follow from the single-layer representation.

pub mod assembly;
pub mod error;
pub mod field;
pub mod geom;
pub mod kernels;
pub mod linalg;
pub mod nurbs;
pub mod quadrature;

pub use assembly::{
    apply_tip_conditions, solve_dense, Assembler, AssemblyOptions, CurvatureScaling, LinearSystem,
    Problem, RowPair,
};
pub use error::{Error, Result};
pub use field::{
    bie_residual, ArcLengthTable, FieldEvaluator, FieldOptions, FieldSample, SolveDiagnostics,
    SurfaceFieldSample, SurfaceSolution,
};
pub use geom::{Sym2, Vec2};
pub use kernels::{BulkMaterial, FarFieldLoad, StressState, SurfaceMaterial};
pub use nurbs::{ElementMesh, KnotVector, LocalFrame, NurbsCurve};
pub use quadrature::{QuadratureRule, SingularPolicy};
