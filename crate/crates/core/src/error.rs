use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter {xi} outside the knot domain [{lo}, {hi}]")]
    Domain { xi: f64, lo: f64, hi: f64 },

    #[error("invalid knot vector: {0}")]
    KnotVector(String),

    #[error("invalid curve: {0}")]
    Curve(String),

    #[error("degenerate geometry at xi = {xi}: jacobian {jacobian:e} below tolerance")]
    Geometry { xi: f64, jacobian: f64 },

    #[error("kernel singularity: distance {distance:e} below {threshold:e}")]
    Singularity { distance: f64, threshold: f64 },

    #[error("invalid material: {0}")]
    Material(String),

    #[error("quadrature contract violated: {0}")]
    Quadrature(String),

    #[error("assembly failed at collocation parameter {xi} (element {element}): {reason}")]
    Assembly {
        xi: f64,
        element: usize,
        reason: String,
    },

    #[error("matrix is singular to working precision: pivot {pivot:e} at column {column} below {threshold:e}")]
    SingularMatrix {
        column: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("point at distance {distance:e} from the surface is inside the near-field threshold {threshold:e}")]
    NearSurface { distance: f64, threshold: f64 },

    #[error("relative Von Mises stress undefined: far-field Von Mises stress is zero")]
    ZeroReference,

    #[error("curve file, line {line}: {message}")]
    Parse { line: usize, message: String },
}
