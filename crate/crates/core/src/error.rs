use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("boundary vertex {vertex} has radius {radius}, expected 1")]
    BoundaryRadius { vertex: usize, radius: f64 },

    #[error("triangle {triangle} is not counterclockwise (signed area {area})")]
    Orientation { triangle: usize, area: f64 },

    #[error("Euler characteristic is {chi}, expected 1 for a disk (V={vertices}, E={edges}, T={triangles})")]
    Euler {
        chi: i64,
        vertices: usize,
        edges: usize,
        triangles: usize,
    },

    #[error("boundary edges do not form a single closed loop: {0}")]
    BoundaryLoop(String),

    #[error("radial function must be positive, found {value} at node {node}")]
    NonPositiveRadius { node: usize, value: f64 },

    #[error("stiffness matrix is not positive definite (p^T A p = {curvature} at iteration {iteration})")]
    NotPositiveDefinite { iteration: usize, curvature: f64 },

    #[error("linear solver did not converge: relative residual {residual:e} after {iterations} iterations")]
    SolverDiverged { residual: f64, iterations: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Sinkhorn scaling produced non-finite values at iteration {iteration}; regularisation {delta} too small for the cost scale")]
    SinkhornOverflow { iteration: usize, delta: f64 },

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
