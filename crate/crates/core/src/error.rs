use std::path::PathBuf;

use thiserror::Error;

use crate::geometry::Point2;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeometryError {
    #[error("root iteration did not converge after {iterations} steps (|γ| = {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("interface crosses segment {a} -> {b} more than once")]
    MultipleCrossings { a: Point2, b: Point2 },
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MeshError {
    #[error("interface not resolvable in patch ({}, {}): {reason}", patch.0, patch.1)]
    AssumptionViolation {
        patch: (usize, usize),
        reason: String,
    },
    #[error("degenerate sub-element geometry: {0}")]
    DegenerateGeometry(String),
    #[error("invalid patch grid: {0}")]
    InvalidGrid(String),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolverError {
    #[error("CG did not reach tolerance after {iterations} iterations (relative residual {residual:e})")]
    MaxIterationsExceeded { iterations: usize, residual: f64 },
    #[error("system matrix is not positive definite (pᵀAp = {0:e})")]
    NotPositiveDefinite(f64),
}

/// Errors surfaced by the library's top-level entry points.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("non-positive Jacobian determinant {det:e} in patch ({}, {})", patch.0, patch.1)]
    NonPositiveJacobian { patch: (usize, usize), det: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{source}; the interface is not resolved at h = {h}, refine the mesh (smaller h)")]
    Unresolved {
        h: f64,
        #[source]
        source: Box<Error>,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Whether the failure comes from an interface the patch grid cannot
    /// resolve (too coarse a mesh).
    pub fn is_assumption_violation(&self) -> bool {
        matches!(
            self,
            Error::Mesh(MeshError::AssumptionViolation { .. })
                | Error::Geometry(GeometryError::MultipleCrossings { .. })
                | Error::Unresolved { .. }
        )
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
