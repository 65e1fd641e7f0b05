//! Locally modified second-order finite elements for elliptic interface
//! problems on Cartesian patch meshes.
//!
//! The interface is the zero set of a level-set function. Patches cut by it
//! are split into eight triangles whose edges follow the interface; nodes on
//! the interface are then moved onto it so that the discrete interface is
//! piecewise quadratic. Patches where the curved elements would degenerate
//! keep a straight interface.

pub mod assembly;
pub mod basis;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod mesh;
pub mod norms;
pub mod problem;
pub mod quadrature;
pub mod solver;
pub mod space;
pub mod sparse;
pub mod vtk;

pub use assembly::{apply_dirichlet, assemble_load, assemble_problem, assemble_stiffness, hierarchical_transform, LinearSystem};
pub use error::{Error, GeometryError, MeshError, Result, SolverError};
pub use experiment::{condition_study, run_example, sweep_delta, ExperimentConfig};
pub use geometry::{find_edge_cut, project_along_direction, LevelSet, LevelSetField, LineCut, Point2, RootOptions};
pub use mesh::{build_mesh, CutKind, MeshModel, MeshParams, PatchGrid, Side};
pub use norms::{compute_eoc, l2_error, modified_energy_error, ErrorReport};
pub use problem::{ExampleKind, ExampleProblem, ProblemSpec};
pub use solver::{cg_solve, estimate_condition, CgOptions, ConditionEstimate};
pub use space::{build_dof_map, BasisKind, DofMap, FiniteElementSpace};
pub use sparse::CsrMatrix;
