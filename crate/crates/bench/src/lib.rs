//! Shared fixtures for the benchmarks.

use lmfem::problem::{DOMAIN_ORIGIN, DOMAIN_WIDTH};
use lmfem::{build_mesh, ExampleKind, ExampleProblem, MeshModel, MeshParams, PatchGrid, ProblemSpec};

/// Circle example on `n` patches per side, interface shifted by `shift`.
pub fn circle(n: usize, shift: f64) -> (ExampleProblem, MeshModel) {
    let problem = ExampleProblem::new(ExampleKind::Circle, shift);
    let grid = PatchGrid::new(DOMAIN_ORIGIN, DOMAIN_WIDTH, n).expect("valid grid");
    let mesh = build_mesh(&grid, problem.level_set(), &MeshParams::for_grid(&grid)).expect("resolvable interface");
    (problem, mesh)
}
