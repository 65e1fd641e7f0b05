//! Discretization errors and convergence orders.

use rayon::prelude::*;

use crate::basis::map_point;
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::mesh::Patch;
use crate::problem::ProblemSpec;
use crate::quadrature::{QuadratureRule, RuleSet};
use crate::space::FiniteElementSpace;

/// Degree of the quadrature used for error norms.
pub const ERROR_QUADRATURE_DEGREE: usize = 8;

/// One row of a convergence table.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ErrorReport {
    pub h: f64,
    pub delta: f64,
    pub l2_error: f64,
    pub energy_error: f64,
    pub eoc_l2: Option<f64>,
    pub eoc_energy: Option<f64>,
    pub pn: usize,
    pub n_l: usize,
    pub cond_lagrange: Option<f64>,
    pub cond_hier: Option<f64>,
    pub cg_iters: Option<usize>,
}

/// `log₂(e_coarse / e_fine)` for a mesh ratio of two.
pub fn compute_eoc(e_coarse: f64, e_fine: f64) -> Result<f64> {
    if !(e_coarse > 0.0 && e_fine > 0.0) {
        return Err(Error::Config(format!(
            "convergence order needs positive errors, got {e_coarse:e} and {e_fine:e}"
        )));
    }
    Ok((e_coarse / e_fine).log2())
}

/// Fills the EOC columns of consecutive rows.
pub fn fill_eoc(rows: &mut [ErrorReport]) {
    for k in 1..rows.len() {
        let (a, b) = (&rows[k - 1], &rows[k]);
        let ratio_ok = ((a.h / b.h) - 2.0).abs() < 1e-9;
        let eoc_l2 = compute_eoc(a.l2_error, b.l2_error).ok().filter(|_| ratio_ok);
        let eoc_energy = compute_eoc(a.energy_error, b.energy_error).ok().filter(|_| ratio_ok);
        rows[k].eoc_l2 = eoc_l2;
        rows[k].eoc_energy = eoc_energy;
    }
}

/// Applies `integrand(x, u_h(x), ∇u_h(x), element)` at every quadrature point
/// and sums `weight · value`, patch by patch in a fixed order.
fn integrate<F>(space: &FiniteElementSpace<'_>, coeffs: &[f64], rules: &RuleSet, integrand: F) -> f64
where
    F: Fn(Point2, f64, Point2, &crate::mesh::SubElement) -> f64 + Sync,
{
    assert_eq!(coeffs.len(), space.n_dofs());
    let dofs = &space.dofs;
    let per_patch: Vec<f64> = space
        .mesh
        .patches
        .par_iter()
        .map(|patch: &Patch| {
            let (i, j) = patch.index;
            if !dofs.is_active(i, j) {
                return 0.0;
            }
            let mut sum = 0.0;
            for el in &patch.elements {
                let rule: &QuadratureRule = match el.shape {
                    crate::basis::ElementShape::Tri => &rules.curved_triangle,
                    crate::basis::ElementShape::Quad => &rules.square,
                };
                let n = el.shape.n_nodes();
                let nodes: Vec<Point2> = el.local_nodes().iter().map(|&k| patch.layout.nodes[k as usize]).collect();
                let c: Vec<f64> = el.local_nodes().iter().map(|&k| coeffs[dofs.dof(i, j, k)]).collect();
                let mut values = [0.0; 9];
                let mut grads = [[0.0; 2]; 9];
                for (xi, w) in rule.iter() {
                    let m = map_point(el.shape, &nodes, xi);
                    el.shape.values(xi, &mut values);
                    el.shape.gradients(xi, &mut grads);
                    let mut uh = 0.0;
                    let mut guh = Point2::default();
                    for a in 0..n {
                        uh += c[a] * values[a];
                        let g = m.physical_gradient(grads[a]);
                        guh = guh + c[a] * Point2::new(g[0], g[1]);
                    }
                    sum += w * m.det.abs() * integrand(m.x, uh, guh, el);
                }
            }
            sum
        })
        .collect();
    per_patch.iter().sum()
}

/// `‖u - u_h‖_{L²(Ω)}` with `u` taken from the branch of the continuous
/// interface side at each quadrature point.
pub fn l2_error(space: &FiniteElementSpace<'_>, coeffs: &[f64], problem: &dyn ProblemSpec) -> f64 {
    l2_error_with(space, coeffs, problem, &RuleSet::of_degree(ERROR_QUADRATURE_DEGREE))
}

pub fn l2_error_with(space: &FiniteElementSpace<'_>, coeffs: &[f64], problem: &dyn ProblemSpec, rules: &RuleSet) -> f64 {
    integrate(space, coeffs, rules, |x, uh, _, _| {
        let e = problem.exact(problem.side_of(x), x) - uh;
        e * e
    })
    .sqrt()
}

/// `‖ν_h^{1/2} ∇(ũ - u_h)‖` with `ũ` the exact branch of each sub-element's
/// discrete side.
pub fn modified_energy_error(space: &FiniteElementSpace<'_>, coeffs: &[f64], problem: &dyn ProblemSpec) -> f64 {
    modified_energy_error_with(space, coeffs, problem, &RuleSet::of_degree(ERROR_QUADRATURE_DEGREE))
}

pub fn modified_energy_error_with(
    space: &FiniteElementSpace<'_>,
    coeffs: &[f64],
    problem: &dyn ProblemSpec,
    rules: &RuleSet,
) -> f64 {
    integrate(space, coeffs, rules, |x, _, guh, el| {
        let e = problem.exact_gradient(el.side, x) - guh;
        problem.nu(el.side) * e.dot(e)
    })
    .sqrt()
}

/// Nodal interpolant of the exact solution, branch by the continuous side.
pub fn interpolate(space: &FiniteElementSpace<'_>, f: impl Fn(Point2) -> f64) -> Vec<f64> {
    space.dofs.positions(space.mesh).into_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eoc_examples() {
        assert!((compute_eoc(1.74e-4, 2.13e-5).unwrap() - 3.03).abs() < 0.005);
        assert_eq!(compute_eoc(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(compute_eoc(8.0, 1.0).unwrap(), 3.0);
        assert!(compute_eoc(0.0, 1.0).is_err());
        assert!(compute_eoc(1.0, -1.0).is_err());
    }
}
