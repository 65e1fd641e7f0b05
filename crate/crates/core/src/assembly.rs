//! Stiffness and load assembly, Dirichlet elimination and the hierarchical
//! change of basis.

use rayon::prelude::*;

use crate::basis::{map_point, ElementShape};
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::mesh::{Patch, SubElement};
use crate::problem::ProblemSpec;
use crate::quadrature::{QuadratureRule, RuleSet};
use crate::space::{hierarchical_levels, BasisKind, FiniteElementSpace};
use crate::sparse::CsrMatrix;

/// Symmetric sparse system with its Dirichlet constraints.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// `(dof, value)` pairs, sorted by dof.
    pub constraints: Vec<(usize, f64)>,
}

impl LinearSystem {
    pub fn n(&self) -> usize {
        self.rhs.len()
    }

    /// Unconstrained degrees of freedom, sorted.
    pub fn free_dofs(&self) -> Vec<usize> {
        let mut fixed = vec![false; self.n()];
        for &(d, _) in &self.constraints {
            fixed[d] = true;
        }
        (0..self.n()).filter(|&d| !fixed[d]).collect()
    }
}

/// Local matrices of one sub-element.
#[derive(Clone, Debug)]
pub struct ElementSystem {
    pub dofs: [usize; 9],
    pub n: usize,
    pub stiffness: [[f64; 9]; 9],
    pub load: [f64; 9],
}

/// Whether an element needs the curved-element quadrature rule.
pub fn is_curved(patch: &Patch, el: &SubElement) -> bool {
    el.shape == ElementShape::Tri && el.local_nodes()[3..].iter().any(|&k| patch.layout.moved[k as usize])
}

pub fn element_rule<'r>(rules: &'r RuleSet, patch: &Patch, el: &SubElement) -> &'r QuadratureRule {
    match el.shape {
        ElementShape::Quad => &rules.square,
        ElementShape::Tri if is_curved(patch, el) => &rules.curved_triangle,
        ElementShape::Tri => &rules.straight_triangle,
    }
}

/// `K_ij = ν ∫ ∇φ_j·∇φ_i` and `F_i = ∫ f φ_i` on the isoparametric element
/// with physical `nodes`. Only the upper triangle is integrated; the lower
/// one is mirrored.
pub fn element_system(
    shape: ElementShape,
    nodes: &[Point2],
    rule: &QuadratureRule,
    nu: f64,
    f: impl Fn(Point2) -> f64,
) -> std::result::Result<([[f64; 9]; 9], [f64; 9]), f64> {
    let n = shape.n_nodes();
    let mut k = [[0.0; 9]; 9];
    let mut load = [0.0; 9];
    let mut values = [0.0; 9];
    let mut grads = [[0.0; 2]; 9];
    let mut phys = [[0.0; 2]; 9];
    for (xi, w) in rule.iter() {
        let m = map_point(shape, nodes, xi);
        if !(m.det > 0.0) {
            return Err(m.det);
        }
        shape.values(xi, &mut values);
        shape.gradients(xi, &mut grads);
        for a in 0..n {
            phys[a] = m.physical_gradient(grads[a]);
        }
        let dx = w * m.det;
        let fx = f(m.x) * dx;
        for a in 0..n {
            load[a] += fx * values[a];
            for b in a..n {
                k[a][b] += nu * dx * (phys[a][0] * phys[b][0] + phys[a][1] * phys[b][1]);
            }
        }
    }
    for a in 0..n {
        for b in 0..a {
            k[a][b] = k[b][a];
        }
    }
    Ok((k, load))
}

/// Element systems of every active patch, in patch order.
pub fn element_systems(
    space: &FiniteElementSpace<'_>,
    problem: &dyn ProblemSpec,
    rules: &RuleSet,
) -> Result<Vec<Vec<ElementSystem>>> {
    let dofs = &space.dofs;
    space
        .mesh
        .patches
        .par_iter()
        .filter(|p| dofs.is_active(p.index.0, p.index.1))
        .map(|patch| {
            let (i, j) = patch.index;
            patch
                .elements
                .iter()
                .map(|el| {
                    let nodes: Vec<Point2> = el.local_nodes().iter().map(|&k| patch.layout.nodes[k as usize]).collect();
                    let rule = element_rule(rules, patch, el);
                    let (stiffness, load) = element_system(el.shape, &nodes, rule, problem.nu(el.side), |x| {
                        problem.source(el.side, x)
                    })
                    .map_err(|det| Error::NonPositiveJacobian { patch: (i, j), det })?;
                    let mut d = [0usize; 9];
                    for (a, &k) in el.local_nodes().iter().enumerate() {
                        d[a] = dofs.dof(i, j, k);
                    }
                    Ok(ElementSystem {
                        dofs: d,
                        n: el.shape.n_nodes(),
                        stiffness,
                        load,
                    })
                })
                .collect()
        })
        .collect()
}

fn sparsity(n_dofs: usize, elements: &[Vec<ElementSystem>]) -> CsrMatrix {
    let mut pattern: Vec<Vec<usize>> = vec![Vec::new(); n_dofs];
    for e in elements.iter().flatten() {
        for a in 0..e.n {
            pattern[e.dofs[a]].extend_from_slice(&e.dofs[..e.n]);
        }
    }
    pattern.par_iter_mut().for_each(|row| {
        row.sort_unstable();
        row.dedup();
    });
    CsrMatrix::from_pattern(n_dofs, pattern)
}

/// Assembles the unconstrained stiffness matrix and load vector.
pub fn assemble_system(space: &FiniteElementSpace<'_>, problem: &dyn ProblemSpec, rules: &RuleSet) -> Result<LinearSystem> {
    let elements = element_systems(space, problem, rules)?;
    let n = space.n_dofs();
    let mut matrix = sparsity(n, &elements);
    let mut rhs = vec![0.0; n];
    for e in elements.iter().flatten() {
        for a in 0..e.n {
            rhs[e.dofs[a]] += e.load[a];
            for b in 0..e.n {
                matrix.add(e.dofs[a], e.dofs[b], e.stiffness[a][b]);
            }
        }
    }
    Ok(LinearSystem {
        matrix,
        rhs,
        constraints: Vec::new(),
    })
}

pub fn assemble_stiffness(space: &FiniteElementSpace<'_>, problem: &dyn ProblemSpec) -> Result<CsrMatrix> {
    Ok(assemble_system(space, problem, &RuleSet::assembly())?.matrix)
}

pub fn assemble_load(space: &FiniteElementSpace<'_>, problem: &dyn ProblemSpec) -> Result<Vec<f64>> {
    Ok(assemble_system(space, problem, &RuleSet::assembly())?.rhs)
}

/// Symmetric elimination of `u = g` on the given dofs: their rows and
/// columns become identity, and the known values move to the right-hand side.
pub fn apply_dirichlet(system: &mut LinearSystem, constraints: &[(usize, f64)]) {
    let n = system.n();
    let mut value = vec![None; n];
    for &(d, g) in constraints {
        value[d] = Some(g);
    }
    let a = &mut system.matrix;
    for r in 0..n {
        let range = a.row_ptr[r]..a.row_ptr[r + 1];
        if let Some(g) = value[r] {
            for k in range {
                a.values[k] = if a.col_idx[k] == r { 1.0 } else { 0.0 };
            }
            system.rhs[r] = g;
        } else {
            for k in range {
                if let Some(g) = value[a.col_idx[k]] {
                    system.rhs[r] -= a.values[k] * g;
                    a.values[k] = 0.0;
                }
            }
        }
    }
    let mut all: Vec<(usize, f64)> = system.constraints.iter().copied().chain(constraints.iter().copied()).collect();
    all.sort_by_key(|c| c.0);
    all.dedup_by_key(|c| c.0);
    system.constraints = all;
}

/// Dirichlet values of `problem` at the boundary nodes of `space`.
pub fn boundary_constraints(space: &FiniteElementSpace<'_>, problem: &dyn ProblemSpec) -> Vec<(usize, f64)> {
    let pos = space.dofs.positions(space.mesh);
    space
        .dofs
        .boundary_dofs
        .iter()
        .map(|&d| (d, problem.boundary(pos[d])))
        .collect()
}

/// Assembled, constrained system for `problem` on `space`.
pub fn assemble_problem(space: &FiniteElementSpace<'_>, problem: &dyn ProblemSpec) -> Result<LinearSystem> {
    let mut system = assemble_system(space, problem, &RuleSet::assembly())?;
    let constraints = boundary_constraints(space, problem);
    apply_dirichlet(&mut system, &constraints);
    Ok(system)
}

/// Change of basis `x = S x̂` for a constrained system.
///
/// For [`BasisKind::Lagrange`] this is the identity. For the scaled
/// hierarchical basis, couplings of free nodes to constrained ones are
/// dropped (the constrained part is handled by elimination), and every
/// column is scaled by `(Sᵀ A S)_ll^{-1/2}`.
pub fn hierarchical_transform(space: &FiniteElementSpace<'_>, system: &LinearSystem) -> CsrMatrix {
    let n = system.n();
    if space.basis == BasisKind::Lagrange {
        return CsrMatrix::identity(n);
    }
    let levels = hierarchical_levels(space.mesh, &space.dofs);
    let mut fixed = vec![false; n];
    for &(d, _) in &system.constraints {
        fixed[d] = true;
    }
    let mut triplets = Vec::with_capacity(levels.nnz());
    for r in 0..n {
        if fixed[r] {
            triplets.push((r, r, 1.0));
            continue;
        }
        let (cols, vals) = levels.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            if !fixed[c] {
                triplets.push((r, c, v));
            }
        }
    }
    let mut s = CsrMatrix::from_triplets(n, n, triplets);
    let a_s = system.matrix.matmul(&s);
    let st = s.transpose();
    let at_s = a_s.transpose();
    let scale: Vec<f64> = (0..n)
        .map(|l| {
            let (cols, vals) = st.row(l);
            let d: f64 = cols.iter().zip(vals).map(|(&k, &v)| v * at_s.get(l, k)).sum();
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    s.scale(&vec![1.0; n], &scale);
    s
}

/// `(Sᵀ A S, Sᵀ b)`.
pub fn transform_system(system: &LinearSystem, s: &CsrMatrix) -> LinearSystem {
    let st = s.transpose();
    let matrix = st.matmul(&system.matrix).matmul(s);
    let rhs = st.mul_vec(&system.rhs);
    LinearSystem {
        matrix,
        rhs,
        constraints: system.constraints.clone(),
    }
}
