//! The 25-function patch bases, isoparametric patch maps and the global
//! degree-of-freedom numbering.

use crate::basis::{map_point, ElementShape, MappedPoint};
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::mesh::{lattice_coords, MeshModel, Patch, PatchGrid, SubElement, N_LOCAL};
use crate::sparse::CsrMatrix;

/// Reference coordinates `(a/4, b/4)` of local node `k = 5b + a`.
pub fn reference_node(k: u8) -> [f64; 2] {
    let (a, b) = lattice_coords(k);
    [a as f64 / 4.0, b as f64 / 4.0]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceKind {
    /// Biquadratic on four sub-squares.
    UncutQ2,
    /// Piecewise quadratic on eight sub-triangles.
    CutP2,
}

/// Values and reference gradients of the 25 patch functions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisEval {
    pub values: [f64; N_LOCAL],
    pub gradients: [[f64; 2]; N_LOCAL],
}

/// Nodal basis of the unit reference patch for one sub-element splitting.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceBasis {
    pub kind: ReferenceKind,
    pub elements: Vec<SubElement>,
}

impl ReferenceBasis {
    pub fn of_patch(patch: &Patch) -> Self {
        let kind = if patch.is_cut() {
            ReferenceKind::CutP2
        } else {
            ReferenceKind::UncutQ2
        };
        Self {
            kind,
            elements: patch.elements.clone(),
        }
    }

    /// Affine map from the unit reference element to sub-element `id` of the
    /// reference patch: `x̂ = o + B ξ`.
    fn affine(&self, id: usize) -> (Point2, [[f64; 2]; 2]) {
        let el = &self.elements[id];
        let p = |k: u8| {
            let [x, y] = reference_node(k);
            Point2::new(x, y)
        };
        let o = p(el.nodes[0]);
        let (e1, e2) = match el.shape {
            ElementShape::Tri => (p(el.nodes[1]) - o, p(el.nodes[2]) - o),
            ElementShape::Quad => (p(el.nodes[2]) - o, p(el.nodes[6]) - o),
        };
        (o, [[e1.x, e2.x], [e1.y, e2.y]])
    }

    /// Unit-element coordinates of the reference patch point `x̂` in
    /// sub-element `id`.
    pub fn local_coordinates(&self, id: usize, xhat: [f64; 2]) -> [f64; 2] {
        let (o, [[a, b], [c, d]]) = self.affine(id);
        let det = a * d - b * c;
        let (rx, ry) = (xhat[0] - o.x, xhat[1] - o.y);
        [(d * rx - b * ry) / det, (-c * rx + a * ry) / det]
    }

    /// Sub-element containing `x̂`, if any.
    pub fn locate(&self, xhat: [f64; 2]) -> Option<usize> {
        (0..self.elements.len()).find(|&id| {
            let xi = self.local_coordinates(id, xhat);
            self.elements[id].shape.contains(xi, 1e-12)
        })
    }

    /// Evaluates all 25 patch functions at `x̂` inside sub-element `id`;
    /// functions not supported there vanish.
    pub fn eval(&self, id: usize, xhat: [f64; 2]) -> BasisEval {
        let el = &self.elements[id];
        let xi = self.local_coordinates(id, xhat);
        debug_assert!(el.shape.contains(xi, 1e-9), "point outside sub-element");
        let mut v = [0.0; 9];
        let mut g = [[0.0; 2]; 9];
        el.shape.values(xi, &mut v);
        el.shape.gradients(xi, &mut g);
        let (_, [[a, b], [c, d]]) = self.affine(id);
        let det = a * d - b * c;
        let mut out = BasisEval {
            values: [0.0; N_LOCAL],
            gradients: [[0.0; 2]; N_LOCAL],
        };
        for (j, &k) in el.local_nodes().iter().enumerate() {
            out.values[k as usize] = v[j];
            // ∇_x̂ = B^{-T} ∇_ξ
            out.gradients[k as usize] = [(d * g[j][0] - c * g[j][1]) / det, (-b * g[j][0] + a * g[j][1]) / det];
        }
        out
    }
}

/// Isoparametric map of one patch, `T̂_P(x̂) = Σ x_j φ̂_j(x̂)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PatchMap {
    pub nodes: [Point2; N_LOCAL],
    pub basis: ReferenceBasis,
}

impl PatchMap {
    pub fn of_patch(patch: &Patch) -> Self {
        Self {
            nodes: patch.layout.nodes,
            basis: ReferenceBasis::of_patch(patch),
        }
    }

    /// Physical point, Jacobian `∂x/∂x̂` and its determinant at `x̂`.
    pub fn eval(&self, xhat: [f64; 2]) -> Option<MappedPoint> {
        let id = self.basis.locate(xhat)?;
        let b = self.basis.eval(id, xhat);
        let mut x = Point2::default();
        let mut jac = [[0.0; 2]; 2];
        for k in 0..N_LOCAL {
            let p = self.nodes[k];
            x = x + b.values[k] * p;
            for c in 0..2 {
                jac[0][c] += p.x * b.gradients[k][c];
                jac[1][c] += p.y * b.gradients[k][c];
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        Some(MappedPoint { x, jac, det })
    }

    /// Physical node coordinates of sub-element `id`, in local order.
    pub fn element_nodes(&self, id: usize) -> Vec<Point2> {
        self.basis.elements[id]
            .local_nodes()
            .iter()
            .map(|&k| self.nodes[k as usize])
            .collect()
    }

    /// Checks `det J > 0` at the given unit-element points of every
    /// sub-element.
    pub fn check_jacobian(&self, patch: (usize, usize), tri_points: &[[f64; 2]], quad_points: &[[f64; 2]]) -> Result<()> {
        for (id, el) in self.basis.elements.iter().enumerate() {
            let nodes = self.element_nodes(id);
            let points = match el.shape {
                ElementShape::Tri => tri_points,
                ElementShape::Quad => quad_points,
            };
            for &xi in points {
                let det = map_point(el.shape, &nodes, xi).det;
                if !(det > 0.0) {
                    return Err(Error::NonPositiveJacobian { patch, det });
                }
            }
        }
        Ok(())
    }
}

/// Global numbering of the patch nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct DofMap {
    pub grid: PatchGrid,
    /// Dense index per global lattice node, `usize::MAX` when unused.
    index: Vec<usize>,
    pub total_dofs: usize,
    /// Sorted indices of the nodes on the boundary of the active region's
    /// bounding grid.
    pub boundary_dofs: Vec<usize>,
    active: Vec<bool>,
}

impl DofMap {
    /// Numbers the nodes of the patches selected by `active`.
    pub fn new(grid: &PatchGrid, active: impl Fn(usize, usize) -> bool) -> Self {
        let n = grid.n;
        let m = grid.nodes_per_side();
        let mut used = vec![false; m * m];
        let mut act = vec![false; n * n];
        for j in 0..n {
            for i in 0..n {
                if !active(i, j) {
                    continue;
                }
                act[j * n + i] = true;
                for k in 0..N_LOCAL as u8 {
                    used[grid.global_node(i, j, k)] = true;
                }
            }
        }
        let mut index = vec![usize::MAX; m * m];
        let mut total = 0;
        let mut boundary = Vec::new();
        for (g, &u) in used.iter().enumerate() {
            if u {
                index[g] = total;
                let (a, b) = (g % m, g / m);
                if a == 0 || b == 0 || a == m - 1 || b == m - 1 {
                    boundary.push(total);
                }
                total += 1;
            }
        }
        Self {
            grid: *grid,
            index,
            total_dofs: total,
            boundary_dofs: boundary,
            active: act,
        }
    }

    pub fn is_active(&self, i: usize, j: usize) -> bool {
        self.active[j * self.grid.n + i]
    }

    pub fn dof(&self, i: usize, j: usize, local: u8) -> usize {
        self.index[self.grid.global_node(i, j, local)]
    }

    pub fn patch_dofs(&self, i: usize, j: usize) -> [usize; N_LOCAL] {
        std::array::from_fn(|k| self.dof(i, j, k as u8))
    }

    pub fn is_boundary(&self, dof: usize) -> bool {
        self.boundary_dofs.binary_search(&dof).is_ok()
    }

    /// Physical position of every degree of freedom.
    pub fn positions(&self, mesh: &MeshModel) -> Vec<Point2> {
        let mut out = vec![Point2::default(); self.total_dofs];
        for p in &mesh.patches {
            let (i, j) = p.index;
            if !self.is_active(i, j) {
                continue;
            }
            for k in 0..N_LOCAL as u8 {
                out[self.dof(i, j, k)] = p.layout.nodes[k as usize];
            }
        }
        out
    }
}

/// Numbers every node of `mesh`.
pub fn build_dof_map(mesh: &MeshModel) -> DofMap {
    DofMap::new(&mesh.grid, |_, _| true)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum BasisKind {
    #[default]
    Lagrange,
    HierarchicalScaled,
}

impl std::str::FromStr for BasisKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "lagrange" => Ok(BasisKind::Lagrange),
            "hierarchical" | "hierarchical-scaled" => Ok(BasisKind::HierarchicalScaled),
            other => Err(format!("unknown basis '{other}'")),
        }
    }
}

impl std::fmt::Display for BasisKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BasisKind::Lagrange => "lagrange",
            BasisKind::HierarchicalScaled => "hierarchical",
        })
    }
}

/// Mesh, node numbering and basis choice.
#[derive(Clone, Debug)]
pub struct FiniteElementSpace<'m> {
    pub mesh: &'m MeshModel,
    pub dofs: DofMap,
    pub basis: BasisKind,
}

impl<'m> FiniteElementSpace<'m> {
    pub fn new(mesh: &'m MeshModel, basis: BasisKind) -> Self {
        Self {
            mesh,
            dofs: build_dof_map(mesh),
            basis,
        }
    }

    pub fn n_dofs(&self) -> usize {
        self.dofs.total_dofs
    }
}

/// Unscaled hierarchical change of basis `x_lagrange = S x_hier`.
///
/// Patch corners keep nodal values. Edge points and the patch midpoint
/// become deviations from the bilinear interpolant of the corners at their
/// physical positions; every remaining node is a deviation from the mean of
/// the sub-edge endpoints it bisects (the four quad corners for uncut
/// sub-square centres).
pub fn hierarchical_levels(mesh: &MeshModel, dofs: &DofMap) -> CsrMatrix {
    use crate::mesh::{CENTER, CORNERS, EDGE_POINTS};
    let n = dofs.total_dofs;
    let mut rows: Vec<Option<Vec<(usize, f64)>>> = vec![None; n];

    for p in &mesh.patches {
        let (i, j) = p.index;
        if !dofs.is_active(i, j) {
            continue;
        }
        let d = |k: u8| dofs.dof(i, j, k);
        let c0 = p.layout.nodes[CORNERS[0] as usize];
        let c2 = p.layout.nodes[CORNERS[2] as usize];
        for &k in &CORNERS {
            rows[d(k)].get_or_insert_with(|| vec![(d(k), 1.0)]);
        }
        for &k in EDGE_POINTS.iter().chain(std::iter::once(&CENTER)) {
            if rows[d(k)].is_some() {
                continue;
            }
            let x = p.layout.nodes[k as usize];
            let s = (x.x - c0.x) / (c2.x - c0.x);
            let t = (x.y - c0.y) / (c2.y - c0.y);
            let w = [(1.0 - s) * (1.0 - t), s * (1.0 - t), s * t, (1.0 - s) * t];
            let mut row = vec![(d(k), 1.0)];
            for c in 0..4 {
                if w[c] != 0.0 {
                    row.push((d(CORNERS[c]), w[c]));
                }
            }
            rows[d(k)] = Some(row);
        }
    }

    // third level: resolve against the lower-level rows
    let combine = |rows: &Vec<Option<Vec<(usize, f64)>>>, me: usize, parents: &[usize]| {
        let w = 1.0 / parents.len() as f64;
        let mut row = vec![(me, 1.0)];
        for &q in parents {
            for &(c, v) in rows[q].as_ref().expect("lower level assigned first") {
                row.push((c, w * v));
            }
        }
        row
    };
    for p in &mesh.patches {
        let (i, j) = p.index;
        if !dofs.is_active(i, j) {
            continue;
        }
        let d = |k: u8| dofs.dof(i, j, k);
        for el in &p.elements {
            match el.shape {
                ElementShape::Tri => {
                    let v = el.nodes;
                    for (m, a, b) in [(v[3], v[0], v[1]), (v[4], v[1], v[2]), (v[5], v[2], v[0])] {
                        if rows[d(m)].is_none() {
                            let r = combine(&rows, d(m), &[d(a), d(b)]);
                            rows[d(m)] = Some(r);
                        }
                    }
                }
                ElementShape::Quad => {
                    let v = el.nodes;
                    let (c00, c20, c02, c22) = (v[0], v[2], v[6], v[8]);
                    for (m, parents) in [
                        (v[1], vec![c00, c20]),
                        (v[3], vec![c00, c02]),
                        (v[5], vec![c20, c22]),
                        (v[7], vec![c02, c22]),
                        (v[4], vec![c00, c20, c02, c22]),
                    ] {
                        if rows[d(m)].is_none() {
                            let ps: Vec<usize> = parents.iter().map(|&q| d(q)).collect();
                            let r = combine(&rows, d(m), &ps);
                            rows[d(m)] = Some(r);
                        }
                    }
                }
            }
        }
    }

    let mut triplets = Vec::new();
    for (r, row) in rows.into_iter().enumerate() {
        for (c, v) in row.unwrap_or_else(|| vec![(r, 1.0)]) {
            triplets.push((r, c, v));
        }
    }
    CsrMatrix::from_triplets(n, n, triplets)
}
