//! Quadratic Lagrange shape functions and the isoparametric element maps.
//!
//! Local node order on the reference triangle is `v0, v1, v2, m01, m12, m20`
//! with vertices `(0,0), (1,0), (0,1)`. On the reference square `[0,1]²` the
//! nine nodes are ordered lexicographically, node `a + 3b` at `(a/2, b/2)`.

use crate::geometry::Point2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementShape {
    Tri,
    Quad,
}

impl ElementShape {
    pub const fn n_nodes(self) -> usize {
        match self {
            ElementShape::Tri => 6,
            ElementShape::Quad => 9,
        }
    }

    /// Reference coordinates of the local nodes.
    pub fn reference_nodes(self) -> &'static [[f64; 2]] {
        match self {
            ElementShape::Tri => &TRI_NODES,
            ElementShape::Quad => &QUAD_NODES,
        }
    }

    pub fn values(self, xi: [f64; 2], out: &mut [f64]) {
        match self {
            ElementShape::Tri => out[..6].copy_from_slice(&p2_values(xi)),
            ElementShape::Quad => out[..9].copy_from_slice(&q2_values(xi)),
        }
    }

    pub fn gradients(self, xi: [f64; 2], out: &mut [[f64; 2]]) {
        match self {
            ElementShape::Tri => out[..6].copy_from_slice(&p2_gradients(xi)),
            ElementShape::Quad => out[..9].copy_from_slice(&q2_gradients(xi)),
        }
    }

    pub fn contains(self, xi: [f64; 2], tol: f64) -> bool {
        let inside = |v: f64| v >= -tol && v <= 1.0 + tol;
        match self {
            ElementShape::Tri => xi[0] >= -tol && xi[1] >= -tol && xi[0] + xi[1] <= 1.0 + tol,
            ElementShape::Quad => inside(xi[0]) && inside(xi[1]),
        }
    }
}

const TRI_NODES: [[f64; 2]; 6] = [
    [0.0, 0.0],
    [1.0, 0.0],
    [0.0, 1.0],
    [0.5, 0.0],
    [0.5, 0.5],
    [0.0, 0.5],
];

const QUAD_NODES: [[f64; 2]; 9] = [
    [0.0, 0.0],
    [0.5, 0.0],
    [1.0, 0.0],
    [0.0, 0.5],
    [0.5, 0.5],
    [1.0, 0.5],
    [0.0, 1.0],
    [0.5, 1.0],
    [1.0, 1.0],
];

pub fn p2_values(xi: [f64; 2]) -> [f64; 6] {
    let l1 = xi[0];
    let l2 = xi[1];
    let l0 = 1.0 - l1 - l2;
    [
        l0 * (2.0 * l0 - 1.0),
        l1 * (2.0 * l1 - 1.0),
        l2 * (2.0 * l2 - 1.0),
        4.0 * l0 * l1,
        4.0 * l1 * l2,
        4.0 * l2 * l0,
    ]
}

pub fn p2_gradients(xi: [f64; 2]) -> [[f64; 2]; 6] {
    let l1 = xi[0];
    let l2 = xi[1];
    let l0 = 1.0 - l1 - l2;
    let d0 = 1.0 - 4.0 * l0;
    [
        [d0, d0],
        [4.0 * l1 - 1.0, 0.0],
        [0.0, 4.0 * l2 - 1.0],
        [4.0 * (l0 - l1), -4.0 * l1],
        [4.0 * l2, 4.0 * l1],
        [-4.0 * l2, 4.0 * (l0 - l2)],
    ]
}

fn quad_1d(t: f64) -> [f64; 3] {
    [
        2.0 * (t - 0.5) * (t - 1.0),
        -4.0 * t * (t - 1.0),
        2.0 * t * (t - 0.5),
    ]
}

fn quad_1d_derivative(t: f64) -> [f64; 3] {
    [4.0 * t - 3.0, 4.0 - 8.0 * t, 4.0 * t - 1.0]
}

pub fn q2_values(xi: [f64; 2]) -> [f64; 9] {
    let lx = quad_1d(xi[0]);
    let ly = quad_1d(xi[1]);
    let mut out = [0.0; 9];
    for b in 0..3 {
        for a in 0..3 {
            out[a + 3 * b] = lx[a] * ly[b];
        }
    }
    out
}

pub fn q2_gradients(xi: [f64; 2]) -> [[f64; 2]; 9] {
    let lx = quad_1d(xi[0]);
    let ly = quad_1d(xi[1]);
    let dx = quad_1d_derivative(xi[0]);
    let dy = quad_1d_derivative(xi[1]);
    let mut out = [[0.0; 2]; 9];
    for b in 0..3 {
        for a in 0..3 {
            out[a + 3 * b] = [dx[a] * ly[b], lx[a] * dy[b]];
        }
    }
    out
}

/// Physical image of a reference point with the Jacobian of the map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MappedPoint {
    pub x: Point2,
    /// `jac[r][c] = ∂x_r / ∂ξ_c`.
    pub jac: [[f64; 2]; 2],
    pub det: f64,
}

impl MappedPoint {
    /// Maps a reference gradient to physical coordinates, `J^{-T} ∇̂φ`.
    pub fn physical_gradient(&self, g: [f64; 2]) -> [f64; 2] {
        let [[a, b], [c, d]] = self.jac;
        let inv = 1.0 / self.det;
        [(d * g[0] - c * g[1]) * inv, (-b * g[0] + a * g[1]) * inv]
    }
}

/// Evaluates the isoparametric element map `x(ξ) = Σ x_j φ̂_j(ξ)`.
pub fn map_point(shape: ElementShape, nodes: &[Point2], xi: [f64; 2]) -> MappedPoint {
    let n = shape.n_nodes();
    debug_assert_eq!(nodes.len(), n);
    let mut values = [0.0; 9];
    let mut grads = [[0.0; 2]; 9];
    shape.values(xi, &mut values);
    shape.gradients(xi, &mut grads);
    let mut x = Point2::default();
    let mut jac = [[0.0; 2]; 2];
    for j in 0..n {
        let p = nodes[j];
        x.x += p.x * values[j];
        x.y += p.y * values[j];
        jac[0][0] += p.x * grads[j][0];
        jac[0][1] += p.x * grads[j][1];
        jac[1][0] += p.y * grads[j][0];
        jac[1][1] += p.y * grads[j][1];
    }
    let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    MappedPoint { x, jac, det }
}
