//! Straight-edge node placement and sub-element splitting of a single patch.

use crate::error::MeshError;
use crate::geometry::{line_intersection, Point2};

use super::angle::interior_angles_straight;
use super::classify::{CutConfig, CutKind};
use super::{
    lattice, lattice_midpoint, Curvature, Side, SubElement, CENTER, CORNERS, EDGE_POINTS, N_LOCAL,
};
use crate::basis::ElementShape;

/// The 25 node positions of a patch, indexed by the reference 5×5 lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct PatchNodeLayout {
    pub nodes: [Point2; N_LOCAL],
    /// Nodes moved onto the interface by the quadratic rearrangement.
    pub moved: [bool; N_LOCAL],
}

impl PatchNodeLayout {
    pub fn node(&self, k: u8) -> Point2 {
        self.nodes[k as usize]
    }

    pub fn sub_element_nodes(&self, el: &SubElement) -> Vec<Point2> {
        el.local_nodes().iter().map(|&k| self.node(k)).collect()
    }
}

/// How the quadrant at corner `k` is divided into two triangles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Diagonal {
    /// From the patch corner to the patch midpoint `x_m`.
    CornerToCenter,
    /// Between the two edge points adjacent to the corner.
    EdgeToEdge,
}

/// Output of the straight-edge stage.
#[derive(Clone, Debug, PartialEq)]
pub struct StraightLayout {
    pub layout: PatchNodeLayout,
    pub elements: Vec<SubElement>,
    /// Sub-element edges (lattice vertex pairs) forming the discrete interface.
    pub interface_edges: Vec<(u8, u8)>,
    pub diagonals: Option<[Diagonal; 4]>,
}

fn quadrant_vertices(k: usize) -> [u8; 4] {
    [CORNERS[k], EDGE_POINTS[k], CENTER, EDGE_POINTS[(k + 3) % 4]]
}

fn triangle_nodes(v: [u8; 3]) -> [u8; 9] {
    [
        v[0],
        v[1],
        v[2],
        lattice_midpoint(v[0], v[1]),
        lattice_midpoint(v[1], v[2]),
        lattice_midpoint(v[2], v[0]),
        0,
        0,
        0,
    ]
}

/// Triangles of quadrant `k`, counter-clockwise.
pub(crate) fn quadrant_triangles(k: usize, diagonal: Diagonal) -> [[u8; 3]; 2] {
    let [c, e, m, e_prev] = quadrant_vertices(k);
    match diagonal {
        Diagonal::CornerToCenter => [[c, e, m], [c, m, e_prev]],
        Diagonal::EdgeToEdge => [[c, e, e_prev], [e, m, e_prev]],
    }
}

/// Straight midpoints of every sub-element edge whose endpoints are lattice
/// vertices, for the current vertex positions.
pub(crate) fn fill_straight_midpoints(nodes: &mut [Point2; N_LOCAL], elements: &[SubElement]) {
    for el in elements {
        match el.shape {
            ElementShape::Tri => {
                let n = el.nodes;
                for (a, b, m) in [(n[0], n[1], n[3]), (n[1], n[2], n[4]), (n[2], n[0], n[5])] {
                    nodes[m as usize] = nodes[a as usize].midpoint(nodes[b as usize]);
                }
            }
            ElementShape::Quad => {}
        }
    }
}

/// Places the 25 patch nodes and splits the patch into sub-elements.
///
/// `corners` are the physical corners `c0..c3`; cut points on edges are taken
/// from `config` so that neighbouring patches see identical positions.
pub fn build_node_layout(config: &CutConfig, corners: [Point2; 4]) -> Result<StraightLayout, MeshError> {
    let mut nodes = [Point2::default(); N_LOCAL];
    for k in 0..4 {
        nodes[CORNERS[k] as usize] = corners[k];
    }
    for k in 0..4u8 {
        let e = config
            .edge_cut(k)
            .unwrap_or_else(|| corners[k as usize].midpoint(corners[(k as usize + 1) % 4]));
        nodes[EDGE_POINTS[k as usize] as usize] = e;
    }
    let e = |k: usize| nodes[EDGE_POINTS[k % 4] as usize];
    let c = |k: usize| corners[k % 4];

    let cut_edges: Vec<u8> = config.cut_edges().map(|(k, _)| k).collect();
    let zeros: Vec<u8> = config.zero_corners().collect();

    let center = match config.kind {
        CutKind::Uncut => e(3).midpoint(e(1)),
        CutKind::A | CutKind::C | CutKind::E => line_intersection(e(0), e(2), e(1), e(3))
            .ok_or_else(|| MeshError::DegenerateGeometry("parallel midlines".into()))?,
        CutKind::B => {
            let j = cut_edges[0] as usize;
            line_intersection(c(zeros[0] as usize), e(j), e(j + 3), e(j + 1))
                .ok_or_else(|| MeshError::DegenerateGeometry("B midpoint".into()))?
        }
        CutKind::D => e(cut_edges[0] as usize).midpoint(e(cut_edges[1] as usize)),
    };
    nodes[CENTER as usize] = center;

    if config.kind == CutKind::Uncut {
        let side = config
            .uncut_side()
            .ok_or_else(|| MeshError::DegenerateGeometry("all corners on the interface".into()))?;
        let origins = [(0u8, 0u8), (2, 0), (2, 2), (0, 2)];
        let elements: Vec<SubElement> = origins
            .iter()
            .map(|&(oa, ob)| {
                let mut n = [0u8; 9];
                for b in 0..3 {
                    for a in 0..3 {
                        n[(a + 3 * b) as usize] = lattice(oa + a, ob + b);
                    }
                }
                SubElement {
                    shape: ElementShape::Quad,
                    nodes: n,
                    side,
                    curvature: Curvature::Straight,
                }
            })
            .collect();
        // edge midpoints and quad centers are straight midpoints
        for (oa, ob) in origins {
            let v = |a: u8, b: u8| nodes[lattice(oa + a, ob + b) as usize];
            let (p00, p20, p22, p02) = (v(0, 0), v(2, 0), v(2, 2), v(0, 2));
            nodes[lattice(oa + 1, ob) as usize] = p00.midpoint(p20);
            nodes[lattice(oa + 2, ob + 1) as usize] = p20.midpoint(p22);
            nodes[lattice(oa + 1, ob + 2) as usize] = p02.midpoint(p22);
            nodes[lattice(oa, ob + 1) as usize] = p00.midpoint(p02);
            nodes[lattice(oa + 1, ob + 1) as usize] = p00.midpoint(p22);
        }
        return Ok(StraightLayout {
            layout: PatchNodeLayout {
                nodes,
                moved: [false; N_LOCAL],
            },
            elements,
            interface_edges: Vec::new(),
            diagonals: None,
        });
    }

    // discrete interface through the lattice vertices
    let interface_edges: Vec<(u8, u8)> = match config.kind {
        CutKind::A => vec![
            (CORNERS[zeros[0] as usize], CENTER),
            (CENTER, CORNERS[zeros[1] as usize]),
        ],
        CutKind::B => vec![
            (CORNERS[zeros[0] as usize], CENTER),
            (CENTER, EDGE_POINTS[cut_edges[0] as usize]),
        ],
        CutKind::C | CutKind::D => vec![
            (EDGE_POINTS[cut_edges[0] as usize], CENTER),
            (CENTER, EDGE_POINTS[cut_edges[1] as usize]),
        ],
        CutKind::E => vec![(
            EDGE_POINTS[cut_edges[0] as usize],
            EDGE_POINTS[cut_edges[1] as usize],
        )],
        CutKind::Uncut => unreachable!(),
    };

    let mut diagonals = [Diagonal::CornerToCenter; 4];
    for (k, diagonal) in diagonals.iter_mut().enumerate() {
        let [qc, qe, qm, qe_prev] = quadrant_vertices(k);
        let along = |a: u8, b: u8| {
            interface_edges
                .iter()
                .any(|&(p, q)| (p, q) == (a, b) || (q, p) == (a, b))
        };
        *diagonal = if along(qc, qm) {
            Diagonal::CornerToCenter
        } else if along(qe, qe_prev) {
            Diagonal::EdgeToEdge
        } else {
            let quad = [qc, qe, qm, qe_prev].map(|v| nodes[v as usize]);
            let angles = quad_angles(&quad);
            let largest = (0..4).fold(0, |best, i| if angles[i] > angles[best] { i } else { best });
            if largest % 2 == 0 {
                Diagonal::CornerToCenter
            } else {
                Diagonal::EdgeToEdge
            }
        };
    }

    let vertex_side = vertex_sides(config);
    let on_interface = |v: u8| interface_edges.iter().any(|&(p, q)| p == v || q == v);
    let mut elements = Vec::with_capacity(8);
    for (k, &diagonal) in diagonals.iter().enumerate() {
        for tri in quadrant_triangles(k, diagonal) {
            let mut side = None;
            for &v in &tri {
                if on_interface(v) {
                    continue;
                }
                let Some(s) = vertex_side(v) else { continue };
                match side {
                    None => side = Some(s),
                    Some(prev) if prev != s => {
                        return Err(MeshError::DegenerateGeometry(format!(
                            "triangle {tri:?} straddles the discrete interface"
                        )))
                    }
                    _ => {}
                }
            }
            let side = side.ok_or_else(|| {
                MeshError::DegenerateGeometry(format!("triangle {tri:?} has no vertex off the interface"))
            })?;
            let curvature = if interface_edges
                .iter()
                .any(|&(p, q)| tri.contains(&p) && tri.contains(&q))
            {
                Curvature::QuadraticEdge
            } else {
                Curvature::Straight
            };
            elements.push(SubElement {
                shape: ElementShape::Tri,
                nodes: triangle_nodes(tri),
                side,
                curvature,
            });
        }
    }

    fill_straight_midpoints(&mut nodes, &elements);

    let scale = corners[0].distance(corners[2]);
    let area_tol = 1e-16 * scale * scale;
    for el in &elements {
        let [a, b, c] = [el.nodes[0], el.nodes[1], el.nodes[2]].map(|v| nodes[v as usize]);
        let area = 0.5 * (b - a).cross(c - a);
        if area <= area_tol {
            return Err(MeshError::DegenerateGeometry(format!(
                "{:?} triangle with area {area:e}",
                config.kind
            )));
        }
    }

    Ok(StraightLayout {
        layout: PatchNodeLayout {
            nodes,
            moved: [false; N_LOCAL],
        },
        elements,
        interface_edges,
        diagonals: Some(diagonals),
    })
}

fn quad_angles(q: &[Point2; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for i in 0..4 {
        let prev = q[(i + 3) % 4] - q[i];
        let next = q[(i + 1) % 4] - q[i];
        // counter-clockwise interior angle, may exceed 180° for reflex corners
        let mut a = next.cross(prev).atan2(next.dot(prev)).to_degrees();
        if a < 0.0 {
            a += 360.0;
        }
        out[i] = a;
    }
    out
}

/// Discrete side of each lattice vertex that is not on the discrete interface.
fn vertex_sides(config: &CutConfig) -> impl Fn(u8) -> Option<Side> + '_ {
    move |v: u8| {
        if let Some(k) = CORNERS.iter().position(|&c| c == v) {
            return config.signs[k].side();
        }
        if let Some(k) = EDGE_POINTS.iter().position(|&c| c == v) {
            if config.edge_cut(k as u8).is_some() {
                return None;
            }
            return config.signs[k].side().or(config.signs[(k + 1) % 4].side());
        }
        if v == CENTER && config.kind == CutKind::E {
            // opposite the corner cut off by the interface
            let edges: Vec<u8> = config.cut_edges().map(|(e, _)| e).collect();
            let shared = if (edges[0] + 1) % 4 == edges[1] { edges[1] } else { edges[0] };
            return config.signs[shared as usize].side().map(Side::opposite);
        }
        None
    }
}

/// Maximum straight-edge interior angle over the triangles, in degrees.
pub fn max_straight_angle(layout: &PatchNodeLayout, elements: &[SubElement]) -> Result<f64, MeshError> {
    let mut max = 0.0_f64;
    for el in elements.iter().filter(|e| e.shape == ElementShape::Tri) {
        let v = [el.nodes[0], el.nodes[1], el.nodes[2]].map(|k| layout.node(k));
        for a in interior_angles_straight(v)? {
            max = max.max(a);
        }
    }
    Ok(max)
}
