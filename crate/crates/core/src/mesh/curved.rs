//! Second-order interface approximation: moving patch nodes onto the
//! interface, with a per-patch fallback to the straight layout.

use crate::basis::{map_point, ElementShape};
use crate::geometry::{orient, project_along_direction, LevelSet, Point2};
use crate::quadrature::QuadratureRule;

use super::angle::{check_max_angle, signed_vertex_angles};
use super::classify::{CutConfig, CutKind};
use super::layout::{fill_straight_midpoints, PatchNodeLayout, StraightLayout};
use super::{lattice_midpoint, Curvature, SubElement, CENTER, CORNERS, EDGE_POINTS};

/// Acceptance parameters of the rearrangement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvingParams {
    /// Largest admissible interior angle in degrees.
    pub alpha_max: f64,
    /// Relative margin `ε < d < 1 - ε` for midpoints moved along a midline.
    pub eps_d: f64,
    /// Maximum normal displacement of `x_m`, relative to the patch size.
    pub center_step: f64,
    /// Maximum displacement of an interface edge midpoint, relative to the
    /// length of that edge.
    pub midpoint_step: f64,
    /// Uniform samples per curved edge in the intersection test.
    pub edge_samples: usize,
    /// Residual tolerance for the projections.
    pub tol: f64,
}

impl Default for CurvingParams {
    fn default() -> Self {
        Self {
            alpha_max: 170.0,
            eps_d: 1e-3,
            center_step: 0.5,
            midpoint_step: 0.5,
            edge_samples: 20,
            tol: 1e-12,
        }
    }
}

/// Why a patch fell back to the straight interface.
#[derive(Clone, Debug, PartialEq)]
pub enum FallbackReason {
    /// Rearrangement switched off by the caller.
    Disabled,
    CenterNotFound,
    CenterOutOfRange(f64),
    CenterAngle(f64),
    MidpointNotFound,
    CurvedAngle(f64),
    EdgeIntersection,
    Jacobian(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rearranged {
    pub layout: PatchNodeLayout,
    pub elements: Vec<SubElement>,
    pub fallback: Option<FallbackReason>,
}

impl Rearranged {
    /// The straight layout; with a reason, every triangle touching the
    /// discrete interface is flagged as linear fallback.
    pub fn straight(straight: &StraightLayout, reason: Option<FallbackReason>) -> Self {
        let fallback = reason.is_some() && !straight.interface_edges.is_empty();
        let on_interface = |v: u8| straight.interface_edges.iter().any(|&(p, q)| p == v || q == v);
        let elements = straight
            .elements
            .iter()
            .map(|el| {
                let mut el = *el;
                if fallback && el.local_nodes()[..3].iter().any(|&v| on_interface(v)) {
                    el.curvature = Curvature::LinearFallback;
                }
                el
            })
            .collect();
        Rearranged {
            layout: straight.layout.clone(),
            elements,
            fallback: if fallback { reason } else { None },
        }
    }

    pub fn n_linear(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| e.curvature == Curvature::LinearFallback)
            .count()
    }
}

fn tri_nodes(nodes: &[Point2; 25], el: &SubElement) -> [Point2; 6] {
    std::array::from_fn(|k| nodes[el.nodes[k] as usize])
}

/// Moves `x_m` and the interface sub-edge midpoints onto the interface.
///
/// On any failed criterion the straight layout is returned unchanged and the
/// triangles touching the interface are flagged [`Curvature::LinearFallback`].
pub fn apply_quadratic_rearrangement(
    straight: &StraightLayout,
    config: &CutConfig,
    ls: &dyn LevelSet,
    params: &CurvingParams,
    rule: &QuadratureRule,
) -> Rearranged {
    if config.kind == CutKind::Uncut {
        return Rearranged::straight(straight, None);
    }
    match try_curve(straight, config, ls, params, rule) {
        Ok(layout) => Rearranged {
            layout,
            elements: straight.elements.clone(),
            fallback: None,
        },
        Err(reason) => Rearranged::straight(straight, Some(reason)),
    }
}

fn try_curve(
    straight: &StraightLayout,
    config: &CutConfig,
    ls: &dyn LevelSet,
    params: &CurvingParams,
    rule: &QuadratureRule,
) -> Result<PatchNodeLayout, FallbackReason> {
    let mut nodes = straight.layout.nodes;
    let mut moved = [false; 25];
    let patch_size = nodes[CORNERS[0] as usize].distance(nodes[CORNERS[1] as usize]);
    let xm = nodes[CENTER as usize];
    let iface = &straight.interface_edges;

    // step 1: the patch midpoint
    let new_center = match config.kind {
        CutKind::A | CutKind::D => {
            let (p, q) = (nodes[iface[0].0 as usize], nodes[iface[1].1 as usize]);
            let normal = (q - p).normalized().perp();
            Some(
                project_along_direction(ls, xm, normal, params.tol, params.center_step * patch_size)
                    .ok_or(FallbackReason::CenterNotFound)?,
            )
        }
        CutKind::B | CutKind::C => {
            let j = config.cut_edges().next().map(|(e, _)| e as usize).unwrap_or(0);
            let a = nodes[EDGE_POINTS[(j + 3) % 4] as usize];
            let b = nodes[EDGE_POINTS[(j + 1) % 4] as usize];
            let len = a.distance(b);
            let dir = (b - a).normalized();
            let q = project_along_direction(ls, xm, dir, params.tol, len)
                .ok_or(FallbackReason::CenterNotFound)?;
            let d = (q - a).dot(dir) / len;
            if !(d > params.eps_d && d < 1.0 - params.eps_d) {
                return Err(FallbackReason::CenterOutOfRange(d));
            }
            Some(q)
        }
        CutKind::E | CutKind::Uncut => None,
    };
    if let Some(q) = new_center {
        if q != xm {
            nodes[CENTER as usize] = q;
            moved[CENTER as usize] = true;
            fill_straight_midpoints(&mut nodes, &straight.elements);
        }
        for el in &straight.elements {
            let v = [el.nodes[0], el.nodes[1], el.nodes[2]].map(|k| nodes[k as usize]);
            if orient(v[0], v[1], v[2]) <= 0.0 {
                return Err(FallbackReason::CenterAngle(180.0));
            }
            let max = check_max_angle(&tri_nodes(&nodes, el)).map_err(|_| FallbackReason::CenterAngle(180.0))?;
            if max > params.alpha_max {
                return Err(FallbackReason::CenterAngle(max));
            }
        }
    }

    // step 2: midpoints of the interface sub-edges
    for &(p, q) in iface {
        let (a, b) = (nodes[p as usize], nodes[q as usize]);
        let m = lattice_midpoint(p, q) as usize;
        let normal = (b - a).normalized().perp();
        let target = project_along_direction(
            ls,
            a.midpoint(b),
            normal,
            params.tol,
            params.midpoint_step * a.distance(b),
        )
        .ok_or(FallbackReason::MidpointNotFound)?;
        nodes[m] = target;
        moved[m] = true;
    }

    for el in straight.elements.iter().filter(|e| e.curvature == Curvature::QuadraticEdge) {
        let n = tri_nodes(&nodes, el);
        for a in signed_vertex_angles(&n) {
            if !(a > 0.0 && a <= params.alpha_max) {
                return Err(FallbackReason::CurvedAngle(a));
            }
        }
        // each curved edge must stay inside the wedge of the other two edges
        for (i, j, k, m) in [(0, 1, 2, 3), (1, 2, 0, 4), (2, 0, 1, 5)] {
            let mid = el.nodes[m] as usize;
            if !moved[mid] {
                continue;
            }
            let (vi, vj, vk, vm) = (n[i], n[j], n[k], n[m]);
            let samples = params.edge_samples.max(1);
            for s in 1..samples {
                let t = s as f64 / samples as f64;
                let p = (1.0 - t) * (1.0 - 2.0 * t) * vi + (4.0 * t * (1.0 - t)) * vm + (t * (2.0 * t - 1.0)) * vj;
                if orient(vj, vk, p) <= 0.0 || orient(vk, vi, p) <= 0.0 {
                    return Err(FallbackReason::EdgeIntersection);
                }
            }
        }
        for xi in rule.points.iter().chain(ElementShape::Tri.reference_nodes()) {
            let det = map_point(ElementShape::Tri, &n, *xi).det;
            if !(det > 0.0) {
                return Err(FallbackReason::Jacobian(det));
            }
        }
    }

    Ok(PatchNodeLayout { nodes, moved })
}
