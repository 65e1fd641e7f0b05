//! Cartesian patch meshes locally fitted to the interface.
//!
//! Every patch carries 25 nodes on a 5×5 reference lattice; local node
//! `b * 5 + a` sits at reference coordinates `(a/4, b/4)`. Corners, edge
//! points and the patch midpoint are the lattice vertices of the sub-element
//! splitting; the remaining 16 nodes are midpoints of sub-element edges.

pub mod angle;
pub mod classify;
pub mod curved;
pub mod layout;

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::basis::ElementShape;
use crate::error::{MeshError, Result};
use crate::geometry::{find_edge_cut, LevelSet, LineCut, Point2, RootOptions};
use crate::quadrature::triangle_degree5;

pub use angle::check_max_angle;
pub use classify::{classify_cuts, classify_patch, CutConfig, CutKind, EdgeCut, Sign};
pub use curved::{apply_quadratic_rearrangement, CurvingParams, FallbackReason, Rearranged};
pub use layout::{build_node_layout, PatchNodeLayout, StraightLayout};

/// Number of nodes per patch.
pub const N_LOCAL: usize = 25;
/// Local indices of the corners `c0..c3`, counter-clockwise from lower left.
pub const CORNERS: [u8; 4] = [0, 4, 24, 20];
/// Local indices of the edge points `e0..e3`; `e_k` lies on edge `c_k c_{k+1}`.
pub const EDGE_POINTS: [u8; 4] = [2, 14, 22, 10];
/// Local index of the patch midpoint `x_m`.
pub const CENTER: u8 = 12;

/// Local index of lattice position `(a, b)`, `0 ≤ a, b ≤ 4`.
pub const fn lattice(a: u8, b: u8) -> u8 {
    b * 5 + a
}

pub const fn lattice_coords(k: u8) -> (u8, u8) {
    (k % 5, k / 5)
}

/// Node halfway between two lattice vertices (both with even coordinates).
pub const fn lattice_midpoint(p: u8, q: u8) -> u8 {
    let (pa, pb) = lattice_coords(p);
    let (qa, qb) = lattice_coords(q);
    lattice((pa + qa) / 2, (pb + qb) / 2)
}

/// Discrete subdomain of a sub-element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    One,
    Two,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::One => Side::Two,
            Side::Two => Side::One,
        }
    }

    /// 1 or 2.
    pub fn number(self) -> u8 {
        match self {
            Side::One => 1,
            Side::Two => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Curvature {
    Straight,
    /// Has an interface edge approximated by a quadratic.
    QuadraticEdge,
    /// Has an interface edge left straight after a rejected rearrangement.
    LinearFallback,
}

impl Curvature {
    /// 0 straight, 1 quadratic, 2 fallback.
    pub fn code(self) -> u8 {
        match self {
            Curvature::Straight => 0,
            Curvature::QuadraticEdge => 1,
            Curvature::LinearFallback => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubElement {
    pub shape: ElementShape,
    /// Patch-local node indices; only the first `shape.n_nodes()` are used.
    pub nodes: [u8; 9],
    pub side: Side,
    pub curvature: Curvature,
}

impl SubElement {
    pub fn local_nodes(&self) -> &[u8] {
        &self.nodes[..self.shape.n_nodes()]
    }
}

/// Square patches of size `h_p` covering `[origin, origin + n·h_p]²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PatchGrid {
    pub origin: Point2,
    pub patch_size: f64,
    pub n: usize,
}

impl PatchGrid {
    pub fn new(origin: Point2, width: f64, n: usize) -> Result<Self, MeshError> {
        if n == 0 || !(width > 0.0) || !origin.is_finite() {
            return Err(MeshError::InvalidGrid(format!("{n} patches over width {width}")));
        }
        Ok(Self {
            origin,
            patch_size: width / n as f64,
            n,
        })
    }

    pub fn width(&self) -> f64 {
        self.patch_size * self.n as f64
    }

    /// Grid vertex `(i, j)`, `0 ≤ i, j ≤ n`. The far corner is exact.
    pub fn vertex(&self, i: usize, j: usize) -> Point2 {
        let w = self.width();
        let n = self.n as f64;
        Point2::new(
            self.origin.x + w * i as f64 / n,
            self.origin.y + w * j as f64 / n,
        )
    }

    pub fn patch_corners(&self, i: usize, j: usize) -> [Point2; 4] {
        [
            self.vertex(i, j),
            self.vertex(i + 1, j),
            self.vertex(i + 1, j + 1),
            self.vertex(i, j + 1),
        ]
    }

    pub fn n_patches(&self) -> usize {
        self.n * self.n
    }

    /// Nodes per side of the global node lattice.
    pub fn nodes_per_side(&self) -> usize {
        4 * self.n + 1
    }

    /// Global index of local node `local` of patch `(i, j)`.
    pub fn global_node(&self, i: usize, j: usize, local: u8) -> usize {
        let (a, b) = lattice_coords(local);
        (4 * j + b as usize) * self.nodes_per_side() + 4 * i + a as usize
    }
}

/// A grid edge: `Horizontal { i, j }` joins vertices `(i, j)` and `(i+1, j)`,
/// `Vertical { i, j }` joins `(i, j)` and `(i, j+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GridEdge {
    Horizontal { i: usize, j: usize },
    Vertical { i: usize, j: usize },
}

impl GridEdge {
    /// Global edge under local edge `k` of patch `(i, j)` and whether the
    /// local counter-clockwise direction is reversed.
    pub fn of_patch(i: usize, j: usize, k: u8) -> (GridEdge, bool) {
        match k {
            0 => (GridEdge::Horizontal { i, j }, false),
            1 => (GridEdge::Vertical { i: i + 1, j }, false),
            2 => (GridEdge::Horizontal { i, j: j + 1 }, true),
            _ => (GridEdge::Vertical { i, j }, true),
        }
    }

    fn endpoints(self, grid: &PatchGrid) -> (Point2, Point2) {
        match self {
            GridEdge::Horizontal { i, j } => (grid.vertex(i, j), grid.vertex(i + 1, j)),
            GridEdge::Vertical { i, j } => (grid.vertex(i, j), grid.vertex(i, j + 1)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Patch {
    pub index: (usize, usize),
    pub config: CutConfig,
    pub layout: PatchNodeLayout,
    pub elements: Vec<SubElement>,
    /// Vertex pairs of the discrete interface inside the patch.
    pub interface_edges: Vec<(u8, u8)>,
    pub fallback: Option<FallbackReason>,
}

impl Patch {
    pub fn is_cut(&self) -> bool {
        self.config.kind.is_cut()
    }
}

#[derive(Clone, Debug)]
pub struct MeshParams {
    pub roots: RootOptions,
    pub curving: CurvingParams,
    /// Skip the rearrangement and keep every interface straight.
    pub linear_only: bool,
}

impl MeshParams {
    /// Tolerances scaled to `grid`.
    pub fn for_grid(grid: &PatchGrid) -> Self {
        let roots = RootOptions::scaled(grid.width() * std::f64::consts::SQRT_2, grid.patch_size * std::f64::consts::SQRT_2);
        Self {
            roots,
            curving: CurvingParams {
                tol: roots.tol,
                ..CurvingParams::default()
            },
            linear_only: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MeshModel {
    pub grid: PatchGrid,
    /// Row-major, patch `(i, j)` at `j * n + i`.
    pub patches: Vec<Patch>,
    pub edge_cuts: BTreeMap<GridEdge, LineCut>,
    /// Number of cut patches.
    pub pn: usize,
    /// Number of interface triangles with a linear interface approximation.
    pub n_l: usize,
    pub fallback_patches: usize,
}

impl MeshModel {
    pub fn patch(&self, i: usize, j: usize) -> &Patch {
        &self.patches[j * self.grid.n + i]
    }

    pub fn n_elements(&self) -> usize {
        self.patches.iter().map(|p| p.elements.len()).sum()
    }

    pub fn count(&self, kind: CutKind) -> usize {
        self.patches.iter().filter(|p| p.config.kind == kind).count()
    }
}

/// Classifies and meshes every patch of `grid` against `ls`.
pub fn build_mesh(grid: &PatchGrid, ls: &dyn LevelSet, params: &MeshParams) -> Result<MeshModel> {
    let n = grid.n;
    let opts = &params.roots;
    let signs: Vec<Sign> = (0..=n)
        .flat_map(|j| (0..=n).map(move |i| (i, j)))
        .map(|(i, j)| Sign::of(ls.value(grid.vertex(i, j)), opts.vertex_tol))
        .collect();
    let sign = |i: usize, j: usize| signs[j * (n + 1) + i];

    // one root search per grid edge with a strict sign change
    let mut edges = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            if i < n {
                edges.push(GridEdge::Horizontal { i, j });
            }
            if j < n {
                edges.push(GridEdge::Vertical { i, j });
            }
        }
    }
    let cuts: Vec<(GridEdge, Option<LineCut>)> = edges
        .par_iter()
        .map(|&e| -> Result<_> {
            let (s0, s1) = match e {
                GridEdge::Horizontal { i, j } => (sign(i, j), sign(i + 1, j)),
                GridEdge::Vertical { i, j } => (sign(i, j), sign(i, j + 1)),
            };
            let (a, b) = e.endpoints(grid);
            let strict = matches!(
                (s0, s1),
                (Sign::Negative, Sign::Positive) | (Sign::Positive, Sign::Negative)
            );
            let cut = find_edge_cut(ls, a, b, opts).map_err(|err| {
                let (i, j) = match e {
                    GridEdge::Horizontal { i, j } | GridEdge::Vertical { i, j } => (i.min(n - 1), j.min(n - 1)),
                };
                MeshError::AssumptionViolation {
                    patch: (i, j),
                    reason: err.to_string(),
                }
            })?;
            Ok((e, if strict { cut } else { None }))
        })
        .collect::<Result<_>>()?;
    let edge_cuts: BTreeMap<GridEdge, LineCut> = cuts
        .into_iter()
        .filter_map(|(e, c)| c.map(|c| (e, c)))
        .collect();

    let rule = triangle_degree5();
    let patches: Vec<Patch> = (0..n * n)
        .into_par_iter()
        .map(|idx| -> Result<Patch> {
            let (i, j) = (idx % n, idx / n);
            let corners = grid.patch_corners(i, j);
            let patch_signs = [sign(i, j), sign(i + 1, j), sign(i + 1, j + 1), sign(i, j + 1)];
            let mut local_cuts = [None; 4];
            for k in 0..4u8 {
                let (e, reversed) = GridEdge::of_patch(i, j, k);
                if let Some(c) = edge_cuts.get(&e) {
                    local_cuts[k as usize] = Some(EdgeCut {
                        t: if reversed { 1.0 - c.r } else { c.r },
                        point: c.point,
                    });
                }
            }
            let violation = |reason: String| MeshError::AssumptionViolation { patch: (i, j), reason };
            let config = classify_cuts(patch_signs, local_cuts).map_err(violation)?;
            let straight = build_node_layout(&config, corners).map_err(|e| match e {
                MeshError::DegenerateGeometry(r) => violation(r),
                other => other,
            })?;
            let curved = if params.linear_only {
                Rearranged::straight(&straight, Some(FallbackReason::Disabled))
            } else {
                apply_quadratic_rearrangement(&straight, &config, ls, &params.curving, &rule)
            };
            Ok(Patch {
                index: (i, j),
                config,
                layout: curved.layout,
                elements: curved.elements,
                interface_edges: straight.interface_edges,
                fallback: curved.fallback,
            })
        })
        .collect::<Result<_>>()?;

    let pn = patches.iter().filter(|p| p.is_cut()).count();
    let n_l = patches
        .iter()
        .flat_map(|p| &p.elements)
        .filter(|e| e.curvature == Curvature::LinearFallback)
        .count();
    let fallback_patches = patches.iter().filter(|p| p.fallback.is_some()).count();
    Ok(MeshModel {
        grid: *grid,
        patches,
        edge_cuts,
        pn,
        n_l,
        fallback_patches,
    })
}
