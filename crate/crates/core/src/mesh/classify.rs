//! Classification of a patch against the interface.
//!
//! Corners are numbered counter-clockwise from the lower left, `c0..c3`, and
//! edge `k` runs from `c_k` to `c_{k+1}`. Cut positions on an edge are stored
//! as the relative parameter `t` along that counter-clockwise direction.
//!
//! Canonical orientations:
//!
//! * `A`: zeros at `c0` and `c2`.
//! * `B`: zero at `c0`, interior cut on edge 1 at `(1, s)`.
//! * `C`: cuts on edge 0 at `(r, 0)` and on edge 2 at `(s, 1)`.
//! * `D`/`E`: cuts on edge 0 at `(r, 0)` and on edge 1 at `(1, s)`; `D` when
//!   `r ≤ 1/2` and `s ≥ 1/2`.

use crate::error::MeshError;
use crate::geometry::{find_edge_cut, LevelSet, Point2, RootOptions};

use super::Side;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CutKind {
    Uncut,
    A,
    B,
    C,
    D,
    E,
}

impl CutKind {
    pub fn is_cut(self) -> bool {
        self != CutKind::Uncut
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(value: f64, zero_tol: f64) -> Sign {
        if value.abs() <= zero_tol {
            Sign::Zero
        } else if value < 0.0 {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }

    pub fn side(self) -> Option<Side> {
        match self {
            Sign::Negative => Some(Side::One),
            Sign::Positive => Some(Side::Two),
            Sign::Zero => None,
        }
    }
}

/// Interior crossing of a patch edge, parametrized counter-clockwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeCut {
    pub t: f64,
    pub point: Point2,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CutLocation {
    Corner(u8),
    Edge { edge: u8, t: f64, point: Point2 },
}

/// Element of the symmetry group of the square, mapping the canonical
/// orientation onto the actual one: reflect `x ↦ 1 - x` first, then rotate
/// counter-clockwise by `rotation` quarter turns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Symmetry {
    pub rotation: u8,
    pub reflect: bool,
}

impl Symmetry {
    pub fn all() -> impl Iterator<Item = Symmetry> {
        [false, true]
            .into_iter()
            .flat_map(|reflect| (0..4).map(move |rotation| Symmetry { rotation, reflect }))
    }

    pub fn corner(self, c: u8) -> u8 {
        let base = if self.reflect { 1 - c as i32 } else { c as i32 };
        (base + self.rotation as i32).rem_euclid(4) as u8
    }

    /// Image of edge `e` and whether its orientation is reversed.
    pub fn edge(self, e: u8) -> (u8, bool) {
        if self.reflect {
            ((self.rotation as i32 - e as i32).rem_euclid(4) as u8, true)
        } else {
            ((e + self.rotation) % 4, false)
        }
    }

    /// Acts on a point of the unit square.
    pub fn apply(self, p: [f64; 2]) -> [f64; 2] {
        let [mut x, mut y] = p;
        if self.reflect {
            x = 1.0 - x;
        }
        for _ in 0..self.rotation {
            let nx = 1.0 - y;
            y = x;
            x = nx;
        }
        [x, y]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CutConfig {
    pub kind: CutKind,
    /// The two interface locations on the patch boundary (empty when uncut).
    pub cuts: Vec<CutLocation>,
    /// Relative cut positions in the canonical orientation.
    pub r: Option<f64>,
    pub s: Option<f64>,
    pub symmetry: Symmetry,
    pub signs: [Sign; 4],
}

impl CutConfig {
    pub fn cut_edges(&self) -> impl Iterator<Item = (u8, Point2)> + '_ {
        self.cuts.iter().filter_map(|c| match *c {
            CutLocation::Edge { edge, point, .. } => Some((edge, point)),
            CutLocation::Corner(_) => None,
        })
    }

    pub fn zero_corners(&self) -> impl Iterator<Item = u8> + '_ {
        self.cuts.iter().filter_map(|c| match *c {
            CutLocation::Corner(k) => Some(k),
            CutLocation::Edge { .. } => None,
        })
    }

    pub fn edge_cut(&self, edge: u8) -> Option<Point2> {
        self.cut_edges().find(|&(e, _)| e == edge).map(|(_, p)| p)
    }

    /// Side of an uncut patch.
    pub fn uncut_side(&self) -> Option<Side> {
        self.signs.iter().find_map(|s| s.side())
    }
}

fn opposite(a: Sign, b: Sign) -> bool {
    matches!(
        (a, b),
        (Sign::Negative, Sign::Positive) | (Sign::Positive, Sign::Negative)
    )
}

/// Classifies a patch from its corner signs and edge crossings.
///
/// `edge_cuts[k]` must be present exactly for edges whose endpoint signs are
/// strictly opposite. Returns a description of the violation on failure.
pub fn classify_cuts(signs: [Sign; 4], edge_cuts: [Option<EdgeCut>; 4]) -> Result<CutConfig, String> {
    let zeros: Vec<u8> = (0..4).filter(|&k| signs[k as usize] == Sign::Zero).collect();
    let cut_edges: Vec<u8> = (0..4)
        .filter(|&k| opposite(signs[k as usize], signs[(k as usize + 1) % 4]))
        .collect();
    for &k in &cut_edges {
        if edge_cuts[k as usize].is_none() {
            return Err(format!("missing crossing on edge {k}"));
        }
    }

    let uncut = CutConfig {
        kind: CutKind::Uncut,
        cuts: Vec::new(),
        r: None,
        s: None,
        symmetry: Symmetry::default(),
        signs,
    };

    match (zeros.len(), cut_edges.len()) {
        (0, 0) | (1, 0) => Ok(uncut),
        (2, 0) => {
            let (a, b) = (zeros[0], zeros[1]);
            let others: Vec<Sign> = (0..4u8)
                .filter(|k| *k != a && *k != b)
                .map(|k| signs[k as usize])
                .collect();
            if b - a == 2 && opposite(others[0], others[1]) {
                canonical(CutKind::A, &zeros, &[], signs, &edge_cuts)
            } else if others[0] == others[1] {
                // interface matches a patch edge or touches two corners
                Ok(uncut)
            } else {
                Err("interface runs along an edge and leaves through a corner".into())
            }
        }
        (1, 1) => canonical(CutKind::B, &zeros, &cut_edges, signs, &edge_cuts),
        (0, 2) => {
            let (a, b) = (cut_edges[0], cut_edges[1]);
            if b - a == 2 {
                canonical(CutKind::C, &[], &cut_edges, signs, &edge_cuts)
            } else {
                canonical(CutKind::D, &[], &cut_edges, signs, &edge_cuts)
            }
        }
        (z, e) => Err(format!(
            "interface meets the patch boundary in {} points",
            z + e
        )),
    }
}

fn canonical(
    kind: CutKind,
    zeros: &[u8],
    edges: &[u8],
    signs: [Sign; 4],
    edge_cuts: &[Option<EdgeCut>; 4],
) -> Result<CutConfig, String> {
    let t_of = |g: Symmetry, canonical_edge: u8| {
        let (e, reversed) = g.edge(canonical_edge);
        let t = edge_cuts[e as usize].map(|c| c.t).unwrap_or(f64::NAN);
        if reversed {
            1.0 - t
        } else {
            t
        }
    };
    let same = |a: &[u8], b: &mut Vec<u8>| {
        b.sort_unstable();
        a == b.as_slice()
    };

    for g in Symmetry::all() {
        let matched = match kind {
            CutKind::A => same(zeros, &mut vec![g.corner(0), g.corner(2)]),
            CutKind::B => zeros == [g.corner(0)] && edges == [g.edge(1).0],
            CutKind::C => same(edges, &mut vec![g.edge(0).0, g.edge(2).0]),
            CutKind::D | CutKind::E => same(edges, &mut vec![g.edge(0).0, g.edge(1).0]),
            CutKind::Uncut => unreachable!(),
        };
        if !matched {
            continue;
        }
        let (kind, r, s) = match kind {
            CutKind::A => (CutKind::A, None, None),
            CutKind::B => (CutKind::B, None, Some(t_of(g, 1))),
            CutKind::C => (CutKind::C, Some(t_of(g, 0)), Some(1.0 - t_of(g, 2))),
            _ => {
                let r = t_of(g, 0);
                let s = t_of(g, 1);
                let kind = if r <= 0.5 && s >= 0.5 { CutKind::D } else { CutKind::E };
                (kind, Some(r), Some(s))
            }
        };
        let mut cuts: Vec<CutLocation> = zeros.iter().map(|&k| CutLocation::Corner(k)).collect();
        cuts.extend(edges.iter().map(|&e| {
            let c = edge_cuts[e as usize].expect("checked above");
            CutLocation::Edge {
                edge: e,
                t: c.t,
                point: c.point,
            }
        }));
        return Ok(CutConfig {
            kind,
            cuts,
            r,
            s,
            symmetry: g,
            signs,
        });
    }
    Err(format!("no canonical orientation for {kind:?}"))
}

/// Classifies the axis-aligned patch with counter-clockwise `corners`.
pub fn classify_patch(
    ls: &dyn LevelSet,
    corners: [Point2; 4],
    opts: &RootOptions,
) -> Result<CutConfig, MeshError> {
    let violation = |reason: String| MeshError::AssumptionViolation {
        patch: (0, 0),
        reason,
    };
    let signs = corners.map(|c| Sign::of(ls.value(c), opts.vertex_tol));
    let mut edge_cuts = [None; 4];
    for k in 0..4 {
        let a = corners[k];
        let b = corners[(k + 1) % 4];
        let cut = find_edge_cut(ls, a, b, opts).map_err(|e| violation(e.to_string()))?;
        if let Some(cut) = cut {
            if opposite(signs[k], signs[(k + 1) % 4]) {
                edge_cuts[k] = Some(EdgeCut {
                    t: cut.r,
                    point: cut.point,
                });
            }
        }
    }
    classify_cuts(signs, edge_cuts).map_err(violation)
}
