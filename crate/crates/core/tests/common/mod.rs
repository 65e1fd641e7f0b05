//! Oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};

use lmfem::basis::ElementShape;
use lmfem::geometry::{AffineLevelSet, CircleLevelSet};
use lmfem::mesh::{build_node_layout, classify_patch, CutConfig, MeshModel, Side, StraightLayout};
use lmfem::*;

pub fn p(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

/// Gauss-Legendre nodes and weights on [0, 1] from the Jacobi matrix.
pub fn gauss(n: usize) -> Vec<(f64, f64)> {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        j[(k, k - 1)] = b;
        j[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(j);
    (0..n)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            (0.5 * (eig.eigenvalues[k] + 1.0), v0 * v0)
        })
        .collect()
}

/// Two-valued coefficient across a line, zero source.
pub struct Jump<L> {
    pub level_set: L,
}

impl<L: LevelSet + Sync> ProblemSpec for Jump<L> {
    fn level_set(&self) -> &dyn LevelSet {
        &self.level_set
    }
    fn nu(&self, side: Side) -> f64 {
        match side {
            Side::One => 4.0,
            Side::Two => 1.0,
        }
    }
    fn source(&self, _: Side, _: Point2) -> f64 {
        0.0
    }
    fn exact(&self, _: Side, _: Point2) -> f64 {
        0.0
    }
    fn exact_gradient(&self, _: Side, _: Point2) -> Point2 {
        p(0.0, 0.0)
    }
}

/// Exponents of the monomial basis of P2 or Q2.
pub fn exponents(n: usize) -> Vec<(i32, i32)> {
    match n {
        6 => vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)],
        9 => (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).collect(),
        _ => unreachable!(),
    }
}

/// Element stiffness by interpolation in physical monomials and tensor
/// Gauss quadrature (Duffy-collapsed for triangles). Valid for straight
/// triangles and axis-aligned rectangles.
pub fn oracle_element(nodes: &[Point2], nu: f64) -> DMatrix<f64> {
    let n = nodes.len();
    let ex = exponents(n);
    let c = (1.0 / n as f64) * nodes.iter().fold(p(0.0, 0.0), |s, &x| s + x);
    let scale = nodes.iter().map(|x| x.distance(c)).fold(0.0, f64::max);
    let local = |x: Point2| ((x.x - c.x) / scale, (x.y - c.y) / scale);
    let v = DMatrix::from_fn(n, n, |a, m| {
        let (u, w) = local(nodes[a]);
        u.powi(ex[m].0) * w.powi(ex[m].1)
    });
    let coeffs = v.try_inverse().expect("unisolvent nodes");
    let grads = |x: Point2| -> Vec<[f64; 2]> {
        let (u, w) = local(x);
        let dm: Vec<[f64; 2]> = ex
            .iter()
            .map(|&(a, b)| {
                let du = if a > 0 { a as f64 * u.powi(a - 1) * w.powi(b) } else { 0.0 };
                let dw = if b > 0 { b as f64 * u.powi(a) * w.powi(b - 1) } else { 0.0 };
                [du / scale, dw / scale]
            })
            .collect();
        (0..n)
            .map(|i| {
                let mut g = [0.0; 2];
                for m in 0..n {
                    g[0] += coeffs[(m, i)] * dm[m][0];
                    g[1] += coeffs[(m, i)] * dm[m][1];
                }
                g
            })
            .collect()
    };
    let rule = gauss(8);
    let mut k = DMatrix::zeros(n, n);
    let mut add = |x: Point2, w: f64| {
        let g = grads(x);
        for i in 0..n {
            for j in 0..n {
                k[(i, j)] += nu * w * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
            }
        }
    };
    if n == 6 {
        let (a, b, cc) = (nodes[0], nodes[1], nodes[2]);
        let area2 = ((b - a).cross(cc - a)).abs();
        for &(s, ws) in &rule {
            for &(t, wt) in &rule {
                let (x1, x2) = (s, t * (1.0 - s));
                add(a + x1 * (b - a) + x2 * (cc - a), ws * wt * (1.0 - s) * area2);
            }
        }
    } else {
        let (lo, hi) = nodes.iter().fold((nodes[0], nodes[0]), |(lo, hi), &x| {
            (p(lo.x.min(x.x), lo.y.min(x.y)), p(hi.x.max(x.x), hi.y.max(x.y)))
        });
        for &(s, ws) in &rule {
            for &(t, wt) in &rule {
                add(p(lo.x + s * (hi.x - lo.x), lo.y + t * (hi.y - lo.y)), ws * wt * (hi.x - lo.x) * (hi.y - lo.y));
            }
        }
    }
    k
}

pub fn single_patch(ls: &dyn LevelSet) -> MeshModel {
    let g = PatchGrid::new(p(0.3, -0.2), 0.7, 1).unwrap();
    build_mesh(&g, ls, &MeshParams::for_grid(&g)).unwrap()
}

/// Largest entrywise deviation of the assembled single-patch stiffness from
/// the oracle, relative to the largest oracle entry.
pub fn oracle_deviation<L: LevelSet + Sync>(ls: L, cut: bool) -> f64 {
    let mesh = single_patch(&ls);
    let patch = &mesh.patches[0];
    assert_eq!(patch.is_cut(), cut);
    assert!(patch.fallback.is_none());
    let space = FiniteElementSpace::new(&mesh, BasisKind::Lagrange);
    let problem = Jump { level_set: ls };
    let k = assemble_stiffness(&space, &problem).unwrap();
    let mut oracle = DMatrix::<f64>::zeros(25, 25);
    for el in &patch.elements {
        let nodes: Vec<Point2> = el.local_nodes().iter().map(|&i| patch.layout.nodes[i as usize]).collect();
        if el.shape == ElementShape::Quad {
            // the oracle's monomials assume axis-aligned rectangles
            assert!((nodes[0].y - nodes[2].y).abs() < 1e-15 && (nodes[0].x - nodes[6].x).abs() < 1e-15);
        }
        let ke = oracle_element(&nodes, problem.nu(el.side));
        for (a, &i) in el.local_nodes().iter().enumerate() {
            for (b, &j) in el.local_nodes().iter().enumerate() {
                oracle[(space.dofs.dof(0, 0, i), space.dofs.dof(0, 0, j))] += ke[(a, b)];
            }
        }
    }
    let max = oracle.amax();
    let mut worst: f64 = 0.0;
    for r in 0..25 {
        for c in 0..25 {
            worst = worst.max((k.get(r, c) - oracle[(r, c)]).abs() / max);
        }
    }
    worst
}

/// Straight cut through `(r, 0)` and either `(s, 1)` or `(1, s)` of the
/// oracle patch, in patch coordinates.
pub fn oracle_patch_cut(r: f64, s: f64, opposite: bool) -> AffineLevelSet {
    let at = |x: f64, y: f64| p(0.3 + 0.7 * x, -0.2 + 0.7 * y);
    if opposite {
        line(at(r, 0.0), at(s, 1.0))
    } else {
        line(at(r, 0.0), at(1.0, s))
    }
}

/// Two disjoint circles: one through grid nodes (kinds A and B), one generic.
pub fn five_kind_mesh() -> (impl LevelSet + Sync, MeshModel) {
    let n = 16;
    let g = PatchGrid::new(p(0.0, 0.0), 1.0, n).unwrap();
    let s = 1.0 / n as f64;
    let c1 = CircleLevelSet {
        center: p(4.0 * s, 4.0 * s),
        radius: 5f64.sqrt() * s,
    };
    let c2 = CircleLevelSet {
        center: p(0.7, 0.68),
        radius: 0.2,
    };
    let ls = LevelSetField::new(
        move |x: Point2| c1.value(x).min(c2.value(x)),
        move |x: Point2| if c1.value(x) < c2.value(x) { c1.gradient(x) } else { c2.gradient(x) },
    );
    let m = build_mesh(&g, &ls, &MeshParams::for_grid(&g)).unwrap();
    (ls, m)
}

pub const SWEEP: [f64; 10] = [1e-6, 1e-3, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0 - 1e-6];

pub fn unit_corners() -> [Point2; 4] {
    [p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)]
}

/// Line through `a` and `b`.
pub fn line(a: Point2, b: Point2) -> AffineLevelSet {
    let d = b - a;
    AffineLevelSet {
        a: -d.y,
        b: d.x,
        c: d.y * a.x - d.x * a.y,
    }
}

pub fn classify(ls: &dyn LevelSet) -> CutConfig {
    classify_patch(ls, unit_corners(), &RootOptions::default()).unwrap()
}

pub fn straight(ls: &dyn LevelSet) -> (CutConfig, StraightLayout) {
    let config = classify(ls);
    let layout = build_node_layout(&config, unit_corners()).unwrap();
    (config, layout)
}

/// Interior angles by the law of cosines.
pub fn angles(a: Point2, b: Point2, c: Point2) -> [f64; 3] {
    let (la, lb, lc) = (b.distance(c), a.distance(c), a.distance(b));
    let at = |opp: f64, s1: f64, s2: f64| ((s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2)).clamp(-1.0, 1.0).acos().to_degrees();
    [at(la, lb, lc), at(lb, la, lc), at(lc, la, lb)]
}

pub fn max_angle(layout: &StraightLayout) -> f64 {
    layout
        .elements
        .iter()
        .filter(|e| e.shape == ElementShape::Tri)
        .flat_map(|e| {
            let v = |k: usize| layout.layout.nodes[e.nodes[k] as usize];
            angles(v(0), v(1), v(2))
        })
        .fold(0.0, f64::max)
}

/// Level sets realizing kinds B–E on the unit patch with parameters `(r, s)`.
pub fn sweep_cases() -> Vec<(&'static str, AffineLevelSet)> {
    let mut out = Vec::new();
    for &r in &SWEEP {
        for &s in &SWEEP {
            out.push(("B", line(p(0.0, 0.0), p(1.0, s))));
            out.push(("C", line(p(r, 0.0), p(s, 1.0))));
            out.push(("DE", line(p(r, 0.0), p(1.0, s))));
        }
    }
    out
}

/// Fourth-order five-point second difference along each axis.
pub fn laplacian(f: impl Fn(Point2) -> f64, x: Point2) -> f64 {
    let h = 1e-3;
    let d2 = |e: Point2| {
        (-f(x + 2.0 * h * e) + 16.0 * f(x + h * e) - 30.0 * f(x) + 16.0 * f(x - h * e) - f(x - 2.0 * h * e)) / (12.0 * h * h)
    };
    d2(p(1.0, 0.0)) + d2(p(0.0, 1.0))
}
