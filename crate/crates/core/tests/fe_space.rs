use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lmfem::assembly::transform_system;
use lmfem::geometry::{AffineLevelSet, CircleLevelSet, ConstantLevelSet};
use lmfem::mesh::{MeshModel, Patch, EDGE_POINTS, N_LOCAL};
use lmfem::problem::{ExampleKind, ExampleProblem, DOMAIN_ORIGIN, DOMAIN_WIDTH};
use lmfem::quadrature::{triangle_degree5, square_gauss};
use lmfem::solver::cg;
use lmfem::space::{reference_node, PatchMap, ReferenceBasis, ReferenceKind};
use lmfem::*;

fn p(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

fn single_patch(ls: &dyn LevelSet) -> MeshModel {
    let g = PatchGrid::new(p(0.0, 0.0), 1.0, 1).unwrap();
    build_mesh(&g, ls, &MeshParams::for_grid(&g)).unwrap()
}

fn cut_patch() -> Patch {
    let m = single_patch(&CircleLevelSet {
        center: p(0.0, 0.0),
        radius: 0.63,
    });
    assert!(m.patches[0].is_cut());
    m.patches[0].clone()
}

fn uncut_patch() -> Patch {
    single_patch(&ConstantLevelSet(1.0)).patches[0].clone()
}

fn eval_at(basis: &ReferenceBasis, xhat: [f64; 2]) -> lmfem::space::BasisEval {
    basis.eval(basis.locate(xhat).expect("point in patch"), xhat)
}

#[test]
fn partition_of_unity() {
    for patch in [uncut_patch(), cut_patch()] {
        let b = ReferenceBasis::of_patch(&patch);
        let e = eval_at(&b, [0.37, 0.81]);
        assert!((e.values.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let gx: f64 = e.gradients.iter().map(|g| g[0]).sum();
        let gy: f64 = e.gradients.iter().map(|g| g[1]).sum();
        assert!(gx.abs() < 1e-12 && gy.abs() < 1e-12);
    }
}

#[test]
fn nodal_property() {
    for patch in [uncut_patch(), cut_patch()] {
        let b = ReferenceBasis::of_patch(&patch);
        for j in 0..N_LOCAL as u8 {
            let e = eval_at(&b, reference_node(j));
            for i in 0..N_LOCAL {
                let expected = if i == j as usize { 1.0 } else { 0.0 };
                assert!((e.values[i] - expected).abs() < 1e-13, "φ{i}(x̂{j}) = {}", e.values[i]);
            }
        }
    }
}

#[test]
fn uncut_center_function() {
    let b = ReferenceBasis::of_patch(&uncut_patch());
    assert_eq!(b.kind, ReferenceKind::UncutQ2);
    let e = eval_at(&b, [0.125, 0.125]);
    assert!((e.values[12] - 0.015625).abs() < 1e-15);
}

#[test]
fn gradients_match_differences() {
    let step = 1e-6;
    for patch in [uncut_patch(), cut_patch()] {
        let b = ReferenceBasis::of_patch(&patch);
        for xhat in [[0.37, 0.81], [0.6, 0.2], [0.11, 0.43]] {
            let id = b.locate(xhat).unwrap();
            let g = b.eval(id, xhat).gradients;
            for d in 0..2 {
                let mut plus = xhat;
                let mut minus = xhat;
                plus[d] += step;
                minus[d] -= step;
                let (vp, vm) = (b.eval(id, plus).values, b.eval(id, minus).values);
                for k in 0..N_LOCAL {
                    let fd = (vp[k] - vm[k]) / (2.0 * step);
                    assert!((fd - g[k][d]).abs() < 1e-6, "node {k} dir {d}");
                }
            }
        }
    }
}

#[test]
fn unmoved_map_is_affine() {
    let g = PatchGrid::new(p(-1.0, 2.0), 0.5, 2).unwrap();
    let m = build_mesh(&g, &ConstantLevelSet(-1.0), &MeshParams::for_grid(&g)).unwrap();
    let map = PatchMap::of_patch(m.patch(1, 0));
    for xhat in [[0.1, 0.2], [0.5, 0.5], [0.9, 0.7]] {
        let e = map.eval(xhat).unwrap();
        assert!((e.jac[0][0] - 0.25).abs() < 1e-14 && (e.jac[1][1] - 0.25).abs() < 1e-14);
        assert!(e.jac[0][1].abs() < 1e-14 && e.jac[1][0].abs() < 1e-14);
        assert!(e.x.distance(p(-0.75 + 0.25 * xhat[0], 2.0 + 0.25 * xhat[1])) < 1e-14);
    }
}

#[test]
fn moved_edge_point_is_interpolated() {
    let patch = single_patch(&AffineLevelSet { a: 1.0, b: 0.0, c: -0.3 }).patches[0].clone();
    let e1 = EDGE_POINTS[0];
    assert!((patch.layout.nodes[e1 as usize].x - 0.3).abs() < 1e-14);
    let image = PatchMap::of_patch(&patch).eval(reference_node(e1)).unwrap().x;
    assert!(image.distance(patch.layout.nodes[e1 as usize]) < 1e-15);
}

#[test]
fn jacobian_positive_over_sweep() {
    let tri: Vec<[f64; 2]> = triangle_degree5().iter().map(|(x, _)| x).collect();
    let quad: Vec<[f64; 2]> = square_gauss(3).iter().map(|(x, _)| x).collect();
    let values = [1e-3, 0.05, 0.2, 0.4, 0.5, 0.6, 0.8, 0.95, 1.0 - 1e-3];
    let mut checked = 0;
    for &r in &values {
        for &s in &values {
            // straight cuts of kinds C and D/E, and curved circular arcs through the same points
            for (a, b) in [(p(r, 0.0), p(s, 1.0)), (p(r, 0.0), p(1.0, s))] {
                let d = b - a;
                let line = AffineLevelSet {
                    a: -d.y,
                    b: d.x,
                    c: d.y * a.x - d.x * a.y,
                };
                let normal = p(-d.y, d.x).normalized();
                let mid = a.midpoint(b);
                let bulge = 0.3 * d.norm();
                let center = mid + 2.0 * bulge * normal;
                let arc = CircleLevelSet {
                    center,
                    radius: center.distance(a),
                };
                for ls in [&line as &dyn LevelSet, &arc] {
                    let g = PatchGrid::new(p(0.0, 0.0), 1.0, 1).unwrap();
                    let Ok(m) = build_mesh(&g, ls, &MeshParams::for_grid(&g)) else {
                        continue;
                    };
                    PatchMap::of_patch(&m.patches[0]).check_jacobian((0, 0), &tri, &quad).unwrap();
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 200);
}

#[test]
fn dof_counts() {
    let g = PatchGrid::new(p(0.0, 0.0), 2.0, 2).unwrap();
    assert_eq!(DofMap::new(&g, |i, j| i == 0 && j == 0).total_dofs, 25);
    assert_eq!(DofMap::new(&g, |_, j| j == 0).total_dofs, 45);
    for n in [1, 3, 8] {
        let g = PatchGrid::new(p(0.0, 0.0), 1.0, n).unwrap();
        let m = build_mesh(&g, &ConstantLevelSet(1.0), &MeshParams::for_grid(&g)).unwrap();
        let d = build_dof_map(&m);
        assert_eq!(d.total_dofs, (4 * n + 1) * (4 * n + 1));
        assert_eq!(d.boundary_dofs.len(), 16 * n);
    }
}

fn circle_mesh(n: usize) -> MeshModel {
    let g = PatchGrid::new(p(0.0, 0.0), 1.0, n).unwrap();
    let ls = CircleLevelSet {
        center: p(0.52, 0.47),
        radius: 0.31,
    };
    build_mesh(&g, &ls, &MeshParams::for_grid(&g)).unwrap()
}

/// Value of the finite element function `c` at reference point `xhat` of
/// patch `(i, j)`, with the physical point.
fn value(m: &MeshModel, dofs: &DofMap, c: &[f64], (i, j): (usize, usize), xhat: [f64; 2]) -> (Point2, f64) {
    let patch = m.patch(i, j);
    let map = PatchMap::of_patch(patch);
    let x = map.eval(xhat).unwrap().x;
    let e = eval_at(&map.basis, xhat);
    let u = (0..N_LOCAL).map(|k| c[dofs.dof(i, j, k as u8)] * e.values[k]).sum();
    (x, u)
}

#[test]
fn global_continuity() {
    let m = circle_mesh(6);
    let dofs = build_dof_map(&m);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let c: Vec<f64> = (0..dofs.total_dofs).map(|_| rng.random_range(-1.0..1.0)).collect();
    let n = m.grid.n;
    for j in 0..n {
        for i in 0..n {
            for k in 1..=7 {
                let t = k as f64 / 8.0;
                if i + 1 < n {
                    let (xa, ua) = value(&m, &dofs, &c, (i, j), [1.0, t]);
                    let (xb, ub) = value(&m, &dofs, &c, (i + 1, j), [0.0, t]);
                    assert!(xa.distance(xb) < 1e-14 && (ua - ub).abs() < 1e-12);
                }
                if j + 1 < n {
                    let (xa, ua) = value(&m, &dofs, &c, (i, j), [t, 1.0]);
                    let (xb, ub) = value(&m, &dofs, &c, (i, j + 1), [t, 0.0]);
                    assert!(xa.distance(xb) < 1e-14 && (ua - ub).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn linear_functions_are_reproduced() {
    let m = circle_mesh(6);
    let dofs = build_dof_map(&m);
    let f = |x: Point2| 0.3 - 1.7 * x.x + 2.2 * x.y;
    let c: Vec<f64> = dofs.positions(&m).into_iter().map(f).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for patch in &m.patches {
        let basis = ReferenceBasis::of_patch(patch);
        for id in 0..basis.elements.len() {
            for _ in 0..5 {
                let (u, v): (f64, f64) = (rng.random(), rng.random());
                let xi = if basis.elements[id].shape == lmfem::basis::ElementShape::Tri && u + v > 1.0 {
                    [1.0 - u, 1.0 - v]
                } else {
                    [u, v]
                };
                // reference patch point of the sub-element's local coordinate xi
                let nodes: Vec<Point2> = basis.elements[id]
                    .local_nodes()
                    .iter()
                    .map(|&k| {
                        let [a, b] = reference_node(k);
                        p(a, b)
                    })
                    .collect();
                let xhat = lmfem::basis::map_point(basis.elements[id].shape, &nodes, xi).x;
                let (x, uh) = value(&m, &dofs, &c, patch.index, [xhat.x, xhat.y]);
                assert!((uh - f(x)).abs() < 1e-12, "patch {:?}: {uh} vs {}", patch.index, f(x));
            }
        }
    }
}

fn example_system(n: usize, basis: BasisKind) -> (MeshModel, LinearSystem, ExampleProblem) {
    let problem = ExampleProblem::new(ExampleKind::Parabola, 0.3 / n as f64);
    let g = PatchGrid::new(DOMAIN_ORIGIN, DOMAIN_WIDTH, n).unwrap();
    let m = build_mesh(&g, problem.level_set(), &MeshParams::for_grid(&g)).unwrap();
    let system = assemble_problem(&FiniteElementSpace::new(&m, basis), &problem).unwrap();
    (m, system, problem)
}

#[test]
fn lagrange_transform_is_identity() {
    let (m, system, _) = example_system(4, BasisKind::Lagrange);
    let s = hierarchical_transform(&FiniteElementSpace::new(&m, BasisKind::Lagrange), &system);
    assert_eq!(s, CsrMatrix::identity(system.n()));
}

#[test]
fn hierarchical_transform_is_invertible() {
    let (m, system, _) = example_system(8, BasisKind::HierarchicalScaled);
    let s = hierarchical_transform(&FiniteElementSpace::new(&m, BasisKind::HierarchicalScaled), &system);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let y: Vec<f64> = (0..system.n()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let x = s.mul_vec(&y);
    // recover y from x = S y through the normal equations SᵀS y = Sᵀ x
    let st = s.transpose();
    let sts = st.matmul(&s);
    let rhs = st.mul_vec(&x);
    let opts = CgOptions {
        tol: 1e-14,
        max_iter: 100_000,
        jacobi: true,
    };
    let back = cg(&sts, &rhs, None, &opts, |_| {}).unwrap().x;
    let err = back.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-10, "{err}");
}

#[test]
fn bases_give_the_same_solution() {
    let (m, system, _) = example_system(8, BasisKind::HierarchicalScaled);
    let space = FiniteElementSpace::new(&m, BasisKind::HierarchicalScaled);
    let s = hierarchical_transform(&space, &system);
    let opts = CgOptions {
        tol: 1e-12,
        ..CgOptions::default()
    };
    let lagrange = cg_solve(&system, &opts, None).unwrap().x;
    let hier = cg_solve(&system, &opts, Some(&s)).unwrap().x;
    let diff = lagrange.iter().zip(&hier).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(diff < 1e-8, "{diff}");
    // the transformed operator stays symmetric
    let hat = transform_system(&system, &s);
    assert!(hat.matrix.asymmetry() <= 1e-12 * hat.matrix.max_abs());
}
