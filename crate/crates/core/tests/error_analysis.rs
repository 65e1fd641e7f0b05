use lmfem::geometry::ParabolaLevelSet;
use lmfem::mesh::MeshModel;
use lmfem::norms::{fill_eoc, interpolate, l2_error_with, modified_energy_error_with};
use lmfem::problem::{LinearProblem, DOMAIN_ORIGIN, DOMAIN_WIDTH};
use lmfem::quadrature::RuleSet;
use lmfem::*;

fn mesh(problem: &dyn ProblemSpec, n: usize) -> MeshModel {
    let g = PatchGrid::new(DOMAIN_ORIGIN, DOMAIN_WIDTH, n).unwrap();
    build_mesh(&g, problem.level_set(), &MeshParams::for_grid(&g)).unwrap()
}

fn linear() -> LinearProblem<ParabolaLevelSet> {
    LinearProblem {
        level_set: ParabolaLevelSet { a: 2.0, shift: 0.1, c: 0.5 },
        nu: 3.0,
        a: 0.7,
        b: Point2::new(1.5, -0.5),
    }
}

#[test]
fn norms_of_a_linear_function() {
    let problem = linear();
    let m = mesh(&problem, 8);
    let space = FiniteElementSpace::new(&m, BasisKind::Lagrange);
    let zero = vec![0.0; space.n_dofs()];
    // ∫ (a + b·x)² over (-2, 2)² = 16a² + |b|² · 64/3; the cross term vanishes by symmetry
    let b2 = problem.b.dot(problem.b);
    let l2 = (16.0 * problem.a * problem.a + b2 * 64.0 / 3.0).sqrt();
    assert!((l2_error(&space, &zero, &problem) - l2).abs() < 1e-12 * l2);
    let energy = (problem.nu * b2 * 16.0).sqrt();
    assert!((modified_energy_error(&space, &zero, &problem) - energy).abs() < 1e-12 * energy);
}

#[test]
fn interpolant_of_a_linear_function_is_exact() {
    let problem = linear();
    let m = mesh(&problem, 8);
    let space = FiniteElementSpace::new(&m, BasisKind::Lagrange);
    let c = interpolate(&space, |x| problem.exact(problem.side_of(x), x));
    assert!(l2_error(&space, &c, &problem) < 1e-13);
    assert!(modified_energy_error(&space, &c, &problem) < 1e-12);
}

#[test]
fn interpolation_error_orders() {
    let mut rows = Vec::new();
    for n in [8, 16, 32] {
        let problem = ExampleProblem::new(ExampleKind::Parabola, 0.0);
        let m = mesh(&problem, n);
        let space = FiniteElementSpace::new(&m, BasisKind::Lagrange);
        let c = interpolate(&space, |x| problem.exact(problem.side_of(x), x));
        rows.push(ErrorReport {
            h: 1.0 / n as f64,
            l2_error: l2_error(&space, &c, &problem),
            energy_error: modified_energy_error(&space, &c, &problem),
            ..Default::default()
        });
    }
    fill_eoc(&mut rows);
    for r in &rows[1..] {
        let (l2, en) = (r.eoc_l2.unwrap(), r.eoc_energy.unwrap());
        assert!((2.7..=3.3).contains(&l2), "L2 order {l2}");
        assert!((1.8..=2.2).contains(&en), "energy order {en}");
    }
}

#[test]
fn eoc_needs_halved_mesh_sizes() {
    let row = |h: f64, e: f64| ErrorReport {
        h,
        l2_error: e,
        energy_error: e,
        ..Default::default()
    };
    let mut rows = vec![row(0.1, 8.0), row(0.05, 1.0), row(0.03, 0.5), row(0.015, 0.0)];
    fill_eoc(&mut rows);
    assert_eq!(rows[0].eoc_l2, None);
    assert_eq!(rows[1].eoc_l2, Some(3.0));
    assert_eq!(rows[2].eoc_l2, None);
    // zero error: undefined order
    assert_eq!(rows[3].eoc_energy, None);
}

#[test]
fn error_quadrature_is_converged() {
    let problem = ExampleProblem::new(ExampleKind::Parabola, 0.0);
    let m = mesh(&problem, 32);
    let space = FiniteElementSpace::new(&m, BasisKind::Lagrange);
    let system = assemble_problem(&space, &problem).unwrap();
    let x = cg_solve(&system, &CgOptions::default(), None).unwrap().x;
    let (r8, r10) = (RuleSet::of_degree(8), RuleSet::of_degree(10));
    let (a, b) = (l2_error_with(&space, &x, &problem, &r8), l2_error_with(&space, &x, &problem, &r10));
    assert!((a - b).abs() < 0.01 * b, "{a} vs {b}");
    let (a, b) = (
        modified_energy_error_with(&space, &x, &problem, &r8),
        modified_energy_error_with(&space, &x, &problem, &r10),
    );
    assert!((a - b).abs() < 0.01 * b, "{a} vs {b}");
}

#[test]
fn exact_solution_branches_agree_on_the_interface() {
    // sin(l)/ν_i vanishes on Γ, so both branches coincide there
    let problem = ExampleProblem::new(ExampleKind::Circle, 0.01 / 64.0);
    for k in 0..40 {
        let t = k as f64 * std::f64::consts::TAU / 40.0;
        let x = Point2::new(1.0 + 0.01 / 64.0 + 0.3 * t.cos(), 1.2 + 0.3 * t.sin());
        let (u1, u2) = (problem.exact(Side::One, x), problem.exact(Side::Two, x));
        assert!(u1.abs() < 1e-14 && u2.abs() < 1e-14);
    }
}
