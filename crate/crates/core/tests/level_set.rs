use proptest::prelude::*;

use lmfem::geometry::{safeguarded_newton, AffineLevelSet, CircleLevelSet, ParabolaLevelSet};
use lmfem::{find_edge_cut, project_along_direction, LevelSet, LevelSetField, Point2, RootOptions};

fn p(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

#[test]
fn spec_edge_cuts() {
    let opts = RootOptions::default();
    let ls = AffineLevelSet { a: 1.0, b: 0.0, c: -0.25 };
    assert!((find_edge_cut(&ls, p(0.0, 0.0), p(1.0, 0.0), &opts).unwrap().unwrap().r - 0.25).abs() < 1e-15);

    let circle = CircleLevelSet {
        center: p(1.0, 1.2),
        radius: 0.3,
    };
    let cut = find_edge_cut(&circle, p(0.6, 1.2), p(0.8, 1.2), &opts).unwrap().unwrap();
    assert!((cut.r - 0.5).abs() < 1e-10);
    assert!(cut.point.distance(p(0.7, 1.2)) < 1e-11);

    let far = AffineLevelSet { a: 1.0, b: 0.0, c: -2.0 };
    assert_eq!(find_edge_cut(&far, p(0.0, 0.0), p(1.0, 0.0), &opts).unwrap(), None);
}

#[test]
fn spec_projections() {
    let line = AffineLevelSet { a: 0.0, b: 1.0, c: -0.5 };
    let q = project_along_direction(&line, p(0.3, 0.2), p(0.0, 1.0), 1e-14, 1.0).unwrap();
    assert!(q.distance(p(0.3, 0.5)) < 1e-14);

    let unit = LevelSetField::new(|x: Point2| x.dot(x) - 1.0, |x: Point2| 2.0 * x);
    let q = project_along_direction(&unit, p(0.5, 0.0), p(1.0, 0.0), 1e-14, 1.0).unwrap();
    assert!(q.distance(p(1.0, 0.0)) < 1e-13);

    let parabola = ParabolaLevelSet { a: 2.0, shift: 0.0, c: 0.5 };
    let q = project_along_direction(&parabola, p(0.0, 0.0), p(0.0, 1.0), 1e-14, 1.0).unwrap();
    assert!(q.distance(p(0.0, -0.5)) < 1e-14);

    assert_eq!(project_along_direction(&line, p(0.3, 0.2), p(0.0, 1.0), 1e-14, 0.1), None);
}

#[test]
fn newton_stays_in_bracket() {
    // steep cubic: pure Newton from the midpoint overshoots
    let f = |t: f64| ((t - 0.9).powi(3) + 1e-3 * (t - 0.9), 3.0 * (t - 0.9).powi(2) + 1e-3);
    let mut steps = Vec::new();
    let t = safeguarded_newton(f, 0.0, 1.0, 1e-14, 200, |s| steps.push(s)).unwrap();
    assert!((t - 0.9).abs() < 1e-10);
    for s in steps {
        let (a, b) = if s.lo < s.hi { (s.lo, s.hi) } else { (s.hi, s.lo) };
        assert!(s.t >= a && s.t <= b, "{s:?}");
    }
}

proptest! {
    #[test]
    fn affine_roots_are_exact(a in -3.0..3.0f64, b in -3.0..3.0f64, r0 in 0.01..0.99f64) {
        prop_assume!(a.abs() > 0.1);
        // γ vanishes at x = r0 on the unit segment along x
        let ls = AffineLevelSet { a, b, c: -a * r0 - b * 0.3 };
        let cut = find_edge_cut(&ls, p(0.0, 0.3), p(1.0, 0.3), &RootOptions::default()).unwrap().unwrap();
        prop_assert!((cut.r - r0).abs() <= 1e-14 * r0.max(1.0) * 8.0);
    }

    #[test]
    fn circle_cut_residual(cx in -0.5..1.5f64, cy in 0.2..0.8f64, rad in 0.3..0.9f64) {
        let ls = CircleLevelSet { center: p(cx, cy), radius: rad };
        let opts = RootOptions::default();
        match find_edge_cut(&ls, p(0.0, 0.5), p(1.0, 0.5), &opts) {
            Ok(Some(cut)) => {
                prop_assert!(ls.value(cut.point).abs() <= opts.tol || cut.is_endpoint());
                prop_assert!(cut.point.distance(p(0.0, 0.5).lerp(p(1.0, 0.5), cut.r)) == 0.0);
            }
            Ok(None) => prop_assert!(ls.value(p(0.0, 0.5)) * ls.value(p(1.0, 0.5)) > 0.0),
            Err(_) => {} // two crossings: the pre-scan rejects them
        }
    }

    #[test]
    fn root_finding_is_deterministic(x0 in 0.1..0.9f64) {
        let ls = CircleLevelSet { center: p(x0, 1.0), radius: 0.6 };
        let a = find_edge_cut(&ls, p(0.0, 0.5), p(0.4, 0.5), &RootOptions::default());
        let b = find_edge_cut(&ls, p(0.0, 0.5), p(0.4, 0.5), &RootOptions::default());
        prop_assert_eq!(a, b);
    }
}

#[test]
fn double_crossing_detected() {
    let ls = CircleLevelSet {
        center: p(0.5, 0.0),
        radius: 0.3,
    };
    assert!(find_edge_cut(&ls, p(0.0, 0.0), p(1.0, 0.0), &RootOptions::default()).is_err());
}
