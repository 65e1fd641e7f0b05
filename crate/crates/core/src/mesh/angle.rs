//! Interior angles of straight and quadratic triangles.

use crate::error::MeshError;
use crate::geometry::Point2;

fn angle_between(u: Point2, v: Point2) -> f64 {
    u.cross(v).abs().atan2(u.dot(v)).to_degrees()
}

/// Interior angles at `v0, v1, v2` of a straight triangle, in degrees.
pub fn interior_angles_straight(v: [Point2; 3]) -> Result<[f64; 3], MeshError> {
    let mut out = [0.0; 3];
    for i in 0..3 {
        let a = v[(i + 1) % 3] - v[i];
        let b = v[(i + 2) % 3] - v[i];
        if a.norm() == 0.0 || b.norm() == 0.0 {
            return Err(MeshError::DegenerateGeometry("zero-length triangle edge".into()));
        }
        out[i] = angle_between(a, b);
    }
    Ok(out)
}

/// Tangent at `from` of the quadratic edge through `from`, `mid`, `to`,
/// pointing into the edge.
pub fn edge_tangent(from: Point2, mid: Point2, to: Point2) -> Point2 {
    4.0 * mid - (3.0 * from + to)
}

/// Signed angles at the three vertices of a quadratic triangle with nodes
/// `v0, v1, v2, m01, m12, m20`, measured counter-clockwise from the tangent
/// of the outgoing edge to the tangent of the incoming one. All three lie in
/// `(0°, 180°)` for a valid counter-clockwise element.
pub fn signed_vertex_angles(n: &[Point2; 6]) -> [f64; 3] {
    let [v0, v1, v2, m01, m12, m20] = *n;
    let at = |v: Point2, next: Point2, m_next: Point2, prev: Point2, m_prev: Point2| {
        let t_next = edge_tangent(v, m_next, next);
        let t_prev = edge_tangent(v, m_prev, prev);
        t_next.cross(t_prev).atan2(t_next.dot(t_prev)).to_degrees()
    };
    [
        at(v0, v1, m01, v2, m20),
        at(v1, v2, m12, v0, m01),
        at(v2, v0, m20, v1, m12),
    ]
}

/// Maximum interior angle of a quadratic triangle in degrees. Angles at the
/// vertices are taken between the tangents of the two adjacent edges; for
/// straight edges this is the ordinary interior angle.
pub fn check_max_angle(n: &[Point2; 6]) -> Result<f64, MeshError> {
    let [v0, v1, v2, m01, m12, m20] = *n;
    let pairs = [
        (edge_tangent(v0, m01, v1), edge_tangent(v0, m20, v2)),
        (edge_tangent(v1, m12, v2), edge_tangent(v1, m01, v0)),
        (edge_tangent(v2, m20, v0), edge_tangent(v2, m12, v1)),
    ];
    let mut max = 0.0_f64;
    for (a, b) in pairs {
        if a.norm() == 0.0 || b.norm() == 0.0 {
            return Err(MeshError::DegenerateGeometry("zero-length triangle edge".into()));
        }
        max = max.max(angle_between(a, b));
    }
    Ok(max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn straight(a: Point2, b: Point2, c: Point2) -> [Point2; 6] {
        [a, b, c, a.midpoint(b), b.midpoint(c), c.midpoint(a)]
    }

    #[test]
    fn right_isosceles() {
        let t = straight(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0));
        assert!((check_max_angle(&t).unwrap() - 90.0).abs() < 1e-12);
        let s = signed_vertex_angles(&t);
        assert!((s[0] - 90.0).abs() < 1e-12 && (s[1] - 45.0).abs() < 1e-12);
    }

    #[test]
    fn flat_triangle() {
        let t = straight(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.5, 0.1));
        // cos = -0.24 / 0.26 at the apex
        let expected = (-0.24_f64 / 0.26).acos().to_degrees();
        assert!((check_max_angle(&t).unwrap() - expected).abs() < 1e-10);
        assert!((expected - 157.38).abs() < 0.01);
    }

    #[test]
    fn zero_length_edge_is_rejected() {
        let p = Point2::new(0.0, 0.0);
        let t = straight(p, p, Point2::new(0.0, 1.0));
        assert!(check_max_angle(&t).is_err());
    }

    #[test]
    fn curved_edge_changes_vertex_angles() {
        let mut t = straight(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0));
        // bulge the hypotenuse outward
        t[4] = Point2::new(0.6, 0.6);
        let s = signed_vertex_angles(&t);
        assert!(s[1] > 45.0 && s[2] > 45.0);
        assert!((s[0] - 90.0).abs() < 1e-12);
    }
}
