//! Quadrature rules on the reference triangle `{ξ, η ≥ 0, ξ + η ≤ 1}` and the
//! reference square `[0, 1]²`. Weights sum to the reference area.

use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    /// Total polynomial degree integrated exactly.
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ([f64; 2], f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    /// Integrates `f` over the reference element.
    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.iter().map(|(p, w)| w * f(p[0], p[1])).sum()
    }
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "at least one Gauss point required");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        nodes[n - 1 - i] = 0.5 * (x + 1.0);
        weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Tensor-product Gauss rule with `n` points per direction on `[0, 1]²`.
pub fn square_gauss(n: usize) -> QuadratureRule {
    let (x, w) = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            points.push([x[i], x[j]]);
            weights.push(w[i] * w[j]);
        }
    }
    QuadratureRule {
        points,
        weights,
        degree: 2 * n - 1,
    }
}

/// Collapsed (Duffy) Gauss rule on the reference triangle, exact for total
/// degree `degree`.
pub fn triangle_collapsed(degree: usize) -> QuadratureRule {
    let n = (degree + 3) / 2;
    let (x, w) = gauss_legendre(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let u = x[i];
            let v = x[j];
            points.push([u, v * (1.0 - u)]);
            weights.push(w[i] * w[j] * (1.0 - u));
        }
    }
    QuadratureRule {
        points,
        weights,
        degree,
    }
}

fn from_barycentric(orbits: &[(f64, [f64; 3])]) -> Vec<([f64; 2], f64)> {
    let mut out = Vec::new();
    for &(w, [a, b, c]) in orbits {
        let mut perms: Vec<[f64; 3]> = vec![[a, b, c], [b, c, a], [c, a, b], [a, c, b], [c, b, a], [b, a, c]];
        perms.sort_by(|p, q| p.partial_cmp(q).unwrap());
        perms.dedup();
        for p in perms {
            out.push(([p[1], p[2]], 0.5 * w));
        }
    }
    out
}

fn rule_from_orbits(orbits: &[(f64, [f64; 3])], degree: usize) -> QuadratureRule {
    let (points, weights) = from_barycentric(orbits).into_iter().unzip();
    QuadratureRule {
        points,
        weights,
        degree,
    }
}

/// Six-point degree-4 rule (Dunavant).
pub fn triangle_degree4() -> QuadratureRule {
    let a = 0.445_948_490_915_964_886_318_329_253_883_05;
    let b = 0.091_576_213_509_770_743_459_571_463_402_202;
    let wa = 0.223_381_589_678_011_465_695_007_008_433_12;
    let wb = 0.109_951_743_655_321_867_638_326_324_900_21;
    rule_from_orbits(&[(wa, [a, a, 1.0 - 2.0 * a]), (wb, [b, b, 1.0 - 2.0 * b])], 4)
}

/// Seven-point degree-5 rule (Radon).
pub fn triangle_degree5() -> QuadratureRule {
    let s15 = 15.0_f64.sqrt();
    let a = (6.0 - s15) / 21.0;
    let b = (6.0 + s15) / 21.0;
    let third = 1.0 / 3.0;
    rule_from_orbits(
        &[
            (9.0 / 40.0, [third, third, third]),
            ((155.0 - s15) / 1200.0, [a, a, 1.0 - 2.0 * a]),
            ((155.0 + s15) / 1200.0, [b, b, 1.0 - 2.0 * b]),
        ],
        5,
    )
}

/// Rules used by assembly and error evaluation, built once.
#[derive(Clone, Debug)]
pub struct RuleSet {
    pub straight_triangle: QuadratureRule,
    pub curved_triangle: QuadratureRule,
    pub square: QuadratureRule,
}

impl RuleSet {
    /// Degree-4 straight, degree-5 curved triangles and 3×3 Gauss on squares.
    pub fn assembly() -> Self {
        Self {
            straight_triangle: triangle_degree4(),
            curved_triangle: triangle_degree5(),
            square: square_gauss(3),
        }
    }

    /// Rules of total degree `degree` on every element type.
    pub fn of_degree(degree: usize) -> Self {
        let tri = triangle_collapsed(degree);
        Self {
            straight_triangle: tri.clone(),
            curved_triangle: tri,
            square: square_gauss(degree / 2 + 1),
        }
    }
}
