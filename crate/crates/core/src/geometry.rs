//! Implicit interface description and root finding on lines.
//!
//! The interface is the zero set of a level-set function `γ`. Points with
//! `γ < 0` belong to subdomain 1, points with `γ > 0` to subdomain 2.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use crate::error::GeometryError;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn normalized(self) -> Point2 {
        let n = self.norm();
        Point2::new(self.x / n, self.y / n)
    }

    /// Counter-clockwise rotation by 90 degrees.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    /// `self + t (other - self)`.
    pub fn lerp(self, other: Point2, t: f64) -> Point2 {
        Point2::new(
            self.x + t * (other.x - self.x),
            self.y + t * (other.y - self.y),
        )
    }

    pub fn distance(self, other: Point2) -> f64 {
        (other - self).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<Point2> for f64 {
    type Output = Point2;
    fn mul(self, rhs: Point2) -> Point2 {
        Point2::new(self * rhs.x, self * rhs.y)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Signed orientation of the triple `(a, b, c)`; positive when counter-clockwise.
pub fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

/// Intersection of the lines through `(p1, p2)` and `(q1, q2)`.
pub fn line_intersection(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> Option<Point2> {
    let d1 = p2 - p1;
    let d2 = q2 - q1;
    let denom = d1.cross(d2);
    if denom.abs() <= 1e-14 * d1.norm() * d2.norm() {
        return None;
    }
    let t = (q1 - p1).cross(d2) / denom;
    Some(p1.lerp(p2, t))
}

/// A level-set function with its analytic gradient.
///
/// Implementations must be pure: the same point always yields the same value.
pub trait LevelSet: Send + Sync {
    fn value(&self, p: Point2) -> f64;
    fn gradient(&self, p: Point2) -> Point2;
}

impl<T: LevelSet + ?Sized> LevelSet for &T {
    fn value(&self, p: Point2) -> f64 {
        (**self).value(p)
    }
    fn gradient(&self, p: Point2) -> Point2 {
        (**self).gradient(p)
    }
}

impl<T: LevelSet + ?Sized> LevelSet for Arc<T> {
    fn value(&self, p: Point2) -> f64 {
        (**self).value(p)
    }
    fn gradient(&self, p: Point2) -> Point2 {
        (**self).gradient(p)
    }
}

/// Level set assembled from a pair of closures.
pub struct LevelSetField<V, G> {
    value: V,
    gradient: G,
}

impl<V, G> LevelSetField<V, G>
where
    V: Fn(Point2) -> f64 + Send + Sync,
    G: Fn(Point2) -> Point2 + Send + Sync,
{
    pub fn new(value: V, gradient: G) -> Self {
        Self { value, gradient }
    }
}

impl<V, G> LevelSet for LevelSetField<V, G>
where
    V: Fn(Point2) -> f64 + Send + Sync,
    G: Fn(Point2) -> Point2 + Send + Sync,
{
    fn value(&self, p: Point2) -> f64 {
        (self.value)(p)
    }
    fn gradient(&self, p: Point2) -> Point2 {
        (self.gradient)(p)
    }
}

/// `γ(x) = a·x + b·y + c`.
#[derive(Clone, Copy, Debug)]
pub struct AffineLevelSet {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl LevelSet for AffineLevelSet {
    fn value(&self, p: Point2) -> f64 {
        self.a * p.x + self.b * p.y + self.c
    }
    fn gradient(&self, _p: Point2) -> Point2 {
        Point2::new(self.a, self.b)
    }
}

/// `γ ≡ c`; no interface when `c ≠ 0`.
#[derive(Clone, Copy, Debug)]
pub struct ConstantLevelSet(pub f64);

impl LevelSet for ConstantLevelSet {
    fn value(&self, _p: Point2) -> f64 {
        self.0
    }
    fn gradient(&self, _p: Point2) -> Point2 {
        Point2::default()
    }
}

/// `γ(x) = |x - center|² - radius²`, negative inside the disc.
#[derive(Clone, Copy, Debug)]
pub struct CircleLevelSet {
    pub center: Point2,
    pub radius: f64,
}

impl LevelSet for CircleLevelSet {
    fn value(&self, p: Point2) -> f64 {
        let d = p - self.center;
        d.x * d.x + d.y * d.y - self.radius * self.radius
    }
    fn gradient(&self, p: Point2) -> Point2 {
        2.0 * (p - self.center)
    }
}

/// `γ(x, y) = y - a (x + shift)² + c`.
#[derive(Clone, Copy, Debug)]
pub struct ParabolaLevelSet {
    pub a: f64,
    pub shift: f64,
    pub c: f64,
}

impl LevelSet for ParabolaLevelSet {
    fn value(&self, p: Point2) -> f64 {
        let s = p.x + self.shift;
        p.y - self.a * s * s + self.c
    }
    fn gradient(&self, p: Point2) -> Point2 {
        Point2::new(-2.0 * self.a * (p.x + self.shift), 1.0)
    }
}

/// Relative position `r` of an interface crossing on the segment `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineCut {
    pub r: f64,
    pub point: Point2,
}

impl LineCut {
    pub fn is_endpoint(&self) -> bool {
        self.r == 0.0 || self.r == 1.0
    }
}

/// Tolerances for the safeguarded root finders.
#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    /// Residual tolerance `|γ| ≤ tol` for accepted roots.
    pub tol: f64,
    /// Endpoints with `|γ| ≤ vertex_tol` are treated as lying on the interface.
    pub vertex_tol: f64,
    pub max_iter: usize,
    /// Uniform samples used to detect repeated crossings of one segment.
    pub samples: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            vertex_tol: 1e-10,
            max_iter: 50,
            samples: 8,
        }
    }
}

impl RootOptions {
    /// Tolerances scaled to a domain of diameter `domain_diam` meshed with
    /// patches of diameter `patch_diam`.
    pub fn scaled(domain_diam: f64, patch_diam: f64) -> Self {
        Self {
            tol: 1e-12 * domain_diam,
            vertex_tol: 1e-10 * patch_diam,
            ..Self::default()
        }
    }
}

/// One step record of [`safeguarded_newton`], exposed for instrumentation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonStep {
    pub lo: f64,
    pub hi: f64,
    pub t: f64,
    pub bisected: bool,
}

/// Newton's method on `f` in the sign-change bracket `[lo, hi]`, falling back
/// to bisection whenever a Newton iterate would leave the bracket or fails to
/// halve it. Starts at the bracket midpoint.
pub fn safeguarded_newton<F>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
    mut observer: impl FnMut(NewtonStep),
) -> Result<f64, GeometryError>
where
    F: Fn(f64) -> (f64, f64),
{
    let (f_lo, _) = f(lo);
    let (f_hi, _) = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    debug_assert!(f_lo * f_hi < 0.0, "bracket must contain a sign change");
    let lo_negative = f_lo < 0.0;

    let mut t = 0.5 * (lo + hi);
    let mut width_before = (hi - lo).abs();
    for _ in 0..max_iter {
        let (value, slope) = f(t);
        if value.abs() <= tol {
            return Ok(t);
        }
        if (value < 0.0) == lo_negative {
            lo = t;
        } else {
            hi = t;
        }
        let width = (hi - lo).abs();
        if width <= 4.0 * f64::EPSILON * t.abs().max(1.0) {
            // bracket collapsed to machine precision
            return Ok(t);
        }

        let newton = if slope != 0.0 { t - value / slope } else { f64::NAN };
        let (a, b) = if lo < hi { (lo, hi) } else { (hi, lo) };
        let inside = newton.is_finite() && newton > a && newton < b;
        let bisected = !inside || width > 0.5 * width_before;
        t = if bisected { 0.5 * (lo + hi) } else { newton };
        width_before = width;
        observer(NewtonStep { lo, hi, t, bisected });
    }
    let (value, _) = f(t);
    if value.abs() <= tol {
        Ok(t)
    } else {
        Err(GeometryError::NoConvergence {
            iterations: max_iter,
            residual: value.abs(),
        })
    }
}

/// Counts sign changes of `γ` on `samples + 1` equidistant points of `(a, b)`.
/// Values within `vertex_tol` of zero count as no sign.
fn count_sign_changes(ls: &dyn LevelSet, a: Point2, b: Point2, opts: &RootOptions) -> usize {
    let n = opts.samples.max(1);
    let mut last = 0.0_f64;
    let mut changes = 0;
    for k in 0..=n {
        let v = ls.value(a.lerp(b, k as f64 / n as f64));
        if v.abs() <= opts.vertex_tol {
            continue;
        }
        if last != 0.0 && (v < 0.0) != (last < 0.0) {
            changes += 1;
        }
        last = v;
    }
    changes
}

/// Locates the crossing of the interface with the segment `(a, b)`.
///
/// Returns `Ok(None)` when both endpoints lie strictly on the same side.
/// Endpoints within the vertex tolerance are reported as cuts with
/// `r ∈ {0, 1}`.
pub fn find_edge_cut(
    ls: &dyn LevelSet,
    a: Point2,
    b: Point2,
    opts: &RootOptions,
) -> Result<Option<LineCut>, GeometryError> {
    let ga = ls.value(a);
    let gb = ls.value(b);

    if count_sign_changes(ls, a, b, opts) > 1 {
        return Err(GeometryError::MultipleCrossings { a, b });
    }
    if ga.abs() <= opts.vertex_tol {
        return Ok(Some(LineCut { r: 0.0, point: a }));
    }
    if gb.abs() <= opts.vertex_tol {
        return Ok(Some(LineCut { r: 1.0, point: b }));
    }
    if ga * gb > 0.0 {
        return Ok(None);
    }

    let dir = b - a;
    let f = |r: f64| {
        let p = a.lerp(b, r);
        (ls.value(p), ls.gradient(p).dot(dir))
    };
    let r = safeguarded_newton(f, 0.0, 1.0, opts.tol, opts.max_iter, |_| {})?;
    Ok(Some(LineCut {
        r,
        point: a.lerp(b, r),
    }))
}

/// Moves `p` along the unit direction `dir` onto the interface.
///
/// Searches `t ∈ [-max_step, max_step]` outward from `t = 0`, alternating
/// sides, for the nearest sign change and refines it with safeguarded Newton.
/// Returns `None` when no crossing lies within the step bound.
pub fn project_along_direction(
    ls: &dyn LevelSet,
    p: Point2,
    dir: Point2,
    tol: f64,
    max_step: f64,
) -> Option<Point2> {
    const SAMPLES: usize = 16;
    let g0 = ls.value(p);
    if g0.abs() <= tol {
        return Some(p);
    }
    let f = |t: f64| {
        let q = p + t * dir;
        (ls.value(q), ls.gradient(q).dot(dir))
    };

    let mut prev = [(0.0, g0), (0.0, g0)];
    for k in 1..=SAMPLES {
        let t = max_step * k as f64 / SAMPLES as f64;
        for (side, sign) in [(0usize, 1.0), (1usize, -1.0)] {
            let tk = sign * t;
            let gk = ls.value(p + tk * dir);
            let (t_prev, g_prev) = prev[side];
            if gk == 0.0 {
                return Some(p + tk * dir);
            }
            if gk * g_prev < 0.0 {
                let t = safeguarded_newton(f, t_prev, tk, tol, 100, |_| {}).ok()?;
                return Some(p + t * dir);
            }
            prev[side] = (tk, gk);
        }
    }
    None
}
