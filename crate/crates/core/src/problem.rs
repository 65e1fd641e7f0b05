//! Interface problems `-∇·(ν_i ∇u) = f_i` on `Ω_i` with Dirichlet data and
//! known exact solutions.

use std::fmt;
use std::str::FromStr;

use crate::geometry::{CircleLevelSet, LevelSet, ParabolaLevelSet, Point2};
use crate::mesh::Side;

/// Coefficients, data and exact solution branches of an interface problem.
///
/// Branches are evaluated on the discrete side of a sub-element, so they
/// must be defined on all of `Ω`.
pub trait ProblemSpec: Sync {
    fn level_set(&self) -> &dyn LevelSet;
    fn nu(&self, side: Side) -> f64;
    fn source(&self, side: Side, p: Point2) -> f64;
    fn exact(&self, side: Side, p: Point2) -> f64;
    fn exact_gradient(&self, side: Side, p: Point2) -> Point2;

    /// Side of the continuous interface containing `p`.
    fn side_of(&self, p: Point2) -> Side {
        if self.level_set().value(p) < 0.0 {
            Side::One
        } else {
            Side::Two
        }
    }

    /// Dirichlet data: the exact solution on the side containing `p`.
    fn boundary(&self, p: Point2) -> f64 {
        self.exact(self.side_of(p), p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExampleKind {
    /// Interface `y = 2(x + s)² - 0.5`.
    Parabola,
    /// Circle of radius 0.3 around `(1 + s, 1.2)`.
    Circle,
}

impl FromStr for ExampleKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "parabola" | "1" => Ok(ExampleKind::Parabola),
            "circle" | "2" => Ok(ExampleKind::Circle),
            other => Err(format!("unknown example '{other}' (expected parabola or circle)")),
        }
    }
}

impl fmt::Display for ExampleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExampleKind::Parabola => "parabola",
            ExampleKind::Circle => "circle",
        })
    }
}

#[derive(Clone, Copy, Debug)]
enum Shape {
    Parabola(ParabolaLevelSet),
    Circle(CircleLevelSet),
}

/// The benchmark problems on `Ω = (-2, 2)²` with `ν₁ = 4`, `ν₂ = 1` and
/// exact solution `u_i = sin(l) / ν_i`, where `l` is the level-set function.
#[derive(Clone, Copy, Debug)]
pub struct ExampleProblem {
    pub kind: ExampleKind,
    /// Horizontal shift of the interface.
    pub shift: f64,
    shape: Shape,
}

pub const NU: [f64; 2] = [4.0, 1.0];
pub const DOMAIN_ORIGIN: Point2 = Point2::new(-2.0, -2.0);
pub const DOMAIN_WIDTH: f64 = 4.0;

impl ExampleProblem {
    pub fn new(kind: ExampleKind, shift: f64) -> Self {
        let shape = match kind {
            ExampleKind::Parabola => Shape::Parabola(ParabolaLevelSet { a: 2.0, shift, c: 0.5 }),
            ExampleKind::Circle => Shape::Circle(CircleLevelSet {
                center: Point2::new(1.0 + shift, 1.2),
                radius: 0.3,
            }),
        };
        Self { kind, shift, shape }
    }

    fn l(&self, p: Point2) -> f64 {
        self.level_set().value(p)
    }

    /// `|∇l|²` and `Δl`.
    fn derivatives(&self, p: Point2) -> (f64, f64) {
        match self.shape {
            Shape::Parabola(_) => {
                let s = p.x + self.shift;
                (16.0 * s * s + 1.0, -4.0)
            }
            Shape::Circle(c) => {
                let d = p - c.center;
                (4.0 * d.dot(d), 4.0)
            }
        }
    }
}

fn nu_of(side: Side) -> f64 {
    match side {
        Side::One => NU[0],
        Side::Two => NU[1],
    }
}

impl ProblemSpec for ExampleProblem {
    fn level_set(&self) -> &dyn LevelSet {
        match &self.shape {
            Shape::Parabola(l) => l,
            Shape::Circle(l) => l,
        }
    }

    fn nu(&self, side: Side) -> f64 {
        nu_of(side)
    }

    /// `-Δ sin(l) = sin(l)|∇l|² - cos(l)Δl`, the same on both sides.
    fn source(&self, _side: Side, p: Point2) -> f64 {
        let l = self.l(p);
        let (g2, lap) = self.derivatives(p);
        l.sin() * g2 - l.cos() * lap
    }

    fn exact(&self, side: Side, p: Point2) -> f64 {
        self.l(p).sin() / nu_of(side)
    }

    fn exact_gradient(&self, side: Side, p: Point2) -> Point2 {
        let g = self.level_set().gradient(p);
        (self.l(p).cos() / nu_of(side)) * g
    }
}

/// `u = a + b·x` on both sides with constant `ν`; the source vanishes.
#[derive(Clone, Copy, Debug)]
pub struct LinearProblem<L> {
    pub level_set: L,
    pub nu: f64,
    pub a: f64,
    pub b: Point2,
}

impl<L: LevelSet> ProblemSpec for LinearProblem<L> {
    fn level_set(&self) -> &dyn LevelSet {
        &self.level_set
    }
    fn nu(&self, _side: Side) -> f64 {
        self.nu
    }
    fn source(&self, _side: Side, _p: Point2) -> f64 {
        0.0
    }
    fn exact(&self, _side: Side, p: Point2) -> f64 {
        self.a + self.b.dot(p)
    }
    fn exact_gradient(&self, _side: Side, _p: Point2) -> Point2 {
        self.b
    }
}
