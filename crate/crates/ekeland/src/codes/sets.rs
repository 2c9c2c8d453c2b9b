use super::*;
use crate::rational::{int, max_q, min_q, Ext};

/// A closed set coded by an enumeration of its complement.
pub trait ClosedSet: Send + Sync {
    fn space(&self) -> &Space;

    /// True when the complement enumerates a ball containing this one.
    fn excludes(&self, ball: &Ball) -> bool;

    /// Decided membership of a finitely represented point, when available.
    fn contains(&self, x: &Point) -> Option<bool>;
}

/// `[lo, hi]` inside an interval space.
pub struct IntervalSet {
    pub space: Space,
    pub lo: Q,
    pub hi: Q,
}

impl ClosedSet for IntervalSet {
    fn space(&self) -> &Space {
        &self.space
    }

    fn excludes(&self, ball: &Ball) -> bool {
        let Some(c) = ball.center.as_real() else { return false };
        c + &ball.radius < self.lo || c - &ball.radius > self.hi
    }

    fn contains(&self, x: &Point) -> Option<bool> {
        x.as_real().map(|t| &self.lo <= t && t <= &self.hi)
    }
}

/// A finite set of points.
pub struct PointSet {
    pub space: Space,
    pub points: Vec<Point>,
}

impl ClosedSet for PointSet {
    fn space(&self) -> &Space {
        &self.space
    }

    fn excludes(&self, ball: &Ball) -> bool {
        self.points
            .iter()
            .all(|p| self.space.dist(&ball.center, p).is_ok_and(|d| d > ball.radius))
    }

    fn contains(&self, x: &Point) -> Option<bool> {
        Some(self.points.iter().any(|p| self.space.dist(x, p).is_ok_and(|d| d.is_zero())))
    }
}

pub struct WholeSet(pub Space);

impl ClosedSet for WholeSet {
    fn space(&self) -> &Space {
        &self.0
    }

    fn excludes(&self, _ball: &Ball) -> bool {
        false
    }

    fn contains(&self, _x: &Point) -> Option<bool> {
        Some(true)
    }
}

/// The complement of a finite union of open balls.
pub struct BallComplement {
    pub space: Space,
    pub balls: Vec<Ball>,
}

impl ClosedSet for BallComplement {
    fn space(&self) -> &Space {
        &self.space
    }

    fn excludes(&self, ball: &Ball) -> bool {
        self.balls.iter().any(|b| self.space.strictly_inside(ball, b).unwrap_or(false))
    }

    fn contains(&self, x: &Point) -> Option<bool> {
        Some(!self.balls.iter().any(|b| self.space.in_ball(b, x).unwrap_or(false)))
    }
}

/// `{x : g(x) <= t}` for an lsc `g`; its complement is the union of the
/// balls on which `g` is enumerated above `t`.
pub struct SublevelSet {
    pub g: LscRef,
    pub t: Q,
    pub budget: u32,
}

impl ClosedSet for SublevelSet {
    fn space(&self) -> &Space {
        self.g.space()
    }

    fn excludes(&self, ball: &Ball) -> bool {
        self.g.ball_bound(ball) > Ext::Fin(self.t.clone())
    }

    fn contains(&self, x: &Point) -> Option<bool> {
        if self.g.upper(x).is_some_and(|u| u <= self.t) {
            return Some(true);
        }
        if self.g.lower(x, self.budget) > Ext::Fin(self.t.clone()) {
            return Some(false);
        }
        None
    }
}

/// A closed subset of `X × R`, upward closed in the real coordinate.
pub trait EpigraphSet: Send + Sync {
    fn space(&self) -> &Space;

    /// Supremum of `v` over complement boxes `B' × (u, v)` with `ball ⋐ B'`.
    fn excluded_height(&self, ball: &Ball) -> Option<Ext>;

    fn contains(&self, x: &Point, y: &Q) -> bool;

    /// The least `y` with `(x, y)` in the set, when known.
    fn lowest(&self, _x: &Point) -> Option<Q> {
        None
    }
}

/// `{(x, y) : y >= slope * x + intercept}` over an interval space.
pub struct LinearEpigraph {
    pub space: Space,
    pub slope: Q,
    pub intercept: Q,
}

impl LinearEpigraph {
    fn line(&self, t: &Q) -> Q {
        &self.slope * t + &self.intercept
    }
}

impl EpigraphSet for LinearEpigraph {
    fn space(&self) -> &Space {
        &self.space
    }

    fn excluded_height(&self, ball: &Ball) -> Option<Ext> {
        match interval_hull(&self.space, ball) {
            Some((lo, hi)) => Some(Ext::Fin(min_q(&self.line(&lo), &self.line(&hi)))),
            None => None,
        }
    }

    fn contains(&self, x: &Point, y: &Q) -> bool {
        x.as_real().is_some_and(|t| y >= &self.line(t))
    }

    fn lowest(&self, x: &Point) -> Option<Q> {
        x.as_real().map(|t| self.line(t))
    }
}

/// `X × [c, ∞)`.
pub struct ConstantEpigraph {
    pub space: Space,
    pub c: Q,
}

impl EpigraphSet for ConstantEpigraph {
    fn space(&self) -> &Space {
        &self.space
    }

    fn excluded_height(&self, _ball: &Ball) -> Option<Ext> {
        Some(Ext::Fin(self.c.clone()))
    }

    fn contains(&self, _x: &Point, y: &Q) -> bool {
        y >= &self.c
    }

    fn lowest(&self, _x: &Point) -> Option<Q> {
        Some(self.c.clone())
    }
}

/// The epigraph of an honest lsc function.
pub struct EpigraphOf(pub HonestRef);

impl EpigraphSet for EpigraphOf {
    fn space(&self) -> &Space {
        self.0.space()
    }

    fn excluded_height(&self, ball: &Ball) -> Option<Ext> {
        let outer = Ball::new(ball.center.clone(), &ball.radius * int(2));
        Some(self.0.ball_inf(&outer).lo)
    }

    fn contains(&self, x: &Point, y: &Q) -> bool {
        self.0.upper(x).is_some_and(|u| &u <= y)
    }

    fn lowest(&self, x: &Point) -> Option<Q> {
        self.0.upper(x)
    }
}

/// The complement of finitely many boxes `B × (u, v)`.
pub struct BoxComplement {
    pub space: Space,
    pub boxes: Vec<(Ball, Q, Q)>,
}

impl EpigraphSet for BoxComplement {
    fn space(&self) -> &Space {
        &self.space
    }

    fn excluded_height(&self, ball: &Ball) -> Option<Ext> {
        let mut best: Option<Q> = None;
        for (b, _, v) in &self.boxes {
            if self.space.strictly_inside(ball, b).unwrap_or(false) {
                best = Some(best.map_or(v.clone(), |w| max_q(&w, v)));
            }
        }
        best.map(Ext::Fin)
    }

    fn contains(&self, x: &Point, y: &Q) -> bool {
        !self
            .boxes
            .iter()
            .any(|(b, u, v)| self.space.in_ball(b, x).unwrap_or(false) && u < y && y < v)
    }
}
