use std::sync::Arc;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::*;
use crate::rational::{int, max_q, min_q, Ext};
use crate::space::NetBounds;

/// The constant potential `c`.
pub struct ConstantLsc {
    pub space: Space,
    pub value: Q,
}

impl LscCode for ConstantLsc {
    fn space(&self) -> &Space {
        &self.space
    }

    fn floor(&self) -> Q {
        min_q(&zero(), &self.value)
    }

    fn ball_bound(&self, _ball: &Ball) -> Ext {
        Ext::Fin(self.value.clone())
    }

    fn upper(&self, _x: &Point) -> Option<Q> {
        Some(self.value.clone())
    }

    fn lower(&self, _x: &Point, _budget: u32) -> Ext {
        Ext::Fin(self.value.clone())
    }
}

impl HonestLscCode for ConstantLsc {
    fn ball_inf(&self, _ball: &Ball) -> ExtBracket {
        ExtBracket::exact(Ext::Fin(self.value.clone()))
    }
}

/// Precision used for upper evidence of continuous codes.
pub const UPPER_PRECISION: u32 = 40;

/// The lsc view of a continuous code: `B ⊩ q` when `B ⋐ B'`, `B' ⊩ (u, v)` and `q < u`.
pub struct ContToLsc {
    code: ContRef,
    floor: Q,
}

pub fn cont_to_lsc(code: ContRef) -> ContToLsc {
    ContToLsc { code, floor: zero() }
}

impl ContToLsc {
    pub fn with_floor(code: ContRef, floor: Q) -> ContToLsc {
        ContToLsc { code, floor }
    }

    pub fn inner(&self) -> &ContRef {
        &self.code
    }

    fn bracket(&self, x: &Point, k: u32) -> Option<Bracket> {
        match eval_cont(self.code.as_ref(), x, k) {
            Ok(b) => Some(b),
            Err(CodeError::BudgetExceeded { best }) => best,
            Err(_) => None,
        }
    }
}

impl LscCode for ContToLsc {
    fn space(&self) -> &Space {
        self.code.domain()
    }

    fn floor(&self) -> Q {
        self.floor.clone()
    }

    fn ball_bound(&self, ball: &Ball) -> Ext {
        let outer = Ball::new(ball.center.clone(), &ball.radius * int(2));
        let best = self.code.ball_items(&outer).into_iter().map(|b| b.lo).max();
        Ext::Fin(match best {
            Some(q) => max_q(&q, &self.floor),
            None => self.floor.clone(),
        })
    }

    fn upper(&self, x: &Point) -> Option<Q> {
        self.bracket(x, UPPER_PRECISION).map(|b| b.hi)
    }

    fn lower(&self, x: &Point, budget: u32) -> Ext {
        let lo = self.bracket(x, budget).map_or(self.floor.clone(), |b| b.lo);
        Ext::Fin(max_q(&lo, &self.floor))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CombineOp {
    Sum,
    Max,
    Min,
}

/// Pointwise sum, max or min of two lsc codes.
pub struct LscCombine {
    f: LscRef,
    g: LscRef,
    op: CombineOp,
}

pub fn lsc_combine(f: LscRef, g: LscRef, op: CombineOp) -> Result<LscCombine, CodeError> {
    require_same_space(f.space(), g.space())?;
    Ok(LscCombine { f, g, op })
}

fn ext_sum(a: Ext, b: Ext) -> Ext {
    match (a, b) {
        (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a + b),
        _ => Ext::Inf,
    }
}

impl LscCombine {
    fn apply(&self, a: Ext, b: Ext) -> Ext {
        match self.op {
            CombineOp::Sum => ext_sum(a, b),
            CombineOp::Max => a.max(b),
            CombineOp::Min => a.min(b),
        }
    }
}

impl LscCode for LscCombine {
    fn space(&self) -> &Space {
        self.f.space()
    }

    fn floor(&self) -> Q {
        let (a, b) = (self.f.floor(), self.g.floor());
        match self.op {
            CombineOp::Sum => a + b,
            CombineOp::Max => max_q(&a, &b),
            CombineOp::Min => min_q(&a, &b),
        }
    }

    fn ball_bound(&self, ball: &Ball) -> Ext {
        self.apply(self.f.ball_bound(ball), self.g.ball_bound(ball))
    }

    fn upper(&self, x: &Point) -> Option<Q> {
        let (a, b) = (self.f.upper(x), self.g.upper(x));
        match self.op {
            CombineOp::Sum => Some(a? + b?),
            CombineOp::Max => Some(max_q(&a?, &b?)),
            CombineOp::Min => match (a, b) {
                (Some(a), Some(b)) => Some(min_q(&a, &b)),
                (a, b) => a.or(b),
            },
        }
    }

    fn lower(&self, x: &Point, budget: u32) -> Ext {
        self.apply(self.f.lower(x, budget), self.g.lower(x, budget))
    }
}

/// `0` on a closed set and `f` off it.
pub struct ZeroOnClosed {
    f: LscRef,
    set: Arc<dyn ClosedSet>,
}

pub fn lsc_zero_on_closed(f: LscRef, set: Arc<dyn ClosedSet>) -> Result<ZeroOnClosed, CodeError> {
    require_same_space(f.space(), set.space())?;
    Ok(ZeroOnClosed { f, set })
}

impl LscCode for ZeroOnClosed {
    fn space(&self) -> &Space {
        self.f.space()
    }

    fn floor(&self) -> Q {
        min_q(&zero(), &self.f.floor())
    }

    fn ball_bound(&self, ball: &Ball) -> Ext {
        if self.set.excludes(ball) {
            self.f.ball_bound(ball).max(Ext::Fin(zero()))
        } else {
            Ext::Fin(zero())
        }
    }

    fn upper(&self, x: &Point) -> Option<Q> {
        if self.set.contains(x) == Some(true) {
            return Some(zero());
        }
        self.f.upper(x)
    }

    fn lower(&self, x: &Point, budget: u32) -> Ext {
        match self.set.contains(x) {
            Some(true) => Ext::Fin(zero()),
            Some(false) => self.f.lower(x, budget).max(Ext::Fin(zero())),
            None => {
                let mut best = Ext::Fin(zero());
                for s in 0..budget {
                    best = best.max(self.ball_bound(&Ball::new(x.clone(), pow2(-(s as i64)))));
                }
                best
            }
        }
    }
}

/// `offset + eps * d(x, x0)`.
pub struct DistanceLsc {
    pub space: Space,
    pub x0: Point,
    pub eps: Q,
    pub offset: Q,
}

impl DistanceLsc {
    fn value(&self, x: &Point) -> Option<Q> {
        Some(&self.offset + &self.eps * self.space.dist(x, &self.x0).ok()?)
    }
}

impl LscCode for DistanceLsc {
    fn space(&self) -> &Space {
        &self.space
    }

    fn floor(&self) -> Q {
        min_q(&zero(), &self.offset)
    }

    fn ball_bound(&self, ball: &Ball) -> Ext {
        let Ok(d) = self.space.dist(&ball.center, &self.x0) else { return Ext::Fin(self.floor()) };
        let gap = max_q(&zero(), &(d - &ball.radius));
        Ext::Fin(&self.offset + &self.eps * gap)
    }

    fn upper(&self, x: &Point) -> Option<Q> {
        self.value(x)
    }

    fn lower(&self, x: &Point, _budget: u32) -> Ext {
        self.value(x).map_or(Ext::Fin(self.floor()), Ext::Fin)
    }
}

pub fn lsc_add_scaled_distance(f: LscRef, x0: Point, eps: Q) -> Result<LscCombine, CodeError> {
    require_positive("eps", &eps)?;
    let space = f.space().clone();
    if !space.contains(&x0) {
        return Err(SpaceError::TypeMismatch(format!("{x0} is not in {}", space.name())).into());
    }
    let d: LscRef = Arc::new(DistanceLsc { space, x0, eps, offset: zero() });
    lsc_combine(f, d, CombineOp::Sum)
}

/// `c * f` for `c > 0`.
pub struct ScaledLsc {
    f: LscRef,
    c: Q,
}

pub fn lsc_scale(f: LscRef, c: Q) -> Result<ScaledLsc, CodeError> {
    require_positive("scale", &c)?;
    Ok(ScaledLsc { f, c })
}

impl LscCode for ScaledLsc {
    fn space(&self) -> &Space {
        self.f.space()
    }

    fn floor(&self) -> Q {
        self.f.floor() * &self.c
    }

    fn ball_bound(&self, ball: &Ball) -> Ext {
        scale_ext(self.f.ball_bound(ball), &self.c)
    }

    fn upper(&self, x: &Point) -> Option<Q> {
        self.f.upper(x).map(|u| u * &self.c)
    }

    fn lower(&self, x: &Point, budget: u32) -> Ext {
        scale_ext(self.f.lower(x, budget), &self.c)
    }
}

fn scale_ext(e: Ext, c: &Q) -> Ext {
    match e {
        Ext::Fin(q) => Ext::Fin(q * c),
        Ext::Inf => Ext::Inf,
    }
}

/// An lsc function on an interval, linear (or `+inf`) between knots and with
/// its own value at each knot. Ball infima are exact.
#[derive(Clone, Debug)]
pub struct PiecewiseLsc {
    space: Space,
    knots: Vec<Q>,
    knot_values: Vec<Ext>,
    cells: Vec<Option<(Q, Q)>>,
}

impl PiecewiseLsc {
    /// `cells[i]` gives the limits at `knots[i]` and `knots[i+1]` of the
    /// linear piece on the open cell between them; `None` is `+inf`.
    pub fn new(
        space: Space,
        knots: Vec<Q>,
        knot_values: Vec<Ext>,
        cells: Vec<Option<(Q, Q)>>,
    ) -> Result<Self, CodeError> {
        let Some((a, b)) = space.base().interval() else {
            return Err(CodeError::Unsupported(format!(
                "piecewise lsc codes need an interval, not {}",
                space.name()
            )));
        };
        let n = knots.len();
        if n < 2 || knots[0] != a || knots[n - 1] != b {
            return Err(CodeError::Parameter(format!(
                "knots must run from {} to {}",
                fmt_q(&a),
                fmt_q(&b)
            )));
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CodeError::Parameter("knots must be strictly increasing".into()));
        }
        if knot_values.len() != n || cells.len() != n - 1 {
            return Err(CodeError::Parameter("need one value per knot and one piece per cell".into()));
        }
        let neg = |q: &Q| q.is_negative();
        if knot_values.iter().any(|v| v.fin().is_some_and(neg))
            || cells.iter().flatten().any(|(u, v)| neg(u) || neg(v))
        {
            return Err(CodeError::Parameter("potential values must be nonnegative".into()));
        }
        for i in 0..n {
            let left = if i > 0 { Some(cell_end(&cells[i - 1], false)) } else { None };
            let right = if i + 1 < n { Some(cell_end(&cells[i], true)) } else { None };
            for lim in [left, right].into_iter().flatten() {
                if knot_values[i] > lim {
                    return Err(CodeError::Parameter(format!(
                        "value at knot {} exceeds an adjacent limit, so the function is not lsc",
                        fmt_q(&knots[i])
                    )));
                }
            }
        }
        Ok(PiecewiseLsc { space, knots, knot_values, cells })
    }

    pub fn value(&self, t: &Q) -> Ext {
        if let Ok(i) = self.knots.binary_search(t) {
            return self.knot_values[i].clone();
        }
        let i = self.knots.partition_point(|s| s < t);
        if i == 0 || i >= self.knots.len() {
            return Ext::Inf;
        }
        match &self.cells[i - 1] {
            None => Ext::Inf,
            Some((v0, v1)) => {
                let (t0, t1) = (&self.knots[i - 1], &self.knots[i]);
                Ext::Fin(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
            }
        }
    }

    fn cell_value(&self, i: usize, t: &Q) -> Q {
        let (v0, v1) = self.cells[i].as_ref().expect("finite cell");
        let (t0, t1) = (&self.knots[i], &self.knots[i + 1]);
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    /// Exact infimum over the open interval `(lo, hi)` cut to the space.
    pub fn inf_open(&self, lo: &Q, hi: &Q) -> Ext {
        let mut best = Ext::Inf;
        for (t, v) in self.knots.iter().zip(&self.knot_values) {
            if lo < t && t < hi {
                best = best.min(v.clone());
            }
        }
        for i in 0..self.cells.len() {
            if self.cells[i].is_none() {
                continue;
            }
            let s = max_q(&self.knots[i], lo);
            let e = min_q(&self.knots[i + 1], hi);
            if s < e {
                let m = min_q(&self.cell_value(i, &s), &self.cell_value(i, &e));
                best = best.min(Ext::Fin(m));
            }
        }
        best
    }
}

fn cell_end(cell: &Option<(Q, Q)>, start: bool) -> Ext {
    match cell {
        None => Ext::Inf,
        Some((u, v)) => Ext::Fin(if start { u.clone() } else { v.clone() }),
    }
}

impl LscCode for PiecewiseLsc {
    fn space(&self) -> &Space {
        &self.space
    }

    fn ball_bound(&self, ball: &Ball) -> Ext {
        self.ball_inf(ball).lo
    }

    fn upper(&self, x: &Point) -> Option<Q> {
        x.as_real().and_then(|t| self.value(t).fin().cloned())
    }

    fn lower(&self, x: &Point, _budget: u32) -> Ext {
        x.as_real().map_or(Ext::Fin(zero()), |t| self.value(t))
    }
}

impl HonestLscCode for PiecewiseLsc {
    fn ball_inf(&self, ball: &Ball) -> ExtBracket {
        let Some(c) = ball.center.as_real() else { return ExtBracket::exact(Ext::Fin(zero())) };
        let v = self.inf_open(&(c - &ball.radius), &(c + &ball.radius));
        ExtBracket::exact(v)
    }
}

/// Honest answers for any code on a compact space, by covering the queried
/// ball with balls of radius about `2^-resolution`.
pub struct PromotedHonest {
    code: LscRef,
    resolution: u32,
    bounds: NetBounds,
}

pub fn honest_promote_compact(code: LscRef, resolution: u32) -> Result<PromotedHonest, CodeError> {
    if !code.space().is_compact() {
        return Err(CodeError::Unsupported(format!(
            "honest promotion needs a compact space, not {}",
            code.space().name()
        )));
    }
    Ok(PromotedHonest { code, resolution, bounds: NetBounds::default() })
}

impl LscCode for PromotedHonest {
    fn space(&self) -> &Space {
        self.code.space()
    }

    fn floor(&self) -> Q {
        self.code.floor()
    }

    fn ball_bound(&self, ball: &Ball) -> Ext {
        self.ball_inf(ball).lo
    }

    fn upper(&self, x: &Point) -> Option<Q> {
        self.code.upper(x)
    }

    fn lower(&self, x: &Point, budget: u32) -> Ext {
        self.code.lower(x, budget)
    }
}

impl HonestLscCode for PromotedHonest {
    fn ball_inf(&self, ball: &Ball) -> ExtBracket {
        let space = self.code.space();
        let Ok((centers, r)) = space.cover(self.resolution, Some(ball), &self.bounds) else {
            return ExtBracket { lo: Ext::Fin(self.code.floor()), hi: Ext::Inf };
        };
        let mut lo = Ext::Inf;
        for c in &centers {
            lo = lo.min(self.code.ball_bound(&Ball::new(c.clone(), r.clone())));
        }
        let mut hi = Ext::Inf;
        let mut probes = vec![ball.center.clone()];
        probes.extend(centers);
        for y in probes {
            if space.contains(&y) && space.in_ball(ball, &y).unwrap_or(false) {
                if let Some(u) = self.code.upper(&y) {
                    hi = hi.min(Ext::Fin(u));
                }
            }
        }
        let lo = lo.max(Ext::Fin(self.code.floor())).min(hi.clone());
        ExtBracket { lo, hi }
    }
}

/// The lsc function whose epigraph is the given set.
pub struct EpigraphLsc {
    set: Arc<dyn EpigraphSet>,
    floor: Q,
}

/// Checks upward closure on sampled pairs before building the code; `floor`
/// is the caller-asserted global lower bound.
pub fn epigraph_to_lsc(set: Arc<dyn EpigraphSet>, floor: Q) -> Result<EpigraphLsc, CodeError> {
    let space = set.space().clone();
    let xs: Vec<Point> = match space.net(4, None, &NetBounds::baire(3, 4)) {
        Ok(n) => n,
        Err(_) => (0..32).map(|i| space.dense_point(i)).collect(),
    };
    let ys: Vec<Q> = (-8..=40).map(|j| &floor + crate::rational::frac(j, 4)).collect();
    for x in &xs {
        for (i, y) in ys.iter().enumerate() {
            if !set.contains(x, y) {
                continue;
            }
            if y < &floor {
                return Err(CodeError::Parameter(format!(
                    "({x}, {}) lies in the set below the asserted lower bound {}",
                    fmt_q(y),
                    fmt_q(&floor)
                )));
            }
            if let Some(z) = ys[i + 1..].iter().find(|z| !set.contains(x, z)) {
                return Err(CodeError::NotUpwardClosed(format!(
                    "({x}, {}) is in the set but ({x}, {}) is not",
                    fmt_q(y),
                    fmt_q(z)
                )));
            }
        }
    }
    Ok(EpigraphLsc { set, floor })
}

impl LscCode for EpigraphLsc {
    fn space(&self) -> &Space {
        self.set.space()
    }

    fn floor(&self) -> Q {
        self.floor.clone()
    }

    fn ball_bound(&self, ball: &Ball) -> Ext {
        let base = Ext::Fin(self.floor.clone());
        match self.set.excluded_height(ball) {
            Some(h) => h.max(base),
            None => base,
        }
    }

    fn upper(&self, x: &Point) -> Option<Q> {
        self.set.lowest(x)
    }
}
