use std::sync::Arc;

use num_traits::Signed;

use super::*;
use crate::rational::{least_exp_below, max_q, min_q, Ext};
use num_traits::Zero;

/// The constant function `c`.
pub struct ConstantCode {
    pub space: Space,
    pub value: Q,
}

impl ContinuousCode for ConstantCode {
    fn domain(&self) -> &Space {
        &self.space
    }

    fn ball_items(&self, _ball: &Ball) -> Vec<Bracket> {
        vec![Bracket::exact(self.value.clone())]
    }

    fn exact_value(&self, _x: &Point) -> Option<Q> {
        Some(self.value.clone())
    }

    fn modulus(&self) -> Option<Modulus> {
        Some(Modulus::identity())
    }
}

/// A piecewise-linear function on an interval space, given by its knots.
///
/// The item for a ball is the exact range over the ball's closure.
#[derive(Clone, Debug)]
pub struct PiecewiseLinearCode {
    space: Space,
    knots: Vec<(Q, Q)>,
}

impl PiecewiseLinearCode {
    pub fn new(space: Space, knots: Vec<(Q, Q)>) -> Result<Self, CodeError> {
        let Some((a, b)) = space.base().interval() else {
            return Err(CodeError::Unsupported(format!(
                "piecewise-linear codes need an interval, not {}",
                space.name()
            )));
        };
        if knots.len() < 2 || knots[0].0 != a || knots[knots.len() - 1].0 != b {
            return Err(CodeError::Parameter(format!(
                "knots must run from {} to {}",
                fmt_q(&a),
                fmt_q(&b)
            )));
        }
        if knots.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(CodeError::Parameter("knots must be strictly increasing".into()));
        }
        Ok(PiecewiseLinearCode { space, knots })
    }

    pub fn knots(&self) -> &[(Q, Q)] {
        &self.knots
    }

    pub fn eval(&self, t: &Q) -> Q {
        let k = &self.knots;
        if t <= &k[0].0 {
            return k[0].1.clone();
        }
        let i = k.partition_point(|(s, _)| s < t);
        if i >= k.len() {
            return k[k.len() - 1].1.clone();
        }
        if &k[i].0 == t {
            return k[i].1.clone();
        }
        let (t0, v0) = &k[i - 1];
        let (t1, v1) = &k[i];
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    /// Exact `[min, max]` over `[lo, hi]`.
    pub fn range(&self, lo: &Q, hi: &Q) -> Bracket {
        let mut mn = self.eval(lo);
        let mut mx = mn.clone();
        let e = self.eval(hi);
        mn = min_q(&mn, &e);
        mx = max_q(&mx, &e);
        for (t, v) in &self.knots {
            if lo < t && t < hi {
                mn = min_q(&mn, v);
                mx = max_q(&mx, v);
            }
        }
        Bracket::new(mn, mx)
    }

    pub fn lipschitz(&self) -> Q {
        let mut best = zero();
        for w in self.knots.windows(2) {
            let slope = ((&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0)).abs();
            best = max_q(&best, &slope);
        }
        best
    }
}

impl ContinuousCode for PiecewiseLinearCode {
    fn domain(&self) -> &Space {
        &self.space
    }

    fn ball_items(&self, ball: &Ball) -> Vec<Bracket> {
        match interval_hull(&self.space, ball) {
            Some((lo, hi)) => vec![self.range(&lo, &hi)],
            None => vec![],
        }
    }

    fn exact_value(&self, x: &Point) -> Option<Q> {
        x.as_real().map(|t| self.eval(t))
    }

    fn modulus(&self) -> Option<Modulus> {
        Some(Modulus::lipschitz(&self.lipschitz()))
    }
}

/// A code built from samples at dense points and a modulus of uniform continuity.
pub struct SampledCode {
    space: Space,
    samples: Vec<(Point, Q)>,
    modulus: Modulus,
}

/// Largest stage tried when matching a ball to a sample.
const SAMPLE_DEPTH: u32 = 96;

pub fn cont_from_samples(
    samples: Vec<(Point, Q)>,
    modulus: Modulus,
    space: Space,
) -> Result<SampledCode, CodeError> {
    if !modulus.is_monotone() {
        return Err(CodeError::Parameter("modulus table must be nondecreasing".into()));
    }
    for (p, _) in &samples {
        if !space.contains(p) {
            return Err(SpaceError::TypeMismatch(format!("{p} is not in {}", space.name())).into());
        }
    }
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            let diff = (&samples[i].1 - &samples[j].1).abs();
            if diff.is_zero() {
                continue;
            }
            let n = least_exp_below(&diff);
            let d = space.dist(&samples[i].0, &samples[j].0)?;
            if below_exp(&d).is_some_and(|m| modulus.at(n) <= m) {
                return Err(CodeError::ModulusViolation {
                    i,
                    j,
                    n,
                    detail: format!(
                        "d({}, {}) = {} < 2^-{} but the values {} and {} differ by {}",
                        samples[i].0,
                        samples[j].0,
                        fmt_q(&d),
                        modulus.at(n),
                        fmt_q(&samples[i].1),
                        fmt_q(&samples[j].1),
                        fmt_q(&diff)
                    ),
                });
            }
        }
    }
    Ok(SampledCode { space, samples, modulus })
}

impl SampledCode {
    pub fn samples(&self) -> &[(Point, Q)] {
        &self.samples
    }
}

impl ContinuousCode for SampledCode {
    fn domain(&self) -> &Space {
        &self.space
    }

    fn ball_items(&self, ball: &Ball) -> Vec<Bracket> {
        let mut out = Vec::new();
        for (a, y) in &self.samples {
            let Ok(d) = self.space.dist(&ball.center, a) else { continue };
            let Some(m) = below_exp(&(d + &ball.radius)) else { continue };
            let mut best = None;
            for n in 0..SAMPLE_DEPTH {
                if self.modulus.at(n) <= m {
                    best = Some(n);
                } else {
                    break;
                }
            }
            if let Some(n) = best {
                let e = pow2(-(n as i64));
                out.push(Bracket::new(y - &e, y + &e));
            }
        }
        out
    }

    fn exact_value(&self, x: &Point) -> Option<Q> {
        self.samples.iter().find(|(a, _)| a == x).map(|(_, y)| y.clone())
    }

    fn modulus(&self) -> Option<Modulus> {
        Some(self.modulus.clone())
    }
}

/// A piece of a patched function: the code on the union of its region balls.
#[derive(Clone)]
pub struct Piece {
    pub regions: Vec<Ball>,
    pub code: ContRef,
}

pub struct PatchCode {
    space: Space,
    pieces: Vec<Piece>,
}

/// Glues codes defined on open regions, checking agreement on the shared
/// points of the resolution-`k` nets of every pair of overlapping region balls.
pub fn patch(pieces: Vec<Piece>, k: u32) -> Result<PatchCode, CodeError> {
    let Some(first) = pieces.first() else {
        return Err(CodeError::Parameter("patch needs at least one piece".into()));
    };
    let space = first.code.domain().clone();
    for p in &pieces {
        require_same_space(&space, p.code.domain())?;
    }
    let bounds = crate::space::NetBounds::default();
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            for ri in &pieces[i].regions {
                for rj in &pieces[j].regions {
                    if space.dist(&ri.center, &rj.center)? >= &ri.radius + &rj.radius {
                        continue;
                    }
                    let net = match space.net(k, Some(ri), &bounds) {
                        Ok(n) => n,
                        Err(SpaceError::Unsupported(_)) => vec![ri.center.clone(), rj.center.clone()],
                        Err(e) => return Err(e.into()),
                    };
                    for x in net {
                        if !(space.in_ball(ri, &x)? && space.in_ball(rj, &x)?) {
                            continue;
                        }
                        let a = eval_cont(pieces[i].code.as_ref(), &x, k + 8);
                        let b = eval_cont(pieces[j].code.as_ref(), &x, k + 8);
                        let agree = match (a, b) {
                            (Ok(a), Ok(b)) => a.overlaps(&b),
                            _ => true,
                        };
                        if !agree {
                            return Err(CodeError::PatchConflict { i, j, point: x });
                        }
                    }
                }
            }
        }
    }
    Ok(PatchCode { space, pieces })
}

impl PatchCode {
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    fn owner(&self, x: &Point) -> Option<&Piece> {
        self.pieces
            .iter()
            .find(|p| p.regions.iter().any(|r| self.space.in_ball(r, x).unwrap_or(false)))
    }
}

impl ContinuousCode for PatchCode {
    fn domain(&self) -> &Space {
        &self.space
    }

    fn ball_items(&self, ball: &Ball) -> Vec<Bracket> {
        let mut out = Vec::new();
        for p in &self.pieces {
            let inside = p
                .regions
                .iter()
                .any(|r| self.space.strictly_inside(ball, r).unwrap_or(false));
            if inside {
                out.extend(p.code.ball_items(ball));
            }
        }
        out
    }

    fn exact_value(&self, x: &Point) -> Option<Q> {
        self.owner(x).and_then(|p| p.code.exact_value(x))
    }
}

/// `alpha * d(x, y)` on a product `X × X`.
pub struct DistanceKernel {
    space: Space,
    factor: Space,
    alpha: Q,
}

impl DistanceKernel {
    pub fn new(factor: Space, alpha: Q) -> Result<Self, CodeError> {
        require_positive("alpha", &alpha)?;
        let space = Space::product(vec![factor.clone(), factor.clone()])?;
        Ok(DistanceKernel { space, factor, alpha })
    }

    fn parts<'a>(&self, p: &'a Point) -> Option<(&'a Point, &'a Point)> {
        match p {
            Point::Tuple(v) if v.len() == 2 => Some((&v[0], &v[1])),
            _ => None,
        }
    }
}

impl ContinuousCode for DistanceKernel {
    fn domain(&self) -> &Space {
        &self.space
    }

    fn ball_items(&self, ball: &Ball) -> Vec<Bracket> {
        let Some((a, b)) = self.parts(&ball.center) else { return vec![] };
        let Ok(d) = self.factor.dist(a, b) else { return vec![] };
        let r2 = &ball.radius * crate::rational::int(2);
        let lo = max_q(&zero(), &(&d - &r2));
        vec![Bracket::new(&self.alpha * lo, &self.alpha * (d + r2))]
    }

    fn exact_value(&self, x: &Point) -> Option<Q> {
        let (a, b) = self.parts(x)?;
        Some(&self.alpha * self.factor.dist(a, b).ok()?)
    }

    fn modulus(&self) -> Option<Modulus> {
        Some(Modulus::lipschitz(&(&self.alpha * crate::rational::int(2))))
    }
}

/// Code for an upper semi-continuous function: infimum of the upper bounds
/// enumerated for a ball.
pub trait UscCode: Send + Sync {
    fn space(&self) -> &Space;
    fn ball_upper(&self, ball: &Ball) -> Ext;
}

/// The usc view of a continuous code.
pub struct ContToUsc(pub ContRef);

impl UscCode for ContToUsc {
    fn space(&self) -> &Space {
        self.0.domain()
    }

    fn ball_upper(&self, ball: &Ball) -> Ext {
        let outer = Ball::new(ball.center.clone(), &ball.radius * crate::rational::int(2));
        self.0
            .ball_items(&outer)
            .into_iter()
            .map(|b| Ext::Fin(b.hi))
            .min()
            .unwrap_or(Ext::Inf)
    }
}

/// A continuous code from an lsc code and a usc code for the same function.
pub struct LscUscPair {
    lsc: LscRef,
    usc: Arc<dyn UscCode>,
}

pub fn cont_from_lsc_usc(lsc: LscRef, usc: Arc<dyn UscCode>) -> Result<LscUscPair, CodeError> {
    require_same_space(lsc.space(), usc.space())?;
    Ok(LscUscPair { lsc, usc })
}

impl ContinuousCode for LscUscPair {
    fn domain(&self) -> &Space {
        self.lsc.space()
    }

    fn ball_items(&self, ball: &Ball) -> Vec<Bracket> {
        let outer = Ball::new(ball.center.clone(), &ball.radius * crate::rational::int(2));
        match (self.lsc.ball_bound(&outer), self.usc.ball_upper(&outer)) {
            (Ext::Fin(lo), Ext::Fin(hi)) if lo <= hi => vec![Bracket::new(lo, hi)],
            _ => vec![],
        }
    }
}
