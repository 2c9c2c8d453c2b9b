use std::sync::Arc;

use num_traits::Zero;

use super::{is_flat_on_first_half, pseudofib_iota, pseudofib_pi, sharp, Embedding, GadgetError};
use crate::codes::{ContinuousCode, LscRef, Modulus};
use crate::pl::PlFunction;
use crate::rational::{abs, frac, int, max_q, min_q, one, zero, Bracket, Q};
use crate::space::{Ball, Point, Space};

/// `f̃(z) = π(z) + min(1, D(z))` on C[0,1], where `D` is the distance to the
/// image under `ι` of the epigraph of `f` over a finite set of source points.
pub struct Lift {
    f: LscRef,
    embed: Arc<dyn Embedding>,
    a: Q,
    b: Option<Q>,
    xs: Vec<(Point, PlFunction, Q)>,
    space: Space,
}

pub fn lvp_to_fvp_lift(
    f: LscRef,
    embed: Arc<dyn Embedding>,
    a: Q,
    b: Option<Q>,
    sources: Vec<Point>,
) -> Result<Lift, GadgetError> {
    if b.as_ref().is_some_and(|b| b <= &a) {
        return Err(GadgetError::Parameter("the fibre range needs a < b".into()));
    }
    let mut xs = Vec::new();
    for x in sources {
        let Some(v) = f.upper(&x) else { continue };
        if b.as_ref().is_some_and(|b| &v > b) {
            continue;
        }
        let fx = embed.embed(&x)?;
        xs.push((x, fx, v));
    }
    if xs.is_empty() {
        return Err(GadgetError::Parameter("the potential has no finite value on the source points".into()));
    }
    Ok(Lift { f, embed, a, b, xs, space: Space::C01 })
}

/// `max_j |α_j - β_j y|` over the knots of the first half.
struct FirstHalf {
    rows: Vec<(Q, Q)>,
}

impl FirstHalf {
    fn new(z: &PlFunction, c: &Q) -> FirstHalf {
        let half = frac(1, 2);
        let mut ts = vec![zero(), half.clone()];
        ts.extend(z.breakpoints().iter().map(|p| p.0.clone()).filter(|t| t > &zero() && t < &half));
        let rows = ts
            .into_iter()
            .map(|t| {
                let two_t = &t * int(2);
                (z.eval(&t) - &two_t * c, one() - two_t)
            })
            .collect();
        FirstHalf { rows }
    }

    fn at(&self, y: &Q) -> Q {
        self.rows.iter().map(|(a, b)| abs(&(a - b * y))).max().unwrap_or_else(zero)
    }

    /// Exact minimum over `[lo, hi]`; the function is convex and piecewise linear,
    /// so it is attained at an end or where two rows cross.
    fn min_on(&self, lo: &Q, hi: Option<&Q>) -> (Q, Q) {
        let mut cands = vec![lo.clone()];
        if let Some(h) = hi {
            cands.push(h.clone());
        }
        let n = self.rows.len();
        for j in 0..n {
            let (aj, bj) = &self.rows[j];
            if !bj.is_zero() {
                cands.push(aj / bj);
            }
            for k in j + 1..n {
                let (ak, bk) = &self.rows[k];
                if bj != bk {
                    cands.push((aj - ak) / (bj - bk));
                }
                let s = bj + bk;
                if !s.is_zero() {
                    cands.push((aj + ak) / s);
                }
            }
        }
        cands
            .into_iter()
            .filter(|y| y >= lo && hi.is_none_or(|h| y <= h))
            .map(|y| (self.at(&y), y))
            .min()
            .expect("lo is a candidate")
    }
}

impl Lift {
    pub fn iota(&self, x: &Point, y: &Q) -> Result<PlFunction, GadgetError> {
        pseudofib_iota(&self.embed.embed(x)?, y, &self.a, self.b.as_ref())
    }

    pub fn pi(&self, z: &PlFunction) -> Q {
        pseudofib_pi(z, &self.a, self.b.as_ref())
    }

    fn per_source(&self, z: &PlFunction) -> Vec<(Q, Q)> {
        let zs = sharp(z);
        self.xs
            .iter()
            .map(|(_, fx, v)| {
                let a = zs.sup_dist(fx);
                let half = FirstHalf::new(z, &fx.eval(&zero()));
                let lo = max_q(&self.a, v);
                let (best, y) = half.min_on(&lo, self.b.as_ref());
                (max_q(&a, &best), y)
            })
            .collect()
    }

    /// Distance from `z` to the lifted epigraph over the source points.
    pub fn dist_to_graph(&self, z: &PlFunction) -> Q {
        self.per_source(z).into_iter().map(|p| p.0).min().expect("nonempty sources")
    }

    pub fn value(&self, z: &PlFunction) -> Q {
        self.pi(z) + min_q(&one(), &self.dist_to_graph(z))
    }

    /// The nearest lifted graph point `(x, y)`, first among ties.
    pub fn project(&self, z: &PlFunction) -> (Point, Q) {
        let per = self.per_source(z);
        let best = per.iter().map(|p| &p.0).min().expect("nonempty sources").clone();
        let i = per.iter().position(|p| p.0 == best).unwrap();
        (self.xs[i].0.clone(), per[i].1.clone())
    }

    /// Membership in the lifted graph via the closed conditions: linear on
    /// `[0, 1/2]`, `h(0)` in range, `h♯` embedded and `f(x) <= h(0)`.
    pub fn in_graph(&self, z: &PlFunction) -> bool {
        let y = z.eval(&zero());
        if !is_flat_on_first_half(z) || y < self.a || self.b.as_ref().is_some_and(|b| &y > b) {
            return false;
        }
        match self.embed.decode(&sharp(z)) {
            Some(x) => self.f.upper(&x).is_some_and(|v| v <= y),
            None => false,
        }
    }

    pub fn sources(&self) -> impl Iterator<Item = &Point> {
        self.xs.iter().map(|p| &p.0)
    }
}

impl ContinuousCode for Lift {
    fn domain(&self) -> &Space {
        &self.space
    }

    fn ball_items(&self, ball: &Ball) -> Vec<Bracket> {
        let Some(z) = ball.center.as_pl() else { return vec![] };
        let v = self.value(z);
        let w = &ball.radius * int(2);
        vec![Bracket::new(&v - &w, v + w)]
    }

    fn exact_value(&self, x: &Point) -> Option<Q> {
        x.as_pl().map(|z| self.value(z))
    }

    fn modulus(&self) -> Option<Modulus> {
        Some(Modulus::lipschitz(&int(2)))
    }
}
