//! Coded complete separable metric spaces, their points, rational balls and nets.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::pl::{PlError, PlFunction};
use crate::rational::{fmt_q, frac, int, max_q, min_q, parse_q, pow2, Q, Rat};
use crate::util::{unpair, unpair_n, words};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpaceError {
    #[error("malformed space: {0}")]
    Malformed(String),
    #[error("point does not match space: {0}")]
    TypeMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Pl(#[from] PlError),
}

/// A finitely represented point.
///
/// Sequences are stored without trailing zeros; the implicit tail is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "PointRepr", try_from = "PointRepr")]
pub enum Point {
    Real(Q),
    Seq(Vec<u64>),
    Pl(PlFunction),
    Tuple(Vec<Point>),
}

impl Point {
    pub fn real(q: Q) -> Point {
        Point::Real(q)
    }

    pub fn seq(mut v: Vec<u64>) -> Point {
        while v.last() == Some(&0) {
            v.pop();
        }
        Point::Seq(v)
    }

    pub fn as_real(&self) -> Option<&Q> {
        match self {
            Point::Real(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_seq(&self) -> Option<&[u64]> {
        match self {
            Point::Seq(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_pl(&self) -> Option<&PlFunction> {
        match self {
            Point::Pl(f) => Some(f),
            _ => None,
        }
    }

    /// Entry `i` of a sequence point, reading the implicit zero tail.
    pub fn at(&self, i: usize) -> u64 {
        match self {
            Point::Seq(v) => v.get(i).copied().unwrap_or(0),
            _ => 0,
        }
    }

    /// The first `n` entries of a sequence point, zero padded.
    pub fn prefix(&self, n: usize) -> Vec<u64> {
        (0..n).map(|i| self.at(i)).collect()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Real(q) => f.write_str(&fmt_q(q)),
            Point::Seq(v) => {
                let parts: Vec<String> = v.iter().map(|e| e.to_string()).collect();
                write!(f, "[{}]", parts.join(","))
            }
            Point::Pl(p) => write!(f, "{p}"),
            Point::Tuple(ps) => {
                let parts: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
                write!(f, "({})", parts.join("; "))
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PointRepr {
    Real(Rat),
    Seq(Vec<u64>),
    Pl(Vec<(Rat, Rat)>),
    Tuple(Vec<PointRepr>),
}

impl From<Point> for PointRepr {
    fn from(p: Point) -> Self {
        match p {
            Point::Real(q) => PointRepr::Real(Rat(q)),
            Point::Seq(v) => PointRepr::Seq(v),
            Point::Pl(f) => PointRepr::Pl(
                f.breakpoints().iter().map(|(t, v)| (Rat(t.clone()), Rat(v.clone()))).collect(),
            ),
            Point::Tuple(ps) => PointRepr::Tuple(ps.into_iter().map(Into::into).collect()),
        }
    }
}

impl TryFrom<PointRepr> for Point {
    type Error = SpaceError;
    fn try_from(r: PointRepr) -> Result<Self, SpaceError> {
        Ok(match r {
            PointRepr::Real(q) => Point::Real(q.0),
            PointRepr::Seq(v) => Point::seq(v),
            PointRepr::Pl(pts) => {
                Point::Pl(PlFunction::new(pts.into_iter().map(|(t, v)| (t.0, v.0)).collect())?)
            }
            PointRepr::Tuple(ps) => {
                Point::Tuple(ps.into_iter().map(Point::try_from).collect::<Result<_, _>>()?)
            }
        })
    }
}

/// Rational open ball `B(center, radius)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    #[serde(with = "crate::rational::qser")]
    pub radius: Q,
}

impl Ball {
    pub fn new(center: Point, radius: Q) -> Ball {
        assert!(radius.is_positive(), "ball radius must be positive");
        Ball { center, radius }
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B({}, {})", self.center, fmt_q(&self.radius))
    }
}

/// Caller-supplied bounds for nets on the non-compact kinds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NetBounds {
    /// Baire entries are drawn from `0..branching`.
    pub branching: Option<u64>,
    /// Baire net points are fixed on at most `depth` entries.
    pub depth: Option<usize>,
    /// C[0,1] grid: all piecewise-linear functions with these knots and values.
    pub c01: Option<C01Grid>,
}

impl NetBounds {
    pub fn baire(branching: u64, depth: usize) -> NetBounds {
        NetBounds { branching: Some(branching), depth: Some(depth), c01: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct C01Grid {
    pub knots: Vec<Q>,
    pub values: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "SpaceRepr", try_from = "SpaceRepr")]
pub enum Space {
    UnitInterval,
    ClosedInterval { a: Q, b: Q },
    Cantor,
    Baire,
    Product(Vec<Space>),
    C01,
    ClosedBall { parent: Box<Space>, center: Point, radius: Q },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
enum SpaceRepr {
    UnitInterval,
    ClosedInterval { a: Rat, b: Rat },
    Cantor,
    Baire,
    Product(Vec<SpaceRepr>),
    C01,
    ClosedBall { parent: Box<SpaceRepr>, center: Point, radius: Rat },
}

impl From<Space> for SpaceRepr {
    fn from(s: Space) -> Self {
        match s {
            Space::UnitInterval => SpaceRepr::UnitInterval,
            Space::ClosedInterval { a, b } => SpaceRepr::ClosedInterval { a: Rat(a), b: Rat(b) },
            Space::Cantor => SpaceRepr::Cantor,
            Space::Baire => SpaceRepr::Baire,
            Space::Product(v) => SpaceRepr::Product(v.into_iter().map(Into::into).collect()),
            Space::C01 => SpaceRepr::C01,
            Space::ClosedBall { parent, center, radius } => SpaceRepr::ClosedBall {
                parent: Box::new((*parent).into()),
                center,
                radius: Rat(radius),
            },
        }
    }
}

impl TryFrom<SpaceRepr> for Space {
    type Error = SpaceError;
    fn try_from(r: SpaceRepr) -> Result<Self, SpaceError> {
        match r {
            SpaceRepr::UnitInterval => Ok(Space::UnitInterval),
            SpaceRepr::ClosedInterval { a, b } => Space::closed_interval(a.0, b.0),
            SpaceRepr::Cantor => Ok(Space::Cantor),
            SpaceRepr::Baire => Ok(Space::Baire),
            SpaceRepr::Product(v) => {
                Space::product(v.into_iter().map(Space::try_from).collect::<Result<_, _>>()?)
            }
            SpaceRepr::C01 => Ok(Space::C01),
            SpaceRepr::ClosedBall { parent, center, radius } => {
                Space::closed_ball(Space::try_from(*parent)?, center, radius.0)
            }
        }
    }
}

/// Closure of a ball intersected with a space, in a form nets can be built from.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Region {
    Interval(Q, Q),
    Prefix(Vec<u64>),
    Product(Vec<Region>),
    Whole,
    Empty,
}

impl Region {
    fn intersect(&self, other: &Region) -> Region {
        match (self, other) {
            (Region::Empty, _) | (_, Region::Empty) => Region::Empty,
            (Region::Whole, r) | (r, Region::Whole) => r.clone(),
            (Region::Interval(a, b), Region::Interval(c, d)) => {
                let lo = max_q(a, c);
                let hi = min_q(b, d);
                if lo <= hi { Region::Interval(lo, hi) } else { Region::Empty }
            }
            (Region::Prefix(p), Region::Prefix(q)) => {
                let (short, long) = if p.len() <= q.len() { (p, q) } else { (q, p) };
                if long[..short.len()] == short[..] {
                    Region::Prefix(long.clone())
                } else {
                    Region::Empty
                }
            }
            (Region::Product(a), Region::Product(b)) if a.len() == b.len() => {
                let parts: Vec<Region> = a.iter().zip(b).map(|(x, y)| x.intersect(y)).collect();
                if parts.iter().any(|r| *r == Region::Empty) {
                    Region::Empty
                } else {
                    Region::Product(parts)
                }
            }
            _ => Region::Empty,
        }
    }
}

fn mismatch(space: &Space, p: &Point) -> SpaceError {
    SpaceError::TypeMismatch(format!("{p} is not a point of {}", space.name()))
}

impl Space {
    pub fn closed_interval(a: Q, b: Q) -> Result<Space, SpaceError> {
        if a >= b {
            return Err(SpaceError::Malformed(format!(
                "closed-interval needs a < b, got [{}, {}]",
                fmt_q(&a),
                fmt_q(&b)
            )));
        }
        Ok(Space::ClosedInterval { a, b })
    }

    pub fn product(parts: Vec<Space>) -> Result<Space, SpaceError> {
        if parts.is_empty() {
            return Err(SpaceError::Malformed("empty product".into()));
        }
        Ok(Space::Product(parts))
    }

    pub fn closed_ball(parent: Space, center: Point, radius: Q) -> Result<Space, SpaceError> {
        if !radius.is_positive() {
            return Err(SpaceError::Malformed(format!(
                "closed-ball radius must be positive, got {}",
                fmt_q(&radius)
            )));
        }
        if !parent.contains(&center) {
            return Err(mismatch(&parent, &center));
        }
        Ok(Space::ClosedBall { parent: Box::new(parent), center, radius })
    }

    /// Builds a space from a kind name and JSON parameters.
    pub fn make(kind: &str, params: serde_json::Value) -> Result<Space, SpaceError> {
        let v = serde_json::json!({ "kind": kind, "params": params });
        let repr: SpaceRepr =
            serde_json::from_value(v).map_err(|e| SpaceError::Malformed(e.to_string()))?;
        Space::try_from(repr)
    }

    pub fn name(&self) -> String {
        match self {
            Space::UnitInterval => "unit-interval".into(),
            Space::ClosedInterval { a, b } => format!("closed-interval({}, {})", fmt_q(a), fmt_q(b)),
            Space::Cantor => "cantor".into(),
            Space::Baire => "baire".into(),
            Space::Product(v) => {
                let parts: Vec<String> = v.iter().map(|s| s.name()).collect();
                format!("product({})", parts.join(", "))
            }
            Space::C01 => "c01".into(),
            Space::ClosedBall { parent, center, radius } => {
                format!("closed-ball({}, {}, {})", parent.name(), center, fmt_q(radius))
            }
        }
    }

    /// Interval endpoints for the real kinds.
    pub fn interval(&self) -> Option<(Q, Q)> {
        match self {
            Space::UnitInterval => Some((Q::zero(), Q::one())),
            Space::ClosedInterval { a, b } => Some((a.clone(), b.clone())),
            _ => None,
        }
    }

    pub fn is_compact(&self) -> bool {
        match self {
            Space::UnitInterval | Space::ClosedInterval { .. } | Space::Cantor => true,
            Space::Baire | Space::C01 => false,
            Space::Product(v) => v.iter().all(Space::is_compact),
            Space::ClosedBall { parent, .. } => parent.is_compact(),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (Space::UnitInterval | Space::ClosedInterval { .. }, Point::Real(x)) => {
                let (a, b) = self.interval().unwrap();
                &a <= x && x <= &b
            }
            (Space::Cantor, Point::Seq(v)) => v.iter().all(|&e| e <= 1),
            (Space::Baire, Point::Seq(_)) => true,
            (Space::C01, Point::Pl(_)) => true,
            (Space::Product(ss), Point::Tuple(ps)) => {
                ss.len() == ps.len() && ss.iter().zip(ps).all(|(s, p)| s.contains(p))
            }
            (Space::ClosedBall { parent, center, radius }, p) => {
                parent.contains(p) && parent.dist(center, p).map(|d| &d <= radius).unwrap_or(false)
            }
            _ => false,
        }
    }

    /// Exact distance between two points of this space.
    pub fn dist(&self, p: &Point, q: &Point) -> Result<Q, SpaceError> {
        match (self, p, q) {
            (Space::UnitInterval | Space::ClosedInterval { .. }, Point::Real(x), Point::Real(y)) => {
                Ok((x - y).abs())
            }
            (Space::Cantor | Space::Baire, Point::Seq(_), Point::Seq(_)) => {
                let n = p.as_seq().unwrap().len().max(q.as_seq().unwrap().len());
                Ok((0..n)
                    .find(|&i| p.at(i) != q.at(i))
                    .map_or(Q::zero(), |i| pow2(-(i as i64))))
            }
            (Space::C01, Point::Pl(f), Point::Pl(g)) => Ok(f.sup_dist(g)),
            (Space::Product(ss), Point::Tuple(ps), Point::Tuple(qs))
                if ss.len() == ps.len() && ss.len() == qs.len() =>
            {
                let mut best = Q::zero();
                for ((s, a), b) in ss.iter().zip(ps).zip(qs) {
                    best = max_q(&best, &s.dist(a, b)?);
                }
                Ok(best)
            }
            (Space::ClosedBall { parent, .. }, _, _) => parent.dist(p, q),
            _ => Err(SpaceError::TypeMismatch(format!(
                "cannot measure {p} against {q} in {}",
                self.name()
            ))),
        }
    }

    /// Whether `p` lies in the open ball.
    pub fn in_ball(&self, ball: &Ball, p: &Point) -> Result<bool, SpaceError> {
        Ok(self.dist(&ball.center, p)? < ball.radius)
    }

    /// `d(c1, c2) + r1 < r2`, exactly.
    pub fn strictly_inside(&self, b1: &Ball, b2: &Ball) -> Result<bool, SpaceError> {
        Ok(self.dist(&b1.center, &b2.center)? + &b1.radius < b2.radius)
    }

    /// The `i`-th dense point; every index names a point and every dense point is named.
    pub fn dense_point(&self, i: u64) -> Point {
        match self {
            Space::UnitInterval | Space::ClosedInterval { .. } => {
                let (a, b) = self.interval().unwrap();
                Point::Real(&a + (&b - &a) * unit_rational(i))
            }
            Space::Cantor => {
                let mut v = Vec::new();
                let mut n = i;
                while n > 0 {
                    v.push(n & 1);
                    n >>= 1;
                }
                Point::seq(v)
            }
            Space::Baire => {
                if i == 0 {
                    return Point::Seq(vec![]);
                }
                let (len, rest) = unpair(i - 1);
                let mut v = unpair_n(rest, len as usize + 1);
                *v.last_mut().unwrap() += 1;
                Point::seq(v)
            }
            Space::Product(ss) => Point::Tuple(
                unpair_n(i, ss.len()).into_iter().zip(ss).map(|(j, s)| s.dense_point(j)).collect(),
            ),
            Space::C01 => {
                let (segments, rest) = unpair(i);
                let n = segments as usize + 2;
                let pts = unpair_n(rest, n)
                    .into_iter()
                    .enumerate()
                    .map(|(k, code)| (frac(k as i64, n as i64 - 1), signed_rational(code)))
                    .collect();
                Point::Pl(PlFunction::new(pts).expect("equally spaced knots"))
            }
            Space::ClosedBall { parent, .. } => {
                let mut seen = 0u64;
                let mut j = 0u64;
                loop {
                    let p = parent.dense_point(j);
                    if self.contains(&p) {
                        if seen == i {
                            return p;
                        }
                        seen += 1;
                    }
                    j += 1;
                }
            }
        }
    }

    fn whole_region(&self) -> Region {
        match self {
            Space::UnitInterval | Space::ClosedInterval { .. } => {
                let (a, b) = self.interval().unwrap();
                Region::Interval(a, b)
            }
            Space::Cantor | Space::Baire => Region::Prefix(vec![]),
            Space::Product(ss) => Region::Product(ss.iter().map(Space::whole_region).collect()),
            Space::C01 => Region::Whole,
            Space::ClosedBall { parent, center, radius } => parent
                .ball_region(center, radius, true)
                .intersect(&parent.whole_region()),
        }
    }

    /// Closure of the ball (closed ball if `closed`) as a region, not yet cut to the space.
    fn ball_region(&self, center: &Point, r: &Q, closed: bool) -> Region {
        match (self, center) {
            (Space::UnitInterval | Space::ClosedInterval { .. }, Point::Real(c)) => {
                Region::Interval(c - r, c + r)
            }
            (Space::Cantor | Space::Baire, Point::Seq(_)) => {
                let mut m = 0usize;
                while !(if closed { pow2(-(m as i64)) <= *r } else { pow2(-(m as i64)) < *r }) {
                    m += 1;
                }
                Region::Prefix(center.prefix(m))
            }
            (Space::Product(ss), Point::Tuple(cs)) => Region::Product(
                ss.iter().zip(cs).map(|(s, c)| s.ball_region(c, r, closed)).collect(),
            ),
            (Space::ClosedBall { parent, .. }, _) => parent.ball_region(center, r, closed),
            _ => Region::Whole,
        }
    }

    fn region_for(&self, region: Option<&Ball>) -> Result<Region, SpaceError> {
        let whole = self.whole_region();
        match region {
            None => Ok(whole),
            Some(b) => {
                if !self.base().contains(&b.center) {
                    return Err(mismatch(self, &b.center));
                }
                Ok(whole.intersect(&self.ball_region(&b.center, &b.radius, false)))
            }
        }
    }

    /// The space with closed-ball wrappers removed.
    pub fn base(&self) -> &Space {
        match self {
            Space::ClosedBall { parent, .. } => parent.base(),
            s => s,
        }
    }

    /// A finite `2^-k`-net of the space (or of the closure of `region` within it),
    /// in lexicographic order.
    pub fn net(
        &self,
        k: u32,
        region: Option<&Ball>,
        bounds: &NetBounds,
    ) -> Result<Vec<Point>, SpaceError> {
        let r = self.region_for(region)?;
        net_of(self.base(), &r, k, bounds)
    }

    /// Open balls of radius at most `2^-k` covering the space (or region);
    /// returns the centers and the common radius.
    pub fn cover(
        &self,
        k: u32,
        region: Option<&Ball>,
        bounds: &NetBounds,
    ) -> Result<(Vec<Point>, Q), SpaceError> {
        let centers = self.net(k + 1, region, bounds)?;
        Ok((centers, cover_radius(self.base(), k)))
    }

    /// Parses a point literal: a JSON point, a rational, a sequence `[1,0,3]`,
    /// or a tuple `(a; b)`.
    pub fn parse_point(&self, s: &str) -> Result<Point, SpaceError> {
        let s = s.trim();
        let p = if s.starts_with('{') {
            serde_json::from_str::<Point>(s).map_err(|e| SpaceError::Malformed(e.to_string()))?
        } else {
            match self.base() {
                Space::UnitInterval | Space::ClosedInterval { .. } => {
                    Point::Real(parse_q(s).map_err(SpaceError::Malformed)?)
                }
                Space::Cantor | Space::Baire => {
                    let inner = s.trim_start_matches('[').trim_end_matches(']');
                    let v = inner
                        .split(',')
                        .map(str::trim)
                        .filter(|t| !t.is_empty())
                        .map(|t| t.parse::<u64>().map_err(|e| SpaceError::Malformed(e.to_string())))
                        .collect::<Result<Vec<_>, _>>()?;
                    Point::seq(v)
                }
                Space::Product(ss) => {
                    let inner = s.trim_start_matches('(').trim_end_matches(')');
                    let parts: Vec<&str> = inner.split(';').collect();
                    if parts.len() != ss.len() {
                        return Err(SpaceError::Malformed(format!(
                            "expected {} components in {s:?}",
                            ss.len()
                        )));
                    }
                    Point::Tuple(
                        ss.iter().zip(parts).map(|(sp, t)| sp.parse_point(t)).collect::<Result<_, _>>()?,
                    )
                }
                _ => {
                    return Err(SpaceError::Unsupported(format!(
                        "point literals for {} must be JSON",
                        self.name()
                    )))
                }
            }
        };
        if !self.contains(&p) {
            return Err(mismatch(self, &p));
        }
        Ok(p)
    }
}

fn cover_radius(base: &Space, k: u32) -> Q {
    match base {
        Space::UnitInterval | Space::ClosedInterval { .. } | Space::C01 => pow2(-(k as i64) - 1),
        Space::Cantor | Space::Baire => pow2(-(k as i64)),
        Space::Product(ss) => ss.iter().map(|s| cover_radius(s, k)).max().unwrap(),
        Space::ClosedBall { parent, .. } => cover_radius(parent, k),
    }
}

fn net_of(base: &Space, region: &Region, k: u32, bounds: &NetBounds) -> Result<Vec<Point>, SpaceError> {
    match (base, region) {
        (_, Region::Empty) => Ok(vec![]),
        (Space::UnitInterval | Space::ClosedInterval { .. }, Region::Interval(lo, hi)) => {
            let (a, _) = base.interval().unwrap();
            let step = pow2(-(k as i64));
            let mut pts = vec![lo.clone()];
            // first grid point strictly above lo
            let j = ((lo - &a) / &step).floor() + Q::one();
            let mut x = &a + &step * j;
            while &x < hi {
                pts.push(x.clone());
                x += &step;
            }
            if hi > lo {
                pts.push(hi.clone());
            }
            Ok(pts.into_iter().map(Point::Real).collect())
        }
        (Space::Cantor, Region::Prefix(p)) => {
            let extra = (k as usize).saturating_sub(p.len());
            Ok(words(2, extra)
                .into_iter()
                .map(|w| Point::seq(p.iter().copied().chain(w).collect()))
                .collect())
        }
        (Space::Baire, Region::Prefix(p)) => {
            let (Some(branching), Some(depth)) = (bounds.branching, bounds.depth) else {
                return Err(SpaceError::Unsupported(
                    "baire nets need branching and depth bounds".into(),
                ));
            };
            let len = (k as usize).min(depth);
            let extra = len.saturating_sub(p.len());
            Ok(words(branching, extra)
                .into_iter()
                .map(|w| Point::seq(p.iter().copied().chain(w).collect()))
                .collect())
        }
        (Space::Product(ss), Region::Product(rs)) => {
            let mut acc: Vec<Vec<Point>> = vec![vec![]];
            for (s, r) in ss.iter().zip(rs) {
                let part = net_of(s, r, k, bounds)?;
                let mut next = Vec::with_capacity(acc.len() * part.len());
                for prefix in &acc {
                    for p in &part {
                        let mut v = prefix.clone();
                        v.push(p.clone());
                        next.push(v);
                    }
                }
                acc = next;
            }
            Ok(acc.into_iter().map(Point::Tuple).collect())
        }
        (Space::C01, _) => {
            let Some(grid) = &bounds.c01 else {
                return Err(SpaceError::Unsupported(
                    "c01 nets need an explicit knot/value grid".into(),
                ));
            };
            let mut out = Vec::new();
            for w in words(grid.values.len() as u64, grid.knots.len()) {
                let pts = grid
                    .knots
                    .iter()
                    .zip(&w)
                    .map(|(t, &j)| (t.clone(), grid.values[j as usize].clone()))
                    .collect();
                out.push(Point::Pl(PlFunction::new(pts)?));
            }
            out.sort();
            out.dedup();
            Ok(out)
        }
        _ => Err(SpaceError::Unsupported(format!("no net for {}", base.name()))),
    }
}

/// Enumeration of `Q ∩ [0, 1]`: 0, 1, then by denominator and numerator.
fn unit_rational(i: u64) -> Q {
    if i < 2 {
        return int(i as i64);
    }
    let mut left = i - 2;
    let mut den = 2u64;
    loop {
        for num in 1..den {
            if num_integer::gcd(num, den) == 1 {
                if left == 0 {
                    return frac(num as i64, den as i64);
                }
                left -= 1;
            }
        }
        den += 1;
    }
}

fn signed_rational(code: u64) -> Q {
    let (n, d) = unpair(code);
    let mag = int((n / 2) as i64);
    let v = mag / int(d as i64 + 1);
    if n % 2 == 1 { -v } else { v }
}
