//! Criticality certificates, the free and localized searches for
//! ε-critical points, and the boundedness and scaling reductions.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Signed};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codes::{
    ceil_log2, cont_to_lsc, eval_cont, eval_lsc_lower, lsc_add_scaled_distance, lsc_combine,
    lsc_scale, lsc_zero_on_closed, CodeError, CombineOp, ConstantLsc, ContRef, ContinuousCode,
    DistanceLsc, LscRef, Modulus, SublevelSet,
};
use crate::rational::{fmt_q, least_exp_below, max_q, min_q, pow2, qser, qser_opt, zero, Bracket, Ext, Q};
use crate::space::{Ball, NetBounds, Point, Space, SpaceError};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EkelandError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("{0} has no finite upper evidence, so it is outside the support")]
    UnsupportedPoint(Point),
    #[error("the potential has empty support on the search net")]
    EmptySupport,
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// A potential given either by a continuous code or by an lsc code.
#[derive(Clone)]
pub enum Potential {
    Continuous(ContRef),
    Lsc(LscRef),
}

/// Lower evidence (`Inf` when the value is known to be `+inf`) and upper evidence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eval {
    pub lo: Ext,
    pub hi: Option<Q>,
}

impl Eval {
    pub fn width(&self) -> Option<Q> {
        match (&self.lo, &self.hi) {
            (Ext::Fin(l), Some(h)) => Some(h - l),
            _ => None,
        }
    }
}

impl Potential {
    pub fn space(&self) -> &Space {
        match self {
            Potential::Continuous(c) => c.domain(),
            Potential::Lsc(l) => l.space(),
        }
    }

    /// Brackets `f(x)`; `budget` is the precision exponent for continuous codes
    /// and the number of ball stages for lsc codes.
    pub fn eval(&self, x: &Point, budget: u32) -> Result<Eval, EkelandError> {
        match self {
            Potential::Continuous(c) => {
                let direct = c.exact_value(x).map(Bracket::exact).or_else(|| c.point_bracket(x, budget));
                let b = match direct.map(Ok).unwrap_or_else(|| eval_cont(c.as_ref(), x, budget)) {
                    Ok(b) => b,
                    Err(CodeError::BudgetExceeded { best: Some(b) }) => b,
                    Err(e) => return Err(e.into()),
                };
                Ok(Eval { lo: Ext::Fin(b.lo), hi: Some(b.hi) })
            }
            Potential::Lsc(l) => {
                let hi = l.upper(x);
                let mut lo = eval_lsc_lower(l.as_ref(), x, budget);
                if let (Ext::Fin(a), Some(h)) = (&lo, &hi) {
                    if a > h {
                        lo = Ext::Fin(h.clone());
                    }
                }
                Ok(Eval { lo, hi })
            }
        }
    }

    /// The lsc view, for constructions that combine codes.
    pub fn as_lsc(&self) -> LscRef {
        match self {
            Potential::Continuous(c) => Arc::new(cont_to_lsc(c.clone())),
            Potential::Lsc(l) => l.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    #[serde(with = "qser")]
    pub epsilon: Q,
    pub resolution: u32,
    pub budget: u32,
    pub max_iters: u32,
    #[serde(with = "qser_opt", default)]
    pub slack: Option<Q>,
    #[serde(with = "qser_opt", default)]
    pub delta: Option<Q>,
    #[serde(default)]
    pub region: Option<Ball>,
    #[serde(default)]
    pub seed_order: Option<u64>,
}

impl SearchParams {
    pub fn new(epsilon: Q, resolution: u32) -> SearchParams {
        SearchParams {
            epsilon,
            resolution,
            budget: 48,
            max_iters: 64,
            slack: None,
            delta: None,
            region: None,
            seed_order: None,
        }
    }

    pub fn delta_or_default(&self) -> Q {
        self.delta.clone().unwrap_or_else(|| pow2(1 - self.resolution as i64))
    }

    fn validate(&self) -> Result<(), EkelandError> {
        if !self.epsilon.is_positive() {
            return Err(EkelandError::Parameter(format!("epsilon must be positive, got {}", fmt_q(&self.epsilon))));
        }
        if self.slack.as_ref().is_some_and(|s| s.is_negative()) {
            return Err(EkelandError::Parameter("slack must be nonnegative".into()));
        }
        if self.delta.as_ref().is_some_and(|d| d.is_negative()) {
            return Err(EkelandError::Parameter("delta must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Where search and verification nets come from.
#[derive(Clone, Debug, Default)]
pub struct NetSpec {
    pub bounds: NetBounds,
    pub search: Option<Vec<Point>>,
    pub verify: Option<Vec<Point>>,
}

impl NetSpec {
    pub fn bounded(bounds: NetBounds) -> NetSpec {
        NetSpec { bounds, ..NetSpec::default() }
    }

    pub fn explicit(points: Vec<Point>) -> NetSpec {
        NetSpec { search: Some(points.clone()), verify: Some(points), ..NetSpec::default() }
    }

    fn build(&self, space: &Space, params: &SearchParams, verify: bool) -> Result<Vec<Point>, EkelandError> {
        let explicit = if verify { &self.verify } else { &self.search };
        if let Some(pts) = explicit {
            return Ok(pts.clone());
        }
        let k = params.resolution + verify as u32;
        Ok(space.net(k, params.region.as_ref(), &self.bounds)?)
    }

    pub fn verification_net(&self, space: &Space, params: &SearchParams) -> Result<Vec<Point>, EkelandError> {
        self.build(space, params, true)
    }

    pub fn search_net(&self, space: &Space, params: &SearchParams) -> Result<Vec<Point>, EkelandError> {
        self.build(space, params, false)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub y: Point,
    #[serde(with = "qser")]
    pub dist: Q,
    /// Lower evidence for `f(y)`; absent means `+inf`.
    #[serde(with = "qser_opt")]
    pub f_lower: Option<Q>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Localization {
    pub x0: Point,
    #[serde(with = "qser")]
    pub dist: Q,
    #[serde(with = "qser_opt")]
    pub f_x0_lower: Option<Q>,
    pub holds: bool,
}

/// A self-contained record of a criticality check: every number needed to
/// re-derive the verdict is stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub x_star: Point,
    pub params: SearchParams,
    #[serde(with = "qser")]
    pub delta: Q,
    #[serde(with = "qser")]
    pub slack: Q,
    #[serde(with = "qser")]
    pub f_upper: Q,
    pub rows: Vec<Row>,
    pub verdict: Verdict,
    pub witness: Option<Point>,
    pub localization: Option<Localization>,
}

/// The first row refuting criticality: `ε d + f_lower(y) + slack <= f_upper(x*)` with `d > δ`.
pub fn find_witness<'a>(eps: &Q, delta: &Q, slack: &Q, f_upper: &Q, rows: &'a [Row]) -> Option<&'a Row> {
    rows.iter().find(|r| {
        r.dist > *delta
            && r.f_lower.as_ref().is_some_and(|lo| eps * &r.dist + lo + slack <= *f_upper)
    })
}

fn localization_holds(eps: &Q, dist: &Q, f_x0_lower: &Option<Q>, f_upper: &Q, slack: &Q) -> bool {
    match f_x0_lower {
        None => true,
        Some(lo) => eps * dist <= lo - f_upper + slack,
    }
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass && self.localization.as_ref().is_none_or(|l| l.holds)
    }

    /// Re-derives the verdict, witness and localization from the stored numbers alone.
    pub fn recheck(&self) -> bool {
        let w = find_witness(&self.params.epsilon, &self.delta, &self.slack, &self.f_upper, &self.rows);
        let verdict = if w.is_some() { Verdict::Fail } else { Verdict::Pass };
        let loc_ok = self.localization.as_ref().is_none_or(|l| {
            l.holds == localization_holds(&self.params.epsilon, &l.dist, &l.f_x0_lower, &self.f_upper, &self.slack)
        });
        verdict == self.verdict && w.map(|r| &r.y) == self.witness.as_ref() && loc_ok
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }
}

fn lower_opt(e: &Ext) -> Option<Q> {
    e.fin().cloned()
}

/// Checks `ε d(x*, y) + f(y) + slack > f(x*)` for every net point with `d > δ`,
/// from upper evidence at `x*` and lower evidence at `y`.
pub fn is_critical(
    f: &Potential,
    x_star: &Point,
    params: &SearchParams,
    net: &[Point],
) -> Result<Certificate, EkelandError> {
    params.validate()?;
    let space = f.space();
    let at_x = f.eval(x_star, params.budget)?;
    let Some(f_upper) = at_x.hi.clone() else {
        return Err(EkelandError::UnsupportedPoint(x_star.clone()));
    };
    let mut rows = Vec::with_capacity(net.len());
    let mut widest = at_x.width().unwrap_or_else(zero);
    let mut widest_y = zero();
    for y in net {
        let e = f.eval(y, params.budget)?;
        if let Some(w) = e.width() {
            widest_y = max_q(&widest_y, &w);
        }
        rows.push(Row { y: y.clone(), dist: space.dist(x_star, y)?, f_lower: lower_opt(&e.lo) });
    }
    widest += widest_y;
    let slack = params.slack.clone().unwrap_or(widest);
    let delta = params.delta_or_default();
    let witness = find_witness(&params.epsilon, &delta, &slack, &f_upper, &rows).map(|r| r.y.clone());
    Ok(Certificate {
        schema_version: SCHEMA_VERSION,
        x_star: x_star.clone(),
        params: params.clone(),
        delta,
        slack,
        f_upper,
        rows,
        verdict: if witness.is_some() { Verdict::Fail } else { Verdict::Pass },
        witness,
        localization: None,
    })
}

/// Adds the check `ε d(x0, x*) <= f(x0) - f(x*) + slack` to a certificate.
pub fn localize(cert: &mut Certificate, f: &Potential, x0: &Point) -> Result<(), EkelandError> {
    let e = f.eval(x0, cert.params.budget)?;
    let dist = f.space().dist(x0, &cert.x_star)?;
    let f_x0_lower = lower_opt(&e.lo);
    let holds = localization_holds(&cert.params.epsilon, &dist, &f_x0_lower, &cert.f_upper, &cert.slack);
    cert.localization = Some(Localization { x0: x0.clone(), dist, f_x0_lower, holds });
    Ok(())
}

/// Recomputes a certificate against a potential: fresh evidence at `x*` and
/// at every recorded net point, with the recorded δ and slack.
pub fn verify(cert: &Certificate, f: &Potential) -> Result<Certificate, EkelandError> {
    let mut params = cert.params.clone();
    params.delta = Some(cert.delta.clone());
    params.slack = Some(cert.slack.clone());
    let net: Vec<Point> = cert.rows.iter().map(|r| r.y.clone()).collect();
    let mut fresh = is_critical(f, &cert.x_star, &params, &net)?;
    fresh.params = cert.params.clone();
    if let Some(l) = &cert.localization {
        localize(&mut fresh, f, &l.x0)?;
    }
    Ok(fresh)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateEntry {
    pub a: Point,
    #[serde(with = "qser")]
    pub p: Q,
    #[serde(with = "qser")]
    pub rate: Q,
}

/// The recorded run of the iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchState {
    pub iterates: Vec<Point>,
    pub iterate_brackets: Vec<Bracket>,
    #[serde(with = "crate::rational::qser_vec")]
    pub q: Vec<Q>,
    pub u_history: Vec<Bracket>,
    pub rate_cache: Vec<RateEntry>,
    pub stopped_early: bool,
}

impl SearchState {
    /// `Σ_{k>=n} q_k < 2^-n` for every recorded `n`.
    pub fn check_q_schedule(&self) -> bool {
        let mut tail = zero();
        for n in (0..self.q.len()).rev() {
            tail += &self.q[n];
            if tail >= pow2(-(n as i64)) {
                return false;
            }
        }
        true
    }

    /// `ε d(a_m, a_n) <= f_upper(a_n) - f_lower(a_m) + Σ_{k>=n} q_k` for recorded `n < m`.
    pub fn check_telescoping(&self, space: &Space, eps: &Q) -> bool {
        let len = self.iterates.len();
        let mut tails = vec![zero(); self.q.len() + 1];
        for n in (0..self.q.len()).rev() {
            tails[n] = &tails[n + 1] + &self.q[n];
        }
        for n in 0..len {
            for m in n + 1..len {
                let Ok(d) = space.dist(&self.iterates[m], &self.iterates[n]) else { return false };
                let tail = tails.get(n).cloned().unwrap_or_else(zero);
                let rhs = &self.iterate_brackets[n].hi - &self.iterate_brackets[m].lo + tail;
                if eps * d > rhs {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub x_star: Point,
    pub certificate: Certificate,
    pub state: SearchState,
}

struct Iteration<'a> {
    eps: &'a Q,
    net: Vec<Point>,
    evals: Vec<Eval>,
    dist: HashMap<usize, Vec<Q>>,
    space: &'a Space,
}

const RATE_CAP: u32 = 64;

impl Iteration<'_> {
    fn dists(&mut self, a: usize) -> &Vec<Q> {
        if !self.dist.contains_key(&a) {
            let row = self.net.iter().map(|b| self.space.dist(&self.net[a], b).expect("net points lie in the space")).collect();
            self.dist.insert(a, row);
        }
        &self.dist[&a]
    }

    fn lo(&self, b: usize) -> &Ext {
        &self.evals[b].lo
    }

    fn hi(&self, b: usize) -> Option<&Q> {
        self.evals[b].hi.as_ref()
    }

    /// `[min lo over b possibly in S(a, q), min hi over b surely in S(a, q)]`;
    /// `q = None` is the limit `q → 0+`.
    fn u(&mut self, a: usize, q: Option<&Q>) -> Bracket {
        let eps = self.eps.clone();
        self.dists(a);
        let d = &self.dist[&a];
        let hi_a = self.hi(a).expect("iterates have upper evidence").clone();
        let lo_a = self.lo(a).fin().cloned().unwrap_or_else(|| hi_a.clone());
        let mut lo: Option<Q> = None;
        let mut hi = hi_a.clone();
        for b in 0..self.net.len() {
            let ed = &eps * &d[b];
            if let Ext::Fin(lb) = self.lo(b) {
                let slackened = &hi_a - lb;
                let possible = match q {
                    Some(q) => ed < slackened + q,
                    None => ed <= slackened,
                };
                if possible {
                    lo = Some(lo.map_or(lb.clone(), |x| min_q(&x, lb)));
                }
            }
            if let Some(hb) = self.hi(b) {
                let gap = &lo_a - hb;
                let certain = b == a
                    || match q {
                        Some(q) => ed < gap + q,
                        None => ed <= gap,
                    };
                if certain {
                    hi = min_q(&hi, hb);
                }
            }
        }
        let lo = lo.unwrap_or_else(|| hi.clone());
        Bracket::new(min_q(&lo, &hi), hi)
    }

    fn certain(&mut self, a: usize, b: usize, q: &Q) -> bool {
        if a == b {
            return true;
        }
        let (Some(lo_a), Some(hb)) = (self.lo(a).fin().cloned(), self.hi(b).cloned()) else { return false };
        let ed = self.eps * &self.dists(a)[b];
        ed < lo_a - hb + q
    }

    /// `R(a, p)`: the largest `2^-m` with `r_a - u_{a, 2^-m} < p`.
    ///
    /// `b` enters the possible set once `q` exceeds `t_b = ε d(a, b) - hi_a + lo_b`,
    /// so the answer is fixed by the least `t_b` among the `b` with `lo_b <= r_a - p`.
    fn rate(&mut self, a: usize, p: &Q) -> Q {
        let r = self.u(a, None);
        let hi_a = self.hi(a).expect("iterates have upper evidence").clone();
        let bar = &r.hi - p;
        let eps = self.eps.clone();
        self.dists(a);
        let d = &self.dist[&a];
        let mut least: Option<Q> = None;
        for (b, db) in d.iter().enumerate() {
            let Ext::Fin(lb) = &self.evals[b].lo else { continue };
            if lb <= &bar {
                let t = &eps * db - &hi_a + lb;
                least = Some(least.map_or(t.clone(), |l| min_q(&l, &t)));
            }
        }
        match least {
            None => Q::one(),
            Some(t) if t.is_positive() => pow2(-(least_exp_below(&t).min(RATE_CAP) as i64)),
            Some(_) => pow2(-(RATE_CAP as i64)),
        }
    }
}

fn shuffled(n: usize, seed: Option<u64>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    if let Some(s) = seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(s));
    }
    order
}

/// Runs the iteration `a_{n+1} ∈ S(a_n, q_n)` over the search net and
/// certifies the result on the verification net.
pub fn fvp_search(f: &Potential, params: &SearchParams, nets: &NetSpec) -> Result<SearchOutcome, EkelandError> {
    params.validate()?;
    let space = f.space().clone();
    let net = nets.search_net(&space, params)?;
    let evals = net.iter().map(|y| f.eval(y, params.budget)).collect::<Result<Vec<_>, _>>()?;
    let order = shuffled(net.len(), params.seed_order);
    let Some(&a0) = order.iter().find(|&&i| evals[i].hi.is_some()) else {
        return Err(EkelandError::EmptySupport);
    };
    let mut it = Iteration { eps: &params.epsilon, net, evals, dist: HashMap::new(), space: &space };
    let mut rate_cache = Vec::new();
    let mut rate = |it: &mut Iteration, a: usize, p: Q| {
        let r = it.rate(a, &p);
        rate_cache.push(RateEntry { a: it.net[a].clone(), p, rate: r.clone() });
        r
    };
    let mut prod = rate(&mut it, a0, Q::one());
    let mut q = vec![&prod / Q::from_integer(4.into())];
    let mut iterates = vec![a0];
    let mut u_history = Vec::new();
    let mut a = a0;
    let mut stopped_early = false;
    let target = pow2(-(params.resolution as i64));
    for n in 0..params.max_iters {
        let qn = q[n as usize].clone();
        let u = it.u(a, Some(&qn));
        let thresh = &u.hi + pow2(-(n as i64) - 1);
        let mut next = a;
        for &b in &order {
            if it.hi(b).is_some_and(|h| h < &thresh) && it.certain(a, b, &qn) {
                next = b;
                break;
            }
        }
        iterates.push(next);
        prod *= rate(&mut it, next, pow2(-(n as i64) - 1));
        q.push(pow2(-(n as i64) - 3) * &prod);
        let stable = next == a;
        a = next;
        let width = u.width();
        u_history.push(u);
        if stable && pow2(-(n as i64) - 1) + width < target {
            stopped_early = true;
            break;
        }
    }
    let bracket = |i: usize| {
        let e = &it.evals[i];
        let hi = e.hi.clone().expect("iterates have upper evidence");
        let lo = e.lo.fin().cloned().unwrap_or_else(|| hi.clone());
        Bracket::new(min_q(&lo, &hi), hi)
    };
    let state = SearchState {
        iterates: iterates.iter().map(|&i| it.net[i].clone()).collect(),
        iterate_brackets: iterates.iter().map(|&i| bracket(i)).collect(),
        q,
        u_history,
        rate_cache,
        stopped_early,
    };
    let verify_net = nets.verification_net(&space, params)?;
    let mut x_star = it.net[a].clone();
    let mut certificate = is_critical(f, &x_star, params, &verify_net)?;
    if certificate.verdict == Verdict::Fail {
        let best = *iterates.iter().min_by(|&&i, &&j| bracket(i).hi.cmp(&bracket(j).hi)).unwrap();
        if best != a {
            let alt = is_critical(f, &it.net[best], params, &verify_net)?;
            if alt.verdict == Verdict::Pass {
                x_star = it.net[best].clone();
                certificate = alt;
            }
        }
    }
    Ok(SearchOutcome { x_star, certificate, state })
}

/// The first net point of least upper evidence, with its bracket.
pub fn fvp_min_compact(
    f: &ContRef,
    params: &SearchParams,
    bounds: &NetBounds,
) -> Result<(Point, Bracket), EkelandError> {
    let space = f.domain();
    if !space.is_compact() {
        return Err(EkelandError::Unsupported(format!("{} is not compact", space.name())));
    }
    let pot = Potential::Continuous(f.clone());
    let mut best: Option<(Point, Bracket)> = None;
    for y in space.net(params.resolution, params.region.as_ref(), bounds)? {
        let e = pot.eval(&y, params.budget)?;
        let (Ext::Fin(lo), Some(hi)) = (e.lo, e.hi) else { continue };
        if best.as_ref().is_none_or(|(_, b)| hi < b.hi) {
            best = Some((y, Bracket::new(lo, hi)));
        }
    }
    best.ok_or(EkelandError::EmptySupport)
}

/// The localized principle: run the free search on
/// `f̃ = f` on `C = {x : f(x) + ε d(x, x0) <= f(x0)}` and `max(f, ε d(·, x0) + f(x0))` off it,
/// then certify the result for `f` itself with the localization check.
pub fn lvp_search(
    f: &Potential,
    x0: &Point,
    params: &SearchParams,
    nets: &NetSpec,
) -> Result<SearchOutcome, EkelandError> {
    params.validate()?;
    let space = f.space().clone();
    let Some(f0) = f.eval(x0, params.budget)?.hi else {
        return Err(EkelandError::UnsupportedPoint(x0.clone()));
    };
    let tilde = localized_potential(f, x0, &f0, params)?;
    let mut out = fvp_search(&tilde, params, nets)?;
    let verify_net = nets.verification_net(&space, params)?;
    let mut candidates = vec![out.x_star.clone()];
    for x in out.state.iterates.iter().rev() {
        if !candidates.contains(x) {
            candidates.push(x.clone());
        }
    }
    let mut first: Option<Certificate> = None;
    for x in candidates {
        let mut cert = is_critical(f, &x, params, &verify_net)?;
        localize(&mut cert, f, x0)?;
        if cert.passed() {
            out.x_star = x;
            out.certificate = cert;
            return Ok(out);
        }
        first.get_or_insert(cert);
    }
    out.certificate = first.expect("at least one candidate");
    Ok(out)
}

/// `f̃` from the localized principle, built from the lsc combinators.
pub fn localized_potential(f: &Potential, x0: &Point, f0: &Q, params: &SearchParams) -> Result<Potential, EkelandError> {
    let space = f.space().clone();
    let fl = f.as_lsc();
    let g: LscRef = Arc::new(lsc_add_scaled_distance(fl.clone(), x0.clone(), params.epsilon.clone())?);
    let c = Arc::new(SublevelSet { g, t: f0.clone(), budget: params.budget });
    let cone: LscRef = Arc::new(DistanceLsc { space, x0: x0.clone(), eps: params.epsilon.clone(), offset: f0.clone() });
    let off: LscRef = Arc::new(lsc_zero_on_closed(cone, c)?);
    Ok(Potential::Lsc(Arc::new(lsc_combine(fl, off, CombineOp::Max)?)))
}

/// `min(f, f(x0))`.
pub fn bound_reduce(f: &Potential, x0: &Point, budget: u32) -> Result<Potential, EkelandError> {
    let Some(v) = f.eval(x0, budget)?.hi else {
        return Err(EkelandError::UnsupportedPoint(x0.clone()));
    };
    let c: LscRef = Arc::new(ConstantLsc { space: f.space().clone(), value: v });
    Ok(Potential::Lsc(Arc::new(lsc_combine(f.as_lsc(), c, CombineOp::Min)?)))
}

/// `f / ε`.
pub fn scale_reduce(f: &Potential, epsilon: &Q) -> Result<Potential, EkelandError> {
    if !epsilon.is_positive() {
        return Err(EkelandError::Parameter(format!("epsilon must be positive, got {}", fmt_q(epsilon))));
    }
    let c = epsilon.recip();
    Ok(match f {
        Potential::Continuous(code) => Potential::Continuous(Arc::new(ScaledCont { code: code.clone(), c })),
        Potential::Lsc(l) => Potential::Lsc(Arc::new(lsc_scale(l.clone(), c)?)),
    })
}

/// `c * f` for a continuous code and `c > 0`.
pub struct ScaledCont {
    code: ContRef,
    c: Q,
}

impl ContinuousCode for ScaledCont {
    fn domain(&self) -> &Space {
        self.code.domain()
    }

    fn ball_items(&self, ball: &Ball) -> Vec<Bracket> {
        self.code.ball_items(ball).iter().map(|b| b.scale(&self.c)).collect()
    }

    fn exact_value(&self, x: &Point) -> Option<Q> {
        self.code.exact_value(x).map(|v| v * &self.c)
    }

    fn modulus(&self) -> Option<Modulus> {
        let grow = ceil_log2(&self.c).max(0);
        match self.code.modulus()? {
            Modulus::Shift { shift } => Some(Modulus::Shift { shift: shift + grow }),
            m if grow == 0 => Some(m),
            _ => None,
        }
    }

    fn point_bracket(&self, x: &Point, k: u32) -> Option<Bracket> {
        self.code.point_bracket(x, k).map(|b| b.scale(&self.c))
    }
}
