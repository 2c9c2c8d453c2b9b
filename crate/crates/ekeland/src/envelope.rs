//! Lower α-envelopes `f_α(x) = inf_y f(y) + α d(x, y)` and inf-convolutions,
//! bracketed by honest ball infima from below and net samples from above.

use std::collections::HashMap;
use std::sync::Mutex;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::codes::{
    eval_cont, CodeError, ContRef, ContinuousCode, HonestRef, Modulus,
};
use crate::critical::{is_critical, Certificate, EkelandError, Potential, SearchParams};
use crate::rational::{fmt_q, max_q, min_q, qser, zero, Bracket, Ext, Q};
use crate::space::{Ball, NetBounds, Point, Space};

#[derive(Clone)]
pub struct EnvelopeQuery {
    pub f: HonestRef,
    pub alpha: Q,
    pub x: Point,
    pub resolution: u32,
    pub region: Option<Ball>,
    pub bounds: NetBounds,
}

fn check_alpha(alpha: &Q) -> Result<(), EkelandError> {
    if alpha.is_positive() {
        Ok(())
    } else {
        Err(EkelandError::Parameter(format!("alpha must be positive, got {}", fmt_q(alpha))))
    }
}

/// The lower bracket uses a cover this many levels finer than the sample net.
const COVER_EXTRA: u32 = 2;

/// Everything `f_α` needs from `f` at one resolution: honest infima over a
/// cover and upper evidence on a net.
/// Candidates are kept sorted by value so a query can stop once no later one
/// can improve its bound; answers are memoized per point.
pub struct EnvelopeTable {
    f: HonestRef,
    alpha: Q,
    lower: Vec<(Point, Q)>,
    upper: Vec<(Point, Q)>,
    radius: Q,
    samples: Vec<(Point, Q)>,
    region: Option<Ball>,
    complete_cover: bool,
    memo: Mutex<HashMap<Point, Bracket>>,
}

impl EnvelopeTable {
    pub fn new(
        f: HonestRef,
        alpha: Q,
        resolution: u32,
        region: Option<Ball>,
        bounds: &NetBounds,
    ) -> Result<EnvelopeTable, EkelandError> {
        check_alpha(&alpha)?;
        let space = f.space().clone();
        if let Some(b) = &region {
            if !b.radius.is_positive() {
                return Err(EkelandError::Parameter("region radius must be positive".into()));
            }
        }
        let (centers, radius) = space.cover(resolution + COVER_EXTRA, region.as_ref(), bounds)?;
        let (mut lower, mut upper) = (Vec::new(), Vec::new());
        for c in centers {
            let inf = f.ball_inf(&Ball::new(c.clone(), radius.clone()));
            if let Ext::Fin(h) = inf.hi {
                upper.push((c.clone(), h));
            }
            if let Ext::Fin(l) = inf.lo {
                lower.push((c, l));
            }
        }
        let mut samples: Vec<(Point, Q)> = space
            .net(resolution, region.as_ref(), bounds)?
            .into_iter()
            .filter_map(|y| f.upper(&y).map(|v| (y, v)))
            .collect();
        for v in [&mut lower, &mut upper, &mut samples] {
            v.sort_by(|a, b| a.1.cmp(&b.1));
        }
        let complete_cover = space.is_compact();
        Ok(EnvelopeTable {
            f,
            alpha,
            lower,
            upper,
            radius,
            samples,
            region,
            complete_cover,
            memo: Mutex::new(HashMap::new()),
        })
    }

    pub fn alpha(&self) -> &Q {
        &self.alpha
    }

    pub fn space(&self) -> &Space {
        self.f.space()
    }

    /// Bracket for `f_α(x)`.
    pub fn value(&self, x: &Point) -> Result<Bracket, EkelandError> {
        if let Some(b) = self.memo.lock().expect("memo lock").get(x) {
            return Ok(b.clone());
        }
        let b = self.compute(x)?;
        self.memo.lock().expect("memo lock").insert(x.clone(), b.clone());
        Ok(b)
    }

    fn compute(&self, x: &Point) -> Result<Bracket, EkelandError> {
        let space = self.space();
        let a = &self.alpha;
        let mut hi: Option<Q> = self.f.upper(x);
        let beaten = |hi: &Option<Q>, v: &Q| hi.as_ref().is_some_and(|h| v >= h);
        let take = |hi: &mut Option<Q>, v: Q| {
            *hi = Some(match hi.take() {
                Some(h) => min_q(&h, &v),
                None => v,
            })
        };
        for (y, v) in &self.samples {
            if beaten(&hi, v) {
                break;
            }
            take(&mut hi, v + a * space.dist(x, y)?);
        }
        let reach = a * &self.radius;
        for (c, h) in &self.upper {
            if beaten(&hi, &(h + &reach)) {
                break;
            }
            take(&mut hi, h + &reach + a * space.dist(x, c)?);
        }
        let mut lo = Ext::Inf;
        for (c, l) in &self.lower {
            if lo <= Ext::Fin(l.clone()) {
                break;
            }
            let gap = max_q(&zero(), &(space.dist(x, c)? - &self.radius));
            lo = lo.min(Ext::Fin(l + a * gap));
        }
        let floor = self.f.floor();
        if let Some(reg) = &self.region {
            let out = max_q(&zero(), &(&reg.radius - space.dist(x, &reg.center)?));
            lo = lo.min(Ext::Fin(&floor + a * out));
        }
        if !self.complete_cover {
            lo = lo.min(Ext::Fin(floor));
        }
        let Some(hi) = hi else { return Err(EkelandError::EmptySupport) };
        let lo = match lo {
            Ext::Fin(l) => min_q(&l, &hi),
            Ext::Inf => hi.clone(),
        };
        Ok(Bracket::new(lo, hi))
    }
}

pub fn envelope_value(q: &EnvelopeQuery) -> Result<Bracket, EkelandError> {
    EnvelopeTable::new(q.f.clone(), q.alpha.clone(), q.resolution, q.region.clone(), &q.bounds)?.value(&q.x)
}

/// The envelope inherits the kernel's modulus unchanged.
pub fn envelope_modulus(h_modulus: &Modulus) -> Modulus {
    h_modulus.clone()
}

/// `f_α` as a continuous code; `α`-Lipschitz, so its modulus is that of `α d`.
pub struct EnvelopeCode {
    table: EnvelopeTable,
}

impl EnvelopeCode {
    pub fn new(table: EnvelopeTable) -> EnvelopeCode {
        EnvelopeCode { table }
    }

    pub fn table(&self) -> &EnvelopeTable {
        &self.table
    }
}

impl ContinuousCode for EnvelopeCode {
    fn domain(&self) -> &Space {
        self.table.space()
    }

    fn ball_items(&self, ball: &Ball) -> Vec<Bracket> {
        let Ok(b) = self.table.value(&ball.center) else { return vec![] };
        let spread = &self.table.alpha * &ball.radius;
        vec![Bracket::new(&b.lo - &spread, &b.hi + &spread)]
    }

    fn modulus(&self) -> Option<Modulus> {
        Some(envelope_modulus(&Modulus::lipschitz(&self.table.alpha)))
    }

    fn point_bracket(&self, x: &Point, _k: u32) -> Option<Bracket> {
        self.table.value(x).ok()
    }
}

/// Extra cover levels tried under a ball on which the kernel enumerates nothing.
const REFINE_LEVELS: u32 = 8;

/// Bracket for `inf_y h(x, y) + f(y)`, with `h` a continuous code on `X × Y`.
pub fn inf_conv(
    h: &ContRef,
    f: &HonestRef,
    x: &Point,
    resolution: u32,
    bounds: &NetBounds,
) -> Result<Bracket, EkelandError> {
    let ys = f.space().clone();
    if !ys.is_compact() {
        return Err(EkelandError::Unsupported(format!("inf-convolution over {} needs a compact factor", ys.name())));
    }
    let pair = |y: &Point| Point::Tuple(vec![x.clone(), y.clone()]);
    let mut hi: Option<Q> = None;
    for y in ys.net(resolution, None, bounds)? {
        let Some(fy) = f.upper(&y) else { continue };
        let hb = eval_cont(h.as_ref(), &pair(&y), resolution + 8)
            .or_else(|e| match e {
                CodeError::BudgetExceeded { best: Some(b) } => Ok(b),
                e => Err(e),
            })?;
        let v = hb.hi + fy;
        hi = Some(hi.map_or(v.clone(), |h| min_q(&h, &v)));
    }
    let mut lo = Ext::Inf;
    let mut pending: Vec<(Ball, u32)> = {
        let (cs, r) = ys.cover(resolution, None, bounds)?;
        cs.into_iter().map(|c| (Ball::new(c, r.clone()), 0)).collect()
    };
    while let Some((ball, depth)) = pending.pop() {
        let inf = f.ball_inf(&ball);
        let Ext::Fin(f_lo) = inf.lo else { continue };
        let items = h.ball_items(&Ball::new(pair(&ball.center), ball.radius.clone()));
        let h_lo = items.iter().map(|b| b.lo.clone()).max();
        match h_lo {
            Some(l) => lo = lo.min(Ext::Fin(l + f_lo)),
            None if depth < REFINE_LEVELS => {
                let k = resolution + depth + 1;
                let (cs, r) = ys.cover(k, Some(&ball), bounds)?;
                pending.extend(cs.into_iter().map(|c| (Ball::new(c, r.clone()), depth + 1)));
            }
            None => return Err(EkelandError::Unsupported(format!("kernel enumerates nothing near {}", ball))),
        }
    }
    let Some(hi) = hi else { return Err(EkelandError::EmptySupport) };
    let lo = match lo {
        Ext::Fin(l) => min_q(&l, &hi),
        Ext::Inf => hi.clone(),
    };
    Ok(Bracket::new(lo, hi))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    #[serde(with = "qser")]
    pub alpha: Q,
    #[serde(with = "qser")]
    pub beta: Q,
    pub x_star: Point,
    #[serde(with = "qser")]
    pub f_upper: Q,
    pub envelope: Bracket,
    #[serde(with = "qser")]
    pub tol: Q,
    /// `f(x*) - f_β(x*) <= tol`, from upper evidence for `f` and the envelope's lower bracket.
    pub values_agree: bool,
    pub critical: Certificate,
    pub passed: bool,
}

/// Checks that a point certified for `f_β` is α-critical for `f` with `f(x*) = f_β(x*)`.
pub fn transfer_critical(
    f: &HonestRef,
    alpha: &Q,
    beta: &Q,
    x_star: &Point,
    net: &[Point],
    tol: &Q,
    params: &SearchParams,
    bounds: &NetBounds,
) -> Result<TransferReport, EkelandError> {
    check_alpha(alpha)?;
    if beta <= alpha {
        return Err(EkelandError::Parameter(format!(
            "beta must exceed alpha, got alpha = {}, beta = {}",
            fmt_q(alpha),
            fmt_q(beta)
        )));
    }
    let Some(f_upper) = f.upper(x_star) else {
        return Err(EkelandError::UnsupportedPoint(x_star.clone()));
    };
    let table = EnvelopeTable::new(f.clone(), beta.clone(), params.resolution, params.region.clone(), bounds)?;
    let envelope = table.value(x_star)?;
    let values_agree = &f_upper - &envelope.lo <= *tol;
    let mut p = params.clone();
    p.epsilon = alpha.clone();
    let critical = is_critical(&Potential::Lsc(f.clone()), x_star, &p, net)?;
    let passed = values_agree && critical.passed();
    Ok(TransferReport {
        alpha: alpha.clone(),
        beta: beta.clone(),
        x_star: x_star.clone(),
        f_upper,
        envelope,
        tol: tol.clone(),
        values_agree,
        critical,
        passed,
    })
}
