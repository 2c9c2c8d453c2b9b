use super::*;
use crate::rational::Ext;
use crate::space::NetBounds;

/// Outcome of an exhaustive law check over the items enumerated up to a budget.
#[derive(Clone, Debug, Default)]
pub struct LawReport {
    pub balls: usize,
    pub items: usize,
    pub pairs: usize,
    pub violations: Vec<String>,
}

impl LawReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn fail(&mut self, msg: String) {
        if self.violations.len() < 20 {
            self.violations.push(msg);
        }
    }
}

/// Stage `s` enumerates the cover balls of resolution `s`.
fn stage_balls(space: &Space, s: u32, region: Option<&Ball>, bounds: &NetBounds) -> Vec<Ball> {
    match space.cover(s, region, bounds) {
        Ok((centers, r)) => centers.into_iter().map(|c| Ball::new(c, r.clone())).collect(),
        Err(_) => vec![],
    }
}

fn children(space: &Space, ball: &Ball, s: u32, bounds: &NetBounds) -> Vec<Ball> {
    stage_balls(space, s + 1, Some(ball), bounds)
        .into_iter()
        .filter(|b| space.strictly_inside(b, ball).unwrap_or(false))
        .collect()
}

fn probes(space: &Space, ball: &Ball, s: u32, bounds: &NetBounds) -> Vec<Point> {
    space
        .net(s + 1, Some(ball), bounds)
        .unwrap_or_default()
        .into_iter()
        .filter(|x| space.in_ball(ball, x).unwrap_or(false))
        .collect()
}

const MAX_STAGE: u32 = 40;

/// cf1 (items on one ball overlap), cf2 (each item persists on strictly
/// smaller balls) and agreement with exact values at net points.
pub fn check_cont_laws(code: &dyn ContinuousCode, bounds: &NetBounds, budget: usize) -> LawReport {
    let space = code.domain();
    let mut rep = LawReport::default();
    for s in 0..=MAX_STAGE {
        let balls = stage_balls(space, s, None, bounds);
        if balls.is_empty() {
            break;
        }
        for ball in balls {
            let items = code.ball_items(&ball);
            rep.balls += 1;
            rep.items += items.len();
            for i in 0..items.len() {
                for j in i + 1..items.len() {
                    rep.pairs += 1;
                    if !items[i].overlaps(&items[j]) {
                        rep.fail(format!("cf1: {} and {} on {ball}", items[i], items[j]));
                    }
                }
            }
            if items.is_empty() {
                continue;
            }
            for child in children(space, &ball, s, bounds) {
                let sub = code.ball_items(&child);
                for it in &items {
                    rep.pairs += 1;
                    if !sub.iter().any(|j| j.is_subset_of(it)) {
                        rep.fail(format!("cf2: {it} on {ball} not refined on {child}"));
                    }
                }
            }
            for x in probes(space, &ball, s, bounds) {
                if let Some(v) = code.exact_value(&x) {
                    for it in &items {
                        rep.pairs += 1;
                        if !it.contains(&v) {
                            rep.fail(format!("value {} at {x} outside {it} on {ball}", fmt_q(&v)));
                        }
                    }
                }
            }
            if rep.items >= budget {
                return rep;
            }
        }
    }
    rep
}

/// lsc1 (bounds grow on strictly smaller balls), lsc2 (downward closure of
/// the answered bounds) and soundness against upper evidence at net points.
pub fn check_lsc_laws(code: &dyn LscCode, bounds: &NetBounds, budget: usize) -> LawReport {
    let space = code.space();
    let mut rep = LawReport::default();
    for s in 0..=MAX_STAGE {
        let balls = stage_balls(space, s, None, bounds);
        if balls.is_empty() {
            break;
        }
        for ball in balls {
            rep.balls += 1;
            let bb = code.ball_bound(&ball);
            rep.items += 1;
            if bb < Ext::Fin(code.floor()) {
                rep.fail(format!("bound {bb} on {ball} below the floor"));
            }
            if let Ext::Fin(q) = &bb {
                let smaller = q - pow2(-(s as i64));
                rep.pairs += 1;
                if Ext::Fin(smaller) > bb {
                    rep.fail(format!("lsc2 on {ball}"));
                }
            }
            for child in children(space, &ball, s, bounds) {
                rep.pairs += 1;
                let cb = code.ball_bound(&child);
                if cb < bb {
                    rep.fail(format!("lsc1: {child} has bound {cb} below {bb} on {ball}"));
                }
            }
            for x in probes(space, &ball, s, bounds) {
                if let Some(u) = code.upper(&x) {
                    rep.pairs += 1;
                    if bb > Ext::Fin(u.clone()) {
                        rep.fail(format!("bound {bb} on {ball} exceeds upper {} at {x}", fmt_q(&u)));
                    }
                }
            }
            if rep.items >= budget {
                return rep;
            }
        }
    }
    rep
}

/// The lsc laws plus: honest infima bracket correctly and never exceed point values.
pub fn check_honest_laws(code: &dyn HonestLscCode, bounds: &NetBounds, budget: usize) -> LawReport {
    let mut rep = check_lsc_laws(code, bounds, budget);
    let space = code.space();
    let mut seen = 0usize;
    'outer: for s in 0..=MAX_STAGE {
        let balls = stage_balls(space, s, None, bounds);
        if balls.is_empty() {
            break;
        }
        for ball in balls {
            let inf = code.ball_inf(&ball);
            seen += 1;
            if inf.lo > inf.hi {
                rep.fail(format!("honest bracket inverted on {ball}"));
            }
            for x in probes(space, &ball, s, bounds) {
                rep.pairs += 1;
                if inf.lo > code.lower(&x, 64) {
                    rep.fail(format!("honest inf {} on {ball} exceeds the value at {x}", inf.lo));
                }
            }
            if seen >= budget / 4 {
                break 'outer;
            }
        }
    }
    rep
}
