//! Codes for continuous and lower semi-continuous functions.
//!
//! A continuous code answers, for a rational ball, the value intervals it
//! enumerates on exactly that ball. An lsc code answers the supremum of the
//! lower bounds `q` it enumerates for a ball. Honest codes additionally answer
//! the infimum of the function over a ball.

use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{fmt_q, pow2, zero, Bracket, Ext, ExtBracket, Q};
use crate::space::{Ball, Point, Space, SpaceError};

mod cont;
mod laws;
mod lsc;
mod sets;

pub use cont::*;
pub use laws::*;
pub use lsc::*;
pub use sets::*;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CodeError {
    #[error("enumeration budget exhausted before reaching the requested precision (best bracket: {})", fmt_best(.best))]
    BudgetExceeded { best: Option<Bracket> },
    #[error("samples {i} and {j} violate the modulus at n = {n}: {detail}")]
    ModulusViolation { i: usize, j: usize, n: u32, detail: String },
    #[error("pieces {i} and {j} disagree at {point}")]
    PatchConflict { i: usize, j: usize, point: Point },
    #[error("items on one ball do not overlap: {0}")]
    Inconsistent(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("closed set is not upward closed: {0}")]
    NotUpwardClosed(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

fn fmt_best(b: &Option<Bracket>) -> String {
    b.as_ref().map_or("none".into(), |b| b.to_string())
}

/// Modulus of uniform continuity `n ↦ m`: points closer than `2^-m` have
/// values closer than `2^-n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Modulus {
    /// `n ↦ max(0, n + shift)`.
    Shift { shift: i64 },
    /// `n ↦ 2^(n+1)`.
    Exp,
    /// Explicit values; past the end the last value grows by one per step.
    Table { values: Vec<u32> },
}

impl Modulus {
    pub fn identity() -> Modulus {
        Modulus::Shift { shift: 0 }
    }

    /// The modulus of an `alpha`-Lipschitz function.
    pub fn lipschitz(alpha: &Q) -> Modulus {
        if !alpha.is_positive() {
            return Modulus::identity();
        }
        Modulus::Shift { shift: ceil_log2(alpha) }
    }

    pub fn at(&self, n: u32) -> u32 {
        match self {
            Modulus::Shift { shift } => (n as i64 + shift).max(0) as u32,
            Modulus::Exp => 1u32.checked_shl(n + 1).unwrap_or(u32::MAX),
            Modulus::Table { values } => match values.get(n as usize) {
                Some(v) => *v,
                None => match values.last() {
                    Some(v) => v + (n + 1 - values.len() as u32),
                    None => n,
                },
            },
        }
    }

    pub fn is_monotone(&self) -> bool {
        match self {
            Modulus::Table { values } => values.windows(2).all(|w| w[0] <= w[1]),
            _ => true,
        }
    }
}

/// Least integer `m` with `2^m >= q`, for `q > 0`.
pub fn ceil_log2(q: &Q) -> i64 {
    let mut m = 0i64;
    while pow2(m) < *q {
        m += 1;
    }
    while pow2(m - 1) >= *q {
        m -= 1;
    }
    m
}

pub trait ContinuousCode: Send + Sync {
    fn domain(&self) -> &Space;

    /// Value intervals enumerated for exactly this ball.
    fn ball_items(&self, ball: &Ball) -> Vec<Bracket>;

    /// The exact value at a finitely represented point, when the code knows it.
    fn exact_value(&self, _x: &Point) -> Option<Q> {
        None
    }

    fn modulus(&self) -> Option<Modulus> {
        None
    }

    /// A value bracket at `x` computed directly, for codes that can do better
    /// than intersecting ball items.
    fn point_bracket(&self, _x: &Point, _k: u32) -> Option<Bracket> {
        None
    }
}

pub trait LscCode: Send + Sync {
    fn space(&self) -> &Space;

    /// Declared lower bound of the function (0 for potentials).
    fn floor(&self) -> Q {
        zero()
    }

    /// Supremum of the bounds `q` enumerated for this ball, never below the floor.
    fn ball_bound(&self, ball: &Ball) -> Ext;

    /// A finite upper bound on the value at `x`; `None` when no evidence is known.
    fn upper(&self, x: &Point) -> Option<Q>;

    /// A lower bound on the value at `x` from balls `B(x, 2^-s)`, `s < budget`.
    fn lower(&self, x: &Point, budget: u32) -> Ext {
        let mut best = Ext::Fin(self.floor());
        for s in 0..budget {
            let b = Ball::new(x.clone(), pow2(-(s as i64)));
            best = best.max(self.ball_bound(&b));
        }
        best
    }
}

pub trait HonestLscCode: LscCode {
    /// Bracket for the infimum of the function over the ball.
    fn ball_inf(&self, ball: &Ball) -> ExtBracket;
}

pub type ContRef = Arc<dyn ContinuousCode>;
pub type LscRef = Arc<dyn LscCode>;
pub type HonestRef = Arc<dyn HonestLscCode>;

/// Largest stage tried by [`eval_cont`] beyond the requested precision.
pub const EXTRA_STAGES: u32 = 64;

/// Brackets the value at `x` to width `2^-k` by intersecting the items on
/// `B(x, 2^-s)` for growing `s`.
pub fn eval_cont(code: &dyn ContinuousCode, x: &Point, k: u32) -> Result<Bracket, CodeError> {
    eval_cont_staged(code, x, k, k + EXTRA_STAGES)
}

pub fn eval_cont_staged(
    code: &dyn ContinuousCode,
    x: &Point,
    k: u32,
    max_stage: u32,
) -> Result<Bracket, CodeError> {
    if let Some(v) = code.exact_value(x) {
        return Ok(Bracket::exact(v));
    }
    let target = pow2(-(k as i64));
    let mut best: Option<Bracket> = code.point_bracket(x, k);
    if best.as_ref().is_some_and(|b| b.width() <= target) {
        return Ok(best.unwrap());
    }
    for s in 0..=max_stage {
        let ball = Ball::new(x.clone(), pow2(-(s as i64)));
        for item in code.ball_items(&ball) {
            best = Some(match best {
                None => item,
                Some(b) => b.intersect(&item).ok_or_else(|| {
                    CodeError::Inconsistent(format!("{b} and {item} on {ball}"))
                })?,
            });
        }
        if let Some(b) = &best {
            if b.width() <= target {
                return Ok(b.clone());
            }
        }
    }
    Err(CodeError::BudgetExceeded { best })
}

/// Lower bound on `f(x)`; the declared floor at budget 0.
pub fn eval_lsc_lower(code: &dyn LscCode, x: &Point, budget: u32) -> Ext {
    if budget == 0 {
        return Ext::Fin(code.floor());
    }
    code.lower(x, budget).max(Ext::Fin(code.floor()))
}

pub fn honest_ball_inf(code: &dyn HonestLscCode, ball: &Ball) -> ExtBracket {
    code.ball_inf(ball)
}

/// Value bracket at `x` from lower and upper evidence, when both are finite.
pub fn lsc_bracket(code: &dyn LscCode, x: &Point, budget: u32) -> Option<Bracket> {
    let hi = code.upper(x)?;
    match code.lower(x, budget.max(1)).max(Ext::Fin(code.floor())) {
        Ext::Fin(lo) if lo <= hi => Some(Bracket::new(lo, hi)),
        _ => None,
    }
}

/// Interval `[max(a, c - r), min(b, c + r)]`: the closure of a ball cut to an interval space.
pub(crate) fn interval_hull(space: &Space, ball: &Ball) -> Option<(Q, Q)> {
    let (a, b) = space.base().interval()?;
    let c = ball.center.as_real()?;
    let lo = crate::rational::max_q(&a, &(c - &ball.radius));
    let hi = crate::rational::min_q(&b, &(c + &ball.radius));
    (lo <= hi).then_some((lo, hi))
}

pub(crate) fn require_positive(name: &str, q: &Q) -> Result<(), CodeError> {
    if q.is_positive() {
        Ok(())
    } else {
        Err(CodeError::Parameter(format!("{name} must be positive, got {}", fmt_q(q))))
    }
}

pub(crate) fn require_same_space(a: &Space, b: &Space) -> Result<(), CodeError> {
    if a == b {
        Ok(())
    } else {
        Err(CodeError::Parameter(format!("codes live on {} and {}", a.name(), b.name())))
    }
}

/// Largest `m >= 0` with `x < 2^-m` (`u32::MAX` for `x = 0`), or `None` when `x >= 1`.
pub(crate) fn below_exp(x: &Q) -> Option<u32> {
    if x.is_zero() {
        return Some(u32::MAX);
    }
    crate::rational::least_exp_below(x).checked_sub(1)
}
