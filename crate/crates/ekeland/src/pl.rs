//! Piecewise-linear rational functions on `[0, 1]`, the dense points of C[0,1].

use std::fmt;

use num_traits::{Signed, Zero};

use crate::rational::{fmt_q, int, max_q, one, zero, Q};

/// A continuous piecewise-linear function on `[0, 1]` with rational breakpoints.
///
/// Breakpoints are strictly increasing, start at 0 and end at 1. The stored
/// form is canonical: interior breakpoints collinear with their neighbours are
/// dropped, so two functions are equal iff their breakpoint lists are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlFunction {
    pts: Vec<(Q, Q)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlError {
    #[error("a piecewise-linear function needs at least two breakpoints")]
    TooFew,
    #[error("breakpoints must start at 0 and end at 1")]
    Domain,
    #[error("breakpoints must be strictly increasing (at index {0})")]
    NotIncreasing(usize),
}

impl PlFunction {
    pub fn new(pts: Vec<(Q, Q)>) -> Result<Self, PlError> {
        if pts.len() < 2 {
            return Err(PlError::TooFew);
        }
        if !pts[0].0.is_zero() || pts[pts.len() - 1].0 != one() {
            return Err(PlError::Domain);
        }
        for i in 1..pts.len() {
            if pts[i].0 <= pts[i - 1].0 {
                return Err(PlError::NotIncreasing(i));
            }
        }
        Ok(PlFunction { pts: canonical(pts) })
    }

    pub fn constant(c: Q) -> Self {
        PlFunction { pts: vec![(zero(), c.clone()), (one(), c)] }
    }

    pub fn breakpoints(&self) -> &[(Q, Q)] {
        &self.pts
    }

    pub fn eval(&self, t: &Q) -> Q {
        let pts = &self.pts;
        if t <= &pts[0].0 {
            return pts[0].1.clone();
        }
        let i = pts.partition_point(|(s, _)| s < t);
        if i >= pts.len() {
            return pts[pts.len() - 1].1.clone();
        }
        if &pts[i].0 == t {
            return pts[i].1.clone();
        }
        let (t0, v0) = &pts[i - 1];
        let (t1, v1) = &pts[i];
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    /// Exact `sup_{t in [0,1]} |self(t) - other(t)|`.
    pub fn sup_dist(&self, other: &PlFunction) -> Q {
        let (a, b) = (&self.pts, &other.pts);
        let (mut i, mut j) = (0, 0);
        let mut best = zero();
        while i < a.len() && j < b.len() {
            let diff = match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                    &a[i - 1].1 - &b[j - 1].1
                }
                std::cmp::Ordering::Less => {
                    i += 1;
                    &a[i - 1].1 - interpolate(&b[j - 1], &b[j], &a[i - 1].0)
                }
                std::cmp::Ordering::Greater => {
                    j += 1;
                    interpolate(&a[i - 1], &a[i], &b[j - 1].0) - &b[j - 1].1
                }
            };
            if diff.abs() > best {
                best = diff.abs();
            }
        }
        best
    }

    /// Exact `sup_{t in [a,b]} |self(t)|` for `0 <= a <= b <= 1`.
    pub fn sup_abs_on(&self, a: &Q, b: &Q) -> Q {
        let mut best = max_q(&self.eval(a).abs(), &self.eval(b).abs());
        for (t, v) in &self.pts {
            if a < t && t < b {
                best = max_q(&best, &v.abs());
            }
        }
        best
    }

    /// Pointwise combination; the result's breakpoints are the merged knots,
    /// which is exact when `op` is affine in both arguments.
    pub fn zip_affine(&self, other: &PlFunction, op: impl Fn(&Q, &Q) -> Q) -> PlFunction {
        let pts = merged_knots(&self.pts, &other.pts)
            .into_iter()
            .map(|t| {
                let v = op(&self.eval(&t), &other.eval(&t));
                (t, v)
            })
            .collect();
        PlFunction { pts: canonical(pts) }
    }

    pub fn map_values(&self, op: impl Fn(&Q) -> Q) -> PlFunction {
        PlFunction { pts: canonical(self.pts.iter().map(|(t, v)| (t.clone(), op(v))).collect()) }
    }

    /// The pieces `(t, v)` with `t` in `(a, b)` plus both endpoints.
    pub fn restrict_knots(&self, a: &Q, b: &Q) -> Vec<(Q, Q)> {
        let mut out = vec![(a.clone(), self.eval(a))];
        for (t, v) in &self.pts {
            if a < t && t < b {
                out.push((t.clone(), v.clone()));
            }
        }
        if a < b {
            out.push((b.clone(), self.eval(b)));
        }
        out
    }

    /// Sum of hat functions and zero elsewhere; hats must have disjoint supports.
    pub fn from_hats(hats: &[(Q, Q, Q)]) -> PlFunction {
        let mut pts = vec![(zero(), zero())];
        let mut sorted: Vec<_> = hats.to_vec();
        sorted.sort_by(|x, y| x.0.cmp(&y.0));
        for (a, b, h) in sorted {
            let mid = (&a + &b) / int(2);
            for (t, v) in [(a, zero()), (mid, h), (b, zero())] {
                if pts.last().map(|p| p.0 < t).unwrap_or(true) {
                    pts.push((t, v));
                }
            }
        }
        if pts.last().unwrap().0 < one() {
            pts.push((one(), zero()));
        }
        PlFunction { pts: canonical(pts) }
    }
}

/// The value at `t` of the segment from `p` to `q`, for `p.0 < t < q.0`.
fn interpolate(p: &(Q, Q), q: &(Q, Q), t: &Q) -> Q {
    &p.1 + (&q.1 - &p.1) * (t - &p.0) / (&q.0 - &p.0)
}

fn merged_knots(a: &[(Q, Q)], b: &[(Q, Q)]) -> Vec<Q> {
    let mut ts: Vec<Q> = a.iter().chain(b).map(|p| p.0.clone()).collect();
    ts.sort();
    ts.dedup();
    ts
}

fn canonical(pts: Vec<(Q, Q)>) -> Vec<(Q, Q)> {
    let mut out: Vec<(Q, Q)> = Vec::with_capacity(pts.len());
    for p in pts {
        while out.len() >= 2 {
            let (t0, v0) = &out[out.len() - 2];
            let (t1, v1) = &out[out.len() - 1];
            if (v1 - v0) * (&p.0 - t0) == (&p.1 - v0) * (t1 - t0) {
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    out
}

impl fmt::Display for PlFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.pts.iter().map(|(t, v)| format!("({}, {})", fmt_q(t), fmt_q(v))).collect();
        write!(f, "pl[{}]", parts.join(", "))
    }
}
