use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{open_prefix_len, GadgetError};
use crate::codes::{ContinuousCode, HonestLscCode, LscCode, Modulus, PiecewiseLsc};
use crate::rational::{int, max_q, one, pow2, qser_vec, zero, Bracket, Ext, ExtBracket, Q};
use crate::space::{Ball, Point, Space};

/// Largest `N` accepted, so that slot `2^(N+1)` stays a small index.
pub const MAX_ACA_N: u32 = 16;

/// A finite injection `a ↦ h(a)`; natural numbers code finite sets of
/// arguments as bitmasks, so arguments are below 64.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectionTable {
    pub pairs: Vec<(u64, u64)>,
}

impl InjectionTable {
    pub fn new(pairs: Vec<(u64, u64)>) -> Result<InjectionTable, GadgetError> {
        for (i, (a, ha)) in pairs.iter().enumerate() {
            if *a >= 64 {
                return Err(GadgetError::Parameter(format!("argument {a} does not fit a 64-bit set code")));
            }
            for (b, hb) in &pairs[..i] {
                if a == b {
                    return Err(GadgetError::Parameter(format!("argument {a} listed twice")));
                }
                if ha == hb {
                    return Err(GadgetError::NotInjective { a: *b, b: *a, value: *ha });
                }
            }
        }
        Ok(InjectionTable { pairs })
    }

    pub fn identity(n: u64) -> InjectionTable {
        InjectionTable { pairs: (0..n).map(|a| (a, a)).collect() }
    }

    pub fn h(&self, a: u64) -> Option<u64> {
        self.pairs.iter().find(|p| p.0 == a).map(|p| p.1)
    }

    /// Bitmask of `D_n = {a : h(a) < n}`.
    pub fn below_mask(&self, n: u64) -> u64 {
        self.pairs.iter().filter(|p| p.1 < n).fold(0, |m, p| m | (1u64 << p.0))
    }

    /// The range of `h` below `n`.
    pub fn range_below(&self, n: u64) -> BTreeSet<u64> {
        self.pairs.iter().map(|p| p.1).filter(|&v| v < n).collect()
    }
}

/// `f = 1 - Σ_{n<N} 2^(-2n-1+v_n(x(2^(n+1))))` with `v_n(D) = |{a ∈ D : h(a) < n}|`.
#[derive(Clone, Debug)]
pub struct AcaInjection {
    table: InjectionTable,
    n: u32,
    space: Space,
}

pub fn slot(n: u32) -> usize {
    1usize << (n + 1)
}

impl AcaInjection {
    pub fn new(table: InjectionTable, n: u32) -> Result<AcaInjection, GadgetError> {
        let table = InjectionTable::new(table.pairs)?;
        if n > MAX_ACA_N {
            return Err(GadgetError::Parameter(format!("N = {n} exceeds {MAX_ACA_N}")));
        }
        Ok(AcaInjection { table, n, space: Space::Baire })
    }

    pub fn table(&self) -> &InjectionTable {
        &self.table
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn v(&self, n: u32, d: u64) -> u32 {
        self.table
            .pairs
            .iter()
            .filter(|p| p.0 < 64 && d & (1 << p.0) != 0 && p.1 < n as u64)
            .count() as u32
    }

    pub fn term(&self, n: u32, d: u64) -> Q {
        pow2(-2 * n as i64 - 1 + self.v(n, d) as i64)
    }

    pub fn value(&self, x: &Point) -> Q {
        one() - (0..self.n).map(|n| self.term(n, x.at(slot(n)))).sum::<Q>()
    }

    /// Exact range over the points whose first `m` entries are those of `x`.
    pub fn cylinder_range(&self, x: &Point, m: usize) -> Bracket {
        let mut small = zero();
        let mut large = zero();
        for n in 0..self.n {
            if slot(n) < m {
                let t = self.term(n, x.at(slot(n)));
                small += &t;
                large += t;
            } else {
                let top = self.table.pairs.iter().filter(|p| p.1 < n as u64).count() as i64;
                small += pow2(-2 * n as i64 - 1);
                large += pow2(-2 * n as i64 - 1 + top);
            }
        }
        Bracket::new(one() - large, one() - small)
    }

    /// The optimum: slot `2^(n+1)` holds `D_n` for every `n <= N`.
    pub fn optimum(&self) -> Point {
        let mut v = vec![0u64; slot(self.n) + 1];
        for n in 0..=self.n {
            v[slot(n)] = self.table.below_mask(n as u64);
        }
        Point::seq(v)
    }

    /// `x` with slot `2^(n+1)` replaced by the set code `d`.
    pub fn perturb(&self, x: &Point, n: u32, d: u64) -> Point {
        let mut v = x.prefix(x.as_seq().map_or(0, |s| s.len()).max(slot(n) + 1));
        v[slot(n)] = d;
        Point::seq(v)
    }

    /// Single-slot perturbations over every subset of the table's arguments.
    pub fn perturbation_net(&self, x: &Point) -> Vec<Point> {
        let args: Vec<u64> = self.table.pairs.iter().map(|p| p.0).collect();
        let mut out = vec![x.clone()];
        for n in 0..self.n {
            for bits in 0u64..(1 << args.len()) {
                let d = args.iter().enumerate().filter(|(i, _)| bits & (1 << i) != 0).fold(0, |m, (_, a)| m | (1 << a));
                let y = self.perturb(x, n, d);
                if !out.contains(&y) {
                    out.push(y);
                }
            }
        }
        out
    }

    /// `{n < N : ∃ a ∈ D_{n+1}, h(a) = n}` read off `x`.
    pub fn decode(&self, x: &Point) -> BTreeSet<u64> {
        (0..self.n)
            .filter(|&n| {
                let d = x.at(slot(n + 1));
                self.table.pairs.iter().any(|p| p.1 == n as u64 && d & (1 << p.0) != 0)
            })
            .map(|n| n as u64)
            .collect()
    }

    pub fn code(&self) -> AcaInjectionCode {
        AcaInjectionCode { gadget: self.clone() }
    }
}

pub fn aca_injection_gadget(table: InjectionTable, n: u32) -> Result<AcaInjectionCode, GadgetError> {
    Ok(AcaInjection::new(table, n)?.code())
}

/// The decoded range below `N`, checked against the table.
pub fn aca_decode_range(x: &Point, n: u32, table: &InjectionTable) -> Result<BTreeSet<u64>, GadgetError> {
    let g = AcaInjection::new(table.clone(), n)?;
    let got = g.decode(x);
    let expected = table.range_below(n as u64);
    if got != expected {
        return Err(GadgetError::DecodeMismatch {
            expected: expected.into_iter().collect(),
            got: got.into_iter().collect(),
        });
    }
    Ok(got)
}

pub struct AcaInjectionCode {
    gadget: AcaInjection,
}

impl AcaInjectionCode {
    pub fn gadget(&self) -> &AcaInjection {
        &self.gadget
    }
}

impl ContinuousCode for AcaInjectionCode {
    fn domain(&self) -> &Space {
        &self.gadget.space
    }

    fn ball_items(&self, ball: &Ball) -> Vec<Bracket> {
        if ball.center.as_seq().is_none() {
            return vec![];
        }
        vec![self.gadget.cylinder_range(&ball.center, open_prefix_len(&ball.radius))]
    }

    fn exact_value(&self, x: &Point) -> Option<Q> {
        x.as_seq().map(|_| self.gadget.value(x))
    }

    fn modulus(&self) -> Option<Modulus> {
        Some(Modulus::Exp)
    }
}

/// `f(x) = 2` if `x < c_n` for some `n`, else `x`, for a finite strictly
/// increasing prefix `c` of a sequence in `[0, 1]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AcaSup {
    #[serde(with = "qser_vec")]
    c: Vec<Q>,
}

impl AcaSup {
    pub fn new(c: Vec<Q>) -> Result<AcaSup, GadgetError> {
        for (i, q) in c.iter().enumerate() {
            if q < &zero() || q > &one() {
                return Err(GadgetError::Parameter(format!("c_{i} lies outside [0, 1]")));
            }
            if i > 0 && &c[i - 1] >= q {
                return Err(GadgetError::NotIncreasing(i));
            }
        }
        Ok(AcaSup { c })
    }

    pub fn c(&self) -> &[Q] {
        &self.c
    }

    pub fn sup(&self) -> Option<&Q> {
        self.c.last()
    }

    pub fn value(&self, x: &Q) -> Q {
        match self.sup() {
            Some(s) if x < s => int(2),
            _ => x.clone(),
        }
    }

    /// The enumerated bounds for `(u, v)`: `q <= u` and `q <= 2` when `v < c_n`.
    fn raw_bound(&self, u: &Q, v: &Q) -> Q {
        let mut q = max_q(&zero(), u);
        if self.sup().is_some_and(|s| v < s) {
            q = int(2);
        }
        q
    }

    /// The raw bounds plus `q <= c_n` for `c_n < v`, and `q <= 2` once the
    /// open ball ends at or before the last `c_n`.
    fn honest_bound(&self, u: &Q, v: &Q) -> Q {
        let mut q = self.raw_bound(u, v);
        if self.sup().is_some_and(|s| v <= s) {
            q = int(2);
        }
        if let Some(c) = self.c.iter().filter(|c| *c < v).next_back() {
            q = max_q(&q, c);
        }
        q
    }

    fn exact(&self) -> PiecewiseLsc {
        let fin = |q: Q| Ext::Fin(q);
        let s = self.sup().cloned().unwrap_or_else(zero);
        let built = if s.is_zero() {
            PiecewiseLsc::new(Space::UnitInterval, vec![zero(), one()], vec![fin(zero()), fin(one())], vec![Some((zero(), one()))])
        } else if s == one() {
            PiecewiseLsc::new(Space::UnitInterval, vec![zero(), one()], vec![fin(int(2)), fin(one())], vec![Some((int(2), int(2)))])
        } else {
            PiecewiseLsc::new(
                Space::UnitInterval,
                vec![zero(), s.clone(), one()],
                vec![fin(int(2)), fin(s.clone()), fin(one())],
                vec![Some((int(2), int(2))), Some((s, one()))],
            )
        };
        built.expect("the sup potential is lsc")
    }

    pub fn raw_code(&self) -> AcaSupRaw {
        AcaSupRaw { gadget: self.clone(), space: Space::UnitInterval }
    }

    pub fn code(&self) -> AcaSupCode {
        AcaSupCode { exact: Arc::new(self.exact()), gadget: self.clone(), space: Space::UnitInterval }
    }
}

pub fn aca_sup_gadget(c: Vec<Q>) -> Result<AcaSupCode, GadgetError> {
    Ok(AcaSup::new(c)?.code())
}

fn ends(ball: &Ball) -> Option<(Q, Q)> {
    let c = ball.center.as_real()?;
    Some((c - &ball.radius, c + &ball.radius))
}

/// The sup potential with only the two enumeration rules that need no honesty.
pub struct AcaSupRaw {
    gadget: AcaSup,
    space: Space,
}

impl LscCode for AcaSupRaw {
    fn space(&self) -> &Space {
        &self.space
    }

    fn ball_bound(&self, ball: &Ball) -> Ext {
        ends(ball).map_or(Ext::Fin(zero()), |(u, v)| Ext::Fin(self.gadget.raw_bound(&u, &v)))
    }

    fn upper(&self, x: &Point) -> Option<Q> {
        x.as_real().map(|t| self.gadget.value(t))
    }
}

pub struct AcaSupCode {
    gadget: AcaSup,
    exact: Arc<PiecewiseLsc>,
    space: Space,
}

impl AcaSupCode {
    pub fn gadget(&self) -> &AcaSup {
        &self.gadget
    }
}

impl LscCode for AcaSupCode {
    fn space(&self) -> &Space {
        &self.space
    }

    fn ball_bound(&self, ball: &Ball) -> Ext {
        ends(ball).map_or(Ext::Fin(zero()), |(u, v)| Ext::Fin(self.gadget.honest_bound(&u, &v)))
    }

    fn upper(&self, x: &Point) -> Option<Q> {
        x.as_real().map(|t| self.gadget.value(t))
    }

    fn lower(&self, x: &Point, _budget: u32) -> Ext {
        x.as_real().map_or(Ext::Fin(zero()), |t| Ext::Fin(self.gadget.value(t)))
    }
}

impl HonestLscCode for AcaSupCode {
    fn ball_inf(&self, ball: &Ball) -> ExtBracket {
        if ball.center.as_real().is_none() {
            return ExtBracket::exact(Ext::Fin(zero()));
        }
        self.exact.ball_inf(ball)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn injection_examples() {
        let g = AcaInjection::new(InjectionTable::identity(6), 3).unwrap();
        assert_eq!(g.value(&g.optimum()), frac(1, 8));
        assert_eq!(g.value(&Point::seq(vec![])), frac(11, 32));
        assert!(InjectionTable::new(vec![(0, 1), (1, 1)]).is_err());
    }

    #[test]
    fn sup_examples() {
        let c: Vec<Q> = (0..16).map(|n| frac(1, 2) - pow2(-n - 1)).collect();
        let g = AcaSup::new(c).unwrap();
        assert_eq!(g.value(&frac(1, 4)), int(2));
        assert_eq!(g.value(&frac(3, 4)), frac(3, 4));
        let code = g.code();
        let b = Ball::new(Point::Real(frac(3, 4)), frac(3, 20));
        assert_eq!(code.ball_inf(&b).lo, Ext::Fin(frac(3, 5)));
        assert!(AcaSup::new(vec![frac(1, 2), frac(1, 4)]).is_err());
    }
}
