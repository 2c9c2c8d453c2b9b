//! Exact rational helpers, brackets and the extended reals used for values.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Q = BigRational;

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// `2^k` for any integer `k`.
pub fn pow2(k: i64) -> Q {
    let base = BigInt::one() << (k.unsigned_abs() as usize);
    if k >= 0 {
        Q::from_integer(base)
    } else {
        Q::new(BigInt::one(), base)
    }
}

pub fn min_q(a: &Q, b: &Q) -> Q {
    if a <= b { a.clone() } else { b.clone() }
}

pub fn max_q(a: &Q, b: &Q) -> Q {
    if a >= b { a.clone() } else { b.clone() }
}

/// Least `m >= 0` with `2^-m <= x`, for `x > 0`.
pub fn least_exp_below(x: &Q) -> u32 {
    let mut m = 0u32;
    let mut p = Q::one();
    while &p > x {
        p /= int(2);
        m += 1;
    }
    m
}

/// Parses `"n"`, `"n/d"` or the signed variants into an exact rational.
pub fn parse_q(s: &str) -> Result<Q, String> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt, String> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| format!("not a rational literal: {s:?}"))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(Q::new(parse_int(n)?, d))
        }
        None => Ok(Q::from_integer(parse_int(s)?)),
    }
}

/// `n` for integers, `n/d` otherwise.
pub fn fmt_q(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Serialize, Deserialize)]
struct Repr {
    num: String,
    den: String,
}

/// Inputs may also use the `"n/d"` literal form.
#[derive(Deserialize)]
#[serde(untagged)]
enum Input {
    Repr(Repr),
    Literal(String),
}

/// Serde adapter writing a rational as `{"num": "..", "den": ".."}`.
pub mod qser {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
        Repr { num: q.numer().to_string(), den: q.denom().to_string() }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let r = match Input::deserialize(d)? {
            Input::Repr(r) => r,
            Input::Literal(s) => return parse_q(&s).map_err(serde::de::Error::custom),
        };
        let num: BigInt = r.num.parse().map_err(serde::de::Error::custom)?;
        let den: BigInt = r.den.parse().map_err(serde::de::Error::custom)?;
        if den.is_zero() {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Q::new(num, den))
    }
}

pub mod qser_opt {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_some(&Rat(q.clone())),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Q>, D::Error> {
        Ok(Option::<Rat>::deserialize(d)?.map(|r| r.0))
    }
}

pub mod qser_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|q| Rat(q.clone())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        Ok(Vec::<Rat>::deserialize(d)?.into_iter().map(|r| r.0).collect())
    }
}

/// Newtype carrying the `{"num","den"}` serde form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(pub Q);

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        qser::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        qser::deserialize(d).map(Rat)
    }
}

/// A closed interval `[lo, hi]` of exact rationals bounding a real value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bracket {
    #[serde(with = "qser")]
    pub lo: Q,
    #[serde(with = "qser")]
    pub hi: Q,
}

impl Bracket {
    pub fn new(lo: Q, hi: Q) -> Self {
        assert!(lo <= hi, "bracket with lo > hi");
        Bracket { lo, hi }
    }

    pub fn exact(v: Q) -> Self {
        Bracket { lo: v.clone(), hi: v }
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Q {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn contains(&self, v: &Q) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn intersect(&self, other: &Bracket) -> Option<Bracket> {
        let lo = max_q(&self.lo, &other.lo);
        let hi = min_q(&self.hi, &other.hi);
        (lo <= hi).then(|| Bracket { lo, hi })
    }

    pub fn overlaps(&self, other: &Bracket) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_subset_of(&self, other: &Bracket) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn scale(&self, c: &Q) -> Bracket {
        if c.is_negative() {
            Bracket { lo: &self.hi * c, hi: &self.lo * c }
        } else {
            Bracket { lo: &self.lo * c, hi: &self.hi * c }
        }
    }

    pub fn add(&self, other: &Bracket) -> Bracket {
        Bracket { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", fmt_q(&self.lo), fmt_q(&self.hi))
    }
}

/// Nonnegative-side extended rationals: a finite value or `+inf`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ext {
    Fin(Q),
    Inf,
}

impl Ext {
    pub fn fin(&self) -> Option<&Q> {
        match self {
            Ext::Fin(q) => Some(q),
            Ext::Inf => None,
        }
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, Ext::Inf)
    }

    pub fn add_q(&self, q: &Q) -> Ext {
        match self {
            Ext::Fin(v) => Ext::Fin(v + q),
            Ext::Inf => Ext::Inf,
        }
    }

    pub fn min(self, other: Ext) -> Ext {
        if self <= other { self } else { other }
    }

    pub fn max(self, other: Ext) -> Ext {
        if self >= other { self } else { other }
    }
}

impl From<Q> for Ext {
    fn from(q: Q) -> Self {
        Ext::Fin(q)
    }
}

impl From<Option<Q>> for Ext {
    fn from(q: Option<Q>) -> Self {
        q.map_or(Ext::Inf, Ext::Fin)
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ext {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Ext::Fin(a), Ext::Fin(b)) => a.cmp(b),
            (Ext::Fin(_), Ext::Inf) => Ordering::Less,
            (Ext::Inf, Ext::Fin(_)) => Ordering::Greater,
            (Ext::Inf, Ext::Inf) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Fin(q) => f.write_str(&fmt_q(q)),
            Ext::Inf => f.write_str("+inf"),
        }
    }
}

/// Bracket over the extended reals; used for ball infima that may be `+inf`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtBracket {
    pub lo: Ext,
    pub hi: Ext,
}

impl ExtBracket {
    pub fn exact(v: Ext) -> Self {
        ExtBracket { lo: v.clone(), hi: v }
    }

    pub fn finite(b: Bracket) -> Self {
        ExtBracket { lo: Ext::Fin(b.lo), hi: Ext::Fin(b.hi) }
    }

    pub fn to_bracket(&self) -> Option<Bracket> {
        match (&self.lo, &self.hi) {
            (Ext::Fin(a), Ext::Fin(b)) => Some(Bracket::new(a.clone(), b.clone())),
            _ => None,
        }
    }
}

pub fn abs(q: &Q) -> Q {
    q.abs()
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "3", "-7/2", "1/3"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(parse_q("2/4").unwrap(), frac(1, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn powers_of_two() {
        assert_eq!(pow2(3), int(8));
        assert_eq!(pow2(-3), frac(1, 8));
        assert_eq!(least_exp_below(&frac(1, 5)), 3);
        assert_eq!(least_exp_below(&int(1)), 0);
    }

    #[test]
    fn serde_form() {
        let b = Bracket::new(frac(-1, 3), int(2));
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(s, r#"{"lo":{"num":"-1","den":"3"},"hi":{"num":"2","den":"1"}}"#);
        assert_eq!(serde_json::from_str::<Bracket>(&s).unwrap(), b);
    }

    #[test]
    fn ext_order() {
        assert!(Ext::Fin(int(5)) < Ext::Inf);
        assert_eq!(Ext::Inf.min(Ext::Fin(int(1))), Ext::Fin(int(1)));
    }
}
