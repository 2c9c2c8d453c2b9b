use num_traits::Zero;

use super::GadgetError;
use crate::pl::PlFunction;
use crate::rational::{fmt_q, frac, int, one, pow2, zero, Q};
use crate::space::{Point, Space};

/// `ι(x, y)`: linear from `y` at 0 to `f_x(0)` at 1/2, then `t ↦ f_x(2t - 1)`.
/// `b = None` stands for `+∞`.
pub fn pseudofib_iota(fx: &PlFunction, y: &Q, a: &Q, b: Option<&Q>) -> Result<PlFunction, GadgetError> {
    if y < a || b.is_some_and(|b| y > b) {
        return Err(GadgetError::Parameter(format!("y = {} lies outside the fibre range", fmt_q(y))));
    }
    let mut pts = vec![(zero(), y.clone())];
    for (s, v) in fx.breakpoints() {
        pts.push(((s + one()) / int(2), v.clone()));
    }
    Ok(PlFunction::new(pts)?)
}

/// The clamp of `g(0)` into `[a, b]`.
pub fn pseudofib_pi(g: &PlFunction, a: &Q, b: Option<&Q>) -> Q {
    let v = g.eval(&zero());
    if &v < a {
        a.clone()
    } else if let Some(b) = b.filter(|b| &v > *b) {
        b.clone()
    } else {
        v
    }
}

/// `h♯(t) = h(t/2 + 1/2)`, the part of `ι(x, y)` carrying `f_x`.
pub fn sharp(h: &PlFunction) -> PlFunction {
    let half = frac(1, 2);
    let mut pts = vec![(zero(), h.eval(&half))];
    for (t, v) in h.breakpoints() {
        if t > &half {
            pts.push(((t - &half) * int(2), v.clone()));
        }
    }
    PlFunction::new(pts).expect("rescaled knots stay increasing")
}

/// Whether `h` is linear on `[0, 1/2]`.
pub fn is_flat_on_first_half(h: &PlFunction) -> bool {
    let half = frac(1, 2);
    let (y, c) = (h.eval(&zero()), h.eval(&half));
    h.breakpoints()
        .iter()
        .filter(|(t, _)| t < &half)
        .all(|(t, v)| *v == &y + (&c - &y) * t * int(2))
}

/// A closed isometry of a source space into C[0,1].
pub trait Embedding: Send + Sync {
    fn source(&self) -> &Space;

    fn embed(&self, x: &Point) -> Result<PlFunction, GadgetError>;

    /// The preimage of `h`, or `None` when `h` is not in the image.
    fn decode(&self, h: &PlFunction) -> Option<Point>;

    /// Finite source points used where a search needs them.
    fn sample(&self, k: u32) -> Vec<Point>;
}

pub fn embed_unit(r: &Q) -> Result<PlFunction, GadgetError> {
    if r < &zero() || r > &one() {
        return Err(GadgetError::Parameter(format!("{} lies outside [0, 1]", fmt_q(r))));
    }
    Ok(PlFunction::constant(r.clone()))
}

/// `‖h - 𝓘_{h(0)}‖ = 0` and `h(0) ∈ [0, 1]`.
pub fn is_unit_embedded(h: &PlFunction) -> bool {
    let c = h.eval(&zero());
    c >= zero() && c <= one() && h.sup_dist(&PlFunction::constant(c)).is_zero()
}

pub struct UnitEmbedding {
    space: Space,
}

impl UnitEmbedding {
    pub fn new() -> UnitEmbedding {
        UnitEmbedding { space: Space::UnitInterval }
    }
}

impl Default for UnitEmbedding {
    fn default() -> Self {
        Self::new()
    }
}

impl Embedding for UnitEmbedding {
    fn source(&self) -> &Space {
        &self.space
    }

    fn embed(&self, x: &Point) -> Result<PlFunction, GadgetError> {
        match x {
            Point::Real(r) => embed_unit(r),
            _ => Err(GadgetError::Parameter(format!("{x} is not a real"))),
        }
    }

    fn decode(&self, h: &PlFunction) -> Option<Point> {
        is_unit_embedded(h).then(|| Point::Real(h.eval(&zero())))
    }

    fn sample(&self, k: u32) -> Vec<Point> {
        (0..=(1i64 << k)).map(|j| Point::Real(&pow2(-(k as i64)) * int(j))).collect()
    }
}

/// `I_n = [1 - 2^-n, 1 - 2^-(n+1)]`.
pub fn i_interval(n: u32) -> (Q, Q) {
    (one() - pow2(-(n as i64)), one() - pow2(-(n as i64) - 1))
}

/// `J_n^m = [1 - 2^-(n+1) - 2^-(n+m+1), 1 - 2^-(n+1) - 2^-(n+m+2)]`.
pub fn j_interval(n: u32, m: u64) -> (Q, Q) {
    let base = one() - pow2(-(n as i64) - 1);
    let e = n as i64 + m as i64;
    (&base - pow2(-e - 1), base - pow2(-e - 2))
}

/// `F(x) = Σ_{n < depth} 2^-n Ĵ_n^{x(n)}`.
pub fn embed_baire(x: &[u64], depth: usize) -> Result<PlFunction, GadgetError> {
    if x.len() > depth {
        return Err(GadgetError::Parameter(format!(
            "sequence of length {} exceeds depth {depth}",
            x.len()
        )));
    }
    if let Some(m) = x.iter().find(|&&m| m > 4096) {
        return Err(GadgetError::Parameter(format!("entry {m} is too large")));
    }
    let hats: Vec<(Q, Q, Q)> = (0..depth)
        .map(|n| {
            let m = x.get(n).copied().unwrap_or(0);
            let (a, b) = j_interval(n as u32, m);
            (a, b, pow2(-(n as i64)))
        })
        .collect();
    Ok(PlFunction::from_hats(&hats))
}

/// Recovers `x(n)` as the unique `m` with `h` nonzero on `J_n^m`, then checks
/// that `h` is exactly the embedded point.
pub fn decode_baire(h: &PlFunction, depth: usize) -> Option<Vec<u64>> {
    let mut x = Vec::with_capacity(depth);
    for n in 0..depth {
        let (lo, hi) = i_interval(n as u32);
        let peak = h
            .breakpoints()
            .iter()
            .find(|(t, v)| &lo < t && t < &hi && !v.is_zero())?
            .0
            .clone();
        let m = (0..=4096u64).find(|&m| {
            let (a, b) = j_interval(n as u32, m);
            a < peak && peak < b
        })?;
        x.push(m);
    }
    (embed_baire(&x, depth).ok()? == *h).then_some(x)
}

pub struct BaireEmbedding {
    pub depth: usize,
    pub branching: u64,
    space: Space,
}

impl BaireEmbedding {
    pub fn new(depth: usize, branching: u64) -> BaireEmbedding {
        BaireEmbedding { depth, branching, space: Space::Baire }
    }
}

impl Embedding for BaireEmbedding {
    fn source(&self) -> &Space {
        &self.space
    }

    fn embed(&self, x: &Point) -> Result<PlFunction, GadgetError> {
        match x {
            Point::Seq(v) => embed_baire(v, self.depth),
            _ => Err(GadgetError::Parameter(format!("{x} is not a sequence"))),
        }
    }

    fn decode(&self, h: &PlFunction) -> Option<Point> {
        decode_baire(h, self.depth).map(Point::seq)
    }

    fn sample(&self, k: u32) -> Vec<Point> {
        let len = (k as usize).min(self.depth);
        crate::util::words(self.branching, len).into_iter().map(Point::seq).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iota_and_pi() {
        let fx = embed_unit(&frac(1, 3)).unwrap();
        let z = pseudofib_iota(&fx, &frac(1, 5), &zero(), Some(&one())).unwrap();
        assert_eq!(z.eval(&zero()), frac(1, 5));
        assert_eq!(z.eval(&frac(3, 4)), frac(1, 3));
        assert_eq!(pseudofib_pi(&z, &zero(), Some(&one())), frac(1, 5));
        assert_eq!(sharp(&z), fx);
        assert!(is_flat_on_first_half(&z));
        assert_eq!(pseudofib_pi(&PlFunction::constant(int(-1)), &zero(), Some(&one())), zero());
        assert_eq!(pseudofib_pi(&PlFunction::constant(int(7)), &zero(), Some(&one())), one());
    }

    #[test]
    fn baire_embedding() {
        let f = embed_baire(&[2, 0, 1], 4).unwrap();
        for n in 0..4 {
            let (a, b) = i_interval(n);
            assert_eq!(f.sup_abs_on(&a, &b), pow2(-(n as i64)));
        }
        assert_eq!(decode_baire(&f, 4), Some(vec![2, 0, 1, 0]));
        let g = embed_baire(&[1], 4).unwrap();
        let h = embed_baire(&[0], 4).unwrap();
        assert_eq!(g.sup_dist(&h), one());
        assert_eq!(decode_baire(&PlFunction::constant(zero()), 2), None);
    }
}
