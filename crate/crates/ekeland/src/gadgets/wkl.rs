use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{open_prefix_len, GadgetError, Tree};
use crate::codes::{patch, ContRef, ContinuousCode, Modulus, PatchCode, Piece, PiecewiseLinearCode};
use crate::pl::PlFunction;
use crate::rational::{frac, int, max_q, min_q, one, pow2, zero, Bracket, Q};
use crate::space::{Ball, Point, Space};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WklTarget {
    Cantor,
    Unit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leaf {
    pub sigma: Vec<u64>,
    pub a_set: Vec<usize>,
    pub value: Q,
}

/// Where a point of Cantor space lands: inside `[σ̃]` for a leaf, or past an escape string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Leaf(usize),
    Escape(Vec<u64>),
}

/// A tile `I_τ` of `[0, 1]`: `τ` is `σ̃` for a leaf or an escape string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tile {
    pub tau: Vec<u64>,
    pub lo: Q,
    pub hi: Q,
    pub leaf: Option<usize>,
}

/// The potential attached to a binary tree without deep paths. Its values
/// are 3 past escape strings and `2 - Σ_{i∈A_σ} 4^-i` on leaf cylinders.
#[derive(Clone, Debug)]
pub struct WklGadget {
    tree: Tree,
    leaves: Vec<Leaf>,
    index: HashMap<Vec<u64>, usize>,
    below: HashMap<Vec<u64>, (Q, Q)>,
}

pub fn tilde(sigma: &[u64]) -> Vec<u64> {
    sigma.iter().flat_map(|&b| [0, b]).collect()
}

/// `[l_τ, r_τ]` with `l_τ = 0.τ` in binary and length `2^-|τ|`.
pub fn dyadic_interval(tau: &[u64]) -> (Q, Q) {
    let mut l = zero();
    for (i, &b) in tau.iter().enumerate() {
        if b == 1 {
            l += pow2(-(i as i64) - 1);
        }
    }
    let r = &l + pow2(-(tau.len() as i64));
    (l, r)
}

const ESCAPE: i64 = 3;

impl WklGadget {
    pub fn new(tree: Tree) -> Result<WklGadget, GadgetError> {
        if tree.branching() != 2 {
            return Err(GadgetError::Tree("the gadget needs a binary tree".into()));
        }
        if let Some(path) = tree.deep_path() {
            return Err(GadgetError::HasPath { depth: tree.depth(), path });
        }
        let mut leaves = Vec::new();
        let mut index = HashMap::new();
        for sigma in tree.leaves() {
            let a_set = a_set(&tree, &sigma);
            let value = int(2) - a_set.iter().map(|&i| pow2(-2 * i as i64)).sum::<Q>();
            index.insert(sigma.clone(), leaves.len());
            leaves.push(Leaf { sigma, a_set, value });
        }
        let mut g = WklGadget { tree, leaves, index, below: HashMap::new() };
        g.fill_below(&[]);
        Ok(g)
    }

    /// Range over the subtree of a non-leaf `σ` once its even bit is fixed to 0.
    fn fill_below(&mut self, sigma: &[u64]) -> (Q, Q) {
        if let Some(&i) = self.index.get(sigma) {
            let v = self.leaves[i].value.clone();
            return (v.clone(), v);
        }
        let mut lo: Option<Q> = None;
        let mut hi: Option<Q> = None;
        for b in 0..2 {
            let mut c = sigma.to_vec();
            c.push(b);
            let (l, h) = if self.tree.contains(&c) {
                let r = self.fill_below(&c);
                if self.index.contains_key(&c) { r } else { (r.0, int(ESCAPE)) }
            } else {
                (int(ESCAPE), int(ESCAPE))
            };
            lo = Some(lo.map_or(l.clone(), |x| min_q(&x, &l)));
            hi = Some(hi.map_or(h.clone(), |x| max_q(&x, &h)));
        }
        let r = (lo.unwrap(), hi.unwrap());
        self.below.insert(sigma.to_vec(), r.clone());
        r
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn leaves(&self) -> &[Leaf] {
        &self.leaves
    }

    pub fn leaf(&self, sigma: &[u64]) -> Option<&Leaf> {
        self.index.get(sigma).map(|&i| &self.leaves[i])
    }

    /// The leaf of least value, first in lexicographic order among ties.
    pub fn best_leaf(&self) -> &Leaf {
        self.leaves.iter().min_by(|a, b| a.value.cmp(&b.value)).expect("a tree has a leaf")
    }

    pub fn outcome(&self, x: &Point) -> Outcome {
        let mut sigma = Vec::new();
        let mut i = 0usize;
        loop {
            if let Some(&k) = self.index.get(&sigma) {
                return Outcome::Leaf(k);
            }
            if x.at(2 * i) != 0 {
                return Outcome::Escape(x.prefix(2 * i + 1));
            }
            sigma.push(x.at(2 * i + 1));
            if !self.tree.contains(&sigma) {
                return Outcome::Escape(x.prefix(2 * i + 2));
            }
            i += 1;
        }
    }

    pub fn value(&self, x: &Point) -> Q {
        match self.outcome(x) {
            Outcome::Leaf(k) => self.leaves[k].value.clone(),
            Outcome::Escape(_) => int(ESCAPE),
        }
    }

    /// Exact `[min, max]` of the potential over the cylinder `[p]`.
    pub fn cylinder_range(&self, p: &[u64]) -> (Q, Q) {
        let mut sigma = Vec::new();
        let mut i = 0usize;
        loop {
            if let Some(&k) = self.index.get(&sigma) {
                let v = self.leaves[k].value.clone();
                return (v.clone(), v);
            }
            let below = self.below[&sigma].clone();
            if 2 * i >= p.len() {
                return (below.0, int(ESCAPE));
            }
            if p[2 * i] != 0 {
                return (int(ESCAPE), int(ESCAPE));
            }
            if 2 * i + 1 >= p.len() {
                return below;
            }
            sigma.push(p[2 * i + 1]);
            if !self.tree.contains(&sigma) {
                return (int(ESCAPE), int(ESCAPE));
            }
            i += 1;
        }
    }

    /// The tiles `I_τ` for `τ ∈ T̃° ∪ S`, left to right; they partition `[0, 1]`.
    pub fn tiles(&self) -> Vec<Tile> {
        let mut out = Vec::new();
        self.collect_tiles(&[], &mut out);
        out.sort_by(|a, b| a.lo.cmp(&b.lo));
        out
    }

    fn collect_tiles(&self, sigma: &[u64], out: &mut Vec<Tile>) {
        let t = tilde(sigma);
        if let Some(&k) = self.index.get(sigma) {
            let (lo, hi) = dyadic_interval(&t);
            out.push(Tile { tau: t, lo, hi, leaf: Some(k) });
            return;
        }
        let mut up = t.clone();
        up.push(1);
        let (lo, hi) = dyadic_interval(&up);
        out.push(Tile { tau: up, lo, hi, leaf: None });
        for b in 0..2 {
            let mut c = sigma.to_vec();
            c.push(b);
            if self.tree.contains(&c) {
                self.collect_tiles(&c, out);
            } else {
                let mut tau = t.clone();
                tau.extend([0, b]);
                let (lo, hi) = dyadic_interval(&tau);
                out.push(Tile { tau, lo, hi, leaf: None });
            }
        }
    }

    /// The piecewise-linear potential on `[0, 1]`: 3 at tile endpoints and
    /// the leaf value at the midpoint of each leaf tile.
    pub fn unit_function(&self) -> PlFunction {
        let mut pts = vec![(zero(), int(ESCAPE))];
        for tile in self.tiles() {
            if let Some(k) = tile.leaf {
                let mid = (&tile.lo + &tile.hi) / int(2);
                pts.push((mid, self.leaves[k].value.clone()));
            }
            pts.push((tile.hi.clone(), int(ESCAPE)));
        }
        PlFunction::new(pts).expect("tiles partition the unit interval")
    }

    fn modulus(&self) -> Modulus {
        Modulus::Table { values: vec![2 * self.tree.depth() as u32] }
    }

    /// A point `y ≠ x` with `f(x) - f(y) >= d(x, y)`.
    pub fn witness(&self, x: &Point) -> Result<Point, GadgetError> {
        let space = Space::Cantor;
        let check = |y: &Point| -> bool {
            let d = space.dist(x, y).unwrap_or_else(|_| zero());
            d > zero() && self.value(x) - self.value(y) >= d
        };
        let candidate = match self.outcome(x) {
            Outcome::Escape(_) => Some(Point::seq(tilde(&self.best_leaf().sigma))),
            Outcome::Leaf(k) => self.continuation(&self.leaves[k].sigma).map(|s| Point::seq(tilde(&s))),
        };
        if let Some(y) = candidate.filter(|y| check(y)) {
            return Ok(y);
        }
        self.leaves
            .iter()
            .map(|l| Point::seq(tilde(&l.sigma)))
            .find(|y| check(y))
            .ok_or_else(|| GadgetError::Frontier(x.clone()))
    }

    /// The leaf `σ'` past the greatest `i_0 < |σ| - 1` outside `A_σ`, with `|σ'| > |σ|`.
    pub fn continuation(&self, sigma: &[u64]) -> Option<Vec<u64>> {
        let leaf = self.leaf(sigma)?;
        let n = sigma.len();
        let i0 = (0..n.saturating_sub(1)).rev().find(|i| !leaf.a_set.contains(i))?;
        let mut prefix = sigma[..=i0].to_vec();
        prefix.push(1 - sigma[i0 + 1]);
        let mut tau = self.tree.level(n + 1).into_iter().find(|t| t.starts_with(&prefix))?;
        while !self.tree.is_leaf(&tau) {
            tau = self.tree.children(&tau).remove(0);
        }
        Some(tau)
    }

    /// A point `y ≠ x` of `[0, 1]` with `g(x) - g(y) >= |x - y|`.
    pub fn unit_witness(&self, x: &Q) -> Result<Q, GadgetError> {
        let g = self.unit_function();
        let check = |y: &Q| y != x && g.eval(x) - g.eval(y) >= (x - y).abs_q();
        let mid = |s: &[u64]| {
            let (l, r) = dyadic_interval(&tilde(s));
            (l + r) / int(2)
        };
        for tile in self.tiles().iter().filter(|t| &t.lo <= x && x <= &t.hi) {
            let y = match tile.leaf {
                None => Some(mid(&self.best_leaf().sigma)),
                Some(k) => self.continuation(&self.leaves[k].sigma).map(|s| mid(&s)),
            };
            if let Some(y) = y.filter(|y| check(y)) {
                return Ok(y);
            }
        }
        self.leaves
            .iter()
            .map(|l| mid(&l.sigma))
            .find(|y| check(y))
            .ok_or_else(|| GadgetError::Frontier(Point::Real(x.clone())))
    }

    pub fn cantor_code(&self) -> WklCantorCode {
        WklCantorCode { gadget: Arc::new(self.clone()), space: Space::Cantor }
    }

    /// The unit-interval potential glued from one linear piece per tile, each
    /// valid on the tile widened by its two neighbours.
    pub fn unit_code(&self) -> Result<PatchCode, GadgetError> {
        let g = self.unit_function();
        let tiles = self.tiles();
        let n = tiles.len();
        let mut pieces = Vec::with_capacity(n);
        for j in 0..n {
            let lo = if j == 0 { zero() } else { tiles[j - 1].lo.clone() };
            let hi = if j + 1 == n { one() } else { tiles[j + 1].hi.clone() };
            let region = if n == 1 {
                Ball::new(Point::Real(frac(1, 2)), one())
            } else if j == 0 {
                Ball::new(Point::Real(zero()), hi.clone())
            } else if j + 1 == n {
                Ball::new(Point::Real(one()), one() - &lo)
            } else {
                Ball::new(Point::Real((&lo + &hi) / int(2)), (&hi - &lo) / int(2))
            };
            let mut knots = Vec::new();
            if lo > zero() {
                knots.push((zero(), g.eval(&lo)));
            }
            knots.extend(g.restrict_knots(&lo, &hi));
            if hi < one() {
                knots.push((one(), g.eval(&hi)));
            }
            let code = PiecewiseLinearCode::new(Space::UnitInterval, knots)?;
            pieces.push(Piece { regions: vec![region], code: Arc::new(code) });
        }
        Ok(patch(pieces, 10)?)
    }

    pub fn code(&self, target: WklTarget) -> Result<ContRef, GadgetError> {
        Ok(match target {
            WklTarget::Cantor => Arc::new(self.cantor_code()),
            WklTarget::Unit => Arc::new(self.unit_code()?),
        })
    }
}

trait AbsQ {
    fn abs_q(&self) -> Q;
}

impl AbsQ for Q {
    fn abs_q(&self) -> Q {
        crate::rational::abs(self)
    }
}

/// `A_σ = {i < |σ|-1 : no node of length |σ|+1 extends (σ↾(i+1))⌢(1-σ(i+1))}`.
pub fn a_set(tree: &Tree, sigma: &[u64]) -> Vec<usize> {
    let n = sigma.len();
    (0..n.saturating_sub(1))
        .filter(|&i| {
            let mut prefix = sigma[..=i].to_vec();
            prefix.push(1 - sigma[i + 1]);
            !tree.has_extension(&prefix, n + 1)
        })
        .collect()
}

pub fn wkl_gadget(tree: Tree, target: WklTarget) -> Result<ContRef, GadgetError> {
    WklGadget::new(tree)?.code(target)
}

pub fn wkl_witness(g: &WklGadget, x: &Point) -> Result<Point, GadgetError> {
    match x {
        Point::Real(t) => g.unit_witness(t).map(Point::Real),
        _ => g.witness(x),
    }
}

pub struct WklCantorCode {
    gadget: Arc<WklGadget>,
    space: Space,
}

impl WklCantorCode {
    pub fn gadget(&self) -> &WklGadget {
        &self.gadget
    }
}

impl ContinuousCode for WklCantorCode {
    fn domain(&self) -> &Space {
        &self.space
    }

    fn ball_items(&self, ball: &Ball) -> Vec<Bracket> {
        if ball.center.as_seq().is_none() {
            return vec![];
        }
        let p = ball.center.prefix(open_prefix_len(&ball.radius));
        let (lo, hi) = self.gadget.cylinder_range(&p);
        vec![Bracket::new(lo, hi)]
    }

    fn exact_value(&self, x: &Point) -> Option<Q> {
        x.as_seq().map(|_| self.gadget.value(x))
    }

    fn modulus(&self) -> Option<Modulus> {
        Some(self.gadget.modulus())
    }
}
