use super::{open_prefix_len, Tree};
use crate::codes::{HonestLscCode, LscCode};
use crate::rational::{pow2, zero, Ext, ExtBracket, Q};
use crate::space::{Ball, Point, Space};
use crate::util::pair;

/// `f(x) = Σ {2^-i : (x)_i ∉ [T_i]}` where `(x)_i(n) = x(<i, n>)`, and a
/// slice counts as a path when its first `D_i` entries form a node of `T_i`.
#[derive(Clone, Debug)]
pub struct Pi11Gadget {
    trees: Vec<Tree>,
    space: Space,
}

impl Pi11Gadget {
    pub fn new(trees: Vec<Tree>) -> Pi11Gadget {
        Pi11Gadget { trees, space: Space::Baire }
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn slice(x: &Point, i: usize, len: usize) -> Vec<u64> {
        (0..len).map(|n| x.at(pair(i as u64, n as u64) as usize)).collect()
    }

    /// Which slices of `x` are deep paths.
    pub fn decode(&self, x: &Point) -> Vec<bool> {
        self.trees
            .iter()
            .enumerate()
            .map(|(i, t)| t.contains(&Self::slice(x, i, t.depth())))
            .collect()
    }

    /// Bounded depth-first search for a deep path in each tree.
    pub fn oracle(&self) -> Vec<bool> {
        self.trees.iter().map(|t| t.deep_path().is_some()).collect()
    }

    pub fn value(&self, x: &Point) -> Q {
        self.decode(x)
            .iter()
            .enumerate()
            .filter(|(_, &p)| !p)
            .map(|(i, _)| pow2(-(i as i64)))
            .sum()
    }

    /// Exact infimum over the points extending `p`.
    pub fn cylinder_inf(&self, p: &[u64]) -> Q {
        let mut total = zero();
        for (i, t) in self.trees.iter().enumerate() {
            let fixed: Vec<u64> = (0..t.depth())
                .map(|n| pair(i as u64, n as u64) as usize)
                .take_while(|&pos| pos < p.len())
                .map(|pos| p[pos])
                .collect();
            if !t.has_extension(&fixed, t.depth()) {
                total += pow2(-(i as i64));
            }
        }
        total
    }

    /// The point whose slices are the given finite sequences.
    pub fn assemble(slices: &[Vec<u64>]) -> Point {
        let mut v: Vec<u64> = Vec::new();
        for (i, s) in slices.iter().enumerate() {
            for (n, &e) in s.iter().enumerate() {
                let pos = pair(i as u64, n as u64) as usize;
                if v.len() <= pos {
                    v.resize(pos + 1, 0);
                }
                v[pos] = e;
            }
        }
        Point::seq(v)
    }

    /// Each slice threads the first deep path of its tree, or is zero.
    pub fn optimum(&self) -> Point {
        let slices: Vec<Vec<u64>> = self.trees.iter().map(|t| t.deep_path().unwrap_or_default()).collect();
        Self::assemble(&slices)
    }

    /// Products of per-tree slice choices: every deep node of `T_i`, and the zero slice.
    pub fn slice_net(&self) -> Vec<Point> {
        let mut acc: Vec<Vec<Vec<u64>>> = vec![vec![]];
        for t in &self.trees {
            let mut choices = vec![vec![]];
            for node in t.level(t.depth()) {
                if node.iter().any(|&e| e != 0) {
                    choices.push(node);
                }
            }
            let mut next = Vec::new();
            for prefix in &acc {
                for c in &choices {
                    let mut v = prefix.clone();
                    v.push(c.clone());
                    next.push(v);
                }
            }
            acc = next;
        }
        acc.iter().map(|s| Self::assemble(s)).collect()
    }

    pub fn code(&self) -> Pi11Code {
        Pi11Code { gadget: self.clone() }
    }
}

pub fn pi11_gadget(trees: Vec<Tree>) -> Pi11Code {
    Pi11Gadget::new(trees).code()
}

pub struct Pi11Code {
    gadget: Pi11Gadget,
}

impl Pi11Code {
    pub fn gadget(&self) -> &Pi11Gadget {
        &self.gadget
    }
}

impl LscCode for Pi11Code {
    fn space(&self) -> &Space {
        &self.gadget.space
    }

    fn ball_bound(&self, ball: &Ball) -> Ext {
        self.ball_inf(ball).lo
    }

    fn upper(&self, x: &Point) -> Option<Q> {
        x.as_seq().map(|_| self.gadget.value(x))
    }

    fn lower(&self, x: &Point, _budget: u32) -> Ext {
        Ext::Fin(self.gadget.value(x))
    }
}

impl HonestLscCode for Pi11Code {
    fn ball_inf(&self, ball: &Ball) -> ExtBracket {
        if ball.center.as_seq().is_none() {
            return ExtBracket::exact(Ext::Fin(zero()));
        }
        let p = ball.center.prefix(open_prefix_len(&ball.radius));
        ExtBracket::exact(Ext::Fin(self.gadget.cylinder_inf(&p)))
    }
}
