//! Reversal gadgets built from finite logical data, with decoding oracles,
//! witnesses and the embeddings into C[0,1].

use crate::codes::CodeError;
use crate::pl::PlError;
use crate::rational::{pow2, Q};
use crate::space::{Point, SpaceError};

mod aca;
mod expr;
mod lift;
mod pi11;
mod pseudofib;
mod tree;
mod wkl;

pub use aca::*;
pub use expr::*;
pub use lift::*;
pub use pi11::*;
pub use pseudofib::*;
pub use tree::*;
pub use wkl::*;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GadgetError {
    #[error("malformed tree: {0}")]
    Tree(String),
    #[error("tree has a path of length {depth}: {path:?}")]
    HasPath { depth: usize, path: Vec<u64> },
    #[error("table is not injective: h({a}) = h({b}) = {value}")]
    NotInjective { a: u64, b: u64, value: u64 },
    #[error("sequence is not strictly increasing at index {0}")]
    NotIncreasing(usize),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("no witness found for {0}")]
    Frontier(Point),
    #[error("decoded range {got:?} differs from the table range {expected:?}")]
    DecodeMismatch { expected: Vec<u64>, got: Vec<u64> },
    #[error("expression: {0}")]
    Expr(String),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Pl(#[from] PlError),
}

/// Length of the prefix fixed by the open ball of radius `r` in a sequence space.
pub(crate) fn open_prefix_len(r: &Q) -> usize {
    let mut m = 0usize;
    while pow2(-(m as i64)) >= *r {
        m += 1;
    }
    m
}
