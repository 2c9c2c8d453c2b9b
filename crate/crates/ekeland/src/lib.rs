//! Exact-rational coded analysis around Ekeland's variational principle.

pub mod codes;
pub mod codespec;
pub mod critical;
pub mod envelope;
pub mod gadgets;
pub mod pl;
pub mod rational;
pub mod space;
pub mod util;
