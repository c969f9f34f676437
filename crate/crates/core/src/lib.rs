//! Coset-construction search over prime fields.
//!
//! Partition `F_p^×` into the cosets `X_0, .., X_{n-1}` of its index-`n`
//! multiplicative subgroup and color an edge `(x, y)` of the complete graph on
//! `F_p` by the coset containing `x - y`. Whether the resulting relations form
//! a symmetric Ramsey, Directed Ramsey or Directed Anti-Ramsey algebra depends
//! only on which cosets lie in which sumsets `X_i + X_j`, which
//! [`cosets::SumClassTable`] computes in O(p). The [`ra`] module checks
//! explicit representations of finite integral relation algebras built from
//! unions of these cosets.

pub mod checkers;
pub mod classes;
pub mod cli;
pub mod cosets;
pub mod field;
pub mod ra;

pub use checkers::{check, search_smallest, CheckReport, Variant};
pub use classes::ClassSet;
pub use cosets::{CosetMode, CosetSystem, SumClassTable, WitnessKind};
pub use field::FieldContext;
