//! Classification and synthesis of planar flows with a globally attracting
//! singular point.
//!
//! - [`feasible`]: the exact combinatorial invariant (feasible sets over thirds).
//! - [`skeleton`]: separatrix-skeleton configurations, canonical extraction,
//!   equivalence decision.
//! - [`synthesis`]: from a feasible set to a configuration and to a glued
//!   piecewise vector field on a strip, plus portrait rendering.
//! - [`dynamics`]: fixed-step RK4 on unit-normalized direction fields with
//!   event detection.
//! - [`example`]: the explicit polynomial system with an elliptic-saddle attractor.
//! - [`generate`]: random and exhaustive feasible-set generators.

pub mod dynamics;
pub mod example;
pub mod feasible;
pub mod fixtures;
pub mod generate;
pub mod portrait;
pub mod skeleton;
pub mod synthesis;

pub use feasible::{
    compare_lex, validate_complete, validate_feasible, CompleteBase, Element, EndKind,
    FeasibleError, FeasibleSet, Parity, ThirdInt, VecKey,
};
pub use skeleton::{
    canonical_feasible_set, decide_equivalence, nesting_tree, parse_configuration, Configuration,
    Mark, MarkClass, OrientationChoice, SkeletonError,
};
