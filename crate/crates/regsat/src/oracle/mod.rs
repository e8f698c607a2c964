//! Independent brute-force machinery: bounded model enumeration,
//! randomized structural probes, and crosscheck suites that pit every
//! engine against a direct oracle.

mod enumerate;
pub use enumerate::{enum_trees, enum_words, tree_shapes, EnumBounds};

mod crosscheck;
pub use crosscheck::*;
