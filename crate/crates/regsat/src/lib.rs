//! regsat — satisfiability and emptiness for data-aware logics on finite
//! data words and data trees.
//!
//! The crate implements alternating register automata with `guess` and
//! `spread` (plus ordered-data tests on words), decides their emptiness by
//! well-structured saturation with antichain pruning, and compiles two
//! logics into them: freeze-LTL over data words and forward XPath over
//! data trees (with DTDs and unary key constraints). Brute-force
//! enumeration oracles cross-validate every engine.
//!
//! See the `book/` directory for a guided tour; start with
//! [`ltl::sat_ltl`] and [`xpath::sat_xpath`] for the top-level entry
//! points.

pub mod ara;
pub mod atra;
pub mod config;
pub mod instr;
pub mod ltl;
pub mod model;
pub mod oracle;
pub mod regex;
pub mod step;
pub mod xpath;

