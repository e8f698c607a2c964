//! Forward regXPath with data joins: parser, negation normal form, path
//! normalization, a direct evaluator, deterministic path automata, the
//! compilation to tree automata, key constraints, and satisfiability under
//! DTDs and keys.

mod compile;
mod eval;
mod nnf;
mod normalize;
mod parse;
mod pathdfa;

pub use compile::{xpath_to_atra, xpath_to_atra_over};
pub use eval::{eval_node, eval_path, satisfied};
pub use nnf::nnf_xpath;
pub use normalize::{normalize_path, normalize_paths};
pub use parse::parse_xpath;
pub use pathdfa::PathAutomaton;

use crate::atra::{self, Dtd, SearchOptions, TreeVerdict};
use crate::instr::CombineMode;
use crate::model::{DataTree, Label};
use thiserror::Error;

/// Path expressions. `Child` is the surface child axis; path
/// normalization rewrites it to `Down` (leftmost child) followed by
/// `Right*`, after which only the first-child/next-sibling axes remain.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum PathExpr {
    /// Any child, `x -> x·i` (surface `down`).
    Child,
    /// Leftmost child, `x -> x·1` (the normalized reading of `down`).
    Down,
    /// Next sibling to the right (surface `right`).
    Right,
    Eps,
    Test(Box<NodeExpr>),
    Concat(Box<PathExpr>, Box<PathExpr>),
    Union(Box<PathExpr>, Box<PathExpr>),
    Star(Box<PathExpr>),
}

impl PathExpr {
    pub fn test(e: NodeExpr) -> PathExpr {
        PathExpr::Test(Box::new(e))
    }
    pub fn concat(a: PathExpr, b: PathExpr) -> PathExpr {
        PathExpr::Concat(Box::new(a), Box::new(b))
    }
    pub fn union(a: PathExpr, b: PathExpr) -> PathExpr {
        PathExpr::Union(Box::new(a), Box::new(b))
    }
    pub fn star(a: PathExpr) -> PathExpr {
        PathExpr::Star(Box::new(a))
    }
    pub fn concat_all(mut ps: Vec<PathExpr>) -> PathExpr {
        match ps.len() {
            0 => PathExpr::Eps,
            1 => ps.pop().unwrap(),
            _ => {
                let first = ps.remove(0);
                PathExpr::concat(first, PathExpr::concat_all(ps))
            }
        }
    }
}

/// Node expressions. After [`nnf_xpath`], `Not` occurs only on labels;
/// negated path and data tests are retained in their dedicated forms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum NodeExpr {
    Label(Label),
    Not(Box<NodeExpr>),
    And(Box<NodeExpr>, Box<NodeExpr>),
    Or(Box<NodeExpr>, Box<NodeExpr>),
    /// `<a>`: some node is reachable by the path.
    Some(Box<PathExpr>),
    /// `!<a>`, retained through NNF.
    NotSome(Box<PathExpr>),
    /// `<a = b>`: two reachable nodes share a datum.
    Eq(Box<PathExpr>, Box<PathExpr>),
    /// `<a != b>`: two reachable nodes carry distinct data.
    Neq(Box<PathExpr>, Box<PathExpr>),
    /// `!<a = b>`, retained through NNF.
    NotEq(Box<PathExpr>, Box<PathExpr>),
    /// `!<a != b>`, retained through NNF.
    NotNeq(Box<PathExpr>, Box<PathExpr>),
}

impl NodeExpr {
    pub fn not(e: NodeExpr) -> NodeExpr {
        NodeExpr::Not(Box::new(e))
    }
    pub fn and(a: NodeExpr, b: NodeExpr) -> NodeExpr {
        NodeExpr::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: NodeExpr, b: NodeExpr) -> NodeExpr {
        NodeExpr::Or(Box::new(a), Box::new(b))
    }
    pub fn some(p: PathExpr) -> NodeExpr {
        NodeExpr::Some(Box::new(p))
    }
    pub fn eq(a: PathExpr, b: PathExpr) -> NodeExpr {
        NodeExpr::Eq(Box::new(a), Box::new(b))
    }
    pub fn neq(a: PathExpr, b: PathExpr) -> NodeExpr {
        NodeExpr::Neq(Box::new(a), Box::new(b))
    }

    /// All labels mentioned by the expression.
    pub fn labels(&self) -> Vec<Label> {
        fn node(e: &NodeExpr, out: &mut Vec<Label>) {
            match e {
                NodeExpr::Label(l) => out.push(l.clone()),
                NodeExpr::Not(a) => node(a, out),
                NodeExpr::And(a, b) | NodeExpr::Or(a, b) => {
                    node(a, out);
                    node(b, out);
                }
                NodeExpr::Some(p) | NodeExpr::NotSome(p) => path(p, out),
                NodeExpr::Eq(a, b)
                | NodeExpr::Neq(a, b)
                | NodeExpr::NotEq(a, b)
                | NodeExpr::NotNeq(a, b) => {
                    path(a, out);
                    path(b, out);
                }
            }
        }
        fn path(p: &PathExpr, out: &mut Vec<Label>) {
            match p {
                PathExpr::Test(e) => node(e, out),
                PathExpr::Concat(a, b) | PathExpr::Union(a, b) => {
                    path(a, out);
                    path(b, out);
                }
                PathExpr::Star(a) => path(a, out),
                _ => {}
            }
        }
        let mut out = Vec::new();
        node(self, &mut out);
        out.sort();
        out.dedup();
        out
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum XpathError {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("automaton construction: {0}")]
    Automaton(#[from] crate::instr::AutomatonError),
    #[error("dtd: {0}")]
    Dtd(#[from] crate::atra::DtdError),
}

/// The unary key constraint `key(a)`: all `a`-labeled nodes carry pairwise
/// distinct data. Returns the forward-XPath formula checking it (negated
/// search for two equal-datum `a` nodes via their closest common ancestor
/// in the first-child next-sibling view):
///
/// `key(a) = !< down* [ <eps[a] = down+[a]> or <down*[a] = right+ down*[a]> ] >`
pub fn key_formula(a: &Label) -> NodeExpr {
    use NodeExpr as N;
    use PathExpr as P;
    let lab = || N::Label(a.clone());
    let dstar = || P::star(P::Child);
    let dplus = || P::concat(P::Child, P::star(P::Child));
    let rplus = || P::concat(P::Right, P::star(P::Right));
    // <eps[a] = down+[a]>
    let vertical = N::eq(
        P::test(lab()),
        P::concat(dplus(), P::test(lab())),
    );
    // <down*[a] = right+ down*[a]>
    let split = N::eq(
        P::concat(dstar(), P::test(lab())),
        P::concat_all(vec![rplus(), dstar(), P::test(lab())]),
    );
    N::not(N::some(P::concat(
        dstar(),
        P::test(N::or(vertical, split)),
    )))
}

/// Satisfiability outcome for node expressions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum XpathSat {
    Sat(DataTree),
    Unsat,
    ResourceExhausted,
}

/// The full pipeline: conjoin key constraints, normalize, compile to a
/// tree automaton, intersect with the DTD automaton when present, and
/// decide emptiness. A `Sat` witness satisfies the formula and all keys
/// under the evaluator, and conforms to the DTD.
pub fn sat_xpath(
    e: &NodeExpr,
    dtd: Option<&Dtd>,
    keys: &[Label],
    opts: SearchOptions,
) -> Result<XpathSat, XpathError> {
    let mut formula = e.clone();
    for k in keys {
        formula = NodeExpr::and(formula, key_formula(k));
    }
    let mut aut = xpath_to_atra(&formula)?;
    if let Some(d) = dtd {
        let schema = atra::dtd_to_atra(d)?;
        aut = atra::combine(&aut, &schema, CombineMode::Intersection)?;
    }
    Ok(match atra::emptiness(&aut, opts) {
        TreeVerdict::Empty => XpathSat::Unsat,
        TreeVerdict::NonEmpty(t) => XpathSat::Sat(t),
        TreeVerdict::ResourceExhausted => XpathSat::ResourceExhausted,
    })
}
