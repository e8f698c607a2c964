//! Negation normal form: the rewrite system applied to fixpoint. Negated
//! path tests and data tests are retained in their dedicated forms; `Not`
//! survives only on labels.

use super::{NodeExpr, PathExpr};

pub fn nnf_xpath(e: &NodeExpr) -> NodeExpr {
    pos(e)
}

fn pos(e: &NodeExpr) -> NodeExpr {
    match e {
        NodeExpr::Label(_) => e.clone(),
        NodeExpr::Not(g) => neg(g),
        NodeExpr::And(a, b) => NodeExpr::and(pos(a), pos(b)),
        NodeExpr::Or(a, b) => NodeExpr::or(pos(a), pos(b)),
        NodeExpr::Some(p) => NodeExpr::Some(Box::new(path(p))),
        NodeExpr::NotSome(p) => NodeExpr::NotSome(Box::new(path(p))),
        NodeExpr::Eq(a, b) => NodeExpr::Eq(Box::new(path(a)), Box::new(path(b))),
        NodeExpr::Neq(a, b) => NodeExpr::Neq(Box::new(path(a)), Box::new(path(b))),
        NodeExpr::NotEq(a, b) => NodeExpr::NotEq(Box::new(path(a)), Box::new(path(b))),
        NodeExpr::NotNeq(a, b) => NodeExpr::NotNeq(Box::new(path(a)), Box::new(path(b))),
    }
}

fn neg(e: &NodeExpr) -> NodeExpr {
    match e {
        NodeExpr::Label(_) => NodeExpr::not(e.clone()),
        NodeExpr::Not(g) => pos(g),
        NodeExpr::And(a, b) => NodeExpr::or(neg(a), neg(b)),
        NodeExpr::Or(a, b) => NodeExpr::and(neg(a), neg(b)),
        NodeExpr::Some(p) => NodeExpr::NotSome(Box::new(path(p))),
        NodeExpr::NotSome(p) => NodeExpr::Some(Box::new(path(p))),
        NodeExpr::Eq(a, b) => NodeExpr::NotEq(Box::new(path(a)), Box::new(path(b))),
        NodeExpr::Neq(a, b) => NodeExpr::NotNeq(Box::new(path(a)), Box::new(path(b))),
        NodeExpr::NotEq(a, b) => NodeExpr::Eq(Box::new(path(a)), Box::new(path(b))),
        NodeExpr::NotNeq(a, b) => NodeExpr::Neq(Box::new(path(a)), Box::new(path(b))),
    }
}

fn path(p: &PathExpr) -> PathExpr {
    match p {
        PathExpr::Test(e) => PathExpr::test(pos(e)),
        PathExpr::Concat(a, b) => PathExpr::concat(path(a), path(b)),
        PathExpr::Union(a, b) => PathExpr::union(path(a), path(b)),
        PathExpr::Star(a) => PathExpr::star(path(a)),
        axis => axis.clone(),
    }
}

/// Whether the NNF invariant holds: `Not` only on labels.
pub fn is_nnf(e: &NodeExpr) -> bool {
    fn node(e: &NodeExpr) -> bool {
        match e {
            NodeExpr::Not(g) => matches!(**g, NodeExpr::Label(_)),
            NodeExpr::And(a, b) | NodeExpr::Or(a, b) => node(a) && node(b),
            NodeExpr::Some(p) | NodeExpr::NotSome(p) => path(p),
            NodeExpr::Eq(a, b)
            | NodeExpr::Neq(a, b)
            | NodeExpr::NotEq(a, b)
            | NodeExpr::NotNeq(a, b) => path(a) && path(b),
            NodeExpr::Label(_) => true,
        }
    }
    fn path(p: &PathExpr) -> bool {
        match p {
            PathExpr::Test(e) => node(e),
            PathExpr::Concat(a, b) | PathExpr::Union(a, b) => path(a) && path(b),
            PathExpr::Star(a) => path(a),
            _ => true,
        }
    }
    node(e)
}
