//! Path normal form.
//!
//! Two rewrites, both preserving the evaluator's denotations:
//!
//! 1. every child axis becomes leftmost-child followed by right-star, so
//!    only the first-child/next-sibling axes remain;
//! 2. every operand of a path or data test is unfolded one step so that it
//!    starts with a move: leading node tests are pulled out as conjuncts
//!    on the current node, stars are unrolled once, unions split. After
//!    this no operand constrains the node where it starts, which is what
//!    the path automata require.

use super::{NodeExpr, PathExpr};
use crate::xpath::nnf::nnf_xpath;
use std::collections::BTreeSet;

/// Rewrites the child axis to `Down · Right*` everywhere inside a path.
pub fn normalize_path(p: &PathExpr) -> PathExpr {
    match p {
        PathExpr::Child => PathExpr::concat(PathExpr::Down, PathExpr::star(PathExpr::Right)),
        PathExpr::Down | PathExpr::Right | PathExpr::Eps => p.clone(),
        PathExpr::Test(e) => PathExpr::test(normalize_paths(e)),
        PathExpr::Concat(a, b) => PathExpr::concat(normalize_path(a), normalize_path(b)),
        PathExpr::Union(a, b) => PathExpr::union(normalize_path(a), normalize_path(b)),
        PathExpr::Star(a) => PathExpr::star(normalize_path(a)),
    }
}

/// One unfolding alternative of a path: the node tests crossed before the
/// first move, and what remains. `head` is `None` when the path may end
/// where it started.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct Alt {
    guards: BTreeSet<NodeExpr>,
    rest: Option<PathExpr>,
}

/// All one-step unfoldings of a path already in first-child/next-sibling
/// form: each alternative either ends here (after its guards) or starts
/// with a move. Test-only loops saturate because guard sets are finite.
fn unfold(p: &PathExpr) -> BTreeSet<Alt> {
    fn go(p: &PathExpr, guards: &BTreeSet<NodeExpr>, out: &mut BTreeSet<Alt>) {
        match p {
            PathExpr::Child => unreachable!("child axis survived normalize_path"),
            PathExpr::Down | PathExpr::Right => {
                out.insert(Alt {
                    guards: guards.clone(),
                    rest: Some(p.clone()),
                });
            }
            PathExpr::Eps => {
                out.insert(Alt {
                    guards: guards.clone(),
                    rest: None,
                });
            }
            PathExpr::Test(e) => {
                let mut g = guards.clone();
                g.insert((**e).clone());
                out.insert(Alt {
                    guards: g,
                    rest: None,
                });
            }
            PathExpr::Union(a, b) => {
                go(a, guards, out);
                go(b, guards, out);
            }
            PathExpr::Concat(a, b) => {
                let mut first = BTreeSet::new();
                go(a, guards, &mut first);
                for alt in first {
                    match alt.rest {
                        Some(rest) => {
                            out.insert(Alt {
                                guards: alt.guards,
                                rest: Some(PathExpr::concat(rest, (**b).clone())),
                            });
                        }
                        None => go(b, &alt.guards, out),
                    }
                }
            }
            PathExpr::Star(a) => {
                // Zero iterations.
                out.insert(Alt {
                    guards: guards.clone(),
                    rest: None,
                });
                // One unrolled iteration; alternatives that consumed no
                // move feed back with enlarged guard sets until the sets
                // saturate.
                let mut seen: BTreeSet<BTreeSet<NodeExpr>> = BTreeSet::new();
                let mut pending = vec![guards.clone()];
                while let Some(g) = pending.pop() {
                    if !seen.insert(g.clone()) {
                        continue;
                    }
                    let mut inner = BTreeSet::new();
                    go(a, &g, &mut inner);
                    for alt in inner {
                        match alt.rest {
                            Some(rest) => {
                                out.insert(Alt {
                                    guards: alt.guards,
                                    rest: Some(PathExpr::concat(rest, PathExpr::star((**a).clone()))),
                                });
                            }
                            None => {
                                out.insert(Alt {
                                    guards: alt.guards.clone(),
                                    rest: None,
                                });
                                pending.push(alt.guards);
                            }
                        }
                    }
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    go(p, &BTreeSet::new(), &mut out);
    out
}

fn guards_to_expr(guards: &BTreeSet<NodeExpr>, base: NodeExpr) -> NodeExpr {
    let mut e = base;
    for g in guards.iter().rev() {
        e = NodeExpr::and(g.clone(), e);
    }
    e
}

fn alt_path(alt: &Alt) -> PathExpr {
    match &alt.rest {
        Some(p) => p.clone(),
        None => PathExpr::Eps,
    }
}

/// Negation of a guard set under NNF, as a disjunction.
fn negated_guards(guards: &BTreeSet<NodeExpr>) -> Vec<NodeExpr> {
    guards
        .iter()
        .map(|g| nnf_xpath(&NodeExpr::not(g.clone())))
        .collect()
}

fn or_all(mut es: Vec<NodeExpr>, empty: NodeExpr) -> NodeExpr {
    match es.len() {
        0 => empty,
        1 => es.pop().unwrap(),
        _ => {
            let first = es.remove(0);
            NodeExpr::or(first, or_all(es, empty))
        }
    }
}

fn and_all(mut es: Vec<NodeExpr>, empty: NodeExpr) -> NodeExpr {
    match es.len() {
        0 => empty,
        1 => es.pop().unwrap(),
        _ => {
            let first = es.remove(0);
            NodeExpr::and(first, and_all(es, empty))
        }
    }
}

/// An impossible node expression, used when a disjunction is empty.
fn falsum() -> NodeExpr {
    // a and !a over an arbitrary label.
    let l = crate::model::Label::new("a");
    NodeExpr::and(
        NodeExpr::Label(l.clone()),
        NodeExpr::not(NodeExpr::Label(l)),
    )
}

fn verum() -> NodeExpr {
    let l = crate::model::Label::new("a");
    NodeExpr::or(
        NodeExpr::Label(l.clone()),
        NodeExpr::not(NodeExpr::Label(l)),
    )
}

/// Applies both rewrites to a node expression in NNF.
pub fn normalize_paths(e: &NodeExpr) -> NodeExpr {
    match e {
        NodeExpr::Label(_) | NodeExpr::Not(_) => e.clone(),
        NodeExpr::And(a, b) => NodeExpr::and(normalize_paths(a), normalize_paths(b)),
        NodeExpr::Or(a, b) => NodeExpr::or(normalize_paths(a), normalize_paths(b)),
        NodeExpr::Some(p) => {
            let alts = unfold(&normalize_path(p));
            let ds = alts
                .iter()
                .map(|alt| {
                    let inner = match &alt.rest {
                        None => verum(),
                        Some(rest) => NodeExpr::some(rest.clone()),
                    };
                    guards_to_expr(&alt.guards, inner)
                })
                .collect();
            or_all(ds, falsum())
        }
        NodeExpr::NotSome(p) => {
            // !<a> = and over alternatives: some guard fails or the rest
            // finds nothing.
            let alts = unfold(&normalize_path(p));
            let cs = alts
                .iter()
                .map(|alt| {
                    let mut choices = negated_guards(&alt.guards);
                    match &alt.rest {
                        None => {
                            // The path can end right here when the guards
                            // hold, so at least one guard must fail.
                            or_all(choices, falsum())
                        }
                        Some(rest) => {
                            choices.push(NodeExpr::NotSome(Box::new(rest.clone())));
                            or_all(choices, falsum())
                        }
                    }
                })
                .collect();
            and_all(cs, verum())
        }
        NodeExpr::Eq(a, b) => positive_pairs(a, b, true),
        NodeExpr::Neq(a, b) => positive_pairs(a, b, false),
        NodeExpr::NotEq(a, b) => negative_pairs(a, b, true),
        NodeExpr::NotNeq(a, b) => negative_pairs(a, b, false),
    }
}

/// `<a (=|!=) b>` unfolded into a disjunction over head-shaped operand
/// pairs.
fn positive_pairs(a: &PathExpr, b: &PathExpr, equal: bool) -> NodeExpr {
    let alts_a = unfold(&normalize_path(a));
    let alts_b = unfold(&normalize_path(b));
    let mut ds = Vec::new();
    for aa in &alts_a {
        for bb in &alts_b {
            let pa = Box::new(alt_path(aa));
            let pb = Box::new(alt_path(bb));
            let test = if equal {
                NodeExpr::Eq(pa, pb)
            } else {
                NodeExpr::Neq(pa, pb)
            };
            let mut guards = aa.guards.clone();
            guards.extend(bb.guards.iter().cloned());
            ds.push(guards_to_expr(&guards, test));
        }
    }
    or_all(ds, falsum())
}

/// `!<a (=|!=) b>` unfolded into a conjunction over head-shaped operand
/// pairs: for each pair, some guard fails (negated in NNF) or the negated
/// test holds.
fn negative_pairs(a: &PathExpr, b: &PathExpr, equal: bool) -> NodeExpr {
    let alts_a = unfold(&normalize_path(a));
    let alts_b = unfold(&normalize_path(b));
    let mut cs = Vec::new();
    for aa in &alts_a {
        for bb in &alts_b {
            let pa = Box::new(alt_path(aa));
            let pb = Box::new(alt_path(bb));
            let test = if equal {
                NodeExpr::NotEq(pa, pb)
            } else {
                NodeExpr::NotNeq(pa, pb)
            };
            let mut guards = aa.guards.clone();
            guards.extend(bb.guards.iter().cloned());
            let mut choices = negated_guards(&guards);
            choices.push(test);
            cs.push(or_all(choices, falsum()));
        }
    }
    and_all(cs, verum())
}

/// Whether every data-test operand is head-shaped: `eps`, or starting
/// with a one-step move.
pub fn is_normalized(e: &NodeExpr) -> bool {
    fn starts_move(p: &PathExpr) -> bool {
        match p {
            PathExpr::Down | PathExpr::Right => true,
            PathExpr::Concat(a, _) => starts_move(a),
            _ => false,
        }
    }
    fn headed(p: &PathExpr) -> bool {
        matches!(p, PathExpr::Eps) || starts_move(p)
    }
    fn clean(p: &PathExpr) -> bool {
        match p {
            PathExpr::Child => false,
            PathExpr::Test(e) => node(e),
            PathExpr::Concat(a, b) | PathExpr::Union(a, b) => clean(a) && clean(b),
            PathExpr::Star(a) => clean(a),
            _ => true,
        }
    }
    fn node(e: &NodeExpr) -> bool {
        match e {
            NodeExpr::Label(_) | NodeExpr::Not(_) => true,
            NodeExpr::And(a, b) | NodeExpr::Or(a, b) => node(a) && node(b),
            NodeExpr::Some(p) | NodeExpr::NotSome(p) => headed(p) && clean(p),
            NodeExpr::Eq(a, b)
            | NodeExpr::Neq(a, b)
            | NodeExpr::NotEq(a, b)
            | NodeExpr::NotNeq(a, b) => headed(a) && clean(a) && headed(b) && clean(b),
        }
    }
    node(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_tree;
    use crate::oracle::{enum_trees, EnumBounds};
    use crate::xpath::{eval_node, parse_xpath};

    fn normalized(s: &str) -> NodeExpr {
        normalize_paths(&nnf_xpath(&parse_xpath(s).unwrap()))
    }

    #[test]
    fn child_axis_rewritten() {
        let e = normalized("<down[a] = eps>");
        assert!(is_normalized(&e), "{e:?}");
    }

    #[test]
    fn leading_test_pulled_out() {
        // <[b]/down[a] = eps> becomes b and <down...[a] = eps>
        let e = normalized("<[b]/down[a] = eps>");
        assert!(is_normalized(&e), "{e:?}");
        // Denotation preserved on samples.
        for t in ["b@0(a@0)", "b@1(a@0)", "a@0(a@0)", "b@0(c@1 a@0)"] {
            let tree = parse_tree(t).unwrap();
            let raw = nnf_xpath(&parse_xpath("<[b]/down[a] = eps>").unwrap());
            assert_eq!(
                eval_node(&tree, &raw),
                eval_node(&tree, &e),
                "tree {t}"
            );
        }
    }

    #[test]
    fn star_unrolled_once() {
        let e = normalized("<(down)*[a] = eps>");
        assert!(is_normalized(&e), "{e:?}");
    }

    #[test]
    fn normalization_preserves_denotations() {
        let formulas = [
            "<down*[a]>",
            "<down[a] = down[b]>",
            "!<down*[a] = right*[b]>",
            "<(down/right)*[a] != eps>",
            "!<down*[b and <down[b] != down[b]>]>",
            "<[a]/(right[b])*[b] = eps>",
        ];
        let trees = enum_trees(&EnumBounds::new(4, 2, &["a", "b"]));
        for f in formulas {
            let raw = nnf_xpath(&parse_xpath(f).unwrap());
            let norm = normalize_paths(&raw);
            assert!(is_normalized(&norm), "{f} -> {norm:?}");
            for t in &trees {
                assert_eq!(
                    eval_node(t, &raw),
                    eval_node(t, &norm),
                    "formula {f} on {t}"
                );
            }
        }
    }
}
