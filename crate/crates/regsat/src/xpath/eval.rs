//! The denotational evaluator: node expressions denote sets of positions,
//! path expressions sets of position pairs. This is the reference
//! semantics for every other component.

use super::{NodeExpr, PathExpr};
use crate::model::{DataTree, TreePos};
use std::collections::BTreeSet;

pub type PosSet = BTreeSet<TreePos>;
pub type PairSet = BTreeSet<(TreePos, TreePos)>;

/// The set of pairs denoted by a path expression.
pub fn eval_path(t: &DataTree, p: &PathExpr) -> PairSet {
    let positions = t.positions();
    match p {
        PathExpr::Child => positions
            .iter()
            .flat_map(|x| {
                let n = t.child_count(x).unwrap();
                (1..=n).map(|i| (x.clone(), x.child(i))).collect::<Vec<_>>()
            })
            .collect(),
        PathExpr::Down => positions
            .iter()
            .filter(|x| t.contains(&x.first_child()))
            .map(|x| (x.clone(), x.first_child()))
            .collect(),
        PathExpr::Right => positions
            .iter()
            .filter_map(|x| {
                let s = x.next_sibling()?;
                t.contains(&s).then(|| (x.clone(), s))
            })
            .collect(),
        PathExpr::Eps => positions.iter().map(|x| (x.clone(), x.clone())).collect(),
        PathExpr::Test(e) => eval_node(t, e)
            .into_iter()
            .map(|x| (x.clone(), x))
            .collect(),
        PathExpr::Concat(a, b) => {
            let ra = eval_path(t, a);
            let rb = eval_path(t, b);
            let mut out = PairSet::new();
            for (x, y) in &ra {
                for (y2, z) in &rb {
                    if y == y2 {
                        out.insert((x.clone(), z.clone()));
                    }
                }
            }
            out
        }
        PathExpr::Union(a, b) => {
            let mut out = eval_path(t, a);
            out.extend(eval_path(t, b));
            out
        }
        PathExpr::Star(a) => {
            // Reflexive transitive closure.
            let base = eval_path(t, a);
            let mut out: PairSet = positions.iter().map(|x| (x.clone(), x.clone())).collect();
            loop {
                let mut grew = false;
                let snapshot: Vec<_> = out.iter().cloned().collect();
                for (x, y) in snapshot {
                    for (y2, z) in &base {
                        if &y == y2 && out.insert((x.clone(), z.clone())) {
                            grew = true;
                        }
                    }
                }
                if !grew {
                    return out;
                }
            }
        }
    }
}

/// The set of positions denoted by a node expression.
pub fn eval_node(t: &DataTree, e: &NodeExpr) -> PosSet {
    let positions: PosSet = t.positions().into_iter().collect();
    match e {
        NodeExpr::Label(l) => positions
            .into_iter()
            .filter(|x| t.label(x) == Some(l))
            .collect(),
        NodeExpr::Not(g) => {
            let inner = eval_node(t, g);
            positions.into_iter().filter(|x| !inner.contains(x)).collect()
        }
        NodeExpr::And(a, b) => {
            let ra = eval_node(t, a);
            let rb = eval_node(t, b);
            ra.intersection(&rb).cloned().collect()
        }
        NodeExpr::Or(a, b) => {
            let mut ra = eval_node(t, a);
            ra.extend(eval_node(t, b));
            ra
        }
        NodeExpr::Some(p) => eval_path(t, p).into_iter().map(|(x, _)| x).collect(),
        NodeExpr::NotSome(p) => {
            let inner: PosSet = eval_path(t, p).into_iter().map(|(x, _)| x).collect();
            positions.into_iter().filter(|x| !inner.contains(x)).collect()
        }
        NodeExpr::Eq(a, b) => data_test(t, a, b, true),
        NodeExpr::Neq(a, b) => data_test(t, a, b, false),
        NodeExpr::NotEq(a, b) => {
            let inner = data_test(t, a, b, true);
            positions.into_iter().filter(|x| !inner.contains(x)).collect()
        }
        NodeExpr::NotNeq(a, b) => {
            let inner = data_test(t, a, b, false);
            positions.into_iter().filter(|x| !inner.contains(x)).collect()
        }
    }
}

fn data_test(t: &DataTree, a: &PathExpr, b: &PathExpr, equal: bool) -> PosSet {
    let ra = eval_path(t, a);
    let rb = eval_path(t, b);
    let mut out = PosSet::new();
    for (x, y) in &ra {
        for (x2, z) in &rb {
            if x == x2 {
                let dy = t.datum(y).unwrap();
                let dz = t.datum(z).unwrap();
                if (dy == dz) == equal {
                    out.insert(x.clone());
                }
            }
        }
    }
    out
}

/// `t |= e`: the denotation is non-empty.
pub fn satisfied(t: &DataTree, e: &NodeExpr) -> bool {
    !eval_node(t, e).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_tree;
    use crate::xpath::{key_formula, parse_xpath};
    use crate::model::Label;

    fn tr(s: &str) -> DataTree {
        parse_tree(s).unwrap()
    }

    #[test]
    fn eps_denotes_identity() {
        let t = tr("a@1(b@2 b@2)");
        let id = eval_path(&t, &PathExpr::Eps);
        assert_eq!(id.len(), t.positions().len());
        assert!(id.iter().all(|(x, y)| x == y));
    }

    #[test]
    fn sibling_data_join_selects_root() {
        let t = tr("a@1(b@2 b@2)");
        // <down/right*[b] = down/right*[b]> — even a single b self-pairs,
        // and here the two b children share a datum.
        let e = parse_xpath("<down/right*[b] = down/right*[b]>").unwrap();
        let sel = eval_node(&t, &e);
        assert!(sel.contains(&TreePos::root()));
        // With distinct data a single b still self-pairs.
        let t2 = tr("a@1(b@2 b@3)");
        assert!(eval_node(&t2, &e).contains(&TreePos::root()));
        // But requiring distinct endpoints fails on distinct data:
        let strict = parse_xpath("<down[b] != down[b]>").unwrap();
        assert!(eval_node(&tr("a@1(b@2 b@3)"), &strict).contains(&TreePos::root()));
        assert!(!eval_node(&tr("a@1(b@2 b@2)"), &strict).contains(&TreePos::root()));
    }

    #[test]
    fn key_formula_spec_cases() {
        let key_a = key_formula(&Label::new("a"));
        assert!(satisfied(&tr("r@0(a@1 a@2)"), &key_a));
        assert!(!satisfied(&tr("r@0(a@1 a@1)"), &key_a));
        // Vacuous when no a nodes exist.
        assert!(satisfied(&tr("r@0(b@1 b@1)"), &key_a));
        // Nested duplicates are caught through the vertical disjunct.
        assert!(!satisfied(&tr("r@0(a@1(a@1))"), &key_a));
        // Cousin duplicates through the split disjunct.
        assert!(!satisfied(&tr("r@0(b@0(a@7) b@0(a@7))"), &key_a));
        assert!(satisfied(&tr("r@0(b@0(a@7) b@0(a@8))"), &key_a));
    }

    #[test]
    fn descendant_axis_is_reflexive_transitive() {
        let t = tr("a@0(b@1(c@2))");
        let e = parse_xpath("<down*[c]>").unwrap();
        let sel = eval_node(&t, &e);
        assert!(sel.contains(&TreePos::root()));
        assert!(sel.contains(&TreePos(vec![1])));
        assert!(sel.contains(&TreePos(vec![1, 1])));
    }
}
