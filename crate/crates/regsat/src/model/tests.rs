use super::*;
use std::collections::BTreeSet;

fn w(s: &str) -> DataWord {
    parse_word(s).unwrap()
}

fn t(s: &str) -> DataTree {
    parse_tree(s).unwrap()
}

#[test]
fn parse_word_basic() {
    let word = w("a@1 b@2 a@1");
    assert_eq!(word.len(), 3);
    assert_eq!(word.label(1).as_str(), "a");
    assert_eq!(word.datum(1), Datum::int(1));
    assert_eq!(word.datum(2), Datum::int(2));
    assert_eq!(word.datum(3), Datum::int(1));
}

#[test]
fn parse_word_single() {
    assert_eq!(w("a@1").len(), 1);
}

#[test]
fn parse_word_empty_rejected() {
    assert_eq!(parse_word(""), Err(ParseError::EmptyWord));
    assert_eq!(parse_word("  # just a comment\n"), Err(ParseError::EmptyWord));
}

#[test]
fn parse_word_comments_and_whitespace() {
    let word = w("a@1  # first\n\t b@2");
    assert_eq!(word.len(), 2);
}

#[test]
fn parse_tree_basic() {
    let tree = t("a@0(b@1 c@0(b@1))");
    assert_eq!(tree.label(&TreePos::root()).unwrap().as_str(), "a");
    assert_eq!(tree.datum(&TreePos(vec![1])), Some(Datum::int(1)));
    assert_eq!(tree.label(&TreePos(vec![2])).unwrap().as_str(), "c");
    assert_eq!(tree.label(&TreePos(vec![2, 1])).unwrap().as_str(), "b");
    assert_eq!(tree.node_count(), 4);
}

#[test]
fn parse_tree_single_node() {
    let tree = t("a@7");
    assert_eq!(tree.node_count(), 1);
    assert_eq!(tree.datum(&TreePos::root()), Some(Datum::int(7)));
}

#[test]
fn parse_tree_empty_child_list_rejected() {
    assert!(matches!(
        parse_tree("a@0()"),
        Err(ParseError::EmptyChildList { .. })
    ));
}

#[test]
fn parse_tree_unbalanced() {
    assert!(matches!(parse_tree("a@0(b@1"), Err(ParseError::Syntax { .. })));
}

#[test]
fn type_of_word() {
    let word = w("a@1 b@2");
    assert_eq!(word.type_of(1), Some(WordTypeFlag { has_next: true }));
    assert_eq!(word.type_of(2), Some(WordTypeFlag { has_next: false }));
    assert_eq!(word.type_of(3), None);
}

#[test]
fn type_of_tree() {
    let tree = t("a@0(b@1 c@2)");
    assert_eq!(
        tree.type_of(&TreePos(vec![1])),
        Some(TreeTypeFlag {
            has_child: false,
            has_right_sibling: true
        })
    );
    assert_eq!(
        tree.type_of(&TreePos::root()),
        Some(TreeTypeFlag {
            has_child: true,
            has_right_sibling: false
        })
    );
}

/// Independent oracle: exhaustive walk of `leftmost child` / `next sibling`
/// moves from `x`, collecting everything reachable.
fn fcns_reachable(tree: &DataTree, x: &TreePos) -> BTreeSet<TreePos> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![x.clone()];
    while let Some(p) = stack.pop() {
        if !tree.contains(&p) || !seen.insert(p.clone()) {
            continue;
        }
        stack.push(p.first_child());
        if let Some(s) = p.next_sibling() {
            stack.push(s);
        }
    }
    seen
}

#[test]
fn fcns_leq_matches_exhaustive_walk() {
    let tree = t("a@0(b@1 c@2(d@3 e@4) f@5)");
    for x in tree.positions() {
        let reach = fcns_reachable(&tree, &x);
        for y in tree.positions() {
            assert_eq!(
                tree.fcns_leq(&x, &y),
                Some(reach.contains(&y)),
                "fcns_leq({x}, {y})"
            );
        }
    }
}

#[test]
fn fcns_leq_spec_cases() {
    let tree = t("a@0(b@1 c@2)");
    let eps = TreePos::root();
    let one = TreePos(vec![1]);
    let two = TreePos(vec![2]);
    // Reflexivity.
    for p in tree.positions() {
        assert_eq!(tree.fcns_leq(&p, &p), Some(true));
    }
    // One leftmost-child step.
    assert_eq!(tree.fcns_leq(&eps, &one), Some(true));
    // Verified by the exhaustive walk above: 1 is not reachable from 2.
    assert!(!fcns_reachable(&tree, &two).contains(&one));
    assert_eq!(tree.fcns_leq(&two, &one), Some(false));
    assert_eq!(tree.fcns_leq(&TreePos(vec![9]), &one), None);
}

#[test]
fn fcns_is_partial_order_with_unique_meet() {
    let tree = t("r@0(a@1(b@2 c@3) d@4(e@5) f@6)");
    let ps = tree.positions();
    // Antisymmetry.
    for x in &ps {
        for y in &ps {
            if x != y {
                assert!(
                    !(tree.fcns_leq(x, y).unwrap() && tree.fcns_leq(y, x).unwrap()),
                    "antisymmetry violated for {x}, {y}"
                );
            }
        }
    }
    // Every pair has a unique greatest common fcns-ancestor.
    for x in &ps {
        for y in &ps {
            let ax: BTreeSet<_> = tree.fcns_ancestors(x).into_iter().collect();
            let ay: BTreeSet<_> = tree.fcns_ancestors(y).into_iter().collect();
            let common: Vec<_> = ax.intersection(&ay).cloned().collect();
            assert!(!common.is_empty());
            let greatest: Vec<_> = common
                .iter()
                .filter(|c| common.iter().all(|o| tree.fcns_leq(o, c).unwrap()))
                .collect();
            assert_eq!(greatest.len(), 1, "meet of {x}, {y}");
        }
    }
}

#[test]
fn serializer_round_trips() {
    for s in ["a@1", "a@1 b@2 a@1", "x_1@0 x_1@0"] {
        let word = w(s);
        assert_eq!(parse_word(&word.to_string()).unwrap(), word);
        assert_eq!(word.to_string(), s);
    }
    for s in ["a@7", "a@0(b@1 c@0(b@1))", "r@0(a@1(b@2 c@3) d@4(e@5) f@6)"] {
        let tree = t(s);
        assert_eq!(parse_tree(&tree.to_string()).unwrap(), tree);
        assert_eq!(tree.to_string(), s);
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn arb_label() -> impl Strategy<Value = Label> {
        prop_oneof![Just("a"), Just("b"), Just("c_1")].prop_map(Label::new)
    }

    fn arb_word() -> impl Strategy<Value = DataWord> {
        proptest::collection::vec((arb_label(), 0u64..5), 1..8)
            .prop_map(|v| DataWord::new(v.into_iter().map(|(l, d)| (l, Datum::int(d))).collect()))
    }

    fn arb_tree() -> impl Strategy<Value = DataTree> {
        let leaf = (arb_label(), 0u64..5).prop_map(|(l, d)| DataTree::leaf(l, Datum::int(d)));
        leaf.prop_recursive(3, 12, 3, |inner| {
            (
                arb_label(),
                0u64..5,
                proptest::collection::vec(inner, 0..4),
            )
                .prop_map(|(l, d, cs)| DataTree::node(l, Datum::int(d), cs))
        })
    }

    proptest! {
        #[test]
        fn word_round_trip(word in arb_word()) {
            prop_assert_eq!(parse_word(&word.to_string()).unwrap(), word);
        }

        #[test]
        fn tree_round_trip(tree in arb_tree()) {
            prop_assert_eq!(parse_tree(&tree.to_string()).unwrap(), tree);
        }

        #[test]
        fn word_type_agrees_with_length(word in arb_word()) {
            for i in word.positions() {
                prop_assert_eq!(word.type_of(i).unwrap().has_next, i < word.len());
            }
        }
    }
}
