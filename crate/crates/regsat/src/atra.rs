//! Alternating tree register automata: tree configurations, the step
//! relation over them, majoring-order subsumption, emptiness with witness
//! trees, membership on concrete data trees, and the DTD encoding.
//!
//! A tree configuration is a finite set of node configurations; a step
//! rewrites one member, either by a non-moving step or by moving it to
//! its leftmost child and/or next sibling in the first-child next-sibling
//! view. A member whose thread set is empty is discharged and removed, so
//! a configuration accepts exactly when it becomes empty.

use crate::config::{canonicalize, subsumes, Canonical, Config, Flags};
use crate::instr::{Automaton, AutomatonError, Kind, LabelId, MoveDir};
use crate::model::{DataTree, Datum, Label, TreePos};
use crate::regex::{parse_regex, LabelDfa, Regex};
use crate::step;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

pub use crate::ara::SearchOptions;
pub use crate::instr::{combine, CombineMode};

/// Result of a tree emptiness check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum TreeVerdict {
    Empty,
    NonEmpty(DataTree),
    ResourceExhausted,
}

impl TreeVerdict {
    pub fn is_nonempty(&self) -> bool {
        matches!(self, TreeVerdict::NonEmpty(_))
    }
}

/// A member of a tree configuration: a node configuration tagged with the
/// identity of the witness node it constrains.
pub type Member = (Config, u32);

/// A tree configuration. Kept sorted; members with empty threads are
/// discharged on construction.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TreeConfig {
    pub members: Vec<Member>,
}

impl TreeConfig {
    pub fn new(mut members: Vec<Member>) -> Self {
        members.retain(|(c, _)| !c.is_accepting());
        members.sort();
        TreeConfig { members }
    }

    pub fn is_accepting(&self) -> bool {
        self.members.is_empty()
    }

    pub fn canon(&self, ordered: bool) -> Vec<Canonical> {
        let mut cs: Vec<Canonical> = self
            .members
            .iter()
            .map(|(c, _)| canonicalize(c, ordered))
            .collect();
        cs.sort();
        cs
    }
}

/// Majoring-order subsumption: every member of `small` is subsumed by some
/// member of `big` (members compared independently; the choice need not be
/// injective).
pub fn majoring_subsumes(small: &[Canonical], big: &[Canonical]) -> bool {
    small.iter().all(|a| big.iter().any(|b| subsumes(a, b)))
}

/// Classification of one node configuration after forced saturation,
/// exposed for the structural probes.
pub enum NodeSuccessors {
    /// The member is dead (a forced step failed).
    Dead,
    /// Pending nondeterministic choices, one successor per choice.
    Eps(Vec<Config>),
    /// Every thread is a move instruction.
    Moving(Config),
}

pub fn node_successors(aut: &Automaton, cfg: &Config, guess_pool: &[Datum]) -> NodeSuccessors {
    match step::saturate(aut, cfg) {
        None => NodeSuccessors::Dead,
        Some(c) => {
            let branches = step::branch_successors(aut, &c, guess_pool);
            if branches.is_empty() {
                NodeSuccessors::Moving(c)
            } else {
                NodeSuccessors::Eps(branches)
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Created {
    Root(step::Emission),
    Child {
        parent: u32,
        tag: u32,
        em: step::Emission,
    },
    Sibling {
        parent: u32,
        tag: u32,
        em: step::Emission,
    },
}

struct Entry {
    tc: TreeConfig,
    canon: Vec<Canonical>,
    hwm: Datum,
    next_tag: u32,
    parent: Option<usize>,
    created: Vec<Created>,
}

/// Decides emptiness of a tree automaton; on `NonEmpty` the witness tree
/// is accepted by the automaton.
pub fn emptiness(aut: &Automaton, opts: SearchOptions) -> TreeVerdict {
    assert_eq!(aut.kind, Kind::Tree);
    let d0 = Datum::int(0);
    let mut arena: Vec<Entry> = Vec::new();
    let mut kept: Vec<usize> = Vec::new();
    let mut heap: BinaryHeap<Reverse<(u32, Vec<Canonical>, usize)>> = BinaryHeap::new();

    let push = |arena: &mut Vec<Entry>,
                kept: &mut Vec<usize>,
                heap: &mut BinaryHeap<Reverse<(u32, Vec<Canonical>, usize)>>,
                members: Vec<Member>,
                moves: u32,
                hwm: Datum,
                next_tag: u32,
                parent: Option<usize>,
                created: Vec<Created>| {
        let mut sat = Vec::with_capacity(members.len());
        for (c, tag) in members {
            match step::saturate(aut, &c) {
                None => return,
                Some(c2) => sat.push((c2, tag)),
            }
        }
        let tc = TreeConfig::new(sat);
        let canon = tc.canon(aut.ordered);
        if kept
            .iter()
            .any(|&k| majoring_subsumes(&arena[k].canon, &canon))
        {
            return;
        }
        kept.retain(|&k| !majoring_subsumes(&canon, &arena[k].canon));
        let hwm = tc
            .members
            .iter()
            .flat_map(|(c, _)| c.data())
            .max()
            .map_or(hwm, |m| hwm.max(m));
        let idx = arena.len();
        arena.push(Entry {
            tc,
            canon: canon.clone(),
            hwm,
            next_tag,
            parent,
            created,
        });
        kept.push(idx);
        heap.push(Reverse((moves, canon, idx)));
    };

    // The root of a tree never has a right sibling.
    for child in [false, true] {
        for l in 0..aut.alphabet.len() as LabelId {
            let flags = Flags { child, next: false };
            let cfg = Config::new(flags, l, d0, vec![(aut.initial, d0)]);
            let em = step::Emission {
                letter: l,
                datum: d0,
                flags,
            };
            push(
                &mut arena,
                &mut kept,
                &mut heap,
                vec![(cfg, 0)],
                0,
                d0,
                1,
                None,
                vec![Created::Root(em)],
            );
        }
    }

    let mut steps = 0u64;
    while let Some(Reverse((moves, canon, idx))) = heap.pop() {
        if !kept.contains(&idx) || arena[idx].canon != canon {
            continue;
        }
        if arena[idx].tc.is_accepting() {
            return TreeVerdict::NonEmpty(extract_tree(aut, &arena, idx));
        }
        steps += 1;
        if let Some(max) = opts.max_steps {
            if steps > max {
                return TreeVerdict::ResourceExhausted;
            }
        }
        let tc = arena[idx].tc.clone();
        let hwm = arena[idx].hwm;
        let next_tag = arena[idx].next_tag;

        // Members arrive saturated; branch the first member with pending
        // choices (choices on distinct members commute).
        let mut chose = false;
        for (mi, (cfg, tag)) in tc.members.iter().enumerate() {
            let pool = step::emptiness_guess_pool(cfg, aut.ordered, hwm);
            let branches = step::branch_successors(aut, cfg, &pool);
            if !branches.is_empty() {
                for c in branches {
                    let mut members = tc.members.clone();
                    members[mi] = (c, *tag);
                    push(
                        &mut arena,
                        &mut kept,
                        &mut heap,
                        members,
                        moves,
                        hwm,
                        next_tag,
                        Some(idx),
                        Vec::new(),
                    );
                }
                chose = true;
                break;
            }
        }
        if chose {
            continue;
        }

        // All members all-moving: step the first one according to its type.
        let Some((cfg, tag)) = tc.members.first().cloned() else {
            continue;
        };
        let rest: Vec<Member> = tc.members[1..].to_vec();
        let down_blocked = step::has_move(aut, &cfg, MoveDir::Down) && !cfg.flags.child;
        let next_blocked = step::has_move(aut, &cfg, MoveDir::Next) && !cfg.flags.next;
        if down_blocked || next_blocked {
            // A demanded direction does not exist at this node: stuck.
            continue;
        }
        match (cfg.flags.child, cfg.flags.next) {
            (false, false) => continue, // moving with nowhere to go
            (true, false) => {
                for (em, c) in step::tree_move_successors(aut, &cfg, MoveDir::Down, hwm) {
                    let mut members = rest.clone();
                    members.push((c, next_tag));
                    push(
                        &mut arena,
                        &mut kept,
                        &mut heap,
                        members,
                        moves + 1,
                        hwm,
                        next_tag + 1,
                        Some(idx),
                        vec![Created::Child {
                            parent: tag,
                            tag: next_tag,
                            em,
                        }],
                    );
                }
            }
            (false, true) => {
                for (em, c) in step::tree_move_successors(aut, &cfg, MoveDir::Next, hwm) {
                    let mut members = rest.clone();
                    members.push((c, next_tag));
                    push(
                        &mut arena,
                        &mut kept,
                        &mut heap,
                        members,
                        moves + 1,
                        hwm,
                        next_tag + 1,
                        Some(idx),
                        vec![Created::Sibling {
                            parent: tag,
                            tag: next_tag,
                            em,
                        }],
                    );
                }
            }
            (true, true) => {
                // Both images derive from one parent and share its carried
                // data; fresh choices in the two images stay independent.
                for (em_d, c_d) in step::tree_move_successors(aut, &cfg, MoveDir::Down, hwm) {
                    let hwm_d = c_d.data().last().copied().map_or(hwm, |m| hwm.max(m));
                    for (em_n, c_n) in step::tree_move_successors(aut, &cfg, MoveDir::Next, hwm_d) {
                        let mut members = rest.clone();
                        members.push((c_d.clone(), next_tag));
                        members.push((c_n, next_tag + 1));
                        push(
                            &mut arena,
                            &mut kept,
                            &mut heap,
                            members,
                            moves + 1,
                            hwm_d,
                            next_tag + 2,
                            Some(idx),
                            vec![
                                Created::Child {
                                    parent: tag,
                                    tag: next_tag,
                                    em: em_d,
                                },
                                Created::Sibling {
                                    parent: tag,
                                    tag: next_tag + 1,
                                    em: em_n,
                                },
                            ],
                        );
                    }
                }
            }
        }
    }
    TreeVerdict::Empty
}

struct Shadow {
    em: step::Emission,
    child: Option<u32>,
    sibling: Option<u32>,
}

/// Replays the stored chain as a tree build: each move materializes the
/// first-child or next-sibling node it promised; unconsumed type promises
/// are padded with fresh-datum leaves.
fn extract_tree(aut: &Automaton, arena: &[Entry], accept: usize) -> DataTree {
    let mut chain = Vec::new();
    let mut cur = Some(accept);
    while let Some(i) = cur {
        chain.push(i);
        cur = arena[i].parent;
    }
    chain.reverse();
    let mut nodes: HashMap<u32, Shadow> = HashMap::new();
    for &i in &chain {
        for c in &arena[i].created {
            match *c {
                Created::Root(em) => {
                    nodes.insert(
                        0,
                        Shadow {
                            em,
                            child: None,
                            sibling: None,
                        },
                    );
                }
                Created::Child { parent, tag, em } => {
                    nodes.insert(
                        tag,
                        Shadow {
                            em,
                            child: None,
                            sibling: None,
                        },
                    );
                    nodes.get_mut(&parent).expect("parent shadow").child = Some(tag);
                }
                Created::Sibling { parent, tag, em } => {
                    nodes.insert(
                        tag,
                        Shadow {
                            em,
                            child: None,
                            sibling: None,
                        },
                    );
                    nodes.get_mut(&parent).expect("parent shadow").sibling = Some(tag);
                }
            }
        }
    }
    // Rank data to non-negative integers, reserving fresh values for pads.
    let mut values: Vec<Datum> = nodes.values().map(|s| s.em.datum).collect();
    values.sort();
    values.dedup();
    let rank: HashMap<Datum, u64> = values
        .iter()
        .enumerate()
        .map(|(i, &d)| (d, i as u64))
        .collect();
    let mut fresh = values.len() as u64;

    fn build_chain(
        aut: &Automaton,
        nodes: &HashMap<u32, Shadow>,
        rank: &HashMap<Datum, u64>,
        fresh: &mut u64,
        tag: u32,
    ) -> Vec<DataTree> {
        // Builds the sibling chain starting at `tag`.
        let mut out = Vec::new();
        let mut cur = Some(tag);
        while let Some(t) = cur {
            let sh = &nodes[&t];
            let mut children = match sh.child {
                Some(c) => build_chain(aut, nodes, rank, fresh, c),
                None => Vec::new(),
            };
            if children.is_empty() && sh.em.flags.child {
                // Promised a child no thread ever visited.
                let d = *fresh;
                *fresh += 1;
                children.push(DataTree::leaf(aut.label(0).clone(), Datum::int(d)));
            }
            let label = aut.label(sh.em.letter).clone();
            out.push(DataTree::node(
                label,
                Datum::int(rank[&sh.em.datum]),
                children,
            ));
            cur = sh.sibling;
            if cur.is_none() && sh.em.flags.next {
                // Promised a sibling no thread ever visited.
                let d = *fresh;
                *fresh += 1;
                out.push(DataTree::leaf(aut.label(0).clone(), Datum::int(d)));
            }
        }
        out
    }
    let mut roots = build_chain(aut, &nodes, &rank, &mut fresh, 0);
    assert_eq!(roots.len(), 1, "the root has no siblings");
    roots.pop().unwrap()
}

/// Decides whether the automaton accepts the data tree. The search
/// decomposes per node: members at distinct positions never interact, so
/// a both-directions move is an and-split into two independent searches.
pub fn membership(aut: &Automaton, tree: &DataTree) -> Result<bool, AutomatonError> {
    assert_eq!(aut.kind, Kind::Tree);
    for pos in tree.positions() {
        let l = tree.label(&pos).unwrap();
        if aut.label_id(l).is_none() {
            return Err(AutomatonError::UnknownLetter(l.as_str().to_string()));
        }
    }
    let pool = step::datum_choices(
        &tree.data(),
        aut.ordered,
        tree.data().last().copied().unwrap(),
    );
    let root = TreePos::root();
    let init = node_config_at(
        aut,
        tree,
        &root,
        vec![(aut.initial, tree.datum(&root).unwrap())],
    );
    let mut memo: HashMap<(TreePos, Config), bool> = HashMap::new();
    Ok(search_node(
        aut,
        tree,
        &pool,
        root,
        init,
        &mut memo,
        &mut HashSet::new(),
    ))
}

fn node_config_at(
    aut: &Automaton,
    tree: &DataTree,
    pos: &TreePos,
    threads: Vec<(crate::instr::StateId, Datum)>,
) -> Config {
    let ty = tree.type_of(pos).unwrap();
    Config::new(
        Flags {
            child: ty.has_child,
            next: ty.has_right_sibling,
        },
        aut.label_id(tree.label(pos).unwrap()).unwrap(),
        tree.datum(pos).unwrap(),
        threads,
    )
}

fn search_node(
    aut: &Automaton,
    tree: &DataTree,
    pool: &[Datum],
    pos: TreePos,
    cfg: Config,
    memo: &mut HashMap<(TreePos, Config), bool>,
    in_progress: &mut HashSet<(TreePos, Config)>,
) -> bool {
    let Some(cfg) = step::saturate(aut, &cfg) else {
        return false;
    };
    if cfg.is_accepting() {
        return true;
    }
    let key = (pos.clone(), cfg.clone());
    if let Some(&r) = memo.get(&key) {
        return r;
    }
    if !in_progress.insert(key.clone()) {
        return false;
    }
    let result = (|| {
        for c in step::branch_successors(aut, &cfg, pool) {
            if search_node(aut, tree, pool, pos.clone(), c, memo, in_progress) {
                return true;
            }
        }
        if !step::is_moving(aut, &cfg) {
            return false;
        }
        let down_blocked = step::has_move(aut, &cfg, MoveDir::Down) && !cfg.flags.child;
        let next_blocked = step::has_move(aut, &cfg, MoveDir::Next) && !cfg.flags.next;
        if down_blocked || next_blocked {
            return false;
        }
        let mut ok = true;
        if cfg.flags.child {
            let child = pos.first_child();
            let c = node_config_at(
                aut,
                tree,
                &child,
                step::move_threads(aut, &cfg, MoveDir::Down),
            );
            ok &= search_node(aut, tree, pool, child, c, memo, in_progress);
        }
        if ok && cfg.flags.next {
            let sib = pos.next_sibling().unwrap();
            let c = node_config_at(
                aut,
                tree,
                &sib,
                step::move_threads(aut, &cfg, MoveDir::Next),
            );
            ok &= search_node(aut, tree, pool, sib, c, memo, in_progress);
        }
        ok
    })();
    in_progress.remove(&key);
    memo.insert(key, result);
    result
}

/// A document type definition: a root label and one children-word regular
/// expression per label.
#[derive(Clone, Debug)]
pub struct Dtd {
    pub root: Label,
    pub rules: Vec<(Label, Regex)>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DtdError {
    #[error("rule references undeclared label `{0}`")]
    UndeclaredLabel(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

impl Dtd {
    /// Parses `dtd { root: a;  a -> (b | c)* ;  b -> eps;  c -> b b? ; }`.
    pub fn parse(text: &str) -> Result<Dtd, DtdError> {
        let mut s = crate::model::text::Scanner::new(text);
        let to_err = |e: crate::model::ParseError| match e {
            crate::model::ParseError::Syntax { line, col, msg } => {
                DtdError::Parse { line, col, msg }
            }
            other => DtdError::Parse {
                line: 0,
                col: 0,
                msg: other.to_string(),
            },
        };
        if !s.eat_keyword("dtd") {
            return Err(to_err(s.error("expected `dtd`")));
        }
        s.skip_ws();
        s.expect(b'{').map_err(to_err)?;
        if !s.eat_keyword("root") {
            return Err(to_err(s.error("expected `root:`")));
        }
        s.skip_ws();
        s.expect(b':').map_err(to_err)?;
        s.skip_ws();
        let root = Label::new(&s.ident().map_err(to_err)?);
        s.skip_ws();
        s.expect(b';').map_err(to_err)?;
        let mut rules = Vec::new();
        loop {
            s.skip_ws();
            if s.eat(b'}') {
                break;
            }
            let name = Label::new(&s.ident().map_err(to_err)?);
            s.skip_ws();
            s.expect(b'-').map_err(to_err)?;
            s.expect(b'>').map_err(to_err)?;
            let re = parse_regex(&mut s).map_err(to_err)?;
            s.skip_ws();
            s.expect(b';').map_err(to_err)?;
            rules.push((name, re));
        }
        let dtd = Dtd { root, rules };
        dtd.validate()?;
        Ok(dtd)
    }

    pub fn labels(&self) -> Vec<Label> {
        let mut ls: Vec<Label> = self.rules.iter().map(|(l, _)| l.clone()).collect();
        ls.sort();
        ls.dedup();
        ls
    }

    fn validate(&self) -> Result<(), DtdError> {
        let ls = self.labels();
        let check = |l: &Label| {
            if ls.contains(l) {
                Ok(())
            } else {
                Err(DtdError::UndeclaredLabel(l.as_str().to_string()))
            }
        };
        check(&self.root)?;
        fn syms(r: &Regex, out: &mut Vec<Label>) {
            match r {
                Regex::Sym(l) => out.push(l.clone()),
                Regex::Concat(a, b) | Regex::Alt(a, b) => {
                    syms(a, out);
                    syms(b, out);
                }
                Regex::Star(a) => syms(a, out),
                _ => {}
            }
        }
        for (_, r) in &self.rules {
            let mut used = Vec::new();
            syms(r, &mut used);
            for l in used {
                check(&l)?;
            }
        }
        Ok(())
    }

    /// A direct recursive conformance checker, used as the oracle for the
    /// automaton encoding.
    pub fn conforms(&self, tree: &DataTree) -> bool {
        if tree.label(&TreePos::root()) != Some(&self.root) {
            return false;
        }
        let ls = self.labels();
        let dfas: HashMap<Label, LabelDfa> = self
            .rules
            .iter()
            .map(|(l, r)| (l.clone(), LabelDfa::from_regex(r, &ls)))
            .collect();
        fn check(dfas: &HashMap<Label, LabelDfa>, tree: &DataTree, pos: &TreePos) -> bool {
            let label = tree.label(pos).unwrap();
            let Some(dfa) = dfas.get(label) else {
                return false;
            };
            let n = tree.child_count(pos).unwrap();
            let children: Vec<Label> = (1..=n)
                .map(|i| tree.label(&pos.child(i)).unwrap().clone())
                .collect();
            dfa.accepts(children.iter()) && (1..=n).all(|i| check(dfas, tree, &pos.child(i)))
        }
        check(&dfas, tree, &TreePos::root())
    }
}

/// Encodes a DTD as a tree automaton: one thread walks each siblinghood
/// with the children-word DFA via right moves, spawning a down thread per
/// child to recurse; acceptance of the children word is checked at last
/// siblings. Data values are ignored.
pub fn dtd_to_atra(dtd: &Dtd) -> Result<Automaton, AutomatonError> {
    use crate::instr::{RawAutomaton, TypeTest, F};
    dtd.validate()
        .map_err(|e| AutomatonError::UndeclaredState(e.to_string()))?;
    let labels = dtd.labels();
    let dfas: Vec<(Label, LabelDfa)> = dtd
        .rules
        .iter()
        .map(|(l, r)| (l.clone(), LabelDfa::from_regex(r, &labels)))
        .collect();
    let node_state = |l: &Label| format!("n_{l}");
    let walk_state = |l: &Label, s: usize| format!("w_{l}_{s}");
    let mut rules = Vec::new();
    rules.push((
        "q0".to_string(),
        F::and(F::Letter(dtd.root.clone()), F::r(&node_state(&dtd.root))),
    ));
    for (l, dfa) in &dfas {
        // A node labeled l: its children word must match l's rule.
        let leaf_ok = if dfa.accepting[dfa.initial] {
            F::True
        } else {
            F::False
        };
        rules.push((
            node_state(l),
            F::or(
                F::and(F::Type(TypeTest::Child(false)), leaf_ok),
                F::and(
                    F::Type(TypeTest::Child(true)),
                    F::mv(MoveDir::Down, F::r(&walk_state(l, dfa.initial))),
                ),
            ),
        ));
        // Walking the children siblinghood in DFA state s: consume the
        // current child's label, recurse into it, and advance.
        for s in 0..dfa.state_count() {
            let mut alts = Vec::new();
            for (i, cl) in labels.iter().enumerate() {
                let succ = dfa.trans[s][i];
                let done = if dfa.accepting[succ] {
                    F::True
                } else {
                    F::False
                };
                alts.push(F::all(vec![
                    F::Letter(cl.clone()),
                    F::r(&node_state(cl)),
                    F::or(
                        F::and(F::Type(TypeTest::Next(false)), done),
                        F::mv(MoveDir::Next, F::r(&walk_state(l, succ))),
                    ),
                ]));
            }
            rules.push((walk_state(l, s), F::any(alts)));
        }
    }
    RawAutomaton {
        kind: Kind::Tree,
        ordered: false,
        alphabet: labels,
        initial: "q0".to_string(),
        rules,
    }
    .normalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instr::parse_automaton;
    use crate::model::parse_tree;

    fn atra(text: &str) -> Automaton {
        parse_automaton(text).unwrap()
    }

    fn accepts(aut: &Automaton, t: &str) -> bool {
        membership(aut, &parse_tree(t).unwrap()).unwrap()
    }

    #[test]
    fn emptiness_eq_single_node_witness() {
        let aut = atra("atra { alphabet: a; initial: q0; q0 := eq; }");
        match emptiness(&aut, SearchOptions::default()) {
            TreeVerdict::NonEmpty(t) => {
                assert_eq!(t.node_count(), 1);
                assert!(membership(&aut, &t).unwrap());
            }
            v => panic!("expected NonEmpty, got {v:?}"),
        }
    }

    #[test]
    fn emptiness_neq_empty() {
        let aut = atra("atra { alphabet: a; initial: q0; q0 := neq; }");
        assert_eq!(
            emptiness(&aut, SearchOptions::default()),
            TreeVerdict::Empty
        );
    }

    /// The guess automaton forcing datum(1·1) = datum(2) without the value
    /// appearing at a common ancestor.
    fn guess_example() -> Automaton {
        atra(
            "atra { alphabet: a; initial: q0;\n\
             q0 := guess(q1);\n\
             q1 := down q2;\n\
             q2 := q3 & q4;\n\
             q3 := down q5;\n\
             q4 := right q5;\n\
             q5 := eq;\n}",
        )
    }

    #[test]
    fn guess_example_membership() {
        let aut = guess_example();
        assert!(accepts(&aut, "a@0(a@1(a@7) a@7)"));
        assert!(!accepts(&aut, "a@0(a@1(a@7) a@8)"));
    }

    #[test]
    fn guess_example_witness_has_equal_cousins() {
        let aut = guess_example();
        match emptiness(&aut, SearchOptions::default()) {
            TreeVerdict::NonEmpty(t) => {
                assert!(membership(&aut, &t).unwrap());
                let d11 = t.datum(&TreePos(vec![1, 1])).expect("position 1.1");
                let d2 = t.datum(&TreePos(vec![2])).expect("position 2");
                assert_eq!(d11, d2, "witness {t}");
            }
            v => panic!("expected NonEmpty, got {v:?}"),
        }
    }

    #[test]
    fn right_move_demands_existing_sibling() {
        let aut =
            atra("atra { alphabet: a; initial: q0; q0 := down q1; q1 := right q2; q2 := a; }");
        assert!(!accepts(&aut, "a@0(a@1)"));
        assert!(accepts(&aut, "a@0(a@1 a@2)"));
        if let TreeVerdict::NonEmpty(t) = emptiness(&aut, SearchOptions::default()) {
            assert!(t.contains(&TreePos(vec![2])), "witness {t}");
            assert!(membership(&aut, &t).unwrap());
        } else {
            panic!("expected NonEmpty");
        }
    }

    #[test]
    fn root_label_mismatch_rejects() {
        let aut = atra("atra { alphabet: a b; initial: q0; q0 := a; }");
        assert!(!accepts(&aut, "b@0"));
    }

    #[test]
    fn stuck_member_with_both_flags_false() {
        // A moving thread at a leaf-last node has no rule to fire.
        let aut = atra("atra { alphabet: a; initial: q0; q0 := down q0; }");
        assert!(!accepts(&aut, "a@0"));
        assert_eq!(
            emptiness(&aut, SearchOptions::default()),
            TreeVerdict::Empty
        );
    }

    #[test]
    fn combine_closure_on_trees() {
        let a_root = atra("atra { alphabet: a b; initial: q0; q0 := a; }");
        let not_a = atra("atra { alphabet: a b; initial: q0; q0 := !a; }");
        let both = combine(&a_root, &not_a, CombineMode::Intersection).unwrap();
        assert_eq!(
            emptiness(&both, SearchOptions::default()),
            TreeVerdict::Empty
        );
        let either = combine(&a_root, &not_a, CombineMode::Union).unwrap();
        for t in ["a@0", "b@0", "a@0(b@1)"] {
            assert_eq!(
                accepts(&either, t),
                accepts(&a_root, t) || accepts(&not_a, t)
            );
        }
    }

    #[test]
    fn dtd_basic_conformance() {
        let dtd = Dtd::parse("dtd { root: a; a -> eps; }").unwrap();
        let aut = dtd_to_atra(&dtd).unwrap();
        assert!(accepts(&aut, "a@1"));
        assert!(!accepts(&aut, "a@1(a@2)"));
    }

    #[test]
    fn dtd_star_rule_matches_direct_checker() {
        let dtd = Dtd::parse("dtd { root: a; a -> b*; b -> eps; }").unwrap();
        let aut = dtd_to_atra(&dtd).unwrap();
        assert!(accepts(&aut, "a@0(b@1 b@2)"));
        assert!(!accepts(&aut, "a@0(b@1 a@2)"));
        assert!(accepts(&aut, "a@0"));
        let trees = crate::oracle::enum_trees(&crate::oracle::EnumBounds {
            max_size: 3,
            max_distinct_data: 1,
            alphabet: vec![Label::new("a"), Label::new("b")],
        });
        for t in trees {
            assert_eq!(membership(&aut, &t).unwrap(), dtd.conforms(&t), "tree {t}");
        }
    }

    #[test]
    fn dtd_unsatisfiable_recursion_is_empty() {
        let dtd = Dtd::parse("dtd { root: a; a -> a; }").unwrap();
        let aut = dtd_to_atra(&dtd).unwrap();
        assert_eq!(
            emptiness(&aut, SearchOptions::default()),
            TreeVerdict::Empty
        );
    }

    #[test]
    fn dtd_rejects_undeclared_label() {
        assert!(matches!(
            Dtd::parse("dtd { root: a; a -> b; }"),
            Err(DtdError::UndeclaredLabel(_))
        ));
    }

    #[test]
    fn majoring_order_examples() {
        let aut = atra("atra { alphabet: a; initial: q0; q0 := down q0; }");
        let mk = |threads: &[(&str, u64)], flags: (bool, bool)| {
            let t: Vec<_> = threads
                .iter()
                .map(|&(n, d)| {
                    let s = aut.state_ids().find(|&s| aut.state_name(s) == n).unwrap();
                    (s, Datum::int(d))
                })
                .collect();
            canonicalize(
                &Config::new(
                    Flags {
                        child: flags.0,
                        next: flags.1,
                    },
                    0,
                    Datum::int(0),
                    t,
                ),
                false,
            )
        };
        let small = mk(&[("q0", 0)], (true, true));
        let big = mk(&[("q0", 0), ("q0", 5)], (true, true));
        assert!(majoring_subsumes(&[small.clone()], &[small.clone()]));
        // Two members may map to the same dominator (non-injective).
        assert!(majoring_subsumes(
            &[small.clone(), small.clone()],
            &[big.clone()]
        ));
        assert!(majoring_subsumes(&[], &[big.clone()]));
        assert!(!majoring_subsumes(&[big], &[]));
    }
}
