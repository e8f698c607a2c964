//! Deterministic path automata over the interleaved direction/test
//! alphabet.
//!
//! A normalized path relates fcns-ordered positions `x ⪯ y`; the walk from
//! `x` to `y` spells a string `a1 S1 ... an Sn` where each `ai` is the
//! direction taken and `Si` the set of node formulas satisfied at the
//! i-th node (the start node is never tested). The automaton alternates
//! between moving states (expecting a direction) and testing states
//! (expecting one test letter); test letters are handled symbolically, as
//! positive constraint sets, instead of materializing the powerset
//! alphabet.

use super::{NodeExpr, PathExpr};
use crate::instr::MoveDir;
use std::collections::{BTreeSet, HashMap};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Token {
    Dir(MoveDir),
    /// Index into the test table.
    Test(usize),
}

struct Nfa {
    /// Edges per state: (token, target). Epsilon edges listed separately.
    edges: Vec<Vec<(Token, usize)>>,
    eps: Vec<Vec<usize>>,
    start: usize,
    finals: BTreeSet<usize>,
    tests: Vec<NodeExpr>,
}

impl Nfa {
    fn new_state(&mut self) -> usize {
        self.edges.push(Vec::new());
        self.eps.push(Vec::new());
        self.edges.len() - 1
    }

    fn test_id(&mut self, e: &NodeExpr) -> usize {
        if let Some(i) = self.tests.iter().position(|x| x == e) {
            i
        } else {
            self.tests.push(e.clone());
            self.tests.len() - 1
        }
    }

    /// Thompson construction; returns (entry, exit).
    fn build(&mut self, p: &PathExpr) -> (usize, usize) {
        match p {
            PathExpr::Child => unreachable!("normalized paths have no child axis"),
            PathExpr::Down => {
                let a = self.new_state();
                let b = self.new_state();
                self.edges[a].push((Token::Dir(MoveDir::Down), b));
                (a, b)
            }
            PathExpr::Right => {
                let a = self.new_state();
                let b = self.new_state();
                self.edges[a].push((Token::Dir(MoveDir::Next), b));
                (a, b)
            }
            PathExpr::Eps => {
                let a = self.new_state();
                (a, a)
            }
            PathExpr::Test(e) => {
                let id = self.test_id(e);
                let a = self.new_state();
                let b = self.new_state();
                self.edges[a].push((Token::Test(id), b));
                (a, b)
            }
            PathExpr::Concat(x, y) => {
                let (ax, bx) = self.build(x);
                let (ay, by) = self.build(y);
                self.eps[bx].push(ay);
                (ax, by)
            }
            PathExpr::Union(x, y) => {
                let a = self.new_state();
                let b = self.new_state();
                let (ax, bx) = self.build(x);
                let (ay, by) = self.build(y);
                self.eps[a].push(ax);
                self.eps[a].push(ay);
                self.eps[bx].push(b);
                self.eps[by].push(b);
                (a, b)
            }
            PathExpr::Star(x) => {
                let a = self.new_state();
                let (ax, bx) = self.build(x);
                self.eps[a].push(ax);
                self.eps[bx].push(a);
                (a, a)
            }
        }
    }

    /// Closure over epsilon edges only.
    fn eps_closure(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut out = set.clone();
        let mut stack: Vec<usize> = out.iter().copied().collect();
        while let Some(s) = stack.pop() {
            for &t in &self.eps[s] {
                if out.insert(t) {
                    stack.push(t);
                }
            }
        }
        out
    }

    /// Closure over epsilon edges and test edges whose formula is allowed.
    fn test_closure(&self, set: &BTreeSet<usize>, allowed: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut out = self.eps_closure(set);
        loop {
            let mut grew = false;
            let snapshot: Vec<usize> = out.iter().copied().collect();
            for s in snapshot {
                for &(tok, t) in &self.edges[s] {
                    if let Token::Test(id) = tok {
                        if allowed.contains(&id) && !out.contains(&t) {
                            out.extend(self.eps_closure(&BTreeSet::from([t])));
                            grew = true;
                        }
                    }
                }
            }
            if !grew {
                return out;
            }
        }
    }

    /// Test ids reachable (through epsilon and test edges) from the set —
    /// the tests the next test letter is sensitive to.
    fn relevant_tests(&self, set: &BTreeSet<usize>) -> Vec<usize> {
        let all: BTreeSet<usize> = (0..self.tests.len()).collect();
        let span = self.test_closure(set, &all);
        let mut out: Vec<usize> = span
            .iter()
            .flat_map(|&s| {
                self.edges[s].iter().filter_map(|&(tok, _)| match tok {
                    Token::Test(id) => Some(id),
                    _ => None,
                })
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

/// State index of a [`PathAutomaton`]; 0 is the initial (moving) state.
pub type HState = usize;

/// A deterministic, complete path automaton with a moving/testing state
/// partition. Built lazily: states are subset-construction sets reached
/// from the initial one.
pub struct PathAutomaton {
    nfa: Nfa,
    /// Interned states: the subset, and whether it is a testing state.
    states: Vec<(BTreeSet<usize>, bool)>,
    index: HashMap<(BTreeSet<usize>, bool), HState>,
    dir_cache: HashMap<(HState, MoveDir), HState>,
    test_cache: HashMap<(HState, BTreeSet<usize>), HState>,
}

impl PathAutomaton {
    /// Compiles a normalized path. The start node is never tested, so the
    /// initial closure must not carry test edges out of it — guaranteed by
    /// path normalization.
    pub fn build(p: &PathExpr) -> PathAutomaton {
        let mut nfa = Nfa {
            edges: Vec::new(),
            eps: Vec::new(),
            start: 0,
            finals: BTreeSet::new(),
            tests: Vec::new(),
        };
        let (a, b) = nfa.build(p);
        nfa.start = a;
        nfa.finals.insert(b);
        let initial = nfa.eps_closure(&BTreeSet::from([a]));
        debug_assert!(
            initial.iter().all(|&s| {
                nfa.edges[s]
                    .iter()
                    .all(|&(tok, _)| !matches!(tok, Token::Test(_)))
            }),
            "path tests its start node; normalize first"
        );
        let mut aut = PathAutomaton {
            nfa,
            states: Vec::new(),
            index: HashMap::new(),
            dir_cache: HashMap::new(),
            test_cache: HashMap::new(),
        };
        aut.intern(initial, false);
        aut
    }

    fn intern(&mut self, set: BTreeSet<usize>, testing: bool) -> HState {
        if let Some(&i) = self.index.get(&(set.clone(), testing)) {
            return i;
        }
        let i = self.states.len();
        self.states.push((set.clone(), testing));
        self.index.insert((set, testing), i);
        i
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn is_testing(&self, s: HState) -> bool {
        self.states[s].1
    }

    /// Whether the (moving) state is accepting: the path may end here.
    pub fn is_final(&self, s: HState) -> bool {
        debug_assert!(!self.is_testing(s));
        self.states[s].0.iter().any(|x| self.nfa.finals.contains(x))
    }

    /// Whether any accepting state is reachable from here; a state that
    /// cannot reach one imposes no end-of-path constraints.
    pub fn can_reach_final(&mut self, s: HState) -> bool {
        // The state space is built lazily, so explore forward.
        let mut seen = BTreeSet::from([s]);
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            if !self.is_testing(x) && self.is_final(x) {
                return true;
            }
            let nexts: Vec<HState> = if self.is_testing(x) {
                self.test_transitions(x).into_iter().map(|(_, t)| t).collect()
            } else {
                vec![
                    self.step_dir(x, MoveDir::Down),
                    self.step_dir(x, MoveDir::Next),
                ]
            };
            for n in nexts {
                if seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        false
    }

    /// Direction step from a moving state to a testing state.
    pub fn step_dir(&mut self, s: HState, dir: MoveDir) -> HState {
        if let Some(&t) = self.dir_cache.get(&(s, dir)) {
            return t;
        }
        debug_assert!(!self.is_testing(s));
        let set = self.states[s].0.clone();
        let mut out = BTreeSet::new();
        for x in set {
            for &(tok, t) in &self.nfa.edges[x] {
                if tok == Token::Dir(dir) {
                    out.insert(t);
                }
            }
        }
        // Keep the raw targets; test closure happens at the test step.
        let t = self.intern(out, true);
        self.dir_cache.insert((s, dir), t);
        t
    }

    /// Test step from a testing state under a concrete satisfied set,
    /// given as the set of satisfied test table indices.
    pub fn step_test(&mut self, s: HState, satisfied: &BTreeSet<usize>) -> HState {
        if let Some(&t) = self.test_cache.get(&(s, satisfied.clone())) {
            return t;
        }
        debug_assert!(self.is_testing(s));
        let set = self.states[s].0.clone();
        let closed = self.nfa.test_closure(&set, satisfied);
        let t = self.intern(closed, false);
        self.test_cache.insert((s, satisfied.clone()), t);
        t
    }

    /// The node formulas the next test letter of `s` is sensitive to.
    pub fn relevant_tests(&self, s: HState) -> Vec<(usize, NodeExpr)> {
        let ids = self.nfa.relevant_tests(&self.states[s].0);
        ids.into_iter()
            .map(|i| (i, self.nfa.tests[i].clone()))
            .collect()
    }

    pub fn test_formula(&self, id: usize) -> &NodeExpr {
        &self.nfa.tests[id]
    }

    /// All distinct outcomes of the test step: one entry per assignment of
    /// the relevant tests, as (true-set, target).
    pub fn test_transitions(&mut self, s: HState) -> Vec<(BTreeSet<usize>, HState)> {
        let relevant: Vec<usize> = self.nfa.relevant_tests(&self.states[s].0);
        let mut out = Vec::new();
        for mask in 0..(1u32 << relevant.len()) {
            let sat: BTreeSet<usize> = relevant
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask >> i & 1 == 1)
                .map(|(_, &id)| id)
                .collect();
            let t = self.step_test(s, &sat);
            out.push((sat, t));
        }
        out
    }

    /// Minimal positive requirements, for existential walks: pairs
    /// (required set, target), keeping only set-minimal entries per
    /// target.
    pub fn test_transitions_minimal(&mut self, s: HState) -> Vec<(BTreeSet<usize>, HState)> {
        let all = self.test_transitions(s);
        let mut out: Vec<(BTreeSet<usize>, HState)> = Vec::new();
        for (sat, t) in all {
            if out
                .iter()
                .any(|(s2, t2)| *t2 == t && s2.is_subset(&sat))
            {
                continue;
            }
            out.retain(|(s2, t2)| !(*t2 == t && sat.is_subset(s2)));
            out.push((sat, t));
        }
        out
    }
}
