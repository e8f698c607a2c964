//! Compilation of normalized node expressions into tree automata.
//!
//! The automaton is built lazily from the entry state: boolean and label
//! states per node formula; for each data test, walker-state families over
//! the path automata with moving/testing alternation. Positive tests guess
//! the shared datum and run two existential walkers whose finals resolve
//! to equality tests. `!<a = b>` runs a product walker over both path
//! automata that, at every node, spreads a disjunction of one-sided
//! universal walkers over all data of the configuration and stores the
//! current datum into the opposite walker whenever one side completes.
//! `!<a != b>` either refutes one side or guesses the single shared value
//! and runs two universal walkers with equality finals.
//!
//! Acceptance of the result is anchored at the root but the formula is
//! checked somewhere in the tree: the entry state walks the whole
//! first-child/next-sibling order and tests the formula at one node,
//! matching satisfaction as non-emptiness of the denotation.

use super::nnf::{is_nnf, nnf_xpath};
use super::normalize::{is_normalized, normalize_paths};
use super::pathdfa::{HState, PathAutomaton};
use super::{NodeExpr, PathExpr, XpathError};
use crate::instr::{Automaton, Kind, MoveDir, RawAutomaton, TypeTest, F};
use crate::model::Label;
use std::collections::{BTreeSet, HashMap, VecDeque};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Key {
    /// Verify a node formula at the current node.
    Phi(NodeExpr),
    /// Existential walker: (path, finals-equal?, moving state).
    ExW(usize, bool, HState),
    /// Existential walker at a testing state.
    ExT(usize, bool, HState),
    /// Universal single-path walker: finals-equal? is false for the
    /// `!<a = b>` family (neq finals) and true for `!<a != b>` (eq).
    UnW(usize, bool, HState),
    UnT(usize, bool, HState),
    /// Product walker for `!<a = b>`.
    PairW(usize, usize, HState, HState),
    PairT(usize, usize, HState, HState),
}

struct XCompiler {
    rules: Vec<(String, Option<F>)>,
    names: HashMap<Key, usize>,
    autos: Vec<PathAutomaton>,
    paths: HashMap<PathExpr, usize>,
    queue: VecDeque<Key>,
}

impl XCompiler {
    fn path(&mut self, p: &PathExpr) -> usize {
        if let Some(&i) = self.paths.get(p) {
            return i;
        }
        let aut = PathAutomaton::build(p);
        self.autos.push(aut);
        let i = self.autos.len() - 1;
        self.paths.insert(p.clone(), i);
        i
    }

    /// Reserves (or returns) the state name for a key, queueing its body
    /// for construction.
    fn state(&mut self, key: Key) -> String {
        if let Some(&i) = self.names.get(&key) {
            return self.rules[i].0.clone();
        }
        let i = self.rules.len();
        let name = format!("t{i}");
        self.rules.push((name.clone(), None));
        self.names.insert(key.clone(), i);
        self.queue.push_back(key);
        name
    }

    fn phi(&mut self, e: &NodeExpr) -> F {
        F::Ref(self.state(Key::Phi(e.clone())))
    }

    fn build_all(&mut self) {
        while let Some(key) = self.queue.pop_front() {
            let body = self.body(&key);
            let i = self.names[&key];
            self.rules[i].1 = Some(body);
        }
    }

    fn body(&mut self, key: &Key) -> F {
        match key.clone() {
            Key::Phi(e) => self.phi_body(&e),
            Key::ExW(p, eq, i) => self.exw_body(p, eq, i),
            Key::ExT(p, eq, j) => self.ext_body(p, eq, j),
            Key::UnW(p, eq_final, i) => self.unw_body(p, eq_final, i),
            Key::UnT(p, eq_final, j) => self.unt_body(p, eq_final, j),
            Key::PairW(a, b, i, j) => self.pairw_body(a, b, i, j),
            Key::PairT(a, b, i, j) => self.pairt_body(a, b, i, j),
        }
    }

    fn phi_body(&mut self, e: &NodeExpr) -> F {
        match e {
            NodeExpr::Label(l) => F::Letter(l.clone()),
            NodeExpr::Not(g) => match &**g {
                NodeExpr::Label(l) => F::NotLetter(l.clone()),
                _ => unreachable!("formula not in NNF"),
            },
            NodeExpr::And(a, b) => F::and(self.phi(a), self.phi(b)),
            NodeExpr::Or(a, b) => F::or(self.phi(a), self.phi(b)),
            // <a> is read as <a = a>.
            NodeExpr::Some(p) => {
                let pe = NodeExpr::Eq(p.clone(), p.clone());
                self.phi_body(&pe)
            }
            NodeExpr::NotSome(p) => {
                let pe = NodeExpr::NotEq(p.clone(), p.clone());
                self.phi_body(&pe)
            }
            NodeExpr::Eq(a, b) => {
                let pa = self.path(a);
                let pb = self.path(b);
                let wa = self.state(Key::ExW(pa, true, 0));
                let wb = self.state(Key::ExW(pb, true, 0));
                F::guess(F::and(F::r(&wa), F::r(&wb)))
            }
            NodeExpr::Neq(a, b) => {
                let pa = self.path(a);
                let pb = self.path(b);
                let wa = self.state(Key::ExW(pa, true, 0));
                let wb = self.state(Key::ExW(pb, false, 0));
                F::guess(F::and(F::r(&wa), F::r(&wb)))
            }
            NodeExpr::NotEq(a, b) => {
                let pa = self.path(a);
                let pb = self.path(b);
                let w = self.state(Key::PairW(pa, pb, 0, 0));
                F::r(&w)
            }
            NodeExpr::NotNeq(a, b) => {
                let none_a = NodeExpr::NotEq(a.clone(), a.clone());
                let none_b = NodeExpr::NotEq(b.clone(), b.clone());
                let fa = self.phi(&none_a);
                let fb = self.phi(&none_b);
                let pa = self.path(a);
                let pb = self.path(b);
                let ua = self.state(Key::UnW(pa, true, 0));
                let ub = self.state(Key::UnW(pb, true, 0));
                F::any(vec![fa, fb, F::guess(F::and(F::r(&ua), F::r(&ub)))])
            }
        }
    }

    fn exw_body(&mut self, p: usize, eq: bool, i: HState) -> F {
        if !self.autos[p].can_reach_final(i) {
            return F::False;
        }
        let td = self.autos[p].step_dir(i, MoveDir::Down);
        let tn = self.autos[p].step_dir(i, MoveDir::Next);
        let mut alts = vec![
            F::mv(MoveDir::Down, F::r(&self.state(Key::ExT(p, eq, td)))),
            F::mv(MoveDir::Next, F::r(&self.state(Key::ExT(p, eq, tn)))),
        ];
        if self.autos[p].is_final(i) {
            alts.push(if eq { F::Eq } else { F::NotEq });
        }
        F::any(alts)
    }

    fn ext_body(&mut self, p: usize, eq: bool, j: HState) -> F {
        let trans = self.autos[p].test_transitions_minimal(j);
        let mut alts = Vec::new();
        for (sat, target) in trans {
            if !self.autos[p].can_reach_final(target) {
                continue;
            }
            let mut parts = vec![F::r(&self.state(Key::ExW(p, eq, target)))];
            for id in &sat {
                let f = self.autos[p].test_formula(*id).clone();
                parts.push(self.phi(&f));
            }
            alts.push(F::all(parts));
        }
        F::any(alts)
    }

    fn unw_body(&mut self, p: usize, eq_final: bool, i: HState) -> F {
        if !self.autos[p].can_reach_final(i) {
            return F::True;
        }
        let td = self.autos[p].step_dir(i, MoveDir::Down);
        let tn = self.autos[p].step_dir(i, MoveDir::Next);
        let down = F::or(
            F::Type(TypeTest::Child(false)),
            F::mv(MoveDir::Down, F::r(&self.state(Key::UnT(p, eq_final, td)))),
        );
        let right = F::or(
            F::Type(TypeTest::Next(false)),
            F::mv(MoveDir::Next, F::r(&self.state(Key::UnT(p, eq_final, tn)))),
        );
        let mut parts = vec![down, right];
        if self.autos[p].is_final(i) {
            parts.push(if eq_final { F::Eq } else { F::NotEq });
        }
        F::all(parts)
    }

    /// Commit to the satisfied set over the relevant tests with
    /// certificates of both polarities, then continue deterministically.
    fn unt_body(&mut self, p: usize, eq_final: bool, j: HState) -> F {
        let relevant = self.autos[p].relevant_tests(j);
        let trans = self.autos[p].test_transitions(j);
        let mut alts = Vec::new();
        for (sat, target) in trans {
            let mut parts = vec![F::r(&self.state(Key::UnW(p, eq_final, target)))];
            for (id, f) in &relevant {
                if sat.contains(id) {
                    let f = f.clone();
                    parts.push(self.phi(&f));
                } else {
                    let neg = nnf_xpath(&NodeExpr::not(f.clone()));
                    parts.push(self.phi(&neg));
                }
            }
            alts.push(F::all(parts));
        }
        F::any(alts)
    }

    fn pairw_body(&mut self, a: usize, b: usize, i: HState, j: HState) -> F {
        let alive_a = self.autos[a].can_reach_final(i);
        let alive_b = self.autos[b].can_reach_final(j);
        if !alive_a && !alive_b {
            return F::True;
        }
        let ua = self.state(Key::UnW(a, false, i));
        let ub = self.state(Key::UnW(b, false, j));
        // For every datum of the configuration, one side avoids it.
        let spread = F::Spread1(Box::new(F::or(F::r(&ua), F::r(&ub))));
        let tad = self.autos[a].step_dir(i, MoveDir::Down);
        let tbd = self.autos[b].step_dir(j, MoveDir::Down);
        let tan = self.autos[a].step_dir(i, MoveDir::Next);
        let tbn = self.autos[b].step_dir(j, MoveDir::Next);
        let down = F::or(
            F::Type(TypeTest::Child(false)),
            F::mv(MoveDir::Down, F::r(&self.state(Key::PairT(a, b, tad, tbd)))),
        );
        let right = F::or(
            F::Type(TypeTest::Next(false)),
            F::mv(
                MoveDir::Next,
                F::r(&self.state(Key::PairT(a, b, tan, tbn))),
            ),
        );
        let mut parts = vec![spread, down, right];
        if self.autos[a].is_final(i) {
            // An a-path ends here: no b-completion may share this datum.
            parts.push(F::store(F::r(&self.state(Key::UnW(b, false, j)))));
        }
        if self.autos[b].is_final(j) {
            parts.push(F::store(F::r(&self.state(Key::UnW(a, false, i)))));
        }
        F::all(parts)
    }

    fn pairt_body(&mut self, a: usize, b: usize, ji: HState, jj: HState) -> F {
        // One committed assignment over the union of both relevant sets;
        // the same node satisfies the same formulas for both walkers.
        let formulas: Vec<NodeExpr> = {
            let mut fs: Vec<NodeExpr> = self.autos[a]
                .relevant_tests(ji)
                .into_iter()
                .chain(self.autos[b].relevant_tests(jj))
                .map(|(_, f)| f)
                .collect();
            fs.sort();
            fs.dedup();
            fs
        };
        let mut alts = Vec::new();
        for mask in 0..(1u32 << formulas.len()) {
            let sat: BTreeSet<NodeExpr> = formulas
                .iter()
                .enumerate()
                .filter(|&(k, _)| mask >> k & 1 == 1)
                .map(|(_, f)| f.clone())
                .collect();
            let sat_ids_a: BTreeSet<usize> = self.autos[a]
                .relevant_tests(ji)
                .into_iter()
                .filter(|(_, f)| sat.contains(f))
                .map(|(id, _)| id)
                .collect();
            let sat_ids_b: BTreeSet<usize> = self.autos[b]
                .relevant_tests(jj)
                .into_iter()
                .filter(|(_, f)| sat.contains(f))
                .map(|(id, _)| id)
                .collect();
            let ta = self.autos[a].step_test(ji, &sat_ids_a);
            let tb = self.autos[b].step_test(jj, &sat_ids_b);
            let mut parts = vec![F::r(&self.state(Key::PairW(a, b, ta, tb)))];
            for f in &formulas {
                if sat.contains(f) {
                    parts.push(self.phi(f));
                } else {
                    let neg = nnf_xpath(&NodeExpr::not(f.clone()));
                    parts.push(self.phi(&neg));
                }
            }
            alts.push(F::all(parts));
        }
        F::any(alts)
    }
}

/// The alphabet a satisfiability query runs over: the formula's labels,
/// any extra labels requested, plus one spare letter for label negations.
pub fn xpath_alphabet(e: &NodeExpr, extra: &[Label]) -> Vec<Label> {
    let mut labels = e.labels();
    labels.extend(extra.iter().cloned());
    labels.sort();
    labels.dedup();
    let spare = (0..)
        .map(|i| {
            if i == 0 {
                "x".to_string()
            } else {
                format!("x{i}")
            }
        })
        .find(|c| !labels.iter().any(|l| l.as_str() == c))
        .unwrap();
    labels.push(Label::new(&spare));
    labels.sort();
    labels
}

/// Compiles a node expression into a tree automaton that is nonempty iff
/// the expression is satisfiable, and accepts every tree satisfying it.
/// The input is brought into NNF with normalized paths if it is not
/// already.
pub fn xpath_to_atra(e: &NodeExpr) -> Result<Automaton, XpathError> {
    xpath_to_atra_over(e, &[])
}

/// As [`xpath_to_atra`], with extra alphabet letters the automaton must
/// handle (e.g. the labels of trees it will be run on).
pub fn xpath_to_atra_over(e: &NodeExpr, extra: &[Label]) -> Result<Automaton, XpathError> {
    let mut f = e.clone();
    if !is_nnf(&f) {
        f = nnf_xpath(&f);
    }
    if !is_normalized(&f) {
        f = normalize_paths(&f);
    }
    // Satisfaction is non-emptiness of the denotation: check the formula
    // somewhere in the first-child/next-sibling order from the root.
    let somewhere = NodeExpr::some(PathExpr::concat(
        PathExpr::star(PathExpr::union(PathExpr::Down, PathExpr::Right)),
        PathExpr::test(f.clone()),
    ));
    let wrapped = normalize_paths(&somewhere);
    let alphabet = xpath_alphabet(&wrapped, extra);

    let mut c = XCompiler {
        rules: Vec::new(),
        names: HashMap::new(),
        autos: Vec::new(),
        paths: HashMap::new(),
        queue: VecDeque::new(),
    };
    let init = c.state(Key::Phi(wrapped));
    c.build_all();
    let rules: Vec<(String, F)> = c
        .rules
        .into_iter()
        .map(|(n, b)| (n, b.expect("state body built")))
        .collect();
    RawAutomaton {
        kind: Kind::Tree,
        ordered: false,
        alphabet,
        initial: init,
        rules,
    }
    .normalize()
    .map_err(XpathError::from)
}
