//! Randomized crosscheck suites: seeded generators for automata and
//! formulas, agreement checks against the enumeration oracles, the
//! reflexive-downward-compatibility probe, and counterexample shrinking.

use super::{enum_trees, enum_words, EnumBounds};
use crate::ara;
use crate::atra;
use crate::config::{canonicalize, subsumes, Config, Flags};
use crate::instr::{Automaton, Kind, MoveDir, RawAutomaton, TypeTest, F};
use crate::ltl::{self, Ltl};
use crate::model::{DataTree, DataWord, Datum, Label};
use crate::step;
use crate::xpath::{self, NodeExpr, PathExpr};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::time::Instant;

/// Outcome of a bounded model search.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BoundedSat<M> {
    Found(M),
    NoneWithin,
}

/// Enumerates words within the bounds and returns the first model.
pub fn bounded_sat_ltl(f: &Ltl, bounds: &EnumBounds) -> BoundedSat<DataWord> {
    for w in enum_words(bounds) {
        if ltl::models(&w, f) {
            return BoundedSat::Found(w);
        }
    }
    BoundedSat::NoneWithin
}

/// Enumerates trees within the bounds and returns the first model.
pub fn bounded_sat_xpath(e: &NodeExpr, bounds: &EnumBounds) -> BoundedSat<DataTree> {
    for t in enum_trees(bounds) {
        if xpath::satisfied(&t, e) {
            return BoundedSat::Found(t);
        }
    }
    BoundedSat::NoneWithin
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CheckKind {
    Ltl,
    Xpath,
    Ara,
    Atra,
}

/// Result of a crosscheck run. The suite passes exactly when
/// `disagreements` is empty.
#[derive(Clone, Debug, Default)]
pub struct CrosscheckReport {
    pub cases_run: usize,
    pub agreements: usize,
    pub disagreements: Vec<String>,
    pub elapsed_ms: u128,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for d in &self.disagreements {
            let _ = writeln!(out, "disagreement: {d}");
        }
        let _ = writeln!(
            out,
            "summary: cases={} agreements={} disagreements={} elapsed_ms={}",
            self.cases_run,
            self.agreements,
            self.disagreements.len(),
            self.elapsed_ms
        );
        out
    }
}

/// A random word automaton with `n` states over the alphabet, using the
/// whole instruction repertoire.
pub fn random_ara(rng: &mut ChaCha8Rng, n_states: usize, alphabet: &[Label]) -> Automaton {
    let name = |i: usize| format!("q{i}");
    let mut rules = Vec::new();
    for i in 0..n_states {
        let f = random_instr_formula(rng, n_states, alphabet, Kind::Word, 2);
        rules.push((name(i), f));
    }
    RawAutomaton {
        kind: Kind::Word,
        ordered: false,
        alphabet: alphabet.to_vec(),
        initial: name(0),
        rules,
    }
    .normalize()
    .expect("random automaton is well-formed")
}

/// A random tree automaton with `n` states.
pub fn random_atra(rng: &mut ChaCha8Rng, n_states: usize, alphabet: &[Label]) -> Automaton {
    let name = |i: usize| format!("q{i}");
    let mut rules = Vec::new();
    for i in 0..n_states {
        let f = random_instr_formula(rng, n_states, alphabet, Kind::Tree, 2);
        rules.push((name(i), f));
    }
    RawAutomaton {
        kind: Kind::Tree,
        ordered: false,
        alphabet: alphabet.to_vec(),
        initial: name(0),
        rules,
    }
    .normalize()
    .expect("random automaton is well-formed")
}

fn random_instr_formula(
    rng: &mut ChaCha8Rng,
    n_states: usize,
    alphabet: &[Label],
    kind: Kind,
    depth: usize,
) -> F {
    let st = |rng: &mut ChaCha8Rng| F::Ref(format!("q{}", rng.gen_range(0..n_states)));
    if depth > 0 && rng.gen_bool(0.4) {
        let a = random_instr_formula(rng, n_states, alphabet, kind, depth - 1);
        let b = random_instr_formula(rng, n_states, alphabet, kind, depth - 1);
        return if rng.gen_bool(0.5) {
            F::and(a, b)
        } else {
            F::or(a, b)
        };
    }
    let l = alphabet.choose(rng).unwrap().clone();
    let tree = kind == Kind::Tree;
    match rng.gen_range(0..if tree { 12 } else { 10 }) {
        0 => F::Letter(l),
        1 => F::NotLetter(l),
        2 => F::Type(TypeTest::Next(rng.gen_bool(0.5))),
        3 => F::Eq,
        4 => F::NotEq,
        5 => F::store(st(rng)),
        6 => F::guess(st(rng)),
        7 => F::mv(MoveDir::Next, st(rng)),
        8 => {
            let target = format!("q{}", rng.gen_range(0..n_states));
            F::Spread2(target, Box::new(st(rng)))
        }
        9 => F::Spread1(Box::new(st(rng))),
        10 => F::Type(TypeTest::Child(rng.gen_bool(0.5))),
        _ => F::mv(MoveDir::Down, st(rng)),
    }
}

/// A random NNF formula of bounded operator depth over the alphabet.
pub fn random_ltl(rng: &mut ChaCha8Rng, depth: usize, alphabet: &[Label]) -> Ltl {
    let f = random_ltl_raw(rng, depth, alphabet, true);
    ltl::nnf_ltl(&f).expect("generator avoids negated quantifiers")
}

fn random_ltl_raw(rng: &mut ChaCha8Rng, depth: usize, alphabet: &[Label], quant_ok: bool) -> Ltl {
    let atom = |rng: &mut ChaCha8Rng| {
        let l = alphabet.choose(rng).unwrap().clone();
        match rng.gen_range(0..4) {
            0 => Ltl::Atom(l),
            1 => Ltl::not(Ltl::Atom(l)),
            2 => Ltl::Up,
            _ => Ltl::not(Ltl::Up),
        }
    };
    if depth == 0 {
        return atom(rng);
    }
    let sub = |rng: &mut ChaCha8Rng, q: bool| random_ltl_raw(rng, depth - 1, alphabet, q);
    match rng.gen_range(0..12) {
        0 => atom(rng),
        1 => Ltl::Freeze(Box::new(sub(rng, quant_ok))),
        2 => Ltl::X(Box::new(sub(rng, quant_ok))),
        3 => Ltl::WX(Box::new(sub(rng, quant_ok))),
        4 => Ltl::U(Box::new(sub(rng, quant_ok)), Box::new(sub(rng, quant_ok))),
        5 => Ltl::R(Box::new(sub(rng, quant_ok)), Box::new(sub(rng, quant_ok))),
        6 => Ltl::and(sub(rng, quant_ok), sub(rng, quant_ok)),
        7 => Ltl::or(sub(rng, quant_ok), sub(rng, quant_ok)),
        8 if quant_ok => Ltl::Aprev(Box::new(sub(rng, false))),
        9 if quant_ok => Ltl::Efut(Box::new(sub(rng, false))),
        10 if quant_ok => Ltl::AprevIf(
            Box::new(sub(rng, false)),
            // The condition must stay quantifier-free.
            Box::new(sub(rng, false)),
        ),
        _ => atom(rng),
    }
}

/// A random normalized forward path expression (for the path automata
/// probe).
pub fn random_path(rng: &mut ChaCha8Rng, depth: usize, alphabet: &[Label]) -> PathExpr {
    let p = random_path_raw(rng, depth, alphabet);
    xpath::normalize_path(&p)
}

fn random_path_raw(rng: &mut ChaCha8Rng, depth: usize, alphabet: &[Label]) -> PathExpr {
    if depth == 0 {
        return match rng.gen_range(0..3) {
            0 => PathExpr::Down,
            1 => PathExpr::Right,
            _ => PathExpr::test(random_xpath_raw(rng, 0, alphabet, false)),
        };
    }
    let sub = |rng: &mut ChaCha8Rng| random_path_raw(rng, depth - 1, alphabet);
    match rng.gen_range(0..7) {
        0 => PathExpr::Down,
        1 => PathExpr::Right,
        2 => PathExpr::concat(sub(rng), sub(rng)),
        3 => PathExpr::union(sub(rng), sub(rng)),
        4 => PathExpr::star(sub(rng)),
        5 => PathExpr::test(random_xpath_raw(rng, depth - 1, alphabet, false)),
        _ => PathExpr::Eps,
    }
}

/// A random node expression with data tests of bounded depth, already in
/// negation normal form with normalized paths.
pub fn random_xpath(rng: &mut ChaCha8Rng, depth: usize, alphabet: &[Label]) -> NodeExpr {
    let raw = random_xpath_raw(rng, depth, alphabet, true);
    xpath::normalize_paths(&xpath::nnf_xpath(&raw))
}

fn random_xpath_raw(
    rng: &mut ChaCha8Rng,
    depth: usize,
    alphabet: &[Label],
    data_ok: bool,
) -> NodeExpr {
    let l = alphabet.choose(rng).unwrap().clone();
    if depth == 0 {
        return if rng.gen_bool(0.5) {
            NodeExpr::Label(l)
        } else {
            NodeExpr::not(NodeExpr::Label(l))
        };
    }
    let sub = |rng: &mut ChaCha8Rng, d: bool| random_xpath_raw(rng, depth - 1, alphabet, d);
    match rng.gen_range(0..8) {
        0 => NodeExpr::Label(l),
        1 => NodeExpr::not(sub(rng, data_ok)),
        2 => NodeExpr::and(sub(rng, data_ok), sub(rng, data_ok)),
        3 => NodeExpr::or(sub(rng, data_ok), sub(rng, data_ok)),
        4 => NodeExpr::some(random_path_raw(rng, depth - 1, alphabet)),
        5 | 6 if data_ok => {
            let a = random_path_raw(rng, depth - 1, alphabet);
            let b = random_path_raw(rng, depth - 1, alphabet);
            if rng.gen_bool(0.5) {
                NodeExpr::eq(a, b)
            } else {
                NodeExpr::neq(a, b)
            }
        }
        _ => NodeExpr::Label(l),
    }
}

/// Generates `count` random cases for the given kind and runs the
/// agreement suite described in the engines' invariants. A failing case is
/// greedily shrunk before being reported.
pub fn crosscheck(
    kind: CheckKind,
    seed: u64,
    count: usize,
    bounds: &EnumBounds,
) -> CrosscheckReport {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CrosscheckReport::default();
    match kind {
        CheckKind::Ara => {
            let words = enum_words(bounds);
            for _ in 0..count {
                let aut = random_ara(&mut rng, 4, &bounds.alphabet);
                report.cases_run += 1;
                match check_ara_case(&aut, &words) {
                    Ok(()) => report.agreements += 1,
                    Err(e) => report.disagreements.push(e),
                }
            }
        }
        CheckKind::Atra => {
            let trees = enum_trees(bounds);
            for _ in 0..count {
                let aut = random_atra(&mut rng, 4, &bounds.alphabet);
                report.cases_run += 1;
                match check_atra_case(&aut, &trees) {
                    Ok(()) => report.agreements += 1,
                    Err(e) => report.disagreements.push(e),
                }
            }
        }
        CheckKind::Ltl => {
            let words = enum_words(bounds);
            for _ in 0..count {
                let f = random_ltl(&mut rng, 3, &bounds.alphabet);
                report.cases_run += 1;
                match check_ltl_case(&f, &words, &bounds.alphabet) {
                    Ok(()) => report.agreements += 1,
                    Err(e) => report.disagreements.push(e),
                }
            }
        }
        CheckKind::Xpath => {
            let trees = enum_trees(bounds);
            for _ in 0..count {
                let f = random_xpath(&mut rng, 2, &bounds.alphabet);
                report.cases_run += 1;
                match check_xpath_case(&f, &trees, &bounds.alphabet) {
                    Ok(()) => report.agreements += 1,
                    Err(e) => report.disagreements.push(e),
                }
            }
        }
    }
    report.elapsed_ms = start.elapsed().as_millis();
    report
}

/// Emptiness versus bounded enumeration, plus witness soundness.
fn check_ara_case(aut: &Automaton, words: &[DataWord]) -> Result<(), String> {
    let verdict = ara::emptiness(aut, ara::SearchOptions::default());
    let found = words
        .iter()
        .find(|w| ara::membership(aut, w).expect("alphabet matches"));
    match (&verdict, found) {
        (ara::WordVerdict::Empty, Some(w)) => {
            Err(format!("emptiness says Empty but enumeration accepts {w}"))
        }
        (ara::WordVerdict::NonEmpty(wit), _) => {
            if ara::membership(aut, wit).expect("alphabet matches") {
                Ok(())
            } else {
                Err(format!("witness {wit} rejected by membership"))
            }
        }
        _ => Ok(()),
    }
}

fn check_atra_case(aut: &Automaton, trees: &[DataTree]) -> Result<(), String> {
    let verdict = atra::emptiness(aut, atra::SearchOptions::default());
    let found = trees
        .iter()
        .find(|t| atra::membership(aut, t).expect("alphabet matches"));
    match (&verdict, found) {
        (atra::TreeVerdict::Empty, Some(t)) => {
            Err(format!("emptiness says Empty but enumeration accepts {t}"))
        }
        (atra::TreeVerdict::NonEmpty(wit), _) => {
            if atra::membership(aut, wit).expect("alphabet matches") {
                Ok(())
            } else {
                Err(format!("witness {wit} rejected by membership"))
            }
        }
        _ => Ok(()),
    }
}

/// Capture exactness: the direct evaluator and the compiled automaton
/// agree on every enumerated word.
fn check_ltl_case(f: &Ltl, words: &[DataWord], alphabet: &[Label]) -> Result<(), String> {
    let aut = ltl::ltl_to_ara(f, false, alphabet).map_err(|e| e.to_string())?;
    for w in words {
        let direct = ltl::models(w, f);
        let via_aut = ara::membership(&aut, w).expect("alphabet matches");
        if direct != via_aut {
            let small = shrink_word_ltl(f, &aut, w);
            return Err(format!(
                "formula {f:?}: eval={direct} membership={via_aut} on {small}"
            ));
        }
    }
    Ok(())
}

/// Soundness: satisfaction implies automaton acceptance on every
/// enumerated tree (the converse holds at the satisfiability level only).
fn check_xpath_case(e: &NodeExpr, trees: &[DataTree], alphabet: &[Label]) -> Result<(), String> {
    let aut = xpath::xpath_to_atra_over(e, alphabet).map_err(|x| x.to_string())?;
    for t in trees {
        if xpath::satisfied(t, e) && !atra::membership(&aut, t).expect("alphabet matches") {
            let small = shrink_tree_xpath(e, &aut, t);
            return Err(format!("formula {e:?}: satisfied but rejected on {small}"));
        }
    }
    Ok(())
}

fn shrink_word_ltl(f: &Ltl, aut: &Automaton, w: &DataWord) -> DataWord {
    let disagree = |w: &DataWord| ltl::models(w, f) != ara::membership(aut, w).unwrap_or(false);
    let mut cur = w.clone();
    loop {
        let mut improved = false;
        // Drop one position.
        if cur.len() > 1 {
            for i in 1..=cur.len() {
                let items: Vec<_> = cur
                    .items()
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j + 1 != i)
                    .map(|(_, x)| x.clone())
                    .collect();
                let cand = DataWord::new(items);
                if disagree(&cand) {
                    cur = cand;
                    improved = true;
                    break;
                }
            }
        }
        if improved {
            continue;
        }
        // Merge two data classes.
        let data = cur.data();
        'merge: for a in &data {
            for b in &data {
                if a < b {
                    let items: Vec<_> = cur
                        .items()
                        .iter()
                        .map(|(l, d)| (l.clone(), if d == b { *a } else { *d }))
                        .collect();
                    let cand = DataWord::new(items);
                    if disagree(&cand) {
                        cur = cand;
                        improved = true;
                        break 'merge;
                    }
                }
            }
        }
        if !improved {
            return cur;
        }
    }
}

fn shrink_tree_xpath(e: &NodeExpr, aut: &Automaton, t: &DataTree) -> DataTree {
    let bad = |t: &DataTree| xpath::satisfied(t, e) && !atra::membership(aut, t).unwrap_or(true);
    let mut cur = t.clone();
    loop {
        let mut improved = false;
        for pos in cur.positions() {
            if pos.is_root() {
                continue;
            }
            if let Some(cand) = remove_subtree(&cur, &pos) {
                if bad(&cand) {
                    cur = cand;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            return cur;
        }
    }
}

fn remove_subtree(t: &DataTree, target: &crate::model::TreePos) -> Option<DataTree> {
    fn rebuild(
        t: &DataTree,
        pos: &crate::model::TreePos,
        target: &crate::model::TreePos,
    ) -> Option<DataTree> {
        let n = t.child_count(pos)?;
        let children: Vec<DataTree> = (1..=n)
            .filter_map(|i| {
                let c = pos.child(i);
                if &c == target {
                    None
                } else {
                    rebuild(t, &c, target)
                }
            })
            .collect();
        Some(DataTree::node(
            t.label(pos)?.clone(),
            t.datum(pos)?,
            children,
        ))
    }
    rebuild(t, &crate::model::TreePos::root(), target)
}

/// The reflexive downward compatibility probe: for sampled pairs
/// `small ≾ big` and every one-step successor of `big`, the small side can
/// match it (possibly by standing still) while staying below.
pub fn rdc_probe(aut: &Automaton, seed: u64, samples: usize) -> CrosscheckReport {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CrosscheckReport::default();
    let reachable = sample_reachable(aut, &mut rng, samples);
    for big in reachable {
        if report.cases_run >= samples {
            break;
        }
        report.cases_run += 1;
        // Build small ≾ big by deleting threads (data renaming is absorbed
        // by canonicalization).
        let mut small = big.clone();
        small.threads.retain(|_| rng.gen_bool(0.7));
        let cb = canonicalize(&big, aut.ordered);
        let cs = canonicalize(&small, aut.ordered);
        if !subsumes(&cs, &cb) {
            report
                .disagreements
                .push(format!("thread deletion not below: {small:?} vs {big:?}"));
            continue;
        }
        match check_rdc_pair(aut, &small, &big) {
            Ok(()) => report.agreements += 1,
            Err(e) => report.disagreements.push(e),
        }
    }
    report.elapsed_ms = start.elapsed().as_millis();
    report
}

fn one_step_successors(aut: &Automaton, cfg: &Config) -> Vec<Config> {
    let hwm = cfg.data().last().copied().unwrap_or(Datum::int(0));
    let pool = step::emptiness_guess_pool(cfg, aut.ordered, hwm);
    let mut out = step::eps_successors(aut, cfg, &pool);
    match aut.kind {
        Kind::Word => {
            for (_, c) in step::word_move_successors(aut, cfg, hwm) {
                out.push(c);
            }
        }
        Kind::Tree => {
            if step::is_moving(aut, cfg) {
                let down_blocked = step::has_move(aut, cfg, MoveDir::Down) && !cfg.flags.child;
                let next_blocked = step::has_move(aut, cfg, MoveDir::Next) && !cfg.flags.next;
                if !down_blocked && !next_blocked {
                    for dir in [MoveDir::Down, MoveDir::Next] {
                        let available = match dir {
                            MoveDir::Down => cfg.flags.child,
                            MoveDir::Next => cfg.flags.next,
                        };
                        if available {
                            for (_, c) in step::tree_move_successors(aut, cfg, dir, hwm) {
                                out.push(c);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn check_rdc_pair(aut: &Automaton, small: &Config, big: &Config) -> Result<(), String> {
    let succ_small = one_step_successors(aut, small);
    let cs = canonicalize(small, aut.ordered);
    for d in one_step_successors(aut, big) {
        let cd = canonicalize(&d, aut.ordered);
        let simulated = subsumes(&cs, &cd)
            || succ_small
                .iter()
                .any(|d2| subsumes(&canonicalize(d2, aut.ordered), &cd));
        if !simulated {
            return Err(format!(
                "rdc violated: {small:?} cannot follow {big:?} -> {d:?}"
            ));
        }
    }
    Ok(())
}

/// Collects configurations reachable from the initial ones by random
/// exploration in emptiness mode.
fn sample_reachable(aut: &Automaton, rng: &mut ChaCha8Rng, want: usize) -> Vec<Config> {
    let d0 = Datum::int(0);
    let mut frontier: Vec<Config> = Vec::new();
    for l in 0..aut.alphabet.len() as u16 {
        match aut.kind {
            Kind::Word => {
                for next in [false, true] {
                    frontier.push(Config::new(
                        Flags::word(next),
                        l,
                        d0,
                        vec![(aut.initial, d0)],
                    ));
                }
            }
            Kind::Tree => {
                for child in [false, true] {
                    frontier.push(Config::new(
                        Flags { child, next: false },
                        l,
                        d0,
                        vec![(aut.initial, d0)],
                    ));
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut budget = want * 20;
    while let Some(cfg) = frontier.pop() {
        if out.len() >= want || budget == 0 {
            break;
        }
        budget -= 1;
        out.push(cfg.clone());
        let mut succ = one_step_successors(aut, &cfg);
        succ.shuffle(rng);
        succ.truncate(3);
        frontier.extend(succ);
        frontier.shuffle(rng);
        frontier.truncate(50);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ara_crosscheck_small() {
        let bounds = EnumBounds::new(3, 2, &["a", "b"]);
        let report = crosscheck(CheckKind::Ara, 11, 25, &bounds);
        assert!(report.passed(), "{}", report.render());
        assert_eq!(report.cases_run, 25);
    }

    #[test]
    fn ltl_crosscheck_small() {
        let bounds = EnumBounds::new(3, 2, &["a", "b"]);
        let report = crosscheck(CheckKind::Ltl, 5, 10, &bounds);
        assert!(report.passed(), "{}", report.render());
    }

    #[test]
    fn rdc_probe_on_spread_automaton() {
        let aut = crate::instr::parse_automaton(
            "ara { alphabet: a b; initial: q0;\n\
             q0 := (b & spread(qa, q1)) | ((!a | store(qa)) & next q0);\n\
             q1 := neq;\n\
             qa := end? | next qa;\n}",
        )
        .unwrap();
        let report = rdc_probe(&aut, 3, 200);
        assert!(report.passed(), "{}", report.render());
        assert!(report.cases_run > 0);
    }

    #[test]
    fn crosscheck_is_deterministic() {
        let bounds = EnumBounds::new(2, 2, &["a"]);
        let a = crosscheck(CheckKind::Ara, 7, 10, &bounds);
        let b = crosscheck(CheckKind::Ara, 7, 10, &bounds);
        assert_eq!(a.cases_run, b.cases_run);
        assert_eq!(a.agreements, b.agreements);
        assert_eq!(a.disagreements, b.disagreements);
    }
}
