//! The transition relation on configurations.
//!
//! Non-moving steps act on one thread at a time. Instructions fall into
//! priority classes, and a step is enabled only when no thread of an
//! earlier class remains:
//!
//! 1. `And`, `Store` — forced structural steps;
//! 2. `Or`, `Guess` — nondeterministic choices;
//! 3. `spread` — fires once every other thread is a move, a test or
//!    another spread, so that all stores and guesses have already
//!    contributed their data values;
//! 4. tests (letter, type, equality and order tests) — a passing test
//!    removes its thread, a failing test kills the configuration;
//! 5. moves — enabled only when *every* thread is a move instruction.
//!
//! Classes 1, 2 and 3 may act while tests are still pending: a test's
//! verdict only depends on the fixed current position, so delaying it is
//! harmless, while running it early could erase a datum that a pending
//! spread is required to take into account. A `spread(q, _)` collects the
//! threads sitting in `q` or in any auxiliary state of `q`'s transition
//! formula, so a thread that has partially resolved `q`'s formula still
//! counts as a `q`-thread.

use crate::config::{Config, Flags, Thread};
use crate::instr::{Automaton, Instr, Kind, MoveDir, TypeTest};
use crate::model::Datum;
use std::collections::HashSet;

/// Priority class of an instruction; lower acts first.
fn class(i: Instr) -> u8 {
    match i {
        Instr::And(..) | Instr::Store(_) => 1,
        Instr::Or(..) | Instr::Guess(_) => 2,
        Instr::Spread1(_) | Instr::Spread2(..) => 3,
        Instr::Letter(_)
        | Instr::NotLetter(_)
        | Instr::Type(_)
        | Instr::Eq
        | Instr::NotEq
        | Instr::TestLt
        | Instr::TestGt
        | Instr::TestEq
        | Instr::TestNeq => 4,
        Instr::Move(..) => 5,
    }
}

fn min_class(aut: &Automaton, cfg: &Config) -> u8 {
    cfg.threads
        .iter()
        .map(|&(s, _)| class(aut.instr(s)))
        .min()
        .unwrap_or(5)
}

/// Evaluates a test instruction at the current position. `register` is the
/// thread's datum, `cfg.datum` the position's.
fn test_passes(cfg: &Config, i: Instr, register: Datum) -> bool {
    match i {
        Instr::Letter(l) => cfg.letter == l,
        Instr::NotLetter(l) => cfg.letter != l,
        Instr::Type(TypeTest::Next(b)) => cfg.flags.next == b,
        Instr::Type(TypeTest::Child(b)) => cfg.flags.child == b,
        Instr::Eq | Instr::TestEq => cfg.datum == register,
        Instr::NotEq | Instr::TestNeq => cfg.datum != register,
        Instr::TestLt => cfg.datum < register,
        Instr::TestGt => cfg.datum > register,
        _ => unreachable!("not a test"),
    }
}

/// The set of new threads a spread spawns, given the executing thread has
/// been removed and `rest` remains.
fn spread_spawn(aut: &Automaton, rest: &[Thread], i: Instr) -> Vec<Thread> {
    match i {
        Instr::Spread1(q1) => rest.iter().map(|&(_, d)| (q1, d)).collect(),
        Instr::Spread2(q2, q1) => rest
            .iter()
            .filter(|&&(s, _)| aut.spread_matches(q2, s))
            .map(|&(_, d)| (q1, d))
            .collect(),
        _ => unreachable!("not a spread"),
    }
}

/// All one-step non-moving successors of `cfg`, with guesses drawn from
/// `guess_pool`. Implements the priority discipline described in the
/// module docs.
pub fn eps_successors(aut: &Automaton, cfg: &Config, guess_pool: &[Datum]) -> Vec<Config> {
    let mc = min_class(aut, cfg);
    let mut out = Vec::new();
    for (idx, &(s, reg)) in cfg.threads.iter().enumerate() {
        let i = aut.instr(s);
        if class(i) != mc {
            continue;
        }
        let mut rest = cfg.clone();
        rest.threads.remove(idx);
        match i {
            Instr::And(p, q) => {
                let mut c = rest.clone();
                c.insert((p, reg));
                c.insert((q, reg));
                out.push(c);
            }
            Instr::Or(p, q) => {
                for t in [p, q] {
                    let mut c = rest.clone();
                    c.insert((t, reg));
                    out.push(c);
                }
            }
            Instr::Store(q) => {
                let mut c = rest.clone();
                c.insert((q, cfg.datum));
                out.push(c);
            }
            Instr::Guess(q) => {
                for &e in guess_pool {
                    let mut c = rest.clone();
                    c.insert((q, e));
                    out.push(c);
                }
            }
            Instr::Spread1(_) | Instr::Spread2(..) => {
                let mut c = rest.clone();
                for t in spread_spawn(aut, &rest.threads, i) {
                    c.insert(t);
                }
                out.push(c);
            }
            Instr::Move(..) => {}
            test => {
                if test_passes(cfg, test, reg) {
                    out.push(rest);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Whether the configuration is moving: non-trivially, every thread is a
/// move instruction.
pub fn is_moving(aut: &Automaton, cfg: &Config) -> bool {
    !cfg.threads.is_empty() && cfg.threads.iter().all(|&(s, _)| aut.instr(s).is_move())
}

/// The thread set carried into the `dir`-image of a moving configuration.
pub fn move_threads(aut: &Automaton, cfg: &Config, dir: MoveDir) -> Vec<Thread> {
    cfg.threads
        .iter()
        .filter_map(|&(s, d)| match aut.instr(s) {
            Instr::Move(md, q) if md == dir => Some((q, d)),
            _ => None,
        })
        .collect()
}

/// Whether the configuration has any thread moving in direction `dir`.
pub fn has_move(aut: &Automaton, cfg: &Config, dir: MoveDir) -> bool {
    cfg.threads
        .iter()
        .any(|&(s, _)| matches!(aut.instr(s), Instr::Move(md, _) if md == dir))
}

/// Representative data values for a nondeterministic choice relative to a
/// set of carried values. Unordered mode: each carried value plus one
/// globally fresh one (`hwm + 1`). Ordered mode: each carried value plus
/// one representative per gap (below the minimum, between each adjacent
/// pair, above the maximum).
pub fn datum_choices(carried: &[Datum], ordered: bool, hwm: Datum) -> Vec<Datum> {
    let mut data: Vec<Datum> = carried.to_vec();
    data.sort();
    data.dedup();
    if !ordered {
        data.push(hwm.above());
        return data;
    }
    let mut out = Vec::new();
    if data.is_empty() {
        out.push(hwm.above());
        return out;
    }
    out.push(data[0].below());
    for i in 0..data.len() {
        out.push(data[i]);
        if i + 1 < data.len() {
            out.push(Datum::midpoint(data[i], data[i + 1]));
        }
    }
    out.push(data[data.len() - 1].above());
    out
}

/// The guess pool of a configuration in emptiness mode: its own data plus
/// fresh representatives per [`datum_choices`].
pub fn emptiness_guess_pool(cfg: &Config, ordered: bool, hwm: Datum) -> Vec<Datum> {
    datum_choices(&cfg.data(), ordered, hwm)
}

/// One emitted position of a structure under construction.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Emission {
    pub letter: crate::instr::LabelId,
    pub datum: Datum,
    pub flags: Flags,
}

/// All moving successors of a word configuration in emptiness mode: every
/// choice of next letter, next type flag and representative next datum.
pub fn word_move_successors(aut: &Automaton, cfg: &Config, hwm: Datum) -> Vec<(Emission, Config)> {
    debug_assert_eq!(aut.kind, Kind::Word);
    if !is_moving(aut, cfg) || !cfg.flags.next {
        return Vec::new();
    }
    let carried = move_threads(aut, cfg, MoveDir::Next);
    let data: Vec<Datum> = carried.iter().map(|&(_, d)| d).collect();
    let mut out = Vec::new();
    for letter in 0..aut.alphabet.len() as u16 {
        for next in [false, true] {
            for &d in &datum_choices(&data, aut.ordered, hwm) {
                let flags = Flags::word(next);
                let c = Config::new(flags, letter, d, carried.clone());
                out.push((
                    Emission {
                        letter,
                        datum: d,
                        flags,
                    },
                    c,
                ));
            }
        }
    }
    out
}

/// The `dir`-images of a moving tree node configuration in emptiness mode.
pub fn tree_move_successors(
    aut: &Automaton,
    cfg: &Config,
    dir: MoveDir,
    hwm: Datum,
) -> Vec<(Emission, Config)> {
    debug_assert_eq!(aut.kind, Kind::Tree);
    let carried = move_threads(aut, cfg, dir);
    let data: Vec<Datum> = carried.iter().map(|&(_, d)| d).collect();
    let mut out = Vec::new();
    for letter in 0..aut.alphabet.len() as u16 {
        for child in [false, true] {
            for next in [false, true] {
                for &d in &datum_choices(&data, aut.ordered, hwm) {
                    let flags = Flags { child, next };
                    let c = Config::new(flags, letter, d, carried.clone());
                    out.push((
                        Emission {
                            letter,
                            datum: d,
                            flags,
                        },
                        c,
                    ));
                }
            }
        }
    }
    out
}

/// Applies all forced steps (classes 1 and 4) to a fixpoint. Returns
/// `None` when a test fails or the forced chain cycles, both of which are
/// dead ends. The result either has empty threads, or pending choices
/// (classes 2/3), or only move threads.
pub fn saturate(aut: &Automaton, cfg: &Config) -> Option<Config> {
    let mut cur = cfg.clone();
    let mut seen: HashSet<Config> = HashSet::new();
    'outer: loop {
        if !seen.insert(cur.clone()) {
            return None;
        }
        let mc = min_class(aut, &cur);
        if mc == 1 {
            for (idx, &(s, reg)) in cur.threads.iter().enumerate() {
                match aut.instr(s) {
                    Instr::And(p, q) => {
                        let mut c = cur.clone();
                        c.threads.remove(idx);
                        c.insert((p, reg));
                        c.insert((q, reg));
                        cur = c;
                        continue 'outer;
                    }
                    Instr::Store(q) => {
                        let mut c = cur.clone();
                        c.threads.remove(idx);
                        c.insert((q, cur.datum));
                        cur = c;
                        continue 'outer;
                    }
                    _ => {}
                }
            }
            unreachable!();
        }
        if mc == 4 {
            for (idx, &(s, reg)) in cur.threads.iter().enumerate() {
                let i = aut.instr(s);
                if class(i) == 4 {
                    if test_passes(&cur, i, reg) {
                        let mut c = cur.clone();
                        c.threads.remove(idx);
                        cur = c;
                        continue 'outer;
                    } else {
                        return None;
                    }
                }
            }
            unreachable!();
        }
        return Some(cur);
    }
}

/// The nondeterministic continuations of a saturated configuration:
/// resolutions of the first choice thread (class 2), or each pending
/// spread (class 3). Empty when the configuration is all-moving, dead,
/// or accepting.
pub fn branch_successors(aut: &Automaton, cfg: &Config, guess_pool: &[Datum]) -> Vec<Config> {
    let mc = min_class(aut, cfg);
    let mut out = Vec::new();
    match mc {
        2 => {
            // First class-2 thread only: choices on distinct threads
            // commute, so one branch point suffices.
            let (idx, &(s, reg)) = cfg
                .threads
                .iter()
                .enumerate()
                .find(|&(_, &(s, _))| class(aut.instr(s)) == 2)
                .expect("class-2 thread");
            let mut rest = cfg.clone();
            rest.threads.remove(idx);
            match aut.instr(s) {
                Instr::Or(p, q) => {
                    for t in [p, q] {
                        let mut c = rest.clone();
                        c.insert((t, reg));
                        out.push(c);
                    }
                }
                Instr::Guess(q) => {
                    for &e in guess_pool {
                        let mut c = rest.clone();
                        c.insert((q, e));
                        out.push(c);
                    }
                }
                _ => unreachable!(),
            }
        }
        3 => {
            // Spread firing order can matter; branch over each pending
            // spread.
            for (idx, &(s, _)) in cfg.threads.iter().enumerate() {
                let i = aut.instr(s);
                if class(i) == 3 {
                    let mut c = cfg.clone();
                    c.threads.remove(idx);
                    for t in spread_spawn(aut, &c.threads.clone(), i) {
                        c.insert(t);
                    }
                    out.push(c);
                }
            }
        }
        _ => {}
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instr::{RawAutomaton, F};
    use crate::model::Label;

    fn aut(rules: Vec<(&str, F)>) -> Automaton {
        RawAutomaton {
            kind: Kind::Word,
            ordered: false,
            alphabet: vec![Label::new("a"), Label::new("b")],
            initial: rules[0].0.to_string(),
            rules: rules
                .into_iter()
                .map(|(n, f)| (n.to_string(), f))
                .collect(),
        }
        .normalize()
        .unwrap()
    }

    fn cfg(aut: &Automaton, next: bool, letter: &str, datum: u64, threads: &[(&str, u64)]) -> Config {
        let lid = aut
            .label_id(&Label::new(letter))
            .expect("letter in alphabet");
        Config::new(
            Flags::word(next),
            lid,
            Datum::int(datum),
            threads
                .iter()
                .map(|&(n, d)| {
                    let s = aut
                        .state_ids()
                        .find(|&s| aut.state_name(s) == n)
                        .expect("state");
                    (s, Datum::int(d))
                })
                .collect(),
        )
    }

    #[test]
    fn eq_test_consumes_thread() {
        let a = aut(vec![("q", F::Eq)]);
        let c = cfg(&a, true, "a", 5, &[("q", 5)]);
        let succ = eps_successors(&a, &c, &[]);
        assert_eq!(succ.len(), 1);
        assert!(succ[0].threads.is_empty());
    }

    #[test]
    fn eq_test_failure_is_stuck() {
        let a = aut(vec![("q", F::Eq)]);
        let c = cfg(&a, true, "a", 5, &[("q", 7)]);
        assert!(eps_successors(&a, &c, &[]).is_empty());
        assert!(saturate(&a, &c).is_none());
    }

    #[test]
    fn spread_two_arg_spec_example() {
        // delta(q)=spread(p,r), delta(p)=next p' — firing replaces the
        // spread thread by one r-thread per p-thread.
        let a = aut(vec![
            ("q", F::Spread2("p".into(), Box::new(F::r("r")))),
            ("p", F::mv(MoveDir::Next, F::r("p2"))),
            ("p2", F::Eq),
            ("r", F::Eq),
        ]);
        let c = cfg(&a, true, "b", 5, &[("q", 9), ("p", 9)]);
        let succ = eps_successors(&a, &c, &[]);
        assert_eq!(succ.len(), 1);
        assert_eq!(succ[0], cfg(&a, true, "b", 5, &[("r", 9), ("p", 9)]));
    }

    #[test]
    fn spread_waits_for_stores_and_guesses() {
        let a = aut(vec![
            ("q", F::Spread1(Box::new(F::r("r")))),
            ("p", F::store(F::r("p2"))),
            ("p2", F::mv(MoveDir::Next, F::r("p2"))),
            ("r", F::Eq),
        ]);
        // The store must resolve first (class 1 before class 3), so the
        // spread sees the stored datum.
        let c = cfg(&a, true, "a", 5, &[("q", 1), ("p", 9)]);
        let succ = eps_successors(&a, &c, &[]);
        assert_eq!(succ.len(), 1);
        // After the forced store, p2 carries 5; then the spread collects it.
        let after_store = &succ[0];
        let succ2 = eps_successors(&a, after_store, &[]);
        assert_eq!(succ2.len(), 1);
        assert_eq!(succ2[0], cfg(&a, true, "a", 5, &[("p2", 5), ("r", 5)]));
    }

    #[test]
    fn tests_wait_for_spreads() {
        // A type test may not erase its thread while a spread is pending.
        let a = aut(vec![
            ("q", F::Spread1(Box::new(F::r("r")))),
            ("e", F::Type(TypeTest::Next(false))),
            ("r", F::NotEq),
        ]);
        let c = cfg(&a, false, "a", 5, &[("q", 1), ("e", 9)]);
        let succ = eps_successors(&a, &c, &[]);
        // Only the spread may act; it collects the test thread's datum.
        assert_eq!(succ.len(), 1);
        assert_eq!(succ[0], cfg(&a, false, "a", 5, &[("e", 9), ("r", 9)]));
    }

    #[test]
    fn guess_enumerates_pool() {
        let a = aut(vec![("q", F::guess(F::r("r"))), ("r", F::Eq)]);
        let c = cfg(&a, true, "a", 5, &[("q", 5)]);
        let pool = emptiness_guess_pool(&c, false, Datum::int(5));
        assert_eq!(pool.len(), 2); // 5 and one fresh
        let succ = eps_successors(&a, &c, &pool);
        assert_eq!(succ.len(), 2);
    }

    #[test]
    fn move_successor_enumeration() {
        let a = aut(vec![("q", F::mv(MoveDir::Next, F::r("q")))]);
        let c = cfg(&a, true, "a", 1, &[("q", 1)]);
        let succ = word_move_successors(&a, &c, Datum::int(1));
        // 2 letters x 2 types x (kept 1, fresh) = 8 concrete successors,
        // 4 canonical classes per letter pair.
        assert_eq!(succ.len(), 8);
        let c_end = cfg(&a, false, "a", 1, &[("q", 1)]);
        assert!(word_move_successors(&a, &c_end, Datum::int(1)).is_empty());
    }

    #[test]
    fn ordered_datum_choices_cover_gaps() {
        let carried = vec![Datum::int(2), Datum::int(5)];
        let ch = datum_choices(&carried, true, Datum::int(5));
        // below, 2, mid, 5, above
        assert_eq!(ch.len(), 5);
        assert!(ch[0] < Datum::int(2));
        assert_eq!(ch[1], Datum::int(2));
        assert!(Datum::int(2) < ch[2] && ch[2] < Datum::int(5));
        assert_eq!(ch[3], Datum::int(5));
        assert!(ch[4] > Datum::int(5));
    }
}
