//! Alternating register automata on data words: emptiness via coverability
//! saturation over canonical configurations, membership on concrete words,
//! boolean closure, and the regular-language embedding.

use crate::config::{canonicalize, subsumes, Canonical, Config, Flags};
use crate::instr::{Automaton, AutomatonError, Kind, LabelId, MoveDir};
use crate::model::{DataWord, Datum, Label};
use crate::regex::LabelDfa;
use crate::step;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

pub use crate::instr::{combine, CombineMode};

/// Result of an emptiness check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum WordVerdict {
    Empty,
    NonEmpty(DataWord),
    /// The optional step budget ran out; deliberately distinct from Empty.
    ResourceExhausted,
}

impl WordVerdict {
    pub fn is_nonempty(&self) -> bool {
        matches!(self, WordVerdict::NonEmpty(_))
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SearchOptions {
    /// Maximum number of configurations expanded before giving up.
    pub max_steps: Option<u64>,
}

struct Entry {
    cfg: Config,
    canon: Canonical,
    hwm: Datum,
    parent: Option<usize>,
    emission: Option<step::Emission>,
}

/// Decides emptiness of a word automaton. On `NonEmpty` the returned word
/// is accepted by the automaton (and is re-checkable with [`membership`]).
pub fn emptiness(aut: &Automaton, opts: SearchOptions) -> WordVerdict {
    assert_eq!(aut.kind, Kind::Word);
    let mut arena: Vec<Entry> = Vec::new();
    let mut kept: Vec<usize> = Vec::new();
    let mut heap: BinaryHeap<Reverse<(u32, Canonical, usize)>> = BinaryHeap::new();

    let d0 = Datum::int(0);
    let push = |arena: &mut Vec<Entry>,
                    kept: &mut Vec<usize>,
                    heap: &mut BinaryHeap<Reverse<(u32, Canonical, usize)>>,
                    cfg: Config,
                    moves: u32,
                    hwm: Datum,
                    parent: Option<usize>,
                    emission: Option<step::Emission>| {
        let Some(cfg) = step::saturate(aut, &cfg) else {
            return;
        };
        let canon = canonicalize(&cfg, aut.ordered);
        if kept
            .iter()
            .any(|&k| subsumes(&arena[k].canon, &canon))
        {
            return;
        }
        kept.retain(|&k| !subsumes(&canon, &arena[k].canon));
        let hwm = cfg.data().last().copied().map_or(hwm, |m| hwm.max(m));
        let idx = arena.len();
        arena.push(Entry {
            cfg,
            canon: canon.clone(),
            hwm,
            parent,
            emission,
        });
        kept.push(idx);
        heap.push(Reverse((moves, canon, idx)));
    };

    for next in [false, true] {
        for l in 0..aut.alphabet.len() as LabelId {
            let cfg = Config::new(Flags::word(next), l, d0, vec![(aut.initial, d0)]);
            push(&mut arena, &mut kept, &mut heap, cfg, 0, d0, None, None);
        }
    }

    let mut steps = 0u64;
    while let Some(Reverse((moves, canon, idx))) = heap.pop() {
        // A retired entry may still sit in the heap.
        if !kept.contains(&idx) {
            continue;
        }
        if arena[idx].canon != canon {
            continue;
        }
        if arena[idx].cfg.is_accepting() {
            return WordVerdict::NonEmpty(extract_word(aut, &arena, idx));
        }
        steps += 1;
        if let Some(max) = opts.max_steps {
            if steps > max {
                return WordVerdict::ResourceExhausted;
            }
        }
        let cfg = arena[idx].cfg.clone();
        let hwm = arena[idx].hwm;
        let pool = step::emptiness_guess_pool(&cfg, aut.ordered, hwm);
        for c in step::branch_successors(aut, &cfg, &pool) {
            push(
                &mut arena, &mut kept, &mut heap, c, moves, hwm, Some(idx), None,
            );
        }
        if step::is_moving(aut, &cfg) {
            for (em, c) in step::word_move_successors(aut, &cfg, hwm) {
                push(
                    &mut arena,
                    &mut kept,
                    &mut heap,
                    c,
                    moves + 1,
                    hwm,
                    Some(idx),
                    Some(em),
                );
            }
        }
    }
    WordVerdict::Empty
}

/// Rebuilds the witness word from the stored parent chain, instantiating
/// data values as non-negative integers by rank.
fn extract_word(aut: &Automaton, arena: &[Entry], accept: usize) -> DataWord {
    let mut chain = Vec::new();
    let mut cur = Some(accept);
    while let Some(i) = cur {
        chain.push(i);
        cur = arena[i].parent;
    }
    chain.reverse();
    let root = &arena[chain[0]];
    let mut items: Vec<(LabelId, Datum)> = vec![(root.cfg.letter, root.cfg.datum)];
    let mut last_flags = root.cfg.flags;
    for &i in &chain[1..] {
        if let Some(em) = arena[i].emission {
            items.push((em.letter, em.datum));
            last_flags = em.flags;
        }
    }
    if last_flags.next {
        // The run stopped while promising one more position; the suffix is
        // unconstrained, so pad with a fresh datum.
        let hwm = arena[accept].hwm;
        items.push((0, hwm.above()));
    }
    rank_word(aut, &items)
}

fn rank_word(aut: &Automaton, items: &[(LabelId, Datum)]) -> DataWord {
    let mut values: Vec<Datum> = items.iter().map(|&(_, d)| d).collect();
    values.sort();
    values.dedup();
    let rank: HashMap<Datum, u64> = values
        .into_iter()
        .enumerate()
        .map(|(i, d)| (d, i as u64))
        .collect();
    DataWord::new(
        items
            .iter()
            .map(|&(l, d)| (aut.label(l).clone(), Datum::int(rank[&d])))
            .collect(),
    )
}

/// Decides whether the automaton accepts the given data word. Guessed
/// values are drawn from the word's data plus fresh representatives; the
/// search is memoized over (position, configuration).
pub fn membership(aut: &Automaton, word: &DataWord) -> Result<bool, AutomatonError> {
    assert_eq!(aut.kind, Kind::Word);
    let letters: Vec<LabelId> = word
        .positions()
        .map(|i| {
            aut.label_id(word.label(i))
                .ok_or_else(|| AutomatonError::UnknownLetter(word.label(i).as_str().to_string()))
        })
        .collect::<Result<_, _>>()?;
    let pool = step::datum_choices(&word.data(), aut.ordered, word.data().last().copied().unwrap());
    let init = Config::new(
        Flags::word(word.type_of(1).unwrap().has_next),
        letters[0],
        word.datum(1),
        vec![(aut.initial, word.datum(1))],
    );
    let mut visited: HashSet<(usize, Config)> = HashSet::new();
    Ok(search_word(aut, word, &letters, &pool, 1, init, &mut visited))
}

fn search_word(
    aut: &Automaton,
    word: &DataWord,
    letters: &[LabelId],
    pool: &[Datum],
    pos: usize,
    cfg: Config,
    visited: &mut HashSet<(usize, Config)>,
) -> bool {
    let Some(cfg) = step::saturate(aut, &cfg) else {
        return false;
    };
    if cfg.is_accepting() {
        return true;
    }
    if !visited.insert((pos, cfg.clone())) {
        return false;
    }
    for c in step::branch_successors(aut, &cfg, pool) {
        if search_word(aut, word, letters, pool, pos, c, visited) {
            return true;
        }
    }
    if step::is_moving(aut, &cfg) && cfg.flags.next {
        let next = pos + 1;
        let threads = step::move_threads(aut, &cfg, MoveDir::Next);
        let c = Config::new(
            Flags::word(word.type_of(next).unwrap().has_next),
            letters[next - 1],
            word.datum(next),
            threads,
        );
        if search_word(aut, word, letters, pool, next, c, visited) {
            return true;
        }
    }
    false
}

/// Embeds a regular language over labels: the result accepts exactly the
/// data words whose label projection the DFA accepts, ignoring data.
pub fn dfa_to_ara(dfa: &LabelDfa) -> Result<Automaton, AutomatonError> {
    use crate::instr::{RawAutomaton, F};
    if dfa.trans.len() != dfa.state_count()
        || dfa.trans.iter().any(|row| row.len() != dfa.alphabet.len())
    {
        return Err(AutomatonError::MissingTransition(
            "partial DFA rejected".to_string(),
        ));
    }
    let name = |s: usize| format!("q{s}");
    let mut rules = Vec::new();
    for s in 0..dfa.state_count() {
        let mut alts = Vec::new();
        for (i, l) in dfa.alphabet.iter().enumerate() {
            let succ = dfa.trans[s][i];
            let at_end = if dfa.accepting[succ] { F::True } else { F::False };
            let cont = F::or(
                F::and(F::Type(crate::instr::TypeTest::Next(false)), at_end),
                F::mv(MoveDir::Next, F::r(&name(succ))),
            );
            alts.push(F::and(F::Letter(l.clone()), cont));
        }
        rules.push((name(s), F::any(alts)));
    }
    RawAutomaton {
        kind: Kind::Word,
        ordered: false,
        alphabet: dfa.alphabet.clone(),
        initial: name(dfa.initial),
        rules,
    }
    .normalize()
}

/// Convenience: parse + compile a regex over the given alphabet into a
/// word automaton accepting its label projection language.
pub fn regex_to_ara(pattern: &str, alphabet: &[Label]) -> Result<Automaton, AutomatonError> {
    let re = crate::regex::parse_regex(&mut crate::model::text::Scanner::new(pattern)).map_err(
        |e| match e {
            crate::model::ParseError::Syntax { line, col, msg } => {
                AutomatonError::Parse { line, col, msg }
            }
            other => AutomatonError::Parse {
                line: 0,
                col: 0,
                msg: other.to_string(),
            },
        },
    )?;
    dfa_to_ara(&LabelDfa::from_regex(&re, alphabet))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instr::{parse_automaton, RawAutomaton, F};
    use crate::model::parse_word;

    fn ara(text: &str) -> Automaton {
        parse_automaton(text).unwrap()
    }

    fn accepts(aut: &Automaton, w: &str) -> bool {
        membership(aut, &parse_word(w).unwrap()).unwrap()
    }

    #[test]
    fn emptiness_eq_nonempty_with_unit_witness() {
        let aut = ara("ara { alphabet: a; initial: q0; q0 := eq; }");
        match emptiness(&aut, SearchOptions::default()) {
            WordVerdict::NonEmpty(w) => {
                assert_eq!(w.len(), 1);
                assert!(membership(&aut, &w).unwrap());
            }
            v => panic!("expected NonEmpty, got {v:?}"),
        }
    }

    #[test]
    fn emptiness_neq_empty() {
        let aut = ara("ara { alphabet: a; initial: q0; q0 := neq; }");
        assert_eq!(emptiness(&aut, SearchOptions::default()), WordVerdict::Empty);
    }

    /// The spread automaton accepting words with some b-position whose
    /// datum differs from all previous a-data.
    fn spread_example() -> Automaton {
        ara(
            "ara { alphabet: a b; initial: q0;\n\
             q0 := (b & spread(qa, q1)) | ((!a | store(qa)) & next q0);\n\
             q1 := neq;\n\
             qa := end? | next qa;\n}",
        )
    }

    #[test]
    fn spread_example_emptiness_and_membership() {
        let aut = spread_example();
        let v = emptiness(&aut, SearchOptions::default());
        assert!(v.is_nonempty());
        assert!(accepts(&aut, "b@5"));
        if let WordVerdict::NonEmpty(w) = v {
            assert!(membership(&aut, &w).unwrap());
        }
    }

    #[test]
    fn spread_example_membership_cases() {
        let aut = spread_example();
        // Some b whose datum differs from all previous a-data.
        assert!(accepts(&aut, "a@1 a@2 b@3"));
        assert!(!accepts(&aut, "a@1 b@1"));
        assert!(accepts(&aut, "a@1 b@1 b@2"));
        assert!(!accepts(&aut, "a@1 a@2"));
        assert!(!accepts(&aut, "a@1 b@1 a@2 b@2"));
        assert!(accepts(&aut, "a@1 b@2 a@2 b@1")); // b@2 differs from {1}
    }

    #[test]
    fn membership_letter_tests() {
        let aut = ara("ara { alphabet: a b; initial: q0; q0 := a; }");
        assert!(accepts(&aut, "a@3"));
        assert!(!accepts(&aut, "b@3"));
        // Suffix beyond the run is unconstrained.
        assert!(accepts(&aut, "a@3 b@9"));
    }

    #[test]
    fn membership_unknown_letter_errors() {
        let aut = ara("ara { alphabet: a; initial: q0; q0 := a; }");
        assert!(membership(&aut, &parse_word("c@1").unwrap()).is_err());
    }

    #[test]
    fn guess_requires_future_occurrence() {
        // guess a value, then check it occurs at the second position
        let aut = ara(
            "ara { alphabet: a; initial: q0;\n\
             q0 := guess(q1);\n\
             q1 := next q2;\n\
             q2 := eq;\n}",
        );
        assert!(accepts(&aut, "a@1 a@2"));
        let v = emptiness(&aut, SearchOptions::default());
        assert!(v.is_nonempty());
    }

    #[test]
    fn combine_union_and_intersection() {
        let only_a = ara("ara { alphabet: a b; initial: q0; q0 := a; }");
        let not_a = ara("ara { alphabet: a b; initial: q0; q0 := !a; }");
        let both = combine(&only_a, &not_a, CombineMode::Intersection).unwrap();
        assert_eq!(emptiness(&both, SearchOptions::default()), WordVerdict::Empty);
        let either = combine(&only_a, &not_a, CombineMode::Union).unwrap();
        for w in ["a@1", "b@1"] {
            assert!(accepts(&either, w));
        }
        // union(A, A) has the language of A on samples
        let aa = combine(&only_a, &only_a, CombineMode::Union).unwrap();
        for w in ["a@1", "b@1", "a@1 b@2"] {
            assert_eq!(accepts(&aa, w), accepts(&only_a, w));
        }
    }

    #[test]
    fn combine_rejects_mode_mismatch() {
        let u = ara("ara { alphabet: a; initial: q0; q0 := a; }");
        let o = ara("ara ordered { alphabet: a; initial: q0; q0 := lt; }");
        assert!(combine(&u, &o, CombineMode::Union).is_err());
    }

    #[test]
    fn dfa_embedding_matches_label_language() {
        let ab = [Label::new("a"), Label::new("b")];
        let aut = regex_to_ara("a*", &ab).unwrap();
        assert!(accepts(&aut, "a@1 a@2"));
        assert!(!accepts(&aut, "a@1 b@2"));
        let aut = regex_to_ara("a b", &ab).unwrap();
        // Exhaustive check against the DFA over all label sequences <= 3.
        let dfa = LabelDfa::from_regex(
            &crate::regex::parse_regex(&mut crate::model::text::Scanner::new("a b")).unwrap(),
            &ab,
        );
        for n in 1..=3usize {
            for mask in 0..(1usize << n) {
                let labels: Vec<Label> = (0..n)
                    .map(|i| ab[(mask >> i) & 1].clone())
                    .collect();
                let w = DataWord::new(
                    labels
                        .iter()
                        .map(|l| (l.clone(), Datum::int(7)))
                        .collect(),
                );
                assert_eq!(
                    membership(&aut, &w).unwrap(),
                    dfa.accepts(labels.iter()),
                    "{w}"
                );
            }
        }
        // Empty-language DFA stays empty.
        let empty = regex_to_ara("a a", &[Label::new("b")]);
        assert!(empty.is_err() || {
            let aut = empty.unwrap();
            emptiness(&aut, SearchOptions::default()) == WordVerdict::Empty
        });
    }

    #[test]
    fn ordered_tests_order_witnesses() {
        // q0 := store(q1); q1 := next q2; q2 := lt  — second datum below first
        let aut = ara(
            "ara ordered { alphabet: a; initial: q0;\n\
             q0 := store(q1); q1 := next q2; q2 := lt;\n}",
        );
        assert!(accepts(&aut, "a@5 a@3"));
        assert!(!accepts(&aut, "a@3 a@5"));
        assert!(!accepts(&aut, "a@3 a@3"));
        match emptiness(&aut, SearchOptions::default()) {
            WordVerdict::NonEmpty(w) => {
                assert!(w.len() >= 2);
                assert!(w.datum(2) < w.datum(1), "witness {w}");
                assert!(membership(&aut, &w).unwrap());
            }
            v => panic!("expected NonEmpty, got {v:?}"),
        }
    }

    #[test]
    fn resource_budget_reports_exhaustion() {
        let aut = spread_example();
        assert_eq!(
            emptiness(&aut, SearchOptions { max_steps: Some(1) }),
            WordVerdict::ResourceExhausted
        );
    }

    #[test]
    fn normalized_spread_of_disjunction_language_preserved() {
        // q0 := spread(qa | qb) requires the fresh Or state; compare against
        // the hand-built two-state version by membership on small words.
        let raw = RawAutomaton {
            kind: Kind::Word,
            ordered: false,
            alphabet: vec![Label::new("a")],
            initial: "q0".into(),
            rules: vec![
                (
                    "q0".into(),
                    F::and(
                        F::store(F::mv(MoveDir::Next, F::Spread1(Box::new(F::or(
                            F::r("qa"),
                            F::r("qb"),
                        ))))),
                        F::True,
                    ),
                ),
                ("qa".into(), F::Eq),
                ("qb".into(), F::NotEq),
            ],
        };
        let aut = raw.normalize().unwrap();
        // spread(qa | qb) over data {d1}: spawns a thread that may check
        // eq or neq; on any 2-letter word one of them passes.
        assert!(accepts(&aut, "a@1 a@1"));
        assert!(accepts(&aut, "a@1 a@2"));
    }
}
