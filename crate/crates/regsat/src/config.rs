//! Run configurations, canonical forms modulo data renaming, and the
//! well-quasi-order used for subsumption pruning.
//!
//! A configuration holds the current position's type flags, letter and
//! datum, plus a finite set of threads `(state, register)`. Emptiness
//! abstracts the position away; membership keeps it alongside.

use crate::instr::{LabelId, StateId};
use crate::model::Datum;

/// One execution thread: a state together with its register datum.
pub type Thread = (StateId, Datum);

/// Type flags of the current position. Word positions use only `next`
/// (whether a next position exists); tree nodes use both.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Flags {
    pub child: bool,
    pub next: bool,
}

impl Flags {
    pub fn word(has_next: bool) -> Self {
        Flags {
            child: false,
            next: has_next,
        }
    }
}

/// A position-abstracted configuration. The thread vector is kept sorted
/// and deduplicated, so it behaves as a finite set.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Config {
    pub flags: Flags,
    pub letter: LabelId,
    pub datum: Datum,
    pub threads: Vec<Thread>,
}

impl Config {
    pub fn new(flags: Flags, letter: LabelId, datum: Datum, mut threads: Vec<Thread>) -> Self {
        threads.sort();
        threads.dedup();
        Config {
            flags,
            letter,
            datum,
            threads,
        }
    }

    pub fn insert(&mut self, t: Thread) {
        if let Err(i) = self.threads.binary_search(&t) {
            self.threads.insert(i, t);
        }
    }

    pub fn remove(&mut self, t: &Thread) -> bool {
        if let Ok(i) = self.threads.binary_search(t) {
            self.threads.remove(i);
            true
        } else {
            false
        }
    }

    pub fn is_accepting(&self) -> bool {
        self.threads.is_empty()
    }

    /// All data values of the configuration: the current datum plus every
    /// register.
    pub fn data(&self) -> Vec<Datum> {
        let mut ds: Vec<Datum> = self.threads.iter().map(|&(_, d)| d).collect();
        ds.push(self.datum);
        ds.sort();
        ds.dedup();
        ds
    }
}

/// The set of states sharing one data value, with a marker for the class
/// of the current datum.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DataClass {
    pub star: bool,
    pub states: Vec<StateId>,
}

impl DataClass {
    /// Whether an injection may send a `self` class into an `other` class:
    /// the star must agree and the states must be included.
    fn fits_into(&self, other: &DataClass) -> bool {
        self.star == other.star && self.states.iter().all(|s| other.states.binary_search(s).is_ok())
    }
}

/// Canonical form of a configuration: equal exactly for configurations
/// related by a data bijection (unordered) or an order-preserving data
/// bijection (ordered).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Canonical {
    /// Multiset of data classes, sorted, with multiplicities.
    Unordered {
        flags: Flags,
        letter: LabelId,
        classes: Vec<(DataClass, u32)>,
    },
    /// The `abs` sequence: one class per data value in increasing order.
    Ordered {
        flags: Flags,
        letter: LabelId,
        seq: Vec<DataClass>,
    },
}

fn classes_of(cfg: &Config) -> Vec<DataClass> {
    // One class per distinct datum, in increasing datum order.
    let data = cfg.data();
    data.iter()
        .map(|&d| {
            let mut states: Vec<StateId> = cfg
                .threads
                .iter()
                .filter(|&&(_, td)| td == d)
                .map(|&(s, _)| s)
                .collect();
            states.sort();
            states.dedup();
            DataClass {
                star: d == cfg.datum,
                states,
            }
        })
        .collect()
}

/// Computes the canonical form of a position-abstracted configuration.
pub fn canonicalize(cfg: &Config, ordered: bool) -> Canonical {
    let classes = classes_of(cfg);
    if ordered {
        Canonical::Ordered {
            flags: cfg.flags,
            letter: cfg.letter,
            seq: classes,
        }
    } else {
        let mut sorted = classes;
        sorted.sort();
        let mut out: Vec<(DataClass, u32)> = Vec::new();
        for c in sorted {
            match out.last_mut() {
                Some((prev, n)) if *prev == c => *n += 1,
                _ => out.push((c, 1)),
            }
        }
        Canonical::Unordered {
            flags: cfg.flags,
            letter: cfg.letter,
            classes: out,
        }
    }
}

/// Decides the subsumption order: `small ≾ big` (unordered, by bipartite
/// matching over data classes) or `small << big` (ordered, by greedy
/// subsequence embedding of `abs` sequences).
pub fn subsumes(small: &Canonical, big: &Canonical) -> bool {
    match (small, big) {
        (
            Canonical::Unordered {
                flags: f1,
                letter: l1,
                classes: c1,
            },
            Canonical::Unordered {
                flags: f2,
                letter: l2,
                classes: c2,
            },
        ) => f1 == f2 && l1 == l2 && unordered_embeds(c1, c2),
        (
            Canonical::Ordered {
                flags: f1,
                letter: l1,
                seq: s1,
            },
            Canonical::Ordered {
                flags: f2,
                letter: l2,
                seq: s2,
            },
        ) => f1 == f2 && l1 == l2 && ordered_embeds(s1, s2),
        _ => panic!("subsumption across modes"),
    }
}

/// Maximum bipartite matching with multiplicities: every small class must
/// be matched injectively (at the level of data values) to a big class it
/// fits into.
fn unordered_embeds(small: &[(DataClass, u32)], big: &[(DataClass, u32)]) -> bool {
    // Expand multiplicities on the small side; keep capacities on the big
    // side. Classic augmenting-path matching; sizes are tiny here.
    let total_small: u32 = small.iter().map(|&(_, n)| n).sum();
    let total_big: u32 = big.iter().map(|&(_, n)| n).sum();
    if total_small > total_big {
        return false;
    }
    let fits: Vec<Vec<usize>> = small
        .iter()
        .map(|(c, _)| {
            big.iter()
                .enumerate()
                .filter(|(_, (b, _))| c.fits_into(b))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let mut used = vec![0u32; big.len()];
    // match_of[i] = assigned big index for each expanded small unit.
    let mut units: Vec<(usize, Option<usize>)> = Vec::new();
    for (i, &(_, n)) in small.iter().enumerate() {
        for _ in 0..n {
            units.push((i, None));
        }
    }
    // Hopcroft-Karp is overkill: simple augmenting search per unit.
    fn augment(
        u: usize,
        units: &mut Vec<(usize, Option<usize>)>,
        fits: &[Vec<usize>],
        used: &mut [u32],
        caps: &[u32],
        visited: &mut [bool],
    ) -> bool {
        let class = units[u].0;
        for &j in &fits[class] {
            if visited[j] {
                continue;
            }
            visited[j] = true;
            if used[j] < caps[j] {
                used[j] += 1;
                units[u].1 = Some(j);
                return true;
            }
            // Try to re-route one of the units currently on j.
            for v in 0..units.len() {
                if v != u && units[v].1 == Some(j) {
                    units[v].1 = None;
                    used[j] -= 1;
                    if augment(v, units, fits, used, caps, visited) {
                        used[j] += 1;
                        units[u].1 = Some(j);
                        return true;
                    }
                    units[v].1 = Some(j);
                    used[j] += 1;
                }
            }
        }
        false
    }
    let caps: Vec<u32> = big.iter().map(|&(_, n)| n).collect();
    for u in 0..units.len() {
        let mut visited = vec![false; big.len()];
        if !augment(u, &mut units, &fits, &mut used, &caps, &mut visited) {
            return false;
        }
    }
    true
}

/// Greedy left-to-right subsequence embedding under class inclusion with
/// stars matched to stars. Correct by the usual exchange argument: taking
/// the earliest feasible target never hurts later positions.
fn ordered_embeds(small: &[DataClass], big: &[DataClass]) -> bool {
    let mut j = 0;
    for c in small {
        loop {
            if j >= big.len() {
                return false;
            }
            if c.fits_into(&big[j]) {
                j += 1;
                break;
            }
            // A star class may only be matched to the star class; if we
            // are about to skip past the star target, the star on the
            // small side can never match.
            if big[j].star && c.star {
                return false;
            }
            j += 1;
        }
    }
    true
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Datum;

    fn cfg(next: bool, letter: LabelId, datum: u64, threads: &[(StateId, u64)]) -> Config {
        Config::new(
            Flags::word(next),
            letter,
            Datum::int(datum),
            threads.iter().map(|&(s, d)| (s, Datum::int(d))).collect(),
        )
    }

    #[test]
    fn canonical_identifies_renamed_configs() {
        let a = cfg(true, 0, 5, &[(1, 5)]);
        let b = cfg(true, 0, 9, &[(1, 9)]);
        assert_eq!(canonicalize(&a, false), canonicalize(&b, false));
        assert_eq!(canonicalize(&a, true), canonicalize(&b, true));
    }

    #[test]
    fn canonical_ordered_distinguishes_star_order() {
        // (▷,a,5,{(q,7)}) and (▷,a,7,{(q,5)}): unordered-identical,
        // ordered-different (the star class sits on different sides).
        let a = cfg(true, 0, 5, &[(1, 7)]);
        let b = cfg(true, 0, 7, &[(1, 5)]);
        assert_eq!(canonicalize(&a, false), canonicalize(&b, false));
        assert_ne!(canonicalize(&a, true), canonicalize(&b, true));
    }

    #[test]
    fn canonical_empty_threads_single_star_class() {
        let a = cfg(true, 0, 5, &[]);
        match canonicalize(&a, false) {
            Canonical::Unordered { classes, .. } => {
                assert_eq!(classes.len(), 1);
                assert!(classes[0].0.star);
                assert!(classes[0].0.states.is_empty());
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn subsumes_reflexive_and_basic() {
        let c = canonicalize(&cfg(true, 0, 5, &[(1, 5), (2, 7)]), false);
        assert!(subsumes(&c, &c));
        // (▷,a,d,{(q,d)}) ≾ (▷,a,e,{(q,e),(p,f)}) via d↦e.
        let small = canonicalize(&cfg(true, 0, 3, &[(1, 3)]), false);
        let big = canonicalize(&cfg(true, 0, 8, &[(1, 8), (2, 2)]), false);
        assert!(subsumes(&small, &big));
        assert!(!subsumes(&big, &small));
    }

    #[test]
    fn subsumes_requires_type_and_letter() {
        let a = canonicalize(&cfg(true, 0, 5, &[]), false);
        let b = canonicalize(&cfg(false, 0, 5, &[]), false);
        let c = canonicalize(&cfg(true, 1, 5, &[]), false);
        assert!(!subsumes(&a, &b));
        assert!(!subsumes(&a, &c));
    }

    #[test]
    fn unordered_class_split_against_brute_force() {
        // ({q},{p}) class pattern vs ({q,p}) single class: the former
        // cannot embed (injectivity over data values).
        let split = cfg(true, 0, 1, &[(1, 2), (2, 3)]);
        let joint = cfg(true, 0, 1, &[(1, 2), (2, 2)]);
        let cs = canonicalize(&split, false);
        let cj = canonicalize(&joint, false);
        let (s_classes, j_classes) = match (&cs, &cj) {
            (
                Canonical::Unordered { classes: a, .. },
                Canonical::Unordered { classes: b, .. },
            ) => (a.clone(), b.clone()),
            _ => unreachable!(),
        };
        assert_eq!(
            subsumes(&cs, &cj),
            reference::unordered_embeds_brute(&s_classes, &j_classes)
        );
        assert_eq!(
            subsumes(&cj, &cs),
            reference::unordered_embeds_brute(&j_classes, &s_classes)
        );
        // And the joint class embeds into itself extended.
        let bigger = cfg(true, 0, 1, &[(1, 2), (2, 2), (3, 4)]);
        assert!(subsumes(&cj, &canonicalize(&bigger, false)));
    }

    #[test]
    fn ordered_embedding_matches_dp_on_samples() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let mk = |rng: &mut rand_chacha::ChaCha8Rng, n: usize| -> Vec<DataClass> {
                let star_at = rng.gen_range(0..n);
                (0..n)
                    .map(|i| {
                        let mut states: Vec<StateId> =
                            (0..3).filter(|_| rng.gen_bool(0.5)).collect();
                        states.sort();
                        states.dedup();
                        DataClass {
                            star: i == star_at,
                            states,
                        }
                    })
                    .collect()
            };
            let n1 = rng.gen_range(1..5);
            let n2 = rng.gen_range(1..6);
            let a = mk(&mut rng, n1);
            let b = mk(&mut rng, n2);
            assert_eq!(
                ordered_embeds(&a, &b),
                reference::ordered_embeds_dp(&a, &b),
                "a={a:?} b={b:?}"
            );
        }
    }
}
