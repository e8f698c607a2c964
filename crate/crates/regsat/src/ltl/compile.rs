//! Compilation of NNF formulas into word automata with exact language
//! capture.
//!
//! A collector harness keeps one persistent thread per position datum:
//! `col` stores the current datum, spawns a `sav` carrier and advances.
//! `Aprev` then compiles to a spread over `sav` plus a store of the
//! current datum; `AprevIf(phi, psi)` uses a filtered collector that at
//! every position nondeterministically commits to `psi` or to `nnf(!psi)`
//! and only saves the datum in the first case. The harness is launched
//! once, alongside the formula state, at position 1.

use super::{is_nnf, nnf_ltl, Ltl, LtlError};
use crate::instr::{Automaton, Kind, MoveDir, RawAutomaton, TypeTest, F};
use crate::model::Label;

/// The alphabet a satisfiability query runs over: the formula's atoms
/// plus one spare letter, so that label negations stay satisfiable.
pub fn pick_alphabet(f: &Ltl) -> Vec<Label> {
    let mut atoms = f.atoms();
    let spare = (0..)
        .map(|i| {
            if i == 0 {
                "x".to_string()
            } else {
                format!("x{i}")
            }
        })
        .find(|c| !atoms.iter().any(|a| a.as_str() == c))
        .unwrap();
    atoms.push(Label::new(&spare));
    atoms.sort();
    atoms
}

struct Compiler {
    rules: Vec<(String, F)>,
    counter: usize,
    /// Collector families already emitted: (condition, sav state, loop
    /// entry state).
    collectors: Vec<(Option<Ltl>, String, String)>,
}

impl Compiler {
    fn fresh(&mut self, hint: &str) -> String {
        let n = format!("{}_{}", hint, self.counter);
        self.counter += 1;
        n
    }

    fn rule(&mut self, hint: &str, f: F) -> String {
        let name = self.fresh(hint);
        self.rules.push((name.clone(), f));
        name
    }

    /// The `sav` state of the collector for `cond` (None = unconditional),
    /// emitting the collector loop on first use.
    fn collector(&mut self, cond: Option<&Ltl>) -> Result<String, LtlError> {
        if let Some((_, sav, _)) = self.collectors.iter().find(|(c, _, _)| c.as_ref() == cond) {
            return Ok(sav.clone());
        }
        let sav = self.fresh("sav");
        let col = self.fresh("col");
        // sav := end? | next sav
        self.rules.push((
            sav.clone(),
            F::or(
                F::Type(TypeTest::Next(false)),
                F::mv(MoveDir::Next, F::r(&sav)),
            ),
        ));
        let adv = F::or(
            F::Type(TypeTest::Next(false)),
            F::mv(MoveDir::Next, F::r(&col)),
        );
        let body = match cond {
            None => {
                // col := store(sav & adv)
                F::store(F::and(F::r(&sav), adv))
            }
            Some(psi) => {
                // Commit to psi (save) or to nnf(!psi) (skip); exactly one
                // branch is viable at each position.
                let not_psi = nnf_ltl(&Ltl::not(psi.clone()))?;
                let yes = self.translate(psi)?;
                let no = self.translate(&not_psi)?;
                let pick = F::or(
                    F::store(F::and(F::r(&sav), F::r(&yes))),
                    F::store(F::r(&no)),
                );
                F::and(pick, adv)
            }
        };
        self.rules.push((col.clone(), body));
        self.collectors.push((cond.cloned(), sav.clone(), col));
        Ok(sav)
    }

    /// Emits the state checking `f` at the current position and returns
    /// its name.
    fn translate(&mut self, f: &Ltl) -> Result<String, LtlError> {
        Ok(match f {
            Ltl::True => self.rule("tt", F::True),
            Ltl::False => self.rule("ff", F::False),
            Ltl::Atom(a) => self.rule("at", F::Letter(a.clone())),
            Ltl::Not(g) => match &**g {
                Ltl::Atom(a) => self.rule("nat", F::NotLetter(a.clone())),
                Ltl::Up => self.rule("nup", F::NotEq),
                _ => unreachable!("formula not in NNF"),
            },
            Ltl::Up => self.rule("up", F::Eq),
            // The register tests compare the current datum against the
            // register, so the direction flips: `gt` (register above the
            // current datum) is the automaton's `lt` test and vice versa.
            Ltl::UpGt => self.rule("ugt", F::TestLt),
            Ltl::UpLt => self.rule("ult", F::TestGt),
            Ltl::Freeze(g) => {
                let inner = self.translate(g)?;
                self.rule("frz", F::store(F::r(&inner)))
            }
            Ltl::X(g) => {
                let inner = self.translate(g)?;
                self.rule("x", F::mv(MoveDir::Next, F::r(&inner)))
            }
            Ltl::WX(g) => {
                let inner = self.translate(g)?;
                self.rule(
                    "wx",
                    F::or(
                        F::Type(TypeTest::Next(false)),
                        F::mv(MoveDir::Next, F::r(&inner)),
                    ),
                )
            }
            Ltl::U(p, q) => {
                let name = self.fresh("u");
                let fp = self.translate(p)?;
                let fq = self.translate(q)?;
                self.rules.push((
                    name.clone(),
                    F::or(
                        F::r(&fp),
                        F::and(F::r(&fq), F::mv(MoveDir::Next, F::r(&name))),
                    ),
                ));
                name
            }
            Ltl::R(p, q) => {
                let name = self.fresh("r");
                let fp = self.translate(p)?;
                let fq = self.translate(q)?;
                self.rules.push((
                    name.clone(),
                    F::and(
                        F::r(&fp),
                        F::any(vec![
                            F::r(&fq),
                            F::Type(TypeTest::Next(false)),
                            F::mv(MoveDir::Next, F::r(&name)),
                        ]),
                    ),
                ));
                name
            }
            Ltl::And(p, q) => {
                let fp = self.translate(p)?;
                let fq = self.translate(q)?;
                self.rule("and", F::and(F::r(&fp), F::r(&fq)))
            }
            Ltl::Or(p, q) => {
                let fp = self.translate(p)?;
                let fq = self.translate(q)?;
                self.rule("or", F::or(F::r(&fp), F::r(&fq)))
            }
            Ltl::Aprev(g) => {
                let sav = self.collector(None)?;
                let inner = self.translate(g)?;
                // Spread over all collected data, plus the current datum.
                self.rule(
                    "aprev",
                    F::and(
                        F::Spread2(sav, Box::new(F::r(&inner))),
                        F::store(F::r(&inner)),
                    ),
                )
            }
            Ltl::AprevIf(p, q) => {
                let sav = self.collector(Some(q))?;
                let inner = self.translate(p)?;
                // The conditional collector already covered the current
                // position before any spread fires.
                self.rule("aprevif", F::Spread2(sav, Box::new(F::r(&inner))))
            }
            Ltl::Efut(g) => {
                let inner = self.translate(g)?;
                // The guessed value must occur at some position >= i.
                let occ = self.fresh("occ");
                self.rules.push((
                    occ.clone(),
                    F::or(F::Eq, F::mv(MoveDir::Next, F::r(&occ))),
                ));
                let body = self.rule("efb", F::and(F::r(&inner), F::r(&occ)));
                self.rule("efut", F::guess(F::r(&body)))
            }
        })
    }
}

/// Compiles an NNF formula into a word automaton with
/// `L(result) = L(formula)` over the given alphabet.
pub fn ltl_to_ara(f: &Ltl, ordered: bool, alphabet: &[Label]) -> Result<Automaton, LtlError> {
    assert!(is_nnf(f), "ltl_to_ara expects an NNF formula");
    if f.uses_order() && !ordered {
        return Err(LtlError::OrderedTestInUnordered);
    }
    let mut c = Compiler {
        rules: Vec::new(),
        counter: 0,
        collectors: Vec::new(),
    };
    let top = c.translate(f)?;
    // Launch the formula once; collectors run from position 1 alongside.
    let mut launch = vec![F::r(&top)];
    for (_, _, col) in &c.collectors {
        launch.push(F::r(col));
    }
    let init = c.rule("init", F::all(launch));
    RawAutomaton {
        kind: Kind::Word,
        ordered,
        alphabet: alphabet.to_vec(),
        initial: init,
        rules: c.rules,
    }
    .normalize()
    .map_err(LtlError::from)
}
