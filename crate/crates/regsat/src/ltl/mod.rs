//! Freeze-LTL over data words: parser, negation normal form, a direct
//! semantic evaluator, the compilation to word automata, and the
//! satisfiability pipeline (unordered and ordered).

mod compile;
mod eval;
mod parse;

pub use compile::{ltl_to_ara, pick_alphabet};
pub use eval::{eval_ltl, models};
pub use parse::parse_ltl;

use crate::ara::{self, SearchOptions, WordVerdict};
use crate::model::{DataWord, Label};
use thiserror::Error;

/// Formulas of the logic. [`parse_ltl`] returns raw formulas with `Not`
/// anywhere; after [`nnf_ltl`], negation appears only on atoms and on the
/// register test.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Ltl {
    True,
    False,
    Atom(Label),
    /// `eq`: the register equals the current datum.
    Up,
    /// `lt`: the register is below the current datum (ordered mode).
    UpLt,
    /// `gt`: the register is above the current datum (ordered mode).
    UpGt,
    Not(Box<Ltl>),
    /// `freeze`: store the current datum and continue.
    Freeze(Box<Ltl>),
    X(Box<Ltl>),
    WX(Box<Ltl>),
    U(Box<Ltl>, Box<Ltl>),
    R(Box<Ltl>, Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    /// `Aprev`: for every datum of a position `<= i`, the formula holds
    /// here with that register value.
    Aprev(Box<Ltl>),
    /// `AprevIf(phi, psi)`: for every position `j <= i` whose datum
    /// satisfies `psi` at `j`, `phi` holds here with that register value.
    AprevIf(Box<Ltl>, Box<Ltl>),
    /// `Efut`: for some datum of a position `>= i`, the formula holds
    /// here with that register value.
    Efut(Box<Ltl>),
}

impl Ltl {
    pub fn not(f: Ltl) -> Ltl {
        Ltl::Not(Box::new(f))
    }
    pub fn and(a: Ltl, b: Ltl) -> Ltl {
        Ltl::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Or(Box::new(a), Box::new(b))
    }

    /// All labels mentioned by the formula.
    pub fn atoms(&self) -> Vec<Label> {
        let mut out = Vec::new();
        fn walk(f: &Ltl, out: &mut Vec<Label>) {
            match f {
                Ltl::Atom(l) => out.push(l.clone()),
                Ltl::Not(a) | Ltl::Freeze(a) | Ltl::X(a) | Ltl::WX(a) | Ltl::Aprev(a)
                | Ltl::Efut(a) => walk(a, out),
                Ltl::U(a, b) | Ltl::R(a, b) | Ltl::And(a, b) | Ltl::Or(a, b)
                | Ltl::AprevIf(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                _ => {}
            }
        }
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }

    pub fn uses_order(&self) -> bool {
        match self {
            Ltl::UpLt | Ltl::UpGt => true,
            Ltl::Not(a) | Ltl::Freeze(a) | Ltl::X(a) | Ltl::WX(a) | Ltl::Aprev(a)
            | Ltl::Efut(a) => a.uses_order(),
            Ltl::U(a, b) | Ltl::R(a, b) | Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::AprevIf(a, b) => {
                a.uses_order() || b.uses_order()
            }
            _ => false,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LtlError {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("operator `{0}` is rejected: its satisfiability problem is undecidable")]
    UndecidableOperator(String),
    #[error("negation reaches the quantifier `{0}`; its dual is rejected as undecidable")]
    NegatedQuantifier(String),
    #[error("ordered test used without --ordered")]
    OrderedTestInUnordered,
    #[error("automaton construction: {0}")]
    Automaton(#[from] crate::instr::AutomatonError),
}

/// Pushes negations to the atoms. Negation of `Aprev`, `AprevIf` or `Efut`
/// is rejected: the dual quantifiers make satisfiability undecidable.
pub fn nnf_ltl(f: &Ltl) -> Result<Ltl, LtlError> {
    fn pos(f: &Ltl) -> Result<Ltl, LtlError> {
        Ok(match f {
            Ltl::Not(g) => neg(g)?,
            Ltl::Freeze(a) => Ltl::Freeze(Box::new(pos(a)?)),
            Ltl::X(a) => Ltl::X(Box::new(pos(a)?)),
            Ltl::WX(a) => Ltl::WX(Box::new(pos(a)?)),
            Ltl::U(a, b) => Ltl::U(Box::new(pos(a)?), Box::new(pos(b)?)),
            Ltl::R(a, b) => Ltl::R(Box::new(pos(a)?), Box::new(pos(b)?)),
            Ltl::And(a, b) => Ltl::and(pos(a)?, pos(b)?),
            Ltl::Or(a, b) => Ltl::or(pos(a)?, pos(b)?),
            Ltl::Aprev(a) => Ltl::Aprev(Box::new(pos(a)?)),
            Ltl::AprevIf(a, b) => Ltl::AprevIf(Box::new(pos(a)?), Box::new(pos(b)?)),
            Ltl::Efut(a) => Ltl::Efut(Box::new(pos(a)?)),
            leaf => leaf.clone(),
        })
    }
    fn neg(f: &Ltl) -> Result<Ltl, LtlError> {
        Ok(match f {
            Ltl::True => Ltl::False,
            Ltl::False => Ltl::True,
            Ltl::Atom(_) | Ltl::Up => Ltl::not(f.clone()),
            Ltl::UpLt => Ltl::or(Ltl::UpGt, Ltl::Up),
            Ltl::UpGt => Ltl::or(Ltl::UpLt, Ltl::Up),
            Ltl::Not(g) => pos(g)?,
            Ltl::Freeze(a) => Ltl::Freeze(Box::new(neg(a)?)),
            Ltl::X(a) => Ltl::WX(Box::new(neg(a)?)),
            Ltl::WX(a) => Ltl::X(Box::new(neg(a)?)),
            Ltl::U(a, b) => Ltl::R(Box::new(neg(a)?), Box::new(neg(b)?)),
            Ltl::R(a, b) => Ltl::U(Box::new(neg(a)?), Box::new(neg(b)?)),
            Ltl::And(a, b) => Ltl::or(neg(a)?, neg(b)?),
            Ltl::Or(a, b) => Ltl::and(neg(a)?, neg(b)?),
            Ltl::Aprev(_) => return Err(LtlError::NegatedQuantifier("Aprev".to_string())),
            Ltl::AprevIf(..) => return Err(LtlError::NegatedQuantifier("AprevIf".to_string())),
            Ltl::Efut(_) => return Err(LtlError::NegatedQuantifier("Efut".to_string())),
        })
    }
    pos(f)
}

/// Checks the NNF invariant: negation only on atoms and the register test.
pub fn is_nnf(f: &Ltl) -> bool {
    match f {
        Ltl::Not(g) => matches!(**g, Ltl::Atom(_) | Ltl::Up),
        Ltl::Freeze(a) | Ltl::X(a) | Ltl::WX(a) | Ltl::Aprev(a) | Ltl::Efut(a) => is_nnf(a),
        Ltl::U(a, b) | Ltl::R(a, b) | Ltl::And(a, b) | Ltl::Or(a, b) | Ltl::AprevIf(a, b) => {
            is_nnf(a) && is_nnf(b)
        }
        _ => true,
    }
}

/// Satisfiability outcome.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum LtlSat {
    Sat(DataWord),
    Unsat,
    ResourceExhausted,
}

/// The pipeline: NNF, compile to a word automaton and decide emptiness.
/// A `Sat` witness satisfies the formula under [`eval_ltl`].
pub fn sat_ltl(f: &Ltl, ordered: bool, opts: SearchOptions) -> Result<LtlSat, LtlError> {
    let nnf = nnf_ltl(f)?;
    if nnf.uses_order() && !ordered {
        return Err(LtlError::OrderedTestInUnordered);
    }
    let alphabet = pick_alphabet(&nnf);
    let aut = ltl_to_ara(&nnf, ordered, &alphabet)?;
    Ok(match ara::emptiness(&aut, opts) {
        WordVerdict::Empty => LtlSat::Unsat,
        WordVerdict::NonEmpty(w) => LtlSat::Sat(w),
        WordVerdict::ResourceExhausted => LtlSat::ResourceExhausted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::parse_word;

    fn ltl(s: &str) -> Ltl {
        parse_ltl(s).unwrap()
    }

    #[test]
    fn nnf_double_negation() {
        assert_eq!(nnf_ltl(&ltl("!!a")).unwrap(), ltl("a"));
    }

    #[test]
    fn nnf_until_duality() {
        let f = nnf_ltl(&ltl("!U(a, b)")).unwrap();
        assert_eq!(f, ltl("R(!a, !b)"));
        assert!(is_nnf(&f));
    }

    #[test]
    fn nnf_rejects_negated_quantifiers() {
        assert_eq!(
            nnf_ltl(&ltl("!Aprev a")).unwrap_err(),
            LtlError::NegatedQuantifier("Aprev".to_string())
        );
        assert_eq!(
            nnf_ltl(&ltl("!Efut a")).unwrap_err(),
            LtlError::NegatedQuantifier("Efut".to_string())
        );
        assert_eq!(
            nnf_ltl(&ltl("!AprevIf(a, b)")).unwrap_err(),
            LtlError::NegatedQuantifier("AprevIf".to_string())
        );
    }

    #[test]
    fn nnf_is_involution_stable() {
        for s in [
            "G(!a | freeze F(b & eq))",
            "!U(a, freeze (eq & X b))",
            "!(a & wX !b)",
            "!G !a",
        ] {
            let once = nnf_ltl(&ltl(s)).unwrap();
            let twice = nnf_ltl(&once).unwrap();
            assert_eq!(once, twice, "{s}");
            assert!(is_nnf(&once));
        }
    }

    #[test]
    fn nnf_preserves_evaluation() {
        let words = crate::oracle::enum_words(&crate::oracle::EnumBounds::new(3, 2, &["a", "b"]));
        for s in [
            "!U(a, b)",
            "!(freeze X eq)",
            "!G(!a | freeze F(b & eq))",
            "!wX (a | !b)",
            "!X (a & b)",
        ] {
            let raw = ltl(s);
            let nnf = nnf_ltl(&raw).unwrap();
            for w in &words {
                assert_eq!(models(w, &raw), models(w, &nnf), "{s} on {w}");
            }
        }
    }

    #[test]
    fn sat_contradiction_unsat() {
        let f = ltl("freeze (eq & !eq)");
        assert_eq!(
            sat_ltl(&f, false, SearchOptions::default()).unwrap(),
            LtlSat::Unsat
        );
    }

    #[test]
    fn sat_ordered_gt_witness() {
        let f = ltl("freeze X gt");
        match sat_ltl(&f, true, SearchOptions::default()).unwrap() {
            LtlSat::Sat(w) => {
                assert!(models(&w, &f), "witness {w} must satisfy the formula");
                assert!(w.datum(1) > w.datum(2), "witness {w}");
            }
            v => panic!("expected Sat, got {v:?}"),
        }
    }

    #[test]
    fn sat_ordered_lt_or_gt_unsat() {
        // The register equals the current datum right after freezing.
        let f = ltl("freeze (lt | gt)");
        assert_eq!(
            sat_ltl(&f, true, SearchOptions::default()).unwrap(),
            LtlSat::Unsat
        );
    }

    #[test]
    fn sat_ordered_test_without_flag_errors() {
        let f = ltl("freeze X gt");
        assert_eq!(
            sat_ltl(&f, false, SearchOptions::default()).unwrap_err(),
            LtlError::OrderedTestInUnordered
        );
    }

    #[test]
    fn sat_paper_example_formula() {
        // Every a has a future b with the same datum.
        let f = ltl("G(!a | freeze F(b & eq))");
        match sat_ltl(&f, false, SearchOptions::default()).unwrap() {
            LtlSat::Sat(w) => assert!(models(&w, &f), "witness {w}"),
            v => panic!("expected Sat, got {v:?}"),
        }
    }

    #[test]
    fn sat_efut_of_false_unsat() {
        let f = ltl("Efut (freeze false)");
        assert_eq!(
            sat_ltl(&f, false, SearchOptions::default()).unwrap(),
            LtlSat::Unsat
        );
        // Cross-checked by bounded enumeration.
        assert!(matches!(
            crate::oracle::bounded_sat_ltl(&f, &crate::oracle::EnumBounds::new(3, 2, &["a"])),
            crate::oracle::BoundedSat::NoneWithin
        ));
    }

    #[test]
    fn eval_spec_cases() {
        let w = parse_word("a@1 b@1").unwrap();
        assert!(models(&w, &ltl("freeze X eq")));
        let w1 = parse_word("a@1").unwrap();
        assert!(models(&w1, &ltl("wX false")));
        assert!(!models(&w1, &ltl("X true")));
        let wo = parse_word("a@1 a@0").unwrap();
        assert!(models(&wo, &ltl("freeze X gt")));
        assert!(!models(&wo, &ltl("freeze X lt")));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_ltl("U(a"), Err(LtlError::Parse { .. })));
        assert_eq!(
            parse_ltl("Eprev a").unwrap_err(),
            LtlError::UndecidableOperator("Eprev".to_string())
        );
        assert_eq!(
            parse_ltl("Afut a").unwrap_err(),
            LtlError::UndecidableOperator("Afut".to_string())
        );
    }
}
