//! The direct satisfaction relation on data words, total on raw formulas
//! (negation is evaluated semantically). This is the reference the
//! automaton compilation is checked against.

use super::Ltl;
use crate::model::{DataWord, Datum};

/// `(w, i) |=^d f` — `i` is 1-based and must be a position of `w`.
pub fn eval_ltl(w: &DataWord, i: usize, d: Datum, f: &Ltl) -> bool {
    assert!(i >= 1 && i <= w.len(), "position out of range");
    match f {
        Ltl::True => true,
        Ltl::False => false,
        Ltl::Atom(a) => w.label(i) == a,
        Ltl::Up => d == w.datum(i),
        Ltl::UpLt => d < w.datum(i),
        Ltl::UpGt => d > w.datum(i),
        Ltl::Not(g) => !eval_ltl(w, i, d, g),
        Ltl::Freeze(g) => eval_ltl(w, i, w.datum(i), g),
        Ltl::X(g) => i + 1 <= w.len() && eval_ltl(w, i + 1, d, g),
        Ltl::WX(g) => i + 1 > w.len() || eval_ltl(w, i + 1, d, g),
        Ltl::U(p, q) => (i..=w.len())
            .any(|j| eval_ltl(w, j, d, p) && (i..j).all(|k| eval_ltl(w, k, d, q))),
        Ltl::R(p, q) => (i..=w.len())
            .all(|j| !(i..j).all(|k| !eval_ltl(w, k, d, q)) || eval_ltl(w, j, d, p)),
        Ltl::And(p, q) => eval_ltl(w, i, d, p) && eval_ltl(w, i, d, q),
        Ltl::Or(p, q) => eval_ltl(w, i, d, p) || eval_ltl(w, i, d, q),
        Ltl::Aprev(g) => (1..=i).all(|j| eval_ltl(w, i, w.datum(j), g)),
        Ltl::AprevIf(p, q) => {
            (1..=i).all(|j| !eval_ltl(w, j, w.datum(j), q) || eval_ltl(w, i, w.datum(j), p))
        }
        Ltl::Efut(g) => (i..=w.len()).any(|j| eval_ltl(w, i, w.datum(j), g)),
    }
}

/// `w |= f`: evaluation at position 1 with the first datum in the
/// register.
pub fn models(w: &DataWord, f: &Ltl) -> bool {
    eval_ltl(w, 1, w.datum(1), f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse_ltl;
    use crate::model::parse_word;

    fn holds(w: &str, f: &str) -> bool {
        models(&parse_word(w).unwrap(), &parse_ltl(f).unwrap())
    }

    #[test]
    fn until_and_release() {
        assert!(holds("a@1 a@2 b@3", "U(b, a)"));
        assert!(!holds("a@1 c@2 b@3", "U(b, a)"));
        assert!(holds("a@1 a@2", "G a"));
        assert!(!holds("a@1 b@2", "G a"));
        assert!(holds("b@1", "R(b, a)"));
        // The releasing position still requires the released formula;
        // positions strictly after it are free.
        assert!(holds("b@1 a@1 c@2", "R(b | a, a)"));
        assert!(!holds("b@1 a@1 c@2", "R(b | c, a)"));
    }

    #[test]
    fn quantifiers_over_data() {
        // Aprev eq at position 2: every prefix datum equals d(2).
        assert!(holds("a@1 a@1", "X (Aprev eq)"));
        assert!(!holds("a@1 a@2", "X (Aprev eq)"));
        // Note the self-case j = i: Aprev !eq can never hold.
        assert!(!holds("a@1 a@2", "X (Aprev !eq)"));
        // Efut: a register value among future data satisfying both tests
        // exists iff d(1) = d(2) here.
        assert!(holds("a@1 a@1", "Efut (eq & X eq)"));
        assert!(!holds("a@1 a@2", "Efut (eq & X eq)"));
        // AprevIf restricted to a-positions (the current one is a b).
        assert!(holds("b@1 a@1 b@2", "X X AprevIf(!eq, a)"));
        assert!(!holds("b@1 a@2 b@2", "X X AprevIf(!eq, a)"));
    }

    #[test]
    fn freeze_scoping() {
        assert!(holds("a@1 b@1", "freeze X eq"));
        assert!(!holds("a@1 b@2", "freeze X eq"));
        assert!(holds("a@1 b@2", "freeze X freeze eq"));
    }
}
