//! Regular expressions over labels and their determinization, used by the
//! DTD encoding and the regular-language embedding.
//!
//! Operators: juxtaposition, `|`, `*`, `+`, `?`, `eps`, parentheses.

use crate::model::{Label, ParseError};
use std::collections::HashMap;
use std::rc::Rc;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Regex {
    Empty,
    Eps,
    Sym(Label),
    Concat(Rc<Regex>, Rc<Regex>),
    Alt(Rc<Regex>, Rc<Regex>),
    Star(Rc<Regex>),
}

impl Regex {
    pub fn nullable(&self) -> bool {
        match self {
            Regex::Empty | Regex::Sym(_) => false,
            Regex::Eps | Regex::Star(_) => true,
            Regex::Concat(a, b) => a.nullable() && b.nullable(),
            Regex::Alt(a, b) => a.nullable() || b.nullable(),
        }
    }

    /// Brzozowski derivative with light smart-constructor normalization,
    /// enough to keep the derivative space finite in practice.
    pub fn deriv(&self, x: &Label) -> Regex {
        match self {
            Regex::Empty | Regex::Eps => Regex::Empty,
            Regex::Sym(l) => {
                if l == x {
                    Regex::Eps
                } else {
                    Regex::Empty
                }
            }
            Regex::Concat(a, b) => {
                let left = concat(a.deriv(x), (**b).clone());
                if a.nullable() {
                    alt(left, b.deriv(x))
                } else {
                    left
                }
            }
            Regex::Alt(a, b) => alt(a.deriv(x), b.deriv(x)),
            Regex::Star(a) => concat(a.deriv(x), Regex::Star(a.clone())),
        }
    }
}

fn concat(a: Regex, b: Regex) -> Regex {
    match (&a, &b) {
        (Regex::Empty, _) | (_, Regex::Empty) => Regex::Empty,
        (Regex::Eps, _) => b,
        (_, Regex::Eps) => a,
        _ => Regex::Concat(Rc::new(a), Rc::new(b)),
    }
}

fn alt(a: Regex, b: Regex) -> Regex {
    match (&a, &b) {
        (Regex::Empty, _) => b,
        (_, Regex::Empty) => a,
        _ if a == b => a,
        _ => Regex::Alt(Rc::new(a), Rc::new(b)),
    }
}

/// A total deterministic finite automaton over labels.
#[derive(Clone, Debug)]
pub struct LabelDfa {
    pub alphabet: Vec<Label>,
    pub initial: usize,
    pub accepting: Vec<bool>,
    /// `trans[state][label_index]`
    pub trans: Vec<Vec<usize>>,
}

impl LabelDfa {
    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    pub fn accepts<'a>(&self, word: impl IntoIterator<Item = &'a Label>) -> bool {
        let mut s = self.initial;
        for l in word {
            match self.alphabet.iter().position(|x| x == l) {
                Some(i) => s = self.trans[s][i],
                None => return false,
            }
        }
        self.accepting[s]
    }

    /// Subset-free determinization by Brzozowski derivatives.
    pub fn from_regex(re: &Regex, alphabet: &[Label]) -> LabelDfa {
        let mut states: Vec<Regex> = vec![re.clone()];
        let mut index: HashMap<Regex, usize> = HashMap::new();
        index.insert(re.clone(), 0);
        let mut trans: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let cur = states[i].clone();
            let mut row = Vec::with_capacity(alphabet.len());
            for l in alphabet {
                let d = cur.deriv(l);
                let id = *index.entry(d.clone()).or_insert_with(|| {
                    states.push(d.clone());
                    states.len() - 1
                });
                row.push(id);
            }
            trans.push(row);
            i += 1;
        }
        LabelDfa {
            alphabet: alphabet.to_vec(),
            initial: 0,
            accepting: states.iter().map(|r| r.nullable()).collect(),
            trans,
        }
    }
}

/// Parses the DTD rule regex syntax over a declared label set.
pub(crate) fn parse_regex(s: &mut crate::model::text::Scanner) -> Result<Regex, ParseError> {
    parse_alt(s)
}

fn parse_alt(s: &mut crate::model::text::Scanner) -> Result<Regex, ParseError> {
    let mut lhs = parse_cat(s)?;
    loop {
        s.skip_ws();
        if s.eat(b'|') {
            let rhs = parse_cat(s)?;
            lhs = alt(lhs, rhs);
        } else {
            return Ok(lhs);
        }
    }
}

fn parse_cat(s: &mut crate::model::text::Scanner) -> Result<Regex, ParseError> {
    let mut lhs: Option<Regex> = None;
    loop {
        s.skip_ws();
        match s.peek() {
            Some(c) if c == b'(' || c.is_ascii_alphanumeric() || c == b'_' => {
                let rhs = parse_postfix(s)?;
                lhs = Some(match lhs {
                    None => rhs,
                    Some(l) => concat(l, rhs),
                });
            }
            _ => {
                return Ok(lhs.unwrap_or(Regex::Eps));
            }
        }
    }
}

fn parse_postfix(s: &mut crate::model::text::Scanner) -> Result<Regex, ParseError> {
    let mut base = parse_base(s)?;
    loop {
        s.skip_ws();
        if s.eat(b'*') {
            base = Regex::Star(Rc::new(base));
        } else if s.eat(b'+') {
            base = concat(base.clone(), Regex::Star(Rc::new(base)));
        } else if s.eat(b'?') {
            base = alt(base, Regex::Eps);
        } else {
            return Ok(base);
        }
    }
}

fn parse_base(s: &mut crate::model::text::Scanner) -> Result<Regex, ParseError> {
    s.skip_ws();
    if s.eat(b'(') {
        let r = parse_alt(s)?;
        s.skip_ws();
        s.expect(b')')?;
        return Ok(r);
    }
    let id = s.ident()?;
    if id == "eps" {
        Ok(Regex::Eps)
    } else {
        Ok(Regex::Sym(Label::new(&id)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::text::Scanner;

    fn re(text: &str) -> Regex {
        parse_regex(&mut Scanner::new(text)).unwrap()
    }

    fn labels(ls: &[&str]) -> Vec<Label> {
        ls.iter().map(|l| Label::new(l)).collect()
    }

    fn word(ls: &[&str]) -> Vec<Label> {
        labels(ls)
    }

    #[test]
    fn dfa_matches_simple_patterns() {
        let ab = labels(&["a", "b"]);
        let d = LabelDfa::from_regex(&re("a*"), &ab);
        assert!(d.accepts(&word(&[])));
        assert!(d.accepts(&word(&["a", "a"])));
        assert!(!d.accepts(&word(&["a", "b"])));

        let d = LabelDfa::from_regex(&re("a b"), &ab);
        assert!(d.accepts(&word(&["a", "b"])));
        assert!(!d.accepts(&word(&["a"])));

        let d = LabelDfa::from_regex(&re("(a | b)* a"), &ab);
        assert!(d.accepts(&word(&["b", "a"])));
        assert!(!d.accepts(&word(&["a", "b"])));
    }

    #[test]
    fn postfix_operators() {
        let ab = labels(&["a", "b"]);
        let d = LabelDfa::from_regex(&re("a+ b?"), &ab);
        assert!(d.accepts(&word(&["a"])));
        assert!(d.accepts(&word(&["a", "a", "b"])));
        assert!(!d.accepts(&word(&["b"])));
        let d = LabelDfa::from_regex(&re("eps"), &ab);
        assert!(d.accepts(&word(&[])));
        assert!(!d.accepts(&word(&["a"])));
    }

    #[test]
    fn dfa_against_brute_force_on_short_words() {
        // Oracle: direct recursive matcher by enumeration of splits.
        fn matches(r: &Regex, w: &[Label]) -> bool {
            match r {
                Regex::Empty => false,
                Regex::Eps => w.is_empty(),
                Regex::Sym(l) => w.len() == 1 && &w[0] == l,
                Regex::Concat(a, b) => {
                    (0..=w.len()).any(|i| matches(a, &w[..i]) && matches(b, &w[i..]))
                }
                Regex::Alt(a, b) => matches(a, w) || matches(b, w),
                Regex::Star(a) => {
                    w.is_empty()
                        || (1..=w.len()).any(|i| matches(a, &w[..i]) && matches(r, &w[i..]))
                }
            }
        }
        let ab = labels(&["a", "b"]);
        for pat in ["a* b a*", "(a b)* | b+", "a? (b a)+", "(a|b)* b (a|b)"] {
            let r = re(pat);
            let d = LabelDfa::from_regex(&r, &ab);
            for n in 0..=4usize {
                for mask in 0..(1 << n) {
                    let w: Vec<Label> = (0..n)
                        .map(|i| {
                            if mask >> i & 1 == 0 {
                                Label::new("a")
                            } else {
                                Label::new("b")
                            }
                        })
                        .collect();
                    assert_eq!(d.accepts(&w), matches(&r, &w), "pattern {pat} word {w:?}");
                }
            }
        }
    }
}
