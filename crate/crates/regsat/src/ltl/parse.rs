//! Surface syntax:
//!
//! ```text
//! phi := 'true' | 'false' | IDENT | 'eq' | 'lt' | 'gt'
//!      | 'freeze' phi | 'X' phi | 'wX' phi
//!      | 'U(' phi ',' phi ')' | 'R(' phi ',' phi ')' | 'F' phi | 'G' phi
//!      | 'Aprev' phi | 'AprevIf(' phi ',' phi ')' | 'Efut' phi
//!      | '!' phi | phi '&' phi | phi '|' phi | '(' phi ')'
//! ```
//!
//! `F p` is sugar for `U(p, true)` and `G p` for `R(p, false)`. The duals
//! `Eprev`/`Afut` are recognized and rejected with a dedicated error.

use super::{Ltl, LtlError};
use crate::model::text::Scanner;
use crate::model::Label;

pub fn parse_ltl(text: &str) -> Result<Ltl, LtlError> {
    let mut s = Scanner::new(text);
    let f = parse_or(&mut s)?;
    if !s.at_end() {
        return Err(err(&s, "trailing input"));
    }
    Ok(f)
}

fn err(s: &Scanner, msg: &str) -> LtlError {
    let (line, col) = s.loc();
    LtlError::Parse {
        line,
        col,
        msg: msg.to_string(),
    }
}

fn parse_or(s: &mut Scanner) -> Result<Ltl, LtlError> {
    let mut lhs = parse_and(s)?;
    loop {
        s.skip_ws();
        if s.eat(b'|') {
            lhs = Ltl::or(lhs, parse_and(s)?);
        } else {
            return Ok(lhs);
        }
    }
}

fn parse_and(s: &mut Scanner) -> Result<Ltl, LtlError> {
    let mut lhs = parse_unary(s)?;
    loop {
        s.skip_ws();
        if s.eat(b'&') {
            lhs = Ltl::and(lhs, parse_unary(s)?);
        } else {
            return Ok(lhs);
        }
    }
}

fn binary(s: &mut Scanner) -> Result<(Ltl, Ltl), LtlError> {
    s.skip_ws();
    s.expect(b'(').map_err(|_| err(s, "expected '('"))?;
    let a = parse_or(s)?;
    s.skip_ws();
    s.expect(b',').map_err(|_| err(s, "expected ','"))?;
    let b = parse_or(s)?;
    s.skip_ws();
    s.expect(b')').map_err(|_| err(s, "expected ')'"))?;
    Ok((a, b))
}

fn parse_unary(s: &mut Scanner) -> Result<Ltl, LtlError> {
    s.skip_ws();
    if s.eat(b'!') {
        return Ok(Ltl::not(parse_unary(s)?));
    }
    if s.eat(b'(') {
        let f = parse_or(s)?;
        s.skip_ws();
        s.expect(b')').map_err(|_| err(s, "expected ')'"))?;
        return Ok(f);
    }
    for kw in ["Eprev", "Afut"] {
        if s.eat_keyword(kw) {
            return Err(LtlError::UndecidableOperator(kw.to_string()));
        }
    }
    if s.eat_keyword("true") {
        return Ok(Ltl::True);
    }
    if s.eat_keyword("false") {
        return Ok(Ltl::False);
    }
    if s.eat_keyword("eq") {
        return Ok(Ltl::Up);
    }
    if s.eat_keyword("lt") {
        return Ok(Ltl::UpLt);
    }
    if s.eat_keyword("gt") {
        return Ok(Ltl::UpGt);
    }
    if s.eat_keyword("freeze") {
        return Ok(Ltl::Freeze(Box::new(parse_unary(s)?)));
    }
    if s.eat_keyword("wX") {
        return Ok(Ltl::WX(Box::new(parse_unary(s)?)));
    }
    if s.eat_keyword("X") {
        return Ok(Ltl::X(Box::new(parse_unary(s)?)));
    }
    if s.eat_keyword("U") {
        let (a, b) = binary(s)?;
        return Ok(Ltl::U(Box::new(a), Box::new(b)));
    }
    if s.eat_keyword("R") {
        let (a, b) = binary(s)?;
        return Ok(Ltl::R(Box::new(a), Box::new(b)));
    }
    if s.eat_keyword("F") {
        return Ok(Ltl::U(Box::new(parse_unary(s)?), Box::new(Ltl::True)));
    }
    if s.eat_keyword("G") {
        return Ok(Ltl::R(Box::new(parse_unary(s)?), Box::new(Ltl::False)));
    }
    if s.eat_keyword("AprevIf") {
        let (a, b) = binary(s)?;
        return Ok(Ltl::AprevIf(Box::new(a), Box::new(b)));
    }
    if s.eat_keyword("Aprev") {
        return Ok(Ltl::Aprev(Box::new(parse_unary(s)?)));
    }
    if s.eat_keyword("Efut") {
        return Ok(Ltl::Efut(Box::new(parse_unary(s)?)));
    }
    let name = s.ident().map_err(|_| err(s, "expected a formula"))?;
    Ok(Ltl::Atom(Label::new(&name)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_paper_example() {
        let f = parse_ltl("G(!a | freeze F(b & eq))").unwrap();
        // G p = R(p, false), F p = U(p, true)
        match f {
            Ltl::R(p, q) => {
                assert_eq!(*q, Ltl::False);
                assert!(matches!(*p, Ltl::Or(..)));
            }
            other => panic!("unexpected shape {other:?}"),
        }
    }

    #[test]
    fn parses_freeze_up() {
        assert_eq!(
            parse_ltl("freeze eq").unwrap(),
            Ltl::Freeze(Box::new(Ltl::Up))
        );
    }

    #[test]
    fn precedence_or_under_and() {
        let f = parse_ltl("a & b | c").unwrap();
        assert!(matches!(f, Ltl::Or(..)));
    }
}
