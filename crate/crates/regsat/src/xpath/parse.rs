//! Surface syntax:
//!
//! ```text
//! node := LABEL | '!' node | node 'and' node | node 'or' node
//!       | '<' path '>' | '<' path ('='|'!=') path '>'
//! path := 'down' | 'down*' | 'right' | 'right*' | 'eps' | '[' node ']'
//!       | path '/' path | path '|' path | '(' path ')' '*'?
//! ```
//!
//! `down` is the child axis and `down*` descendant-or-self; one-step-plus
//! axes are written `down/down*` and `right/right*`.

use super::{NodeExpr, PathExpr, XpathError};
use crate::model::text::Scanner;
use crate::model::Label;

pub fn parse_xpath(text: &str) -> Result<NodeExpr, XpathError> {
    let mut s = Scanner::new(text);
    let e = parse_or(&mut s)?;
    if !s.at_end() {
        return Err(err(&s, "trailing input"));
    }
    Ok(e)
}

fn err(s: &Scanner, msg: &str) -> XpathError {
    let (line, col) = s.loc();
    XpathError::Parse {
        line,
        col,
        msg: msg.to_string(),
    }
}

fn parse_or(s: &mut Scanner) -> Result<NodeExpr, XpathError> {
    let mut lhs = parse_and(s)?;
    loop {
        if s.eat_keyword("or") {
            lhs = NodeExpr::or(lhs, parse_and(s)?);
        } else {
            return Ok(lhs);
        }
    }
}

fn parse_and(s: &mut Scanner) -> Result<NodeExpr, XpathError> {
    let mut lhs = parse_unary(s)?;
    loop {
        if s.eat_keyword("and") {
            lhs = NodeExpr::and(lhs, parse_unary(s)?);
        } else {
            return Ok(lhs);
        }
    }
}

fn parse_unary(s: &mut Scanner) -> Result<NodeExpr, XpathError> {
    s.skip_ws();
    if s.eat(b'!') {
        return Ok(NodeExpr::not(parse_unary(s)?));
    }
    if s.eat(b'(') {
        let e = parse_or(s)?;
        s.skip_ws();
        s.expect(b')').map_err(|_| err(s, "expected ')'"))?;
        return Ok(e);
    }
    if s.eat(b'<') {
        let a = parse_path(s)?;
        s.skip_ws();
        if s.eat(b'>') {
            return Ok(NodeExpr::some(a));
        }
        if s.eat(b'=') {
            let b = parse_path(s)?;
            s.skip_ws();
            s.expect(b'>').map_err(|_| err(s, "expected '>'"))?;
            return Ok(NodeExpr::eq(a, b));
        }
        if s.eat(b'!') {
            s.expect(b'=').map_err(|_| err(s, "expected '='"))?;
            let b = parse_path(s)?;
            s.skip_ws();
            s.expect(b'>').map_err(|_| err(s, "expected '>'"))?;
            return Ok(NodeExpr::neq(a, b));
        }
        return Err(err(s, "expected '>', '=' or '!='"));
    }
    let name = s.ident().map_err(|_| err(s, "expected a node expression"))?;
    if name == "and" || name == "or" || name == "eps" || name == "down" || name == "right" {
        return Err(err(s, "reserved word in node position"));
    }
    Ok(NodeExpr::Label(Label::new(&name)))
}

fn parse_path(s: &mut Scanner) -> Result<PathExpr, XpathError> {
    let mut lhs = parse_path_seq(s)?;
    loop {
        s.skip_ws();
        if s.peek() == Some(b'|') {
            s.eat(b'|');
            lhs = PathExpr::union(lhs, parse_path_seq(s)?);
        } else {
            return Ok(lhs);
        }
    }
}

fn parse_path_seq(s: &mut Scanner) -> Result<PathExpr, XpathError> {
    let mut lhs = parse_path_atom(s)?;
    loop {
        s.skip_ws();
        if s.eat(b'/') {
            lhs = PathExpr::concat(lhs, parse_path_atom(s)?);
        } else {
            return Ok(lhs);
        }
    }
}

fn parse_path_atom(s: &mut Scanner) -> Result<PathExpr, XpathError> {
    s.skip_ws();
    if s.eat(b'(') {
        let p = parse_path(s)?;
        s.skip_ws();
        s.expect(b')').map_err(|_| err(s, "expected ')'"))?;
        let mut out = p;
        loop {
            s.skip_ws();
            if s.eat(b'*') {
                out = PathExpr::star(out);
            } else {
                return Ok(out);
            }
        }
    }
    if s.eat(b'[') {
        let e = parse_or(s)?;
        s.skip_ws();
        s.expect(b']').map_err(|_| err(s, "expected ']'"))?;
        return Ok(PathExpr::test(e));
    }
    if s.eat_keyword("down") {
        return Ok(if s.eat(b'*') {
            PathExpr::star(PathExpr::Child)
        } else {
            PathExpr::Child
        });
    }
    if s.eat_keyword("right") {
        return Ok(if s.eat(b'*') {
            PathExpr::star(PathExpr::Right)
        } else {
            PathExpr::Right
        });
    }
    if s.eat_keyword("eps") {
        return Ok(PathExpr::Eps);
    }
    Err(err(s, "expected a path expression"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_running_example_shape() {
        // <down*[b and <down[b] != down[b]>]>
        let e = parse_xpath("<down*[b and <down[b] != down[b]>]>").unwrap();
        match e {
            NodeExpr::Some(p) => assert!(matches!(*p, PathExpr::Concat(..) | PathExpr::Star(..))),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parses_boolean_nodes() {
        let e = parse_xpath("a and !a").unwrap();
        assert!(matches!(e, NodeExpr::And(..)));
    }

    #[test]
    fn rejects_incomplete_test() {
        assert!(matches!(
            parse_xpath("<down ="),
            Err(XpathError::Parse { .. })
        ));
    }

    #[test]
    fn star_of_group() {
        let e = parse_xpath("<(down/right)*[a]>").unwrap();
        assert!(matches!(e, NodeExpr::Some(_)));
    }
}
