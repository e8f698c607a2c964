//! Text formats for data words and data trees.
//!
//! ```text
//! word := item+            item := LABEL '@' UINT
//! tree := LABEL '@' UINT ( '(' tree+ ')' )?
//! ```
//!
//! Input is UTF-8, whitespace insensitive, `#` starts a line comment.
//! Serializers emit exactly one space between siblings and no trailing
//! whitespace.

use super::{DataTree, DataWord, Datum, Label};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("empty input: data words are non-empty")]
    EmptyWord,
    #[error("{line}:{col}: empty child list")]
    EmptyChildList { line: usize, col: usize },
}

/// Char-level scanner shared by all the small text formats in this crate.
pub(crate) struct Scanner<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Scanner<'a> {
    pub fn new(src: &'a str) -> Self {
        Scanner {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    pub fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    pub fn loc(&self) -> (usize, usize) {
        (self.line, self.col)
    }

    fn bump(&mut self) -> Option<u8> {
        let c = *self.src.get(self.pos)?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    pub fn skip_ws(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'#') => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    pub fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.peek().is_none()
    }

    pub fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    /// Reads a maximal token over `[a-zA-Z0-9_]`, or errors.
    pub fn ident(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.bump();
            } else {
                break;
            }
        }
        if self.pos == start {
            Err(self.error("expected identifier"))
        } else {
            Ok(String::from_utf8(self.src[start..self.pos].to_vec()).unwrap())
        }
    }

    pub fn uint(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                self.bump();
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(self.error("expected unsigned integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.error("integer out of range"))
    }

    /// Peeks whether the next token (after whitespace) starts a word like
    /// the given keyword and is followed by a non-ident char.
    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let bytes = kw.as_bytes();
        if self.src[self.pos..].starts_with(bytes) {
            let after = self.src.get(self.pos + bytes.len()).copied();
            let boundary = match after {
                Some(c) => !(c.is_ascii_alphanumeric() || c == b'_'),
                None => true,
            };
            if boundary {
                for _ in 0..bytes.len() {
                    self.bump();
                }
                return true;
            }
        }
        false
    }
}

fn parse_item(s: &mut Scanner) -> Result<(Label, Datum), ParseError> {
    let name = s.ident()?;
    s.expect(b'@')?;
    let v = s.uint()?;
    Ok((Label::new(&name), Datum::int(v)))
}

/// Parses the word grammar `item+`.
pub fn parse_word(text: &str) -> Result<DataWord, ParseError> {
    let mut s = Scanner::new(text);
    let mut items = Vec::new();
    s.skip_ws();
    while !s.at_end() {
        items.push(parse_item(&mut s)?);
        s.skip_ws();
    }
    if items.is_empty() {
        return Err(ParseError::EmptyWord);
    }
    Ok(DataWord::new(items))
}

fn parse_tree_node(s: &mut Scanner) -> Result<DataTree, ParseError> {
    let (label, datum) = parse_item(s)?;
    s.skip_ws();
    let mut children = Vec::new();
    if s.eat(b'(') {
        let loc = s.loc();
        s.skip_ws();
        while s.peek() != Some(b')') {
            if s.peek().is_none() {
                return Err(s.error("unbalanced parentheses"));
            }
            children.push(parse_tree_node(s)?);
            s.skip_ws();
        }
        s.expect(b')')?;
        if children.is_empty() {
            return Err(ParseError::EmptyChildList {
                line: loc.0,
                col: loc.1,
            });
        }
    }
    Ok(DataTree::node(label, datum, children))
}

/// Parses the tree grammar `LABEL '@' UINT ( '(' tree+ ')' )?`.
pub fn parse_tree(text: &str) -> Result<DataTree, ParseError> {
    let mut s = Scanner::new(text);
    s.skip_ws();
    let t = parse_tree_node(&mut s)?;
    if !s.at_end() {
        return Err(s.error("trailing input after tree"));
    }
    Ok(t)
}
