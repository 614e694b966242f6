//! Recursive-descent parser for the canonical fully parenthesized grammar:
//!
//! ```text
//! entity    := var | "0" | "1"
//!            | "(" entity "+" entity ")" | "(" entity "*" entity ")"
//!            | "(-" entity ")" | "(1/" entity ")" | "(" entity "^2)"
//! statement := entity ("=" | ">=" | "<=" | "!=") entity
//! var       := "a" ..= "z"
//! ```
//!
//! Whitespace between tokens is ignored.

use std::fmt;

use super::{Entity, Rel, Statement};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    /// Byte offset of the offending input.
    pub offset: usize,
    pub expected: Vec<&'static str>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: expected one of {}", self.offset, self.expected.join(", "))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { src: text.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    /// Next non-whitespace byte after the current one.
    fn peek_second(&mut self) -> Option<u8> {
        self.skip_ws();
        let mut i = self.pos + 1;
        while i < self.src.len() && self.src[i].is_ascii_whitespace() {
            i += 1;
        }
        self.src.get(i).copied()
    }

    fn err(&self, expected: &[&'static str]) -> ParseError {
        ParseError { offset: self.pos, expected: expected.to_vec() }
    }

    fn expect(&mut self, byte: u8, name: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&[name]))
        }
    }

    fn entity(&mut self) -> Result<Entity, ParseError> {
        match self.peek() {
            Some(c @ b'a'..=b'z') => {
                self.pos += 1;
                Ok(Entity::Var(c as char))
            }
            Some(b'0') => {
                self.pos += 1;
                Ok(Entity::zero())
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Entity::one())
            }
            Some(b'(') => {
                self.pos += 1;
                self.compound()
            }
            _ => Err(self.err(&["variable", "0", "1", "("])),
        }
    }

    // Called just after an opening parenthesis.
    fn compound(&mut self) -> Result<Entity, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let child = self.entity()?;
            self.expect(b')', ")")?;
            return Ok(Entity::neg(child));
        }
        if self.peek() == Some(b'1') && self.peek_second() == Some(b'/') {
            self.pos += 1;
            self.expect(b'/', "/")?;
            let child = self.entity()?;
            self.expect(b')', ")")?;
            return Ok(Entity::inv(child));
        }
        let lhs = self.entity()?;
        match self.peek() {
            Some(b'+') => {
                self.pos += 1;
                let rhs = self.entity()?;
                self.expect(b')', ")")?;
                Ok(Entity::add(lhs, rhs))
            }
            Some(b'*') => {
                self.pos += 1;
                let rhs = self.entity()?;
                self.expect(b')', ")")?;
                Ok(Entity::mul(lhs, rhs))
            }
            Some(b'^') => {
                self.pos += 1;
                self.expect(b'2', "2")?;
                self.expect(b')', ")")?;
                Ok(Entity::sqr(lhs))
            }
            _ => Err(self.err(&["+", "*", "^2"])),
        }
    }

    fn rel(&mut self) -> Result<Rel, ParseError> {
        let rel = match (self.peek(), self.src.get(self.pos + 1).copied()) {
            (Some(b'='), _) => {
                self.pos += 1;
                return Ok(Rel::Eq);
            }
            (Some(b'>'), Some(b'=')) => Rel::Geq,
            (Some(b'<'), Some(b'=')) => Rel::Leq,
            (Some(b'!'), Some(b'=')) => Rel::Neq,
            _ => return Err(self.err(&["=", ">=", "<=", "!="])),
        };
        self.pos += 2;
        Ok(rel)
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.err(&["end of input"])),
        }
    }
}

pub fn parse_entity(text: &str) -> Result<Entity, ParseError> {
    let mut p = Parser::new(text);
    let e = p.entity()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_statement(text: &str) -> Result<Statement, ParseError> {
    let mut p = Parser::new(text);
    let lhs = p.entity()?;
    let rel = p.rel()?;
    let rhs = p.entity()?;
    p.finish()?;
    Ok(Statement::new(rel, lhs, rhs))
}
