//! Recursive-descent parsers for the two surface grammars.
//!
//! λ-terms: `\x. M`, `λx. M`, `\x y. M` (several binders), application by
//! juxtaposition, identifiers made of letters, digits, `_` and `'`.
//!
//! CL terms: `K`, `S`, `K'(M)`, `S'(M)`, `S''(M, N)`, `?name`, parentheses.
//! `K` and `S` are single-character tokens, so `SKK` reads as `S K K`.

use std::sync::Arc;

use super::cl::ClTerm;
use super::lambda::{LambdaTerm, FREE_INDEX};
use crate::error::{Error, Result};

struct Cursor {
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    fn new(src: &str) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn peek_raw(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn error(&self, expected: &str) -> Error {
        Error::Parse {
            position: self.pos,
            expected: expected.to_string(),
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("`{c}`")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek_raw(0) {
            if c.is_alphanumeric() || c == '_' || (c == '\'' && self.pos > start) {
                self.pos += 1;
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(self.error("identifier"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.error("end of input")),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Parses a λ-term. Free variables are allowed; see [`parse_closed_lambda`].
pub fn parse_lambda(src: &str) -> Result<LambdaTerm> {
    let mut cur = Cursor::new(src);
    let mut scope = Vec::new();
    let t = lambda_term(&mut cur, &mut scope)?;
    cur.finish()?;
    Ok(t)
}

/// Parses a λ-term and rejects it if any variable is free.
pub fn parse_closed_lambda(src: &str) -> Result<LambdaTerm> {
    let t = parse_lambda(src)?;
    match t.first_free() {
        Some(name) => Err(Error::open(name)),
        None => Ok(t),
    }
}

fn lambda_term(cur: &mut Cursor, scope: &mut Vec<String>) -> Result<LambdaTerm> {
    match cur.peek() {
        Some('\\') | Some('λ') => {
            cur.pos += 1;
            let mut binders = vec![cur.ident()?];
            while cur.peek().is_some_and(is_ident_start) {
                binders.push(cur.ident()?);
            }
            cur.expect('.')?;
            let n = binders.len();
            scope.extend(binders.iter().cloned());
            let body = lambda_term(cur, scope);
            scope.truncate(scope.len() - n);
            let mut t = body?;
            for b in binders.iter().rev() {
                t = LambdaTerm::abs(b, t);
            }
            Ok(t)
        }
        _ => {
            let mut t = lambda_atom(cur, scope)?;
            loop {
                match cur.peek() {
                    Some(c) if c == '(' || is_ident_start(c) => {
                        t = LambdaTerm::app(t, lambda_atom(cur, scope)?);
                    }
                    // A trailing abstraction extends as far right as possible.
                    Some('\\') | Some('λ') => {
                        t = LambdaTerm::app(t, lambda_term(cur, scope)?);
                    }
                    _ => return Ok(t),
                }
            }
        }
    }
}

fn lambda_atom(cur: &mut Cursor, scope: &mut Vec<String>) -> Result<LambdaTerm> {
    match cur.peek() {
        Some('(') => {
            cur.pos += 1;
            let t = lambda_term(cur, scope)?;
            cur.expect(')')?;
            Ok(t)
        }
        Some(c) if is_ident_start(c) => {
            let name = cur.ident()?;
            Ok(match scope.iter().rev().position(|b| *b == name) {
                Some(index) => LambdaTerm::Var {
                    index,
                    name: Arc::from(name.as_str()),
                },
                None => LambdaTerm::var(FREE_INDEX, &name),
            })
        }
        _ => Err(cur.error("variable, `(` or abstraction")),
    }
}

/// Parses a CL / CL* term, metavariables included.
pub fn parse_cl(src: &str) -> Result<ClTerm> {
    let mut cur = Cursor::new(src);
    let t = cl_term(&mut cur)?;
    cur.finish()?;
    Ok(t)
}

fn cl_term(cur: &mut Cursor) -> Result<ClTerm> {
    let mut t = cl_atom(cur)?;
    while matches!(cur.peek(), Some('K' | 'S' | '?' | '(')) {
        t = ClTerm::app(t, cl_atom(cur)?);
    }
    Ok(t)
}

fn primes(cur: &mut Cursor) -> usize {
    let mut n = 0;
    while cur.peek_raw(n) == Some('\'') {
        n += 1;
    }
    cur.pos += n;
    n
}

fn cl_atom(cur: &mut Cursor) -> Result<ClTerm> {
    match cur.peek() {
        Some('(') => {
            cur.pos += 1;
            let t = cl_term(cur)?;
            cur.expect(')')?;
            Ok(t)
        }
        Some('?') => {
            cur.pos += 1;
            let start = cur.pos;
            let name = cur.ident()?;
            if cur.pos == start {
                return Err(cur.error("metavariable name"));
            }
            Ok(ClTerm::meta(&name))
        }
        Some('K') => {
            cur.pos += 1;
            match primes(cur) {
                0 => Ok(ClTerm::K),
                1 => {
                    cur.expect('(')?;
                    let m = cl_term(cur)?;
                    cur.expect(')')?;
                    Ok(ClTerm::kp(m))
                }
                _ => Err(cur.error("`(` after K'")),
            }
        }
        Some('S') => {
            cur.pos += 1;
            match primes(cur) {
                0 => Ok(ClTerm::S),
                1 => {
                    cur.expect('(')?;
                    let m = cl_term(cur)?;
                    cur.expect(')')?;
                    Ok(ClTerm::sp(m))
                }
                2 => {
                    cur.expect('(')?;
                    let m = cl_term(cur)?;
                    cur.expect(',')?;
                    let n = cl_term(cur)?;
                    cur.expect(')')?;
                    Ok(ClTerm::spp(m, n))
                }
                _ => Err(cur.error("at most two primes after S")),
            }
        }
        _ => Err(cur.error("`K`, `S`, `?name` or `(`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_application() {
        let t = parse_lambda("\\x. x x").unwrap();
        assert_eq!(
            t,
            LambdaTerm::abs(
                "x",
                LambdaTerm::app(LambdaTerm::var(0, "x"), LambdaTerm::var(0, "x"))
            )
        );
    }

    #[test]
    fn multi_binder_sugar_and_unicode_lambda() {
        let a = parse_lambda("\\x y. x y").unwrap();
        let b = parse_lambda("λx.λy.x y").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "\\x. \\y. x y");
    }

    #[test]
    fn closedness_is_checked_on_demand() {
        assert!(parse_lambda("\\x. y").is_ok());
        assert_eq!(
            parse_closed_lambda("\\x. y"),
            Err(Error::OpenTerm("y".into()))
        );
    }

    #[test]
    fn cl_application_is_left_associative() {
        assert_eq!(
            parse_cl("S K K").unwrap(),
            ClTerm::app(ClTerm::app(ClTerm::S, ClTerm::K), ClTerm::K)
        );
        assert_eq!(parse_cl("SKK").unwrap(), parse_cl("S K K").unwrap());
    }

    #[test]
    fn cl_star_constructors() {
        assert_eq!(
            parse_cl("K'(?x) ?y").unwrap(),
            ClTerm::app(ClTerm::kp(ClTerm::meta("x")), ClTerm::meta("y"))
        );
        assert_eq!(
            parse_cl("S''(K K, S)").unwrap(),
            ClTerm::spp(ClTerm::app(ClTerm::K, ClTerm::K), ClTerm::S)
        );
    }

    #[test]
    fn errors_report_position() {
        match parse_cl("S (K") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_lambda("\\. x"), Err(Error::Parse { .. })));
        assert!(matches!(parse_cl("K'K"), Err(Error::Parse { .. })));
    }
}
