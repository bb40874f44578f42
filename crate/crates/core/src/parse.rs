//! Parser for the canonical Matlab-style expression notation.
//!
//! Accepts the fully parenthesized form emitted by [`Expr::canonical`] and
//! the looser spacing/parenthesization found in hand-written strings, e.g.
//! `sum((sum(A, 1) * B)', 1)`. Multiplication operators are left-associative
//! and equal-precedence; postfix `'` binds tighter.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::expr::{Expr, Rejection};
use crate::grammar::GrammarConfig;
use crate::shape::Dim;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    UnexpectedEnd,
    UnexpectedChar { at: usize, found: char },
    UnknownVariable { name: String },
    BadDimension { at: usize },
    BadSumAxis { at: usize },
    Shape(Rejection),
    TrailingInput { at: usize },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::UnexpectedEnd => f.write_str("unexpected end of input"),
            ParseError::UnexpectedChar { at, found } => {
                write!(f, "unexpected character {found:?} at byte {at}")
            }
            ParseError::UnknownVariable { name } => write!(f, "unknown variable {name}"),
            ParseError::BadDimension { at } => write!(f, "bad repmat dimension at byte {at}"),
            ParseError::BadSumAxis { at } => write!(f, "sum axis must be 1 or 2 at byte {at}"),
            ParseError::Shape(r) => write!(f, "ill-shaped expression: {r}"),
            ParseError::TrailingInput { at } => write!(f, "trailing input at byte {at}"),
        }
    }
}

impl From<Rejection> for ParseError {
    fn from(r: Rejection) -> ParseError {
        ParseError::Shape(r)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    cfg: &'a GrammarConfig,
}

/// Parse an expression against the variable set of `cfg`.
pub fn parse_expr(src: &str, cfg: &GrammarConfig) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        cfg,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(ParseError::TrailingInput { at: p.pos });
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Result<u8, ParseError> {
        self.skip_ws();
        let c = self.src.get(self.pos).copied().ok_or(ParseError::UnexpectedEnd)?;
        self.pos += 1;
        Ok(c)
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        let got = self.bump()?;
        if got != c {
            return Err(ParseError::UnexpectedChar {
                at: self.pos - 1,
                found: got as char,
            });
        }
        Ok(())
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(kw.as_bytes()) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    /// expr := postfix (("*" | ".*") postfix)*
    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.postfix()?;
        loop {
            self.skip_ws();
            if self.src[self.pos..].starts_with(b".*") {
                self.pos += 2;
                let rhs = self.postfix()?;
                lhs = Expr::elem_mul(&lhs, &rhs)?;
            } else if self.src[self.pos..].first() == Some(&b'*') {
                self.pos += 1;
                let rhs = self.postfix()?;
                lhs = Expr::multiply(&lhs, &rhs)?;
            } else {
                return Ok(lhs);
            }
        }
    }

    /// postfix := primary "'"*
    fn postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.primary()?;
        while self.peek() == Some(b'\'') {
            self.pos += 1;
            e = Expr::transpose(&e);
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().ok_or(ParseError::UnexpectedEnd)? {
            b'(' => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            b's' if self.eat_keyword("sum") => {
                self.expect(b'(')?;
                let inner = self.expr()?;
                self.expect(b',')?;
                let axis = self.bump()?;
                let e = match axis {
                    b'1' => Expr::col_sum(&inner),
                    b'2' => Expr::row_sum(&inner),
                    _ => return Err(ParseError::BadSumAxis { at: self.pos - 1 }),
                };
                self.expect(b')')?;
                Ok(e)
            }
            b'r' if self.eat_keyword("repmat") => {
                self.expect(b'(')?;
                let inner = self.expr()?;
                self.expect(b',')?;
                let d1 = self.dimension()?;
                self.expect(b',')?;
                let d2 = self.dimension()?;
                self.expect(b')')?;
                let e = if d1.is_one() {
                    Expr::col_repeat(&inner, d2)?
                } else if d2.is_one() {
                    Expr::row_repeat(&inner, d1)?
                } else {
                    Expr::elem_repeat(&inner, d1, d2)?
                };
                Ok(e)
            }
            c if c.is_ascii_alphabetic() => self.variable(),
            c => Err(ParseError::UnexpectedChar {
                at: self.pos,
                found: c as char,
            }),
        }
    }

    fn dimension(&mut self) -> Result<Dim, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let c = self.bump()?;
        Dim::from_symbol(core::str::from_utf8(&[c]).unwrap())
            .ok_or(ParseError::BadDimension { at: start })
    }

    fn variable(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let idx = self
            .cfg
            .var_index(name)
            .ok_or_else(|| ParseError::UnknownVariable {
                name: String::from(name),
            })?;
        Ok(self.cfg.leaf(idx))
    }
}

/// Convenience: parse many expressions.
pub fn parse_all(srcs: &[&str], cfg: &GrammarConfig) -> Result<Vec<Expr>, ParseError> {
    srcs.iter().map(|s| parse_expr(s, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::VarSpec;
    use crate::shape::Shape;
    use alloc::vec;

    fn two_var_cfg() -> GrammarConfig {
        GrammarConfig::new(vec![
            VarSpec::new("A", Shape::new(Dim::N, Dim::M), 1),
            VarSpec::new("B", Shape::new(Dim::M, Dim::P), 1),
        ])
    }

    #[test]
    fn round_trips_canonical_form() {
        let cfg = two_var_cfg();
        let a = cfg.leaf(0);
        let b = cfg.leaf(1);
        let e = Expr::col_sum(&Expr::transpose(
            &Expr::multiply(&Expr::col_sum(&a), &b).unwrap(),
        ));
        let back = parse_expr(e.canonical(), &cfg).unwrap();
        assert_eq!(back, e);
        assert_eq!(back.canonical(), e.canonical());
    }

    #[test]
    fn parses_loose_paper_style() {
        let cfg = two_var_cfg();
        let e = parse_expr("sum((sum(A, 1) * B)', 1)", &cfg).unwrap();
        assert!(e.shape().is_scalar());
        assert_eq!(e.canonical(), "(sum((((sum(A, 1)) * B)'), 1))");
    }

    #[test]
    fn parses_repmat_and_elem_mul() {
        let cfg = GrammarConfig::single("A", Shape::new(Dim::N, Dim::N), 2);
        let e = parse_expr("(repmat((sum(A, 2)), 1, n)) .* A", &cfg).unwrap();
        assert_eq!(e.shape(), Shape::new(Dim::N, Dim::N));
        let rt = parse_expr(e.canonical(), &cfg).unwrap();
        assert_eq!(rt, e);
    }

    #[test]
    fn rejects_unknown_variable_and_trailing() {
        let cfg = two_var_cfg();
        assert!(matches!(
            parse_expr("C", &cfg),
            Err(ParseError::UnknownVariable { .. })
        ));
        assert!(matches!(
            parse_expr("A)", &cfg),
            Err(ParseError::TrailingInput { .. })
        ));
    }

    #[test]
    fn rejects_ill_shaped() {
        let cfg = two_var_cfg();
        // B * A with B:(m,p), A:(n,m) is a shape error
        assert!(matches!(parse_expr("B * A", &cfg), Err(ParseError::Shape(_))));
    }
}
