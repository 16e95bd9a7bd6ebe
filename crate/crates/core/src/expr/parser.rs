//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | power
//! power  := atom ['^' INT]
//! atom   := 'xi' | 'i' | NUMBER | 'conj' '(' expr ')' | 'exp' '(' expr ')' | '(' expr ')'
//! ```
//!
//! Unary minus binds looser than `^`, so `-xi^2` is `-(xi^2)`.

use num_complex::Complex64 as Complex;

use super::{Expr, ExprBuilder, ExprError, NodeId};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(Complex),
    Int(i32),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Number(c) => format!("number {c}"),
            Tok::Int(n) => format!("integer {n}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Returns the token and the byte offset where it starts.
    fn next(&mut self) -> Result<(Tok, usize), ExprError> {
        self.skip_ws();
        let start = self.pos;
        let Some(&ch) = self.src.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        let single = match ch {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            self.pos += 1;
            return Ok((t, start));
        }
        if ch.is_ascii_digit() || ch == b'.' {
            return self.number(start);
        }
        if ch.is_ascii_alphabetic() || ch == b'_' {
            while self
                .src
                .get(self.pos)
                .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
            {
                self.pos += 1;
            }
            let name = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
            return Ok((Tok::Ident(name), start));
        }
        Err(ExprError::Syntax {
            offset: start,
            expected: vec!["expression"],
            found: format!("`{}`", ch as char),
        })
    }

    fn number(&mut self, start: usize) -> Result<(Tok, usize), ExprError> {
        let digits = |lx: &mut Self| {
            let s = lx.pos;
            while lx.src.get(lx.pos).is_some_and(u8::is_ascii_digit) {
                lx.pos += 1;
            }
            lx.pos - s
        };
        let int_digits = digits(self);
        let mut is_int = true;
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            is_int = false;
            let frac = digits(self);
            if int_digits + frac == 0 {
                return Err(ExprError::Syntax {
                    offset: start,
                    expected: vec!["number"],
                    found: "`.`".into(),
                });
            }
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = save;
            } else {
                is_int = false;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let value: f64 = text.parse().map_err(|_| ExprError::Syntax {
            offset: start,
            expected: vec!["number"],
            found: format!("`{text}`"),
        })?;
        if self.src.get(self.pos) == Some(&b'i')
            && !self
                .src
                .get(self.pos + 1)
                .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
        {
            self.pos += 1;
            return Ok((Tok::Number(Complex::new(0.0, value)), start));
        }
        if is_int {
            if let Ok(n) = text.parse::<i32>() {
                return Ok((Tok::Int(n), start));
            }
        }
        Ok((Tok::Number(Complex::new(value, 0.0)), start))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    at: usize,
    b: ExprBuilder,
}

pub(super) fn parse(text: &str) -> Result<Expr, ExprError> {
    let mut lexer = Lexer { src: text.as_bytes(), pos: 0 };
    let (tok, at) = lexer.next()?;
    let mut p = Parser { lexer, tok, at, b: ExprBuilder::new() };
    let root = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.unexpected(&["`+`", "`-`", "`*`", "`/`", "`^`", "end of input"]));
    }
    Ok(p.b.finish(root))
}

impl Parser<'_> {
    fn bump(&mut self) -> Result<(), ExprError> {
        let (tok, at) = self.lexer.next()?;
        self.tok = tok;
        self.at = at;
        Ok(())
    }

    fn unexpected(&self, expected: &[&'static str]) -> ExprError {
        ExprError::Syntax {
            offset: self.at,
            expected: expected.to_vec(),
            found: self.tok.describe(),
        }
    }

    fn expect(&mut self, tok: Tok, label: &'static str) -> Result<(), ExprError> {
        if self.tok == tok {
            self.bump()
        } else {
            Err(self.unexpected(&[label]))
        }
    }

    fn expr(&mut self) -> Result<NodeId, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.tok {
                Tok::Plus => {
                    self.bump()?;
                    let rhs = self.term()?;
                    lhs = self.b.add(lhs, rhs);
                }
                Tok::Minus => {
                    self.bump()?;
                    let rhs = self.term()?;
                    lhs = self.b.sub(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<NodeId, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            match self.tok {
                Tok::Star => {
                    self.bump()?;
                    let rhs = self.factor()?;
                    lhs = self.b.mul(lhs, rhs);
                }
                Tok::Slash => {
                    self.bump()?;
                    let rhs = self.factor()?;
                    lhs = self.b.div(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<NodeId, ExprError> {
        if self.tok == Tok::Minus {
            self.bump()?;
            let inner = self.factor()?;
            return Ok(self.b.neg(inner));
        }
        let base = self.atom()?;
        if self.tok == Tok::Caret {
            self.bump()?;
            let Tok::Int(n) = self.tok else {
                return Err(self.unexpected(&["integer exponent"]));
            };
            self.bump()?;
            return Ok(self.b.powi(base, n));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<NodeId, ExprError> {
        match self.tok.clone() {
            Tok::Number(c) => {
                self.bump()?;
                Ok(self.b.constant(c))
            }
            Tok::Int(n) => {
                self.bump()?;
                Ok(self.b.real(f64::from(n)))
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let offset = self.at;
                match name.as_str() {
                    "xi" => {
                        self.bump()?;
                        Ok(self.b.var())
                    }
                    "i" => {
                        self.bump()?;
                        Ok(self.b.constant(Complex::i()))
                    }
                    "conj" | "exp" => {
                        self.bump()?;
                        self.expect(Tok::LParen, "`(`")?;
                        let arg = self.expr()?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(if name == "conj" { self.b.conj(arg) } else { self.b.exp(arg) })
                    }
                    _ => Err(ExprError::UnknownIdentifier { name, offset }),
                }
            }
            _ => Err(self.unexpected(&["xi", "i", "number", "conj", "exp", "`(`", "`-`"])),
        }
    }
}
