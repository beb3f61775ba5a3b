//! Recursive-descent parser for the text form.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := nc (('*' | '/') nc)*
//! nc     := unary ('@' unary)*
//! unary  := '-' unary | power
//! power  := atom ('**' unary)?
//! atom   := integer | name | name '(' expr (',' expr)* ')' | '?' | '(' expr ')'
//! name   := letter (letter | digit | '_')* "'"*
//! ```
//!
//! Positions in errors are 1-based character columns.

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use super::Expr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("unexpected character {found:?} at position {pos}")]
    UnexpectedChar { pos: usize, found: char },
    #[error("unexpected {found} at position {pos}")]
    UnexpectedToken { pos: usize, found: String },
    #[error("unexpected end of input at position {pos}")]
    UnexpectedEnd { pos: usize },
    #[error("unclosed '(' at position {pos}")]
    Unclosed { pos: usize },
    #[error("unsupported number literal at position {pos}: only integers are allowed")]
    Number { pos: usize },
}

impl ParseError {
    pub fn position(&self) -> Option<usize> {
        match self {
            ParseError::Empty => None,
            ParseError::UnexpectedChar { pos, .. }
            | ParseError::UnexpectedToken { pos, .. }
            | ParseError::UnexpectedEnd { pos }
            | ParseError::Unclosed { pos }
            | ParseError::Number { pos } => Some(*pos),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Question,
    Plus,
    Minus,
    Star,
    StarStar,
    Slash,
    At,
    LParen,
    RParen,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("number {n}"),
            Tok::Name(n) => format!("name {n:?}"),
            Tok::Question => "'?'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::StarStar => "'**'".into(),
            Tok::Slash => "'/'".into(),
            Tok::At => "'@'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '/' => Tok::Slash,
            '@' => Tok::At,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '?' => Tok::Question,
            '*' => {
                if chars.get(i + 1) == Some(&'*') {
                    i += 1;
                    Tok::StarStar
                } else {
                    Tok::Star
                }
            }
            d if d.is_ascii_digit() => {
                let start = i;
                while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    i += 1;
                }
                if chars.get(i + 1).is_some_and(|&n| n == '.' || n.is_alphabetic()) {
                    return Err(ParseError::Number { pos });
                }
                let digits: String = chars[start..=i].iter().collect();
                Tok::Int(digits.parse().expect("ascii digits"))
            }
            l if l.is_alphabetic() => {
                let start = i;
                while i + 1 < chars.len() && (chars[i + 1].is_alphanumeric() || chars[i + 1] == '_') {
                    i += 1;
                }
                while i + 1 < chars.len() && chars[i + 1] == '\'' {
                    i += 1;
                }
                Tok::Name(chars[start..=i].iter().collect())
            }
            other => return Err(ParseError::UnexpectedChar { pos, found: other }),
        };
        out.push((pos, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn unexpected(&self) -> ParseError {
        match self.toks.get(self.at) {
            Some((pos, t)) => ParseError::UnexpectedToken { pos: *pos, found: t.describe() },
            None => ParseError::UnexpectedEnd { pos: self.end },
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    terms.push(self.term()?.neg());
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::add(terms) })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.nc()?];
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    factors.push(self.nc()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    factors.push(self.nc()?.recip());
                }
                _ => break,
            }
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Expr::mul(factors) })
    }

    fn nc(&mut self) -> Result<Expr, ParseError> {
        let mut parts = vec![self.unary()?];
        while self.peek() == Some(&Tok::At) {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Expr::nc_mul(parts) })
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::StarStar) {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::pow(base, exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(n)) => Ok(Expr::number(BigRational::from_integer(n))),
            Some(Tok::Question) => Ok(Expr::placeholder()),
            Some(Tok::Name(name)) => {
                if self.peek() != Some(&Tok::LParen) {
                    return Ok(Expr::symbol(name));
                }
                let open = self.pos();
                self.bump();
                let mut args = Vec::new();
                loop {
                    if self.peek().is_none() {
                        return Err(ParseError::Unclosed { pos: open });
                    }
                    args.push(self.expr()?);
                    match self.bump() {
                        Some(Tok::Comma) => continue,
                        Some(Tok::RParen) => break,
                        None => return Err(ParseError::Unclosed { pos: open }),
                        Some(_) => {
                            self.at -= 1;
                            return Err(self.unexpected());
                        }
                    }
                }
                Ok(Expr::func(name, args))
            }
            Some(Tok::LParen) => {
                if self.peek().is_none() {
                    return Err(ParseError::Unclosed { pos });
                }
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    None => Err(ParseError::Unclosed { pos }),
                    Some(_) => {
                        self.at -= 1;
                        Err(self.unexpected())
                    }
                }
            }
            Some(_) => {
                self.at -= 1;
                Err(self.unexpected())
            }
            None => Err(ParseError::UnexpectedEnd { pos }),
        }
    }
}

/// Parses the text form into a canonical expression.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(ParseError::Empty);
    }
    let end = text.chars().count() + 1;
    let mut p = Parser { toks, at: 0, end };
    let e = p.expr()?;
    if p.at < p.toks.len() {
        return Err(p.unexpected());
    }
    Ok(e)
}
