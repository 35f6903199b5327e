//! Recursive-descent parser for the polynomial and series grammar.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | base ('^' exp)?
//! exp    := uint | '(' '-'? int ('/' uint)? ')'      (parenthesized form: series only)
//! base   := var | number | 'i' | 'sqrt' '(' uint ')' | '(' expr ')' | 'O' '(' expr ')'
//! number := int | int '/' uint | float
//! ```
//!
//! `O(t^e)` is accepted in series mode only and marks the truncation.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::Zero;

use super::poly::{index_of, Poly};
use super::scalar::Scalar;
use super::series::PuiseuxSeries;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(String),
    Float(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

fn syntax(pos: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { pos, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() => {
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                let mut is_float = false;
                if i + 1 < b.len() && b[i] == b'.' && b[i + 1].is_ascii_digit() {
                    is_float = true;
                    i += 1;
                    while i < b.len() && b[i].is_ascii_digit() {
                        i += 1;
                    }
                    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                        let mut j = i + 1;
                        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                            j += 1;
                        }
                        if j < b.len() && b[j].is_ascii_digit() {
                            while j < b.len() && b[j].is_ascii_digit() {
                                j += 1;
                            }
                            i = j;
                        }
                    }
                }
                let s = &text[start..i];
                out.push((
                    start,
                    if is_float {
                        Tok::Float(s.parse().map_err(|_| syntax(start, "bad float literal"))?)
                    } else {
                        Tok::Int(s.to_string())
                    },
                ));
                continue;
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'\'') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            other => return Err(syntax(start, format!("unexpected character `{other}`"))),
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Expr {
    Num(Scalar),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, Rational64, usize),
    BigO(Box<Expr>, usize),
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    at: usize,
    end: usize,
    series: bool,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let pos = self.pos();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(syntax(pos, format!("expected {what}"))),
        }
    }

    fn uint(&mut self) -> Result<i64> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(s)) => s.parse().map_err(|_| syntax(pos, "integer too large")),
            _ => Err(syntax(pos, "expected unsigned integer")),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.bump();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        if let Some(Tok::Minus) = self.peek() {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let pos = self.pos();
            let e = self.exponent()?;
            return Ok(Expr::Pow(Box::new(base), e, pos));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Rational64> {
        if self.series {
            if let Some(Tok::LParen) = self.peek() {
                self.bump();
                let neg = if let Some(Tok::Minus) = self.peek() {
                    self.bump();
                    true
                } else {
                    false
                };
                let p = self.uint()?;
                let mut q = 1;
                if let Some(Tok::Slash) = self.peek() {
                    self.bump();
                    let pos = self.pos();
                    q = self.uint()?;
                    if q == 0 {
                        return Err(syntax(pos, "zero denominator"));
                    }
                }
                self.expect(Tok::RParen, "`)`")?;
                return Ok(Rational64::new(if neg { -p } else { p }, q));
            }
        }
        Ok(Rational64::from_integer(self.uint()?))
    }

    fn base(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(s)) => {
                let num: BigInt = s.parse().map_err(|_| syntax(pos, "bad integer"))?;
                if let Some(Tok::Slash) = self.peek() {
                    self.bump();
                    let dpos = self.pos();
                    let den: BigInt = match self.bump() {
                        Some(Tok::Int(d)) => d.parse().map_err(|_| syntax(dpos, "bad integer"))?,
                        _ => return Err(syntax(dpos, "expected unsigned integer denominator")),
                    };
                    if den.is_zero() {
                        return Err(syntax(dpos, "zero denominator"));
                    }
                    return Ok(Expr::Num(Scalar::gaussian(BigRational::new(num, den), BigRational::zero())));
                }
                Ok(Expr::Num(Scalar::gaussian(BigRational::from_integer(num), BigRational::zero())))
            }
            Some(Tok::Float(x)) => Ok(Expr::Num(Scalar::float(x, 0.0))),
            Some(Tok::Ident(name)) => match name.as_str() {
                "i" => Ok(Expr::Num(Scalar::i())),
                "sqrt" => {
                    self.expect(Tok::LParen, "`(` after sqrt")?;
                    let n = self.uint()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Expr::Num(Scalar::sqrt_uint(n as u64)))
                }
                "O" if self.series => {
                    self.expect(Tok::LParen, "`(` after O")?;
                    let inner = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Expr::BigO(Box::new(inner), pos))
                }
                _ => Ok(Expr::Var(name)),
            },
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(_) => Err(syntax(pos, "unexpected token")),
            None => Err(syntax(pos, "unexpected end of input")),
        }
    }
}

fn parse_expr(text: &str, series: bool) -> Result<Expr> {
    let toks = lex(text)?;
    let mut p = Parser { toks: &toks, at: 0, end: text.len(), series };
    let e = p.expr()?;
    if p.at < toks.len() {
        return Err(syntax(p.pos(), "unexpected trailing input"));
    }
    Ok(e)
}

fn to_poly(e: &Expr, vars: &[String]) -> Result<Poly> {
    Ok(match e {
        Expr::Num(c) => Poly::constant(vars, c.clone()),
        Expr::Var(name) => {
            index_of(vars, name)?;
            Poly::var(vars, name)?
        }
        Expr::Add(a, b) => to_poly(a, vars)?.add(&to_poly(b, vars)?),
        Expr::Sub(a, b) => to_poly(a, vars)?.sub(&to_poly(b, vars)?),
        Expr::Mul(a, b) => to_poly(a, vars)?.mul(&to_poly(b, vars)?),
        Expr::Neg(a) => to_poly(a, vars)?.neg(),
        Expr::Pow(a, k, pos) => {
            if !k.is_integer() || *k.numer() < 0 {
                return Err(syntax(*pos, "polynomial exponents must be unsigned integers"));
            }
            to_poly(a, vars)?.pow(*k.numer() as u32)
        }
        Expr::BigO(_, pos) => return Err(syntax(*pos, "O(...) is only allowed in series")),
    })
}

fn to_series(e: &Expr) -> Result<PuiseuxSeries> {
    Ok(match e {
        Expr::Num(c) => PuiseuxSeries::constant(c.clone()),
        Expr::Var(name) => {
            if name != "t" {
                return Err(Error::UnknownVariable(name.clone()));
            }
            PuiseuxSeries::t()
        }
        Expr::Add(a, b) => to_series(a)?.add(&to_series(b)?),
        Expr::Sub(a, b) => to_series(a)?.sub(&to_series(b)?),
        Expr::Mul(a, b) => to_series(a)?.mul(&to_series(b)?),
        Expr::Neg(a) => to_series(a)?.neg(),
        Expr::Pow(a, k, pos) => {
            let s = to_series(a)?;
            if k.is_integer() && *k.numer() >= 0 {
                s.pow(*k.numer() as u32)
            } else if s.is_exact() && s.num_terms() == 1 {
                let (ex, c) = s.leading()?;
                if !c.is_one() {
                    return Err(syntax(*pos, "fractional powers apply to monomials t^e only"));
                }
                PuiseuxSeries::monomial(Scalar::one(), ex * *k)
            } else {
                return Err(syntax(*pos, "fractional powers apply to monomials t^e only"));
            }
        }
        Expr::BigO(inner, pos) => {
            let s = to_series(inner)?;
            match s.leading() {
                Ok((ex, c)) if s.is_exact() && s.num_terms() == 1 && c.is_one() => PuiseuxSeries::big_o(ex),
                _ => return Err(syntax(*pos, "O(...) takes a monomial t^e")),
            }
        }
    })
}

/// Parses a polynomial over the given variables.
pub fn parse_poly(text: &str, vars: &[String]) -> Result<Poly> {
    to_poly(&parse_expr(text, false)?, vars)
}

/// Parses a series in `t`, with optional `t^(p/q)` exponents and `O(t^e)`.
pub fn parse_series(text: &str) -> Result<PuiseuxSeries> {
    to_series(&parse_expr(text, true)?)
}

/// Parses a constant expression.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let p = parse_poly(text, &[])?;
    Ok(p.coeff(&[]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::poly::var_names;

    #[test]
    fn cusp_terms() {
        let xy = var_names(&["x", "y"]);
        let p = parse_poly("y^2 - x^3", &xy).unwrap();
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p.coeff(&[0, 2]), Scalar::one());
        assert_eq!(p.coeff(&[3, 0]), Scalar::from_int(-1));
    }

    #[test]
    fn errors() {
        let x = var_names(&["x"]);
        assert_eq!(parse_poly("x^", &x), Err(Error::Syntax { pos: 2, msg: "expected unsigned integer".into() }));
        assert_eq!(parse_poly("x + w", &x), Err(Error::UnknownVariable("w".into())));
        assert!(matches!(parse_poly("x $ 1", &x), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse_poly("(x", &x), Err(Error::Syntax { pos: 2, .. })));
    }

    #[test]
    fn constants() {
        assert_eq!(parse_scalar("3/4").unwrap(), Scalar::rational(3, 4));
        assert_eq!(parse_scalar("-(1+2*i)").unwrap().to_string(), "-1-2*i");
        assert!(!parse_scalar("sqrt(8)").unwrap().is_exact());
        assert!(parse_scalar("sqrt(9)").unwrap().is_exact());
        assert_eq!(parse_scalar("2.5").unwrap().to_c64().re, 2.5);
    }

    #[test]
    fn series_forms() {
        let s = parse_series("t^2 - 3*t^(5/2) + O(t^4)").unwrap();
        assert_eq!(s.ram(), 2);
        assert_eq!(s.trunc(), Some(Rational64::from_integer(4)));
        assert_eq!(parse_series(&s.to_string()).unwrap(), s);
        assert!(parse_series("x").is_err());
    }

    #[test]
    fn primed_identifiers() {
        let v = var_names(&["x", "x'"]);
        let p = parse_poly("x - x'", &v).unwrap();
        assert_eq!(p.coeff(&[0, 1]), Scalar::from_int(-1));
    }
}
