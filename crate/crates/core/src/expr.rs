//! Expressions for field elements and t-polynomials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' int)?
//! atom   := int | 'th' | 'z' | 'pi' | 't' | '(' expr ')'
//! ```
//! Exponents may be negative. `t` is only accepted in polynomial context.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, LocalElement};
use crate::poly::TPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Context {
    Field,
    TPoly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(u64),
    Theta,
    Zeta,
    Pi,
    T,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(u64),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            let n = s[st..i]
                .parse()
                .map_err(|_| Error::Syntax { position: st, message: "integer literal too large".into() })?;
            out.push((st, Tok::Int(n)));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < b.len() && b[i].is_ascii_alphabetic() {
                i += 1;
            }
            out.push((st, Tok::Ident(s[st..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Syntax { position: i, message: format!("unexpected character {c:?}") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    at: usize,
    end: usize,
    ctx: Context,
}

impl Parser<'_> {
    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { position: self.pos(), message: message.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = i64::try_from(*n).or_else(|_| self.err("exponent too large"))?;
                self.at += 1;
                Ok(Expr::Pow(Box::new(base), if neg { -n } else { n }))
            }
            _ => self.err("expected an integer exponent"),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        let e = match self.peek() {
            Some(Tok::Int(n)) => Expr::Int(*n),
            Some(Tok::Ident(id)) => match id.as_str() {
                "th" => Expr::Theta,
                "z" => Expr::Zeta,
                "pi" => Expr::Pi,
                "t" if self.ctx == Context::TPoly => Expr::T,
                "t" => return Err(Error::Context("t".into())),
                other => return Err(Error::Syntax { position: pos, message: format!("unknown name {other:?}") }),
            },
            Some(Tok::Op('(')) => {
                self.at += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                return Ok(e);
            }
            Some(_) => return self.err("expected a number, name or '('"),
            None => return self.err("unexpected end of input"),
        };
        self.at += 1;
        Ok(e)
    }
}

pub fn parse(text: &str, ctx: Context) -> Result<Expr> {
    let toks = lex(text)?;
    let mut p = Parser { toks: &toks, at: 0, end: text.len(), ctx };
    let e = p.expr()?;
    if p.at != toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    pub fn uses_t(&self) -> bool {
        match self {
            Expr::T => true,
            Expr::Int(_) | Expr::Theta | Expr::Zeta | Expr::Pi => false,
            Expr::Neg(a) | Expr::Pow(a, _) => a.uses_t(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.uses_t() || b.uses_t(),
        }
    }

    pub fn eval_element(&self, field: &Field) -> Result<LocalElement> {
        Ok(match self {
            Expr::Int(n) => LocalElement::from_int(field, (*n % field.p as u64) as i64),
            Expr::Theta => LocalElement::theta(field),
            Expr::Zeta => LocalElement::zeta(field),
            Expr::Pi => LocalElement::pi(field),
            Expr::T => return Err(Error::Context("t".into())),
            Expr::Neg(a) => a.eval_element(field)?.neg_ref(),
            Expr::Add(a, b) => a.eval_element(field)?.add_ref(&b.eval_element(field)?),
            Expr::Sub(a, b) => a.eval_element(field)?.sub_ref(&b.eval_element(field)?),
            Expr::Mul(a, b) => a.eval_element(field)?.mul_ref(&b.eval_element(field)?),
            Expr::Div(a, b) => a.eval_element(field)?.div(&b.eval_element(field)?)?,
            Expr::Pow(a, n) => a.eval_element(field)?.pow(*n)?,
        })
    }

    pub fn eval_poly(&self, field: &Field) -> Result<TPoly> {
        Ok(match self {
            Expr::T => TPoly::t(field),
            Expr::Neg(a) => a.eval_poly(field)?.neg(),
            Expr::Add(a, b) => a.eval_poly(field)?.add(&b.eval_poly(field)?),
            Expr::Sub(a, b) => a.eval_poly(field)?.sub(&b.eval_poly(field)?),
            Expr::Mul(a, b) => a.eval_poly(field)?.mul(&b.eval_poly(field)?),
            Expr::Div(a, b) => {
                let d = b.eval_poly(field)?;
                if d.degree().unwrap_or(0) > 0 {
                    return Err(Error::NonInvertible);
                }
                let c = d.coeff(0);
                a.eval_poly(field)?.scale(&c.inv()?)
            }
            Expr::Pow(a, n) if a.uses_t() => {
                let n = u32::try_from(*n).map_err(|_| Error::NonInvertible)?;
                a.eval_poly(field)?.pow(n)
            }
            other => TPoly::constant(other.eval_element(field)?),
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // right operands of - and / need parentheses at equal precedence
        let side = |f: &mut fmt::Formatter<'_>, e: &Expr, min: u8| {
            if e.prec() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Theta => f.write_str("th"),
            Expr::Zeta => f.write_str("z"),
            Expr::Pi => f.write_str("pi"),
            Expr::T => f.write_str("t"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                side(f, a, 3)
            }
            Expr::Add(a, b) => {
                side(f, a, 1)?;
                f.write_str(" + ")?;
                side(f, b, 2)
            }
            Expr::Sub(a, b) => {
                side(f, a, 1)?;
                f.write_str(" - ")?;
                side(f, b, 2)
            }
            Expr::Mul(a, b) => {
                side(f, a, 2)?;
                f.write_str("*")?;
                side(f, b, 3)
            }
            Expr::Div(a, b) => {
                side(f, a, 2)?;
                f.write_str("/")?;
                side(f, b, 3)
            }
            Expr::Pow(a, n) => {
                side(f, a, 5)?;
                write!(f, "^{n}")
            }
        }
    }
}

pub fn parse_element(field: &Field, text: &str) -> Result<LocalElement> {
    parse(text, Context::Field)?.eval_element(field)
}

pub fn parse_tpoly(field: &Field, text: &str) -> Result<TPoly> {
    parse(text, Context::TPoly)?.eval_poly(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldConfig;
    use proptest::prelude::*;

    #[test]
    fn precedence_and_associativity() {
        let e = parse("1 - 2 - th*z^2/pi", Context::Field).unwrap();
        assert_eq!(e.to_string(), "1 - 2 - th*z^2/pi");
        let e = parse("1 - (2 - th)", Context::Field).unwrap();
        assert!(matches!(e, Expr::Sub(_, ref r) if matches!(**r, Expr::Sub(..))));
    }

    #[test]
    fn negative_exponent_of_zeta() {
        let f = FieldConfig::default_field();
        let x = parse_element(&f, "z^-1").unwrap();
        assert_eq!(x, LocalElement::monomial(&f, 1, 1));
    }

    #[test]
    fn unit_inversion_is_inexact() {
        let f = FieldConfig::default_field();
        let x = parse_element(&f, "1/(th+1)").unwrap();
        assert_eq!(x.prec(), f.default_prec);
        let back = x.mul_ref(&parse_element(&f, "th + 1").unwrap());
        assert!(back.sub_ref(&LocalElement::one(&f)).is_zero());
    }

    #[test]
    fn polynomial_context() {
        let f = FieldConfig::default_field();
        let p = parse_tpoly(&f, "t^2 + th*t").unwrap();
        assert_eq!(p.coeffs(), &[LocalElement::zero(&f), LocalElement::theta(&f), LocalElement::one(&f)]);
        assert_eq!(parse("t + 1", Context::Field).unwrap_err(), Error::Context("t".into()));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert!(matches!(parse("1 + ", Context::Field), Err(Error::Syntax { position: 4, .. })));
        assert!(matches!(parse("th $ 2", Context::Field), Err(Error::Syntax { position: 3, .. })));
        assert!(matches!(parse("(1", Context::Field), Err(Error::Syntax { .. })));
        assert!(matches!(parse("foo", Context::Field), Err(Error::Syntax { position: 0, .. })));
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0u64..20).prop_map(Expr::Int),
            Just(Expr::Theta),
            Just(Expr::Zeta),
            Just(Expr::Pi),
            Just(Expr::T),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
                (inner, -3i64..4).prop_map(|(a, n)| Expr::Pow(Box::new(a), n)),
            ]
        })
    }

    proptest! {
        #[test]
        fn parse_inverts_print(e in arb_expr()) {
            prop_assert_eq!(parse(&e.to_string(), Context::TPoly).unwrap(), e);
        }
    }
}
