//! ASCII arithmetic expressions: integers, symbols, `+ - * / ^` and parentheses.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact::{Elem, GaussDyadic, Ground, MonomialPoly, RatFunc};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(BigInt),
    Sym(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Sym(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut k = 0;
    while k < cs.len() {
        let c = cs[k];
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() {
            let start = k;
            while k < cs.len() && cs[k].is_ascii_digit() {
                k += 1;
            }
            let lit: String = cs[start..k].iter().collect();
            out.push(Tok::Int(lit.parse().expect("digits")));
        } else if c.is_alphabetic() || c == '_' {
            let start = k;
            while k < cs.len() && (cs[k].is_alphanumeric() || cs[k] == '_') {
                k += 1;
            }
            out.push(Tok::Sym(cs[start..k].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            k += 1;
        } else {
            return Err(Error::Expr(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
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
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                let n: i32 = n
                    .try_into()
                    .map_err(|_| Error::Expr("exponent too large".into()))?;
                Ok(Expr::Pow(Box::new(base), if neg { -n } else { n }))
            }
            _ => Err(Error::Expr("exponent must be an integer literal".into())),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Some(Tok::Sym(s)) => {
                self.pos += 1;
                Ok(Expr::Sym(s))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Expr("missing ')'".into()));
                }
                Ok(e)
            }
            t => Err(Error::Expr(format!("unexpected token {t:?}"))),
        }
    }
}

pub fn parse(s: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: lex(s)?,
        pos: 0,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Expr(format!("trailing input in {s:?}")));
    }
    Ok(e)
}

impl Expr {
    pub fn eval(&self, ground: &Ground) -> Result<Elem> {
        Ok(match self {
            Expr::Int(n) => match ground {
                Ground::Rational { vars } => Elem::Rat(RatFunc::from_poly(MonomialPoly::constant(
                    vars.len(),
                    n.clone(),
                ))),
                Ground::Gaussian => Elem::Gauss(GaussDyadic::from_int(n.clone())),
            },
            Expr::Sym(s) => {
                let j = ground
                    .symbol_index(s)
                    .ok_or_else(|| Error::Expr(format!("unknown symbol {s:?}")))?;
                ground.symbol(j)
            }
            Expr::Neg(a) => a.eval(ground)?.neg(),
            Expr::Add(a, b) => a.eval(ground)?.add(&b.eval(ground)?),
            Expr::Sub(a, b) => a.eval(ground)?.sub(&b.eval(ground)?),
            Expr::Mul(a, b) => a.eval(ground)?.mul(&b.eval(ground)?),
            Expr::Div(a, b) => a.eval(ground)?.div(&b.eval(ground)?)?,
            Expr::Pow(a, n) => a.eval(ground)?.pow(*n)?,
        })
    }
}

/// Parses and evaluates in one step.
pub fn eval_str(s: &str, ground: &Ground) -> Result<Elem> {
    parse(s)?.eval(ground)
}
