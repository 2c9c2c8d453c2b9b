use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use super::GadgetError;
use crate::rational::{fmt_q, Q};

/// A rational expression in `n` with `+ - * / ^` and parentheses, e.g. `1/2-2^-(n+1)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigInt),
    Var,
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn parse(s: &str) -> Result<Expr, GadgetError> {
        let toks: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut p = Parser { toks, pos: 0 };
        let e = p.sum()?;
        if p.pos != p.toks.len() {
            return Err(p.err("unexpected input"));
        }
        Ok(e)
    }

    pub fn eval(&self, n: u64) -> Result<Q, GadgetError> {
        Ok(match self {
            Expr::Num(v) => Q::from_integer(v.clone()),
            Expr::Var => Q::from_integer(BigInt::from(n)),
            Expr::Neg(e) => -e.eval(n)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(n)?, b.eval(n)?);
                match op {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    '/' => {
                        if b.is_zero() {
                            return Err(GadgetError::Expr(format!("division by zero at n = {n}")));
                        }
                        a / b
                    }
                    _ => power(&a, &b)?,
                }
            }
        })
    }

    /// `c_0, ..., c_{len-1}`.
    pub fn prefix(&self, len: usize) -> Result<Vec<Q>, GadgetError> {
        (0..len as u64).map(|n| self.eval(n)).collect()
    }
}

fn power(a: &Q, b: &Q) -> Result<Q, GadgetError> {
    if !b.is_integer() {
        return Err(GadgetError::Expr(format!("non-integer exponent {}", fmt_q(b))));
    }
    let e = b.to_integer().to_i32().filter(|e| e.abs() <= 4096);
    let Some(e) = e else {
        return Err(GadgetError::Expr(format!("exponent {} too large", fmt_q(b))));
    };
    if a.is_zero() && e < 0 {
        return Err(GadgetError::Expr("zero to a negative power".into()));
    }
    let mut r = Q::one();
    for _ in 0..e.unsigned_abs() {
        r *= a;
    }
    Ok(if e < 0 { r.recip() } else { r })
}

struct Parser {
    toks: Vec<char>,
    pos: usize,
}

impl Parser {
    fn err(&self, msg: &str) -> GadgetError {
        GadgetError::Expr(format!("{msg} at position {}", self.pos))
    }

    fn peek(&self) -> Option<char> {
        self.toks.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<Expr, GadgetError> {
        let mut e = self.product()?;
        while let Some(op @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            e = Expr::Bin(op, Box::new(e), Box::new(self.product()?));
        }
        Ok(e)
    }

    fn product(&mut self) -> Result<Expr, GadgetError> {
        let mut e = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            e = Expr::Bin(op, Box::new(e), Box::new(self.unary()?));
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Expr, GadgetError> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, GadgetError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            return Ok(Expr::Bin('^', Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, GadgetError> {
        match self.peek() {
            Some('n') => {
                self.pos += 1;
                Ok(Expr::Var)
            }
            Some('(') => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let s: String = self.toks[start..self.pos].iter().collect();
                Ok(Expr::Num(s.parse().expect("digits")))
            }
            _ => Err(self.err("expected a number, n or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn sup_sequence() {
        let e = Expr::parse("1/2-2^-(n+1)").unwrap();
        assert_eq!(e.eval(0).unwrap(), frac(0, 1));
        assert_eq!(e.eval(2).unwrap(), frac(3, 8));
        assert_eq!(Expr::parse("2^-n^2").unwrap().eval(2).unwrap(), frac(1, 16));
        assert!(Expr::parse("1/(n-n)").unwrap().eval(1).is_err());
        assert!(Expr::parse("2*").is_err());
        assert!(Expr::parse("x").is_err());
    }
}
