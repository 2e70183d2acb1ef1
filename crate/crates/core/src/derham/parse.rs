//! Recursive-descent parser for rational-function expressions in z.
//!
//! Grammar (whitespace insignificant, standard precedence):
//!   expr   := term (('+' | '-') term)*
//!   term   := factor (('*' | '/') factor)*
//!   factor := ('-' | '+')* atom ('^' uint)*
//!   atom   := uint | 'z' | '(' expr ')'
//!
//! Rational literals like 1/2 come out of the division operator, so they
//! need no special lexing.

use num::bigint::BigInt;

use crate::coeffs::Rational;
use crate::{Error, Result};

use super::poly::Poly;
use super::ratfunc::RatFunc;

pub fn parse_ratfunc(text: &str) -> Result<RatFunc> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let f = p.expr()?;
    p.skip_ws();
    if p.pos < p.bytes.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let op_pos = self.pos;
                    let rhs = self.factor()?;
                    acc = acc.div(&rhs).map_err(|_| Error::Parse {
                        pos: op_pos,
                        msg: "division by the zero polynomial".to_string(),
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RatFunc> {
        self.skip_ws();
        let mut sign = false;
        while let Some(c) = self.peek() {
            match c {
                b'-' => {
                    sign = !sign;
                    self.pos += 1;
                    self.skip_ws();
                }
                b'+' => {
                    self.pos += 1;
                    self.skip_ws();
                }
                _ => break,
            }
        }
        let mut base = self.atom()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'^') {
                self.pos += 1;
                self.skip_ws();
                let e = self.uint()?;
                let e: u32 = e
                    .to_string()
                    .parse()
                    .map_err(|_| self.err("exponent too large"))?;
                base = base.pow(e);
            } else {
                break;
            }
        }
        Ok(if sign { base.neg() } else { base })
    }

    fn atom(&mut self) -> Result<RatFunc> {
        self.skip_ws();
        match self.peek() {
            Some(b'z') => {
                self.pos += 1;
                Ok(RatFunc::var())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.uint()?;
                Ok(RatFunc::from_poly(Poly::constant(Rational::from_integer(n))))
            }
            Some(_) => Err(self.err("expected a number, 'z', or '('")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn uint(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.peek().map_or(false, |c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a nonnegative integer"));
        }
        let s = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        Ok(s.parse().expect("digits parse as BigInt"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn z_squared_over_z_minus_one() {
        let f = parse_ratfunc("z^2/(z-1)").unwrap();
        assert_eq!(f.num(), &Poly::var().pow(2));
        assert_eq!(f.den(), &Poly::linear(&rat(1, 1)));
    }

    #[test]
    fn product_denominator() {
        let f = parse_ratfunc("1/(z*(z-1))").unwrap();
        assert_eq!(f.num(), &Poly::one());
        assert_eq!(f.den(), &Poly::var().mul(&Poly::linear(&rat(1, 1))));
    }

    #[test]
    fn normalizes_rational_coefficients() {
        // (1/2)*z + 3 = (z + 6)/2
        let f = parse_ratfunc("(1/2)*z + 3").unwrap();
        assert!(f.is_polynomial());
        assert_eq!(f.num().coeffs(), &[rat(3, 1), rat(1, 2)]);
    }

    #[test]
    fn unary_minus_and_whitespace() {
        let f = parse_ratfunc("  - z ^ 2 + z*z ").unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn precedence_mul_over_add_pow_over_mul() {
        let f = parse_ratfunc("1+2*z^2").unwrap();
        assert_eq!(f.num().coeffs(), &[rat(1, 1), rat(0, 1), rat(2, 1)]);
    }

    #[test]
    fn syntax_error_carries_position() {
        let e = parse_ratfunc("z +* 2").unwrap_err();
        match e {
            Error::Parse { pos, .. } => assert_eq!(pos, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn zero_polynomial_division_rejected() {
        let e = parse_ratfunc("1/(z - z)").unwrap_err();
        match e {
            Error::Parse { msg, .. } => assert!(msg.contains("zero polynomial")),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn trailing_garbage_rejected() {
        assert!(parse_ratfunc("z + 1 )").is_err());
        assert!(parse_ratfunc("").is_err());
    }
}
