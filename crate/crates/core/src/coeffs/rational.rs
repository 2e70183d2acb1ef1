//! Exact rational scalars. `num::BigRational` already keeps the fraction
//! reduced with a positive denominator, which is exactly the invariant we
//! need, so this module only adds parsing and canonical rendering.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// Parse "3", "-3", "3/4", "-3/4". Whitespace around tokens is rejected;
/// callers strip it.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let mut parts = text.splitn(2, '/');
    let num: BigInt = parts.next()?.parse().ok()?;
    match parts.next() {
        None => Some(Rational::from_integer(num)),
        Some(d) => {
            let den: BigInt = d.parse().ok()?;
            if den.is_zero() {
                None
            } else {
                Some(Rational::new(num, den))
            }
        }
    }
}

/// Canonical text form: integers as "n", everything else as "n/d".
pub fn render_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// p-adic valuation of a nonzero rational.
pub fn rational_valuation(p: u64, x: &Rational) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(int_valuation(p, x.numer()) - int_valuation(p, x.denom()))
}

/// Exponent of p in a nonzero integer.
pub fn int_valuation(p: u64, n: &BigInt) -> i64 {
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = (n.clone() / &p, n.clone() % &p);
        if r.is_zero() {
            n = q;
            v += 1;
        } else {
            return v;
        }
    }
}
