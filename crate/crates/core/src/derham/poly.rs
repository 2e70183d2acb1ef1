//! Dense univariate polynomials over the exact rationals.

use num::bigint::BigInt;
use num::traits::{One, Zero};

use crate::coeffs::Rational;

/// Coefficients c_0..c_d, normalized so the top coefficient is nonzero;
/// the zero polynomial stores an empty vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn from_int(n: i64) -> Self {
        Poly::constant(Rational::from_integer(BigInt::from(n)))
    }

    /// The monomial z.
    pub fn var() -> Self {
        Poly::new(vec![Rational::zero(), Rational::one()])
    }

    /// z - a.
    pub fn linear(a: &Rational) -> Self {
        Poly::new(vec![-a.clone(), Rational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + other.coeff(k));
        }
        Poly::new(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Euclidean division; divisor must be nonzero.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let dd = divisor.degree().unwrap();
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        let mut quo = vec![
            Rational::zero();
            self.coeffs.len().saturating_sub(divisor.coeffs.len()) + 1
        ];
        while rem.len() > dd || (rem.len() == dd + 1 && dd == 0 && !rem.is_empty()) {
            if rem.len() < dd + 1 {
                break;
            }
            let k = rem.len() - 1 - dd;
            let factor = rem.last().unwrap() / &lead;
            if factor.is_zero() {
                rem.pop();
                continue;
            }
            quo[k] = factor.clone();
            for (j, b) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &factor * b;
            }
            while rem.last().map_or(false, |c| c.is_zero()) {
                rem.pop();
            }
            if rem.len() <= dd {
                break;
            }
        }
        (Poly::new(quo), Poly::new(rem))
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Scale so the leading coefficient is 1 (zero stays zero).
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => self.scale(&(Rational::one() / l)),
        }
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k as i64 + 1)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Substitute z = a + t, returning coefficients in t.
    pub fn shift(&self, a: &Rational) -> Poly {
        // Horner in (t + a)
        let mut acc = Poly::zero();
        let lin = Poly::new(vec![a.clone(), Rational::one()]);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(c.clone()));
        }
        acc
    }

    /// Multiplicity of the root a.
    pub fn root_multiplicity(&self, a: &Rational) -> u32 {
        let mut p = self.clone();
        let lin = Poly::linear(a);
        let mut k = 0;
        while !p.is_zero() && p.eval(a).is_zero() {
            let (q, r) = p.div_rem(&lin);
            debug_assert!(r.is_zero());
            p = q;
            k += 1;
        }
        k
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let cs = crate::coeffs::render_rational(c);
            let term = match k {
                0 => cs,
                1 if c.is_one() => "z".to_string(),
                1 => format!("{}*z", cs),
                _ if c.is_one() => format!("z^{}", k),
                _ => format!("{}*z^{}", cs, k),
            };
            parts.push(term);
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn div_rem_round_trip() {
        let a = Poly::new(vec![rat(1, 1), rat(0, 1), rat(2, 1), rat(3, 1)]);
        let b = Poly::new(vec![rat(-1, 1), rat(1, 1)]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().unwrap_or(0) < b.degree().unwrap());
    }

    #[test]
    fn gcd_of_shared_factor() {
        let f = Poly::linear(&rat(2, 1)).mul(&Poly::linear(&rat(3, 1)));
        let g = Poly::linear(&rat(2, 1)).mul(&Poly::linear(&rat(5, 1)));
        assert_eq!(f.gcd(&g), Poly::linear(&rat(2, 1)));
    }

    #[test]
    fn shift_and_eval() {
        // (z^2)(z = 1 + t) = 1 + 2t + t^2
        let p = Poly::var().pow(2);
        let s = p.shift(&rat(1, 1));
        assert_eq!(s.coeffs(), &[rat(1, 1), rat(2, 1), rat(1, 1)]);
        assert_eq!(p.eval(&rat(3, 1)), rat(9, 1));
    }

    #[test]
    fn multiplicity() {
        let p = Poly::linear(&rat(1, 1)).pow(3).mul(&Poly::linear(&rat(0, 1)));
        assert_eq!(p.root_multiplicity(&rat(1, 1)), 3);
        assert_eq!(p.root_multiplicity(&rat(0, 1)), 1);
        assert_eq!(p.root_multiplicity(&rat(7, 1)), 0);
    }
}
