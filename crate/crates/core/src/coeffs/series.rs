//! Truncated one-variable power series over an exact coefficient ring.
//!
//! A series of order N stores coefficients c_0..c_{N-1}. Binary operations
//! on orders N1, N2 produce order min(N1, N2).

use num::traits::Zero;

use super::padic::{PAdic, TailBound};
use super::rational::Rational;
use crate::error::Error;

/// Coefficient ring interface shared by exact rationals and capped-precision
/// p-adics. `is_zero` means "zero as far as the known digits can tell"; over
/// the rationals that is exact.
pub trait Coeff: Clone + std::fmt::Debug + std::fmt::Display {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;
    /// Divide by a nonzero exact integer (total on both rings).
    fn div_int(&self, k: i64) -> Self;
    fn mul_int(&self, k: i64) -> Self;
    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
    /// Same ring instance (same prime for p-adics).
    fn compatible_with(&self, other: &Self) -> bool;
}

impl Coeff for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn one_like(&self) -> Self {
        num::traits::One::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn div_int(&self, k: i64) -> Self {
        assert!(k != 0);
        self / Rational::from_integer(k.into())
    }
    fn mul_int(&self, k: i64) -> Self {
        self * Rational::from_integer(k.into())
    }
    fn compatible_with(&self, _other: &Self) -> bool {
        true
    }
}

impl Coeff for PAdic {
    fn zero_like(&self) -> Self {
        PAdic::exact_zero(self.prime())
    }
    fn one_like(&self) -> Self {
        PAdic::from_int(self.prime(), 1, self.rel_prec().max(1))
    }
    fn add(&self, other: &Self) -> Self {
        PAdic::add(self, other)
    }
    fn neg(&self) -> Self {
        PAdic::neg(self)
    }
    fn mul(&self, other: &Self) -> Self {
        PAdic::mul(self, other)
    }
    fn is_zero(&self) -> bool {
        PAdic::is_zero(self)
    }
    fn div_int(&self, k: i64) -> Self {
        self.div_exact_int(k)
    }
    fn mul_int(&self, k: i64) -> Self {
        self.mul_exact_int(k)
    }
    fn compatible_with(&self, other: &Self) -> bool {
        self.prime() == other.prime()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries<C: Coeff> {
    coeffs: Vec<C>,
}

impl<C: Coeff> PowerSeries<C> {
    pub fn new(coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "series order must be at least 1");
        PowerSeries { coeffs }
    }

    pub fn zero(order: usize, sample: &C) -> Self {
        PowerSeries::new(vec![sample.zero_like(); order])
    }

    pub fn one(order: usize, sample: &C) -> Self {
        let mut c = vec![sample.zero_like(); order];
        c[0] = sample.one_like();
        PowerSeries::new(c)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, k: usize) -> &C {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order >= 1 && order <= self.order());
        PowerSeries::new(self.coeffs[..order].to_vec())
    }

    fn check_ring(&self, other: &Self) -> Result<(), Error> {
        if !self.coeffs[0].compatible_with(&other.coeffs[0]) {
            return Err(Error::RingMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        self.check_ring(other)?;
        let n = self.order().min(other.order());
        Ok(PowerSeries::new(
            (0..n).map(|k| self.coeffs[k].add(&other.coeffs[k])).collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, Error> {
        self.check_ring(other)?;
        let n = self.order().min(other.order());
        Ok(PowerSeries::new(
            (0..n).map(|k| self.coeffs[k].sub(&other.coeffs[k])).collect(),
        ))
    }

    pub fn neg(&self) -> Self {
        PowerSeries::new(self.coeffs.iter().map(|c| c.neg()).collect())
    }

    pub fn scale(&self, c: &C) -> Self {
        PowerSeries::new(self.coeffs.iter().map(|x| x.mul(c)).collect())
    }

    /// Cauchy product cut at the minimum of the two orders.
    pub fn mul(&self, other: &Self) -> Result<Self, Error> {
        self.check_ring(other)?;
        let n = self.order().min(other.order());
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n - i) {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Ok(PowerSeries::new(out))
    }

    /// Termwise antiderivative with zero constant term: c_k t^k -> c_k
    /// t^{k+1}/(k+1). Order is preserved; the top coefficient is dropped.
    pub fn integrate(&self) -> Self {
        let n = self.order();
        let mut out = Vec::with_capacity(n);
        out.push(self.coeffs[0].zero_like());
        for k in 0..n - 1 {
            out.push(self.coeffs[k].div_int(k as i64 + 1));
        }
        PowerSeries::new(out)
    }

    /// Termwise derivative; order drops by one (or stays 1 for constants).
    pub fn derivative(&self) -> Self {
        let n = self.order();
        if n == 1 {
            return PowerSeries::new(vec![self.coeffs[0].zero_like()]);
        }
        let mut out = Vec::with_capacity(n - 1);
        for k in 1..n {
            out.push(self.coeffs[k].mul_int(k as i64));
        }
        PowerSeries::new(out)
    }

    /// Shift down by one power of t; the constant term must be zero.
    pub fn div_by_t(&self) -> Result<Self, Error> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.order();
        if n == 1 {
            return Ok(PowerSeries::new(vec![self.coeffs[0].zero_like()]));
        }
        Ok(PowerSeries::new(self.coeffs[1..].to_vec()))
    }
}

impl PowerSeries<Rational> {
    /// Exact polynomial evaluation of the truncation at a rational point.
    pub fn eval_truncated(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn to_padic(&self, p: u64, prec: u32) -> PowerSeries<PAdic> {
        PowerSeries::new(
            self.coeffs
                .iter()
                .map(|c| PAdic::from_rational(p, c, prec))
                .collect(),
        )
    }
}

impl PowerSeries<PAdic> {
    /// Evaluate at a point of the open unit residue disk (v_p(x) >= 1) with
    /// an explicit absolute-precision certificate covering both the
    /// truncation tail and the accumulated coefficient precision.
    pub fn eval_disk(&self, x: &PAdic, mode: TailBound) -> Result<PAdic, Error> {
        let p = self.coeffs[0].prime();
        if x.prime() != p {
            return Err(Error::PrimeMismatch(p, x.prime()));
        }
        if x.is_exact_zero() {
            return Ok(self.coeffs[0].clone());
        }
        if self.coeffs.iter().all(|c| c.is_exact_zero()) {
            return Ok(PAdic::exact_zero(p));
        }
        let vx = x.valuation_lower_bound().unwrap_or(i64::MAX);
        if vx < 1 {
            return Err(Error::PointOutsideDisk);
        }
        // Horner
        let mut acc = PAdic::exact_zero(p);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        let n = self.order() as i64;
        let tail = match mode {
            TailBound::Integral => n * vx,
            TailBound::LogGrowth(d) => n * vx - (d as i64) * floor_log(p, n as u64),
        };
        let out = acc.cap_abs_prec(tail);
        match out.abs_prec() {
            Some(abs) if abs <= 0 && out.is_zero() => Err(Error::PrecisionExhausted(
                "evaluation certificate collapsed to zero digits".into(),
            )),
            _ => Ok(out),
        }
    }
}

fn floor_log(p: u64, n: u64) -> i64 {
    let mut v = 0;
    let mut acc = p;
    while acc <= n {
        v += 1;
        acc = acc.saturating_mul(p);
    }
    v
}

impl<C: Coeff> std::fmt::Display for PowerSeries<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k == 0 {
                write!(f, "{}", c)?;
            } else {
                write!(f, "({})*t^{}", c, k)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.order())
    }
}
