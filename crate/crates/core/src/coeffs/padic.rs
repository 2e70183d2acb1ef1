//! Capped-precision p-adic scalars.
//!
//! A nonzero value is stored as p^val * unit with the unit known modulo
//! p^prec (relative precision). Arithmetic never reports more digits than
//! the ultrametric laws allow. Cancellation in addition can leave a value
//! about which only an upper bound is known; that state is kept explicit
//! as `ZeroToPrec` rather than silently promoted to zero.

use num::bigint::BigInt;
use num::traits::{One, Signed, Zero};

use super::rational::{int_valuation, Rational};
use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Repr {
    /// The exact zero of the field (valuation +infinity).
    ExactZero,
    /// Known only to satisfy x = O(p^abs): no digit information at all.
    ZeroToPrec { abs: i64 },
    /// x = p^val * unit with unit invertible mod p, 0 < unit < p^prec, prec >= 1.
    Unit { val: i64, unit: BigInt, prec: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PAdic {
    p: u64,
    repr: Repr,
}

/// Caller-declared coefficient growth assumption used to certify the
/// truncation tail when evaluating a series on the open unit disk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailBound {
    /// All coefficients are p-adically integral: v_p(c_k) >= 0.
    Integral,
    /// Iterated-integral growth of length d: each of the d nested
    /// integrations can divide by at most k, so
    /// v_p(c_k) >= -d*floor(log_p k).
    LogGrowth(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Mul,
    Div,
}

impl PAdic {
    pub fn exact_zero(p: u64) -> Self {
        PAdic {
            p,
            repr: Repr::ExactZero,
        }
    }

    pub fn zero_to_prec(p: u64, abs: i64) -> Self {
        PAdic {
            p,
            repr: Repr::ZeroToPrec { abs },
        }
    }

    pub fn from_bigint(p: u64, n: &BigInt, prec: u32) -> Self {
        if n.is_zero() || prec == 0 {
            return if n.is_zero() {
                Self::exact_zero(p)
            } else {
                Self::zero_to_prec(p, int_valuation(p, n))
            };
        }
        let val = int_valuation(p, n);
        let unit = n / pow_p(p, val as u32);
        PAdic {
            p,
            repr: Repr::Unit {
                val,
                unit: reduce_mod(&unit, p, prec),
                prec,
            },
        }
    }

    pub fn from_int(p: u64, n: i64, prec: u32) -> Self {
        Self::from_bigint(p, &BigInt::from(n), prec)
    }

    pub fn from_rational(p: u64, x: &Rational, prec: u32) -> Self {
        if x.is_zero() {
            return Self::exact_zero(p);
        }
        let vn = int_valuation(p, x.numer());
        let vd = int_valuation(p, x.denom());
        if prec == 0 {
            return Self::zero_to_prec(p, vn - vd);
        }
        let un = x.numer() / pow_p(p, vn as u32);
        let ud = x.denom() / pow_p(p, vd as u32);
        let m = pow_p(p, prec);
        let unit = reduce_mod(&(reduce_mod(&un, p, prec) * mod_inverse(&ud, &m)), p, prec);
        PAdic {
            p,
            repr: Repr::Unit {
                val: vn - vd,
                unit,
                prec,
            },
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::ExactZero)
    }

    /// Zero as far as the known digits can tell.
    pub fn is_zero(&self) -> bool {
        !matches!(self.repr, Repr::Unit { .. })
    }

    /// Lower bound on the valuation (None = +infinity).
    pub fn valuation_lower_bound(&self) -> Option<i64> {
        match &self.repr {
            Repr::ExactZero => None,
            Repr::ZeroToPrec { abs } => Some(*abs),
            Repr::Unit { val, .. } => Some(*val),
        }
    }

    /// Exact valuation when a leading digit is known.
    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Unit { val, .. } => Some(*val),
            _ => None,
        }
    }

    /// Number of known digits of the unit (relative precision).
    pub fn rel_prec(&self) -> u32 {
        match &self.repr {
            Repr::Unit { prec, .. } => *prec,
            _ => 0,
        }
    }

    /// Absolute precision: the value is known modulo p^abs (None = exact).
    pub fn abs_prec(&self) -> Option<i64> {
        match &self.repr {
            Repr::ExactZero => None,
            Repr::ZeroToPrec { abs } => Some(*abs),
            Repr::Unit { val, prec, .. } => Some(val + *prec as i64),
        }
    }

    /// The unit part reduced mod p^prec, when digits are known.
    pub fn unit(&self) -> Option<&BigInt> {
        match &self.repr {
            Repr::Unit { unit, .. } => Some(unit),
            _ => None,
        }
    }

    /// Base-p digits of the unit, least significant first, length rel_prec.
    pub fn digits(&self) -> Vec<u64> {
        match &self.repr {
            Repr::Unit { unit, prec, .. } => {
                let p = BigInt::from(self.p);
                let mut u = unit.clone();
                let mut out = Vec::with_capacity(*prec as usize);
                for _ in 0..*prec {
                    let d = (&u % &p).to_u64_digits().1;
                    out.push(if d.is_empty() { 0 } else { d[0] });
                    u /= &p;
                }
                out
            }
            _ => Vec::new(),
        }
    }

    pub fn arith(a: &PAdic, b: &PAdic, op: BinOp) -> Result<PAdic, Error> {
        if a.p != b.p {
            return Err(Error::PrimeMismatch(a.p, b.p));
        }
        match op {
            BinOp::Add => Ok(a.add(b)),
            BinOp::Mul => Ok(a.mul(b)),
            BinOp::Div => a.div(b),
        }
    }

    pub fn add(&self, other: &PAdic) -> PAdic {
        assert_eq!(self.p, other.p, "prime mismatch");
        let p = self.p;
        match (&self.repr, &other.repr) {
            (Repr::ExactZero, _) => other.clone(),
            (_, Repr::ExactZero) => self.clone(),
            (Repr::ZeroToPrec { abs: a }, Repr::ZeroToPrec { abs: b }) => {
                PAdic::zero_to_prec(p, (*a).min(*b))
            }
            (Repr::ZeroToPrec { abs }, Repr::Unit { val, unit, prec })
            | (Repr::Unit { val, unit, prec }, Repr::ZeroToPrec { abs }) => {
                // the unknown part obscures digits of the unit from p^abs on
                let keep = *abs - *val;
                if keep <= 0 {
                    PAdic::zero_to_prec(p, (*abs).min(*val))
                } else {
                    let keep = (keep as u32).min(*prec);
                    PAdic {
                        p,
                        repr: Repr::Unit {
                            val: *val,
                            unit: reduce_mod(unit, p, keep),
                            prec: keep,
                        },
                    }
                }
            }
            (
                Repr::Unit {
                    val: va,
                    unit: ua,
                    prec: ra,
                },
                Repr::Unit {
                    val: vb,
                    unit: ub,
                    prec: rb,
                },
            ) => {
                let v = (*va).min(*vb);
                let abs = (va + *ra as i64).min(vb + *rb as i64);
                let m_exp = abs - v;
                if m_exp <= 0 {
                    return PAdic::zero_to_prec(p, abs);
                }
                let s = ua * pow_p(p, (va - v) as u32) + ub * pow_p(p, (vb - v) as u32);
                let s = reduce_mod(&s, p, m_exp as u32);
                if s.is_zero() {
                    return PAdic::zero_to_prec(p, abs);
                }
                let k = int_valuation(p, &s);
                if k >= m_exp {
                    return PAdic::zero_to_prec(p, abs);
                }
                let unit = &s / pow_p(p, k as u32);
                let prec = (m_exp - k) as u32;
                PAdic {
                    p,
                    repr: Repr::Unit {
                        val: v + k,
                        unit: reduce_mod(&unit, p, prec),
                        prec,
                    },
                }
            }
        }
    }

    pub fn neg(&self) -> PAdic {
        match &self.repr {
            Repr::Unit { val, unit, prec } => PAdic {
                p: self.p,
                repr: Repr::Unit {
                    val: *val,
                    unit: reduce_mod(&(-unit), self.p, *prec),
                    prec: *prec,
                },
            },
            _ => self.clone(),
        }
    }

    pub fn sub(&self, other: &PAdic) -> PAdic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PAdic) -> PAdic {
        assert_eq!(self.p, other.p, "prime mismatch");
        let p = self.p;
        match (&self.repr, &other.repr) {
            (Repr::ExactZero, _) | (_, Repr::ExactZero) => PAdic::exact_zero(p),
            (Repr::ZeroToPrec { abs: a }, Repr::ZeroToPrec { abs: b }) => {
                PAdic::zero_to_prec(p, a + b)
            }
            (Repr::ZeroToPrec { abs }, Repr::Unit { val, .. })
            | (Repr::Unit { val, .. }, Repr::ZeroToPrec { abs }) => {
                PAdic::zero_to_prec(p, abs + val)
            }
            (
                Repr::Unit {
                    val: va,
                    unit: ua,
                    prec: ra,
                },
                Repr::Unit {
                    val: vb,
                    unit: ub,
                    prec: rb,
                },
            ) => {
                let prec = (*ra).min(*rb);
                PAdic {
                    p,
                    repr: Repr::Unit {
                        val: va + vb,
                        unit: reduce_mod(&(ua * ub), p, prec),
                        prec,
                    },
                }
            }
        }
    }

    pub fn div(&self, other: &PAdic) -> Result<PAdic, Error> {
        assert_eq!(self.p, other.p, "prime mismatch");
        let p = self.p;
        match (&self.repr, &other.repr) {
            (_, Repr::ExactZero) => Err(Error::DivisionByZero),
            (_, Repr::ZeroToPrec { .. }) => Err(Error::PrecisionExhausted(
                "divisor has no known digits".into(),
            )),
            (Repr::ExactZero, _) => Ok(PAdic::exact_zero(p)),
            (Repr::ZeroToPrec { abs }, Repr::Unit { val, .. }) => {
                Ok(PAdic::zero_to_prec(p, abs - val))
            }
            (
                Repr::Unit {
                    val: va,
                    unit: ua,
                    prec: ra,
                },
                Repr::Unit {
                    val: vb,
                    unit: ub,
                    prec: rb,
                },
            ) => {
                let prec = (*ra).min(*rb);
                let m = pow_p(p, prec);
                let inv = mod_inverse(&reduce_mod(ub, p, prec), &m);
                Ok(PAdic {
                    p,
                    repr: Repr::Unit {
                        val: va - vb,
                        unit: reduce_mod(&(ua * inv), p, prec),
                        prec,
                    },
                })
            }
        }
    }

    /// Divide by a nonzero exact integer, then cap the relative precision by
    /// v_p(k): the precision law for termwise integration.
    pub fn div_exact_int(&self, k: i64) -> PAdic {
        assert!(k != 0);
        let loss = int_valuation(self.p, &BigInt::from(k)) as u32;
        let q = Rational::new(BigInt::one(), BigInt::from(k));
        let kinv = PAdic::from_rational(self.p, &q, self.rel_prec().max(loss) + 1);
        let exact = self.mul(&kinv);
        exact.cap_rel_prec(self.rel_prec().saturating_sub(loss))
    }

    pub fn mul_exact_int(&self, k: i64) -> PAdic {
        if k == 0 {
            return PAdic::exact_zero(self.p);
        }
        let kp = PAdic::from_bigint(self.p, &BigInt::from(k), self.rel_prec().max(1));
        self.mul(&kp)
    }

    /// Forget digits beyond the given relative precision.
    pub fn cap_rel_prec(&self, prec: u32) -> PAdic {
        match &self.repr {
            Repr::Unit { val, unit, prec: r } if *r > prec => {
                if prec == 0 {
                    PAdic::zero_to_prec(self.p, *val)
                } else {
                    PAdic {
                        p: self.p,
                        repr: Repr::Unit {
                            val: *val,
                            unit: reduce_mod(unit, self.p, prec),
                            prec,
                        },
                    }
                }
            }
            _ => self.clone(),
        }
    }

    /// Forget everything from p^abs on.
    pub fn cap_abs_prec(&self, abs: i64) -> PAdic {
        match &self.repr {
            Repr::ExactZero => PAdic::zero_to_prec(self.p, abs),
            Repr::ZeroToPrec { abs: a } => PAdic::zero_to_prec(self.p, (*a).min(abs)),
            Repr::Unit { val, prec, .. } => {
                if abs <= *val {
                    PAdic::zero_to_prec(self.p, abs)
                } else {
                    let keep = ((abs - val) as u32).min(*prec);
                    self.cap_rel_prec(keep)
                }
            }
        }
    }

    /// Do the two values agree on every digit both of them report?
    pub fn agrees_with(&self, other: &PAdic) -> bool {
        if self.p != other.p {
            return false;
        }
        let d = self.sub(other);
        d.is_zero()
    }
}

impl std::fmt::Display for PAdic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.repr {
            Repr::ExactZero => write!(f, "0"),
            Repr::ZeroToPrec { abs } => write!(f, "O({}^{})", self.p, abs),
            Repr::Unit { val, unit, prec } => {
                write!(f, "{}*{}^{} + O({}^{})", unit, self.p, val, self.p, val + *prec as i64)
            }
        }
    }
}

fn pow_p(p: u64, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

fn reduce_mod(n: &BigInt, p: u64, prec: u32) -> BigInt {
    let m = pow_p(p, prec);
    let r = n % &m;
    if r.is_negative() {
        r + m
    } else {
        r
    }
}

/// Inverse of u modulo m via extended Euclid; u must be invertible.
fn mod_inverse(u: &BigInt, m: &BigInt) -> BigInt {
    let e = num::integer::Integer::extended_gcd(u, m);
    assert!(e.gcd.is_one(), "non-invertible element mod p^r");
    let r = e.x % m;
    if r.is_negative() {
        r + m
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_with_carry_to_higher_valuation() {
        // 5 + 20 = 25: valuation jumps to 2
        let a = PAdic::from_int(5, 5, 6);
        let b = PAdic::from_int(5, 20, 6);
        let s = PAdic::arith(&a, &b, BinOp::Add).unwrap();
        assert_eq!(s.valuation(), Some(2));
        assert_eq!(s.unit().unwrap(), &BigInt::one());
    }

    #[test]
    fn mul_min_precision_law() {
        let a = PAdic::from_int(3, 1, 4);
        let b = PAdic::from_int(3, 1, 2);
        let m = PAdic::arith(&a, &b, BinOp::Mul).unwrap();
        assert_eq!(m.rel_prec(), 2);
        assert_eq!(m.valuation(), Some(0));
    }

    #[test]
    fn div_matches_modular_inverse_oracle() {
        // oracle: extended Euclid gives 3*5 = 15 = 1 mod 7
        let a = PAdic::from_int(7, 1, 1);
        let b = PAdic::from_int(7, 3, 1);
        let q = PAdic::arith(&a, &b, BinOp::Div).unwrap();
        assert_eq!(q.unit().unwrap(), &BigInt::from(5));
        assert_eq!(q.rel_prec(), 1);
    }

    #[test]
    fn prime_mismatch_and_zero_division() {
        let a = PAdic::from_int(5, 1, 3);
        let b = PAdic::from_int(7, 1, 3);
        assert!(matches!(
            PAdic::arith(&a, &b, BinOp::Add),
            Err(Error::PrimeMismatch(5, 7))
        ));
        let z = PAdic::exact_zero(5);
        assert!(matches!(a.div(&z), Err(Error::DivisionByZero)));
    }

    #[test]
    fn cancellation_leaves_zero_to_precision() {
        let a = PAdic::from_int(5, 7, 4);
        let d = a.sub(&a);
        assert!(d.is_zero());
        assert!(!d.is_exact_zero());
        assert_eq!(d.abs_prec(), Some(4));
    }

    #[test]
    fn from_rational_with_denominator_valuation() {
        let x = Rational::new(BigInt::from(2), BigInt::from(15));
        let a = PAdic::from_rational(5, &x, 3);
        assert_eq!(a.valuation(), Some(-1));
        // 2/3 mod 125: 3*42 = 126 = 1, so 2/3 = 84
        assert_eq!(a.unit().unwrap(), &BigInt::from(84));
    }

    #[test]
    fn div_exact_int_caps_relative_precision() {
        // v_3(9) = 2: five digits in, three digits out
        let a = PAdic::from_int(3, 2, 5);
        let q = a.div_exact_int(9);
        assert_eq!(q.rel_prec(), 3);
        assert_eq!(q.valuation(), Some(-2));
    }

    #[test]
    fn agreement_across_precisions() {
        let lo = PAdic::from_int(7, 123456, 3);
        let hi = PAdic::from_int(7, 123456, 9);
        assert!(lo.agrees_with(&hi));
        let other = PAdic::from_int(7, 123456 + 343, 9);
        assert!(lo.agrees_with(&other)); // differs only beyond 3 digits
        let near = PAdic::from_int(7, 123456 + 49, 9);
        assert!(!lo.agrees_with(&near));
    }
}
