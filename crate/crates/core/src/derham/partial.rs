//! Partial fractions over a fixed set of finite poles, and reduction of a
//! one-form to the residue basis dz/(z−aᵢ) modulo exact forms.

use num::bigint::BigInt;
use num::traits::{One, Zero};

use crate::coeffs::{render_rational, Rational};
use crate::{Error, Result};

use super::poly::Poly;
use super::ratfunc::RatFunc;

/// The finite punctures a₁..a_{s−1} of P¹ ∖ {a₁, …, a_{s−1}, ∞}. The
/// point at infinity is always removed, so the cohomology basis is the
/// forms dz/(z−aᵢ), one per finite puncture.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaceSet {
    poles: Vec<Rational>,
}

impl PlaceSet {
    pub fn new(poles: Vec<Rational>) -> Result<Self> {
        if poles.is_empty() {
            return Err(Error::InvalidInput(
                "place set needs at least one finite puncture".to_string(),
            ));
        }
        for i in 0..poles.len() {
            for j in i + 1..poles.len() {
                if poles[i] == poles[j] {
                    return Err(Error::InvalidInput(format!(
                        "duplicate place {}",
                        render_rational(&poles[i])
                    )));
                }
            }
        }
        Ok(PlaceSet { poles })
    }

    /// {0, 1}: the standard P¹ ∖ {0, 1, ∞}.
    pub fn standard_p1() -> Self {
        PlaceSet::new(vec![
            Rational::zero(),
            Rational::from_integer(BigInt::one()),
        ])
        .unwrap()
    }

    pub fn poles(&self) -> &[Rational] {
        &self.poles
    }

    /// Basis count m = s − 1 (genus 0).
    pub fn basis_len(&self) -> usize {
        self.poles.len()
    }

    pub fn contains(&self, a: &Rational) -> bool {
        self.poles.iter().any(|p| p == a)
    }

    /// The basis one-form dz/(z−aᵢ).
    pub fn basis_form(&self, i: usize) -> OneForm {
        OneForm::new(
            RatFunc::new(Poly::one(), Poly::linear(&self.poles[i])).unwrap(),
        )
    }
}

/// The one-form f·dz.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneForm {
    f: RatFunc,
}

impl OneForm {
    pub fn new(f: RatFunc) -> Self {
        OneForm { f }
    }

    pub fn zero() -> Self {
        OneForm::new(RatFunc::zero())
    }

    pub fn f(&self) -> &RatFunc {
        &self.f
    }

    pub fn is_zero(&self) -> bool {
        self.f.is_zero()
    }

    pub fn add(&self, other: &OneForm) -> OneForm {
        OneForm::new(self.f.add(&other.f))
    }

    pub fn sub(&self, other: &OneForm) -> OneForm {
        OneForm::new(self.f.sub(&other.f))
    }

    /// g·ω for a function g.
    pub fn mul_fn(&self, g: &RatFunc) -> OneForm {
        OneForm::new(self.f.mul(g))
    }

    /// dF as a one-form.
    pub fn d(g: &RatFunc) -> OneForm {
        OneForm::new(g.derivative())
    }

    pub fn render(&self) -> String {
        format!("({}) dz", self.f.render())
    }
}

/// f = poly + Σᵢ Σ_j coeffs[i][j−1]/(z−aᵢ)^j, indices following the
/// place-set order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFractions {
    pub poly: Poly,
    pub principal: Vec<Vec<Rational>>,
}

impl PartialFractions {
    /// Recombine into a single rational function (round-trip check).
    pub fn recombine(&self, places: &PlaceSet) -> RatFunc {
        let mut acc = RatFunc::from_poly(self.poly.clone());
        for (i, coeffs) in self.principal.iter().enumerate() {
            let lin = Poly::linear(&places.poles()[i]);
            for (jm1, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let term = RatFunc::new(Poly::constant(c.clone()), lin.pow(jm1 as u32 + 1))
                    .unwrap();
                acc = acc.add(&term);
            }
        }
        acc
    }
}

pub fn partial_fractions(f: &RatFunc, places: &PlaceSet) -> Result<PartialFractions> {
    let (poly, rem) = f.num().div_rem(f.den());
    // Factor the denominator over the place set; whatever is left over is a
    // pole we are not allowed to have.
    let mut mult = vec![0u32; places.basis_len()];
    let mut leftover = f.den().clone();
    for (i, a) in places.poles().iter().enumerate() {
        let lin = Poly::linear(a);
        loop {
            if leftover.eval(a).is_zero() {
                let (q, r) = leftover.div_rem(&lin);
                debug_assert!(r.is_zero());
                leftover = q;
                mult[i] += 1;
            } else {
                break;
            }
        }
    }
    if !leftover.is_constant() {
        // Name a rational root if one exists, otherwise report the
        // irreducible leftover factor.
        let msg = match rational_root(&leftover) {
            Some(root) => format!("pole {} not permitted", render_rational(&root)),
            None => format!(
                "denominator factor {} does not split over the place set",
                leftover.monic().render()
            ),
        };
        return Err(Error::PoleOutsidePlaces(msg));
    }

    let mut principal = Vec::with_capacity(places.basis_len());
    for (i, a) in places.poles().iter().enumerate() {
        let k = mult[i] as usize;
        if k == 0 {
            principal.push(Vec::new());
            continue;
        }
        // rem/den = (rem/Q)/(z−a)^k with Q = den/(z−a)^k. Taylor-expand
        // rem/Q at z = a + t to order k−1; the t^j coefficient is the
        // numerator of 1/(z−a)^{k−j}.
        let (q_poly, r) = f.den().div_rem(&Poly::linear(a).pow(k as u32));
        debug_assert!(r.is_zero());
        let num_t = rem.shift(a);
        let den_t = q_poly.shift(a);
        let e = taylor_div(&num_t, &den_t, k);
        let mut coeffs = vec![Rational::zero(); k];
        for (j, ej) in e.into_iter().enumerate() {
            coeffs[k - 1 - j] = ej; // c_{i, k−j}
        }
        principal.push(coeffs);
    }
    Ok(PartialFractions { poly, principal })
}

/// First `order` Taylor coefficients of num/den at t = 0; den(0) ≠ 0.
pub(crate) fn taylor_div(num: &Poly, den: &Poly, order: usize) -> Vec<Rational> {
    let d0 = den.coeff(0);
    debug_assert!(!d0.is_zero());
    let mut e = Vec::with_capacity(order);
    for j in 0..order {
        let mut acc = num.coeff(j);
        for (l, el) in e.iter().enumerate().take(j) {
            acc = acc - el * &den.coeff(j - l);
        }
        e.push(acc / &d0);
    }
    e
}

/// A rational root of p, if any (rational root theorem on the primitive
/// integer form).
fn rational_root(p: &Poly) -> Option<Rational> {
    use num::Integer;
    if p.is_constant() {
        return None;
    }
    // Clear denominators.
    let mut lcm = BigInt::one();
    for c in p.coeffs() {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| c.numer() * &lcm / c.denom())
        .collect();
    let a0 = ints.iter().find(|c| !num::traits::Zero::is_zero(*c))?.clone();
    if ints[0].bits() > 64 || ints.last().unwrap().bits() > 64 {
        // Desk-scale inputs only; fall back to "no rational root named".
        return None;
    }
    if num::traits::Zero::is_zero(&ints[0]) {
        return Some(Rational::zero());
    }
    let an = ints.last().unwrap().clone();
    for pnum in divisors_signed(&a0) {
        for qden in divisors_signed(&an) {
            if qden <= BigInt::zero() {
                continue;
            }
            let cand = Rational::new(pnum.clone(), qden.clone());
            if p.eval(&cand).is_zero() {
                return Some(cand);
            }
        }
    }
    None
}

fn divisors_signed(n: &BigInt) -> Vec<BigInt> {
    let m: i64 = n.try_into().unwrap_or(0);
    let m = m.unsigned_abs();
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= m {
        if m % d == 0 {
            out.push(BigInt::from(d));
            out.push(-BigInt::from(d));
            if d != m / d {
                out.push(BigInt::from(m / d));
                out.push(-BigInt::from(m / d));
            }
        }
        d += 1;
    }
    out
}

/// ω = Σᵢ cᵢ·dz/(z−aᵢ) + dF: the residues cᵢ plus an explicit
/// antiderivative absorbing everything else.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedForm {
    pub coeffs: Vec<Rational>,
    pub exact_part: RatFunc,
}

pub fn reduce_form(omega: &OneForm, places: &PlaceSet) -> Result<ReducedForm> {
    let pf = partial_fractions(omega.f(), places)?;
    let mut coeffs = Vec::with_capacity(places.basis_len());
    let mut exact = RatFunc::from_poly(antiderivative(&pf.poly));
    for (i, a) in places.poles().iter().enumerate() {
        let parts = &pf.principal[i];
        coeffs.push(parts.first().cloned().unwrap_or_else(Rational::zero));
        let lin = Poly::linear(a);
        for (jm1, c) in parts.iter().enumerate().skip(1) {
            if c.is_zero() {
                continue;
            }
            // ∫ c/(z−a)^j dz = −c/((j−1)(z−a)^{j−1}) for j ≥ 2
            let j = jm1 as i64 + 1;
            let scale = -c / Rational::from_integer(BigInt::from(j - 1));
            let term =
                RatFunc::new(Poly::constant(scale), lin.pow(jm1 as u32)).unwrap();
            exact = exact.add(&term);
        }
    }
    Ok(ReducedForm {
        coeffs,
        exact_part: exact,
    })
}

fn antiderivative(p: &Poly) -> Poly {
    let mut out = vec![Rational::zero()];
    for (k, c) in p.coeffs().iter().enumerate() {
        out.push(c / Rational::from_integer(BigInt::from(k as i64 + 1)));
    }
    Poly::new(out)
}

/// True when ω already lies in span{dz/(z−aᵢ)}.
pub fn is_basis_valued(omega: &OneForm, places: &PlaceSet) -> Result<bool> {
    let pf = partial_fractions(omega.f(), places)?;
    Ok(pf.poly.is_zero()
        && pf
            .principal
            .iter()
            .all(|cs| cs.iter().skip(1).all(|c| c.is_zero())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn rf(text: &str) -> RatFunc {
        super::super::parse::parse_ratfunc(text).unwrap()
    }

    #[test]
    fn cover_up_two_simple_poles() {
        // 1/(z(z−1)) = −1/z + 1/(z−1)
        let pf = partial_fractions(&rf("1/(z*(z-1))"), &PlaceSet::standard_p1()).unwrap();
        assert!(pf.poly.is_zero());
        assert_eq!(pf.principal, vec![vec![rat(-1, 1)], vec![rat(1, 1)]]);
    }

    #[test]
    fn polynomial_only() {
        let pf = partial_fractions(&rf("z^2"), &PlaceSet::standard_p1()).unwrap();
        assert_eq!(pf.poly, Poly::var().pow(2));
        assert!(pf.principal.iter().all(|v| v.is_empty()));
    }

    #[test]
    fn pole_outside_places() {
        let e = partial_fractions(&rf("1/(z-2)"), &PlaceSet::standard_p1()).unwrap_err();
        match e {
            Error::PoleOutsidePlaces(msg) => assert!(msg.contains("pole 2"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn irreducible_factor_named() {
        let e = partial_fractions(&rf("1/(z^2+1)"), &PlaceSet::standard_p1()).unwrap_err();
        match e {
            Error::PoleOutsidePlaces(msg) => {
                assert!(msg.contains("does not split"), "{msg}")
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn round_trip_higher_multiplicity() {
        let places = PlaceSet::standard_p1();
        let f = rf("(z^3 + 2*z - 5)/(z^2*(z-1)^3)");
        let pf = partial_fractions(&f, &places).unwrap();
        assert_eq!(pf.recombine(&places), f);
    }

    #[test]
    fn reduce_exact_form() {
        // z·dz = d(z²/2)
        let r = reduce_form(&OneForm::new(rf("z")), &PlaceSet::standard_p1()).unwrap();
        assert_eq!(r.coeffs, vec![rat(0, 1), rat(0, 1)]);
        assert_eq!(r.exact_part, rf("z^2/2"));
    }

    #[test]
    fn reduce_residues() {
        let r = reduce_form(&OneForm::new(rf("1/(z*(z-1))")), &PlaceSet::standard_p1())
            .unwrap();
        assert_eq!(r.coeffs, vec![rat(-1, 1), rat(1, 1)]);
        assert!(r.exact_part.is_zero());
    }

    #[test]
    fn reduce_double_pole() {
        // dz/(z−1)² = d(−1/(z−1))
        let r = reduce_form(&OneForm::new(rf("1/(z-1)^2")), &PlaceSet::standard_p1())
            .unwrap();
        assert_eq!(r.coeffs, vec![rat(0, 1), rat(0, 1)]);
        assert_eq!(r.exact_part, rf("-1/(z-1)"));
    }

    #[test]
    fn reduction_identity_holds() {
        // ω = Σ cᵢ dz/(z−aᵢ) + dF, checked symbolically
        let places = PlaceSet::standard_p1();
        let omega = OneForm::new(rf("(z^4 - 3)/(z^3*(z-1)^2)"));
        let r = reduce_form(&omega, &places).unwrap();
        let mut acc = OneForm::d(&r.exact_part);
        for (i, c) in r.coeffs.iter().enumerate() {
            acc = acc.add(&places.basis_form(i).mul_fn(&RatFunc::constant(c.clone())));
        }
        assert_eq!(acc, omega);
    }

    #[test]
    fn residues_match_cover_up_oracle() {
        // residue at a = ((z−a)·f)(a)
        let places = PlaceSet::standard_p1();
        let f = rf("(2*z + 3)/(z*(z-1))");
        let r = reduce_form(&OneForm::new(f.clone()), &places).unwrap();
        for (i, a) in places.poles().iter().enumerate() {
            let lin = RatFunc::new(Poly::linear(a), Poly::one()).unwrap();
            let res = lin.mul(&f).eval(a).unwrap();
            assert_eq!(r.coeffs[i], res);
        }
    }

    #[test]
    fn basis_valued_detection() {
        let places = PlaceSet::standard_p1();
        assert!(is_basis_valued(&OneForm::new(rf("3/z - 2/(z-1)")), &places).unwrap());
        assert!(!is_basis_valued(&OneForm::new(rf("1/z^2")), &places).unwrap());
        assert!(!is_basis_valued(&OneForm::new(rf("1")), &places).unwrap());
    }
}
