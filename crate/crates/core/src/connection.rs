//! The universal unipotent connection in a residue disk: horizontal
//! sections as iterated-integral power series, their evaluation, shuffle
//! self-checks, linear independence, and p-adic polylogarithms.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::traits::{One, Zero};

use crate::coeffs::{PAdic, PowerSeries, Rational, TailBound};
use crate::derham::partial::taylor_div;
use crate::derham::{OneForm, PlaceSet, Poly, RatFunc};
use crate::ncseries::{shuffle_words, NCPoly, Word, words_up_to};
use crate::{Error, Result};

/// ∇f = −Σᵢ Aᵢ f αᵢ on P¹ ∖ places, with basepoint b.
#[derive(Clone, Debug)]
pub struct UniversalConnection {
    pub forms: Vec<OneForm>,
    pub places: PlaceSet,
    pub basepoint: Rational,
}

impl UniversalConnection {
    /// Basis forms dz/(z−aᵢ) of the place set; each form may have at most
    /// a simple pole at the basepoint (the cancellation rule handles it).
    pub fn new(forms: Vec<OneForm>, places: PlaceSet, basepoint: Rational) -> Result<Self> {
        for form in &forms {
            if let Some(ord) = form.f().order_at(&basepoint) {
                if ord < -1 {
                    return Err(Error::PoleAtBasepoint);
                }
            }
        }
        if forms.is_empty() {
            return Err(Error::InvalidInput("connection needs at least one form".into()));
        }
        if forms.len() > u8::MAX as usize {
            return Err(Error::InvalidInput("alphabet too large".into()));
        }
        Ok(UniversalConnection {
            forms,
            places,
            basepoint,
        })
    }

    pub fn from_places(places: PlaceSet, basepoint: Rational) -> Result<Self> {
        let forms = (0..places.basis_len()).map(|i| places.basis_form(i)).collect();
        UniversalConnection::new(forms, places, basepoint)
    }

    /// P¹ ∖ {0,1,∞} with α₁ = dz/z, α₂ = dz/(1−z), basepoint 0.
    pub fn standard_p1() -> Self {
        let places = PlaceSet::standard_p1();
        let alpha1 = places.basis_form(0); // dz/z
        // dz/(1−z) = −dz/(z−1)
        let alpha2 = OneForm::new(places.basis_form(1).f().neg());
        UniversalConnection::new(vec![alpha1, alpha2], places, Rational::zero()).unwrap()
    }

    pub fn alphabet(&self) -> u8 {
        self.forms.len() as u8
    }
}

/// Taylor coefficients of the rational coefficient of α at z = b + t.
pub fn expand_form(alpha: &OneForm, b: &Rational, order: usize) -> Result<PowerSeries<Rational>> {
    let f = alpha.f();
    if f.den().eval(b).is_zero() {
        return Err(Error::PoleAtBasepoint);
    }
    let num_t = f.num().shift(b);
    let den_t = f.den().shift(b);
    let mut coeffs = taylor_div(&num_t, &den_t, order.max(1));
    coeffs.truncate(order.max(1));
    Ok(PowerSeries::new(coeffs))
}

/// Laurent data at z = b + t for a form with at most a simple pole at b:
/// f(b+t) = residue/t + regular(t).
fn expand_form_laurent(
    alpha: &OneForm,
    b: &Rational,
    order: usize,
) -> Result<(Rational, PowerSeries<Rational>)> {
    let f = alpha.f();
    if !f.den().eval(b).is_zero() {
        return Ok((Rational::zero(), expand_form(alpha, b, order)?));
    }
    // multiply by (z − b): must clear the pole entirely
    let h = f.mul(&RatFunc::new(Poly::linear(b), Poly::one()).unwrap());
    if h.den().eval(b).is_zero() {
        return Err(Error::PoleAtBasepoint);
    }
    let coeffs = taylor_div(&h.num().shift(b), &h.den().shift(b), order + 1);
    let residue = coeffs[0].clone();
    Ok((residue, PowerSeries::new(coeffs[1..].to_vec())))
}

/// Horizontal section of the universal connection: u_w in t = z − b for
/// every word of length ≤ depth that admits a convergent iterated
/// integral at b. Words hitting the simple-pole obstruction are listed in
/// `divergent` (strict solving rejects them instead).
#[derive(Clone, Debug)]
pub struct HorizontalSection {
    pub alphabet: u8,
    pub depth: usize,
    pub order: usize,
    pub basepoint: Rational,
    pub series: BTreeMap<Word, PowerSeries<Rational>>,
    pub divergent: Vec<Word>,
}

impl HorizontalSection {
    pub fn series_for(&self, w: &Word) -> Result<&PowerSeries<Rational>> {
        self.series
            .get(w)
            .ok_or_else(|| {
                if self.divergent.contains(w) {
                    Error::DivergentWord(w.render())
                } else {
                    Error::MissingWord(w.render())
                }
            })
    }
}

/// Strict solve: any divergent word is an error naming the word.
pub fn solve_horizontal(
    conn: &UniversalConnection,
    depth: usize,
    order: usize,
) -> Result<HorizontalSection> {
    let sec = solve_horizontal_partial(conn, depth, order)?;
    if let Some(w) = sec.divergent.first() {
        return Err(Error::DivergentWord(w.render()));
    }
    Ok(sec)
}

/// Solve, recording divergent words instead of failing. A word diverges
/// when some integrand αᵢ·u_w has a genuine 1/t term (pole residue times
/// a nonvanishing constant term); all of its extensions diverge with it.
pub fn solve_horizontal_partial(
    conn: &UniversalConnection,
    depth: usize,
    order: usize,
) -> Result<HorizontalSection> {
    if order < 2 {
        return Err(Error::OrderTooSmall { need: 2, have: order });
    }
    let m = conn.alphabet();
    // Integration can only consume orders at simple-pole letters; padding
    // by the depth keeps every stored series at full order.
    let work_order = order + depth;
    let laurent: Vec<(Rational, PowerSeries<Rational>)> = conn
        .forms
        .iter()
        .map(|a| expand_form_laurent(a, &conn.basepoint, work_order))
        .collect::<Result<_>>()?;

    let mut series: BTreeMap<Word, PowerSeries<Rational>> = BTreeMap::new();
    let mut divergent: Vec<Word> = Vec::new();
    let one = PowerSeries::one(work_order, &Rational::zero());
    series.insert(Word::empty(), one);

    for len in 1..=depth {
        for w in words_up_to(m, len) {
            if w.len() != len {
                continue;
            }
            let (letter, suffix) = w.split_first().expect("nonempty word");
            let u_suffix = match series.get(&suffix) {
                Some(s) => s.clone(),
                None => {
                    // suffix already diverged; so does every extension
                    divergent.push(w);
                    continue;
                }
            };
            let (residue, regular) = &laurent[letter as usize - 1];
            let mut integrand = regular.mul(&u_suffix)?;
            if !residue.is_zero() {
                if !u_suffix.coeff(0).is_zero() {
                    divergent.push(w);
                    continue;
                }
                let shifted = u_suffix.div_by_t()?.scale(residue);
                integrand = integrand.truncate(shifted.order()).add(&shifted)?;
            }
            series.insert(w, integrand.integrate());
        }
    }

    // Cut everything back to the requested order.
    let series = series
        .into_iter()
        .map(|(w, s)| {
            let cut = s.order().min(order);
            (w, s.truncate(cut))
        })
        .collect();
    Ok(HorizontalSection {
        alphabet: m,
        depth,
        order,
        basepoint: conn.basepoint.clone(),
        series,
        divergent,
    })
}

/// Flatness check: d(u_{Aᵢw}) = αᵢ·u_w coefficientwise, exact, for every
/// stored word. Returns the first violating word, if any.
pub fn flatness_violation(
    conn: &UniversalConnection,
    sec: &HorizontalSection,
) -> Result<Option<Word>> {
    let work_order = sec.order + sec.depth;
    let laurent: Vec<(Rational, PowerSeries<Rational>)> = conn
        .forms
        .iter()
        .map(|a| expand_form_laurent(a, &conn.basepoint, work_order))
        .collect::<Result<_>>()?;
    for (w, u_w) in &sec.series {
        let Some((letter, suffix)) = w.split_first() else { continue };
        let u_suffix = sec.series_for(&suffix)?;
        let (residue, regular) = &laurent[letter as usize - 1];
        let mut rhs = regular.mul(u_suffix)?;
        if !residue.is_zero() {
            let shifted = u_suffix.div_by_t()?.scale(residue);
            rhs = rhs.truncate(shifted.order().min(rhs.order())).add(&shifted)?;
        }
        let lhs = u_w.derivative();
        let n = lhs.order().min(rhs.order());
        if !lhs.truncate(n).sub(&rhs.truncate(n))?.is_zero() {
            return Ok(Some(w.clone()));
        }
    }
    Ok(None)
}

/// Evaluate the section at a p-adic point x with v_p(x − b) ≥ 1,
/// producing the group-like torsor coordinate Σ_w u_w(x)·[w].
pub fn evaluate_section(
    sec: &HorizontalSection,
    x: &PAdic,
    prec: u32,
) -> Result<NCPoly<PAdic>> {
    let p = x.prime();
    let b = PAdic::from_rational(p, &sec.basepoint, prec);
    let t = x.sub(&b);
    let mut out = NCPoly::zero(sec.alphabet, sec.depth);
    for (w, u_w) in &sec.series {
        let mode = if w.is_empty() {
            TailBound::Integral
        } else {
            TailBound::LogGrowth(w.len() as u32)
        };
        let val = u_w.to_padic(p, prec).eval_disk(&t, mode)?;
        out.set(w.clone(), val);
    }
    Ok(out)
}

/// Formal rational evaluation: exact substitution into the truncations,
/// discarding the tail. The caller-facing warning travels with the flag.
pub struct RationalEvaluation {
    pub value: NCPoly<Rational>,
    pub tail_discarded: bool,
}

pub fn evaluate_section_rational(
    sec: &HorizontalSection,
    x: &Rational,
) -> Result<RationalEvaluation> {
    let t = x - &sec.basepoint;
    let mut out = NCPoly::zero(sec.alphabet, sec.depth);
    for (w, u_w) in &sec.series {
        out.set(w.clone(), u_w.eval_truncated(&t));
    }
    Ok(RationalEvaluation {
        value: out,
        tail_discarded: true,
    })
}

/// The p-adic polylogarithm Li_n(x) = Σ_{k≥1} x^k/kⁿ for v_p(x) ≥ 1:
/// the coefficient at A₁^{n−1}A₂ of the standard-connection section,
/// computed by the same integration engine (α₂ once, then α₁ repeatedly).
pub fn polylog(p: u64, degree: usize, x: &PAdic, order: usize) -> Result<PAdic> {
    if degree < 1 {
        return Err(Error::InvalidInput("polylog degree must be ≥ 1".into()));
    }
    if x.prime() != p {
        return Err(Error::PrimeMismatch(p, x.prime()));
    }
    if order < 2 {
        return Err(Error::OrderTooSmall { need: 2, have: order });
    }
    let work_order = order + degree;
    // u_{A₂} = ∫ Σ t^k dt = Σ_{k≥1} t^k/k
    let geometric = PowerSeries::new(vec![Rational::one(); work_order]);
    let mut u = geometric.integrate();
    // each α₁ = dz/z step: u ← ∫ u/t dt
    for _ in 1..degree {
        u = u.div_by_t()?.integrate();
    }
    let prec = u32::try_from(order as u64 + 8).unwrap_or(u32::MAX);
    u.truncate(order)
        .to_padic(p, prec)
        .eval_disk(x, TailBound::LogGrowth(degree as u32))
}

/// Outcome of one shuffle identity u_u·u_v = Σ shuffle coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShuffleCheck {
    pub pass: bool,
    /// Lowest t-order at which the two sides differ, if any.
    pub deviation_order: Option<usize>,
}

pub fn shuffle_check(sec: &HorizontalSection, u: &Word, v: &Word) -> Result<ShuffleCheck> {
    if u.len() + v.len() > sec.depth {
        return Err(Error::InvalidInput(format!(
            "|u|+|v| = {} exceeds section depth {}",
            u.len() + v.len(),
            sec.depth
        )));
    }
    let lhs = sec.series_for(u)?.mul(sec.series_for(v)?)?;
    let mut rhs = PowerSeries::zero(lhs.order(), &Rational::zero());
    for (w, mult) in shuffle_words(u, v) {
        let u_w = sec.series_for(&w)?;
        let scaled = u_w.scale(&Rational::from_integer(BigInt::from(mult)));
        rhs = rhs.truncate(rhs.order().min(scaled.order())).add(&scaled)?;
    }
    let n = lhs.order().min(rhs.order());
    let diff = lhs.truncate(n).sub(&rhs.truncate(n))?;
    let deviation_order = diff.coeffs().iter().position(|c| !Zero::is_zero(c));
    Ok(ShuffleCheck {
        pass: deviation_order.is_none(),
        deviation_order,
    })
}

/// Verdict of the bounded-degree linear-independence test.
#[derive(Clone, Debug)]
pub struct Independence {
    pub full_rank: bool,
    /// When degenerate: one relation Σ_w h_w(t)·u_w ≡ 0 per entry, as
    /// (word, coefficients of h_w).
    pub nullspace: Vec<Vec<(Word, Vec<Rational>)>>,
}

/// Search for polynomial relations Σ_w h_w(t)·u_w(t) ≡ 0 (mod t^N) with
/// deg h_w ≤ D over all stored words.
pub fn independence_test(
    sec: &HorizontalSection,
    deg_bound: usize,
    order: usize,
) -> Result<Independence> {
    let words: Vec<&Word> = sec.series.keys().collect();
    let ncols = words.len() * (deg_bound + 1);
    let need = ncols + deg_bound + 1;
    if order > sec.order {
        return Err(Error::OrderTooSmall { need: order, have: sec.order });
    }
    if order < need {
        return Err(Error::OrderTooSmall { need, have: order });
    }
    // rows: coefficient of t^j for j < order; columns: h_{w,d}
    let mut matrix: Vec<Vec<Rational>> = Vec::with_capacity(order);
    for j in 0..order {
        let mut row = Vec::with_capacity(ncols);
        for w in &words {
            let u_w = &sec.series[*w];
            for d in 0..=deg_bound {
                let c = if d <= j { u_w.coeff(j - d).clone() } else { Rational::zero() };
                row.push(c);
            }
        }
        matrix.push(row);
    }
    let null = nullspace(&mut matrix, ncols);
    let nullspace = null
        .into_iter()
        .map(|vec| {
            words
                .iter()
                .enumerate()
                .map(|(wi, w)| {
                    let h = vec[wi * (deg_bound + 1)..(wi + 1) * (deg_bound + 1)].to_vec();
                    ((*w).clone(), h)
                })
                .filter(|(_, h)| h.iter().any(|c| !Zero::is_zero(c)))
                .collect()
        })
        .collect::<Vec<_>>();
    Ok(Independence {
        full_rank: nullspace.is_empty(),
        nullspace,
    })
}

/// Exact rational nullspace basis by Gaussian elimination.
fn nullspace(matrix: &mut [Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let nrows = matrix.len();
    let mut pivot_cols = Vec::new();
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(pivot) = (rank..nrows).find(|&r| !Zero::is_zero(&matrix[r][col])) else {
            continue;
        };
        matrix.swap(rank, pivot);
        let inv = Rational::one() / &matrix[rank][col];
        for c in col..ncols {
            matrix[rank][c] = &matrix[rank][c] * &inv;
        }
        for r in 0..nrows {
            if r != rank && !Zero::is_zero(&matrix[r][col]) {
                let f = matrix[r][col].clone();
                for c in col..ncols {
                    matrix[r][c] = &matrix[r][c] - &f * &matrix[rank][c];
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    let free_cols: Vec<usize> = (0..ncols).filter(|c| !pivot_cols.contains(c)).collect();
    free_cols
        .into_iter()
        .map(|fc| {
            let mut v = vec![Rational::zero(); ncols];
            v[fc] = Rational::one();
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -matrix[r][fc].clone();
            }
            v
        })
        .collect()
}

/// Render a word-indexed p-adic coordinate list deterministically.
pub fn render_coordinates(poly: &NCPoly<PAdic>) -> Vec<(String, String)> {
    poly.terms()
        .iter()
        .map(|(w, c)| (w.render(), format!("{}", c)))
        .collect()
}
