//! The degree-truncated free non-commutative Hopf algebra on m generators:
//! words, concatenation product, deconcatenation-dual coproduct, shuffle
//! product, group-like/primitive structure and log/exp between them.

use std::collections::BTreeMap;

use crate::coeffs::series::Coeff;
use crate::coeffs::Rational;
use crate::error::{Error, Result};

/// A word in the generators A_1..A_m. Letters are 1-based indices; the
/// empty word is the unit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    letters: Vec<u8>,
}

impl Word {
    pub fn new(letters: Vec<u8>) -> Self {
        assert!(letters.iter().all(|&l| l >= 1), "letters are 1-based");
        Word { letters }
    }

    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn prepend(&self, letter: u8) -> Word {
        let mut l = Vec::with_capacity(self.len() + 1);
        l.push(letter);
        l.extend_from_slice(&self.letters);
        Word { letters: l }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut l = self.letters.clone();
        l.extend_from_slice(&other.letters);
        Word { letters: l }
    }

    /// Drop the first letter, returning (letter, tail).
    pub fn split_first(&self) -> Option<(u8, Word)> {
        self.letters.split_first().map(|(&h, t)| {
            (h, Word {
                letters: t.to_vec(),
            })
        })
    }

    pub fn max_letter(&self) -> u8 {
        self.letters.iter().copied().max().unwrap_or(0)
    }

    /// Text rendering: "A1.A2.A1"; the empty word renders as "1".
    pub fn render(&self) -> String {
        if self.letters.is_empty() {
            "1".to_string()
        } else {
            self.letters
                .iter()
                .map(|l| format!("A{}", l))
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    /// Parse the rendering above.
    pub fn parse(text: &str) -> Result<Word> {
        let text = text.trim();
        if text == "1" {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        for part in text.split('.') {
            let rest = part
                .strip_prefix('A')
                .ok_or_else(|| Error::InvalidInput(format!("bad word letter {:?}", part)))?;
            let idx: u8 = rest
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad word letter {:?}", part)))?;
            if idx == 0 {
                return Err(Error::InvalidInput("letter index must be >= 1".into()));
            }
            letters.push(idx);
        }
        Ok(Word { letters })
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// All words of length <= n over the alphabet 1..=m, shortest first.
pub fn words_up_to(m: u8, n: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut level = vec![Word::empty()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &level {
            for l in 1..=m {
                next.push(w.prepend(l));
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// A degree-truncated element of E[n] = F<A_1..A_m>/I^{n+1}. Words longer
/// than the truncation are discarded; zero coefficients are not stored.
#[derive(Clone, Debug)]
pub struct NCPoly<C: Coeff> {
    m: u8,
    trunc: usize,
    terms: BTreeMap<Word, C>,
}

#[derive(Clone, Debug)]
pub struct TensorPoly<C: Coeff> {
    m: u8,
    trunc: usize,
    terms: BTreeMap<(Word, Word), C>,
}

/// Outcome of the group-like test.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupLike {
    Yes,
    BadAugmentation,
    No { witness: (Word, Word) },
}

impl<C: Coeff> NCPoly<C> {
    pub fn zero(m: u8, trunc: usize) -> Self {
        NCPoly {
            m,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(m: u8, trunc: usize, sample: &C) -> Self {
        let mut p = Self::zero(m, trunc);
        p.set(Word::empty(), sample.one_like());
        p
    }

    pub fn generator(m: u8, trunc: usize, i: u8, sample: &C) -> Self {
        assert!(i >= 1 && i <= m && trunc >= 1);
        let mut p = Self::zero(m, trunc);
        p.set(Word::new(vec![i]), sample.one_like());
        p
    }

    pub fn alphabet(&self) -> u8 {
        self.m
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn terms(&self) -> &BTreeMap<Word, C> {
        &self.terms
    }

    pub fn set(&mut self, w: Word, c: C) {
        assert!(w.len() <= self.trunc, "word exceeds truncation");
        assert!(w.max_letter() <= self.m, "letter outside alphabet");
        if c.is_zero() {
            self.terms.remove(&w);
        } else {
            self.terms.insert(w, c);
        }
    }

    pub fn add_to(&mut self, w: &Word, c: &C) {
        if w.len() > self.trunc {
            return;
        }
        let cur = match self.terms.get(w) {
            Some(x) => x.add(c),
            None => c.clone(),
        };
        self.set(w.clone(), cur);
    }

    pub fn coeff(&self, w: &Word) -> Option<&C> {
        self.terms.get(w)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn sample(&self) -> Option<&C> {
        self.terms.values().next()
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.m != other.m || self.trunc != other.trunc {
            return Err(Error::ShapeMismatch(format!(
                "(m={}, n={}) vs (m={}, n={})",
                self.m, self.trunc, other.m, other.trunc
            )));
        }
        if let (Some(a), Some(b)) = (self.sample(), other.sample()) {
            if !a.compatible_with(b) {
                return Err(Error::RingMismatch);
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_to(w, c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = Self::zero(self.m, self.trunc);
        for (w, c) in &self.terms {
            out.set(w.clone(), c.neg());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.m, self.trunc);
        for (w, x) in &self.terms {
            out.add_to(w, &x.mul(c));
        }
        out
    }

    /// Concatenation product; words longer than the truncation are dropped.
    pub fn nc_mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = Self::zero(self.m, self.trunc);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                if u.len() + v.len() > self.trunc {
                    continue;
                }
                out.add_to(&u.concat(v), &a.mul(b));
            }
        }
        Ok(out)
    }

    /// Deconcatenation-dual coproduct: on a word, the sum over subsets of
    /// letter positions of (restriction) tensor (complement), orders kept.
    pub fn coproduct(&self) -> TensorPoly<C> {
        let mut out = TensorPoly::zero(self.m, self.trunc);
        for (w, c) in &self.terms {
            let k = w.len();
            for mask in 0u64..(1u64 << k) {
                let mut left = Vec::new();
                let mut right = Vec::new();
                for (pos, &letter) in w.letters().iter().enumerate() {
                    if mask & (1 << pos) != 0 {
                        left.push(letter);
                    } else {
                        right.push(letter);
                    }
                }
                out.add_to(&(Word::new(left), Word::new(right)), c);
            }
        }
        out
    }

    /// a tensor a, truncated by total word length.
    pub fn tensor_square(&self) -> TensorPoly<C> {
        let mut out = TensorPoly::zero(self.m, self.trunc);
        for (u, a) in &self.terms {
            for (v, b) in &self.terms {
                out.add_to(&(u.clone(), v.clone()), &a.mul(b));
            }
        }
        out
    }

    /// Check Delta(a) = a tensor a for all word-pairs of total length <= n.
    pub fn is_grouplike(&self) -> GroupLike {
        let aug_ok = match self.coeff(&Word::empty()) {
            Some(c) => c.sub(&c.one_like()).is_zero(),
            None => false,
        };
        if !aug_ok {
            return GroupLike::BadAugmentation;
        }
        let delta = self.coproduct();
        let square = self.tensor_square();
        let diff = delta.sub(&square);
        match diff.terms.into_iter().next() {
            None => GroupLike::Yes,
            Some((pair, _)) => GroupLike::No { witness: pair },
        }
    }

    /// exp of an augmentation-zero element; finite because I is nilpotent.
    pub fn nc_exp(&self) -> Result<Self> {
        if self.coeff(&Word::empty()).is_some() {
            return Err(Error::WrongAugmentation(
                "nc_exp requires augmentation 0".into(),
            ));
        }
        let sample = match self.sample() {
            Some(s) => s.clone(),
            None => {
                // exp(0) = 1 needs a unit; over the rationals this is fine,
                // over p-adics the zero poly carries no prime, so callers
                // pass nonzero inputs there.
                return Err(Error::InvalidInput(
                    "nc_exp of the zero element needs a coefficient sample; use NCPoly::one".into(),
                ));
            }
        };
        let mut out = Self::one(self.m, self.trunc, &sample);
        let mut term = Self::one(self.m, self.trunc, &sample);
        for k in 1..=self.trunc {
            term = term.nc_mul(self)?;
            term = term.scale(&sample.one_like().div_int(k as i64));
            if term.is_zero() {
                break;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// log of an augmentation-one element.
    pub fn nc_log(&self) -> Result<Self> {
        let aug_ok = match self.coeff(&Word::empty()) {
            Some(c) => c.sub(&c.one_like()).is_zero(),
            None => false,
        };
        if !aug_ok {
            return Err(Error::WrongAugmentation(
                "nc_log requires augmentation 1".into(),
            ));
        }
        let one_c = self.coeff(&Word::empty()).unwrap().one_like();
        let mut y = self.clone();
        y.set(Word::empty(), one_c.zero_like()); // y = a - 1
        let mut out = Self::zero(self.m, self.trunc);
        let mut pw = Self::one(self.m, self.trunc, &one_c);
        let mut sign = 1i64;
        for k in 1..=self.trunc {
            pw = pw.nc_mul(&y)?;
            if pw.is_zero() {
                break;
            }
            let coeff = one_c.div_int(sign * k as i64);
            out = out.add(&pw.scale(&coeff))?;
            sign = -sign;
        }
        Ok(out)
    }

    /// Is Delta(x) = x tensor 1 + 1 tensor x?
    pub fn is_primitive(&self) -> bool {
        let delta = self.coproduct();
        let mut expect = TensorPoly::zero(self.m, self.trunc);
        for (w, c) in &self.terms {
            expect.add_to(&(w.clone(), Word::empty()), c);
            expect.add_to(&(Word::empty(), w.clone()), c);
        }
        delta.sub(&expect).terms.is_empty()
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(w, c)| format!("({})*{}", c, w.render()))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl<C: Coeff> TensorPoly<C> {
    pub fn zero(m: u8, trunc: usize) -> Self {
        TensorPoly {
            m,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    pub fn terms(&self) -> &BTreeMap<(Word, Word), C> {
        &self.terms
    }

    pub fn coeff(&self, u: &Word, v: &Word) -> Option<&C> {
        self.terms.get(&(u.clone(), v.clone()))
    }

    pub fn add_to(&mut self, pair: &(Word, Word), c: &C) {
        if pair.0.len() + pair.1.len() > self.trunc {
            return;
        }
        let cur = match self.terms.get(pair) {
            Some(x) => x.add(c),
            None => c.clone(),
        };
        if cur.is_zero() {
            self.terms.remove(pair);
        } else {
            self.terms.insert(pair.clone(), cur);
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (pair, c) in &other.terms {
            out.add_to(pair, &c.neg());
        }
        out
    }

    /// Componentwise concatenation product on the tensor square.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = TensorPoly::zero(self.m, self.trunc);
        for ((u1, u2), a) in &self.terms {
            for ((v1, v2), b) in &other.terms {
                let pair = (u1.concat(v1), u2.concat(v2));
                out.add_to(&pair, &a.mul(b));
            }
        }
        out
    }
}

/// Recursive shuffle product of two words, with nonnegative integer
/// multiplicities.
pub fn shuffle_words(u: &Word, v: &Word) -> BTreeMap<Word, u64> {
    let mut out = BTreeMap::new();
    shuffle_rec(u, v, &mut out, 1);
    out
}

fn shuffle_rec(u: &Word, v: &Word, out: &mut BTreeMap<Word, u64>, mult: u64) {
    if u.is_empty() {
        *out.entry(v.clone()).or_insert(0) += mult;
        return;
    }
    if v.is_empty() {
        *out.entry(u.clone()).or_insert(0) += mult;
        return;
    }
    let (a, ur) = u.split_first().unwrap();
    let (b, vr) = v.split_first().unwrap();
    let mut left = BTreeMap::new();
    shuffle_rec(&ur, v, &mut left, mult);
    for (w, c) in left {
        *out.entry(w.prepend(a)).or_insert(0) += c;
    }
    let mut right = BTreeMap::new();
    shuffle_rec(u, &vr, &mut right, mult);
    for (w, c) in right {
        *out.entry(w.prepend(b)).or_insert(0) += c;
    }
}

/// Shuffle product as an element of E[n] over the rationals.
pub fn shuffle(u: &Word, v: &Word, m: u8, trunc: usize) -> NCPoly<Rational> {
    let mut out = NCPoly::zero(m, trunc);
    let one: Rational = num::traits::One::one();
    for (w, c) in shuffle_words(u, v) {
        if w.len() <= trunc {
            out.add_to(&w, &one.mul_int(c as i64));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::bigint::BigInt;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn gen(m: u8, n: usize, i: u8) -> NCPoly<Rational> {
        NCPoly::generator(m, n, i, &rat(1, 1))
    }

    #[test]
    fn concat_products() {
        let a1 = gen(2, 2, 1);
        let a2 = gen(2, 2, 2);
        let p = a1.nc_mul(&a2).unwrap();
        assert_eq!(p.coeff(&Word::new(vec![1, 2])), Some(&rat(1, 1)));
        assert_eq!(p.terms().len(), 1);

        // (1 + A1)(1 - A1) at n=2 -> 1 - A1A1
        let one = NCPoly::one(2, 2, &rat(1, 1));
        let l = one.add(&a1).unwrap();
        let r = one.sub(&a1).unwrap();
        let q = l.nc_mul(&r).unwrap();
        assert_eq!(q.coeff(&Word::empty()), Some(&rat(1, 1)));
        assert_eq!(q.coeff(&Word::new(vec![1])), None);
        assert_eq!(q.coeff(&Word::new(vec![1, 1])), Some(&rat(-1, 1)));
    }

    #[test]
    fn distribute_and_truncate_oracle() {
        // (1+A1+A1A1)(1+A2) at n=2 -> 1 + A1 + A2 + A1A2 + A1A1
        let one = NCPoly::one(2, 2, &rat(1, 1));
        let a1 = gen(2, 2, 1);
        let a2 = gen(2, 2, 2);
        let a11 = a1.nc_mul(&a1).unwrap();
        let lhs = one.add(&a1).unwrap().add(&a11).unwrap();
        let rhs = one.add(&a2).unwrap();
        let p = lhs.nc_mul(&rhs).unwrap();
        let expect = [
            (Word::empty(), rat(1, 1)),
            (Word::new(vec![1]), rat(1, 1)),
            (Word::new(vec![2]), rat(1, 1)),
            (Word::new(vec![1, 2]), rat(1, 1)),
            (Word::new(vec![1, 1]), rat(1, 1)),
        ];
        assert_eq!(p.terms().len(), expect.len());
        for (w, c) in expect {
            assert_eq!(p.coeff(&w), Some(&c));
        }
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let a = gen(2, 2, 1);
        let b = gen(3, 2, 1);
        assert!(matches!(a.nc_mul(&b), Err(Error::ShapeMismatch(_))));
        let c = gen(2, 3, 1);
        assert!(matches!(a.nc_mul(&c), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn coproduct_on_generators_and_words() {
        let a1 = gen(2, 2, 1);
        let d = a1.coproduct();
        let w1 = Word::new(vec![1]);
        assert_eq!(d.coeff(&w1, &Word::empty()), Some(&rat(1, 1)));
        assert_eq!(d.coeff(&Word::empty(), &w1), Some(&rat(1, 1)));
        assert_eq!(d.terms().len(), 2);

        // subsequence-split oracle on A1A2
        let a12 = gen(2, 2, 1).nc_mul(&gen(2, 2, 2)).unwrap();
        let d = a12.coproduct();
        let w12 = Word::new(vec![1, 2]);
        let w2 = Word::new(vec![2]);
        assert_eq!(d.coeff(&w12, &Word::empty()), Some(&rat(1, 1)));
        assert_eq!(d.coeff(&w1, &w2), Some(&rat(1, 1)));
        assert_eq!(d.coeff(&w2, &w1), Some(&rat(1, 1)));
        assert_eq!(d.coeff(&Word::empty(), &w12), Some(&rat(1, 1)));
        assert_eq!(d.terms().len(), 4);

        // empty word -> 1 tensor 1
        let one = NCPoly::one(2, 2, &rat(1, 1));
        let d = one.coproduct();
        assert_eq!(d.coeff(&Word::empty(), &Word::empty()), Some(&rat(1, 1)));
        assert_eq!(d.terms().len(), 1);
    }

    #[test]
    fn shuffle_examples() {
        let a1 = Word::new(vec![1]);
        let a2 = Word::new(vec![2]);
        let s = shuffle(&a1, &a2, 2, 3);
        assert_eq!(s.coeff(&Word::new(vec![1, 2])), Some(&rat(1, 1)));
        assert_eq!(s.coeff(&Word::new(vec![2, 1])), Some(&rat(1, 1)));

        // (A1A2, A1) -> 2 A1A1A2 + A1A2A1
        let a12 = Word::new(vec![1, 2]);
        let s = shuffle(&a12, &a1, 2, 3);
        assert_eq!(s.coeff(&Word::new(vec![1, 1, 2])), Some(&rat(2, 1)));
        assert_eq!(s.coeff(&Word::new(vec![1, 2, 1])), Some(&rat(1, 1)));
        assert_eq!(s.terms().len(), 2);

        // unit of the shuffle algebra
        let s = shuffle(&a12, &Word::empty(), 2, 3);
        assert_eq!(s.coeff(&a12), Some(&rat(1, 1)));
        assert_eq!(s.terms().len(), 1);
    }

    #[test]
    fn shuffle_matches_interleaving_enumeration() {
        // independent oracle: choose positions of u among |u|+|v| slots
        let u = Word::new(vec![1, 2, 1]);
        let v = Word::new(vec![2, 1]);
        let total = u.len() + v.len();
        let mut oracle: BTreeMap<Word, u64> = BTreeMap::new();
        for mask in 0u32..(1 << total) {
            if (mask.count_ones() as usize) != u.len() {
                continue;
            }
            let mut ui = 0;
            let mut vi = 0;
            let mut letters = Vec::new();
            for pos in 0..total {
                if mask & (1 << pos) != 0 {
                    letters.push(u.letters()[ui]);
                    ui += 1;
                } else {
                    letters.push(v.letters()[vi]);
                    vi += 1;
                }
            }
            *oracle.entry(Word::new(letters)).or_insert(0) += 1;
        }
        assert_eq!(shuffle_words(&u, &v), oracle);
    }

    #[test]
    fn grouplike_checks() {
        let one = NCPoly::one(2, 3, &rat(1, 1));
        assert_eq!(one.is_grouplike(), GroupLike::Yes);

        // exp(A1) is group-like (binomial identity on the coproduct)
        let e = gen(2, 3, 1).nc_exp().unwrap();
        assert_eq!(e.is_grouplike(), GroupLike::Yes);
        assert_eq!(e.coeff(&Word::new(vec![1, 1, 1])), Some(&rat(1, 6)));
        assert_eq!(e.coeff(&Word::new(vec![1, 1])), Some(&rat(1, 2)));

        // 1 + A1A2 fails with witness (A1, A2)
        let mut bad = NCPoly::one(2, 2, &rat(1, 1));
        bad.set(Word::new(vec![1, 2]), rat(1, 1));
        assert_eq!(
            bad.is_grouplike(),
            GroupLike::No {
                witness: (Word::new(vec![1]), Word::new(vec![2]))
            }
        );

        let no_aug = gen(2, 2, 1);
        assert_eq!(no_aug.is_grouplike(), GroupLike::BadAugmentation);
    }

    #[test]
    fn log_exp_round_trip() {
        let x = gen(2, 4, 1).add(&gen(2, 4, 2)).unwrap();
        let back = x.nc_exp().unwrap().nc_log().unwrap();
        assert!(back.sub(&x).unwrap().is_zero());
        assert!(x.is_primitive());
        // log of a group-like element is primitive
        let g = x.nc_exp().unwrap();
        assert!(g.nc_log().unwrap().is_primitive());
        // wrong augmentations
        assert!(matches!(g.nc_exp(), Err(Error::WrongAugmentation(_))));
        assert!(matches!(x.nc_log(), Err(Error::WrongAugmentation(_))));
    }

    #[test]
    fn word_rendering_round_trip() {
        let w = Word::new(vec![1, 2, 1]);
        assert_eq!(w.render(), "A1.A2.A1");
        assert_eq!(Word::parse("A1.A2.A1").unwrap(), w);
        assert_eq!(Word::parse("1").unwrap(), Word::empty());
        assert!(Word::parse("B2").is_err());
    }

    #[test]
    fn word_counting() {
        for m in 1..=3u8 {
            for n in 0..=4usize {
                let count = words_up_to(m, n).len();
                let expect: usize = (0..=n).map(|k| (m as usize).pow(k as u32)).sum();
                assert_eq!(count, expect);
            }
        }
    }
}
