//! Upper bounds on Selmer-variety dimensions, assembled level by level
//! from local H² estimates under a chosen conjecture mode, and the search
//! for the crossing level where the de Rham quotient overtakes them.

use num::bigint::BigInt;
use num::traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::lcs_dims::{dim_ladder, shape_d, CurveShape, ShapeCase};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMode {
    Conjecture2,
    WeakJannsen,
}

impl BoundMode {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "conjecture2" => Ok(BoundMode::Conjecture2),
            "weak_jannsen" | "weak-jannsen" => Ok(BoundMode::WeakJannsen),
            other => Err(Error::InvalidInput(format!(
                "unknown mode '{other}' (expected conjecture2 or weak_jannsen)"
            ))),
        }
    }
}

/// Weight-graded dimensions of the local Galois representation at a bad
/// place away from p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AwayPlace {
    pub gr1: u32,
    pub gr2: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveData {
    pub shape: CurveShape,
    /// Number of places above p, each contributing the at-p local bound.
    pub atp_places: u32,
    pub away_places: Vec<AwayPlace>,
    /// Global constant K ≥ 1 in dim H² ≤ K·dim V.
    pub k_const: u32,
    /// Weak-Jannsen vanishing threshold k ≥ 1.
    pub jannsen_k: u32,
    /// Level from which the conjecture-2 injection is assumed valid.
    pub n0: u64,
}

impl CurveData {
    /// Default place data: one place above p, one away place with the
    /// paper's generic graded dimensions gr2 = g, gr1 = 2g, K = 1, k = 2,
    /// n₀ = 1.
    pub fn with_defaults(shape: CurveShape) -> Self {
        CurveData {
            shape,
            atp_places: 1,
            away_places: vec![AwayPlace {
                gr1: 2 * shape.genus,
                gr2: shape.genus,
            }],
            k_const: 1,
            jannsen_k: 2,
            n0: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.shape.case()?;
        if self.k_const < 1 {
            return Err(Error::InvalidInput("K must be >= 1".into()));
        }
        if self.jannsen_k < 1 {
            return Err(Error::InvalidInput("jannsen threshold k must be >= 1".into()));
        }
        if self.n0 < 1 {
            return Err(Error::InvalidInput("n0 must be >= 1".into()));
        }
        Ok(())
    }
}

/// g^e with the conventions g⁰ = 1 (even for g = 0) and g^{negative} = 0.
fn g_pow(g: u32, e: i64) -> BigInt {
    if e < 0 {
        BigInt::zero()
    } else if e == 0 {
        BigInt::one()
    } else {
        BigInt::from(g).pow(e as u32)
    }
}

/// Away-from-p local bound: n·gr2·g^{n−1} + (n(n−1)/2)·gr1²·g^{n−2}.
pub fn h2_local_away(n: u64, g: u32, gr1: u32, gr2: u32) -> BigInt {
    assert!(n >= 1);
    let first = BigInt::from(n) * BigInt::from(gr2) * g_pow(g, n as i64 - 1);
    let second = BigInt::from(n * (n - 1) / 2)
        * BigInt::from(gr1) * BigInt::from(gr1)
        * g_pow(g, n as i64 - 2);
    first + second
}

/// At-p local bound: n·(g+s−1)·g^{n−1}.
pub fn h2_local_atp(n: u64, g: u32, s: u32) -> BigInt {
    assert!(n >= 1);
    BigInt::from(n) * BigInt::from(g + s - 1) * g_pow(g, n as i64 - 1)
}

/// h2_V(ν, l) of the weak-Jannsen assembly: 0 once the twist l reaches
/// the threshold k, otherwise K·((2g)^{2k}−1)^q·(2g)^i for ν = 2kq + i.
fn h2_v(nu: u64, l: u64, g: u32, k: u32, big_k: u32) -> BigInt {
    if l >= k as u64 {
        return BigInt::zero();
    }
    let two_k = 2 * k as u64;
    let q = nu / two_k;
    let i = nu % two_k;
    let base = g_pow(2 * g, two_k as i64) - BigInt::one();
    BigInt::from(big_k) * base.pow(q as u32) * g_pow(2 * g, i as i64)
}

fn binomial(n: u64, j: u64) -> BigInt {
    let mut acc = BigInt::one();
    for t in 0..j {
        acc = acc * BigInt::from(n - t) / BigInt::from(t + 1);
    }
    acc
}

/// Global H² bound at level n under the chosen mode.
pub fn h2_global_bound(n: u64, data: &CurveData, mode: BoundMode) -> Result<BigInt> {
    assert!(n >= 1);
    let g = data.shape.genus;
    let s = data.shape.punctures;
    match mode {
        BoundMode::Conjecture2 => {
            if n >= data.n0 {
                let mut acc = BigInt::from(data.atp_places) * h2_local_atp(n, g, s);
                for place in &data.away_places {
                    acc += h2_local_away(n, g, place.gr1, place.gr2);
                }
                Ok(acc)
            } else {
                // unconditional fallback dim H² ≤ K·d_n below the threshold
                Ok(BigInt::from(data.k_const) * shape_d(&data.shape, n)?)
            }
        }
        BoundMode::WeakJannsen => {
            if !matches!(data.shape.case()?, ShapeCase::Open { .. }) {
                return Err(Error::InvalidShape(
                    "weak_jannsen mode requires an affine (open) curve".into(),
                ));
            }
            let mut acc = BigInt::zero();
            for j in 0..=n {
                let w_factor = g_pow(s - 1, j as i64); // (s−1)^j, 0⁰ = 1
                if w_factor.is_zero() {
                    continue;
                }
                acc += binomial(n, j)
                    * w_factor
                    * h2_v(n - j, j, g, data.jannsen_k, data.k_const);
            }
            Ok(acc)
        }
    }
}

/// ⌈d_k/2⌉ at odd levels (paper-exact minus-eigenspace dimension), d_k at
/// even levels (conservative; the paper is silent there).
pub fn eigenspace_dim(k: u64, data: &CurveData) -> Result<BigInt> {
    let d = shape_d(&data.shape, k)?;
    if k % 2 == 1 {
        Ok((&d + BigInt::one()) / BigInt::from(2))
    } else {
        Ok(d)
    }
}

/// S_n = Σ_{k<n} [eig(k) + h2_global_bound(k)] via the Euler
/// characteristic of each graded layer.
pub fn selmer_upper(n: u64, data: &CurveData, mode: BoundMode) -> Result<BigInt> {
    if n < 2 {
        return Err(Error::InvalidInput("selmer_upper needs n >= 2".into()));
    }
    let mut acc = BigInt::zero();
    for k in 1..n {
        acc += eigenspace_dim(k, data)? + h2_global_bound(k, data, mode)?;
    }
    Ok(acc)
}

/// One row of the bound ladder. The h2/h1 columns are the level-(n−1)
/// summands entering S_n, so each row shows what the step added.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BoundLevel {
    pub level: u64,
    #[serde(with = "crate::report::bigint_string")]
    pub h2_summand: BigInt,
    #[serde(with = "crate::report::bigint_string")]
    pub h1_summand: BigInt,
    #[serde(with = "crate::report::bigint_string")]
    pub selmer_upper: BigInt,
    #[serde(with = "crate::report::bigint_string")]
    pub quotient_q: BigInt,
    #[serde(with = "crate::report::bigint_string")]
    pub gap: BigInt,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BoundReport {
    pub data: CurveData,
    pub mode: BoundMode,
    pub levels: Vec<BoundLevel>,
    pub crossing: Option<u64>,
    pub warnings: Vec<String>,
}

/// Minimal 2 ≤ n ≤ n_max with S_n < q_n, plus the full ladder.
pub fn find_crossing(data: &CurveData, mode: BoundMode, n_max: u64) -> Result<BoundReport> {
    if n_max < 2 {
        return Err(Error::InvalidInput("n_max must be >= 2".into()));
    }
    data.validate()?;
    let ladder = dim_ladder(&data.shape, n_max)?;
    let mut warnings = ladder.warnings.clone();
    warnings.push(
        "even-level minus-eigenspace dimension bounded by d_k (conservative; \
         the d_k/2 identity is stated only for odd levels)"
            .to_string(),
    );
    if data.n0 > 1 {
        warnings.push(format!(
            "levels below n0 = {} use the unconditional K*d_n fallback",
            data.n0
        ));
    }

    let mut levels = Vec::new();
    let mut s_n = BigInt::zero();
    let mut crossing = None;
    // accumulate S_n = Σ_{k<n} h1(k) incrementally
    for n in 2..=n_max {
        let k = n - 1;
        let h2 = h2_global_bound(k, data, mode)?;
        let h1 = eigenspace_dim(k, data)? + &h2;
        s_n += &h1;
        let q_n = ladder.quotient_q(n).clone();
        let gap = &q_n - &s_n;
        if crossing.is_none() && gap.is_positive() {
            crossing = Some(n);
        }
        levels.push(BoundLevel {
            level: n,
            h2_summand: h2,
            h1_summand: h1,
            selmer_upper: s_n.clone(),
            quotient_q: q_n,
            gap,
        });
    }
    Ok(BoundReport {
        data: data.clone(),
        mode,
        levels,
        crossing,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::Rational;

    fn open_shape(g: u32, s: u32) -> CurveShape {
        CurveShape::open(g, s).unwrap()
    }

    #[test]
    fn away_bound_substitution() {
        assert_eq!(h2_local_away(2, 1, 2, 1), BigInt::from(6));
        assert_eq!(h2_local_away(1, 7, 3, 5), BigInt::from(5));
        assert_eq!(h2_local_away(4, 0, 2, 0), BigInt::zero());
    }

    #[test]
    fn atp_bound_substitution() {
        assert_eq!(h2_local_atp(2, 1, 1), BigInt::from(2));
        assert_eq!(h2_local_atp(1, 3, 4), BigInt::from(6));
        assert_eq!(h2_local_atp(3, 0, 3), BigInt::zero());
        // n=1, g=0: g⁰ = 1 keeps the s−1 term
        assert_eq!(h2_local_atp(1, 0, 3), BigInt::from(2));
    }

    #[test]
    fn conjecture2_vanishes_for_thrice_punctured_line() {
        let mut data = CurveData::with_defaults(open_shape(0, 3));
        data.away_places = vec![AwayPlace { gr1: 0, gr2: 0 }];
        for n in 2..=10 {
            assert_eq!(
                h2_global_bound(n, &data, BoundMode::Conjecture2).unwrap(),
                BigInt::zero()
            );
        }
    }

    #[test]
    fn fallback_below_threshold() {
        let mut data = CurveData::with_defaults(open_shape(0, 3));
        data.n0 = 4;
        data.k_const = 3;
        // below n0: K·d_n with d = 2,1,2
        assert_eq!(
            h2_global_bound(2, &data, BoundMode::Conjecture2).unwrap(),
            BigInt::from(3)
        );
        assert_eq!(
            h2_global_bound(3, &data, BoundMode::Conjecture2).unwrap(),
            BigInt::from(6)
        );
    }

    #[test]
    fn weak_jannsen_walkthrough() {
        // n=1, g=1, s=1, k=1, K=1 → 2
        let mut data = CurveData::with_defaults(open_shape(1, 1));
        data.jannsen_k = 1;
        assert_eq!(
            h2_global_bound(1, &data, BoundMode::WeakJannsen).unwrap(),
            BigInt::from(2)
        );
    }

    #[test]
    fn weak_jannsen_rejects_compact() {
        let data = CurveData::with_defaults(CurveShape {
            genus: 2,
            punctures: 0,
        });
        assert!(matches!(
            h2_global_bound(3, &data, BoundMode::WeakJannsen),
            Err(Error::InvalidShape(_))
        ));
    }

    #[test]
    fn selmer_upper_worked_example() {
        // g=0, s=3, conjecture2, n0=1, no away places, one at-p place
        let mut data = CurveData::with_defaults(open_shape(0, 3));
        data.away_places.clear();
        assert_eq!(
            selmer_upper(4, &data, BoundMode::Conjecture2).unwrap(),
            BigInt::from(5)
        );
        // single-summand case n=2: eig(1) + h2(1) = 1 + 2
        assert_eq!(
            selmer_upper(2, &data, BoundMode::Conjecture2).unwrap(),
            BigInt::from(3)
        );
    }

    #[test]
    fn crossing_exists_for_default_data() {
        let data = CurveData::with_defaults(open_shape(0, 3));
        let report = find_crossing(&data, BoundMode::Conjecture2, 50).unwrap();
        let n_star = report.crossing.expect("crossing within 50");
        assert!(n_star <= 50);
        assert!(!report.warnings.is_empty());
        // gap nondecreasing from the crossing onward
        let mut prev: Option<BigInt> = None;
        for lvl in &report.levels {
            if lvl.level >= n_star {
                if let Some(p) = &prev {
                    assert!(&lvl.gap >= p, "gap dropped at level {}", lvl.level);
                }
                prev = Some(lvl.gap.clone());
            }
        }
    }

    #[test]
    fn monotonicity_of_bounds() {
        let data = CurveData::with_defaults(open_shape(1, 2));
        let report = find_crossing(&data, BoundMode::Conjecture2, 12).unwrap();
        for pair in report.levels.windows(2) {
            assert!(pair[1].selmer_upper >= pair[0].selmer_upper);
            assert!(pair[1].quotient_q >= pair[0].quotient_q);
        }
    }

    #[test]
    fn compact_report_generation() {
        let data = CurveData::with_defaults(CurveShape {
            genus: 2,
            punctures: 0,
        });
        let report = find_crossing(&data, BoundMode::Conjecture2, 8).unwrap();
        assert_eq!(report.levels.len(), 7);
    }

    #[test]
    fn no_crossing_with_heavy_bounds() {
        let mut data = CurveData::with_defaults(open_shape(0, 3));
        data.k_const = 100;
        data.n0 = 10;
        let report = find_crossing(&data, BoundMode::Conjecture2, 2).unwrap();
        assert_eq!(report.crossing, None);
    }

    #[test]
    fn weak_jannsen_ratio_shrinks() {
        // g=1, s=1, k=2, K=1: bound(n)/2ⁿ = (15/16)^⌊n/4⌋, nonincreasing
        // in n and strictly smaller at 40 than at 20.
        let data = CurveData::with_defaults(open_shape(1, 1));
        let ratio = |n: u64| {
            let b = h2_global_bound(n, &data, BoundMode::WeakJannsen).unwrap();
            Rational::new(b, BigInt::from(2).pow(n as u32))
        };
        let mut prev = ratio(20);
        for n in 21..=40 {
            let r = ratio(n);
            assert!(r <= prev, "ratio increased at n = {n}");
            prev = r;
        }
        assert!(ratio(40) < ratio(20));
    }
}
