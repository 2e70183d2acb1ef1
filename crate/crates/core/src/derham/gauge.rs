//! Lemma-3 gauge reduction: bring a strictly upper-triangular connection
//! matrix into the residue basis by superdiagonal induction.

use crate::{Error, Result};

use super::partial::{is_basis_valued, reduce_form, OneForm, PlaceSet};
use super::ratfunc::RatFunc;

/// Strictly upper-triangular r×r matrix of one-forms ω_{ij}·dz, stored as
/// the function coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnMatrix {
    rank: usize,
    entries: Vec<Vec<RatFunc>>,
}

impl ConnMatrix {
    pub fn new(rank: usize, entries: Vec<Vec<RatFunc>>) -> Result<Self> {
        if rank == 0 || entries.len() != rank || entries.iter().any(|r| r.len() != rank) {
            return Err(Error::ShapeMismatch(format!(
                "connection matrix must be {rank}×{rank}"
            )));
        }
        for (i, row) in entries.iter().enumerate() {
            for (j, f) in row.iter().enumerate() {
                if j <= i && !f.is_zero() {
                    return Err(Error::ShapeMismatch(format!(
                        "entry ({}, {}) must vanish below or on the diagonal",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(ConnMatrix { rank, entries })
    }

    pub fn zero(rank: usize) -> Self {
        ConnMatrix {
            rank,
            entries: vec![vec![RatFunc::zero(); rank]; rank],
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entry(&self, i: usize, j: usize) -> &RatFunc {
        &self.entries[i][j]
    }

    pub fn entry_form(&self, i: usize, j: usize) -> OneForm {
        OneForm::new(self.entries[i][j].clone())
    }

    pub fn is_strictly_upper(&self) -> bool {
        self.entries
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().take(i + 1).all(|f| f.is_zero()))
    }
}

/// Unipotent gauge matrix together with the reduced connection.
#[derive(Clone, Debug)]
pub struct GaugeResult {
    pub gauge: Vec<Vec<RatFunc>>,
    pub reduced: ConnMatrix,
    /// Individual superdiagonal steps in application order (debugging aid).
    pub factors: Vec<Vec<Vec<RatFunc>>>,
}

pub fn gauge_reduce(omega: &ConnMatrix, places: &PlaceSet) -> Result<GaugeResult> {
    let r = omega.rank();
    let mut current = omega.entries.clone();
    let mut total_gauge = mat_identity(r);
    let mut factors = Vec::new();

    for c in 1..r {
        for i in 0..r - c {
            let j = i + c;
            let red = reduce_form(&OneForm::new(current[i][j].clone()), places)?;
            if red.exact_part.is_zero() {
                continue;
            }
            // G = I − F·E_{ij} kills the dF part of ω_{ij} and only
            // touches strictly longer superdiagonals elsewhere.
            let mut g = mat_identity(r);
            g[i][j] = red.exact_part.neg();
            current = apply_gauge(&current, &g);
            total_gauge = mat_mul(&total_gauge, &g);
            factors.push(g);
        }
    }

    let reduced = ConnMatrix::new(r, current)?;
    for i in 0..r {
        for j in i + 1..r {
            if !is_basis_valued(&reduced.entry_form(i, j), places)? {
                return Err(Error::Internal(format!(
                    "entry ({}, {}) not basis-valued after reduction",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(GaugeResult {
        gauge: total_gauge,
        reduced,
        factors,
    })
}

/// ω ↦ G⁻¹ωG + G⁻¹dG on the dz-coefficient matrices.
pub fn apply_gauge(omega: &[Vec<RatFunc>], g: &[Vec<RatFunc>]) -> Vec<Vec<RatFunc>> {
    let ginv = unipotent_inverse(g);
    let conj = mat_mul(&mat_mul(&ginv, omega), g);
    mat_add(&conj, &mat_mul(&ginv, &mat_derivative(g)))
}

pub fn mat_identity(r: usize) -> Vec<Vec<RatFunc>> {
    let mut m = vec![vec![RatFunc::zero(); r]; r];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = RatFunc::one();
    }
    m
}

pub fn mat_mul(a: &[Vec<RatFunc>], b: &[Vec<RatFunc>]) -> Vec<Vec<RatFunc>> {
    let r = a.len();
    let mut out = vec![vec![RatFunc::zero(); r]; r];
    for i in 0..r {
        for k in 0..r {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..r {
                if b[k][j].is_zero() {
                    continue;
                }
                out[i][j] = out[i][j].add(&a[i][k].mul(&b[k][j]));
            }
        }
    }
    out
}

pub fn mat_add(a: &[Vec<RatFunc>], b: &[Vec<RatFunc>]) -> Vec<Vec<RatFunc>> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.add(y)).collect())
        .collect()
}

pub fn mat_sub(a: &[Vec<RatFunc>], b: &[Vec<RatFunc>]) -> Vec<Vec<RatFunc>> {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.sub(y)).collect())
        .collect()
}

pub fn mat_derivative(a: &[Vec<RatFunc>]) -> Vec<Vec<RatFunc>> {
    a.iter()
        .map(|row| row.iter().map(|f| f.derivative()).collect())
        .collect()
}

/// Inverse of a unipotent upper-triangular matrix via the finite Neumann
/// series (I + N)⁻¹ = Σ_{k<r} (−N)^k.
pub fn unipotent_inverse(g: &[Vec<RatFunc>]) -> Vec<Vec<RatFunc>> {
    let r = g.len();
    let neg_n: Vec<Vec<RatFunc>> = mat_sub(&mat_identity(r), g);
    let mut inv = mat_identity(r);
    let mut term = mat_identity(r);
    for _ in 1..r {
        term = mat_mul(&term, &neg_n);
        inv = mat_add(&inv, &term);
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse_ratfunc;
    use super::*;

    fn rf(text: &str) -> RatFunc {
        parse_ratfunc(text).unwrap()
    }

    fn conn2(f12: &str) -> ConnMatrix {
        ConnMatrix::new(
            2,
            vec![
                vec![RatFunc::zero(), rf(f12)],
                vec![RatFunc::zero(), RatFunc::zero()],
            ],
        )
        .unwrap()
    }

    fn check_identity(omega: &ConnMatrix, res: &GaugeResult) {
        let got = apply_gauge(&omega.entries, &res.gauge);
        let want = &res.reduced.entries;
        assert_eq!(&got, want, "gauge identity violated");
    }

    #[test]
    fn neumann_inverse() {
        let mut g = mat_identity(3);
        g[0][1] = rf("z");
        g[1][2] = rf("z^2");
        g[0][2] = rf("1/(z-1)");
        let inv = unipotent_inverse(&g);
        assert_eq!(mat_mul(&g, &inv), mat_identity(3));
        assert_eq!(mat_mul(&inv, &g), mat_identity(3));
    }

    #[test]
    fn rank2_exact_entry() {
        // ω₁₂ = z·dz reduces to zero with G = I − (z²/2)E₁₂
        let omega = conn2("z");
        let res = gauge_reduce(&omega, &PlaceSet::standard_p1()).unwrap();
        assert!(res.reduced.entry(0, 1).is_zero());
        assert_eq!(res.gauge[0][1], rf("-z^2/2"));
        check_identity(&omega, &res);
    }

    #[test]
    fn fixed_point_when_basis_valued() {
        let omega = conn2("1/z - 2/(z-1)");
        let res = gauge_reduce(&omega, &PlaceSet::standard_p1()).unwrap();
        assert_eq!(res.gauge, mat_identity(2));
        assert_eq!(res.reduced, omega);
        assert!(res.factors.is_empty());
        check_identity(&omega, &res);
    }

    #[test]
    fn rank3_correction_terms() {
        // ω₁₂ = ω₂₃ = dz, ω₁₃ = 0: reducing superdiagonal 1 feeds
        // correction terms into (1,3), which the second pass clears.
        let places = PlaceSet::standard_p1();
        let mut entries = vec![vec![RatFunc::zero(); 3]; 3];
        entries[0][1] = rf("1");
        entries[1][2] = rf("1");
        let omega = ConnMatrix::new(3, entries).unwrap();
        let res = gauge_reduce(&omega, &places).unwrap();
        for i in 0..3 {
            for j in i + 1..3 {
                assert!(
                    is_basis_valued(&res.reduced.entry_form(i, j), &places).unwrap()
                );
            }
        }
        assert!(res.reduced.is_strictly_upper());
        check_identity(&omega, &res);
        // the (1,3) entry of G picks up a genuine degree-2 correction
        assert!(!res.gauge[0][2].is_zero());
    }

    #[test]
    fn rejects_lower_triangular_input() {
        let mut entries = vec![vec![RatFunc::zero(); 2]; 2];
        entries[1][0] = rf("1");
        assert!(ConnMatrix::new(2, entries).is_err());
    }

    #[test]
    fn pole_errors_propagate() {
        let omega = conn2("1/(z-5)");
        let e = gauge_reduce(&omega, &PlaceSet::standard_p1()).unwrap_err();
        match e {
            crate::Error::PoleOutsidePlaces(_) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
