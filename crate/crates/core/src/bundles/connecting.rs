//! The connecting morphisms of the filtration sequences, each computed twice:
//! by the closed cochain formula and by lifting chartwise and differentiating.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::{rational, Derivation, LaurentPoly, TruncElem};
use crate::cech::{self, Cochain, CohClass, Cover, LineBundleData, Simplex};
use crate::multischeme::{ideal_extensions, extend_scheme, MultiScheme};
use crate::{Error, Result};

use super::matrix::{laurent_mat_vec, LaurentMatrix};
use super::BundleCocycle;

#[derive(Clone, Debug, Serialize)]
pub struct Delta0Result {
    pub formula: Cochain,
    pub oracle: Cochain,
    /// `δτ = formula − oracle`.
    pub witness: Cochain,
    pub exact: bool,
    pub class: CohClass,
}

fn upper(cover: Cover) -> Vec<(usize, usize)> {
    cover.ordered_pairs().into_iter().filter(|(i, j)| i < j).collect()
}

/// Checks that `η` is a section of L^m: regular on each chart and
/// `η_i = u_ij·η_j`.
fn check_line_section(cover: Cover, m_degree: i64, eta: &BTreeMap<usize, LaurentPoly>) -> Result<()> {
    let lb = LineBundleData::new(m_degree);
    for c in 0..cover.charts() {
        let v = eta
            .get(&c)
            .ok_or_else(|| Error::Mismatch(format!("section has no value on chart {c}")))?;
        if !cech::is_regular_on(c, v) {
            return Err(Error::NotRegular {
                chart: c,
                detail: format!("{v}"),
            });
        }
    }
    for (i, j) in cover.ordered_pairs() {
        if eta[&i] != &lb.transition(i, j) * &eta[&j] {
            return Err(Error::CocycleViolation {
                overlap: format!("{i}{j}"),
                detail: format!("η_{i} ≠ α^{{m}}·η_{j} for a section of O({m_degree})"),
            });
        }
    }
    Ok(())
}

/// `δ⁰` by definition: a section of `O_{X_n}` given chartwise, lifted with a
/// zero `t^n` coefficient to `X_{n+1}`; the differential `δ*_ij(ã_j) − ã_i`
/// lands in `L^n·t^n`.
pub fn delta0_oracle(big: &MultiScheme, section: &BTreeMap<usize, TruncElem>) -> Result<Cochain> {
    let nn = big.n();
    if nn < 2 {
        return Err(Error::Range("δ⁰ needs a target of multiplicity at least 2".into()));
    }
    let n = nn - 1;
    let cover = big.cover();
    let small = big.restrict_multiplicity(n)?;
    for c in 0..cover.charts() {
        let a = section
            .get(&c)
            .ok_or_else(|| Error::Mismatch(format!("section has no value on chart {c}")))?;
        if a.n() != n {
            return Err(Error::Multiplicity(a.n(), n));
        }
        if let Some(f) = a.coeffs().iter().find(|f| !cech::is_regular_on(c, f)) {
            return Err(Error::NotRegular {
                chart: c,
                detail: format!("{f}"),
            });
        }
    }
    for (i, j) in cover.ordered_pairs() {
        if section[&i] != small.gluing(i, j).apply(&section[&j]) {
            return Err(Error::CocycleViolation {
                overlap: format!("{i}{j}"),
                detail: "a_i ≠ δ*_ij(a_j): not a section of the structure sheaf".into(),
            });
        }
    }
    let mut vals = Vec::new();
    for (i, j) in upper(cover) {
        let lift_j = section[&j].resize(nn);
        let lift_i = section[&i].resize(nn);
        let d = &big.gluing(i, j).apply(&lift_j) - &lift_i;
        if d.coeffs()[..n].iter().any(|f| !f.is_zero()) {
            return Err(Error::Internal("lifted differential does not land in the last filtration piece".into()));
        }
        vals.push((vec![i, j], d.coeff(n).clone()));
    }
    Cochain::new(cover, LineBundleData::new(n as i64 * big.l_degree()), 1, vals)
}

/// `δ⁰: H⁰(L^{n−1}) → H¹(L^n)` over `X_{n+1}` by the closed formula
/// `α^{n−1}·D_ij(η_j) + (n−1)·α^{n−2}·α^{(1)}_ij·η_j`, next to the oracle
/// applied to the section `η·t^{n−1}` of `O_{X_n}`.
pub fn delta0(big: &MultiScheme, eta: &BTreeMap<usize, LaurentPoly>) -> Result<Delta0Result> {
    let nn = big.n();
    if nn < 2 {
        return Err(Error::Range("δ⁰ needs a target of multiplicity at least 2".into()));
    }
    let n = nn - 1;
    let l = big.l_degree();
    let cover = big.cover();
    check_line_section(cover, (n as i64 - 1) * l, eta)?;
    let mut vals = Vec::new();
    for (i, j) in upper(cover) {
        let a0 = big.l_transition(i, j);
        let dj = Derivation::new(big.gluing(i, j).derivation_part()).apply(&eta[&j]);
        let mut v = &a0.powi(n as i64 - 1)? * &dj;
        if n >= 2 {
            let a1 = big.ideal(i, j).coeff_or_zero(1);
            let c = rational::int(n as i64 - 1);
            v += &(&(&a0.powi(n as i64 - 2)? * &a1) * &eta[&j]).scale(&c);
        }
        vals.push((vec![i, j], v));
    }
    let formula = Cochain::new(cover, LineBundleData::new(n as i64 * l), 1, vals)?;
    let section = eta
        .iter()
        .map(|(c, f)| (*c, TruncElem::term(f.clone(), n - 1, n)))
        .collect();
    let oracle = delta0_oracle(big, &section)?;
    let diff = formula.sub(&oracle)?;
    let witness = cech::solve_coboundary(&diff)
        .ok_or_else(|| Error::NoWitness("δ⁰ formula and oracle differ by a non-coboundary".into()))?;
    let class = cech::reduce_h1_class(&formula)?;
    Ok(Delta0Result {
        exact: diff.is_zero(),
        formula,
        oracle,
        witness,
        class,
    })
}

/// A cochain valued in a rank-`r` bundle on the reduced curve, one vector per
/// increasing tuple, in the frame of the tuple's first chart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VectorCochain {
    pub rank: usize,
    pub q: usize,
    pub values: BTreeMap<Simplex, Vec<LaurentPoly>>,
}

impl VectorCochain {
    pub fn zero(cover: Cover, rank: usize, q: usize) -> Self {
        Self {
            rank,
            q,
            values: cover
                .simplices(q)
                .into_iter()
                .map(|s| (s, vec![LaurentPoly::zero(); rank]))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().flatten().all(LaurentPoly::is_zero)
    }

    fn sub(&self, other: &VectorCochain) -> VectorCochain {
        VectorCochain {
            rank: self.rank,
            q: self.q,
            values: self
                .values
                .iter()
                .map(|(s, v)| (s.clone(), v.iter().zip(&other.values[s]).map(|(a, b)| a - b).collect()))
                .collect(),
        }
    }

    /// Differential of a 1-cochain twisted by the transition matrices `m_ij`:
    /// `(δβ)_ijk = m_ij·β_jk − β_ik + β_ij`.
    pub fn coboundary_twisted(&self, m: &BTreeMap<(usize, usize), LaurentMatrix>) -> Result<VectorCochain> {
        if self.q != 1 || !self.values.contains_key(&vec![1, 2]) {
            return Err(Error::CoverTooSmall("twisted 2-coboundaries need a 1-cochain on three charts".into()));
        }
        let moved = laurent_mat_vec(&m[&(0, 1)], &self.values[&vec![1, 2]]);
        let v: Vec<LaurentPoly> = (0..self.rank)
            .map(|r| &(&moved[r] - &self.values[&vec![0, 2]][r]) + &self.values[&vec![0, 1]][r])
            .collect();
        Ok(VectorCochain {
            rank: self.rank,
            q: 2,
            values: [(vec![0, 1, 2], v)].into_iter().collect(),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Delta1Result {
    pub formula: VectorCochain,
    pub oracle: VectorCochain,
    /// A 1-cochain `τ` valued in `E|X⊗L` with twisted `δτ = formula − oracle`.
    pub witness: VectorCochain,
    /// A 1-cochain whose twisted differential is the formula cochain itself,
    /// certifying that the class vanishes.
    pub class_witness: VectorCochain,
    pub exact: bool,
}

fn twist_matrices(e: &BundleCocycle, with_l: bool) -> BTreeMap<(usize, usize), LaurentMatrix> {
    e.cover()
        .ordered_pairs()
        .into_iter()
        .map(|(i, j)| {
            let mut m = e.transition(i, j).reduction();
            if with_l {
                let a = e.scheme().l_transition(i, j).clone();
                m = m.into_iter().map(|row| row.into_iter().map(|f| &f * &a).collect()).collect();
            }
            ((i, j), m)
        })
        .collect()
}

/// A preimage under the twisted differential: on three charts `τ_01 = ν_012`
/// and zero elsewhere always works.
fn two_cochain_witness(nu: &VectorCochain, m: &BTreeMap<(usize, usize), LaurentMatrix>) -> Result<VectorCochain> {
    let mut tau = VectorCochain::zero(Cover::Three, nu.rank, 1);
    tau.values.insert(vec![0, 1], nu.values[&vec![0, 1, 2]].clone());
    if tau.coboundary_twisted(m)? != *nu {
        return Err(Error::Internal("twisted witness fails to reproduce the 2-cochain".into()));
    }
    Ok(tau)
}

/// `δ¹: H¹(E|X) → H²(E|X⊗L)` for a bundle on a double, by the closed formula
/// `θ^{(0)}_ij·D_ij(β_jk) + θ^{(1)}_ij·β_jk` and by lifting `β` chartwise.
pub fn delta1(e: &BundleCocycle, beta: &VectorCochain) -> Result<Delta1Result> {
    if e.cover() != Cover::Three {
        return Err(Error::CoverTooSmall("δ¹ lands in 2-cochains, which need the 3-chart cover".into()));
    }
    if e.n() != 2 {
        return Err(Error::Range(format!("δ¹ is computed for bundles on doubles, got multiplicity {}", e.n())));
    }
    let r = e.rank();
    if beta.rank != r || beta.q != 1 {
        return Err(Error::Mismatch(format!("β must be a 1-cochain with values of rank {r}")));
    }
    let twist0 = twist_matrices(e, false);
    if !beta.coboundary_twisted(&twist0)?.is_zero() {
        return Err(Error::NotCocycle("β violates the cocycle relation twisted by θ^(0)".into()));
    }
    let x = e.scheme();
    let th = e.transition(0, 1);
    let b12 = &beta.values[&vec![1, 2]];
    let der = Derivation::new(x.gluing(0, 1).derivation_part());
    let db12: Vec<LaurentPoly> = b12.iter().map(|f| der.apply(f)).collect();
    let f1 = laurent_mat_vec(&th.coeff(0), &db12);
    let f2 = laurent_mat_vec(&th.coeff(1), b12);
    let formula_v: Vec<LaurentPoly> = f1.iter().zip(&f2).map(|(a, b)| a + b).collect();
    let formula = VectorCochain {
        rank: r,
        q: 2,
        values: [(vec![0, 1, 2], formula_v)].into_iter().collect(),
    };
    let lift = |v: &Vec<LaurentPoly>| -> Vec<TruncElem> { v.iter().map(|f| TruncElem::constant(f.clone(), 2)).collect() };
    let moved: Vec<TruncElem> = lift(b12).iter().map(|a| x.gluing(0, 1).apply(a)).collect();
    let mut oracle_v = Vec::new();
    for row in 0..r {
        let mut acc = &TruncElem::constant(beta.values[&vec![0, 1]][row].clone(), 2)
            - &TruncElem::constant(beta.values[&vec![0, 2]][row].clone(), 2);
        for (col, m) in moved.iter().enumerate() {
            acc = &acc + &(th.entry(row, col) * m);
        }
        if !acc.coeff(0).is_zero() {
            return Err(Error::Internal("lifted β fails to be a cocycle mod t".into()));
        }
        oracle_v.push(acc.coeff(1).clone());
    }
    let oracle = VectorCochain {
        rank: r,
        q: 2,
        values: [(vec![0, 1, 2], oracle_v)].into_iter().collect(),
    };
    let twist1 = twist_matrices(e, true);
    let diff = formula.sub(&oracle);
    let witness = two_cochain_witness(&diff, &twist1)?;
    let class_witness = two_cochain_witness(&formula, &twist1)?;
    Ok(Delta1Result {
        exact: diff.is_zero(),
        formula,
        oracle,
        witness,
        class_witness,
    })
}

/// The difference of `δ⁰` over two extensions `X_3`, `X'_3` of one double whose
/// ideal choices differ by the cocycle `μ`, against the cup `η∪μ`.
#[derive(Clone, Debug, Serialize)]
pub struct Delta0Shift {
    pub lhs: Cochain,
    pub rhs: Cochain,
    pub exact: bool,
    /// `δτ = lhs − rhs`.
    pub witness: Cochain,
    pub lhs_class: CohClass,
    pub rhs_class: CohClass,
}

pub fn delta0_shift(x2: &MultiScheme, eta: &BTreeMap<usize, LaurentPoly>, mu: &Cochain) -> Result<Delta0Shift> {
    if x2.n() != 2 {
        return Err(Error::Range(format!("the δ⁰ shift compares extensions of a double, got n = {}", x2.n())));
    }
    let ext = ideal_extensions(x2)?;
    let base = extend_scheme(x2, &ext.reference())?;
    let moved = extend_scheme(x2, &ext.from_cocycle(mu)?)?;
    let d = delta0(&base, eta)?;
    let dm = delta0(&moved, eta)?;
    let lhs = dm.formula.sub(&d.formula)?;
    let eta_cochain = Cochain::new(
        x2.cover(),
        LineBundleData::new(x2.l_degree()),
        0,
        eta.iter().map(|(c, f)| (vec![*c], f.clone())),
    )?;
    let rhs = cech::cup(&eta_cochain, mu)?;
    let diff = lhs.sub(&rhs)?;
    let witness = cech::solve_coboundary(&diff)
        .ok_or_else(|| Error::NoWitness("δ⁰ shift differs from the cup by a non-coboundary".into()))?;
    Ok(Delta0Shift {
        exact: diff.is_zero(),
        lhs_class: cech::reduce_h1_class(&lhs)?,
        rhs_class: cech::reduce_h1_class(&rhs)?,
        lhs,
        rhs,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundles::pullback_line_bundle;
    use crate::multischeme::{derivation_cocycle, make_double, trivial_scheme};

    #[test]
    fn constants_have_zero_delta0() {
        let x2 = trivial_scheme(-3, 2, Cover::Three).unwrap();
        let one: BTreeMap<usize, LaurentPoly> = (0..3).map(|c| (c, LaurentPoly::one())).collect();
        let r = delta0(&x2, &one).unwrap();
        assert!(r.formula.is_zero() && r.oracle.is_zero());
        assert!(r.class.is_zero());
    }

    #[test]
    fn delta0_on_a_double_with_sections() {
        let d = derivation_cocycle(Cover::Three, 2, LaurentPoly::xpow(1), LaurentPoly::xpow(-1));
        let x2 = make_double(2, &d).unwrap();
        let ext = ideal_extensions(&x2).unwrap();
        let x3 = extend_scheme(&x2, &ext.reference()).unwrap();
        let lb = LineBundleData::new(2);
        let eta: BTreeMap<usize, LaurentPoly> = (0..3).map(|c| (c, &lb.transition(c, 0) * &LaurentPoly::x())).collect();
        let r = delta0(&x3, &eta).unwrap();
        assert!(r.exact);
        assert!(!r.formula.is_zero());
        let bad: BTreeMap<usize, LaurentPoly> = (0..3).map(|c| (c, LaurentPoly::x())).collect();
        assert!(delta0(&x3, &bad).is_err());
    }

    #[test]
    fn delta1_vanishes_on_trivial_pullback() {
        let x2 = trivial_scheme(-2, 2, Cover::Three).unwrap();
        let e = pullback_line_bundle(&x2, 1).unwrap();
        let beta = VectorCochain {
            rank: 1,
            q: 1,
            values: [
                (vec![0, 1], vec![LaurentPoly::xpow(-1)]),
                (vec![0, 2], vec![LaurentPoly::xpow(-1)]),
                (vec![1, 2], vec![LaurentPoly::zero()]),
            ]
            .into_iter()
            .collect(),
        };
        let r = delta1(&e, &beta).unwrap();
        assert!(r.formula.is_zero() && r.exact);
        let two = trivial_scheme(-2, 2, Cover::Two).unwrap();
        let e2 = pullback_line_bundle(&two, 1).unwrap();
        assert!(matches!(delta1(&e2, &beta), Err(Error::CoverTooSmall(_))));
    }
}
