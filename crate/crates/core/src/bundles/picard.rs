//! Isomorphism testing of line bundles and the affine structure of
//! extensions from `X_n` to `X_{n+1}`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{LaurentPoly, TruncElem};
use crate::cech::{self, Cochain, CohClass, Cover, LineBundleData};
use crate::linalg;
use crate::multischeme::{trivial_scheme, MultiScheme};
use crate::{Error, Result};

use super::connecting::delta0_oracle;
use super::{extend_line_bundle, pullback_line_bundle, BundleCocycle};

#[derive(Clone, Debug, Serialize)]
pub struct IsoResult {
    pub isomorphic: bool,
    /// Units `μ_i` with `θ²_ij·δ*_ij(μ_j) = μ_i·θ¹_ij`.
    pub witness: Option<BTreeMap<usize, TruncElem>>,
    pub reason: String,
}

impl IsoResult {
    fn no(reason: String) -> Self {
        Self {
            isomorphic: false,
            witness: None,
            reason,
        }
    }
}

fn witness_holds(l1: &BundleCocycle, l2: &BundleCocycle, mu: &BTreeMap<usize, TruncElem>) -> bool {
    let x = l1.scheme();
    l1.cover().ordered_pairs().into_iter().all(|(i, j)| {
        let lhs = l2.transition(i, j).entry(0, 0) * &x.gluing(i, j).apply(&mu[&j]);
        let rhs = &mu[&i] * l1.transition(i, j).entry(0, 0);
        lhs == rhs
    })
}

/// Solves for the multiplicative coboundary order by order in `t`. At order
/// zero the ratio must be a constant on `01`; at order `k` the defect is an
/// O(kℓ)-valued 1-cochain whose additive primitive corrects every `μ_i`.
pub fn line_bundle_iso(l1: &BundleCocycle, l2: &BundleCocycle) -> Result<IsoResult> {
    if l1.rank() != 1 || l2.rank() != 1 {
        return Err(Error::Mismatch("isomorphism testing is for line bundles".into()));
    }
    if l1.scheme() != l2.scheme() {
        return Err(Error::Mismatch("bundles live on different schemes".into()));
    }
    let x = l1.scheme();
    let n = x.n();
    let cover = x.cover();
    let upper: Vec<(usize, usize)> = cover.ordered_pairs().into_iter().filter(|(i, j)| i < j).collect();
    let mut rho = BTreeMap::new();
    for &(i, j) in &upper {
        let r = l1.transition(i, j).entry(0, 0) * &l2.transition(i, j).entry(0, 0).inverse()?;
        rho.insert((i, j), r);
    }
    let r01 = rho[&(0, 1)].coeff(0);
    if r01.as_monomial().map(|(e, _)| e) != Some(0) {
        return Ok(IsoResult::no(format!("reduced transitions differ by {r01}, not a constant")));
    }
    let mut mu: BTreeMap<usize, TruncElem> = BTreeMap::new();
    mu.insert(0, TruncElem::one(n));
    mu.insert(1, TruncElem::constant(r01.clone(), n));
    if cover == Cover::Three {
        let r02 = rho[&(0, 2)].coeff(0).clone();
        let r12 = rho[&(1, 2)].coeff(0);
        if *r12 != &r02 * &r01.unit_inverse()? {
            return Ok(IsoResult::no("reduced ratios are not a multiplicative coboundary".into()));
        }
        mu.insert(2, TruncElem::constant(r02, n));
    }
    for k in 1..n {
        let lb = LineBundleData::new(k as i64 * x.l_degree());
        let mut vals = Vec::new();
        for &(i, j) in &upper {
            let moved = x.gluing(i, j).apply(&mu[&j]);
            let q = &(&rho[&(i, j)] * &mu[&i]) * &moved.inverse()?;
            if q.truncate(k) != TruncElem::one(k) {
                return Err(Error::Internal(format!("lower orders not cleared at order {k}")));
            }
            vals.push((vec![i, j], q.coeff(k).clone()));
        }
        let defect = Cochain::new(cover, lb, 1, vals)?;
        let Some(m) = cech::solve_coboundary(&defect) else {
            let class = if defect.is_cocycle() {
                format!("{:?}", cech::reduce_h1_class(&defect)?.coeffs)
            } else {
                "not a cocycle".into()
            };
            return Ok(IsoResult::no(format!("order-{k} defect has no primitive (class {class})")));
        };
        for (c, v) in mu.iter_mut() {
            let factor = &TruncElem::one(n) + &TruncElem::term(m.value(&[*c]).clone(), k, n);
            *v = &*v * &factor;
        }
    }
    if !witness_holds(l1, l2, &mu) {
        return Err(Error::Internal("isomorphism witness failed verification".into()));
    }
    Ok(IsoResult {
        isomorphic: true,
        witness: Some(mu),
        reason: "witness verified on every overlap".into(),
    })
}

fn is_section(x: &MultiScheme, a: &BTreeMap<usize, TruncElem>) -> bool {
    x.cover()
        .ordered_pairs()
        .into_iter()
        .all(|(i, j)| a[&i] == x.gluing(i, j).apply(&a[&j]))
}

/// Global functions on `X_n` used to probe the image of `δ⁰`: the constant 1
/// and each chartwise monomial section `η·t^k` of `L^k` that glues.
pub fn structure_sections(x: &MultiScheme) -> Vec<BTreeMap<usize, TruncElem>> {
    let n = x.n();
    let charts = x.cover().charts();
    let mut out = vec![(0..charts).map(|c| (c, TruncElem::one(n))).collect()];
    for k in 1..n {
        let d = k as i64 * x.l_degree();
        let lb = LineBundleData::new(d);
        for e in 0..=d {
            let a: BTreeMap<usize, TruncElem> = (0..charts)
                .map(|c| (c, TruncElem::term(&lb.transition(c, 0) * &LaurentPoly::xpow(e), k, n)))
                .collect();
            if is_section(x, &a) {
                out.push(a);
            }
        }
    }
    out
}

/// Extensions of a line bundle `D` on `X_n` to `X_{n+1}`: a torsor under
/// `H¹(O(nℓ))`, whose isomorphism classes are the quotient by `im δ⁰`.
#[derive(Clone, Debug, Serialize)]
pub struct ExtensionTorsor {
    pub n: usize,
    pub param_degree: i64,
    pub torsor_dim: usize,
    pub image_dim: usize,
    pub quotient_dim: usize,
    pub image_basis: Vec<CohClass>,
    /// Basis classes spanning a complement of the image.
    pub representatives: Vec<CohClass>,
    pub sections_tested: usize,
}

impl ExtensionTorsor {
    pub fn in_image(&self, class: &CohClass) -> bool {
        let mut m: linalg::Matrix = self.image_basis.iter().map(|c| c.coeffs.clone()).collect();
        let before = linalg::rank(&m);
        m.push(class.coeffs.clone());
        linalg::rank(&m) == before
    }

    /// The extension `(1 + β t^n)·θ̃` for the canonical representative of a
    /// class.
    pub fn extension(&self, d: &BundleCocycle, big: &MultiScheme, class: &CohClass) -> Result<BundleCocycle> {
        let beta = cech::h1_representative(class, big.cover())?;
        extend_line_bundle(d, big, &beta)
    }
}

pub fn extension_classes(d: &BundleCocycle, big: &MultiScheme) -> Result<ExtensionTorsor> {
    if d.rank() != 1 {
        return Err(Error::Mismatch("extension classes are computed for line bundles".into()));
    }
    let n = d.n();
    if big.n() != n + 1 || big.restrict_multiplicity(n)? != *d.scheme() {
        return Err(Error::Mismatch("target scheme does not restrict to the bundle's scheme".into()));
    }
    let param_degree = n as i64 * big.l_degree();
    let torsor_dim = cech::cohomology_dim(param_degree, 1);
    let sections = structure_sections(d.scheme());
    let mut rows = Vec::new();
    for a in &sections {
        let c = delta0_oracle(big, a)?;
        rows.push(cech::reduce_h1_class(&c)?.coeffs);
    }
    let mut m = rows;
    let pivots = linalg::rref(&mut m, torsor_dim);
    let image_basis: Vec<CohClass> = m
        .into_iter()
        .take(pivots.len())
        .map(|row| CohClass::from_coeffs(1, param_degree, row))
        .collect::<Result<_>>()?;
    let representatives = (0..torsor_dim)
        .filter(|k| !pivots.contains(k))
        .map(|k| CohClass::basis(1, param_degree, k))
        .collect();
    debug_assert!(image_basis.iter().all(|c| !c.coeffs.iter().all(Zero::is_zero)));
    Ok(ExtensionTorsor {
        n,
        param_degree,
        torsor_dim,
        image_dim: pivots.len(),
        quotient_dim: torsor_dim - pivots.len(),
        image_basis,
        representatives,
        sections_tested: sections.len(),
    })
}

/// Fiber dimensions of `Pic(X_{k+1}) → Pic(X_k)` for `k = 1, …, x.n()−1`,
/// probed at the trivial bundle.
pub fn picard_ledger_for(x: &MultiScheme) -> Result<Vec<ExtensionTorsor>> {
    (1..x.n())
        .map(|k| {
            let big = x.restrict_multiplicity(k + 1)?;
            let d = pullback_line_bundle(&big.restrict_multiplicity(k)?, 0)?;
            extension_classes(&d, &big)
        })
        .collect()
}

/// [`picard_ledger_for`] on the trivial scheme of multiplicity `n_max`.
pub fn picard_ledger(l_degree: i64, n_max: usize) -> Result<Vec<usize>> {
    if n_max < 2 {
        return Err(Error::Range(format!("the ledger needs n_max ≥ 2, got {n_max}")));
    }
    let x = trivial_scheme(l_degree, n_max, Cover::Three)?;
    Ok(picard_ledger_for(&x)?.into_iter().map(|t| t.quotient_dim).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ledger_minus_three() {
        assert_eq!(picard_ledger(-3, 3).unwrap(), vec![2, 5]);
        assert_eq!(picard_ledger(0, 4).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn iso_basics() {
        let x = trivial_scheme(-2, 3, Cover::Three).unwrap();
        let a = pullback_line_bundle(&x, 2).unwrap();
        let b = pullback_line_bundle(&x, 3).unwrap();
        assert!(line_bundle_iso(&a, &a).unwrap().isomorphic);
        assert!(!line_bundle_iso(&a, &b).unwrap().isomorphic);
    }

    #[test]
    fn nonzero_class_gives_new_extension() {
        let x2 = trivial_scheme(-2, 2, Cover::Three).unwrap();
        let d = pullback_line_bundle(&x2.restrict_multiplicity(1).unwrap(), 0).unwrap();
        let t = extension_classes(&d, &x2).unwrap();
        assert_eq!((t.torsor_dim, t.quotient_dim), (1, 1));
        let e0 = t.extension(&d, &x2, &CohClass::zero(1, -2)).unwrap();
        let e1 = t.extension(&d, &x2, &t.representatives[0]).unwrap();
        assert!(e1.is_valid());
        assert!(!line_bundle_iso(&e0, &e1).unwrap().isomorphic);
        assert_eq!(e1.restrict(1).unwrap(), d);
    }
}
