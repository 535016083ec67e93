//! Vector bundles on multiple schemes, given by transition matrices over the
//! truncated rings, with the relation `θ_ik = θ_ij·δ*_ij(θ_jk)`.

mod connecting;
mod filtration;
mod matrix;
mod picard;

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::algebra::{LaurentPoly, TruncElem};
use crate::cech::{self, Cochain, CohClass, Cover};
use crate::multischeme::{pair_key, parse_pair_map, MultiScheme, Pair, ValidationReport, Violation};
use crate::{Error, Result};

pub use connecting::{
    delta0, delta0_oracle, delta0_shift, delta1, Delta0Result, Delta0Shift, Delta1Result, VectorCochain,
};
pub use filtration::{module_type, ModuleType, TruncModulePresentation};
pub use matrix::{
    laurent_add, laurent_det, laurent_identity, laurent_inverse, laurent_is_zero, laurent_mat_vec, laurent_mul,
    laurent_sub, laurent_zero, LaurentMatrix, TruncMatrix,
};
pub use picard::{
    extension_classes, line_bundle_iso, picard_ledger, picard_ledger_for, ExtensionTorsor, IsoResult,
};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BundleCocycle {
    scheme: MultiScheme,
    rank: usize,
    transitions: BTreeMap<Pair, TruncMatrix>,
}

fn upper_pairs(cover: Cover) -> Vec<Pair> {
    cover.ordered_pairs().into_iter().filter(|(i, j)| i < j).collect()
}

impl BundleCocycle {
    /// Shapes only; relations are checked by [`BundleCocycle::validate`].
    pub fn from_parts(scheme: MultiScheme, transitions: BTreeMap<Pair, TruncMatrix>) -> Result<Self> {
        let pairs = scheme.cover().ordered_pairs();
        let rank = transitions
            .values()
            .next()
            .map(TruncMatrix::rank)
            .ok_or_else(|| Error::Parse("no transitions".into()))?;
        for p in &pairs {
            let th = transitions
                .get(p)
                .ok_or_else(|| Error::Parse(format!("missing transition on overlap {}", pair_key(*p))))?;
            if th.rank() != rank {
                return Err(Error::Parse(format!("transition on {} has rank {}, expected {rank}", pair_key(*p), th.rank())));
            }
            if th.n() != scheme.n() {
                return Err(Error::Multiplicity(th.n(), scheme.n()));
            }
        }
        if transitions.len() != pairs.len() {
            return Err(Error::Parse("transitions on overlaps outside the cover".into()));
        }
        Ok(Self {
            scheme,
            rank,
            transitions,
        })
    }

    /// Fills in whatever is missing from the increasing-pair data: `θ_02` from
    /// `θ_01·δ*_01(θ_12)` and reverse pairs from `θ_ji = δ*_ji(θ_ij⁻¹)`.
    /// The result must validate.
    pub fn from_upper(scheme: MultiScheme, mut upper: BTreeMap<Pair, TruncMatrix>) -> Result<Self> {
        let cover = scheme.cover();
        for p in [(0, 1)].into_iter().chain(if cover == Cover::Three { Some((1, 2)) } else { None }) {
            if !upper.contains_key(&p) {
                return Err(Error::Parse(format!("missing transition on overlap {}", pair_key(p))));
            }
        }
        if cover == Cover::Three && !upper.contains_key(&(0, 2)) {
            let t02 = upper[&(0, 1)].mul(&upper[&(1, 2)].apply(scheme.gluing(0, 1)));
            upper.insert((0, 2), t02);
        }
        let mut all = BTreeMap::new();
        for p in upper_pairs(cover) {
            let th = upper[&p].clone();
            if th.n() != scheme.n() {
                return Err(Error::Multiplicity(th.n(), scheme.n()));
            }
            let rev = th.inverse()?.apply(scheme.gluing(p.1, p.0));
            all.insert((p.1, p.0), rev);
            all.insert(p, th);
        }
        for (p, th) in upper {
            if p.0 > p.1 {
                all.insert(p, th);
            }
        }
        let e = Self::from_parts(scheme, all)?;
        e.check()?;
        Ok(e)
    }

    pub fn scheme(&self) -> &MultiScheme {
        &self.scheme
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn n(&self) -> usize {
        self.scheme.n()
    }

    pub fn cover(&self) -> Cover {
        self.scheme.cover()
    }

    pub fn transition(&self, i: usize, j: usize) -> &TruncMatrix {
        &self.transitions[&(i, j)]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (&Pair, &TruncMatrix)> {
        self.transitions.iter()
    }

    /// Degree of the reduction, read off `det θ_01^{(0)} = c·x^d`.
    pub fn degree(&self) -> Result<i64> {
        let det = laurent_det(&self.transitions[&(0, 1)].reduction());
        det.as_monomial()
            .map(|(e, _)| e)
            .ok_or_else(|| Error::NotUnit(format!("reduced determinant {det} on overlap 01")))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        for w in self.scheme.validate().violations {
            v.push(Violation {
                relation: format!("scheme: {}", w.relation),
                ..w
            });
        }
        for (p, th) in &self.transitions {
            if laurent_inverse(&th.reduction()).is_err() {
                v.push(Violation {
                    relation: "reduction invertible".into(),
                    overlap: pair_key(*p),
                    detail: format!("det θ^(0) = {}", laurent_det(&th.reduction())),
                });
            }
        }
        if !v.is_empty() {
            return ValidationReport::from_violations(v);
        }
        let cover = self.cover();
        for (i, j) in cover.ordered_pairs() {
            let prod = self.transitions[&(i, j)].mul(&self.transitions[&(j, i)].apply(self.scheme.gluing(i, j)));
            if !prod.is_identity() {
                v.push(Violation {
                    relation: "θ_ij·δ*_ij(θ_ji) = I".into(),
                    overlap: pair_key((i, j)),
                    detail: format!("{prod:?}"),
                });
            }
        }
        for (i, j, k) in cover.ordered_triples() {
            let rhs = self.transitions[&(i, j)].mul(&self.transitions[&(j, k)].apply(self.scheme.gluing(i, j)));
            if rhs != self.transitions[&(i, k)] {
                v.push(Violation {
                    relation: "θ_ik = θ_ij·δ*_ij(θ_jk)".into(),
                    overlap: format!("{i}{j}{k}"),
                    detail: format!("{:?} vs {rhs:?}", self.transitions[&(i, k)]),
                });
            }
        }
        ValidationReport::from_violations(v)
    }

    pub fn is_valid(&self) -> bool {
        self.validate().valid
    }

    /// The first violation as an error.
    pub fn check(&self) -> Result<()> {
        match self.validate().violations.into_iter().next() {
            None => Ok(()),
            Some(w) => Err(Error::CocycleViolation {
                overlap: w.overlap,
                detail: format!("{}: {}", w.relation, w.detail),
            }),
        }
    }

    /// Truncation mod `t^m` over the restricted scheme.
    pub fn restrict(&self, m: usize) -> Result<BundleCocycle> {
        let scheme = self.scheme.restrict_multiplicity(m)?;
        Ok(BundleCocycle {
            scheme,
            rank: self.rank,
            transitions: self.transitions.iter().map(|(p, th)| (*p, th.resize(m))).collect(),
        })
    }

    fn same_scheme(&self, other: &BundleCocycle) -> Result<()> {
        if self.scheme != other.scheme {
            return Err(Error::Mismatch("bundles live on different schemes".into()));
        }
        Ok(())
    }

    pub fn tensor(&self, other: &BundleCocycle) -> Result<BundleCocycle> {
        self.same_scheme(other)?;
        Ok(BundleCocycle {
            scheme: self.scheme.clone(),
            rank: self.rank * other.rank,
            transitions: self
                .transitions
                .iter()
                .map(|(p, th)| (*p, th.kron(&other.transitions[p])))
                .collect(),
        })
    }

    pub fn direct_sum(&self, other: &BundleCocycle) -> Result<BundleCocycle> {
        self.same_scheme(other)?;
        Ok(BundleCocycle {
            scheme: self.scheme.clone(),
            rank: self.rank + other.rank,
            transitions: self
                .transitions
                .iter()
                .map(|(p, th)| (*p, th.block_diag(&other.transitions[p])))
                .collect(),
        })
    }

    /// `θ'_ij = (I + β_ij t^k)·θ_ij` on increasing pairs, reverse pairs
    /// recomputed. Only the top order `k = n−1` is allowed: below it the
    /// derivation part of `δ*` leaves terms at orders `k+1, …, n−1`. The
    /// result is a bundle exactly when `β` is a cocycle of End(E)⊗L^k.
    pub fn twist(&self, k: usize, beta: &BTreeMap<Pair, LaurentMatrix>) -> Result<BundleCocycle> {
        let n = self.n();
        if k == 0 || k + 1 != n {
            return Err(Error::Range(format!("twist at order {k} on multiplicity {n}")));
        }
        let mut upper = BTreeMap::new();
        for p in upper_pairs(self.cover()) {
            let b = beta
                .get(&p)
                .ok_or_else(|| Error::Mismatch(format!("β missing on overlap {}", pair_key(p))))?;
            if b.len() != self.rank || b.iter().any(|row| row.len() != self.rank) {
                return Err(Error::Mismatch(format!("β on {} is not {}×{}", pair_key(p), self.rank, self.rank)));
            }
            let factor = TruncMatrix::identity(self.rank, n).add(&TruncMatrix::term(b, k, n));
            upper.insert(p, factor.mul(&self.transitions[&p]));
        }
        BundleCocycle::from_upper(self.scheme.clone(), upper)
    }

    /// Rank-one twist by an O(kℓ)-valued 1-cochain.
    pub fn twist_line(&self, k: usize, beta: &Cochain) -> Result<BundleCocycle> {
        check_line_parameter(self, k, beta)?;
        self.twist(k, &line_parameter(beta))
    }

    /// New local frames `s'_i = g_i·s_i`: `θ'_ij = g_i·θ_ij·δ*_ij(g_j)⁻¹`. Each
    /// `g_i` and its inverse must be regular on chart `i`.
    pub fn change_frame(&self, g: &[TruncMatrix]) -> Result<BundleCocycle> {
        if g.len() != self.cover().charts() {
            return Err(Error::Mismatch(format!("{} frame changes for {} charts", g.len(), self.cover().charts())));
        }
        let mut inv = Vec::new();
        for (c, m) in g.iter().enumerate() {
            if m.rank() != self.rank || m.n() != self.n() {
                return Err(Error::Mismatch(format!("frame change on chart {c} has the wrong shape")));
            }
            let mi = m.inverse()?;
            let regular = |t: &TruncMatrix| {
                t.rows()
                    .iter()
                    .flatten()
                    .all(|a| a.coeffs().iter().all(|f| cech::is_regular_on(c, f)))
            };
            if !regular(m) || !regular(&mi) {
                return Err(Error::NotRegular {
                    chart: c,
                    detail: "frame change or its inverse has poles on the chart".into(),
                });
            }
            inv.push(mi);
        }
        let transitions = self
            .transitions
            .iter()
            .map(|(&(i, j), th)| ((i, j), g[i].mul(th).mul(&inv[j].apply(self.scheme.gluing(i, j)))))
            .collect();
        let out = BundleCocycle {
            scheme: self.scheme.clone(),
            rank: self.rank,
            transitions,
        };
        out.check()?;
        Ok(out)
    }

    /// The chartwise lift of `θ` to `X_{n+1}` with zero `t^n` coefficients
    /// on `01` and `12`; `02` is completed multiplicatively.
    pub fn reference_lift(&self, big: &MultiScheme) -> Result<BundleCocycle> {
        if big.n() != self.n() + 1 || big.restrict_multiplicity(self.n())? != self.scheme {
            return Err(Error::Mismatch("target scheme does not restrict to the bundle's scheme".into()));
        }
        let mut upper = BTreeMap::new();
        upper.insert((0, 1), self.transitions[&(0, 1)].resize(big.n()));
        if self.cover() == Cover::Three {
            upper.insert((1, 2), self.transitions[&(1, 2)].resize(big.n()));
        }
        BundleCocycle::from_upper(big.clone(), upper)
    }
}

fn check_line_parameter(e: &BundleCocycle, k: usize, beta: &Cochain) -> Result<()> {
    let expected = k as i64 * e.scheme.l_degree();
    if e.rank != 1 || beta.q() != 1 || beta.degree() != expected || beta.cover() != e.cover() {
        return Err(Error::Mismatch(format!(
            "expected a 1-cochain of O({expected}) for a line bundle on the same cover"
        )));
    }
    Ok(())
}

fn line_parameter(beta: &Cochain) -> BTreeMap<Pair, LaurentMatrix> {
    upper_pairs(beta.cover())
        .into_iter()
        .map(|(i, j)| ((i, j), vec![vec![beta.value(&[i, j]).clone()]]))
        .collect()
}

/// Rank-one bundle from units on increasing overlaps.
pub fn make_line_bundle(x: &MultiScheme, transitions: BTreeMap<Pair, TruncElem>) -> Result<BundleCocycle> {
    for (p, a) in &transitions {
        if !a.is_unit() {
            return Err(Error::NotUnit(format!("transition on overlap {}: {a}", pair_key(*p))));
        }
    }
    let upper = transitions.into_iter().map(|(p, a)| (p, TruncMatrix::scalar(a))).collect();
    BundleCocycle::from_upper(x.clone(), upper)
}

pub fn make_bundle(x: &MultiScheme, transitions: BTreeMap<Pair, TruncMatrix>) -> Result<BundleCocycle> {
    BundleCocycle::from_upper(x.clone(), transitions)
}

/// The pullback of O(d): `θ_01 = x^d`, `θ_12 = x^{-d}` on the chart frames.
pub fn pullback_line_bundle(x: &MultiScheme, d: i64) -> Result<BundleCocycle> {
    let n = x.n();
    let mut upper = BTreeMap::new();
    upper.insert((0, 1), TruncElem::constant(LaurentPoly::xpow(d), n));
    if x.cover() == Cover::Three {
        upper.insert((1, 2), TruncElem::constant(LaurentPoly::xpow(-d), n));
    }
    make_line_bundle(x, upper)
}

/// Direct sum of pullbacks, one per degree.
pub fn split_bundle(x: &MultiScheme, degrees: &[i64]) -> Result<BundleCocycle> {
    let (first, rest) = degrees
        .split_first()
        .ok_or_else(|| Error::Range("a split bundle needs at least one summand".into()))?;
    let mut e = pullback_line_bundle(x, *first)?;
    for d in rest {
        e = e.direct_sum(&pullback_line_bundle(x, *d)?)?;
    }
    Ok(e)
}

pub fn restrict_bundle(e: &BundleCocycle, m: usize) -> Result<BundleCocycle> {
    e.restrict(m)
}

/// `((I + β_ij t^n)·θ̃_ij)` over the reference lift `θ̃` on `X_{n+1}`.
pub fn extend_bundle(
    e: &BundleCocycle,
    big: &MultiScheme,
    beta: &BTreeMap<Pair, LaurentMatrix>,
) -> Result<BundleCocycle> {
    let lift = e.reference_lift(big)?;
    if beta.values().all(laurent_is_zero) {
        return Ok(lift);
    }
    lift.twist(e.n(), beta)
}

/// Rank-one [`extend_bundle`] with `β` an O(nℓ)-valued 1-cocycle.
pub fn extend_line_bundle(e: &BundleCocycle, big: &MultiScheme, beta: &Cochain) -> Result<BundleCocycle> {
    check_line_parameter(e, e.n(), beta)?;
    if !beta.is_cocycle() {
        return Err(Error::NotCocycle("β is not a cocycle".into()));
    }
    extend_bundle(e, big, &line_parameter(beta))
}

/// ∇₀ of a bundle on the reduced curve as classes in H¹(Ω) = H¹(O(-2)):
/// the trace of `(dθ)θ⁻¹`, and each diagonal entry when every transition is
/// diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalClass {
    pub trace: CohClass,
    pub trace_cochain: Cochain,
    pub diagonal: Option<Vec<CohClass>>,
}

impl Serialize for CanonicalClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            trace: &'a CohClass,
            diagonal: &'a Option<Vec<CohClass>>,
        }
        Out {
            trace: &self.trace,
            diagonal: &self.diagonal,
        }
        .serialize(s)
    }
}

fn omega_class(cover: Cover, raw: Vec<(Vec<usize>, LaurentPoly)>) -> Result<(Cochain, CohClass)> {
    let c = Cochain::from_tangent_frame(cover, 0, -1, 1, raw)?;
    let class = cech::reduce_h1_class(&c)?;
    Ok((c, class))
}

pub fn canonical_class(e: &BundleCocycle) -> Result<CanonicalClass> {
    let red = e.restrict(1)?;
    let cover = red.cover();
    let mut trace_raw = Vec::new();
    let mut forms = BTreeMap::new();
    for p in upper_pairs(cover) {
        let th = red.transitions[&p].reduction();
        let dth: LaurentMatrix = th.iter().map(|row| row.iter().map(LaurentPoly::derivative).collect()).collect();
        let form = laurent_mul(&dth, &laurent_inverse(&th)?);
        let mut tr = LaurentPoly::zero();
        for (i, row) in form.iter().enumerate() {
            tr += &row[i];
        }
        trace_raw.push((vec![p.0, p.1], tr));
        forms.insert(p, (th, form));
    }
    let (trace_cochain, trace) = omega_class(cover, trace_raw)?;
    let diagonal_frames = forms.values().all(|(th, _)| {
        th.iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, f)| i == j || f.is_zero()))
    });
    let diagonal = if diagonal_frames {
        let mut out = Vec::new();
        for k in 0..red.rank {
            let raw = forms.iter().map(|(p, (_, form))| (vec![p.0, p.1], form[k][k].clone())).collect();
            out.push(omega_class(cover, raw)?.1);
        }
        Some(out)
    } else {
        None
    };
    Ok(CanonicalClass {
        trace,
        trace_cochain,
        diagonal,
    })
}

#[derive(Serialize)]
struct BundleFileOut<'a> {
    scheme: &'a MultiScheme,
    rank: usize,
    transitions: BTreeMap<String, &'a TruncMatrix>,
}

impl Serialize for BundleCocycle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BundleFileOut {
            scheme: &self.scheme,
            rank: self.rank,
            transitions: self.transitions.iter().map(|(p, th)| (pair_key(*p), th)).collect(),
        }
        .serialize(s)
    }
}

impl BundleCocycle {
    /// Reads a bundle file. `"scheme"` is either an inline scheme or a string
    /// handed to `resolve`; missing transitions are completed as in
    /// [`BundleCocycle::from_upper`] and the result is returned unvalidated
    /// when all overlaps are present.
    pub fn from_json(
        v: serde_json::Value,
        resolve: impl Fn(&str) -> Result<MultiScheme>,
    ) -> Result<BundleCocycle> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("bundle file must be an object".into()))?;
        let scheme = match obj.get("scheme") {
            Some(serde_json::Value::String(r)) => resolve(r)?,
            Some(s) => serde_json::from_value(s.clone()).map_err(|e| Error::Parse(format!("scheme: {e}")))?,
            None => return Err(Error::Parse("bundle file lacks \"scheme\"".into())),
        };
        let transitions: BTreeMap<String, TruncMatrix> = serde_json::from_value(
            obj.get("transitions")
                .cloned()
                .ok_or_else(|| Error::Parse("bundle file lacks \"transitions\"".into()))?,
        )
        .map_err(|e| Error::Parse(format!("transitions: {e}")))?;
        let transitions = parse_pair_map(transitions, scheme.cover())?;
        if let Some(r) = obj.get("rank") {
            let r = r.as_u64().ok_or_else(|| Error::Parse("rank must be a positive integer".into()))?;
            if transitions.values().any(|th| th.rank() as u64 != r) {
                return Err(Error::Parse(format!("declared rank {r} disagrees with the transitions")));
            }
        }
        if transitions.len() == scheme.cover().ordered_pairs().len() {
            BundleCocycle::from_parts(scheme, transitions)
        } else {
            let upper = transitions.into_iter().filter(|(p, _)| p.0 < p.1).collect();
            BundleCocycle::from_upper(scheme, upper)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;
    use crate::multischeme::trivial_scheme;

    #[test]
    fn pullback_of_o3() {
        let x = trivial_scheme(-2, 2, Cover::Two).unwrap();
        let e = pullback_line_bundle(&x, 3).unwrap();
        assert_eq!(*e.transition(0, 1).entry(0, 0), TruncElem::constant(LaurentPoly::xpow(3), 2));
        assert!(e.is_valid());
        assert_eq!(e.degree().unwrap(), 3);
    }

    #[test]
    fn broken_cocycle_names_overlap() {
        let x = trivial_scheme(-1, 2, Cover::Three).unwrap();
        let mut upper = BTreeMap::new();
        upper.insert((0, 1), TruncElem::constant(LaurentPoly::xpow(2), 2));
        upper.insert((1, 2), TruncElem::constant(LaurentPoly::xpow(-2), 2));
        upper.insert((0, 2), TruncElem::constant(LaurentPoly::x(), 2));
        match make_line_bundle(&x, upper) {
            Err(Error::CocycleViolation { overlap, .. }) => assert!(overlap.len() == 3),
            other => panic!("expected a violation, got {other:?}"),
        }
    }

    #[test]
    fn canonical_class_of_o5() {
        let x = trivial_scheme(0, 1, Cover::Three).unwrap();
        let c = canonical_class(&pullback_line_bundle(&x, 5).unwrap()).unwrap();
        assert_eq!(c.trace.coeffs, vec![int(5)]);
        let split = split_bundle(&x, &[2, -7]).unwrap();
        let c = canonical_class(&split).unwrap();
        assert_eq!(c.trace.coeffs, vec![int(-5)]);
        let diag: Vec<_> = c.diagonal.unwrap().into_iter().map(|k| k.coeffs[0].clone()).collect();
        assert_eq!(diag, vec![int(2), int(-7)]);
    }

    #[test]
    fn json_round_trip() {
        let x = trivial_scheme(-3, 2, Cover::Three).unwrap();
        let e = pullback_line_bundle(&x, 4).unwrap();
        let v = serde_json::to_value(&e).unwrap();
        let back = BundleCocycle::from_json(v, |_| unreachable!()).unwrap();
        assert_eq!(back, e);
    }
}
