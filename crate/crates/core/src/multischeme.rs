//! Primitive multiple schemes over ℙ¹ glued from truncated-ring automorphisms.
//!
//! A scheme of multiplicity `n` stores, for every ordered overlap `(i, j)`,
//! the gluing automorphism `δ*_ij` of `O(U_ij)[t]/(t^n)` and the ideal unit
//! `α_ij` with `δ*_ij(t) = α_ij·t`. The ideal units carry `max(n-1, 1)`
//! coefficients: for `n = 1` the single coefficient is the transition of L.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{LaurentPoly, TruncAuto, TruncElem};
use crate::cech::{self, CohClass, Cochain, Cover, LineBundleData, Simplex};
use crate::error::{Error, Result};

pub type Pair = (usize, usize);

pub fn pair_key(p: Pair) -> String {
    format!("{}{}", p.0, p.1)
}

pub fn parse_pair_key(k: &str) -> Result<Pair> {
    let digits: Vec<usize> = k
        .chars()
        .map(|c| c.to_digit(10).map(|d| d as usize))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Parse(format!("bad overlap key {k:?}")))?;
    match digits[..] {
        [i, j] if i != j => Ok((i, j)),
        _ => Err(Error::Parse(format!("bad overlap key {k:?}"))),
    }
}

fn upper_pairs(cover: Cover) -> Vec<Pair> {
    cover.ordered_pairs().into_iter().filter(|(i, j)| i < j).collect()
}

/// Length of the stored ideal units at multiplicity `n`.
pub fn ideal_len(n: usize) -> usize {
    (n.max(2)) - 1
}

/// One violated relation in a scheme or bundle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub relation: String,
    pub overlap: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        Self {
            valid: violations.is_empty(),
            violations,
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct MultiScheme {
    n: usize,
    cover: Cover,
    l_degree: i64,
    gluing: BTreeMap<Pair, TruncAuto>,
    ideal: BTreeMap<Pair, TruncElem>,
}

/// A 1-cochain of derivations `D_ij = g_ij·d/dx` with values in L^m, stored
/// raw: `g_ij` is written in the frame of chart `i`. The twisted cocycle
/// relation reads `g_ik = g_ij + (α_ij^{(0)})^m·g_jk`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationCochain {
    pub cover: Cover,
    /// Degree of the L-part, `m·ℓ`.
    pub twist: i64,
    pub values: BTreeMap<Pair, LaurentPoly>,
}

impl DerivationCochain {
    pub fn new(cover: Cover, twist: i64, values: impl IntoIterator<Item = (Pair, LaurentPoly)>) -> Result<Self> {
        let mut out = Self::zero(cover, twist);
        for (p, g) in values {
            if p.0 >= p.1 || !out.values.contains_key(&p) {
                return Err(Error::Mismatch(format!(
                    "overlap {} is not an increasing pair of the {}-chart cover",
                    pair_key(p),
                    cover.charts()
                )));
            }
            out.values.insert(p, g);
        }
        Ok(out)
    }

    pub fn zero(cover: Cover, twist: i64) -> Self {
        Self {
            cover,
            twist,
            values: upper_pairs(cover).into_iter().map(|p| (p, LaurentPoly::zero())).collect(),
        }
    }

    /// As an honest cochain of O(twist + 2).
    pub fn to_cochain(&self) -> Result<Cochain> {
        Cochain::from_tangent_frame(
            self.cover,
            self.twist,
            1,
            1,
            self.values.iter().map(|((i, j), g)| (vec![*i, *j], g.clone())),
        )
    }

    pub fn from_cochain(c: &Cochain) -> Result<Self> {
        if c.q() != 1 {
            return Err(Error::Mismatch("derivation cochains have degree 1".into()));
        }
        let raw = c.to_tangent_frame(1);
        Self::new(
            c.cover(),
            c.degree() - 2,
            raw.into_iter().map(|(s, g)| ((s[0], s[1]), g)),
        )
    }

    pub fn is_cocycle(&self) -> bool {
        self.to_cochain().map(|c| c.is_cocycle()).unwrap_or(false)
    }

    pub fn get(&self, p: Pair) -> &LaurentPoly {
        &self.values[&p]
    }
}

/// The derivation cochain `D_ij` of a scheme together with its reduced class
/// in H¹(T ⊗ L) = H¹(O(ℓ+2)).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaClass {
    pub cochain: DerivationCochain,
    pub class: CohClass,
}

impl MultiScheme {
    /// Assembles a scheme from gluing data on increasing pairs; reverse pairs
    /// come from inversion and the ideal units from the images of `t`.
    pub fn from_upper(n: usize, cover: Cover, l_degree: i64, upper: BTreeMap<Pair, TruncAuto>) -> Result<Self> {
        let mut gluing = BTreeMap::new();
        for p in upper_pairs(cover) {
            let phi = upper
                .get(&p)
                .ok_or_else(|| Error::Parse(format!("missing gluing for overlap {}", pair_key(p))))?;
            if phi.n() != n {
                return Err(Error::Multiplicity(phi.n(), n));
            }
            gluing.insert((p.1, p.0), phi.invert());
            gluing.insert(p, phi.clone());
        }
        let ideal = derive_ideal(l_degree, &gluing);
        Ok(Self { n, cover, l_degree, gluing, ideal })
    }

    /// Raw constructor; only shapes are checked here, relations by
    /// [`MultiScheme::validate`].
    pub fn from_parts(
        n: usize,
        cover: Cover,
        l_degree: i64,
        gluing: BTreeMap<Pair, TruncAuto>,
        ideal: BTreeMap<Pair, TruncElem>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Range("multiplicity must be at least 1".into()));
        }
        for p in cover.ordered_pairs() {
            let g = gluing
                .get(&p)
                .ok_or_else(|| Error::Parse(format!("missing gluing for overlap {}", pair_key(p))))?;
            if g.n() != n {
                return Err(Error::Parse(format!(
                    "gluing on {} has multiplicity {}, scheme has {n}",
                    pair_key(p),
                    g.n()
                )));
            }
            let a = ideal
                .get(&p)
                .ok_or_else(|| Error::Parse(format!("missing ideal unit for overlap {}", pair_key(p))))?;
            if a.n() != ideal_len(n) {
                return Err(Error::Parse(format!(
                    "ideal unit on {} has {} coefficients, expected {}",
                    pair_key(p),
                    a.n(),
                    ideal_len(n)
                )));
            }
        }
        if gluing.len() != cover.ordered_pairs().len() || ideal.len() != cover.ordered_pairs().len() {
            return Err(Error::Parse("gluing data on overlaps outside the cover".into()));
        }
        Ok(Self { n, cover, l_degree, gluing, ideal })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cover(&self) -> Cover {
        self.cover
    }

    pub fn l_degree(&self) -> i64 {
        self.l_degree
    }

    pub fn line_bundle(&self) -> LineBundleData {
        LineBundleData::new(self.l_degree)
    }

    pub fn gluing(&self, i: usize, j: usize) -> &TruncAuto {
        &self.gluing[&(i, j)]
    }

    pub fn ideal(&self, i: usize, j: usize) -> &TruncElem {
        &self.ideal[&(i, j)]
    }

    /// `α_ij^{(0)}`, the transition of L.
    pub fn l_transition(&self, i: usize, j: usize) -> &LaurentPoly {
        self.ideal[&(i, j)].coeff(0)
    }

    pub fn gluings(&self) -> impl Iterator<Item = (&Pair, &TruncAuto)> {
        self.gluing.iter()
    }

    pub fn ideals(&self) -> impl Iterator<Item = (&Pair, &TruncElem)> {
        self.ideal.iter()
    }

    /// Every relation a scheme must satisfy, each failure named with its
    /// overlap.
    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        let n = self.n;
        let lb = self.line_bundle();
        for (i, j) in self.cover.ordered_pairs() {
            let key = pair_key((i, j));
            let g = &self.gluing[&(i, j)];
            let a = &self.ideal[&(i, j)];
            if *a.coeff(0) != lb.transition(i, j) {
                v.push(Violation {
                    relation: "ideal reduction equals transition of L".into(),
                    overlap: key.clone(),
                    detail: format!("α^(0) = {}, expected {}", a.coeff(0), lb.transition(i, j)),
                });
            }
            if n >= 2 {
                let expect = a.resize(n).mul_t_pow(1);
                if *g.image_t() != expect {
                    v.push(Violation {
                        relation: "image of t equals ideal unit times t".into(),
                        overlap: key.clone(),
                        detail: format!("δ*(t) = {}, α·t = {}", g.image_t(), expect),
                    });
                }
            }
            let back = &self.gluing[&(j, i)];
            if !back.compose(g).is_identity() {
                v.push(Violation {
                    relation: "reverse gluing is the inverse".into(),
                    overlap: key.clone(),
                    detail: format!("δ*_{j}{i} ∘ δ*_{i}{j} is not the identity"),
                });
            }
        }
        for (i, j, k) in self.cover.ordered_triples() {
            let lhs = &self.gluing[&(i, k)];
            let rhs = self.gluing[&(i, j)].compose(&self.gluing[&(j, k)]);
            if *lhs != rhs {
                v.push(Violation {
                    relation: "cocycle δ*_ik = δ*_ij ∘ δ*_jk".into(),
                    overlap: format!("{i}{j}{k}"),
                    detail: format!("{lhs:?} vs {rhs:?}"),
                });
            }
            if n >= 2 {
                let m = n - 1;
                let prod = &self.ideal[&(i, j)] * &self.gluing[&(i, j)].resize(m).apply(&self.ideal[&(j, k)]);
                if prod != self.ideal[&(i, k)] {
                    v.push(Violation {
                        relation: "ideal cocycle α_ik = α_ij·δ*_ij(α_jk)".into(),
                        overlap: format!("{i}{j}{k}"),
                        detail: format!("{prod} vs {}", self.ideal[&(i, k)]),
                    });
                }
            }
        }
        ValidationReport::from_violations(v)
    }

    pub fn is_valid(&self) -> bool {
        self.validate().valid
    }

    /// Reduction modulo `t^m`.
    pub fn restrict_multiplicity(&self, m: usize) -> Result<MultiScheme> {
        if m == 0 || m > self.n {
            return Err(Error::Range(format!("restriction to multiplicity {m} of a multiplicity-{} scheme", self.n)));
        }
        Ok(MultiScheme {
            n: m,
            cover: self.cover,
            l_degree: self.l_degree,
            gluing: self.gluing.iter().map(|(p, g)| (*p, g.resize(m))).collect(),
            ideal: self.ideal.iter().map(|(p, a)| (*p, a.resize(ideal_len(m)))).collect(),
        })
    }

    /// The derivations `D_ij` read off the first-order part of the gluing.
    pub fn derivation_cochain(&self) -> Result<DerivationCochain> {
        if self.n < 2 {
            return Err(Error::Range("the derivation cochain needs multiplicity at least 2".into()));
        }
        DerivationCochain::new(
            self.cover,
            self.l_degree,
            upper_pairs(self.cover)
                .into_iter()
                .map(|p| (p, self.gluing[&p].derivation_part())),
        )
    }

    /// ζ for any `n >= 2`: the class of the underlying double.
    pub fn zeta(&self) -> Result<ZetaClass> {
        let cochain = self.derivation_cochain()?;
        let class = cech::reduce_h1_class(&cochain.to_cochain()?)?;
        Ok(ZetaClass { cochain, class })
    }

    /// Transports the gluing along chart automorphisms:
    /// `δ'*_ij = g_i^{-1} ∘ δ*_ij ∘ g_j`.
    pub fn gauge(&self, charts: &[TruncAuto]) -> Result<MultiScheme> {
        if charts.len() != self.cover.charts() {
            return Err(Error::Mismatch(format!(
                "{} chart automorphisms for a {}-chart cover",
                charts.len(),
                self.cover.charts()
            )));
        }
        for (c, g) in charts.iter().enumerate() {
            check_chart_automorphism(c, g, self.n)?;
        }
        let inv: Vec<TruncAuto> = charts.iter().map(TruncAuto::invert).collect();
        let upper = upper_pairs(self.cover)
            .into_iter()
            .map(|(i, j)| ((i, j), inv[i].compose(&self.gluing[&(i, j)]).compose(&charts[j])))
            .collect();
        MultiScheme::from_upper(self.n, self.cover, self.l_degree, upper)
    }
}

fn derive_ideal(l_degree: i64, gluing: &BTreeMap<Pair, TruncAuto>) -> BTreeMap<Pair, TruncElem> {
    let lb = LineBundleData::new(l_degree);
    gluing
        .iter()
        .map(|(&(i, j), g)| {
            let a = g
                .t_unit()
                .unwrap_or_else(|| TruncElem::constant(lb.transition(i, j), 1));
            ((i, j), a)
        })
        .collect()
}

/// An automorphism of `O(U_c)[t]/(t^n)` fixing L's frame: the image of the
/// chart coordinate stays regular and `g(t) = v·t` with `v ≡ 1 mod t`.
pub fn check_chart_automorphism(chart: usize, g: &TruncAuto, n: usize) -> Result<()> {
    if g.n() != n {
        return Err(Error::Multiplicity(g.n(), n));
    }
    let bad = |what: &str| Error::NotRegular {
        chart,
        detail: format!("chart automorphism {what}"),
    };
    let coordinate = match chart {
        0 => g.image_x().clone(),
        1 => g.apply_laurent(&LaurentPoly::xpow(-1)),
        _ => TruncElem::zero(n),
    };
    let keep = |e: i64| match chart {
        1 => e <= 0,
        _ => cech::chart_allows(chart, e),
    };
    if !coordinate.coeffs().iter().all(|f| f.all_exps(keep)) {
        return Err(bad("moves the chart coordinate off the chart"));
    }
    if !g.image_t().coeffs().iter().all(|f| f.all_exps(keep)) {
        return Err(bad("rescales t by a non-regular function"));
    }
    if n >= 2 && *g.image_t().coeff(1) != LaurentPoly::one() {
        return Err(bad("changes the frame of L"));
    }
    Ok(())
}

/// The `n`-th neighbourhood of the zero section of L*.
pub fn trivial_scheme(l_degree: i64, n: usize, cover: Cover) -> Result<MultiScheme> {
    if n == 0 {
        return Err(Error::Range("multiplicity must be at least 1".into()));
    }
    let lb = LineBundleData::new(l_degree);
    let upper = upper_pairs(cover)
        .into_iter()
        .map(|(i, j)| {
            let phi = TruncAuto::new(TruncElem::x(n), TruncElem::term(lb.transition(i, j), 1, n))
                .expect("monomial unit");
            ((i, j), phi)
        })
        .collect();
    MultiScheme::from_upper(n, cover, l_degree, upper)
}

/// The double `δ*_ij|O = I + t·D_ij`, `δ*_ij(t) = u_ij·t`.
pub fn make_double(l_degree: i64, d: &DerivationCochain) -> Result<MultiScheme> {
    if d.twist != l_degree {
        return Err(Error::Mismatch(format!(
            "derivation cochain valued in L^m with deg {} but L has degree {l_degree}",
            d.twist
        )));
    }
    if !d.is_cocycle() {
        return Err(Error::NotCocycle("derivation cochain violates the twisted cocycle relation".into()));
    }
    let lb = LineBundleData::new(l_degree);
    let upper = upper_pairs(d.cover)
        .into_iter()
        .map(|(i, j)| {
            let x = TruncElem::new(vec![LaurentPoly::x(), d.get((i, j)).clone()]).expect("n = 2");
            let phi = TruncAuto::new(x, TruncElem::term(lb.transition(i, j), 1, 2)).expect("monomial unit");
            ((i, j), phi)
        })
        .collect();
    MultiScheme::from_upper(2, d.cover, l_degree, upper)
}

pub fn double_class(x: &MultiScheme) -> Result<ZetaClass> {
    if x.n != 2 {
        return Err(Error::Range(format!("double_class needs n = 2, got {}", x.n)));
    }
    x.zeta()
}

/// A choice of extension `θ_ij` of the ideal units to length `n`, on all
/// ordered overlaps, with the cocycle `η` that parametrizes it relative to the
/// reference extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealExtension {
    pub theta: BTreeMap<Pair, TruncElem>,
    pub eta: Option<Cochain>,
}

/// The torsor of ideal extensions of a scheme with `n >= 2`.
#[derive(Clone, Debug)]
pub struct IdealExtensions {
    scheme: MultiScheme,
    reference: BTreeMap<Pair, TruncElem>,
}

impl IdealExtension {
    /// For a reduced scheme the ideal is L itself and admits no choice.
    pub fn of_reduced(x: &MultiScheme) -> Result<Self> {
        if x.n != 1 {
            return Err(Error::Range("only reduced schemes have the unique trivial ideal choice".into()));
        }
        Ok(Self {
            theta: x.ideal.clone(),
            eta: None,
        })
    }

    /// Checks that `θ` lifts the ideal units and is a multiplicative cocycle.
    pub fn check(&self, x: &MultiScheme) -> Result<()> {
        let n = x.n;
        for p in x.cover.ordered_pairs() {
            let th = self
                .theta
                .get(&p)
                .ok_or_else(|| Error::Mismatch(format!("missing θ on {}", pair_key(p))))?;
            if th.n() != n {
                return Err(Error::Multiplicity(th.n(), n));
            }
            if n >= 2 && th.truncate(n - 1) != *x.ideal(p.0, p.1) {
                return Err(Error::CocycleViolation {
                    overlap: pair_key(p),
                    detail: "θ does not lift the ideal unit".into(),
                });
            }
            if n == 1 && th != x.ideal(p.0, p.1) {
                return Err(Error::CocycleViolation {
                    overlap: pair_key(p),
                    detail: "θ differs from the transition of L".into(),
                });
            }
        }
        for (i, j, k) in x.cover.ordered_triples() {
            let rhs = &self.theta[&(i, j)] * &x.gluing(i, j).apply(&self.theta[&(j, k)]);
            if rhs != self.theta[&(i, k)] {
                return Err(Error::CocycleViolation {
                    overlap: format!("{i}{j}{k}"),
                    detail: "θ_ik ≠ θ_ij·δ*_ij(θ_jk)".into(),
                });
            }
        }
        for (i, j) in x.cover.ordered_pairs() {
            let prod = &self.theta[&(i, j)] * &x.gluing(i, j).apply(&self.theta[&(j, i)]);
            if prod != TruncElem::one(n) {
                return Err(Error::CocycleViolation {
                    overlap: pair_key((i, j)),
                    detail: "θ_ij·δ*_ij(θ_ji) ≠ 1".into(),
                });
            }
        }
        Ok(())
    }
}

/// Completes values on increasing pairs into all ordered pairs through
/// `θ_02 = θ_01·δ*_01(θ_12)` and `θ_ji = δ*_ji(θ_ij^{-1})`.
fn complete_multiplicative(x: &MultiScheme, base01: TruncElem, base12: Option<TruncElem>) -> Result<BTreeMap<Pair, TruncElem>> {
    let mut upper = BTreeMap::new();
    upper.insert((0, 1), base01);
    if let Some(b12) = base12 {
        let t02 = &upper[&(0, 1)] * &x.gluing(0, 1).apply(&b12);
        upper.insert((1, 2), b12);
        upper.insert((0, 2), t02);
    }
    let mut all = BTreeMap::new();
    for ((i, j), th) in upper {
        let rev = x.gluing(j, i).apply(&th.inverse()?);
        all.insert((j, i), rev);
        all.insert((i, j), th);
    }
    Ok(all)
}

pub fn ideal_extensions(x: &MultiScheme) -> Result<IdealExtensions> {
    let n = x.n;
    if n < 2 {
        return Err(Error::Range("ideal extensions need multiplicity at least 2".into()));
    }
    let pad = |p: Pair| x.ideal(p.0, p.1).resize(n);
    let reference = match x.cover {
        Cover::Two => complete_multiplicative(x, pad((0, 1)), None)?,
        Cover::Three => complete_multiplicative(x, pad((0, 1)), Some(pad((1, 2))))?,
    };
    Ok(IdealExtensions {
        scheme: x.clone(),
        reference,
    })
}

impl IdealExtensions {
    /// Degree of the parametrizing bundle L^{n-1}.
    pub fn param_degree(&self) -> i64 {
        self.scheme.l_degree * (self.scheme.n as i64 - 1)
    }

    pub fn dim(&self) -> usize {
        cech::cohomology_dim(self.param_degree(), 1)
    }

    pub fn basis(&self) -> Vec<CohClass> {
        (0..self.dim()).map(|k| CohClass::basis(1, self.param_degree(), k)).collect()
    }

    pub fn reference(&self) -> IdealExtension {
        IdealExtension {
            theta: self.reference.clone(),
            eta: Some(Cochain::zero(self.scheme.cover, LineBundleData::new(self.param_degree()), 1)),
        }
    }

    pub fn from_class(&self, class: &CohClass) -> Result<IdealExtension> {
        if class.level != 1 || class.degree != self.param_degree() {
            return Err(Error::Mismatch(format!(
                "ideal classes live in H^1(O({})), got H^{}(O({}))",
                self.param_degree(),
                class.level,
                class.degree
            )));
        }
        self.from_cocycle(&cech::h1_representative(class, self.scheme.cover)?)
    }

    /// `θ_ij = α̃_ij + α_ij^{(0)}·η_ij·t^{n-1}` on increasing pairs.
    pub fn from_cocycle(&self, eta: &Cochain) -> Result<IdealExtension> {
        let x = &self.scheme;
        let n = x.n;
        if eta.q() != 1 || eta.degree() != self.param_degree() || eta.cover() != x.cover {
            return Err(Error::Mismatch(format!(
                "η must be a 1-cochain of O({}) on the scheme's cover",
                self.param_degree()
            )));
        }
        if !eta.is_cocycle() {
            return Err(Error::NotCocycle("η is not a cocycle".into()));
        }
        let lift = |p: Pair| -> TruncElem {
            let beta = x.l_transition(p.0, p.1) * eta.value(&[p.0, p.1]);
            &self.reference[&p] + &TruncElem::term(beta, n - 1, n)
        };
        let theta = match x.cover {
            Cover::Two => complete_multiplicative(x, lift((0, 1)), None)?,
            Cover::Three => complete_multiplicative(x, lift((0, 1)), Some(lift((1, 2))))?,
        };
        let ext = IdealExtension {
            theta,
            eta: Some(eta.clone()),
        };
        ext.check(x)?;
        Ok(ext)
    }
}

/// Simplest lifts `ψ_ij` over `(δ*_ij, θ_ij)` on increasing pairs: the image of
/// `x` is `δ*_ij(x)` with a zero `t^n` coefficient, the image of `t` is `θ_ij·t`.
fn simplest_lifts(x: &MultiScheme, theta: &IdealExtension) -> BTreeMap<Pair, TruncAuto> {
    let big = x.n + 1;
    upper_pairs(x.cover)
        .into_iter()
        .map(|(i, j)| {
            let img_x = x.gluing(i, j).image_x().resize(big);
            let img_t = theta.theta[&(i, j)].resize(big).mul_t_pow(1);
            ((i, j), TruncAuto::new(img_x, img_t).expect("lift of a valid automorphism"))
        })
        .collect()
}

/// `ψ_01 ∘ ψ_12 ∘ ψ_02^{-1} = I + t^n·ν·d/dx`; returns `ν` as a 2-cochain of
/// O(nℓ+2).
fn triple_defect(x: &MultiScheme, lifts: &BTreeMap<Pair, TruncAuto>) -> Result<Cochain> {
    let n = x.n;
    let g = lifts[&(0, 1)]
        .compose(&lifts[&(1, 2)])
        .compose(&lifts[&(0, 2)].invert());
    let big = n + 1;
    let expect_x = TruncElem::x(big);
    if g.image_t() != &TruncElem::t(big) || g.image_x().truncate(n) != expect_x.truncate(n) {
        return Err(Error::Internal("lifted triple composition is not the identity mod t^n".into()));
    }
    let nu = g.image_x().coeff(n).clone();
    Cochain::from_tangent_frame(Cover::Three, n as i64 * x.l_degree, 1, 2, [(vec![0, 1, 2], nu)])
}

/// The defect of the simplest lift over `θ`: the obstruction cochain to
/// extending the pair (scheme, θ) before any correction.
pub fn obstruction_cochain(x: &MultiScheme, theta: &IdealExtension) -> Result<Cochain> {
    if x.cover != Cover::Three {
        return Err(Error::CoverTooSmall("triple overlaps need the 3-chart cover".into()));
    }
    theta.check(x)?;
    triple_defect(x, &simplest_lifts(x, theta))
}

/// Result of comparing two extension choices of the ideal.
#[derive(Clone, Debug)]
pub struct ObstructionDifference {
    /// `η ∪ ζ`, valued in O(nℓ+2): `η_01·α_01·D_12` on the triple.
    pub cup: Cochain,
    pub class: CohClass,
    pub witness: Cochain,
}

pub fn obstruction_difference(x: &MultiScheme, eta: &CohClass) -> Result<ObstructionDifference> {
    if x.cover != Cover::Three {
        return Err(Error::CoverTooSmall("cup products need the 3-chart cover".into()));
    }
    if x.n < 2 {
        return Err(Error::Range("obstruction differences need multiplicity at least 2".into()));
    }
    let rep = cech::h1_representative(eta, x.cover)?;
    obstruction_difference_for_cocycle(x, &rep)
}

pub fn obstruction_difference_for_cocycle(x: &MultiScheme, eta: &Cochain) -> Result<ObstructionDifference> {
    if x.cover != Cover::Three {
        return Err(Error::CoverTooSmall("cup products need the 3-chart cover".into()));
    }
    let expected = x.l_degree * (x.n as i64 - 1);
    if eta.degree() != expected || eta.q() != 1 {
        return Err(Error::Mismatch(format!("η must be a 1-cocycle of O({expected})")));
    }
    let zeta = x.zeta()?.cochain.to_cochain()?;
    let cup = cech::cup(eta, &zeta)?;
    let witness = cech::solve_coboundary(&cup)
        .ok_or_else(|| Error::Internal("2-cocycle on a curve without a witness".into()))?;
    Ok(ObstructionDifference {
        class: CohClass::zero(2, cup.degree()),
        cup,
        witness,
    })
}

/// Extends a scheme of multiplicity `n` to `n+1` with ideal `θ`. An optional
/// cocycle of derivations valued in L^n moves the result inside its torsor.
pub fn extend_scheme_twisted(
    x: &MultiScheme,
    theta: &IdealExtension,
    twist: Option<&DerivationCochain>,
) -> Result<MultiScheme> {
    theta.check(x)?;
    let n = x.n;
    let mut lifts = simplest_lifts(x, theta);
    let add_term = |lifts: &mut BTreeMap<Pair, TruncAuto>, p: Pair, e: &LaurentPoly| {
        let phi = &lifts[&p];
        let img_x = phi.image_x() + &TruncElem::term(e.clone(), n, n + 1);
        let phi = TruncAuto::new(img_x, phi.image_t().clone()).expect("t^n correction keeps validity");
        lifts.insert(p, phi);
    };
    if x.cover == Cover::Three {
        let nu = triple_defect(x, &lifts)?;
        let tau = cech::solve_coboundary(&nu)
            .ok_or_else(|| Error::Internal("solver failure on a curve".into()))?;
        for (s, e) in tau.to_tangent_frame(1) {
            add_term(&mut lifts, (s[0], s[1]), &-&e);
        }
    }
    if let Some(tw) = twist {
        if tw.cover != x.cover || tw.twist != n as i64 * x.l_degree || !tw.is_cocycle() {
            return Err(Error::NotCocycle(format!(
                "twist must be a cocycle of derivations valued in L^{n}"
            )));
        }
        for (p, e) in &tw.values {
            add_term(&mut lifts, *p, e);
        }
    }
    let out = MultiScheme::from_upper(n + 1, x.cover, x.l_degree, lifts)?;
    let report = out.validate();
    if !report.valid {
        return Err(Error::Internal(format!("extension failed validation: {:?}", report.violations)));
    }
    Ok(out)
}

pub fn extend_scheme(x: &MultiScheme, theta: &IdealExtension) -> Result<MultiScheme> {
    extend_scheme_twisted(x, theta, None)
}

impl fmt::Debug for MultiScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MultiScheme(n={}, ℓ={}, {} charts)", self.n, self.l_degree, self.cover.charts())?;
        for (p, g) in &self.gluing {
            writeln!(f, "  {}: {g:?}", pair_key(*p))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct SchemeFile {
    base: String,
    charts: usize,
    n: usize,
    l_degree: i64,
    gluing: BTreeMap<String, TruncAuto>,
    #[serde(default)]
    ideal: BTreeMap<String, TruncElem>,
}

impl Serialize for MultiScheme {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SchemeFile {
            base: "p1".into(),
            charts: self.cover.charts(),
            n: self.n,
            l_degree: self.l_degree,
            gluing: self.gluing.iter().map(|(p, g)| (pair_key(*p), g.clone())).collect(),
            ideal: self.ideal.iter().map(|(p, a)| (pair_key(*p), a.clone())).collect(),
        }
        .serialize(s)
    }
}

pub fn parse_pair_map<V>(m: BTreeMap<String, V>, cover: Cover) -> Result<BTreeMap<Pair, V>> {
    m.into_iter()
        .map(|(k, v)| {
            let p = parse_pair_key(&k)?;
            if p.0 >= cover.charts() || p.1 >= cover.charts() {
                return Err(Error::Parse(format!("overlap {k} outside the cover")));
            }
            Ok((p, v))
        })
        .collect()
}

impl<'de> Deserialize<'de> for MultiScheme {
    /// Missing reverse gluings are filled in by inversion and a missing ideal
    /// is read off the images of `t`; anything present is kept as given so
    /// that validation can report it.
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = SchemeFile::deserialize(d)?;
        if f.base != "p1" {
            return Err(D::Error::custom(format!("unsupported base {:?}", f.base)));
        }
        let cover = Cover::from_count(f.charts).map_err(D::Error::custom)?;
        let mut gluing: BTreeMap<Pair, TruncAuto> = parse_pair_map(f.gluing, cover).map_err(D::Error::custom)?;
        let mut ideal: BTreeMap<Pair, TruncElem> = parse_pair_map(f.ideal, cover).map_err(D::Error::custom)?;
        for (i, j) in upper_pairs(cover) {
            if !gluing.contains_key(&(j, i)) {
                if let Some(g) = gluing.get(&(i, j)) {
                    let inv = g.invert();
                    gluing.insert((j, i), inv);
                }
            }
        }
        if ideal.is_empty() {
            ideal = derive_ideal(f.l_degree, &gluing);
        }
        MultiScheme::from_parts(f.n, cover, f.l_degree, gluing, ideal).map_err(D::Error::custom)
    }
}

/// Convenience: a derivation 1-cocycle on three charts from `g_01`, `g_12`,
/// completing `g_02 = g_01 + u_01·g_12`.
pub fn derivation_cocycle(cover: Cover, twist: i64, g01: LaurentPoly, g12: LaurentPoly) -> DerivationCochain {
    let lb = LineBundleData::new(twist);
    let mut vals: Vec<(Pair, LaurentPoly)> = vec![((0, 1), g01.clone())];
    if cover == Cover::Three {
        let g02 = &g01 + &(&lb.transition(0, 1) * &g12);
        vals.push(((0, 2), g02));
        vals.push(((1, 2), g12));
    }
    DerivationCochain::new(cover, twist, vals).expect("increasing pairs")
}

/// Convenience: a 1-cocycle of O(d) from `σ_01`, `σ_12`.
pub fn line_cocycle(cover: Cover, d: i64, s01: LaurentPoly, s12: LaurentPoly) -> Cochain {
    let lb = LineBundleData::new(d);
    let mut vals: Vec<(Simplex, LaurentPoly)> = vec![(vec![0, 1], s01.clone())];
    if cover == Cover::Three {
        let s02 = &s01 + &(&lb.transition(0, 1) * &s12);
        vals.push((vec![0, 2], s02));
        vals.push((vec![1, 2], s12));
    }
    Cochain::new(cover, lb, 1, vals).expect("increasing pairs")
}
