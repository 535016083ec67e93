//! Čech cochains on the two fixed covers of ℙ¹ with values in the line
//! bundles O(d): differentials, the graded coboundary solver, canonical H¹
//! representatives and cup products.
//!
//! Chart 0 is the `x`-line, chart 1 the `y = 1/x` line, chart 2 (optional)
//! is `G_m`. Every value is a Laurent polynomial in `x`, stored on strictly
//! increasing index tuples in the frame of the first index. O(d) has
//! transitions `u_01 = x^d`, `u_02 = 1`, `u_12 = x^-d`, and the differential is
//! `(δσ)_{i0…} = u_{i0 i1}·σ_{i1…} + Σ_{k≥1} (-1)^k σ_{…î_k…}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{rational, LaurentPoly, Rational};
use crate::error::{Error, Result};
use crate::linalg;

/// One of the two supported covers of ℙ¹.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cover {
    Two,
    Three,
}

pub type Simplex = Vec<usize>;

impl Cover {
    pub fn from_count(charts: usize) -> Result<Self> {
        match charts {
            2 => Ok(Cover::Two),
            3 => Ok(Cover::Three),
            _ => Err(Error::Range(format!("cover must have 2 or 3 charts, got {charts}"))),
        }
    }

    pub fn charts(self) -> usize {
        match self {
            Cover::Two => 2,
            Cover::Three => 3,
        }
    }

    /// Strictly increasing `(q+1)`-tuples of chart indices.
    pub fn simplices(self, q: usize) -> Vec<Simplex> {
        let n = self.charts();
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Simplex>) {
            if left == 0 {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(i + 1, n, left - 1, cur, out);
                cur.pop();
            }
        }
        rec(0, n, q + 1, &mut cur, &mut out);
        out
    }

    /// Ordered pairs of distinct charts.
    pub fn ordered_pairs(self) -> Vec<(usize, usize)> {
        let n = self.charts();
        (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect()
    }

    /// Ordered triples of distinct charts.
    pub fn ordered_triples(self) -> Vec<(usize, usize, usize)> {
        let n = self.charts();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i != j && j != k && i != k {
                        out.push((i, j, k));
                    }
                }
            }
        }
        out
    }
}

/// Exponents of `x` allowed in a section over chart `chart`.
pub fn chart_allows(chart: usize, e: i64) -> bool {
    match chart {
        0 => e >= 0,
        1 => e <= 0,
        _ => true,
    }
}

pub fn is_regular_on(chart: usize, f: &LaurentPoly) -> bool {
    f.all_exps(|e| chart_allows(chart, e))
}

pub fn simplex_key(s: &[usize]) -> String {
    s.iter().map(|i| i.to_string()).collect()
}

pub fn parse_simplex_key(k: &str) -> Result<Simplex> {
    let s: Option<Simplex> = k.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect();
    let s = s.ok_or_else(|| Error::Parse(format!("bad simplex key {k:?}")))?;
    if s.is_empty() || s.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parse(format!("simplex key {k:?} is not strictly increasing")));
    }
    Ok(s)
}

/// O(d) on ℙ¹ with the fixed transition convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LineBundleData {
    #[serde(rename = "d")]
    pub degree: i64,
}

impl LineBundleData {
    pub fn new(degree: i64) -> Self {
        Self { degree }
    }

    /// Exponent offset of chart `i`'s frame: `u_ij = x^{shift(j) - shift(i)}`.
    pub fn shift(&self, chart: usize) -> i64 {
        if chart == 1 {
            self.degree
        } else {
            0
        }
    }

    pub fn transition(&self, i: usize, j: usize) -> LaurentPoly {
        LaurentPoly::xpow(self.shift(j) - self.shift(i))
    }

    pub fn tensor(&self, other: &LineBundleData) -> LineBundleData {
        LineBundleData::new(self.degree + other.degree)
    }
}

/// A degree-`q` cochain with values in O(d).
#[derive(Clone, PartialEq, Eq)]
pub struct Cochain {
    cover: Cover,
    bundle: LineBundleData,
    q: usize,
    values: BTreeMap<Simplex, LaurentPoly>,
}

impl Cochain {
    pub fn zero(cover: Cover, bundle: LineBundleData, q: usize) -> Self {
        let values = cover
            .simplices(q)
            .into_iter()
            .map(|s| (s, LaurentPoly::zero()))
            .collect();
        Self { cover, bundle, q, values }
    }

    /// Builds a cochain from values on strictly increasing tuples; missing
    /// tuples are zero. 0-cochains must be regular on their charts.
    pub fn new<I>(cover: Cover, bundle: LineBundleData, q: usize, values: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Simplex, LaurentPoly)>,
    {
        let mut c = Self::zero(cover, bundle, q);
        for (s, f) in values {
            if !c.values.contains_key(&s) {
                return Err(Error::Mismatch(format!(
                    "tuple {} is not a {q}-simplex of the {}-chart cover",
                    simplex_key(&s),
                    cover.charts()
                )));
            }
            if q == 0 && !is_regular_on(s[0], &f) {
                return Err(Error::NotRegular {
                    chart: s[0],
                    detail: format!("{f}"),
                });
            }
            c.values.insert(s, f);
        }
        Ok(c)
    }

    pub fn cover(&self) -> Cover {
        self.cover
    }

    pub fn bundle(&self) -> LineBundleData {
        self.bundle
    }

    pub fn degree(&self) -> i64 {
        self.bundle.degree
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn value(&self, s: &[usize]) -> &LaurentPoly {
        &self.values[s]
    }

    pub fn values(&self) -> impl Iterator<Item = (&Simplex, &LaurentPoly)> {
        self.values.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(LaurentPoly::is_zero)
    }

    fn check_same_space(&self, other: &Cochain) -> Result<()> {
        if self.cover != other.cover || self.bundle != other.bundle || self.q != other.q {
            return Err(Error::Mismatch(format!(
                "cochains live in different spaces: (q={}, d={}, {} charts) vs (q={}, d={}, {} charts)",
                self.q,
                self.bundle.degree,
                self.cover.charts(),
                other.q,
                other.bundle.degree,
                other.cover.charts()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        self.check_same_space(other)?;
        let mut out = self.clone();
        for (s, f) in &other.values {
            *out.values.get_mut(s).unwrap() += f;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Cochain {
        let mut out = self.clone();
        for f in out.values.values_mut() {
            *f = f.scale(c);
        }
        out
    }

    /// Twisted Čech differential into degree `q+1`.
    pub fn coboundary(&self) -> Result<Cochain> {
        if self.q > 1 {
            return Err(Error::Range(format!("coboundary of a degree-{} cochain", self.q)));
        }
        let mut out = Cochain::zero(self.cover, self.bundle, self.q + 1);
        for (s, slot) in out.values.iter_mut() {
            let mut acc = &self.bundle.transition(s[0], s[1]) * &self.values[&s[1..].to_vec()];
            for k in 1..s.len() {
                let mut face = s.clone();
                face.remove(k);
                if k % 2 == 1 {
                    acc -= &self.values[&face];
                } else {
                    acc += &self.values[&face];
                }
            }
            *slot = acc;
        }
        Ok(out)
    }

    /// True when the differential vanishes; every 2-cochain qualifies on these
    /// covers.
    pub fn is_cocycle(&self) -> bool {
        if self.q >= 2 {
            return true;
        }
        self.coboundary().map(|c| c.is_zero()).unwrap_or(false)
    }

    /// Re-expresses a cochain whose values are coefficients of `(d/dx)^k`
    /// in the chart frames of O(a) as an honest O(a + 2k)-cochain. Only values
    /// whose first index is chart 1 change.
    pub fn from_tangent_frame(
        cover: Cover,
        a: i64,
        k: i64,
        q: usize,
        raw: impl IntoIterator<Item = (Simplex, LaurentPoly)>,
    ) -> Result<Cochain> {
        let converted: Vec<(Simplex, LaurentPoly)> = raw
            .into_iter()
            .map(|(s, f)| {
                let g = if s[0] == 1 { f.shift(-2 * k) } else { f };
                (s, g)
            })
            .collect();
        Cochain::new(cover, LineBundleData::new(a + 2 * k), q, converted)
    }

    /// Inverse of [`Cochain::from_tangent_frame`].
    pub fn to_tangent_frame(&self, k: i64) -> BTreeMap<Simplex, LaurentPoly> {
        self.values
            .iter()
            .map(|(s, f)| {
                let g = if s[0] == 1 { f.shift(2 * k) } else { f.clone() };
                (s.clone(), g)
            })
            .collect()
    }
}

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cochain(q={}, O({}), {{", self.q, self.bundle.degree)?;
        for (i, (s, v)) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}: {}", simplex_key(s), v)?;
        }
        write!(f, "}})")
    }
}

#[derive(Serialize, Deserialize)]
struct CochainFile {
    q: usize,
    bundle: LineBundleData,
    values: BTreeMap<String, LaurentPoly>,
}

impl Serialize for Cochain {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CochainFile {
            q: self.q,
            bundle: self.bundle,
            values: self
                .values
                .iter()
                .map(|(k, v)| (simplex_key(k), v.clone()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cochain {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = CochainFile::deserialize(d)?;
        let mut values = Vec::new();
        let mut max_chart = 1;
        for (k, v) in f.values {
            let s = parse_simplex_key(&k).map_err(D::Error::custom)?;
            if s.len() != f.q + 1 {
                return Err(D::Error::custom(format!("key {k:?} does not have {} indices", f.q + 1)));
            }
            max_chart = max_chart.max(*s.last().unwrap());
            values.push((s, v));
        }
        let cover = Cover::from_count(max_chart + 1).map_err(D::Error::custom)?;
        Cochain::new(cover, f.bundle, f.q, values).map_err(D::Error::custom)
    }
}

/// A cohomology class of O(d) as a coefficient vector over the monomial
/// basis: `{1, x, …, x^d}` for H⁰, `{x^-1, x^-2, …, x^{d+1}}` for H¹, empty
/// for H².
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohClass {
    pub level: usize,
    pub degree: i64,
    pub coeffs: Vec<Rational>,
}

impl CohClass {
    pub fn basis_exponents(level: usize, degree: i64) -> Vec<i64> {
        match level {
            0 => (0..=degree).collect(),
            1 => (degree + 1..=-1).rev().collect(),
            _ => Vec::new(),
        }
    }

    pub fn zero(level: usize, degree: i64) -> Self {
        let dim = Self::basis_exponents(level, degree).len();
        Self {
            level,
            degree,
            coeffs: vec![Rational::zero(); dim],
        }
    }

    /// The `k`-th basis vector.
    pub fn basis(level: usize, degree: i64, k: usize) -> Self {
        let mut c = Self::zero(level, degree);
        c.coeffs[k] = Rational::one();
        c
    }

    pub fn from_coeffs(level: usize, degree: i64, coeffs: Vec<Rational>) -> Result<Self> {
        let dim = Self::basis_exponents(level, degree).len();
        if coeffs.len() != dim {
            return Err(Error::Mismatch(format!(
                "H^{level}(O({degree})) has dimension {dim}, got {} coefficients",
                coeffs.len()
            )));
        }
        Ok(Self { level, degree, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &CohClass) -> CohClass {
        assert_eq!((self.level, self.degree), (other.level, other.degree));
        CohClass {
            level: self.level,
            degree: self.degree,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> CohClass {
        CohClass {
            level: self.level,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// The Laurent polynomial `Σ c_k x^{e_k}` over the basis exponents.
    pub fn as_laurent(&self) -> LaurentPoly {
        LaurentPoly::from_terms(
            Self::basis_exponents(self.level, self.degree)
                .into_iter()
                .zip(self.coeffs.iter().cloned()),
        )
    }
}

#[derive(Serialize, Deserialize)]
struct CohClassFile {
    level: usize,
    degree: i64,
    basis: Vec<i64>,
    coeffs: Vec<String>,
}

impl Serialize for CohClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CohClassFile {
            level: self.level,
            degree: self.degree,
            basis: Self::basis_exponents(self.level, self.degree),
            coeffs: self.coeffs.iter().map(rational::to_text).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CohClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = CohClassFile::deserialize(d)?;
        let coeffs: Vec<Rational> = f
            .coeffs
            .iter()
            .map(|s| rational::parse(s))
            .collect::<Result<_>>()
            .map_err(D::Error::custom)?;
        CohClass::from_coeffs(f.level, f.degree, coeffs).map_err(D::Error::custom)
    }
}

/// `h^i(ℙ¹, O(d))` in closed form.
pub fn cohomology_dim(d: i64, i: usize) -> usize {
    match i {
        0 => (d + 1).max(0) as usize,
        1 => (-d - 1).max(0) as usize,
        _ => 0,
    }
}

/// A grade slice of the differential `C^q → C^{q+1}`: the grade of a basis
/// monomial `x^e` on a tuple with first index `i` is `e + shift(i)`, and the
/// differential preserves it.
struct GradedBlock {
    cols: Vec<(Simplex, i64)>,
    rows: Vec<(Simplex, i64)>,
    matrix: linalg::Matrix,
}

fn graded_block(cover: Cover, bundle: LineBundleData, q: usize, grade: i64) -> GradedBlock {
    let cols: Vec<(Simplex, i64)> = cover
        .simplices(q)
        .into_iter()
        .map(|s| {
            let e = grade - bundle.shift(s[0]);
            (s, e)
        })
        .filter(|(s, e)| q > 0 || chart_allows(s[0], *e))
        .collect();
    let rows: Vec<(Simplex, i64)> = cover
        .simplices(q + 1)
        .into_iter()
        .map(|s| {
            let e = grade - bundle.shift(s[0]);
            (s, e)
        })
        .collect();
    let mut matrix = linalg::zeros(rows.len(), cols.len());
    for (c, (s, e)) in cols.iter().enumerate() {
        let unit = Cochain::new(
            cover,
            bundle,
            q,
            [(s.clone(), LaurentPoly::monomial(Rational::one(), *e))],
        )
        .expect("basis cochain is admissible");
        let image = unit.coboundary().expect("q <= 1");
        for (r, (rs, re)) in rows.iter().enumerate() {
            matrix[r][c] = image.value(rs).coeff(*re);
        }
    }
    GradedBlock { cols, rows, matrix }
}

/// Finds `τ` with `δτ = c`, one grade at a time, and certifies it by
/// re-applying the differential. `None` means no witness exists.
pub fn solve_coboundary(c: &Cochain) -> Option<Cochain> {
    if c.q == 0 {
        return if c.is_zero() { Some(c.clone()) } else { None };
    }
    let bundle = c.bundle;
    let mut grades = BTreeSet::new();
    for (s, f) in &c.values {
        for (e, _) in f.terms() {
            grades.insert(e + bundle.shift(s[0]));
        }
    }
    let mut tau: BTreeMap<Simplex, LaurentPoly> = BTreeMap::new();
    for g in grades {
        let block = graded_block(c.cover, bundle, c.q - 1, g);
        let rhs: Vec<Rational> = block
            .rows
            .iter()
            .map(|(s, e)| c.value(s).coeff(*e))
            .collect();
        let x = linalg::solve(&block.matrix, block.cols.len(), &rhs)?;
        for ((s, e), v) in block.cols.iter().zip(x) {
            tau.entry(s.clone()).or_default().add_term(*e, v);
        }
    }
    let tau = Cochain::new(c.cover, bundle, c.q - 1, tau).ok()?;
    match tau.coboundary() {
        Ok(img) if img == *c => Some(tau),
        _ => None,
    }
}

/// `(h⁰, h¹, h²)` of O(d) from kernel and image ranks of the graded
/// differentials, summed over a grade window wide enough for every nonzero
/// slice.
pub fn solver_cohomology_dims(cover: Cover, d: i64) -> [usize; 3] {
    let bundle = LineBundleData::new(d);
    let reach = d.abs() + 3;
    let mut dims = [0usize; 3];
    for g in -reach..=reach {
        let b0 = graded_block(cover, bundle, 0, g);
        let b1 = graded_block(cover, bundle, 1, g);
        let r0 = linalg::rank(&b0.matrix);
        let r1 = if b1.rows.is_empty() { 0 } else { linalg::rank(&b1.matrix) };
        let c0 = b0.cols.len();
        let c1 = b1.cols.len();
        let c2 = cover.simplices(2).len();
        dims[0] += c0 - r0;
        dims[1] += c1 - r1 - r0;
        dims[2] += c2 - r1;
    }
    dims
}

/// Canonical coordinates of the class of a 1-cocycle: the coefficients of
/// `σ_01` on the exponents strictly between `d` and `0`.
pub fn reduce_h1_class(c: &Cochain) -> Result<CohClass> {
    if c.q != 1 {
        return Err(Error::Mismatch(format!("expected a 1-cochain, got degree {}", c.q)));
    }
    if !c.is_cocycle() {
        return Err(Error::NotCocycle(format!("{c:?}")));
    }
    let sigma = c.value(&[0, 1]);
    let coeffs = CohClass::basis_exponents(1, c.degree())
        .into_iter()
        .map(|e| sigma.coeff(e))
        .collect();
    CohClass::from_coeffs(1, c.degree(), coeffs)
}

/// The monomial cocycle representing a class: `σ_01 = r` on two charts,
/// `(σ_01, σ_02, σ_12) = (r, r, 0)` on three.
pub fn h1_representative(class: &CohClass, cover: Cover) -> Result<Cochain> {
    if class.level != 1 {
        return Err(Error::Mismatch(format!("expected an H^1 class, got level {}", class.level)));
    }
    let r = class.as_laurent();
    let bundle = LineBundleData::new(class.degree);
    match cover {
        Cover::Two => Cochain::new(cover, bundle, 1, [(vec![0, 1], r)]),
        Cover::Three => Cochain::new(cover, bundle, 1, [(vec![0, 1], r.clone()), (vec![0, 2], r)]),
    }
}

/// A 0-cochain `τ` with `c - rep(class(c)) = δτ`.
pub fn h1_witness(c: &Cochain) -> Result<Cochain> {
    let rep = h1_representative(&reduce_h1_class(c)?, c.cover)?;
    let diff = c.sub(&rep)?;
    solve_coboundary(&diff)
        .ok_or_else(|| Error::Internal("canonical representative not cohomologous".into()))
}

/// Global section with chart-0 value `f`, a polynomial of degree at most `d`.
pub fn global_section(cover: Cover, d: i64, f: &LaurentPoly) -> Result<Cochain> {
    if !f.all_exps(|e| (0..=d).contains(&e)) {
        return Err(Error::NotRegular {
            chart: 0,
            detail: format!("{f} is not a section of O({d})"),
        });
    }
    let bundle = LineBundleData::new(d);
    let vals = (0..cover.charts()).map(|i| (vec![i], &bundle.transition(i, 0) * f));
    Cochain::new(cover, bundle, 0, vals)
}

pub fn h0_basis(cover: Cover, d: i64) -> Vec<Cochain> {
    (0..=d)
        .map(|e| global_section(cover, d, &LaurentPoly::xpow(e)).expect("monomial section"))
        .collect()
}

pub fn reduce_h0_class(c: &Cochain) -> Result<CohClass> {
    if c.q != 0 || !c.is_cocycle() {
        return Err(Error::NotCocycle("not a global section".into()));
    }
    let f = c.value(&[0]);
    let coeffs = CohClass::basis_exponents(0, c.degree())
        .into_iter()
        .map(|e| f.coeff(e))
        .collect();
    CohClass::from_coeffs(0, c.degree(), coeffs)
}

/// Cup product `(a∪b)_{i0…ip+q} = a_{i0…ip}·u^b_{i0 ip}·b_{ip…ip+q}`, valued in
/// O(d_a + d_b).
pub fn cup(a: &Cochain, b: &Cochain) -> Result<Cochain> {
    if a.cover != b.cover {
        return Err(Error::Mismatch("cup of cochains on different covers".into()));
    }
    let q = a.q + b.q;
    if q > 2 || (q == 2 && a.cover == Cover::Two) {
        return Err(Error::CoverTooSmall(format!(
            "degree-{q} product needs more charts than the {}-chart cover has",
            a.cover.charts()
        )));
    }
    let out_bundle = a.bundle.tensor(&b.bundle);
    let mut vals = Vec::new();
    for s in a.cover.simplices(q) {
        let p = a.q;
        let left = a.value(&s[..=p]);
        let right = b.value(&s[p..]);
        let v = &(left * &b.bundle.transition(s[0], s[p])) * right;
        vals.push((s, v));
    }
    Cochain::new(a.cover, out_bundle, q, vals)
}

/// Class of any cochain of the right degree: H¹ reduction, H⁰ coordinates, or
/// the empty H² class once a witness certifies vanishing.
pub fn reduce_class(c: &Cochain) -> Result<CohClass> {
    match c.q {
        0 => reduce_h0_class(c),
        1 => reduce_h1_class(c),
        _ => {
            solve_coboundary(c)
                .ok_or_else(|| Error::Internal("2-cocycle without witness".into()))?;
            Ok(CohClass::zero(2, c.degree()))
        }
    }
}
