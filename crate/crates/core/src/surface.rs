//! Closed-form layer for products `X = C×D` of curves: Künneth dimensions,
//! the four-part tangent decomposition, line bundle obstructions on a double
//! structure, carpet criteria and numeric predicates.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::algebra::{rational, LaurentPoly, Rational};
use crate::cech::{self, CohClass, Cover};
use crate::linalg::{self, Matrix};
use crate::{Error, Result};

/// A named line bundle on a curve. `h0` overrides the generic value for
/// special bundles such as theta characteristics with sections.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleSpec {
    pub degree: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h0: Option<usize>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub canonical: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub trivial: bool,
}

impl BundleSpec {
    pub fn of_degree(degree: i64) -> Self {
        Self {
            degree,
            h0: None,
            canonical: false,
            trivial: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveProfile {
    pub genus: u32,
    #[serde(default)]
    pub hyperelliptic: bool,
    #[serde(default)]
    pub bundles: BTreeMap<String, BundleSpec>,
}

/// `(h⁰, h¹)` of a line bundle.
pub type CurveDims = (usize, usize);

impl CurveProfile {
    /// Adds the trivial bundle `"O"` and the canonical bundle `"K"` and checks
    /// every declared bundle against Riemann–Roch.
    pub fn new(genus: u32, hyperelliptic: bool, bundles: BTreeMap<String, BundleSpec>) -> Result<Self> {
        let mut p = Self {
            genus,
            hyperelliptic,
            bundles,
        };
        p.bundles.entry("O".into()).or_insert(BundleSpec {
            trivial: true,
            ..BundleSpec::of_degree(0)
        });
        p.bundles.entry("K".into()).or_insert(BundleSpec {
            canonical: true,
            ..BundleSpec::of_degree(2 * genus as i64 - 2)
        });
        p.check()?;
        Ok(p)
    }

    pub fn p1() -> Self {
        Self::new(0, false, BTreeMap::new()).expect("genus 0 is consistent")
    }

    fn g(&self) -> i64 {
        self.genus as i64
    }

    pub fn check(&self) -> Result<()> {
        if self.hyperelliptic && self.genus < 2 {
            return Err(Error::Profile("hyperelliptic curves have genus at least 2".into()));
        }
        for (name, b) in &self.bundles {
            self.bundle_dims(b).map_err(|e| match e {
                Error::Profile(m) => Error::Profile(format!("bundle {name:?}: {m}")),
                other => other,
            })?;
        }
        Ok(())
    }

    fn bundle_dims(&self, b: &BundleSpec) -> Result<CurveDims> {
        let g = self.g();
        let d = b.degree;
        let chi = d + 1 - g;
        if b.trivial && b.canonical && g != 1 {
            return Err(Error::Profile("trivial and canonical only coincide in genus 1".into()));
        }
        if b.trivial && d != 0 {
            return Err(Error::Profile(format!("trivial bundle of degree {d}")));
        }
        if b.canonical && d != 2 * g - 2 {
            return Err(Error::Profile(format!("canonical bundle must have degree {}, got {d}", 2 * g - 2)));
        }
        let forced = if d < 0 {
            Some(0)
        } else if b.trivial {
            Some(1)
        } else if b.canonical {
            Some(g)
        } else if d > 2 * g - 2 {
            Some(chi)
        } else {
            None
        };
        let h0 = match (forced, b.h0) {
            (Some(f), Some(o)) if f != o as i64 => {
                return Err(Error::Profile(format!("h0 override {o} contradicts the forced value {f}")));
            }
            (Some(f), _) => f,
            (None, Some(o)) => {
                let o = o as i64;
                if o < chi.max(0) {
                    return Err(Error::Profile(format!("h0 override {o} below max(0, deg+1-g) = {}", chi.max(0))));
                }
                if 2 * (o - 1) > d {
                    return Err(Error::Profile(format!("h0 override {o} violates Clifford's bound for degree {d}")));
                }
                o
            }
            (None, None) => chi.max(0),
        };
        Ok((h0 as usize, (h0 - chi) as usize))
    }

    pub fn bundle(&self, name: &str) -> Result<&BundleSpec> {
        self.bundles
            .get(name)
            .ok_or_else(|| Error::Profile(format!("unknown bundle {name:?}")))
    }

    pub fn dims(&self, name: &str) -> Result<CurveDims> {
        self.bundle_dims(self.bundle(name)?)
    }

    /// `T⊗B` for a named `B`: trivial when `B` is canonical, generic
    /// otherwise, except that `T` itself is trivial in genus 1.
    pub fn tangent_twist(&self, name: &str) -> Result<BundleSpec> {
        let b = self.bundle(name)?;
        let g = self.g();
        let d = b.degree + 2 - 2 * g;
        Ok(if b.canonical || (b.trivial && g == 1) {
            BundleSpec {
                trivial: true,
                ..BundleSpec::of_degree(0)
            }
        } else {
            BundleSpec::of_degree(d)
        })
    }

    pub fn tangent_twist_dims(&self, name: &str) -> Result<CurveDims> {
        self.bundle_dims(&self.tangent_twist(name)?)
    }
}

/// `(h⁰, h¹, h²)` of `L_C ⊠ L_D` on `C×D`.
pub fn kunneth_dims(pc: &CurveProfile, pd: &CurveProfile, lc: &str, ld: &str) -> Result<[usize; 3]> {
    let (a0, a1) = pc.dims(lc)?;
    let (b0, b1) = pd.dims(ld)?;
    Ok([a0 * b0, a0 * b1 + a1 * b0, a1 * b1])
}

/// Dimensions of the four summands of `H¹(T_X⊗L)`, in the order
/// `H⁰(T_C⊗L_C)⊗H¹(L_D)`, `H¹(T_C⊗L_C)⊗H⁰(L_D)`, `H⁰(L_C)⊗H¹(T_D⊗L_D)`,
/// `H¹(L_C)⊗H⁰(T_D⊗L_D)`.
pub fn tangent_h1_dims(pc: &CurveProfile, pd: &CurveProfile, lc: &str, ld: &str) -> Result<[usize; 4]> {
    let (c0, c1) = pc.dims(lc)?;
    let (d0, d1) = pd.dims(ld)?;
    let (tc0, tc1) = pc.tangent_twist_dims(lc)?;
    let (td0, td1) = pd.tangent_twist_dims(ld)?;
    Ok([tc0 * d1, tc1 * d0, c0 * td1, c1 * td0])
}

/// A dense coefficient block in declared bases, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub rows: usize,
    pub cols: usize,
    pub coeffs: Vec<Rational>,
}

impl Block {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            coeffs: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn new(rows: usize, cols: usize, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() != rows * cols {
            return Err(Error::Mismatch(format!("{} coefficients for a {rows}×{cols} block", coeffs.len())));
        }
        Ok(Self { rows, cols, coeffs })
    }

    pub fn scalar(c: Rational) -> Self {
        Self {
            rows: 1,
            cols: 1,
            coeffs: vec![c],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.coeffs[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn as_matrix(&self) -> Matrix {
        (0..self.rows)
            .map(|i| self.coeffs[i * self.cols..(i + 1) * self.cols].to_vec())
            .collect()
    }

    fn from_matrix(rows: usize, cols: usize, m: &Matrix) -> Self {
        let mut b = Self::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                b.coeffs[i * cols + j] = m[i][j].clone();
            }
        }
        b
    }

    pub fn add(&self, other: &Block) -> Result<Block> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Mismatch("blocks of different shapes".into()));
        }
        Ok(Block {
            rows: self.rows,
            cols: self.cols,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Block {
        Block {
            rows: self.rows,
            cols: self.cols,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }
}

impl Serialize for Block {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            rows: usize,
            cols: usize,
            coeffs: Vec<String>,
        }
        Out {
            rows: self.rows,
            cols: self.cols,
            coeffs: self.coeffs.iter().map(rational::to_text).collect(),
        }
        .serialize(s)
    }
}

fn mat_mul(a: &Matrix, b: &Matrix, inner: usize, rows: usize, cols: usize) -> Matrix {
    let mut out = linalg::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let mut acc = Rational::zero();
            for k in 0..inner {
                acc += &a[i][k] * &b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

/// The four components of a class in `H¹(T_X⊗L)`. `η₁` is an
/// `h⁰(T_C⊗L_C) × h¹(L_D)` block and `η₄` an `h¹(L_C) × h⁰(T_D⊗L_D)` block;
/// `η₂`, `η₃` are flat vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EtaVector {
    pub eta1: Block,
    pub eta2: Block,
    pub eta3: Block,
    pub eta4: Block,
}

impl EtaVector {
    /// Shapes from the profiles; all components zero.
    pub fn zero(pc: &CurveProfile, pd: &CurveProfile, lc: &str, ld: &str) -> Result<Self> {
        let (c0, c1) = pc.dims(lc)?;
        let (d0, d1) = pd.dims(ld)?;
        let (tc0, tc1) = pc.tangent_twist_dims(lc)?;
        let (td0, td1) = pd.tangent_twist_dims(ld)?;
        Ok(Self {
            eta1: Block::zero(tc0, d1),
            eta2: Block::zero(1, tc1 * d0),
            eta3: Block::zero(1, c0 * td1),
            eta4: Block::zero(c1, td0),
        })
    }

    /// The carpet case, where `η₁` and `η₄` are scalars.
    pub fn scalars(eta1: Rational, eta4: Rational) -> Self {
        Self {
            eta1: Block::scalar(eta1),
            eta2: Block::zero(1, 0),
            eta3: Block::zero(1, 0),
            eta4: Block::scalar(eta4),
        }
    }

    pub fn dims(&self) -> [usize; 4] {
        [
            self.eta1.rows * self.eta1.cols,
            self.eta2.coeffs.len(),
            self.eta3.coeffs.len(),
            self.eta4.rows * self.eta4.cols,
        ]
    }
}

/// The canonical maps `H⁰(T⊗L)⊗H¹(ω) → H¹(L)` on each factor, evaluated on the
/// generator of `H¹(ω)`: an `h¹(L) × h⁰(T⊗L)` matrix per factor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pairings {
    pub phi_c: Block,
    pub phi_d: Block,
}

/// The pairing on ℙ¹ for `L = O(a)`: the cup of `x^e ∈ H⁰(O(a+2))` with the
/// class of `x⁻¹` in `H¹(O(-2))`, reduced in `H¹(O(a))`.
pub fn p1_pairing(a: i64) -> Result<Block> {
    let cover = Cover::Three;
    let omega = cech::h1_representative(&CohClass::basis(1, -2, 0), cover)?;
    let src = cech::cohomology_dim(a + 2, 0);
    let tgt = cech::cohomology_dim(a, 1);
    let mut m = linalg::zeros(tgt, src);
    for e in 0..src {
        let s = cech::global_section(cover, a + 2, &LaurentPoly::xpow(e as i64))?;
        let class = cech::reduce_h1_class(&cech::cup(&s, &omega)?)?;
        for (r, c) in class.coeffs.into_iter().enumerate() {
            m[r][e] = c;
        }
    }
    Ok(Block::from_matrix(tgt, src, &m))
}

impl Pairings {
    /// Both factors ℙ¹ with `L = O(a_c) ⊠ O(a_d)`.
    pub fn p1(a_c: i64, a_d: i64) -> Result<Self> {
        Ok(Self {
            phi_c: p1_pairing(a_c)?,
            phi_d: p1_pairing(a_d)?,
        })
    }

    /// Computes each pairing on a ℙ¹ factor and takes the supplied one
    /// otherwise.
    pub fn for_profiles(
        pc: &CurveProfile,
        pd: &CurveProfile,
        lc: &str,
        ld: &str,
        phi_c: Option<Block>,
        phi_d: Option<Block>,
    ) -> Result<Self> {
        let pick = |p: &CurveProfile, l: &str, given: Option<Block>, side: &str| -> Result<Block> {
            let (_, h1) = p.dims(l)?;
            let (t0, _) = p.tangent_twist_dims(l)?;
            let b = match given {
                Some(b) => b,
                None if p.genus == 0 => p1_pairing(p.bundle(l)?.degree)?,
                None => {
                    return Err(Error::Profile(format!(
                        "the pairing on factor {side} (genus {}) must be supplied",
                        p.genus
                    )))
                }
            };
            if (b.rows, b.cols) != (h1, t0) {
                return Err(Error::Mismatch(format!(
                    "pairing on factor {side} must be {h1}×{t0}, got {}×{}",
                    b.rows, b.cols
                )));
            }
            Ok(b)
        };
        Ok(Self {
            phi_c: pick(pc, lc, phi_c, "C")?,
            phi_d: pick(pd, ld, phi_d, "D")?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    /// `Δ(M)` in `H¹(L_C)⊗H¹(L_D)`, rows indexed by the `C` basis.
    pub delta: Block,
    pub extendable: bool,
}

/// `Δ(M) = deg(M_C)·Φ_C·η₁ + deg(M_D)·η₄·Φ_Dᵀ` with `∇₀ = degree`.
pub fn obstruction_surface(eta: &EtaVector, deg_c: i64, deg_d: i64, pairings: &Pairings) -> Result<ObstructionReport> {
    let (pc, pd) = (&pairings.phi_c, &pairings.phi_d);
    if pc.cols != eta.eta1.rows || pd.cols != eta.eta4.cols || eta.eta1.cols != pd.rows || eta.eta4.rows != pc.rows {
        return Err(Error::Mismatch(format!(
            "η₁ is {}×{}, η₄ is {}×{}, pairings are {}×{} and {}×{}",
            eta.eta1.rows, eta.eta1.cols, eta.eta4.rows, eta.eta4.cols, pc.rows, pc.cols, pd.rows, pd.cols
        )));
    }
    let rows = pc.rows;
    let cols = pd.rows;
    let left = mat_mul(&pc.as_matrix(), &eta.eta1.as_matrix(), pc.cols, rows, cols);
    let pdt: Matrix = (0..pd.cols).map(|i| (0..pd.rows).map(|j| pd.get(j, i).clone()).collect()).collect();
    let right = mat_mul(&eta.eta4.as_matrix(), &pdt, pd.cols, rows, cols);
    let delta = Block::from_matrix(rows, cols, &left)
        .scale(&rational::int(deg_c))
        .add(&Block::from_matrix(rows, cols, &right).scale(&rational::int(deg_d)))?;
    Ok(ObstructionReport {
        extendable: delta.is_zero(),
        delta,
    })
}

/// The pair `(η₁, η₄)` of a carpet, or only the knowledge that their ratio is
/// irrational (both then nonzero).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EtaPair {
    Rational(Rational, Rational),
    IrrationalRatio,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct K3Report {
    /// Primitive generator of `{(a, b) : η₁a + η₄b = 0}` when that lattice has
    /// rank one.
    pub lattice_generator: Option<[i64; 2]>,
    pub lattice_rank: usize,
    pub projective: bool,
    pub extends_to_x3: bool,
    pub is_k3_carpet: bool,
    pub warnings: Vec<String>,
}

/// Primitive integer vector on the line `η₁a + η₄b = 0`, first nonzero entry
/// positive.
fn primitive_generator(e1: &Rational, e4: &Rational) -> Result<[i64; 2]> {
    let den = e1.denom().lcm(e4.denom());
    let a = (e4 * Rational::from_integer(den.clone())).to_integer();
    let b = -(e1 * Rational::from_integer(den)).to_integer();
    let g = a.gcd(&b);
    let (mut a, mut b) = (a / &g, b / &g);
    if a.is_negative() || (a.is_zero() && b.is_negative()) {
        a = -a;
        b = -b;
    }
    let conv = |v: num_bigint::BigInt| -> Result<i64> {
        i64::try_from(v).map_err(|_| Error::Range("lattice generator exceeds 64-bit integers".into()))
    };
    Ok([conv(a)?, conv(b)?])
}

pub fn k3_classify(eta: &EtaPair, g_c: u32, g_d: u32) -> Result<K3Report> {
    let mut warnings = Vec::new();
    for (side, g) in [("C", g_c), ("D", g_d)] {
        if g < 2 {
            warnings.push(format!("genus of {side} is {g}; the carpet criteria assume genus at least 2"));
        }
    }
    let (gc1, gd1) = (g_c as i64 - 1, g_d as i64 - 1);
    let report = match eta {
        EtaPair::IrrationalRatio => K3Report {
            lattice_generator: None,
            lattice_rank: 0,
            projective: false,
            extends_to_x3: gc1 == 0 && gd1 == 0,
            is_k3_carpet: true,
            warnings,
        },
        EtaPair::Rational(e1, e4) => {
            let both_zero = e1.is_zero() && e4.is_zero();
            let product_negative = (e1 * e4).is_negative();
            let x3 = (e1 * rational::int(gc1) + e4 * rational::int(gd1)).is_zero();
            K3Report {
                lattice_generator: if both_zero { None } else { Some(primitive_generator(e1, e4)?) },
                lattice_rank: if both_zero { 2 } else { 1 },
                projective: both_zero || product_negative,
                extends_to_x3: x3,
                is_k3_carpet: true,
                warnings,
            }
        }
    };
    Ok(report)
}

/// Whether `O(a, b)` extends to the carpet: `η₁a + η₄b = 0`.
pub fn k3_extendable(eta: &EtaPair, a: i64, b: i64) -> bool {
    match eta {
        EtaPair::IrrationalRatio => a == 0 && b == 0,
        EtaPair::Rational(e1, e4) => (e1 * rational::int(a) + e4 * rational::int(b)).is_zero(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaReport {
    pub every_line_bundle_extends: bool,
    pub projective: bool,
    pub x3_exists: Verdict,
    pub sampled_degrees: usize,
}

/// `L_C` a theta characteristic with sections, `L_D = ω_D`, `η₁ = η₄ = 0`.
pub fn theta_example_check(
    pc: &CurveProfile,
    theta: &str,
    pd: &CurveProfile,
    eta: &EtaVector,
) -> Result<ThetaReport> {
    pc.check()?;
    pd.check()?;
    let th = pc.bundle(theta)?;
    if 2 * th.degree != 2 * pc.genus as i64 - 2 {
        return Err(Error::Profile(format!("{theta:?} has degree {}, not g−1", th.degree)));
    }
    let (h0, _) = pc.dims(theta)?;
    if h0 == 0 {
        return Err(Error::Profile(format!("{theta:?} must have sections")));
    }
    if !eta.eta1.is_zero() || !eta.eta4.is_zero() {
        return Err(Error::Mismatch("this configuration fixes η₁ = η₄ = 0".into()));
    }
    let shapes = EtaVector::zero(pc, pd, theta, "K")?;
    if eta.dims() != shapes.dims() {
        return Err(Error::Mismatch(format!(
            "η has component sizes {:?}, the profiles give {:?}",
            eta.dims(),
            shapes.dims()
        )));
    }
    let (c1, tc0) = (pc.dims(theta)?.1, pc.tangent_twist_dims(theta)?.0);
    let (d1, td0) = (pd.dims("K")?.1, pd.tangent_twist_dims("K")?.0);
    let pairings = Pairings {
        phi_c: Block::zero(c1, tc0),
        phi_d: Block::zero(d1, td0),
    };
    let mut all = true;
    let mut sampled = 0;
    for a in -4..=4 {
        for b in -4..=4 {
            all &= obstruction_surface(eta, a, b, &pairings)?.extendable;
            sampled += 1;
        }
    }
    Ok(ThetaReport {
        every_line_bundle_extends: all,
        projective: true,
        x3_exists: if eta.eta3.is_zero() { Verdict::Unknown } else { Verdict::Yes },
        sampled_degrees: sampled,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Predicates {
    pub pic_nonbanal: bool,
    pub moduli_nonbanal: bool,
}

pub fn nonbanal_predicates(g: u32, deg_l: i64, hyperelliptic: bool, l_is_canonical: bool) -> Result<Predicates> {
    if g < 2 {
        return Err(Error::Range(format!("the predicates need genus at least 2, got {g}")));
    }
    let g = g as i64;
    if l_is_canonical && deg_l != 2 * g - 2 {
        return Err(Error::Profile(format!("a canonical L has degree {}, got {deg_l}", 2 * g - 2)));
    }
    let numeric = !hyperelliptic && deg_l <= 2 - 2 * g;
    Ok(Predicates {
        pic_nonbanal: numeric || l_is_canonical,
        moduli_nonbanal: numeric,
    })
}

/// `r²(deg L + g − 1)`.
pub fn moduli_fiber_rank(r: u32, g: u32, deg_l: i64) -> Result<i64> {
    if r == 0 {
        return Err(Error::Range("rank must be positive".into()));
    }
    if g < 2 {
        return Err(Error::Range(format!("genus must be at least 2, got {g}")));
    }
    if deg_l >= 0 {
        return Err(Error::Range(format!("deg L must be negative, got {deg_l}")));
    }
    let v = deg_l + g as i64 - 1;
    if v < 0 {
        return Err(Error::Range(format!(
            "deg L + g − 1 = {v} is negative; no bundle has negative rank"
        )));
    }
    Ok((r as i64).pow(2) * v)
}

/// Degree of `ω_{X_n}` restricted to `X`, i.e. of `ω_X⊗L^{1−n}`.
pub fn dualizing_restriction_degree(g: u32, deg_l: i64, n: usize) -> i64 {
    2 * g as i64 - 2 + (1 - n as i64) * deg_l
}

/// The double is a carpet (trivial dualizing sheaf) exactly when `L ≅ ω_X`;
/// on a curve profile this is the `canonical` flag of the named bundle.
pub fn double_has_trivial_dualizing(p: &CurveProfile, l: &str) -> Result<bool> {
    Ok(p.bundle(l)?.canonical || (p.genus == 1 && p.bundle(l)?.trivial))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn p1_with(name: &str, d: i64) -> CurveProfile {
        let mut b = BTreeMap::new();
        b.insert(name.to_string(), BundleSpec::of_degree(d));
        CurveProfile::new(0, false, b).unwrap()
    }

    #[test]
    fn p1_product_dims() {
        let p = p1_with("L", -2);
        assert_eq!(kunneth_dims(&p, &p, "L", "L").unwrap(), [0, 0, 1]);
        assert_eq!(tangent_h1_dims(&p, &p, "L", "L").unwrap(), [1, 0, 0, 1]);
    }

    #[test]
    fn genus_two_canonical() {
        let p = CurveProfile::new(2, false, BTreeMap::new()).unwrap();
        assert_eq!(tangent_h1_dims(&p, &p, "K", "K").unwrap(), [1, 4, 4, 1]);
        assert_eq!(kunneth_dims(&p, &p, "O", "O").unwrap(), [1, 4, 4]);
    }

    #[test]
    fn p1_pairing_is_identity_for_minus_two() {
        assert_eq!(p1_pairing(-2).unwrap(), Block::scalar(int(1)));
        let wide = p1_pairing(-5).unwrap();
        assert_eq!((wide.rows, wide.cols), (4, 0));
    }

    #[test]
    fn worked_carpets() {
        let r = k3_classify(&EtaPair::Rational(int(2), int(3)), 2, 2).unwrap();
        assert_eq!(r.lattice_generator, Some([3, -2]));
        assert!(!r.projective && !r.extends_to_x3);
        let r = k3_classify(&EtaPair::Rational(int(1), int(-2)), 2, 2).unwrap();
        assert!(r.projective);
        let r = k3_classify(&EtaPair::Rational(int(0), int(0)), 3, 5).unwrap();
        assert!(r.projective && r.extends_to_x3 && r.lattice_rank == 2);
    }

    #[test]
    fn override_bounds() {
        let mut b = BTreeMap::new();
        b.insert("theta".to_string(), BundleSpec { h0: Some(1), ..BundleSpec::of_degree(1) });
        assert!(CurveProfile::new(2, false, b.clone()).is_ok());
        b.insert("bad".to_string(), BundleSpec { h0: Some(3), ..BundleSpec::of_degree(-1) });
        assert!(matches!(CurveProfile::new(2, false, b), Err(Error::Profile(_))));
    }

    #[test]
    fn predicates_boundary() {
        let p = nonbanal_predicates(3, -4, false, false).unwrap();
        assert!(p.pic_nonbanal && p.moduli_nonbanal);
        assert_eq!(moduli_fiber_rank(2, 3, -1).unwrap(), 4);
        assert!(moduli_fiber_rank(2, 2, -2).is_err());
    }
}
