use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::laurent::LaurentPoly;
use super::rational;
use super::trunc::TruncElem;
use crate::error::{Error, Result};

/// Ring automorphism of `Q[x, x^-1][t]/(t^n)` fixed by the images of `x` and
/// `t`. Invariants: `image_x = x mod t`, and `image_t = u·t` with `u mod t` a
/// unit monomial.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncAuto {
    image_x: TruncElem,
    image_t: TruncElem,
}

impl TruncAuto {
    pub fn new(image_x: TruncElem, image_t: TruncElem) -> Result<Self> {
        if image_x.n() != image_t.n() {
            return Err(Error::Multiplicity(image_x.n(), image_t.n()));
        }
        if *image_x.coeff(0) != LaurentPoly::x() {
            return Err(Error::InvalidAuto(format!(
                "image of x must reduce to x, got {}",
                image_x.coeff(0)
            )));
        }
        if !image_t.coeff(0).is_zero() {
            return Err(Error::InvalidAuto("image of t has a t-free term".into()));
        }
        if image_t.n() >= 2 && !image_t.coeff(1).is_unit() {
            return Err(Error::InvalidAuto(format!(
                "image of t is not a unit multiple of t: {}",
                image_t.coeff(1)
            )));
        }
        Ok(Self { image_x, image_t })
    }

    /// `x ↦ image_x`, `t ↦ u·t`.
    pub fn from_unit(image_x: TruncElem, u: &TruncElem) -> Result<Self> {
        let n = image_x.n();
        let t_img = u.resize(n).mul_t_pow(1);
        Self::new(image_x, t_img)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            image_x: TruncElem::x(n),
            image_t: TruncElem::t(n),
        }
    }

    pub fn n(&self) -> usize {
        self.image_x.n()
    }

    pub fn image_x(&self) -> &TruncElem {
        &self.image_x
    }

    pub fn image_t(&self) -> &TruncElem {
        &self.image_t
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n())
    }

    /// The `t^1` coefficient of the image of `x`: the derivation `D` in
    /// `φ|O = I + t·D + …`.
    pub fn derivation_part(&self) -> LaurentPoly {
        self.image_x.coeff_or_zero(1)
    }

    /// `u` with `φ(t) = u·t`, known modulo `t^{n-1}`; `None` when `n = 1`.
    pub fn t_unit(&self) -> Option<TruncElem> {
        let n = self.n();
        if n < 2 {
            return None;
        }
        let shifted = self.image_t.div_t_pow(1).ok()?;
        Some(shifted.truncate(n - 1))
    }

    /// Reduction mod `t^m` (`m <= n`) or zero-padded lift (`m > n`).
    pub fn resize(&self, m: usize) -> Self {
        Self {
            image_x: self.image_x.resize(m),
            image_t: self.image_t.resize(m),
        }
    }

    /// Ring map applied to `a`: `x ↦ image_x`, `t ↦ image_t`. With
    /// `h = image_x - x` nilpotent, each coefficient is expanded as
    /// `f(x + h) = Σ_k f^(k)(x)/k!·h^k`, which for Laurent `f` agrees with
    /// substituting powers of `image_x` and its inverse.
    pub fn apply(&self, a: &TruncElem) -> TruncElem {
        let n = self.n();
        assert_eq!(a.n(), n, "multiplicity mismatch");
        let h = &self.image_x - &TruncElem::x(n);
        let mut hpow = vec![TruncElem::one(n)];
        for k in 1..n {
            let next = &hpow[k - 1] * &h;
            hpow.push(next);
        }
        let mut out = TruncElem::zero(n);
        let mut tpow = TruncElem::one(n);
        for (i, f) in a.coeffs().iter().enumerate() {
            if i > 0 {
                tpow = &tpow * &self.image_t;
            }
            if f.is_zero() {
                continue;
            }
            let mut sub = TruncElem::zero(n);
            let mut dk = f.clone();
            for (k, hk) in hpow.iter().enumerate().take(n - i) {
                if k > 0 {
                    dk = dk.derivative().scale(&rational::frac(1, k as i64));
                }
                if dk.is_zero() {
                    break;
                }
                sub = &sub + &hk.mul_laurent(&dk);
            }
            out = &out + &(&sub * &tpow);
        }
        out
    }

    /// The same ring map computed by substituting powers of `image_x` and
    /// of its truncated inverse term by term.
    pub fn apply_by_substitution(&self, a: &TruncElem) -> TruncElem {
        let n = self.n();
        assert_eq!(a.n(), n, "multiplicity mismatch");
        let mut lo = 0i64;
        let mut hi = 0i64;
        for f in a.coeffs() {
            if let (Some(l), Some(h)) = (f.min_exp(), f.max_exp()) {
                lo = lo.min(l);
                hi = hi.max(h);
            }
        }
        let mut powers: BTreeMap<i64, TruncElem> = BTreeMap::new();
        powers.insert(0, TruncElem::one(n));
        let mut acc = TruncElem::one(n);
        for e in 1..=hi {
            acc = &acc * &self.image_x;
            powers.insert(e, acc.clone());
        }
        if lo < 0 {
            let inv = self
                .image_x
                .inverse()
                .expect("image of x reduces to x, a unit");
            let mut acc = TruncElem::one(n);
            for e in 1..=-lo {
                acc = &acc * &inv;
                powers.insert(-e, acc.clone());
            }
        }
        let mut out = TruncElem::zero(n);
        let mut tpow = TruncElem::one(n);
        for (i, f) in a.coeffs().iter().enumerate() {
            if i > 0 {
                tpow = &tpow * &self.image_t;
            }
            if f.is_zero() {
                continue;
            }
            let mut sub = TruncElem::zero(n);
            for (e, c) in f.terms() {
                sub = &sub + &powers[&e].scale(c);
            }
            out = &out + &(&sub * &tpow);
        }
        out
    }

    pub fn apply_laurent(&self, f: &LaurentPoly) -> TruncElem {
        self.apply(&TruncElem::constant(f.clone(), self.n()))
    }

    /// `self ∘ other`, i.e. `a ↦ self(other(a))`.
    pub fn compose(&self, other: &TruncAuto) -> TruncAuto {
        assert_eq!(self.n(), other.n(), "multiplicity mismatch");
        TruncAuto {
            image_x: self.apply(&other.image_x),
            image_t: self.apply(&other.image_t),
        }
    }

    /// Two-sided inverse by t-adic successive approximation: the order-`k`
    /// correction of each image is read off the order-`k` defect.
    pub fn invert(&self) -> TruncAuto {
        let n = self.n();
        if n == 1 {
            return self.clone();
        }
        let u0 = self.image_t.coeff(1).clone();
        let u0inv = u0.unit_inverse().expect("validated unit");
        let mut chi_x = TruncElem::x(n);
        let mut chi_t = TruncElem::term(u0inv.clone(), 1, n);
        let x = TruncElem::x(n);
        let t = TruncElem::t(n);
        for k in 1..n {
            let err_x = (&self.apply(&chi_x) - &x).coeff(k).clone();
            if !err_x.is_zero() {
                let c = -&(&err_x * &u0inv.pow(k as u32));
                chi_x = &chi_x + &TruncElem::term(c, k, n);
            }
            if k + 1 < n {
                let err_t = (&self.apply(&chi_t) - &t).coeff(k + 1).clone();
                if !err_t.is_zero() {
                    let c = -&(&err_t * &u0inv.pow(k as u32 + 1));
                    chi_t = &chi_t + &TruncElem::term(c, k + 1, n);
                }
            }
        }
        TruncAuto {
            image_x: chi_x,
            image_t: chi_t,
        }
    }
}

impl fmt::Debug for TruncAuto {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncAuto {{ x ↦ {}, t ↦ {} }}", self.image_x, self.image_t)
    }
}

#[derive(Serialize, Deserialize)]
struct AutoFile {
    n: usize,
    x: TruncElem,
    t: TruncElem,
}

impl Serialize for TruncAuto {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AutoFile {
            n: self.n(),
            x: self.image_x.clone(),
            t: self.image_t.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TruncAuto {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = AutoFile::deserialize(d)?;
        if f.x.n() != f.n || f.t.n() != f.n {
            return Err(D::Error::custom(format!(
                "automorphism declares n = {} but carries {} and {} coefficients",
                f.n,
                f.x.n(),
                f.t.n()
            )));
        }
        TruncAuto::new(f.x, f.t).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn shift_by_t(n: usize) -> TruncAuto {
        TruncAuto::new(&TruncElem::x(n) + &TruncElem::t(n), TruncElem::t(n)).unwrap()
    }

    #[test]
    fn apply_examples() {
        let phi = shift_by_t(2);
        let a = TruncElem::constant(LaurentPoly::xpow(2), 2);
        let expect = TruncElem::new(vec![LaurentPoly::xpow(2), LaurentPoly::monomial(int(2), 1)]).unwrap();
        assert_eq!(phi.apply(&a), expect);

        let scale = TruncAuto::new(TruncElem::x(2), TruncElem::term(LaurentPoly::x(), 1, 2)).unwrap();
        assert_eq!(scale.apply(&TruncElem::t(2)), TruncElem::term(LaurentPoly::x(), 1, 2));
    }

    #[test]
    fn compose_and_invert_examples() {
        let phi = shift_by_t(3);
        let twice = phi.compose(&phi);
        let expect = &TruncElem::x(3) + &TruncElem::t(3).scale(&int(2));
        assert_eq!(twice.image_x(), &expect);
        assert_eq!(twice.image_t(), &TruncElem::t(3));

        let inv = shift_by_t(2).invert();
        assert_eq!(inv.image_x(), &(&TruncElem::x(2) - &TruncElem::t(2)));
        assert!(shift_by_t(4).compose(&shift_by_t(4).invert()).is_identity());
        assert!(TruncAuto::identity(3).invert().is_identity());
    }

    #[test]
    fn rejects_bad_images() {
        assert!(TruncAuto::new(TruncElem::constant(LaurentPoly::xpow(2), 2), TruncElem::t(2)).is_err());
        assert!(TruncAuto::new(TruncElem::x(2), TruncElem::one(2)).is_err());
        let nonunit = TruncElem::term(&LaurentPoly::one() + &LaurentPoly::x(), 1, 2);
        assert!(TruncAuto::new(TruncElem::x(2), nonunit).is_err());
    }

    #[test]
    fn json_round_trip() {
        let phi = shift_by_t(3);
        let s = serde_json::to_string(&phi).unwrap();
        assert!(s.starts_with(r#"{"n":3,"x":"#));
        let back: TruncAuto = serde_json::from_str(&s).unwrap();
        assert_eq!(back, phi);
    }
}
