use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::laurent::LaurentPoly;
use super::rational::Rational;
use crate::error::{Error, Result};

/// Element of `Q[x, x^-1][t]/(t^n)`; `coeffs[i]` is the coefficient of `t^i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncElem {
    coeffs: Vec<LaurentPoly>,
}

/// Which ring operation [`trunc_arith`] performs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TruncOp {
    Add,
    Mul,
    InvertFirst,
}

/// Checked entry point for ring arithmetic; `InvertFirst` ignores `b` except
/// for the multiplicity check.
pub fn trunc_arith(a: &TruncElem, b: &TruncElem, op: TruncOp) -> Result<TruncElem> {
    if a.n() != b.n() {
        return Err(Error::Multiplicity(a.n(), b.n()));
    }
    match op {
        TruncOp::Add => Ok(a + b),
        TruncOp::Mul => Ok(a * b),
        TruncOp::InvertFirst => a.inverse(),
    }
}

impl TruncElem {
    pub fn new(coeffs: Vec<LaurentPoly>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Range("truncated element needs n >= 1".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn zero(n: usize) -> Self {
        assert!(n >= 1);
        Self {
            coeffs: vec![LaurentPoly::zero(); n],
        }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(LaurentPoly::one(), n)
    }

    /// A `t`-free element.
    pub fn constant(f: LaurentPoly, n: usize) -> Self {
        let mut out = Self::zero(n);
        out.coeffs[0] = f;
        out
    }

    /// `f·t^k`, zero when `k >= n`.
    pub fn term(f: LaurentPoly, k: usize, n: usize) -> Self {
        let mut out = Self::zero(n);
        if k < n {
            out.coeffs[k] = f;
        }
        out
    }

    pub fn t(n: usize) -> Self {
        Self::term(LaurentPoly::one(), 1, n)
    }

    pub fn x(n: usize) -> Self {
        Self::constant(LaurentPoly::x(), n)
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, i: usize) -> &LaurentPoly {
        &self.coeffs[i]
    }

    /// Coefficient of `t^i`, zero past the truncation.
    pub fn coeff_or_zero(&self, i: usize) -> LaurentPoly {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[LaurentPoly] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, i: usize, f: LaurentPoly) {
        self.coeffs[i] = f;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(LaurentPoly::is_zero)
    }

    pub fn is_unit(&self) -> bool {
        self.coeffs[0].is_unit()
    }

    /// Reduction mod `t^m` when `m <= n`, zero padding when `m > n`.
    pub fn resize(&self, m: usize) -> Self {
        assert!(m >= 1);
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(m, LaurentPoly::zero());
        Self { coeffs }
    }

    pub fn truncate(&self, m: usize) -> Self {
        assert!(m <= self.n());
        self.resize(m)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|f| f.scale(c)).collect(),
        }
    }

    pub fn mul_laurent(&self, f: &LaurentPoly) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|g| g * f).collect(),
        }
    }

    /// Multiplication by `t^k`.
    pub fn mul_t_pow(&self, k: usize) -> Self {
        let n = self.n();
        let mut out = Self::zero(n);
        for i in 0..n.saturating_sub(k) {
            out.coeffs[i + k] = self.coeffs[i].clone();
        }
        out
    }

    /// Exact division by `t^k`; the low coefficients must vanish.
    pub fn div_t_pow(&self, k: usize) -> Result<Self> {
        if self.coeffs.iter().take(k).any(|f| !f.is_zero()) {
            return Err(Error::Mismatch(format!("{self} is not divisible by t^{k}")));
        }
        let n = self.n();
        let mut out = Self::zero(n);
        for i in k..n {
            out.coeffs[i - k] = self.coeffs[i].clone();
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.n());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `b_0 = a_0^{-1}`, `b_k = -a_0^{-1} Σ_{i=1..k} a_i b_{k-i}`.
    pub fn inverse(&self) -> Result<Self> {
        let a0inv = self.coeffs[0]
            .unit_inverse()
            .map_err(|_| Error::NotUnit(format!("not a unit in truncated ring: {self}")))?;
        let n = self.n();
        let mut b: Vec<LaurentPoly> = Vec::with_capacity(n);
        b.push(a0inv.clone());
        for k in 1..n {
            let mut acc = LaurentPoly::zero();
            for i in 1..=k {
                acc += &(&self.coeffs[i] * &b[k - i]);
            }
            b.push(-&(&a0inv * &acc));
        }
        Ok(Self { coeffs: b })
    }

    /// Coefficientwise `d/dx`.
    pub fn dx(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(LaurentPoly::derivative).collect(),
        }
    }
}

impl fmt::Display for TruncElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " mod t^{}", self.n())
    }
}

impl fmt::Debug for TruncElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncElem({self})")
    }
}

impl Add for &TruncElem {
    type Output = TruncElem;
    fn add(self, rhs: &TruncElem) -> TruncElem {
        assert_eq!(self.n(), rhs.n(), "multiplicity mismatch");
        TruncElem {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &TruncElem {
    type Output = TruncElem;
    fn sub(self, rhs: &TruncElem) -> TruncElem {
        assert_eq!(self.n(), rhs.n(), "multiplicity mismatch");
        TruncElem {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &TruncElem {
    type Output = TruncElem;
    fn neg(self) -> TruncElem {
        TruncElem {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul for &TruncElem {
    type Output = TruncElem;
    fn mul(self, rhs: &TruncElem) -> TruncElem {
        assert_eq!(self.n(), rhs.n(), "multiplicity mismatch");
        let n = self.n();
        let mut out = TruncElem::zero(n);
        for i in 0..n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                if rhs.coeffs[j].is_zero() {
                    continue;
                }
                out.coeffs[i + j] += &(&self.coeffs[i] * &rhs.coeffs[j]);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for TruncElem {
            type Output = TruncElem;
            fn $m(self, rhs: TruncElem) -> TruncElem {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Serialize for TruncElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TruncElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coeffs: Vec<LaurentPoly> = Vec::deserialize(d)?;
        TruncElem::new(coeffs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn lp(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().map(|(e, c)| (*e, int(*c))))
    }

    #[test]
    fn geometric_series_inverse() {
        let a = TruncElem::new(vec![LaurentPoly::one(), LaurentPoly::x(), LaurentPoly::zero()]).unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(inv.coeffs(), &[LaurentPoly::one(), lp(&[(1, -1)]), lp(&[(2, 1)])]);
    }

    #[test]
    fn difference_of_squares_mod_t2() {
        let a = TruncElem::new(vec![LaurentPoly::x(), LaurentPoly::one()]).unwrap();
        let b = TruncElem::new(vec![LaurentPoly::x(), lp(&[(0, -1)])]).unwrap();
        assert_eq!(&a * &b, TruncElem::constant(lp(&[(2, 1)]), 2));
    }

    #[test]
    fn identity_and_errors() {
        let a = TruncElem::new(vec![lp(&[(1, 3)]), lp(&[(-2, 1)]), lp(&[(0, 5)])]).unwrap();
        assert_eq!(&a * &TruncElem::one(3), a);
        let bad = TruncElem::new(vec![lp(&[(0, 1), (1, 1)]), LaurentPoly::zero()]).unwrap();
        assert!(matches!(bad.inverse(), Err(Error::NotUnit(_))));
        assert!(trunc_arith(&a, &TruncElem::one(2), TruncOp::Add).is_err());
    }

    #[test]
    fn t_shifts() {
        let a = TruncElem::new(vec![lp(&[(0, 1)]), lp(&[(1, 1)]), lp(&[(2, 1)])]).unwrap();
        let s = a.mul_t_pow(1);
        assert_eq!(s.coeffs(), &[LaurentPoly::zero(), lp(&[(0, 1)]), lp(&[(1, 1)])]);
        assert_eq!(s.div_t_pow(1).unwrap(), a.truncate(2).resize(3));
        assert!(a.div_t_pow(1).is_err());
    }
}
