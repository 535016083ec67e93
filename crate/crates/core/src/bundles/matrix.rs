//! Square matrices over the Laurent ring and over its truncated extension.

use std::fmt;

use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{LaurentPoly, TruncAuto, TruncElem};
use crate::{Error, Result};

pub type LaurentMatrix = Vec<Vec<LaurentPoly>>;

pub fn laurent_identity(r: usize) -> LaurentMatrix {
    (0..r)
        .map(|i| (0..r).map(|j| if i == j { LaurentPoly::one() } else { LaurentPoly::zero() }).collect())
        .collect()
}

pub fn laurent_zero(r: usize) -> LaurentMatrix {
    vec![vec![LaurentPoly::zero(); r]; r]
}

pub fn laurent_mul(a: &LaurentMatrix, b: &LaurentMatrix) -> LaurentMatrix {
    let r = a.len();
    (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let mut acc = LaurentPoly::zero();
                    for k in 0..r {
                        acc += &(&a[i][k] * &b[k][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn laurent_add(a: &LaurentMatrix, b: &LaurentMatrix) -> LaurentMatrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn laurent_sub(a: &LaurentMatrix, b: &LaurentMatrix) -> LaurentMatrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn laurent_mat_vec(a: &LaurentMatrix, v: &[LaurentPoly]) -> Vec<LaurentPoly> {
    a.iter()
        .map(|row| {
            let mut acc = LaurentPoly::zero();
            for (x, y) in row.iter().zip(v) {
                acc += &(x * y);
            }
            acc
        })
        .collect()
}

pub fn laurent_is_zero(a: &LaurentMatrix) -> bool {
    a.iter().all(|row| row.iter().all(LaurentPoly::is_zero))
}

fn minor(m: &LaurentMatrix, row: usize, col: usize) -> LaurentMatrix {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, f)| f.clone()).collect())
        .collect()
}

/// Laplace expansion along the first row; ranks here are tiny.
pub fn laurent_det(m: &LaurentMatrix) -> LaurentPoly {
    match m.len() {
        0 => LaurentPoly::one(),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = LaurentPoly::zero();
            for (j, a) in m[0].iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let term = a * &laurent_det(&minor(m, 0, j));
                if j % 2 == 0 {
                    acc += &term;
                } else {
                    acc -= &term;
                }
            }
            acc
        }
    }
}

/// Adjugate over the determinant, which must be a unit monomial.
pub fn laurent_inverse(m: &LaurentMatrix) -> Result<LaurentMatrix> {
    let det = laurent_det(m);
    let dinv = det
        .unit_inverse()
        .map_err(|_| Error::NotUnit(format!("determinant {det} of a transition matrix")))?;
    let r = m.len();
    if r == 1 {
        return Ok(vec![vec![dinv]]);
    }
    Ok((0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let c = &laurent_det(&minor(m, j, i)) * &dinv;
                    if (i + j) % 2 == 0 {
                        c
                    } else {
                        -&c
                    }
                })
                .collect()
        })
        .collect())
}

/// An `r×r` matrix of truncated elements, all of the same length `n`.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncMatrix {
    n: usize,
    rows: Vec<Vec<TruncElem>>,
}

impl TruncMatrix {
    pub fn new(rows: Vec<Vec<TruncElem>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Parse("empty transition matrix".into()));
        }
        if rows.iter().any(|row| row.len() != r) {
            return Err(Error::Parse("transition matrix is not square".into()));
        }
        let n = rows[0][0].n();
        for a in rows.iter().flatten() {
            if a.n() != n {
                return Err(Error::Multiplicity(a.n(), n));
            }
        }
        Ok(Self { n, rows })
    }

    pub fn identity(r: usize, n: usize) -> Self {
        Self::constant(&laurent_identity(r), n)
    }

    pub fn scalar(a: TruncElem) -> Self {
        Self {
            n: a.n(),
            rows: vec![vec![a]],
        }
    }

    pub fn constant(m: &LaurentMatrix, n: usize) -> Self {
        Self::term(m, 0, n)
    }

    /// `m·t^k`.
    pub fn term(m: &LaurentMatrix, k: usize, n: usize) -> Self {
        Self {
            n,
            rows: m
                .iter()
                .map(|row| row.iter().map(|f| TruncElem::term(f.clone(), k, n)).collect())
                .collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &TruncElem {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<TruncElem>] {
        &self.rows
    }

    /// The matrix of `t^k` coefficients.
    pub fn coeff(&self, k: usize) -> LaurentMatrix {
        self.rows
            .iter()
            .map(|row| row.iter().map(|a| a.coeff_or_zero(k)).collect())
            .collect()
    }

    pub fn reduction(&self) -> LaurentMatrix {
        self.coeff(0)
    }

    pub fn mul(&self, other: &TruncMatrix) -> TruncMatrix {
        let r = self.rank();
        let rows = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        let mut acc = TruncElem::zero(self.n);
                        for k in 0..r {
                            acc = &acc + &(&self.rows[i][k] * &other.rows[k][j]);
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        TruncMatrix { n: self.n, rows }
    }

    fn zip_with(&self, other: &TruncMatrix, f: impl Fn(&TruncElem, &TruncElem) -> TruncElem) -> TruncMatrix {
        TruncMatrix {
            n: self.n,
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| f(a, b)).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &TruncMatrix) -> TruncMatrix {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &TruncMatrix) -> TruncMatrix {
        self.zip_with(other, |a, b| a - b)
    }

    fn map(&self, f: impl Fn(&TruncElem) -> TruncElem) -> TruncMatrix {
        let rows: Vec<Vec<TruncElem>> = self.rows.iter().map(|row| row.iter().map(&f).collect()).collect();
        TruncMatrix {
            n: rows[0][0].n(),
            rows,
        }
    }

    /// Entrywise action of a gluing automorphism.
    pub fn apply(&self, g: &TruncAuto) -> TruncMatrix {
        self.map(|a| g.apply(a))
    }

    pub fn resize(&self, m: usize) -> TruncMatrix {
        self.map(|a| a.resize(m))
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rank(), self.n)
    }

    /// `Σ_k (-A₀⁻¹N)^k A₀⁻¹` with `N` the part divisible by `t`.
    pub fn inverse(&self) -> Result<TruncMatrix> {
        let a0inv = TruncMatrix::constant(&laurent_inverse(&self.reduction())?, self.n);
        let nil = self.sub(&TruncMatrix::constant(&self.reduction(), self.n));
        let step = a0inv.mul(&nil).map(|a| -a);
        let mut acc = TruncMatrix::identity(self.rank(), self.n);
        let mut power = TruncMatrix::identity(self.rank(), self.n);
        for _ in 1..self.n {
            power = power.mul(&step);
            acc = acc.add(&power);
        }
        Ok(acc.mul(&a0inv))
    }

    /// Kronecker product, the transition matrix of a tensor product.
    pub fn kron(&self, other: &TruncMatrix) -> TruncMatrix {
        let (r, s) = (self.rank(), other.rank());
        let mut rows = vec![vec![TruncElem::zero(self.n); r * s]; r * s];
        for i in 0..r {
            for j in 0..r {
                for k in 0..s {
                    for l in 0..s {
                        rows[i * s + k][j * s + l] = &self.rows[i][j] * &other.rows[k][l];
                    }
                }
            }
        }
        TruncMatrix { n: self.n, rows }
    }

    pub fn block_diag(&self, other: &TruncMatrix) -> TruncMatrix {
        let (r, s) = (self.rank(), other.rank());
        let mut rows = vec![vec![TruncElem::zero(self.n); r + s]; r + s];
        for i in 0..r {
            for j in 0..r {
                rows[i][j] = self.rows[i][j].clone();
            }
        }
        for i in 0..s {
            for j in 0..s {
                rows[r + i][r + j] = other.rows[i][j].clone();
            }
        }
        TruncMatrix { n: self.n, rows }
    }
}

impl fmt::Debug for TruncMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rank() == 1 {
            return write!(f, "[{}]", self.rows[0][0]);
        }
        write!(f, "[")?;
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let cells: Vec<String> = row.iter().map(|a| a.to_string()).collect();
            write!(f, "{}", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for TruncMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TruncMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<TruncElem>>::deserialize(d)?;
        TruncMatrix::new(rows).map_err(D::Error::custom)
    }
}
