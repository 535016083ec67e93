//! Finitely presented modules over `Q[t]/(t^n)` and their canonical
//! filtrations, computed with exact ranks on the underlying Q-vector spaces.

use num_traits::{One, Zero};
use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{rational, Rational};
use crate::linalg::{self, Matrix};
use crate::{Error, Result};

/// `Q[t]/(t^n)^g` modulo the submodule spanned by `relations`; each relation
/// lists one polynomial in `t` (coefficients from `t^0` up) per generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncModulePresentation {
    pub n: usize,
    pub generators: usize,
    pub relations: Vec<Vec<Vec<Rational>>>,
}

#[derive(Serialize, Deserialize)]
struct PresentationFile {
    n: usize,
    generators: usize,
    relations: Vec<Vec<Vec<String>>>,
}

impl Serialize for TruncModulePresentation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PresentationFile {
            n: self.n,
            generators: self.generators,
            relations: self
                .relations
                .iter()
                .map(|rel| rel.iter().map(|p| p.iter().map(rational::to_text).collect()).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TruncModulePresentation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = PresentationFile::deserialize(d)?;
        let relations = f
            .relations
            .iter()
            .map(|rel| {
                rel.iter()
                    .map(|p| p.iter().map(|c| rational::parse(c)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        TruncModulePresentation::new(f.n, f.generators, relations).map_err(D::Error::custom)
    }
}

fn poly_mul(a: &[Rational], b: &[Rational], n: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[Rational], b: &[Rational], n: usize) -> Vec<Rational> {
    (0..n)
        .map(|k| a.get(k).cloned().unwrap_or_else(Rational::zero) + b.get(k).cloned().unwrap_or_else(Rational::zero))
        .collect()
}

impl TruncModulePresentation {
    pub fn new(n: usize, generators: usize, relations: Vec<Vec<Vec<Rational>>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Range("modules over Q[t]/(t^0) are zero".into()));
        }
        for rel in &relations {
            if rel.len() != generators {
                return Err(Error::Parse(format!("relation has {} entries for {generators} generators", rel.len())));
            }
        }
        Ok(Self {
            n,
            generators,
            relations: relations
                .into_iter()
                .map(|rel| rel.into_iter().map(|p| poly_add(&p, &[], n)).collect())
                .collect(),
        })
    }

    /// `⊕_i m_i·Q[t]/(t^i)` for `m = (m_1, …, m_n)`.
    pub fn direct_sum(n: usize, multiplicities: &[usize]) -> Result<Self> {
        if multiplicities.len() != n {
            return Err(Error::Mismatch(format!("{} multiplicities for n = {n}", multiplicities.len())));
        }
        let lengths: Vec<usize> = multiplicities
            .iter()
            .enumerate()
            .flat_map(|(i, &m)| std::iter::repeat_n(i + 1, m))
            .collect();
        let g = lengths.len();
        let mut relations = Vec::new();
        for (a, &len) in lengths.iter().enumerate() {
            if len < n {
                let mut rel = vec![vec![Rational::zero(); n]; g];
                rel[a][len] = Rational::one();
                relations.push(rel);
            }
        }
        Self::new(n, g, relations)
    }

    fn dim(&self) -> usize {
        self.generators * self.n
    }

    /// Coordinates are ordered by power of `t` first: `x_{a,k}` sits at
    /// `k·g + a`, so `t^i F` is the tail from `i·g` on.
    fn flatten(&self, rel: &[Vec<Rational>]) -> Vec<Rational> {
        let g = self.generators;
        let mut v = vec![Rational::zero(); self.dim()];
        for (a, p) in rel.iter().enumerate() {
            for (k, c) in p.iter().enumerate() {
                v[k * g + a] = c.clone();
            }
        }
        v
    }

    /// `t^j` acting on the flattened space.
    fn shift(&self, v: &[Rational], j: usize) -> Vec<Rational> {
        let off = j * self.generators;
        let mut out = vec![Rational::zero(); self.dim()];
        let keep = self.dim().saturating_sub(off);
        out[off.min(self.dim())..].clone_from_slice(&v[..keep]);
        out
    }

    fn unit(&self, idx: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        v[idx] = Rational::one();
        v
    }

    /// Spanning set of the relation submodule as Q-vectors.
    fn relation_span(&self) -> Matrix {
        let mut rows = Vec::new();
        for rel in &self.relations {
            let v = self.flatten(rel);
            for j in 0..self.n {
                rows.push(self.shift(&v, j));
            }
        }
        rows
    }

    fn reduced(&self) -> Reduced {
        let mut m = self.relation_span();
        let pivots = linalg::rref(&mut m, self.dim());
        m.truncate(pivots.len());
        Reduced { basis: m, pivots }
    }

    /// `dim_Q t^i M`: `t^i F` is a coordinate tail, so `dim(t^i F + R)` is
    /// `g(n−i)` plus the rank of `R` on the first `i·g` coordinates, which is
    /// the number of pivots there.
    pub fn first_filtration_dim(&self, i: usize) -> usize {
        self.reduced().first_dim(self, i)
    }

    /// Rows `w` with `w·v = 0` for every relation vector `v`.
    fn annihilator(&self) -> Matrix {
        let r = self.relation_span();
        if r.is_empty() {
            return (0..self.dim()).map(|k| self.unit(k)).collect();
        }
        linalg::kernel(&r, self.dim())
    }

    /// `dim_Q M^{(j)}` with `M^{(j)} = {u : t^j u = 0}`, from the kernel of
    /// `W·t^j` where the rows of `W` cut out `R`.
    pub fn second_filtration_dim(&self, j: usize) -> usize {
        let off = j * self.generators;
        let eq: Matrix = self
            .annihilator()
            .into_iter()
            .map(|w| {
                let mut out = vec![Rational::zero(); self.dim()];
                let keep = self.dim().saturating_sub(off);
                out[..keep].clone_from_slice(&w[off.min(self.dim())..]);
                out
            })
            .collect();
        let rank_eq = if eq.is_empty() { 0 } else { linalg::rank(&eq) };
        self.dim() - rank_eq - self.reduced().pivots.len()
    }

    /// Whether every generator of `t^i F + R` lies in the preimage of `R`
    /// under `t^j`.
    pub fn power_inside_kernel(&self, i: usize, j: usize) -> bool {
        let red = self.reduced();
        red.tail_killed(self, i, j) && red.basis.iter().all(|r| red.contains(self.shift(r, j)))
    }

    /// Relation `r` += `p`·relation `s`.
    pub fn add_relation_multiple(&mut self, r: usize, s: usize, p: &[Rational]) {
        let n = self.n;
        let src = self.relations[s].clone();
        for (slot, q) in self.relations[r].iter_mut().zip(&src) {
            *slot = poly_add(slot, &poly_mul(p, q, n), n);
        }
    }

    /// Relation `r` multiplied by a unit of `Q[t]/(t^n)`.
    pub fn scale_relation(&mut self, r: usize, unit: &[Rational]) -> Result<()> {
        if unit.first().is_none_or(Zero::is_zero) {
            return Err(Error::NotUnit("scaling by a non-unit".into()));
        }
        let n = self.n;
        for slot in self.relations[r].iter_mut() {
            *slot = poly_mul(slot, unit, n);
        }
        Ok(())
    }

    /// Change of generators: column `b` += `p`·column `a` in every relation.
    pub fn add_generator_multiple(&mut self, b: usize, a: usize, p: &[Rational]) {
        let n = self.n;
        for rel in self.relations.iter_mut() {
            let add = poly_mul(p, &rel[a], n);
            rel[b] = poly_add(&rel[b], &add, n);
        }
    }

    /// Appends a redundant relation, a combination of existing ones.
    pub fn push_combination(&mut self, coeffs: &[(usize, Vec<Rational>)]) {
        let n = self.n;
        let mut rel = vec![vec![Rational::zero(); n]; self.generators];
        for (s, p) in coeffs {
            for (slot, q) in rel.iter_mut().zip(&self.relations[*s]) {
                *slot = poly_add(slot, &poly_mul(p, q, n), n);
            }
        }
        self.relations.push(rel);
    }
}

/// Row-reduced basis of the relation span.
struct Reduced {
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Reduced {
    fn contains(&self, mut v: Vec<Rational>) -> bool {
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
        v.iter().all(Zero::is_zero)
    }

    fn first_dim(&self, m: &TruncModulePresentation, i: usize) -> usize {
        let g = m.generators;
        let below = self.pivots.iter().filter(|&&p| p < i * g).count();
        g * (m.n - i.min(m.n)) + below - self.pivots.len()
    }

    /// `t^j` of each coordinate generator of `t^i F` lies in `R`.
    fn tail_killed(&self, m: &TruncModulePresentation, i: usize, j: usize) -> bool {
        (i * m.generators..m.dim()).all(|idx| self.contains(m.shift(&m.unit(idx), j)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuleType {
    /// `(m_1, …, m_n)`.
    pub type_vector: Vec<usize>,
    /// `dim t^i M` for `i = 0, …, n`.
    pub first_filtration_dims: Vec<usize>,
    /// `dim M^{(i)}` for `i = 0, …, n`.
    pub second_filtration_dims: Vec<usize>,
    /// `t^i M ⊆ M^{(n−i)}` for every `i`.
    pub containment_holds: bool,
}

/// The type from one row reduction: `dim t^i M` from pivot counts,
/// `dim M^{(j)} = dim M − dim t^j M` by rank–nullity, and the containments
/// from `t`-stability of `R` plus the coordinate tails.
pub fn module_type(m: &TruncModulePresentation) -> ModuleType {
    let n = m.n;
    let red = m.reduced();
    let first: Vec<usize> = (0..=n).map(|i| red.first_dim(m, i)).collect();
    let second: Vec<usize> = (0..=n).map(|j| first[0] - first[j]).collect();
    let layers: Vec<usize> = (0..=n).map(|i| if i < n { first[i] - first[i + 1] } else { 0 }).collect();
    let type_vector = (1..=n).map(|k| layers[k - 1] - layers[k]).collect();
    let t_stable = red.basis.iter().all(|r| red.contains(m.shift(r, 1)));
    let containment_holds = t_stable && (0..=n).all(|i| red.tail_killed(m, i, n - i));
    ModuleType {
        type_vector,
        first_filtration_dims: first,
        second_filtration_dims: second,
        containment_holds,
    }
}
