//! Seeded generators for randomized checks. Every generator takes the RNG
//! explicitly; [`rng`] builds the ChaCha stream used throughout.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{rational, LaurentPoly, Rational, TruncAuto, TruncElem};
use crate::bundles::{
    laurent_add, laurent_inverse, laurent_mat_vec, laurent_mul, split_bundle, BundleCocycle, LaurentMatrix,
    TruncMatrix, TruncModulePresentation, VectorCochain,
};
use crate::cech::{Cochain, Cover, LineBundleData};
use crate::multischeme::{
    derivation_cocycle, extend_scheme_twisted, ideal_extensions, line_cocycle, make_double, MultiScheme,
};

pub const DEFAULT_SEED: u64 = 0x5eed_2b1b;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small rational with numerator in `[-5, 5]` and denominator in `[1, 3]`.
pub fn rational<R: Rng>(rng: &mut R) -> Rational {
    rational::frac(rng.gen_range(-5..=5), rng.gen_range(1..=3))
}

pub fn nonzero_rational<R: Rng>(rng: &mut R) -> Rational {
    loop {
        let q = rational(rng);
        if q != rational::zero() {
            return q;
        }
    }
}

/// Up to `max_terms` terms with exponents in `[lo, hi]`.
pub fn laurent<R: Rng>(rng: &mut R, lo: i64, hi: i64, max_terms: usize) -> LaurentPoly {
    if lo > hi {
        return LaurentPoly::zero();
    }
    let k = rng.gen_range(0..=max_terms);
    LaurentPoly::from_terms((0..k).map(|_| (rng.gen_range(lo..=hi), rational(rng))))
}

pub fn unit_monomial<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> LaurentPoly {
    LaurentPoly::monomial(nonzero_rational(rng), rng.gen_range(lo..=hi))
}

pub fn trunc<R: Rng>(rng: &mut R, n: usize, lo: i64, hi: i64, max_terms: usize) -> TruncElem {
    TruncElem::new((0..n).map(|_| laurent(rng, lo, hi, max_terms)).collect()).expect("n >= 1")
}

pub fn trunc_unit<R: Rng>(rng: &mut R, n: usize, lo: i64, hi: i64, max_terms: usize) -> TruncElem {
    let mut a = trunc(rng, n, lo, hi, max_terms);
    a.set_coeff(0, unit_monomial(rng, lo, hi));
    a
}

/// Automorphism with `x ↦ x + Σ p_k t^k`, `t ↦ (c·x^e + Σ v_k t^k)·t`.
pub fn auto<R: Rng>(rng: &mut R, n: usize, lo: i64, hi: i64, max_terms: usize) -> TruncAuto {
    let mut img_x = trunc(rng, n, lo, hi, max_terms);
    img_x.set_coeff(0, LaurentPoly::x());
    let u = trunc_unit(rng, n, lo, hi, max_terms);
    TruncAuto::from_unit(img_x, &u).expect("valid by construction")
}

/// Regular automorphism of chart `chart` that is the identity on L's frame
/// mod t; coefficients of degree at most `deg`.
pub fn chart_auto<R: Rng>(rng: &mut R, chart: usize, n: usize, deg: i64) -> TruncAuto {
    let (lo, hi) = match chart {
        0 => (0, deg),
        1 => (-deg, 0),
        _ => (-deg, deg),
    };
    let mut v = trunc(rng, n, lo, hi, 2);
    v.set_coeff(0, LaurentPoly::one());
    let mut coord = trunc(rng, n, lo, hi, 2);
    let img_x = match chart {
        1 => {
            coord.set_coeff(0, LaurentPoly::xpow(-1));
            coord.inverse().expect("x^-1 is a unit")
        }
        _ => {
            coord.set_coeff(0, LaurentPoly::x());
            coord
        }
    };
    TruncAuto::from_unit(img_x, &v).expect("valid by construction")
}

/// A 1-cocycle of O(d) with random `σ_01`, `σ_12`.
pub fn line_cocycle_rand<R: Rng>(rng: &mut R, cover: Cover, d: i64, span: i64) -> Cochain {
    let s01 = laurent(rng, -span, span, 3);
    let s12 = laurent(rng, -span, span, 3);
    line_cocycle(cover, d, s01, s12)
}

/// A 0-cochain of O(d), regular on each chart.
pub fn zero_cochain<R: Rng>(rng: &mut R, cover: Cover, d: i64, span: i64) -> Cochain {
    let vals = (0..cover.charts()).map(|i| {
        let f = match i {
            0 => laurent(rng, 0, span, 3),
            1 => laurent(rng, -span, 0, 3),
            _ => laurent(rng, -span, span, 3),
        };
        (vec![i], f)
    });
    Cochain::new(cover, LineBundleData::new(d), 0, vals).expect("regular by construction")
}

/// A random 2-cochain of O(d) on three charts.
pub fn two_cochain<R: Rng>(rng: &mut R, d: i64, span: i64) -> Cochain {
    let f = laurent(rng, -span, span, 4);
    Cochain::new(Cover::Three, LineBundleData::new(d), 2, [(vec![0, 1, 2], f)]).expect("triple")
}

/// A random scheme of multiplicity `n`: a random double, then extensions with
/// random ideal cocycles and random torsor twists, then a random change of
/// chart trivializations.
pub fn scheme<R: Rng>(rng: &mut R, l: i64, n: usize, cover: Cover) -> MultiScheme {
    let d = derivation_cocycle(cover, l, laurent(rng, -4, 4, 2), laurent(rng, -4, 4, 2));
    let mut x = make_double(l, &d).expect("cocycle by construction");
    if n == 1 {
        return x.restrict_multiplicity(1).expect("n >= 1");
    }
    while x.n() < n {
        let k = x.n();
        let ext = ideal_extensions(&x).expect("n >= 2");
        let eta = line_cocycle_rand(rng, cover, (k as i64 - 1) * l, 3);
        let theta = ext.from_cocycle(&eta).expect("cocycle by construction");
        let tw = derivation_cocycle(cover, k as i64 * l, laurent(rng, -3, 3, 1), laurent(rng, -3, 3, 1));
        x = extend_scheme_twisted(&x, &theta, Some(&tw)).expect("extension exists on a curve");
    }
    let charts: Vec<TruncAuto> = (0..cover.charts()).map(|c| chart_auto(rng, c, n, 2)).collect();
    x.gauge(&charts).expect("regular chart automorphisms")
}

/// `(chart → value)` data for a global section of L^m on each chart.
pub fn section_monomials(cover: Cover, d: i64) -> Vec<BTreeMap<usize, LaurentPoly>> {
    let lb = LineBundleData::new(d);
    (0..=d)
        .map(|e| {
            (0..cover.charts())
                .map(|i| (i, &lb.transition(i, 0) * &LaurentPoly::xpow(e)))
                .collect()
        })
        .collect()
}

pub fn pick_cover<R: Rng>(rng: &mut R) -> Cover {
    if rng.gen_bool(0.5) {
        Cover::Two
    } else {
        Cover::Three
    }
}

/// Random section of O(d) as chart values, zero when `d < 0`.
pub fn line_section<R: Rng>(rng: &mut R, cover: Cover, d: i64) -> BTreeMap<usize, LaurentPoly> {
    let mut out: BTreeMap<usize, LaurentPoly> = (0..cover.charts()).map(|c| (c, LaurentPoly::zero())).collect();
    for basis in section_monomials(cover, d) {
        let c = rational(rng);
        for (chart, f) in basis {
            *out.get_mut(&chart).unwrap() += &f.scale(&c);
        }
    }
    out
}

fn regular_laurent<R: Rng>(rng: &mut R, chart: usize, span: i64, max_terms: usize) -> LaurentPoly {
    match chart {
        0 => laurent(rng, 0, span, max_terms),
        1 => laurent(rng, -span, 0, max_terms),
        _ => laurent(rng, -span, span, max_terms),
    }
}

/// An invertible frame change on chart `chart`: unipotent upper-triangular
/// reduction with regular entries plus regular higher-order terms.
pub fn frame_change<R: Rng>(rng: &mut R, chart: usize, rank: usize, n: usize) -> TruncMatrix {
    let rows = (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| {
                    let mut coeffs: Vec<LaurentPoly> = (0..n).map(|_| regular_laurent(rng, chart, 2, 1)).collect();
                    coeffs[0] = match i.cmp(&j) {
                        std::cmp::Ordering::Equal => LaurentPoly::constant(nonzero_rational(rng)),
                        std::cmp::Ordering::Less => regular_laurent(rng, chart, 2, 2),
                        std::cmp::Ordering::Greater => LaurentPoly::zero(),
                    };
                    TruncElem::new(coeffs).expect("n >= 1")
                })
                .collect()
        })
        .collect();
    TruncMatrix::new(rows).expect("square")
}

/// A random bundle: a split bundle with degrees in `[-3, 3]`, twisted by a
/// random End-valued cocycle at order `n−1` when `n >= 2`, then
/// moved by random frame changes.
pub fn bundle<R: Rng>(rng: &mut R, x: &MultiScheme, rank: usize) -> BundleCocycle {
    let degrees: Vec<i64> = (0..rank).map(|_| rng.gen_range(-3..=3)).collect();
    let mut e = split_bundle(x, &degrees).expect("rank >= 1");
    let n = x.n();
    if n >= 2 {
        let k = n - 1;
        let beta = end_cocycle(rng, &e, k);
        e = e.twist(k, &beta).expect("cocycle by construction");
    }
    let frames: Vec<TruncMatrix> = (0..x.cover().charts()).map(|c| frame_change(rng, c, rank, n)).collect();
    e.change_frame(&frames).expect("regular invertible frames")
}

/// A 1-cocycle of End(E|X)⊗L^k: random `β_01`, `β_12` and, on three charts,
/// `β_02 = β_01 + u^k·θ_01·β_12·θ_01⁻¹` with `θ_01` reduced.
pub fn end_cocycle<R: Rng>(rng: &mut R, e: &BundleCocycle, k: usize) -> BTreeMap<(usize, usize), LaurentMatrix> {
    let rank = e.rank();
    let u = LineBundleData::new(k as i64 * e.scheme().l_degree());
    let mut beta: BTreeMap<(usize, usize), LaurentMatrix> = BTreeMap::new();
    let rand_mat = |rng: &mut R| -> LaurentMatrix {
        (0..rank).map(|_| (0..rank).map(|_| laurent(rng, -3, 3, 2)).collect()).collect()
    };
    beta.insert((0, 1), rand_mat(rng));
    if e.cover() == Cover::Three {
        let b12 = rand_mat(rng);
        let th = e.transition(0, 1).reduction();
        let thinv = laurent_inverse(&th).expect("reduction is invertible");
        let conj = laurent_mul(&laurent_mul(&th, &b12), &thinv);
        let moved: LaurentMatrix = conj
            .into_iter()
            .map(|row| row.into_iter().map(|f| &f * &u.transition(0, 1)).collect())
            .collect();
        beta.insert((0, 2), laurent_add(&beta[&(0, 1)], &moved));
        beta.insert((1, 2), b12);
    }
    beta
}

/// A 1-cocycle valued in `E|X` on three charts: random `β_01`, `β_12` and
/// `β_02 = β_01 + θ^(0)_01·β_12`.
pub fn vector_cocycle<R: Rng>(rng: &mut R, e: &BundleCocycle) -> VectorCochain {
    let r = e.rank();
    let b01: Vec<LaurentPoly> = (0..r).map(|_| laurent(rng, -3, 3, 2)).collect();
    let b12: Vec<LaurentPoly> = (0..r).map(|_| laurent(rng, -3, 3, 2)).collect();
    let moved = laurent_mat_vec(&e.transition(0, 1).reduction(), &b12);
    let b02 = b01.iter().zip(&moved).map(|(a, b)| a + b).collect();
    VectorCochain {
        rank: r,
        q: 1,
        values: [(vec![0, 1], b01), (vec![0, 2], b02), (vec![1, 2], b12)].into_iter().collect(),
    }
}

fn small_poly<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    (0..n).map(|_| rational(rng)).collect()
}

/// `steps` random equivalences: relation combinations, unit rescalings,
/// generator changes and redundant relations.
pub fn presentation_equivalence<R: Rng>(rng: &mut R, m: &TruncModulePresentation, steps: usize) -> TruncModulePresentation {
    let mut out = m.clone();
    let n = out.n;
    for _ in 0..steps {
        let nr = out.relations.len();
        let ng = out.generators;
        match rng.gen_range(0..4) {
            0 if nr >= 2 => {
                let r = rng.gen_range(0..nr);
                let s = (r + rng.gen_range(1..nr)) % nr;
                let p = small_poly(rng, n);
                out.add_relation_multiple(r, s, &p);
            }
            1 if nr >= 1 => {
                let r = rng.gen_range(0..nr);
                let mut u = small_poly(rng, n);
                u[0] = nonzero_rational(rng);
                out.scale_relation(r, &u).expect("unit");
            }
            2 if ng >= 2 => {
                let a = rng.gen_range(0..ng);
                let b = (a + rng.gen_range(1..ng)) % ng;
                let p = small_poly(rng, n);
                out.add_generator_multiple(b, a, &p);
            }
            _ if nr >= 1 => {
                let combo: Vec<(usize, Vec<Rational>)> =
                    (0..nr.min(2)).map(|_| (rng.gen_range(0..nr), small_poly(rng, n))).collect();
                out.push_combination(&combo);
            }
            _ => {}
        }
    }
    out
}
