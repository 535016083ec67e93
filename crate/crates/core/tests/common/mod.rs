#![allow(dead_code)]

use proptest::prelude::*;
use ribbonlab::algebra::rational::frac;
use ribbonlab::algebra::{LaurentPoly, TruncAuto, TruncElem};

pub fn laurent(lo: i64, hi: i64, max_terms: usize) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((lo..=hi, -5i64..=5, 1i64..=3), 0..=max_terms)
        .prop_map(|ts| LaurentPoly::from_terms(ts.into_iter().map(|(e, p, q)| (e, frac(p, q)))))
}

pub fn unit_monomial(lo: i64, hi: i64) -> impl Strategy<Value = LaurentPoly> {
    (lo..=hi, prop_oneof![-5i64..=-1, 1i64..=5], 1i64..=3).prop_map(|(e, p, q)| LaurentPoly::monomial(frac(p, q), e))
}

pub fn trunc(n: usize, lo: i64, hi: i64) -> impl Strategy<Value = TruncElem> {
    prop::collection::vec(laurent(lo, hi, 3), n).prop_map(|c| TruncElem::new(c).unwrap())
}

pub fn trunc_unit(n: usize, lo: i64, hi: i64) -> impl Strategy<Value = TruncElem> {
    (trunc(n, lo, hi), unit_monomial(lo, hi)).prop_map(|(mut a, u)| {
        a.set_coeff(0, u);
        a
    })
}

pub fn auto(n: usize, lo: i64, hi: i64) -> impl Strategy<Value = TruncAuto> {
    (trunc(n, lo, hi), trunc_unit(n, lo, hi)).prop_map(|(mut x, u)| {
        x.set_coeff(0, LaurentPoly::x());
        TruncAuto::from_unit(x, &u).unwrap()
    })
}

/// `(n, a, b, c)` with a shared length.
pub fn triple(max_n: usize, lo: i64, hi: i64) -> impl Strategy<Value = (usize, TruncElem, TruncElem, TruncElem)> {
    (1..=max_n).prop_flat_map(move |n| (Just(n), trunc(n, lo, hi), trunc(n, lo, hi), trunc(n, lo, hi)))
}
