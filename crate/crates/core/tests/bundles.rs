use std::collections::BTreeMap;

use proptest::prelude::*;
use ribbonlab::algebra::rational::{frac, int};
use ribbonlab::algebra::{LaurentPoly, TruncElem};
use ribbonlab::bundles::*;
use ribbonlab::cech::{self, CohClass, Cover, LineBundleData};
use ribbonlab::multischeme::{ideal_extensions, trivial_scheme, MultiScheme};
use ribbonlab::random;

fn cover_of(three: bool) -> Cover {
    if three {
        Cover::Three
    } else {
        Cover::Two
    }
}

#[test]
fn pullbacks_have_their_degree() {
    for d in -6..=6 {
        let x = trivial_scheme(-2, 3, Cover::Three).unwrap();
        let l = pullback_line_bundle(&x, d).unwrap();
        assert!(l.is_valid());
        assert_eq!(l.degree().unwrap(), d);
        assert_eq!(canonical_class(&l).unwrap().trace.coeffs, vec![int(d)]);
    }
}

#[test]
fn canonical_class_is_additive() {
    let x = trivial_scheme(-1, 2, Cover::Three).unwrap();
    for d in -6..=6 {
        for e in -6..=6 {
            let a = pullback_line_bundle(&x, d).unwrap();
            let b = pullback_line_bundle(&x, e).unwrap();
            let ab = canonical_class(&a.tensor(&b).unwrap()).unwrap().trace;
            let sum = canonical_class(&a).unwrap().trace.add(&canonical_class(&b).unwrap().trace);
            assert_eq!(ab, sum);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_bundles_are_valid(seed in any::<u64>(), l in -3i64..=2, n in 1usize..=4, rank in 1usize..=2, three in any::<bool>()) {
        let mut r = random::rng(seed);
        let x = random::scheme(&mut r, l, n, cover_of(three));
        let e = random::bundle(&mut r, &x, rank);
        prop_assert!(e.is_valid(), "{:?}", e.validate().violations);
        for m in 1..=n {
            prop_assert!(restrict_bundle(&e, m).unwrap().is_valid());
        }
    }

    #[test]
    fn canonical_trace_is_frame_independent_and_additive(seed in any::<u64>(), l in -3i64..=1, three in any::<bool>()) {
        let mut r = random::rng(seed);
        let x = random::scheme(&mut r, l, 2, cover_of(three));
        let e = random::bundle(&mut r, &x, 2);
        let f = random::bundle(&mut r, &x, 1);
        let frames: Vec<TruncMatrix> = (0..x.cover().charts()).map(|c| random::frame_change(&mut r, c, 2, 2)).collect();
        let moved = e.change_frame(&frames).unwrap();
        let te = canonical_class(&e).unwrap().trace;
        let tf = canonical_class(&f).unwrap().trace;
        prop_assert_eq!(&canonical_class(&moved).unwrap().trace, &te);
        prop_assert_eq!(&te.coeffs, &vec![int(e.degree().unwrap())]);
        prop_assert_eq!(canonical_class(&e.direct_sum(&f).unwrap()).unwrap().trace, te.add(&tf));
        prop_assert_eq!(canonical_class(&e.tensor(&f).unwrap()).unwrap().trace, te.add(&tf.scale(&int(2))));
    }

    #[test]
    fn extensions_restrict_back(seed in any::<u64>(), l in -3i64..=2, n in 1usize..=3, rank in 1usize..=2, three in any::<bool>()) {
        let mut r = random::rng(seed);
        let big = random::scheme(&mut r, l, n + 1, cover_of(three));
        let x = big.restrict_multiplicity(n).unwrap();
        let e = random::bundle(&mut r, &x, rank);
        let lift = e.reference_lift(&big).unwrap();
        let beta = random::end_cocycle(&mut r, &lift, n);
        let ext = extend_bundle(&e, &big, &beta).unwrap();
        prop_assert!(ext.is_valid());
        prop_assert_eq!(restrict_bundle(&ext, n).unwrap(), e);
    }

    #[test]
    fn delta0_formula_matches_oracle(seed in any::<u64>(), l in -6i64..=3, n in 1usize..=3, three in any::<bool>()) {
        let mut r = random::rng(seed);
        let n = if l < 0 { 1 } else { n };
        let cover = cover_of(three);
        let big = random::scheme(&mut r, l, n + 1, cover);
        let eta = if n == 1 {
            let c0 = random::rational(&mut r);
            (0..cover.charts()).map(|c| (c, LaurentPoly::constant(c0.clone()))).collect()
        } else {
            random::line_section(&mut r, cover, (n as i64 - 1) * l)
        };
        let res = delta0(&big, &eta).unwrap();
        prop_assert!(res.exact);
        prop_assert_eq!(res.witness.coboundary().unwrap(), res.formula.sub(&res.oracle).unwrap());
        prop_assert!(res.class.is_zero());
    }

    #[test]
    fn delta1_formula_matches_oracle(seed in any::<u64>(), l in -6i64..=3, rank in 1usize..=2) {
        let mut r = random::rng(seed);
        let x = random::scheme(&mut r, l, 2, Cover::Three);
        let e = random::bundle(&mut r, &x, rank);
        let beta = random::vector_cocycle(&mut r, &e);
        let res = delta1(&e, &beta).unwrap();
        prop_assert!(res.exact);
    }

    #[test]
    fn delta0_shift_is_the_cup(seed in any::<u64>(), l in 0i64..=3) {
        let mut r = random::rng(seed);
        let x2 = random::scheme(&mut r, l, 2, Cover::Three);
        let eta = random::line_section(&mut r, Cover::Three, l);
        let mu = random::line_cocycle_rand(&mut r, Cover::Three, l, 3);
        let s = delta0_shift(&x2, &eta, &mu).unwrap();
        prop_assert!(s.exact);
        prop_assert_eq!(&s.lhs_class, &s.rhs_class);
        let zero = cech::Cochain::zero(Cover::Three, LineBundleData::new(l), 1);
        prop_assert!(delta0_shift(&x2, &eta, &zero).unwrap().lhs.is_zero());
    }

    #[test]
    fn coboundary_twists_are_isomorphic(seed in any::<u64>(), l in -4i64..=-1, n in 1usize..=2, three in any::<bool>()) {
        let mut r = random::rng(seed);
        let cover = cover_of(three);
        let big = random::scheme(&mut r, l, n + 1, cover);
        let d = pullback_line_bundle(&big.restrict_multiplicity(n).unwrap(), r_degree(&mut r)).unwrap();
        let tau = random::zero_cochain(&mut r, cover, n as i64 * l, 3);
        let beta = random::line_cocycle_rand(&mut r, cover, n as i64 * l, 3);
        let a = extend_line_bundle(&d, &big, &beta).unwrap();
        let b = extend_line_bundle(&d, &big, &beta.add(&tau.coboundary().unwrap()).unwrap()).unwrap();
        let iso = line_bundle_iso(&a, &b).unwrap();
        prop_assert!(iso.isomorphic, "{}", iso.reason);
    }
}

fn r_degree<R: rand::Rng>(r: &mut R) -> i64 {
    r.gen_range(-3..=3)
}

fn combos(dim: usize) -> Vec<Vec<i64>> {
    (0..3usize.pow(dim as u32))
        .map(|mut k| {
            (0..dim)
                .map(|_| {
                    let c = (k % 3) as i64 - 1;
                    k /= 3;
                    c
                })
                .collect()
        })
        .collect()
}

/// Pairwise isomorphism of extensions built from class combinations agrees
/// with membership of the class difference in the δ⁰-image.
fn check_torsor(d: &BundleCocycle, big: &MultiScheme) {
    let t = extension_classes(d, big).unwrap();
    let classes: Vec<CohClass> = combos(t.torsor_dim)
        .into_iter()
        .filter(|c| c.iter().all(|&v| v >= 0) || t.torsor_dim <= 2)
        .map(|c| CohClass::from_coeffs(1, t.param_degree, c.into_iter().map(int).collect()).unwrap())
        .collect();
    let exts: Vec<BundleCocycle> = classes.iter().map(|c| t.extension(d, big, c).unwrap()).collect();
    for (i, a) in exts.iter().enumerate() {
        assert_eq!(&restrict_bundle(a, d.n()).unwrap(), d);
        for (j, b) in exts.iter().enumerate().skip(i + 1) {
            let diff = classes[j].add(&classes[i].scale(&int(-1)));
            let iso = line_bundle_iso(a, b).unwrap().isomorphic;
            assert_eq!(iso, t.in_image(&diff), "classes {:?} vs {:?}", classes[i].coeffs, classes[j].coeffs);
        }
    }
}

#[test]
fn torsor_isomorphism_matches_delta0_image() {
    let mut r = random::rng(2024);
    for l in [-2i64, -3] {
        for n in 1..=2 {
            let big = trivial_scheme(l, n + 1, Cover::Three).unwrap();
            check_torsor(&pullback_line_bundle(&big.restrict_multiplicity(n).unwrap(), 1).unwrap(), &big);
            let big = random::scheme(&mut r, l, n + 1, Cover::Three);
            check_torsor(&pullback_line_bundle(&big.restrict_multiplicity(n).unwrap(), -2).unwrap(), &big);
        }
    }
}

#[test]
fn ledger_matches_extension_classes() {
    for l in -4i64..=2 {
        let ledger = picard_ledger(l, 4).unwrap();
        let x = trivial_scheme(l, 4, Cover::Three).unwrap();
        let direct: Vec<usize> = picard_ledger_for(&x).unwrap().iter().map(|t| t.quotient_dim).collect();
        assert_eq!(ledger, direct);
        for (k, dim) in ledger.iter().enumerate() {
            assert_eq!(*dim, cech::cohomology_dim(l * (k as i64 + 1), 1), "ℓ = {l}, level {}", k + 1);
        }
    }
    assert_eq!(picard_ledger(-3, 3).unwrap(), vec![2, 5]);
    assert!(picard_ledger(-3, 1).is_err());
}

#[test]
fn iso_rejects_mismatched_inputs() {
    let x = trivial_scheme(-2, 2, Cover::Three).unwrap();
    let y = trivial_scheme(-3, 2, Cover::Three).unwrap();
    let a = pullback_line_bundle(&x, 0).unwrap();
    let b = pullback_line_bundle(&y, 0).unwrap();
    assert!(line_bundle_iso(&a, &b).is_err());
    let e = split_bundle(&x, &[1, 2]).unwrap();
    assert!(line_bundle_iso(&e, &a).is_err());
}

#[test]
fn scaled_transitions_are_isomorphic() {
    let x = trivial_scheme(-2, 3, Cover::Three).unwrap();
    let mut upper = BTreeMap::new();
    upper.insert((0, 1), TruncElem::constant(LaurentPoly::monomial(frac(3, 2), 4), 3));
    upper.insert((1, 2), TruncElem::constant(LaurentPoly::xpow(-4), 3));
    let a = make_line_bundle(&x, upper).unwrap();
    let iso = line_bundle_iso(&a, &pullback_line_bundle(&x, 4).unwrap()).unwrap();
    assert!(iso.isomorphic);
    assert!(iso.witness.is_some());
}

#[test]
fn broken_transition_is_reported() {
    let x = trivial_scheme(-2, 2, Cover::Three).unwrap();
    let good = pullback_line_bundle(&x, 2).unwrap();
    let mut all: BTreeMap<(usize, usize), TruncMatrix> = good.transitions().map(|(p, m)| (*p, m.clone())).collect();
    all.insert((0, 2), TruncMatrix::scalar(TruncElem::constant(LaurentPoly::xpow(3), 2)));
    let bad = BundleCocycle::from_parts(x, all).unwrap();
    assert!(!bad.is_valid());
    assert!(!bad.validate().violations.is_empty());
}

#[test]
fn module_types_of_direct_sums() {
    fn comps(n: usize, budget: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let i = prefix.len() + 1;
        if i > n {
            out.push(prefix.clone());
            return;
        }
        for m in 0..=budget / i {
            prefix.push(m);
            comps(n, budget - m * i, prefix, out);
            prefix.pop();
        }
    }
    let mut r = random::rng(5);
    for n in 1..=5 {
        let mut all = Vec::new();
        comps(n, 8, &mut Vec::new(), &mut all);
        for m in all {
            let p = TruncModulePresentation::direct_sum(n, &m).unwrap();
            let t = module_type(&p);
            assert_eq!(t.type_vector, m);
            assert!(t.containment_holds);
            let q = random::presentation_equivalence(&mut r, &p, 6);
            assert_eq!(module_type(&q).type_vector, m);
        }
    }
}

#[test]
fn presentation_json_round_trip() {
    let p = TruncModulePresentation::direct_sum(3, &[1, 2, 0]).unwrap();
    let text = serde_json::to_string(&p).unwrap();
    let back: TruncModulePresentation = serde_json::from_str(&text).unwrap();
    assert_eq!(back, p);
}

#[test]
fn bundle_json_round_trip() {
    let mut r = random::rng(9);
    let x = random::scheme(&mut r, -2, 2, Cover::Three);
    let e = random::bundle(&mut r, &x, 2);
    let v = serde_json::to_value(&e).unwrap();
    let back = BundleCocycle::from_json(v, |_| unreachable!()).unwrap();
    assert_eq!(back, e);
    let _ = ideal_extensions(&x).unwrap();
}
