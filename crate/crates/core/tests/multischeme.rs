use proptest::prelude::*;
use ribbonlab::algebra::{LaurentPoly, TruncAuto, TruncElem};
use ribbonlab::cech::{self, CohClass, Cover};
use ribbonlab::multischeme::*;
use ribbonlab::random;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_schemes_are_valid_and_restrict(seed in any::<u64>(), l in -3i64..=2, n in 1usize..=4, three in any::<bool>()) {
        let mut r = random::rng(seed);
        let cover = if three { Cover::Three } else { Cover::Two };
        let x = random::scheme(&mut r, l, n, cover);
        prop_assert!(x.is_valid(), "{:?}", x.validate().violations);
        for m in 1..=n {
            prop_assert!(x.restrict_multiplicity(m).unwrap().is_valid());
        }
    }

    #[test]
    fn obstruction_difference_is_the_cup(seed in any::<u64>(), l in -3i64..=2, n in 2usize..=3) {
        let mut r = random::rng(seed);
        let x = random::scheme(&mut r, l, n, Cover::Three);
        let ext = ideal_extensions(&x).unwrap();
        let d = (n as i64 - 1) * l;
        let eta1 = random::line_cocycle_rand(&mut r, Cover::Three, d, 3);
        let eta2 = random::line_cocycle_rand(&mut r, Cover::Three, d, 3);
        let t1 = ext.from_cocycle(&eta1).unwrap();
        let t2 = ext.from_cocycle(&eta2).unwrap();
        let diff = obstruction_cochain(&x, &t2).unwrap().sub(&obstruction_cochain(&x, &t1).unwrap()).unwrap();
        let eta = eta2.sub(&eta1).unwrap();
        let od = obstruction_difference_for_cocycle(&x, &eta).unwrap();
        prop_assert_eq!(&diff, &od.cup);
        prop_assert_eq!(od.witness.coboundary().unwrap(), od.cup);
    }

    #[test]
    fn extension_restricts_back(seed in any::<u64>(), l in -3i64..=2, n in 2usize..=3, three in any::<bool>()) {
        let mut r = random::rng(seed);
        let cover = if three { Cover::Three } else { Cover::Two };
        let x = random::scheme(&mut r, l, n, cover);
        let ext = ideal_extensions(&x).unwrap();
        let eta = random::line_cocycle_rand(&mut r, cover, (n as i64 - 1) * l, 3);
        let big = extend_scheme(&x, &ext.from_cocycle(&eta).unwrap()).unwrap();
        prop_assert!(big.is_valid());
        prop_assert_eq!(big.restrict_multiplicity(n).unwrap(), x);
    }

    #[test]
    fn zeta_is_gauge_invariant(seed in any::<u64>(), l in -4i64..=1) {
        let mut r = random::rng(seed);
        let x = random::scheme(&mut r, l, 2, Cover::Three);
        let charts: Vec<TruncAuto> = (0..3).map(|c| random::chart_auto(&mut r, c, 2, 2)).collect();
        let y = x.gauge(&charts).unwrap();
        prop_assert_eq!(double_class(&y).unwrap().class, double_class(&x).unwrap().class);
    }
}

#[test]
fn double_class_recovers_the_input_class() {
    for l in -6..=-2 {
        let twist = l + 2;
        for k in 0..cech::cohomology_dim(twist, 1) {
            let class = CohClass::basis(1, twist, k);
            let rep = cech::h1_representative(&class, Cover::Three).unwrap();
            let d = DerivationCochain::from_cochain(&rep).unwrap();
            let x = make_double(l, &d).unwrap();
            assert!(x.is_valid());
            assert_eq!(double_class(&x).unwrap().class, class);
        }
    }
}

#[test]
fn trivial_scheme_has_zero_class_and_zero_obstructions() {
    let x = trivial_scheme(-3, 2, Cover::Three).unwrap();
    assert!(double_class(&x).unwrap().class.is_zero());
    let ext = ideal_extensions(&x).unwrap();
    for class in ext.basis() {
        let od = obstruction_difference(&x, &class).unwrap();
        assert!(od.cup.is_zero());
    }
}

#[test]
fn broken_gluing_is_reported() {
    let x = trivial_scheme(-2, 2, Cover::Three).unwrap();
    let mut upper = std::collections::BTreeMap::new();
    for (p, g) in x.gluings() {
        if p.0 < p.1 {
            upper.insert(*p, g.clone());
        }
    }
    let g02 = &upper[&(0, 2)];
    let bumped = g02.image_x() + &TruncElem::term(LaurentPoly::xpow(5), 1, 2);
    upper.insert((0, 2), TruncAuto::new(bumped, g02.image_t().clone()).unwrap());
    let broken = MultiScheme::from_upper(2, Cover::Three, -2, upper).unwrap();
    let report = broken.validate();
    assert!(!report.valid);
    assert!(!report.violations.is_empty());
}

#[test]
fn json_round_trip() {
    let mut r = random::rng(11);
    let x = random::scheme(&mut r, -2, 3, Cover::Three);
    let text = serde_json::to_string(&x).unwrap();
    let back: MultiScheme = serde_json::from_str(&text).unwrap();
    assert_eq!(back, x);
}
