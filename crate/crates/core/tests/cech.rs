use proptest::prelude::*;
use ribbonlab::algebra::LaurentPoly;
use ribbonlab::cech::*;
use ribbonlab::random;

fn cover_of(three: bool) -> Cover {
    if three {
        Cover::Three
    } else {
        Cover::Two
    }
}

#[test]
fn solver_dimensions_match_closed_form() {
    for cover in [Cover::Two, Cover::Three] {
        for d in -10..=10 {
            let [h0, h1, h2] = solver_cohomology_dims(cover, d);
            assert_eq!((h0, h1, h2), (cohomology_dim(d, 0), cohomology_dim(d, 1), 0), "d = {d}");
            assert_eq!(h0 as i64 - h1 as i64, d + 1);
        }
    }
}

#[test]
fn h0_basis_is_global_and_independent() {
    for d in 0..=6 {
        let basis = h0_basis(Cover::Three, d);
        assert_eq!(basis.len(), cohomology_dim(d, 0));
        for (k, s) in basis.iter().enumerate() {
            assert!(s.is_cocycle());
            assert_eq!(reduce_h0_class(s).unwrap(), CohClass::basis(0, d, k));
        }
    }
}

#[test]
fn non_regular_section_is_rejected() {
    assert!(global_section(Cover::Two, 2, &LaurentPoly::xpow(3)).is_err());
    assert!(global_section(Cover::Two, 2, &LaurentPoly::xpow(-1)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coboundary_squares_to_zero(seed in any::<u64>(), d in -6i64..=6) {
        let mut r = random::rng(seed);
        let tau = random::zero_cochain(&mut r, Cover::Three, d, 4);
        prop_assert!(tau.coboundary().unwrap().coboundary().unwrap().is_zero());
    }

    #[test]
    fn h1_reduction_is_class_invariant(seed in any::<u64>(), three in any::<bool>(), d in -8i64..=4) {
        let mut r = random::rng(seed);
        let cover = cover_of(three);
        let c = random::line_cocycle_rand(&mut r, cover, d, 5);
        let tau = random::zero_cochain(&mut r, cover, d, 5);
        let moved = c.add(&tau.coboundary().unwrap()).unwrap();
        let class = reduce_h1_class(&c).unwrap();
        prop_assert_eq!(&reduce_h1_class(&moved).unwrap(), &class);
        let w = h1_witness(&c).unwrap();
        let rep = h1_representative(&class, cover).unwrap();
        prop_assert_eq!(rep.add(&w.coboundary().unwrap()).unwrap(), c);
    }

    #[test]
    fn representative_round_trip(seed in any::<u64>(), d in -9i64..=-2) {
        let mut r = random::rng(seed);
        let coeffs = (0..cohomology_dim(d, 1)).map(|_| random::rational(&mut r)).collect();
        let class = CohClass::from_coeffs(1, d, coeffs).unwrap();
        for cover in [Cover::Two, Cover::Three] {
            let rep = h1_representative(&class, cover).unwrap();
            prop_assert!(rep.is_cocycle());
            prop_assert_eq!(&reduce_h1_class(&rep).unwrap(), &class);
            prop_assert_eq!(solve_coboundary(&rep).is_some(), class.is_zero());
        }
    }

    #[test]
    fn two_cochains_bound(seed in any::<u64>(), d in -6i64..=3) {
        let mut r = random::rng(seed);
        let c = random::two_cochain(&mut r, d, 6);
        let w = solve_coboundary(&c).expect("H^2 vanishes on a curve");
        prop_assert_eq!(w.coboundary().unwrap(), c);
    }

    #[test]
    fn cup_is_graded_commutative_on_classes(seed in any::<u64>(), a in 0i64..=3, b in -7i64..=-2) {
        let mut r = random::rng(seed);
        let s = random::line_section(&mut r, Cover::Three, a);
        let s = Cochain::new(Cover::Three, LineBundleData::new(a), 0, s.into_iter().map(|(c, f)| (vec![c], f))).unwrap();
        let beta = random::line_cocycle_rand(&mut r, Cover::Three, b, 4);
        let tau = random::zero_cochain(&mut r, Cover::Three, b, 4);
        let beta2 = beta.add(&tau.coboundary().unwrap()).unwrap();
        let left = reduce_h1_class(&cup(&s, &beta).unwrap()).unwrap();
        prop_assert_eq!(&reduce_h1_class(&cup(&beta, &s).unwrap()).unwrap(), &left);
        prop_assert_eq!(&reduce_h1_class(&cup(&s, &beta2).unwrap()).unwrap(), &left);
    }

    #[test]
    fn cup_of_one_cocycles_is_antisymmetric_up_to_coboundary(seed in any::<u64>(), a in -5i64..=2, b in -5i64..=2) {
        let mut r = random::rng(seed);
        let x = random::line_cocycle_rand(&mut r, Cover::Three, a, 4);
        let y = random::line_cocycle_rand(&mut r, Cover::Three, b, 4);
        let sum = cup(&x, &y).unwrap().add(&cup(&y, &x).unwrap()).unwrap();
        let w = solve_coboundary(&sum).expect("antisymmetry witness");
        prop_assert_eq!(w.coboundary().unwrap(), sum);
    }
}

#[test]
fn cup_needs_three_charts_in_degree_two() {
    let a = line_cocycle_like(Cover::Two, -2);
    assert!(matches!(cup(&a, &a), Err(ribbonlab::Error::CoverTooSmall(_))));
}

fn line_cocycle_like(cover: Cover, d: i64) -> Cochain {
    h1_representative(&CohClass::basis(1, d, 0), cover).unwrap()
}
