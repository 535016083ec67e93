use std::collections::BTreeMap;

use proptest::prelude::*;
use ribbonlab::algebra::rational::{frac, int};
use ribbonlab::algebra::Rational;
use ribbonlab::surface::*;

fn profile(genus: u32, bundles: &[(&str, i64)]) -> CurveProfile {
    let b: BTreeMap<String, BundleSpec> = bundles.iter().map(|(n, d)| (n.to_string(), BundleSpec::of_degree(*d))).collect();
    CurveProfile::new(genus, false, b).unwrap()
}

fn rat(p: i64, q: i64) -> Rational {
    frac(p, q)
}

fn block(rows: usize, cols: usize, vals: &[(i64, i64)]) -> Block {
    Block::new(rows, cols, vals.iter().map(|&(p, q)| rat(p, q)).collect()).unwrap()
}

#[test]
fn p1_product_with_minus_two() {
    let p = profile(0, &[("L", -2)]);
    assert_eq!(kunneth_dims(&p, &p, "L", "L").unwrap(), [0, 0, 1]);
    assert_eq!(tangent_h1_dims(&p, &p, "L", "L").unwrap(), [1, 0, 0, 1]);
    assert_eq!(p1_pairing(-2).unwrap(), Block::scalar(int(1)));
}

#[test]
fn trivial_bundle_on_products() {
    for gc in 0..5 {
        for gd in 0..5 {
            let pc = profile(gc, &[]);
            let pd = profile(gd, &[]);
            assert_eq!(kunneth_dims(&pc, &pd, "O", "O").unwrap(), [1, (gc + gd) as usize, (gc * gd) as usize]);
        }
    }
}

#[test]
fn canonical_on_genus_two_product() {
    let p = profile(2, &[]);
    assert_eq!(tangent_h1_dims(&p, &p, "K", "K").unwrap(), [1, 4, 4, 1]);
}

#[test]
fn profile_violations_are_rejected() {
    let mut b = BTreeMap::new();
    b.insert("T".into(), BundleSpec { h0: Some(3), ..BundleSpec::of_degree(2) });
    assert!(CurveProfile::new(3, false, b).is_err());
    let mut b = BTreeMap::new();
    b.insert("N".into(), BundleSpec { h0: Some(1), ..BundleSpec::of_degree(-1) });
    assert!(CurveProfile::new(2, false, b).is_err());
    assert!(profile(0, &[]).dims("missing").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kunneth_euler_characteristic(gc in 0u32..6, gd in 0u32..6, dc in -12i64..12, dd in -12i64..12) {
        let pc = profile(gc, &[("L", dc)]);
        let pd = profile(gd, &[("L", dd)]);
        let [h0, h1, h2] = kunneth_dims(&pc, &pd, "L", "L").unwrap();
        let chi = h0 as i64 - h1 as i64 + h2 as i64;
        prop_assert_eq!(chi, (dc + 1 - gc as i64) * (dd + 1 - gd as i64));
    }

    #[test]
    fn obstruction_is_additive_and_linear(
        e in prop::collection::vec((-6i64..=6, 1i64..=3), 8),
        p in prop::collection::vec((-4i64..=4, 1i64..=2), 4),
        a in -8i64..=8, b in -8i64..=8, a2 in -8i64..=8, b2 in -8i64..=8,
    ) {
        // Genus 2 against genus 3 with L = K: η₁, η₄ are 1×1 and the
        // pairings are supplied.
        let pc = profile(2, &[]);
        let pd = profile(3, &[]);
        let pairings = Pairings::for_profiles(&pc, &pd, "K", "K", Some(block(1, 1, &p[..1])), Some(block(1, 1, &p[1..2]))).unwrap();
        let mut eta = EtaVector::zero(&pc, &pd, "K", "K").unwrap();
        eta.eta1 = block(1, 1, &e[..1]);
        eta.eta4 = block(1, 1, &e[1..2]);
        let mut other = eta.clone();
        other.eta1 = block(1, 1, &e[2..3]);
        other.eta4 = block(1, 1, &e[3..4]);
        let d = |eta: &EtaVector, a, b| obstruction_surface(eta, a, b, &pairings).unwrap().delta;
        prop_assert_eq!(d(&eta, a + a2, b + b2), d(&eta, a, b).add(&d(&eta, a2, b2)).unwrap());
        let mut sum = eta.clone();
        sum.eta1 = eta.eta1.add(&other.eta1).unwrap();
        sum.eta4 = eta.eta4.add(&other.eta4).unwrap();
        prop_assert_eq!(d(&sum, a, b), d(&eta, a, b).add(&d(&other, a, b)).unwrap());
        let c = rat(e[4].0, e[4].1);
        let mut scaled = eta.clone();
        scaled.eta1 = eta.eta1.scale(&c);
        scaled.eta4 = eta.eta4.scale(&c);
        prop_assert_eq!(d(&scaled, a, b), d(&eta, a, b).scale(&c));
    }

    #[test]
    fn projectivity_scaling_and_swap(p1 in -9i64..=9, q1 in 1i64..=4, p4 in -9i64..=9, q4 in 1i64..=4, s in 1i64..=7, gc in 2u32..5, gd in 2u32..5) {
        let (e1, e4) = (rat(p1, q1), rat(p4, q4));
        let base = k3_classify(&EtaPair::Rational(e1.clone(), e4.clone()), gc, gd).unwrap();
        let scaled = k3_classify(&EtaPair::Rational(&e1 * int(s), &e4 * int(s)), gc, gd).unwrap();
        let swapped = k3_classify(&EtaPair::Rational(e4.clone(), e1.clone()), gd, gc).unwrap();
        prop_assert_eq!(base.projective, scaled.projective);
        prop_assert_eq!(base.projective, swapped.projective);
        prop_assert_eq!(base.extends_to_x3, swapped.extends_to_x3);
        prop_assert_eq!(base.lattice_generator, scaled.lattice_generator);
    }

    #[test]
    fn lattice_agrees_with_obstruction(p1 in -6i64..=6, q1 in 1i64..=3, p4 in -6i64..=6, q4 in 1i64..=3) {
        let (e1, e4) = (rat(p1, q1), rat(p4, q4));
        let pair = EtaPair::Rational(e1.clone(), e4.clone());
        let report = k3_classify(&pair, 2, 2).unwrap();
        let eta = EtaVector::scalars(e1, e4);
        let pairings = Pairings { phi_c: Block::scalar(int(1)), phi_d: Block::scalar(int(1)) };
        for a in -10..=10 {
            for b in -10..=10 {
                let ext = obstruction_surface(&eta, a, b, &pairings).unwrap().extendable;
                prop_assert_eq!(ext, k3_extendable(&pair, a, b));
                if let Some([ga, gb]) = report.lattice_generator {
                    prop_assert_eq!(ext, a * gb == b * ga);
                }
            }
        }
    }
}

#[test]
fn p1_product_extendability() {
    let pairings = Pairings::p1(-2, -2).unwrap();
    let eta = EtaVector::scalars(int(1), int(1));
    for a in -10..=10 {
        for b in -10..=10 {
            let r = obstruction_surface(&eta, a, b, &pairings).unwrap();
            assert_eq!(r.extendable, a + b == 0);
            assert_eq!(r.delta, Block::scalar(int(a + b)));
        }
    }
}

#[test]
fn worked_carpets() {
    let r = k3_classify(&EtaPair::Rational(int(2), int(3)), 2, 2).unwrap();
    assert_eq!(r.lattice_generator, Some([3, -2]));
    assert!(!r.projective && !r.extends_to_x3);
    assert!(k3_classify(&EtaPair::Rational(int(1), int(-2)), 2, 2).unwrap().projective);
    let z = k3_classify(&EtaPair::Rational(int(0), int(0)), 3, 2).unwrap();
    assert!(z.projective && z.extends_to_x3 && z.lattice_rank == 2);
    let irr = k3_classify(&EtaPair::IrrationalRatio, 2, 3).unwrap();
    assert!(!irr.projective);
    assert!(!k3_classify(&EtaPair::Rational(int(1), int(0)), 1, 2).unwrap().warnings.is_empty());
}

fn theta_profile() -> CurveProfile {
    let mut b = BTreeMap::new();
    b.insert("theta".into(), BundleSpec { h0: Some(1), ..BundleSpec::of_degree(2) });
    CurveProfile::new(3, false, b).unwrap()
}

#[test]
fn theta_characteristic_example() {
    let pc = theta_profile();
    let pd = profile(2, &[]);
    let mut eta = EtaVector::zero(&pc, &pd, "theta", "K").unwrap();
    let r = theta_example_check(&pc, "theta", &pd, &eta).unwrap();
    assert!(r.every_line_bundle_extends && r.projective);
    assert_eq!(r.x3_exists, Verdict::Unknown);
    let len = eta.eta3.coeffs.len();
    assert!(len > 0);
    eta.eta3.coeffs[len - 1] = int(1);
    assert_eq!(theta_example_check(&pc, "theta", &pd, &eta).unwrap().x3_exists, Verdict::Yes);
    let no_sections = profile(3, &[("theta", 2)]);
    assert!(theta_example_check(&no_sections, "theta", &pd, &eta).is_err());
}

#[test]
fn predicates_and_ranks() {
    let p = nonbanal_predicates(3, -4, false, false).unwrap();
    assert!(p.pic_nonbanal && p.moduli_nonbanal);
    assert!(!nonbanal_predicates(3, -3, false, false).unwrap().pic_nonbanal);
    let h = nonbanal_predicates(3, -6, true, false).unwrap();
    assert!(!h.pic_nonbanal && !h.moduli_nonbanal);
    assert!(nonbanal_predicates(3, 4, true, true).unwrap().pic_nonbanal);
    assert!(nonbanal_predicates(1, -4, false, false).is_err());
    assert_eq!(moduli_fiber_rank(2, 3, -1).unwrap(), 4);
    for g in 2..6 {
        for l in (1 - g as i64)..0 {
            assert_eq!(moduli_fiber_rank(1, g, l).unwrap(), l + g as i64 - 1);
        }
    }
    assert!(moduli_fiber_rank(2, 2, -2).is_err());
    assert!(moduli_fiber_rank(2, 3, 1).is_err());
}

#[test]
fn dualizing_sheaf_of_doubles() {
    let p = profile(2, &[("L", -3)]);
    assert!(double_has_trivial_dualizing(&p, "K").unwrap());
    assert!(!double_has_trivial_dualizing(&p, "L").unwrap());
    assert_eq!(dualizing_restriction_degree(2, 2, 2), 0);
    assert_eq!(dualizing_restriction_degree(2, -3, 3), 8);
}
