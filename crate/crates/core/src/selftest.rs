//! The deterministic property corpus behind the acceptance criteria. Each
//! check takes a seed and a divisor that shrinks its case counts; divisor 1
//! runs the full sizes.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::Rng;
use serde::Serialize;

use crate::algebra::rational::int;
use crate::algebra::{Derivation, LaurentPoly, TruncElem};
use crate::bundles::*;
use crate::cech::{self, Cochain, CohClass, Cover, LineBundleData};
use crate::multischeme::{
    extend_scheme, ideal_extensions, obstruction_cochain, obstruction_difference_for_cocycle, trivial_scheme, MultiScheme,
};
use crate::random;
use crate::surface::*;

pub type Check = std::result::Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn c1_ring_axioms(seed: u64, div: usize) -> Check {
    let mut r = random::rng(seed);
    for case in 0..1000 / div {
        let n = r.gen_range(1..=6);
        let a = random::trunc(&mut r, n, -8, 8, 3);
        let b = random::trunc(&mut r, n, -8, 8, 3);
        let c = random::trunc(&mut r, n, -8, 8, 3);
        ensure!(&(&a * &b) * &c == &a * &(&b * &c), "associativity, case {case}");
        ensure!(&a * &(&b + &c) == &(&a * &b) + &(&a * &c), "distributivity, case {case}");
        let m = r.gen_range(1..=n);
        ensure!((&a * &b).truncate(m) == &a.truncate(m) * &b.truncate(m), "truncation law, case {case}");
        let u = random::trunc_unit(&mut r, n, -8, 8, 3);
        ensure!(&u * &u.inverse().map_err(|e| e.to_string())? == TruncElem::one(n), "unit inverse, case {case}");
        let f = random::auto(&mut r, n, -8, 8, 2);
        let g = random::auto(&mut r, n, -8, 8, 2);
        ensure!(f.compose(&f.invert()).is_identity(), "automorphism inverse, case {case}");
        ensure!(f.apply(&(&a * &b)) == &f.apply(&a) * &f.apply(&b), "automorphism is multiplicative, case {case}");
        ensure!(f.compose(&g).apply(&a) == f.apply(&g.apply(&a)), "composition, case {case}");
        let d = Derivation::new(random::laurent(&mut r, -8, 8, 3));
        let (p, q) = (a.coeff(0), b.coeff(0));
        ensure!(d.apply(&(p * q)) == &(&d.apply(p) * q) + &(p * &d.apply(q)), "Leibniz, case {case}");
    }
    Ok(())
}

fn c2_dimensions(_seed: u64, _div: usize) -> Check {
    for cover in [Cover::Two, Cover::Three] {
        for d in -10..=10 {
            let [h0, h1, _] = cech::solver_cohomology_dims(cover, d);
            ensure!(h0 == (d + 1).max(0) as usize && h1 == (-d - 1).max(0) as usize, "O({d}) on {cover:?}: ({h0}, {h1})");
            ensure!(h0 as i64 - h1 as i64 == d + 1, "χ(O({d}))");
        }
    }
    Ok(())
}

fn c3_h2_vanishing(seed: u64, div: usize) -> Check {
    let mut r = random::rng(seed ^ 3);
    for case in 0..200 / div {
        let d = r.gen_range(-6..=3);
        let c = random::two_cochain(&mut r, d, 8);
        let w = cech::solve_coboundary(&c).ok_or(format!("no witness, case {case}"))?;
        ensure!(w.coboundary().map_err(|e| e.to_string())? == c, "witness does not reproduce, case {case}");
    }
    Ok(())
}

fn c4_cup(seed: u64, div: usize) -> Check {
    let mut r = random::rng(seed ^ 4);
    let e = |x: crate::Error| x.to_string();
    for case in 0..100 / div {
        let (a, b) = (r.gen_range(-5..=2), r.gen_range(-5..=2));
        let x = random::line_cocycle_rand(&mut r, Cover::Three, a, 4);
        let y = random::line_cocycle_rand(&mut r, Cover::Three, b, 4);
        let x2 = x.add(&random::zero_cochain(&mut r, Cover::Three, a, 4).coboundary().map_err(e)?).map_err(e)?;
        let y2 = y.add(&random::zero_cochain(&mut r, Cover::Three, b, 4).coboundary().map_err(e)?).map_err(e)?;
        let sym = cech::cup(&x, &y).map_err(e)?.add(&cech::cup(&y, &x).map_err(e)?).map_err(e)?;
        let w = cech::solve_coboundary(&sym).ok_or(format!("antisymmetry witness missing, case {case}"))?;
        ensure!(w.coboundary().map_err(e)? == sym, "antisymmetry witness, case {case}");
        let moved = cech::cup(&x2, &y2).map_err(e)?.sub(&cech::cup(&x, &y).map_err(e)?).map_err(e)?;
        ensure!(cech::solve_coboundary(&moved).is_some(), "representative dependence in degree 2, case {case}");

        let s_deg = r.gen_range(0..=3);
        let s = random::line_section(&mut r, Cover::Three, s_deg);
        let s = Cochain::new(Cover::Three, LineBundleData::new(s_deg), 0, s.into_iter().map(|(c, f)| (vec![c], f))).map_err(e)?;
        let b1 = r.gen_range(-7..=-2);
        let beta = random::line_cocycle_rand(&mut r, Cover::Three, b1, 4);
        let beta2 = beta.add(&random::zero_cochain(&mut r, Cover::Three, b1, 4).coboundary().map_err(e)?).map_err(e)?;
        let k = cech::reduce_h1_class(&cech::cup(&s, &beta).map_err(e)?).map_err(e)?;
        ensure!(cech::reduce_h1_class(&cech::cup(&beta, &s).map_err(e)?).map_err(e)? == k, "graded commutativity, case {case}");
        ensure!(cech::reduce_h1_class(&cech::cup(&s, &beta2).map_err(e)?).map_err(e)? == k, "representative dependence, case {case}");
    }
    Ok(())
}

fn c5_connecting(seed: u64, div: usize) -> Check {
    let mut r = random::rng(seed ^ 5);
    let e = |x: crate::Error| x.to_string();
    for case in 0..100 / div {
        let l = r.gen_range(-6..=3);
        let n = if l < 0 { 1 } else { r.gen_range(1..=3) };
        let cover = random::pick_cover(&mut r);
        let big = random::scheme(&mut r, l, n + 1, cover);
        let eta: BTreeMap<usize, LaurentPoly> = if n == 1 {
            let c = random::rational(&mut r);
            (0..cover.charts()).map(|i| (i, LaurentPoly::constant(c.clone()))).collect()
        } else {
            random::line_section(&mut r, cover, (n as i64 - 1) * l)
        };
        let res = delta0(&big, &eta).map_err(e)?;
        ensure!(res.witness.coboundary().map_err(e)? == res.formula.sub(&res.oracle).map_err(e)?, "δ⁰ witness, case {case}");
        ensure!(res.exact, "δ⁰ formula and oracle differ at cochain level, case {case}");
    }
    for case in 0..100 / div {
        let l = r.gen_range(-6..=3);
        let rank = r.gen_range(1..=2);
        let x = random::scheme(&mut r, l, 2, Cover::Three);
        let bundle = random::bundle(&mut r, &x, rank);
        let beta = random::vector_cocycle(&mut r, &bundle);
        let res = delta1(&bundle, &beta).map_err(e)?;
        ensure!(res.exact, "δ¹ formula and oracle differ, case {case}");
    }
    Ok(())
}

fn c6_scheme_obstruction(seed: u64, div: usize) -> Check {
    let mut r = random::rng(seed ^ 6);
    let e = |x: crate::Error| x.to_string();
    for case in 0..50 / div {
        let l = r.gen_range(-4..=2);
        let n = r.gen_range(2..=3);
        let x = random::scheme(&mut r, l, n, Cover::Three);
        let ext = ideal_extensions(&x).map_err(e)?;
        let d = (n as i64 - 1) * l;
        let k = random::line_cocycle_rand(&mut r, Cover::Three, d, 3);
        let h = random::line_cocycle_rand(&mut r, Cover::Three, d, 3);
        let tk = ext.from_cocycle(&k).map_err(e)?;
        let th = ext.from_cocycle(&h).map_err(e)?;
        let diff = obstruction_cochain(&x, &tk).map_err(e)?.sub(&obstruction_cochain(&x, &th).map_err(e)?).map_err(e)?;
        let od = obstruction_difference_for_cocycle(&x, &k.sub(&h).map_err(e)?).map_err(e)?;
        let gap = diff.sub(&od.cup).map_err(e)?;
        let w = cech::solve_coboundary(&gap).ok_or(format!("difference is not the cup mod coboundary, case {case}"))?;
        ensure!(w.coboundary().map_err(e)? == gap, "witness, case {case}");
        let big = extend_scheme(&x, &tk).map_err(e)?;
        ensure!(big.is_valid() && big.restrict_multiplicity(n).map_err(e)? == x, "restriction identity, case {case}");
    }
    Ok(())
}

/// Sorts the extensions for the zero class and each basis class into
/// isomorphism classes with `line_bundle_iso`, and returns the number of
/// classes other than the zero extension's next to the quotient dimension.
fn iso_classes(d: &BundleCocycle, big: &MultiScheme) -> std::result::Result<(usize, usize), String> {
    let e = |x: crate::Error| x.to_string();
    let t = extension_classes(d, big).map_err(e)?;
    let mut classes = vec![CohClass::zero(1, t.param_degree)];
    classes.extend((0..t.torsor_dim).map(|k| CohClass::basis(1, t.param_degree, k)));
    let exts: Vec<BundleCocycle> = classes.iter().map(|c| t.extension(d, big, c)).collect::<crate::Result<_>>().map_err(e)?;
    let mut reps: Vec<&BundleCocycle> = Vec::new();
    for x in &exts {
        let mut new = true;
        for y in &reps {
            if line_bundle_iso(x, y).map_err(e)?.isomorphic {
                new = false;
                break;
            }
        }
        if new {
            reps.push(x);
        }
    }
    Ok((reps.len() - 1, t.quotient_dim))
}

fn c7_picard(seed: u64, _div: usize) -> Check {
    let mut r = random::rng(seed ^ 7);
    let e = |x: crate::Error| x.to_string();
    for (l, n) in [(-2i64, 1usize), (-2, 2), (-3, 1), (-3, 2)] {
        let trivial = trivial_scheme(l, n + 1, Cover::Three).map_err(e)?;
        let rand_big = random::scheme(&mut r, l, n + 1, Cover::Three);
        for big in [trivial, rand_big] {
            let d = pullback_line_bundle(&big.restrict_multiplicity(n).map_err(e)?, 1).map_err(e)?;
            let (found, quotient) = iso_classes(&d, &big)?;
            ensure!(found == quotient, "(ℓ, n) = ({l}, {n}): {found} non-isomorphic basis extensions, quotient dimension {quotient}");
        }
    }
    let ledger = picard_ledger(-3, 3).map_err(e)?;
    ensure!(ledger == vec![2, 5], "picard_ledger(-3, 3) = {ledger:?}");
    Ok(())
}

fn c8_canonical_class(_seed: u64, _div: usize) -> Check {
    let e = |x: crate::Error| x.to_string();
    let x = trivial_scheme(-2, 2, Cover::Three).map_err(e)?;
    for d in -6..=6 {
        let a = pullback_line_bundle(&x, d).map_err(e)?;
        let ta = canonical_class(&a).map_err(e)?.trace;
        ensure!(ta.coeffs == vec![int(d)], "∇₀(O({d})) = {:?}", ta.coeffs);
        for d2 in -6..=6 {
            let b = pullback_line_bundle(&x, d2).map_err(e)?;
            let tb = canonical_class(&b).map_err(e)?.trace;
            let tab = canonical_class(&a.tensor(&b).map_err(e)?).map_err(e)?.trace;
            ensure!(tab == ta.add(&tb), "additivity at ({d}, {d2})");
        }
    }
    Ok(())
}

fn compositions(n: usize, budget: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let i = prefix.len() + 1;
    if i > n {
        out.push(prefix.clone());
        return;
    }
    for m in 0..=budget / i {
        prefix.push(m);
        compositions(n, budget - m * i, prefix, out);
        prefix.pop();
    }
}

fn c9_filtration(seed: u64, div: usize) -> Check {
    let mut r = random::rng(seed ^ 9);
    let mut all = Vec::new();
    for n in 1..=12 {
        compositions(n, 12, &mut Vec::new(), &mut all);
    }
    for m in &all {
        let t = module_type(&TruncModulePresentation::direct_sum(m.len(), m).map_err(|e| e.to_string())?);
        ensure!(&t.type_vector == m, "type of {m:?} read as {:?}", t.type_vector);
        ensure!(t.containment_holds, "containment fails for {m:?}");
    }
    for case in 0..100 / div {
        let m = &all[r.gen_range(0..all.len())];
        let p = TruncModulePresentation::direct_sum(m.len(), m).map_err(|e| e.to_string())?;
        let q = random::presentation_equivalence(&mut r, &p, 8);
        let t = module_type(&q);
        ensure!(&t.type_vector == m && t.containment_holds, "equivalence {case} changed the type of {m:?}");
    }
    Ok(())
}

fn c10_surface(seed: u64, div: usize) -> Check {
    let e = |x: crate::Error| x.to_string();
    let mut r = random::rng(seed ^ 10);
    for case in 0..200 / div {
        let (gc, gd) = (r.gen_range(0..6u32), r.gen_range(0..6u32));
        let (dc, dd) = (r.gen_range(-12..12i64), r.gen_range(-12..12i64));
        let pc = CurveProfile::new(gc, false, [("L".to_string(), BundleSpec::of_degree(dc))].into()).map_err(e)?;
        let pd = CurveProfile::new(gd, false, [("L".to_string(), BundleSpec::of_degree(dd))].into()).map_err(e)?;
        let [h0, h1, h2] = kunneth_dims(&pc, &pd, "L", "L").map_err(e)?;
        ensure!(
            h0 as i64 - h1 as i64 + h2 as i64 == (dc + 1 - gc as i64) * (dd + 1 - gd as i64),
            "Euler characteristic, case {case}"
        );
    }
    let pairings = Pairings::p1(-2, -2).map_err(e)?;
    let eta = EtaVector::scalars(int(1), int(1));
    for a in -10..=10 {
        for b in -10..=10 {
            let rep = obstruction_surface(&eta, a, b, &pairings).map_err(e)?;
            ensure!(rep.extendable == (a + b == 0), "O({a}, {b})");
            let (a2, b2) = (r.gen_range(-10..=10), r.gen_range(-10..=10));
            let sum = obstruction_surface(&eta, a + a2, b + b2, &pairings).map_err(e)?.delta;
            let parts = rep.delta.add(&obstruction_surface(&eta, a2, b2, &pairings).map_err(e)?.delta).map_err(e)?;
            ensure!(sum == parts, "additivity at O({a}, {b}) ⊗ O({a2}, {b2})");
        }
    }
    let k = k3_classify(&EtaPair::Rational(int(2), int(3)), 2, 2).map_err(e)?;
    ensure!(k.lattice_generator == Some([3, -2]) && !k.projective && !k.extends_to_x3, "η = (2, 3): {k:?}");
    let k = k3_classify(&EtaPair::Rational(int(1), int(-2)), 2, 2).map_err(e)?;
    ensure!(k.projective, "η = (1, −2) should be projective");
    Ok(())
}

fn c11_predicates(_seed: u64, _div: usize) -> Check {
    let e = |x: crate::Error| x.to_string();
    let p = nonbanal_predicates(3, -4, false, false).map_err(e)?;
    ensure!(p.pic_nonbanal && p.moduli_nonbanal, "g = 3, deg L = −4: {p:?}");
    let rank = moduli_fiber_rank(2, 3, -1).map_err(e)?;
    ensure!(rank == 4, "moduli_fiber_rank(2, 3, −1) = {rank}");
    Ok(())
}

pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    /// Time budget at full size, in seconds.
    pub budget_secs: u64,
    pub run: fn(u64, usize) -> Check,
}

pub const CRITERIA: [Criterion; 11] = [
    Criterion { id: 1, name: "ring and automorphism axioms", budget_secs: 10, run: c1_ring_axioms },
    Criterion { id: 2, name: "cohomology dimensions", budget_secs: 5, run: c2_dimensions },
    Criterion { id: 3, name: "H² vanishing on a curve", budget_secs: 30, run: c3_h2_vanishing },
    Criterion { id: 4, name: "cup antisymmetry and representative independence", budget_secs: 20, run: c4_cup },
    Criterion { id: 5, name: "connecting-morphism oracles", budget_secs: 60, run: c5_connecting },
    Criterion { id: 6, name: "scheme obstruction difference", budget_secs: 120, run: c6_scheme_obstruction },
    Criterion { id: 7, name: "extension torsor and Picard ledger", budget_secs: 120, run: c7_picard },
    Criterion { id: 8, name: "canonical class", budget_secs: 5, run: c8_canonical_class },
    Criterion { id: 9, name: "canonical filtration", budget_secs: 30, run: c9_filtration },
    Criterion { id: 10, name: "surface layer", budget_secs: 10, run: c10_surface },
    Criterion { id: 11, name: "predicates", budget_secs: 1, run: c11_predicates },
];

impl Criterion {
    /// Runs the check, turning a panic into a failure message.
    pub fn check(&self, seed: u64, div: usize) -> Check {
        catch_unwind(AssertUnwindSafe(|| (self.run)(seed, div.max(1)))).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseOutcome {
    pub criterion: u32,
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub divisor: usize,
    pub passed: bool,
    pub cases: Vec<CaseOutcome>,
}

pub fn run(seed: u64, div: usize) -> SelftestReport {
    let cases: Vec<CaseOutcome> = CRITERIA
        .iter()
        .map(|c| {
            let out = c.check(seed, div);
            CaseOutcome {
                criterion: c.id,
                name: c.name.to_string(),
                passed: out.is_ok(),
                detail: out.err(),
            }
        })
        .collect();
    SelftestReport {
        seed,
        divisor: div.max(1),
        passed: cases.iter().all(|c| c.passed),
        cases,
    }
}
