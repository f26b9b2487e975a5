//! Cross-module invariants checked against independent computations.

use num_bigint::BigUint;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wreathgen::catalog;
use wreathgen::certify::{self, case_bounds, constants, majorants, Overrides};
use wreathgen::genprob;
use wreathgen::tower::{TowerSpec, WreathElement};
use wreathgen::{Caps, Execution, PermGroup};

fn small_groups() -> Vec<PermGroup> {
    vec![
        catalog::cyclic(2),
        catalog::cyclic(4),
        catalog::cyclic(6),
        catalog::klein_four(),
        catalog::symmetric(3),
        catalog::dihedral(4),
        catalog::alternating(4),
        catalog::dihedral(5),
        catalog::symmetric(4),
        catalog::alternating(5),
    ]
}

#[test]
fn mobius_matches_exhaustive_count() {
    let caps = Caps::default();
    for g in small_groups() {
        for k in 1..=3 {
            if g.order() > BigUint::from(24u32) && k == 3 {
                continue;
            }
            let a = genprob::pk_exact_exhaustive(&g, k, &caps, Execution::Parallel).unwrap();
            let b = genprob::pk_exact_mobius(&g, k, &caps).unwrap();
            assert_eq!(a, b, "{:?} k = {k}", g.name());
        }
    }
}

#[test]
fn generation_probability_is_monotone_in_k() {
    let caps = Caps::default();
    for g in small_groups() {
        let p: Vec<BigRational> = (1..=5).map(|k| genprob::pk_exact_mobius(&g, k, &caps).unwrap()).collect();
        assert!(p.windows(2).all(|w| w[0] <= w[1]), "{:?}: {p:?}", g.name());
    }
}

#[test]
fn quotients_are_easier_to_generate() {
    let caps = Caps { lattice_order: 4000, ..Caps::default() };
    for s in catalog::surjections().unwrap() {
        for k in 2..=3 {
            let r = genprob::bhattacharjee_check(&s.map, k, &caps, Execution::Parallel).unwrap();
            assert!(r.pk_y <= r.pk_x, "{} k = {k}", s.name);
            assert!(r.holds, "{} k = {k}", s.name);
        }
    }
}

#[test]
fn montecarlo_mean_is_unbiased() {
    let a5 = catalog::alternating(5);
    let runs = 20;
    let mean: f64 = (0..runs)
        .map(|s| genprob::pk_montecarlo(&a5, 2, 5000, 1000 + s, Execution::Parallel).unwrap().estimate.unwrap().point())
        .sum::<f64>()
        / runs as f64;
    // standard error of the pooled mean is about 0.0015
    assert!((mean - 19.0 / 30.0).abs() < 0.006, "mean {mean}");
}

#[test]
fn levels_agree_with_product_formula() {
    for (g, levels) in [(catalog::alternating(5), 3), (catalog::symmetric(3), 4), (catalog::a5_fixing_point(), 2)] {
        let spec = TowerSpec::new(g).unwrap();
        for n in 0..=levels {
            let l = spec.build_level(n, 10_000).unwrap();
            assert_eq!(l.order(), spec.level_order(n), "level {n}");
        }
    }
}

fn a5_constants(c7: u32, k: u32) -> certify::ConstantsReport {
    let spec = TowerSpec::new(catalog::alternating(5)).unwrap();
    let mut o = Overrides::new();
    o.set("C7", c7.into()).unwrap();
    o.set("K", k.into()).unwrap();
    constants(&spec, &o, false, &Caps::default(), Execution::Parallel).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wreath_product_is_a_group(seed in any::<u64>(), n in 1usize..=3) {
        let spec = TowerSpec::new(catalog::alternating(5)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = WreathElement::random(&spec, n, &mut rng);
        let b = WreathElement::random(&spec, n, &mut rng);
        let c = WreathElement::random(&spec, n, &mut rng);
        prop_assert_eq!(a.mult(&b).unwrap().mult(&c).unwrap(), a.mult(&b.mult(&c).unwrap()).unwrap());
        prop_assert!(a.mult(&a.inverse()).unwrap().is_identity());
        let p = a.to_permutation();
        prop_assert_eq!(WreathElement::from_permutation(&spec, n, &p).unwrap(), a);
    }

    #[test]
    fn bounds_decrease_with_k(k in 20u32..400, extra in 1u32..400, n in 1u32..8) {
        let c = a5_constants(121, 22);
        let lo = case_bounds(&c, n, &BigUint::from(k)).unwrap();
        let hi = case_bounds(&c, n, &BigUint::from(k + extra)).unwrap();
        // None means too large to write down
        match (hi.total.value_upper(), lo.total.value_upper()) {
            (Some(h), Some(l)) => prop_assert!(h <= l),
            (None, Some(_)) => prop_assert!(false, "bound grew with k"),
            _ => {}
        }
        prop_assert!(hi.total.log2_approx() <= lo.total.log2_approx());
    }

    #[test]
    fn majorants_dominate_case_bounds(k in 140u32..1000, n in 1u32..10) {
        let c = a5_constants(121, 22);
        prop_assume!(c.case2_pairs.len() == 1);
        let kk = BigUint::from(k);
        let b = case_bounds(&c, n, &kk).unwrap();
        let slack = BigRational::new(1.into(), 1000.into());
        for m in majorants(&c, &kk, 48) {
            if m.start.is_none_or(|s| s > n) {
                continue;
            }
            let case = match m.label.as_str() {
                "case1" => &b.case1,
                "case3" => &b.case3,
                "case4" => &b.case4,
                _ => &b.case2,
            };
            if let Some(u) = &case.log2_upper {
                prop_assert!(u <= &(m.log2_at(n) + &slack), "{} at n = {}", m.label, n);
            }
        }
    }
}
