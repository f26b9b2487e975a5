//! The acceptance suite as a library: every criterion is run against fixed
//! fixtures and reported with a pass flag, a one-line detail and its time.

use std::collections::{BTreeSet, HashSet};
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog;
use crate::certify::{self, CertifyOptions};
use crate::config::{Caps, RunConfig};
use crate::error::{Error, Result};
use crate::genprob;
use crate::par;
use crate::permcore::{Homomorphism, PermGroup, Permutation};
use crate::semidirect::{
    classify_maximal, construct_graph_iso, construct_subdiagonal, count_graph_iso_classes, partition_bound, CaseTag,
    Factor, SemidirectGroup, SemidirectSpec, SubdiagonalData,
};
use crate::tower::{TowerSpec, WreathElement};

/// Criteria that fail on their own terms, with the reason.
pub const KNOWN_FAILURES: &[(u32, &str)] = &[
    (
        10,
        "for a one-point Ω and r = 3, a_{3·Ω} = Bell(3) = 5 exceeds (2|Ω|)^2 a_Ω^3 = 4; \
         the recurrence behind the bound treats (r−1)·Ω as a transitive X-set",
    ),
    (
        11,
        "at the default seed 89 of 100 intervals cover 19/30, a 1.1% binomial tail event; \
         seeds 100..399 cover 289 of 300 and the estimator shows no bias",
    ),
];

pub const CRITERIA: u32 = 12;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub known_failure: Option<&'static str>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("[{status}] {:>2} {:<34} {:>8.2}s  {}", self.id, self.name, self.seconds, self.detail);
        if let (false, Some(why)) = (self.passed, self.known_failure) {
            s.push_str(&format!(" (known: {why})"));
        }
        s
    }
}

pub fn name(id: u32) -> &'static str {
    match id {
        1 => "exact p_2(A5)",
        2 => "quotient bound battery",
        3 => "zeta of A5 over the trivial group",
        4 => "tower order at level 3",
        5 => "product rule round trip",
        6 => "necessity witnesses",
        7 => "decision fixtures",
        8 => "graph-type classes in A5 x A5",
        9 => "subdiagonal index",
        10 => "invariant partition bound",
        11 => "Monte-Carlo soundness",
        12 => "end-to-end certificate",
        _ => "unknown",
    }
}

/// Run criteria `ids` (all when empty) in order.
pub fn run(config: &RunConfig, ids: &[u32]) -> Vec<CriterionResult> {
    let ids: Vec<u32> = if ids.is_empty() { (1..=CRITERIA).collect() } else { ids.to_vec() };
    ids.into_iter().map(|id| run_one(config, id)).collect()
}

pub fn run_one(config: &RunConfig, id: u32) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => criterion_1(config),
        2 => criterion_2(config),
        3 => criterion_3(config),
        4 => criterion_4(config),
        5 => criterion_5(config),
        6 => criterion_6(config),
        7 => criterion_7(config),
        8 => criterion_8(config),
        9 => criterion_9(config),
        10 => criterion_10(config),
        11 => criterion_11(config),
        12 => criterion_12(config),
        _ => Err(Error::input(format!("no criterion {id}"))),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (mut passed, detail) = match outcome {
        Ok(o) => o,
        Err(e) => (false, format!("error: {e}")),
    };
    let limit = match id {
        1 => Some(60.0),
        4 => Some(30.0),
        _ => None,
    };
    let detail = match limit {
        Some(l) if seconds >= l => {
            passed = false;
            format!("{detail}; took {seconds:.1}s, limit {l}s")
        }
        _ => detail,
    };
    CriterionResult {
        id,
        name: name(id),
        passed,
        detail,
        seconds,
        known_failure: KNOWN_FAILURES.iter().find(|(k, _)| *k == id).map(|(_, why)| *why),
    }
}

type Outcome = Result<(bool, String)>;

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn caps(config: &RunConfig) -> Caps {
    let mut c = config.caps.clone();
    // A5 × A5 needs its full lattice
    c.lattice_order = c.lattice_order.max(4000);
    c
}

fn criterion_1(config: &RunConfig) -> Outcome {
    let a5 = catalog::alternating(5);
    let ex = genprob::pk_exact_exhaustive(&a5, 2, &config.caps, config.execution)?;
    let mo = genprob::pk_exact_mobius(&a5, 2, &config.caps)?;
    let target = ratio(19, 30);
    Ok((ex == target && mo == target, format!("exhaustive {ex}, mobius {mo}")))
}

fn criterion_2(config: &RunConfig) -> Outcome {
    let caps = caps(config);
    let all = catalog::surjections()?;
    let mut failed = Vec::new();
    for s in &all {
        for k in [2, 3] {
            if !genprob::bhattacharjee_check(&s.map, k, &caps, config.execution)?.holds {
                failed.push(format!("{} k={k}", s.name));
            }
        }
    }
    let ok = failed.is_empty() && all.len() >= 10;
    let detail = if failed.is_empty() {
        format!("{} surjections x k in {{2,3}} hold", all.len())
    } else {
        format!("violated: {}", failed.join(", "))
    };
    Ok((ok, detail))
}

/// Subgroups of `g` generated by at most two elements, as sorted element
/// lists. Every subgroup of `A_5` is of this kind.
fn two_generated_subgroups(g: &PermGroup) -> Result<Vec<Vec<Permutation>>> {
    let elements = g.elements(1000)?;
    let closure = |gens: &[&Permutation]| {
        let mut seen: HashSet<Permutation> = HashSet::new();
        let mut stack = vec![Permutation::identity(g.degree())];
        while let Some(p) = stack.pop() {
            if seen.insert(p.clone()) {
                stack.extend(gens.iter().map(|s| p.compose(s)));
            }
        }
        let mut v: Vec<Permutation> = seen.into_iter().collect();
        v.sort();
        v
    };
    let mut out = BTreeSet::new();
    for a in &elements {
        for b in &elements {
            out.insert(closure(&[a, b]));
        }
    }
    Ok(out.into_iter().collect())
}

/// Indices of the conjugacy classes of maximal subgroups of `g`, by brute
/// force over two-generated subgroups.
pub fn maximal_class_indices_bruteforce(g: &PermGroup) -> Result<Vec<usize>> {
    let order = g.elements(1000)?.len();
    let subs = two_generated_subgroups(g)?;
    let proper: Vec<&Vec<Permutation>> = subs.iter().filter(|s| s.len() < order).collect();
    let is_sub = |a: &Vec<Permutation>, b: &Vec<Permutation>| a.iter().all(|x| b.binary_search(x).is_ok());
    let maximal: Vec<&Vec<Permutation>> = proper
        .iter()
        .filter(|h| !proper.iter().any(|k| k.len() > h.len() && is_sub(h, k)))
        .copied()
        .collect();
    let elements = g.elements(1000)?;
    let mut classes = BTreeSet::new();
    for h in maximal {
        let key = elements
            .iter()
            .map(|x| {
                let mut c: Vec<Permutation> = h.iter().map(|y| x.conjugate(y)).collect();
                c.sort();
                c
            })
            .min()
            .expect("nonempty group");
        classes.insert(key);
    }
    let mut indices: Vec<usize> = classes.iter().map(|c| order / c.len()).collect();
    indices.sort_unstable();
    Ok(indices)
}

fn criterion_3(config: &RunConfig) -> Outcome {
    let a5 = catalog::alternating(5);
    let one = PermGroup::trivial(1);
    let pi = Homomorphism::new(&a5, &one, vec![Permutation::identity(1); a5.generators().len()])?;
    let z = genprob::zeta(&pi, 1, &config.caps)?;
    let oracle = maximal_class_indices_bruteforce(&a5)?;
    let oracle_sum: BigRational = oracle.iter().map(|&i| ratio(1, i as i64)).sum();
    let lattice: Vec<usize> = z.terms.iter().map(|t| t.index).collect();
    let ok = z.total == ratio(7, 15) && oracle_sum == z.total && oracle == vec![5, 6, 10] && lattice == oracle;
    Ok((ok, format!("zeta(1) = {}, brute-force indices {oracle:?} sum {oracle_sum}", z.total)))
}

fn criterion_4(config: &RunConfig) -> Outcome {
    let spec = TowerSpec::new(catalog::alternating(5))?;
    let l3 = spec.build_level(3, config.caps.degree)?;
    let expected = num_traits::Pow::pow(BigUint::from(60u32), 31u32);
    let order = l3.order();
    Ok((order == expected && spec.level_order(3) == expected, format!("|L_3| = 60^31 on {} points: {}", l3.degree(), order == expected)))
}

fn decode(mut w: usize, d: usize, n: usize) -> Vec<usize> {
    let mut letters = vec![0; n];
    for i in (0..n).rev() {
        letters[i] = w % d;
        w /= d;
    }
    letters
}

fn criterion_5(config: &RunConfig) -> Outcome {
    let spec = TowerSpec::new(catalog::alternating(5))?;
    let d = spec.degree();
    let pairs = 10_000usize;
    let bad = par::map_range(config.execution, pairs, |i| -> Result<bool> {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(i as u64);
        let n = rng.random_range(1..=3);
        let a = WreathElement::random(&spec, n, &mut rng);
        let b = WreathElement::random(&spec, n, &mut rng);
        let ab = a.mult(&b)?;
        let p = ab.to_permutation();
        if p != a.to_permutation().compose(&b.to_permutation()) {
            return Ok(true);
        }
        for w in 0..d.pow(n as u32) {
            let image = ab.act(&decode(w, d, n))?;
            if image.iter().fold(0, |acc, &x| acc * d + x) != p.apply(w) {
                return Ok(true);
            }
        }
        Ok(false)
    });
    let mut failures = 0;
    for b in bad {
        failures += b? as usize;
    }
    Ok((failures == 0, format!("{pairs} pairs at levels 1..3, {failures} mismatches")))
}

fn criterion_6(config: &RunConfig) -> Outcome {
    let cap = config.caps.lattice_order;
    let s3 = certify::decide(&TowerSpec::new(catalog::symmetric(3))?, cap)?;
    let ab = s3.abelianization.as_ref().map(|e| e.check.ok() && e.check.pairs >= 1000 && e.target_order == 2);
    let a5p = certify::decide(&TowerSpec::new(catalog::a5_fixing_point())?, cap)?;
    let fp = a5p.fixed_point.as_ref().map(|e| e.check.ok() && e.check.pairs >= 1000);
    let ok = !s3.is_yes() && ab == Some(true) && !a5p.is_yes() && fp == Some(true);
    Ok((ok, format!("S3 abelianization witness {ab:?}, A5+fixed point witness {fp:?}")))
}

fn criterion_7(config: &RunConfig) -> Outcome {
    let cap = config.caps.lattice_order;
    let cases = [
        ("(A5,5)", certify::decide(&TowerSpec::new(catalog::alternating(5))?, cap)?, true),
        ("U(A6)", certify::decide_universal(&catalog::alternating(6), cap)?, true),
        ("(C2,2)", certify::decide(&TowerSpec::new(catalog::cyclic(2))?, cap)?, false),
        ("U(S3)", certify::decide_universal(&catalog::symmetric(3), cap)?, false),
        ("U(PSL(2,5))", certify::decide_universal(&catalog::psl2_5(), cap)?, false),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, v, yes) in &cases {
        let reason_ok = if *yes { v.perfect && v.fixed_point.is_none() } else { !v.perfect && v.abelianization.is_some() };
        ok &= v.is_yes() == *yes && reason_ok && !v.reasons.is_empty();
        parts.push(format!("{label} {}", if v.is_yes() { "YES" } else { "NO" }));
    }
    Ok((ok, parts.join(", ")))
}

fn a5() -> PermGroup {
    catalog::alternating(5)
}

/// `A_5^r` on `5r` points, and the generators of each factor.
fn a5_power(r: usize) -> (PermGroup, Vec<Vec<Permutation>>) {
    let a = a5();
    let factors: Vec<Vec<Permutation>> =
        (0..r).map(|j| a.generators().iter().map(|g| g.shifted(5 * j, 5 * r)).collect()).collect();
    (PermGroup::new(5 * r, factors.concat()).expect("valid generators"), factors)
}

fn semidirect(x: PermGroup, factors: Vec<Factor>) -> Result<SemidirectGroup> {
    SemidirectGroup::new(SemidirectSpec::new(x, factors)?)
}

fn criterion_8(config: &RunConfig) -> Outcome {
    let caps = caps(config);
    let f = || Factor { omega: 1, action: Vec::new(), group: a5() };
    let y = semidirect(PermGroup::trivial(1), vec![f(), f()])?;
    let diag = construct_graph_iso(&y, &[0], &[a5().generators().to_vec()], &caps)?;
    let class = classify_maximal(&y, &diag.bits, &caps)?;
    let count = count_graph_iso_classes(&y, &caps, config.execution)?;
    let ok = diag.maximal == Some(true)
        && diag.index == BigUint::from(60u32)
        && class.case == Some(CaseTag::GraphIso)
        && count.classes == 2
        && count.bound == 2;
    Ok((
        ok,
        format!(
            "diagonal maximal {:?}, case {:?}, classes {} vs bound {} = {} x {}",
            diag.maximal, class.case, count.classes, count.bound, count.eligible, count.out_order
        ),
    ))
}

fn criterion_9(config: &RunConfig) -> Outcome {
    let caps = &config.caps;
    let trivial_x = |r: usize| -> Result<(SemidirectGroup, Vec<Vec<Permutation>>)> {
        let (b, factors) = a5_power(r);
        Ok((semidirect(PermGroup::trivial(1), vec![Factor { omega: 1, action: Vec::new(), group: b }])?, factors))
    };
    let swap = |r: usize| -> Result<(SemidirectGroup, Vec<Vec<Permutation>>)> {
        let (b, factors) = a5_power(r);
        let x = PermGroup::from_cycles(2, &["(0 1)"])?;
        let action = x.generators().to_vec();
        Ok((semidirect(x, vec![Factor { omega: 2, action, group: b }])?, factors))
    };
    // conjugation by an odd permutation of the second copy
    let (_, f2) = a5_power(2);
    let t = Permutation::from_cycles("(5 6)", 10)?;
    let outer: Vec<Permutation> = f2[1].iter().map(|g| t.conjugate(g)).collect();
    let twisted = Some(vec![f2[0].clone(), outer]);

    type Fixture = (&'static str, (SemidirectGroup, Vec<Vec<Permutation>>), Vec<Vec<usize>>, Option<Vec<Vec<Permutation>>>);
    let fixtures: Vec<Fixture> = vec![
        ("A5^2 {01}", trivial_x(2)?, vec![vec![0, 1]], None),
        ("A5^2 {01} twisted", trivial_x(2)?, vec![vec![0, 1]], twisted),
        ("A5^3 {012}", trivial_x(3)?, vec![vec![0, 1, 2]], None),
        ("A5^4 {01}{23}", trivial_x(4)?, vec![vec![0, 1], vec![2, 3]], None),
        ("A5^4 {02}{13}", trivial_x(4)?, vec![vec![0, 2], vec![1, 3]], None),
        ("A5^4 {03}{12}", trivial_x(4)?, vec![vec![0, 3], vec![1, 2]], None),
        ("A5^4 {0123}", trivial_x(4)?, vec![vec![0, 1, 2, 3]], None),
        ("C2 swap A5 {01}", swap(1)?, vec![vec![0, 1]], None),
        ("C2 swap A5^2 {02}{13}", swap(2)?, vec![vec![0, 2], vec![1, 3]], None),
    ];
    let mut matched = 0;
    let mut failed = Vec::new();
    for (label, (y, factors), partition, twists) in &fixtures {
        let data = SubdiagonalData { factors: factors.clone(), partition: partition.clone(), twists: twists.clone() };
        let r = construct_subdiagonal(y, &data, caps)?;
        if r.index_matches && r.index == r.expected_index {
            matched += 1;
        } else {
            failed.push(label);
        }
    }
    let (y, factors) = trivial_x(2)?;
    let singletons = SubdiagonalData { factors, partition: vec![vec![0], vec![1]], twists: None };
    let rejected = construct_subdiagonal(&y, &singletons, caps).is_err();
    let ok = failed.is_empty() && matched >= 5 && rejected;
    Ok((ok, format!("{matched}/{} partitions match |T|^e, size-1 blocks rejected: {rejected}", fixtures.len())))
}

/// Transitive actions on at most four points: name, degree, generator images.
fn small_transitive_actions() -> Vec<(&'static str, usize, Vec<&'static str>)> {
    vec![
        ("1", 1, vec![]),
        ("C2", 2, vec!["(0 1)"]),
        ("C3", 3, vec!["(0 1 2)"]),
        ("S3", 3, vec!["(0 1 2)", "(0 1)"]),
        ("C4", 4, vec!["(0 1 2 3)"]),
        ("V4", 4, vec!["(0 1)(2 3)", "(0 2)(1 3)"]),
        ("D8", 4, vec!["(0 1 2 3)", "(0 2)"]),
        ("A4", 4, vec!["(0 1 2)", "(1 2 3)"]),
        ("S4", 4, vec!["(0 1 2 3)", "(0 1)"]),
    ]
}

fn criterion_10(config: &RunConfig) -> Outcome {
    let mut total = 0;
    let mut failed = Vec::new();
    for (label, omega, cycles) in small_transitive_actions() {
        let action = cycles.iter().map(|c| Permutation::from_cycles(c, omega)).collect::<Result<Vec<_>>>()?;
        for r in 1..=3 {
            let rep = partition_bound(&action, omega, r, config.caps.partition_domain)?;
            total += 1;
            if !rep.holds_linear {
                failed.push(format!("{label} r={r}: {} > {}", rep.a_r_omega, rep.bound_linear));
            }
        }
    }
    let detail = if failed.is_empty() {
        format!("{total} fixtures hold")
    } else {
        format!("{} of {total} fixtures violate: {}", failed.len(), failed.join("; "))
    };
    Ok((failed.is_empty(), detail))
}

fn criterion_11(config: &RunConfig) -> Outcome {
    let a5 = a5();
    let target = ratio(19, 30);
    let seeds = 100u64;
    let mut inside = 0;
    for s in 0..seeds {
        let r = genprob::pk_montecarlo(&a5, 2, 10_000, config.seed.wrapping_add(s), config.execution)?;
        if r.estimate.as_ref().is_some_and(|e| e.contains(&target)) {
            inside += 1;
        }
    }
    let spec = TowerSpec::new(a5.clone())?;
    let l2 = spec.build_level(2, config.caps.degree)?;
    let e1 = genprob::pk_montecarlo(&a5, 2, 10_000, config.seed, config.execution)?.estimate;
    let e2 = genprob::pk_montecarlo(&l2, 2, 2_000, config.seed, config.execution)?.estimate;
    let (e1, e2) = match (e1, e2) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::invariant("Monte-Carlo run without an estimate")),
    };
    let sigma = (e1.sigma * e1.sigma + e2.sigma * e2.sigma).sqrt();
    let monotone = e2.point() <= e1.point() + 3.0 * sigma;
    let ok = inside >= 90 && monotone;
    Ok((
        ok,
        format!(
            "{inside}/{seeds} intervals contain 19/30; p2(L2) ~ {:.4} vs p2(L1) ~ {:.4} + 3 x {sigma:.4}",
            e2.point(),
            e1.point()
        ),
    ))
}

fn criterion_12(config: &RunConfig) -> Outcome {
    let spec = TowerSpec::new(a5())?;
    let opts = CertifyOptions {
        crude_bounds: true,
        seed: config.seed,
        caps: config.caps.clone(),
        execution: config.execution,
        ..CertifyOptions::default()
    };
    let c = certify::certified_k(&spec, &opts)?;
    let positive = c.tail_lower_bound > BigRational::zero() && c.tail_lower_bound < BigRational::one();
    let ok = c.flags.all() && positive;
    Ok((
        ok,
        format!(
            "n1 = {}, k2 = {}, log2 k1 ~ {}, tail lower bound > 0: {positive}",
            c.n1,
            c.k2,
            c.k1.bits()
        ),
    ))
}
