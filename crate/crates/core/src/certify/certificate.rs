use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::bounds::{case_bounds, majorants, tail_log2, CaseBounds, Majorant};
use super::constants::{constants, ConstantsReport, Overrides};
use super::log2;
use super::{decide, Verdict};
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::genprob::pk_exact_mobius;
use crate::par::Execution;
use crate::permcore::PermGroup;
use crate::tower::TowerSpec;

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub overrides: Overrides,
    /// Allow the crude bounds for `C_3`, `C_7` and `K`.
    pub crude_bounds: bool,
    /// Largest acceptable `n_1`; `L_{n_1}` is built and searched for
    /// generators.
    pub max_level: u32,
    /// Levels scanned for the geometric tail comparison.
    pub level_limit: u32,
    /// Rows of the bound table beyond those the certificate needs.
    pub display_levels: u32,
    /// Random tuples tried per `k` in the generator search.
    pub mc_budget: u64,
    pub seed: u64,
    pub caps: Caps,
    pub execution: Execution,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            overrides: Overrides::new(),
            crude_bounds: false,
            max_level: 1,
            level_limit: 48,
            display_levels: 6,
            mc_budget: 100_000,
            seed: 0,
            caps: Caps::default(),
            execution: Execution::default(),
        }
    }
}

/// One row of the bound table: base-2 logarithms of the case bounds at
/// level `n`, rounded for display, and a rational upper bound on the total.
#[derive(Clone, Debug, Serialize)]
pub struct BoundRow {
    pub n: u32,
    pub case1_log2: f64,
    pub case2_log2: f64,
    pub case3_log2: f64,
    pub case4_log2: f64,
    pub total_log2: f64,
    /// Absent when the bound is too large to write down.
    #[serde(with = "crate::io::opt_ratio")]
    pub total_upper: Option<BigRational>,
    pub below_one: bool,
}

impl BoundRow {
    fn new(b: &CaseBounds) -> Self {
        let total_upper = b.total.value_upper();
        BoundRow {
            n: b.n,
            case1_log2: b.case1.log2_approx(),
            case2_log2: b.case2.log2_approx(),
            case3_log2: b.case3.log2_approx(),
            case4_log2: b.case4.log2_approx(),
            total_log2: b.total.log2_approx(),
            below_one: total_upper.as_ref().is_some_and(|v| v < &BigRational::one()),
            total_upper,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratingTuple {
    pub level: u32,
    pub k: u32,
    pub attempts: u64,
    pub seed: u64,
    pub images: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateFlags {
    pub constants_consistent: bool,
    pub all_series_summable: bool,
    pub tail_below_one: bool,
    pub bound_below_one_at_n1: bool,
    pub bounds_below_one_from_n1: bool,
    pub k2_verified: bool,
    pub tail_lower_bound_positive: bool,
}

impl CertificateFlags {
    pub fn all(&self) -> bool {
        self.constants_consistent
            && self.all_series_summable
            && self.tail_below_one
            && self.bound_below_one_at_n1
            && self.bounds_below_one_from_n1
            && self.k2_verified
            && self.tail_lower_bound_positive
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub constants: ConstantsReport,
    #[serde(with = "crate::io::uint")]
    pub k1: BigUint,
    pub n1: u32,
    pub k2: u32,
    #[serde(with = "crate::io::uint")]
    pub k: BigUint,
    pub generating_tuple: GeneratingTuple,
    pub majorants: Vec<Majorant>,
    /// The level `N` from which the geometric tail takes over.
    pub tail_level: u32,
    #[serde(with = "crate::io::ratio")]
    pub tail_log2_upper: BigRational,
    #[serde(with = "crate::io::ratio")]
    pub tail_upper: BigRational,
    pub table: Vec<BoundRow>,
    #[serde(with = "crate::io::ratio")]
    pub p_lower: BigRational,
    pub p_lower_method: String,
    /// `p_{k_2}(L_{n_1}) ∏_{n_1 ≤ n < N} (1 − b_n) (1 − Σ_{n ≥ N} b_n)`.
    #[serde(with = "crate::io::ratio")]
    pub tail_lower_bound: BigRational,
    pub flags: CertificateFlags,
}

/// A bound configuration that certifies exponent `s = k_1 − 1`.
struct Plan {
    majorants: Vec<Majorant>,
    tail_level: u32,
    tail_log2: BigRational,
    n1: u32,
    /// Case bounds for `n_1 ≤ n < N`.
    levels: Vec<CaseBounds>,
}

fn plan(c: &ConstantsReport, s: &BigUint, opts: &CertifyOptions) -> Result<Option<Plan>> {
    if s.is_zero() {
        return Ok(None);
    }
    let maj = majorants(c, s, opts.level_limit);
    if !maj.iter().all(Majorant::convergent) {
        return Ok(None);
    }
    let start = maj.iter().map(|m| m.start.unwrap()).max().unwrap_or(1);
    let Some((tail_level, tail)) = (start..=opts.level_limit)
        .find_map(|n| tail_log2(&maj, n).filter(|t| log2::pow2_upper(t).is_some_and(|v| v < BigRational::one())).map(|t| (n, t)))
    else {
        return Ok(None);
    };
    let mut levels = Vec::new();
    let mut n1 = tail_level;
    while n1 > 1 {
        let b = case_bounds(c, n1 - 1, s)?;
        if !b.total.value_upper().is_some_and(|v| v < BigRational::one()) {
            break;
        }
        levels.push(b);
        n1 -= 1;
    }
    if n1 > opts.max_level {
        return Ok(None);
    }
    levels.reverse();
    Ok(Some(Plan { majorants: maj, tail_level, tail_log2: tail, n1, levels }))
}

/// Least `s ≥ 1` with a plan, by doubling and bisection. Every bound is
/// non-increasing in `s`, so plans exist for all larger exponents too.
fn least_exponent(c: &ConstantsReport, opts: &CertifyOptions) -> Result<(BigUint, Plan)> {
    let mut hi = BigUint::one();
    let mut hi_plan = loop {
        if let Some(p) = plan(c, &hi, opts)? {
            break p;
        }
        if hi.bits() > 1 << 20 {
            return Err(Error::cap("no certifying exponent below 2^(2^20)", "exponent"));
        }
        hi <<= 1;
    };
    let mut lo = &hi >> 1;
    // invariant: plan(lo) fails (or lo = 0), plan(hi) succeeds
    while &lo + 1u32 < hi {
        let mid: BigUint = (&lo + &hi) >> 1;
        match plan(c, &mid, opts)? {
            Some(p) => {
                hi = mid;
                hi_plan = p;
            }
            None => lo = mid,
        }
    }
    Ok((hi, hi_plan))
}

/// Seeded search for a generating `k`-tuple of `g`, escalating `k` from 2.
fn generating_tuple(g: &PermGroup, level: u32, opts: &CertifyOptions) -> Result<GeneratingTuple> {
    let order = g.order();
    let chain = g.chain_arc();
    let max_k = g.generators().len().max(2) as u32;
    for k in 2..=max_k {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(k as u64);
        for attempt in 1..=opts.mc_budget {
            let tuple: Vec<_> = (0..k).map(|_| chain.random_element(&mut rng)).collect();
            if PermGroup::new(g.degree(), tuple.clone())?.order() == order {
                return Ok(GeneratingTuple {
                    level,
                    k,
                    attempts: attempt,
                    seed: opts.seed,
                    images: tuple.iter().map(|p| p.images().to_vec()).collect(),
                });
            }
        }
    }
    Err(Error::cap(
        format!("no generating tuple of L_{level} found for k = 2..{max_k}"),
        format!("mc_budget = {} samples per k", opts.mc_budget),
    ))
}

/// Certificate of positive finite generation of the limit: `k_1` is the
/// least exponent whose case bounds are summable with every level bound
/// from `n_1 ≤ max_level` on below one; `k_2` is the size of a generating
/// tuple of `L_{n_1}`, found by seeded sampling and verified by chain order.
pub fn certified_k(spec: &TowerSpec, opts: &CertifyOptions) -> Result<Certificate> {
    let verdict = decide(spec, opts.caps.lattice_order)?;
    if !verdict.is_yes() {
        return Err(Error::input(format!("no certificate for a NO tower: {}", verdict.reasons.join("; "))));
    }
    let c = constants(spec, &opts.overrides, opts.crude_bounds, &opts.caps, opts.execution)?;
    let (s, p) = least_exponent(&c, opts)?;
    let k1 = &s + 1u32;

    let level = spec.build_level(p.n1 as usize, opts.caps.degree)?;
    let tuple = generating_tuple(&level, p.n1, opts)?;
    let k2_verified = PermGroup::new(
        level.degree(),
        tuple.images.iter().map(|v| crate::Permutation::from_images(v.clone())).collect::<Result<Vec<_>>>()?,
    )?
    .order()
        == level.order();

    let level_order = level.order();
    let (p_lower, p_lower_method) = if level_order <= BigUint::from(opts.caps.lattice_order) {
        (pk_exact_mobius(&level, tuple.k, &opts.caps)?, format!("exact p_{}(L_{}) by Möbius inversion", tuple.k, p.n1))
    } else {
        let den: BigUint = Pow::pow(&level_order, tuple.k);
        (
            BigRational::new(BigInt::one(), BigInt::from(den)),
            format!("one generating {}-tuple among |L_{}|^{} tuples", tuple.k, p.n1, tuple.k),
        )
    };

    let tail_upper = log2::pow2_upper(&p.tail_log2).expect("tail below one");
    let mut tail_lower = p_lower.clone() * (BigRational::one() - &tail_upper);
    for b in &p.levels {
        tail_lower *= BigRational::one() - b.total.value_upper().expect("level bound below one");
    }

    let mut table: Vec<BoundRow> = p.levels.iter().map(BoundRow::new).collect();
    for n in 1..=opts.display_levels.max(p.tail_level) {
        if !table.iter().any(|r| r.n == n) {
            table.push(BoundRow::new(&case_bounds(&c, n, &s)?));
        }
    }
    table.sort_by_key(|r| r.n);

    let flags = CertificateFlags {
        constants_consistent: c.c8_consistent(),
        all_series_summable: p.majorants.iter().all(Majorant::convergent),
        tail_below_one: tail_upper < BigRational::one(),
        bound_below_one_at_n1: table.iter().find(|r| r.n == p.n1).is_some_and(|r| r.below_one),
        bounds_below_one_from_n1: p.levels.iter().all(|b| b.total.value_upper().is_some_and(|v| v < BigRational::one())),
        k2_verified,
        tail_lower_bound_positive: tail_lower.is_positive(),
    };
    let k = k1.clone().max(BigUint::from(tuple.k));
    Ok(Certificate {
        verdict,
        constants: c,
        k1,
        n1: p.n1,
        k2: tuple.k,
        k,
        generating_tuple: tuple,
        majorants: p.majorants,
        tail_level: p.tail_level,
        tail_log2_upper: p.tail_log2,
        tail_upper,
        table,
        p_lower,
        p_lower_method,
        tail_lower_bound: tail_lower,
        flags,
    })
}

impl Certificate {
    /// `k_1` in decimal when it fits in 64 bits.
    pub fn k1_u64(&self) -> Option<u64> {
        self.k1.to_u64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn opts_with(c7: u32, k: u32) -> CertifyOptions {
        let mut o = CertifyOptions::default();
        o.overrides.set("C7", c7.into()).unwrap();
        o.overrides.set("K", k.into()).unwrap();
        o
    }

    #[test]
    fn a5_with_small_constants() {
        let spec = TowerSpec::new(catalog::alternating(5)).unwrap();
        let cert = certified_k(&spec, &opts_with(121, 22)).unwrap();
        assert!(cert.flags.all(), "{:?}", cert.flags);
        assert_eq!(cert.n1, 1);
        assert_eq!(cert.k2, 2);
        // exact p_2(A5)
        assert_eq!(cert.p_lower, BigRational::new(19.into(), 30.into()));
        // log2 C8 = 23/2 log2 121 + 22 log2 5 ≈ 130.7
        let k1 = cert.k1_u64().unwrap();
        assert!((132..200).contains(&k1), "{k1}");
        // one less fails
        let s = BigUint::from(k1 - 2);
        assert!(plan(&cert.constants, &s, &opts_with(121, 22)).unwrap().is_none());
    }

    #[test]
    fn a5_crude_bounds() {
        let spec = TowerSpec::new(catalog::alternating(5)).unwrap();
        let opts = CertifyOptions { crude_bounds: true, ..Default::default() };
        let cert = certified_k(&spec, &opts).unwrap();
        assert!(cert.flags.all(), "{:?}", cert.flags);
        assert_eq!((cert.n1, cert.k2), (1, 2));
        assert!(cert.k1 > BigUint::from(2u32).pow(1000u32));
        assert!(cert.tail_lower_bound.is_positive());
    }

    #[test]
    fn refuses_no_towers() {
        let spec = TowerSpec::new(catalog::a5_fixing_point()).unwrap();
        assert!(matches!(certified_k(&spec, &CertifyOptions::default()), Err(Error::Input(_))));
    }

    #[test]
    fn missing_constants_are_named() {
        let spec = TowerSpec::new(catalog::alternating(5)).unwrap();
        let err = certified_k(&spec, &CertifyOptions::default()).unwrap_err();
        assert!(err.to_string().contains("C7"));
    }
}
