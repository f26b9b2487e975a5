use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::constants::{Case2Pair, ConstantsReport};
use super::log2::{self, int, pow2_int};
use crate::error::{Error, Result};

/// Bit budget for writing a bound out as an exact rational.
const EXACT_BITS: u64 = 1 << 14;

/// Most distinct orbit sizes tracked at one level.
const ORBIT_CLASSES: usize = 100_000;

/// An upper bound on a nonnegative quantity: always its base-2 logarithm,
/// and the exact rational value when that is small enough to write out.
#[derive(Clone, Debug, Serialize)]
pub struct Bound {
    /// `None` for the empty sum.
    #[serde(with = "crate::io::opt_ratio")]
    pub log2_upper: Option<BigRational>,
    #[serde(with = "crate::io::opt_ratio")]
    pub exact: Option<BigRational>,
}

impl Bound {
    pub fn zero() -> Self {
        Bound { log2_upper: None, exact: Some(BigRational::zero()) }
    }

    fn new(log2_upper: BigRational, exact: Option<BigRational>) -> Self {
        Bound { log2_upper: Some(log2_upper), exact }
    }

    pub fn is_zero(&self) -> bool {
        self.log2_upper.is_none()
    }

    /// Strictly below one, rigorously.
    pub fn below_one(&self) -> bool {
        match (&self.exact, &self.log2_upper) {
            (Some(e), _) => e < &BigRational::one(),
            (None, Some(u)) => u.is_negative(),
            (None, None) => true,
        }
    }

    /// A rational `≥` the bound, `2^{-1000}` at the smallest. `None` when
    /// the bound is too large to write down, in particular above one.
    pub fn value_upper(&self) -> Option<BigRational> {
        match (&self.exact, &self.log2_upper) {
            (Some(e), _) => Some(e.clone()),
            (None, Some(u)) => log2::pow2_upper(u),
            (None, None) => Some(BigRational::zero()),
        }
    }

    /// `log2` of the bound as a double, saturating at `±∞`.
    pub fn log2_approx(&self) -> f64 {
        match &self.log2_upper {
            None => f64::NEG_INFINITY,
            Some(u) => u.to_f64().filter(|x| x.is_finite()).unwrap_or(if u.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }),
        }
    }

    fn sum(parts: &[&Bound]) -> Bound {
        let terms: Vec<(BigUint, BigRational)> =
            parts.iter().filter_map(|b| b.log2_upper.clone()).map(|u| (BigUint::one(), u)).collect();
        let exact = parts.iter().map(|b| b.exact.clone()).sum::<Option<BigRational>>();
        match log2::sum_upper(&terms) {
            None => Bound::zero(),
            Some(u) => Bound::new(u, exact),
        }
    }
}

/// Orbits of `L_n` on `D^n` of one size.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitClass {
    #[serde(with = "crate::io::uint")]
    pub size: BigUint,
    #[serde(with = "crate::io::uint")]
    pub count: BigUint,
}

/// The `ℓ^n` orbit sizes `|D_{i_1}|⋯|D_{i_n}|`, grouped by value.
pub fn orbit_classes(orbit_sizes: &[usize], n: u32) -> Result<Vec<OrbitClass>> {
    let mut acc: BTreeMap<BigUint, BigUint> = BTreeMap::from([(BigUint::one(), BigUint::one())]);
    for _ in 0..n {
        let mut next = BTreeMap::new();
        for (size, count) in &acc {
            for &d in orbit_sizes {
                *next.entry(size * d).or_insert_with(BigUint::zero) += count;
            }
        }
        if next.len() > ORBIT_CLASSES {
            return Err(Error::cap(format!("more than {ORBIT_CLASSES} distinct orbit sizes at level {n}"), ORBIT_CLASSES));
        }
        acc = next;
    }
    Ok(acc.into_iter().map(|(size, count)| OrbitClass { size, count }).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseBounds {
    pub n: u32,
    #[serde(with = "crate::io::uint")]
    pub k: BigUint,
    pub case1: Bound,
    pub case2: Bound,
    pub case3: Bound,
    pub case4: Bound,
    pub total: Bound,
    pub below_one: bool,
}

fn big(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

/// `2^{-e}` when `e` is small enough to write out.
fn inv_pow2(e: &BigUint) -> Option<BigRational> {
    let e = e.to_u64().filter(|&e| e <= EXACT_BITS)?;
    Some(pow2_int(-(e as i64)))
}

fn small_pow(base: &BigUint, e: u64) -> Option<BigUint> {
    (base.bits().saturating_mul(e) <= EXACT_BITS).then(|| Pow::pow(base, e))
}

/// Log-domain shorthand for the constants.
struct Logs {
    c1: BigRational,
    c2: BigRational,
    c3: BigRational,
    c6: BigRational,
    c9: BigRational,
    c8: BigRational,
    ell: BigRational,
    d: BigRational,
}

impl Logs {
    fn new(c: &ConstantsReport) -> Self {
        Logs {
            c1: c.c1.log2_upper.clone(),
            c2: c.c2.log2_upper.clone(),
            c3: c.c3.log2_upper.clone(),
            c6: c.c6.log2_upper.clone(),
            c9: c.c9.log2_upper.clone(),
            c8: c.c8_log2_upper.clone(),
            ell: log2::upper_usize(c.orbit_count),
            d: log2::upper_usize(c.degree),
        }
    }
}

/// `log2` of `|Out T|^r / |N|^{k/2}`, from above.
fn rho_log2(p: &Case2Pair, k: &BigUint) -> BigRational {
    int(p.r) * log2::upper_usize(p.out_t) - log2::scale(&log2::lower_usize(p.n_order), k) / int(2)
}

/// Bounds on the four contributions to `ζ_{L_{n+1}|L_n}(k)`:
///
/// 1. `C_1^2 C_2 (ℓ^2|D|)^n / 2^{k 2^n}`;
/// 2. `Σ_O Σ_{(B,N)} (2|O|^2)^{r-1} C_3^{rn} (|Out T|^r / |N|^{k/2})^{|O|}`;
/// 3. `C_6 ℓ^n / 2^{k 2^n}`;
/// 4. `Σ_O C_9 (C_8 / 2^k)^{|O|}`.
pub fn case_bounds(c: &ConstantsReport, n: u32, k: &BigUint) -> Result<CaseBounds> {
    let lg = Logs::new(c);
    let two_n = BigUint::one() << n;
    let k_two_n = k * &two_n;
    let classes = orbit_classes(&c.orbit_sizes, n)?;
    let ell = BigUint::from(c.orbit_count);
    let degree = BigUint::from(c.degree);
    let nn = int(n);

    let case1 = {
        let u = int(2) * &lg.c1 + &lg.c2 + &nn * (int(2) * &lg.ell + &lg.d) - big(&k_two_n);
        let exact = inv_pow2(&k_two_n).and_then(|den| {
            let base = small_pow(&(&ell * &ell * &degree), n as u64)?;
            Some(big(&(&c.c1.value * &c.c1.value * &c.c2.value * base)) * den)
        });
        Bound::new(u, exact)
    };

    let case3 = {
        let u = &lg.c6 + &nn * &lg.ell - big(&k_two_n);
        let exact = inv_pow2(&k_two_n)
            .and_then(|den| Some(big(&(&c.c6.value * small_pow(&ell, n as u64)?)) * den));
        Bound::new(u, exact)
    };

    let case2 = {
        let mut terms = Vec::new();
        let mut exact = Some(BigRational::zero());
        for p in &c.case2_pairs {
            let r = p.r as u64;
            let rho = rho_log2(p, k);
            for cl in &classes {
                let u = int(r - 1) * (int(1) + int(2) * log2::upper(&cl.size))
                    + int(r * n as u64) * &lg.c3
                    + log2::scale(&rho, &cl.size);
                terms.push((cl.count.clone(), u));
                exact = exact.and_then(|acc| {
                    let x = cl.size.to_u64()?;
                    let half_k = if (k % 2u32).is_zero() { (k / 2u32).to_u64()? } else { return None };
                    let pre = small_pow(&(BigUint::from(2u32) * &cl.size * &cl.size), r - 1)?;
                    let c3 = small_pow(&c.c3.value, r * n as u64)?;
                    let out = small_pow(&BigUint::from(p.out_t), r.checked_mul(x)?)?;
                    let den = small_pow(&BigUint::from(p.n_order), half_k.checked_mul(x)?)?;
                    Some(acc + big(&(&cl.count * pre * c3 * out)) / big(&den))
                });
            }
        }
        match log2::sum_upper(&terms) {
            None => Bound::zero(),
            Some(u) => Bound::new(u, exact),
        }
    };

    let case4 = {
        let terms: Vec<(BigUint, BigRational)> = classes
            .iter()
            .map(|cl| (cl.count.clone(), &lg.c9 + log2::scale(&(&lg.c8 - big(k)), &cl.size)))
            .collect();
        let c8_exact = c.c8_squared.as_ref().and_then(|sq| {
            let root = sq.sqrt();
            (&root * &root == *sq).then_some(root)
        });
        let exact = classes.iter().try_fold(BigRational::zero(), |acc, cl| {
            let x = cl.size.to_u64()?;
            let num = match &c8_exact {
                Some(root) => small_pow(root, x)?,
                None if x % 2 == 0 => small_pow(c.c8_squared.as_ref()?, x / 2)?,
                None => return None,
            };
            let den = inv_pow2(&(k * x))?;
            Some(acc + big(&(&cl.count * &c.c9.value * num)) * den)
        });
        Bound::new(log2::sum_upper(&terms).expect("at least one orbit"), exact)
    };

    let total = Bound::sum(&[&case1, &case2, &case3, &case4]);
    let below_one = total.below_one();
    Ok(CaseBounds { n, k: k.clone(), case1, case2, case3, case4, total, below_one })
}

/// A majorant `m_n` with `log2 m_n ≤ a + b n + c 2^n`, dominating one part
/// of the case bounds for `n ≥ start`, where also `m_{n+1} ≤ m_n / 2`.
#[derive(Clone, Debug, Serialize)]
pub struct Majorant {
    pub label: String,
    #[serde(with = "crate::io::ratio")]
    pub a: BigRational,
    #[serde(with = "crate::io::ratio")]
    pub b: BigRational,
    #[serde(with = "crate::io::ratio")]
    pub c: BigRational,
    /// First level from which the comparison holds, if any up to the limit.
    pub start: Option<u32>,
}

impl Majorant {
    fn new(label: String, a: BigRational, b: BigRational, c: BigRational, min_start: Option<u32>, limit: u32) -> Self {
        let start = min_start.and_then(|m| log2::first_level_below(&b, &c, &int(-1), m.max(1), limit));
        Majorant { label, a, b, c, start }
    }

    pub fn convergent(&self) -> bool {
        self.c.is_negative() && self.start.is_some()
    }

    pub fn log2_at(&self, n: u32) -> BigRational {
        &self.a + &self.b * int(n) + &self.c * pow2_int(n as i64)
    }
}

/// Ratio `ln 2 ≥ 693/1000`.
fn ln2_lower() -> BigRational {
    BigRational::new(693.into(), 1000.into())
}

/// Geometric majorants for every part of the case bounds at exponent `k`,
/// searching levels up to `limit`.
pub fn majorants(c: &ConstantsReport, k: &BigUint, limit: u32) -> Vec<Majorant> {
    let lg = Logs::new(c);
    let kk = big(k);
    let mut out = vec![
        Majorant::new(
            "case1".into(),
            int(2) * &lg.c1 + &lg.c2,
            int(2) * &lg.ell + &lg.d,
            -kk.clone(),
            Some(1),
            limit,
        ),
        Majorant::new("case3".into(), lg.c6.clone(), lg.ell.clone(), -kk.clone(), Some(1), limit),
        Majorant::new("case4".into(), lg.c9.clone(), lg.ell.clone(), &lg.c8 - &kk, Some(1), limit),
    ];
    for (i, p) in c.case2_pairs.iter().enumerate() {
        let r = p.r as i64;
        let rho = rho_log2(p, k);
        // (2x^2)^{r-1} ρ^x decreases once 2(r-1)/x + ln ρ ≤ 0
        let min_start = if !rho.is_negative() {
            None
        } else if r == 1 {
            Some(1)
        } else {
            let need = int(2 * (r - 1));
            (1..=limit).find(|&n| pow2_int(n as i64) * (-&rho) * ln2_lower() >= need)
        };
        out.push(Majorant::new(
            format!("case2[{i}]: |B|={} |N|={} r={}", p.quotient_order, p.n_order, p.r),
            int(r - 1),
            &lg.ell + int(r) * &lg.c3 + int(2 * (r - 1)),
            rho,
            min_start,
            limit,
        ));
    }
    out
}

/// Upper bound on `log2 Σ_{n ≥ N} (all cases)`, by `Σ 2 m_N`. Requires every
/// majorant to be convergent with `start ≤ N`.
pub fn tail_log2(majorants: &[Majorant], big_n: u32) -> Option<BigRational> {
    if majorants.iter().any(|m| !m.convergent() || m.start.unwrap() > big_n) {
        return None;
    }
    let terms: Vec<(BigUint, BigRational)> =
        majorants.iter().map(|m| (BigUint::one(), int(1) + m.log2_at(big_n))).collect();
    log2::sum_upper(&terms)
}
