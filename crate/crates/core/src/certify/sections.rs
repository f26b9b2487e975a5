use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::constants::ConstantsReport;
use super::log2;
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::permcore::{Homomorphism, PermGroup, Permutation};
use crate::semidirect::SemidirectGroup;

/// Falling factorials longer than this are bounded by `N^K`.
const FALLING_EXACT: u64 = 10_000;

/// One level of the section count estimate for an orbit signature with
/// orbit sizes `d_1, .., d_n`. All logarithms are base 2.
#[derive(Clone, Debug, Serialize)]
pub struct SectionStep {
    pub n: usize,
    #[serde(with = "crate::io::uint")]
    pub orbit_size: BigUint,
    /// `α_n = Σ_{m=1}^{n-1} m · d_{m+2} ⋯ d_n`.
    #[serde(with = "crate::io::uint")]
    pub alpha: BigUint,
    /// `β_n = Σ_{m=1}^{n-1} d_{m+2} ⋯ d_n`.
    #[serde(with = "crate::io::uint")]
    pub beta: BigUint,
    /// `d_3 ⋯ d_n`.
    #[serde(with = "crate::io::uint")]
    pub tail_product: BigUint,
    pub alpha_ok: bool,
    pub beta_ok: bool,
    /// Upper bound for `a(n) ≤ a(n-1)^{d_n} · C(|S_{n-1}|, K) K! · C_7^K`.
    #[serde(with = "crate::io::ratio")]
    pub recursion_log2: BigRational,
    /// Upper bound for `C_7^{d_2⋯d_n} |D|^{K α_n} C_7^{K β_n}`.
    #[serde(with = "crate::io::ratio")]
    pub iterated_log2: BigRational,
    /// Lower bound for `C_8^{d_1⋯d_n}`.
    #[serde(with = "crate::io::ratio")]
    pub closed_log2: BigRational,
    pub closed_dominates: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectionBound {
    pub orbit_sizes: Vec<usize>,
    pub steps: Vec<SectionStep>,
    pub holds: bool,
}

impl SectionBound {
    /// Upper bound on `log2 a(n)` at the last level.
    pub fn log2_upper(&self) -> BigRational {
        self.steps.last().map(|s| s.recursion_log2.clone()).unwrap_or_else(BigRational::zero)
    }
}

/// Upper bound on `log2 (N (N-1) ⋯ (N-K+1))`, the number of ways to place
/// `K` distinguishable images; `K` is capped at `N`.
fn falling_log2(big_n: &BigUint, k: &BigUint) -> BigRational {
    let m = k.min(big_n).clone();
    if m.is_zero() {
        return BigRational::zero();
    }
    match m.to_u64().filter(|&m| m <= FALLING_EXACT) {
        Some(m) => {
            let mut acc = BigUint::one();
            for j in 0..m {
                acc *= big_n - j;
            }
            log2::upper(&acc)
        }
        None => log2::scale(&log2::upper(big_n), &m),
    }
}

/// Evaluate the section count recursion and its closed form along the orbit
/// signature with sizes `sizes = (d_1, .., d_n)`, checking at every level
/// `α ≤ 4 d_3⋯d_n`, `β ≤ 2 d_3⋯d_n` and that `C_8^{|O_n|}` dominates the
/// unrolled recursion.
pub fn section_count_bound(c: &ConstantsReport, sizes: &[usize]) -> Result<SectionBound> {
    if sizes.is_empty() {
        return Err(Error::input("an orbit signature of length at least 1 is required"));
    }
    if sizes.iter().any(|&d| d < 2) {
        return Err(Error::input("every orbit in the signature needs at least two points"));
    }
    let k = &c.k.value;
    let c7 = &c.c7.log2_upper;
    let d_log = log2::upper_usize(c.degree);
    let half = BigRational::new(1.into(), 2.into());
    let c8_lower =
        log2::scale(&log2::lower(&c.c7.value), &(k + 1u32)) * &half + log2::scale(&log2::lower_usize(c.degree), k);
    let d = |i: usize| BigUint::from(sizes[i - 1]);
    let prod = |from: usize, to: usize| (from..=to).map(d).product::<BigUint>();

    let mut steps = Vec::with_capacity(sizes.len());
    let mut rec = c7.clone();
    let mut orbit = d(1);
    for n in 1..=sizes.len() {
        if n > 1 {
            orbit *= d(n);
            let words = num_traits::Pow::pow(BigUint::from(c.degree), n - 1);
            rec = log2::scale(&rec, &d(n)) + falling_log2(&words, k) + log2::scale(c7, k);
        }
        let alpha: BigUint = (1..n).map(|m| BigUint::from(m) * prod(m + 2, n)).sum();
        let beta: BigUint = (1..n).map(|m| prod(m + 2, n)).sum();
        let tail = prod(3, n);
        let iterated = log2::scale(c7, &prod(2, n))
            + log2::scale(&d_log, &(k * &alpha))
            + log2::scale(c7, &(k * &beta));
        let closed = log2::scale(&c8_lower, &orbit);
        let alpha_ok = alpha <= BigUint::from(4u32) * &tail;
        let beta_ok = beta <= BigUint::from(2u32) * &tail;
        steps.push(SectionStep {
            n,
            orbit_size: orbit.clone(),
            closed_dominates: closed >= rec,
            alpha,
            beta,
            tail_product: tail,
            alpha_ok,
            beta_ok,
            recursion_log2: rec.clone(),
            iterated_log2: iterated,
            closed_log2: closed,
        });
    }
    let holds = steps.iter().all(|s| s.alpha_ok && s.beta_ok && s.closed_dominates);
    Ok(SectionBound { orbit_sizes: sizes.to_vec(), steps, holds })
}

/// Number of sections of `π: Y → X`: homomorphisms `s` with `π ∘ s = id`,
/// found by trying every lift of each generator of `X`.
pub fn count_sections(y: &SemidirectGroup, cap: usize, exec: Execution) -> Result<u64> {
    let x = y.spec().x();
    let ngens = x.generators().len();
    let lifts: Vec<Permutation> = y.group().generators()[..ngens].to_vec();
    let mut base_gens = Vec::new();
    for (i, f) in y.spec().factors().iter().enumerate() {
        for w in 0..f.omega {
            for b in f.group.generators() {
                base_gens.push(y.leaf(i, w, b));
            }
        }
    }
    let base = PermGroup::new(y.degree(), base_gens)?.elements(cap)?;
    let total = (base.len() as f64).powi(ngens as i32);
    if total > cap as f64 * cap as f64 {
        return Err(Error::cap(format!("section search over {total:.3e} lifts"), cap));
    }
    let counts = par::map(exec, &base, |b0| {
        let mut count = 0u64;
        let mut idx = vec![0usize; ngens.saturating_sub(1)];
        loop {
            let mut images = vec![lifts[0].compose(b0)];
            images.extend(idx.iter().enumerate().map(|(j, &i)| lifts[j + 1].compose(&base[i])));
            if Homomorphism::new(x, y.group(), images).is_ok() {
                count += 1;
            }
            // odometer over the remaining generators
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    return count;
                }
                idx[pos] += 1;
                if idx[pos] < base.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    });
    Ok(counts.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::certify::constants::{constants, Overrides};
    use crate::config::Caps;
    use crate::semidirect::{Factor, SemidirectSpec};
    use crate::tower::TowerSpec;
    use proptest::prelude::*;

    fn a5_constants(c7: u32, k: u32) -> ConstantsReport {
        let spec = TowerSpec::new(catalog::alternating(5)).unwrap();
        let mut o = Overrides::new();
        o.set("C7", c7.into()).unwrap();
        o.set("K", k.into()).unwrap();
        constants(&spec, &o, false, &Caps::default(), Execution::Parallel).unwrap()
    }

    #[test]
    fn a5_sections_in_a5_squared() {
        let a5 = catalog::alternating(5);
        let action = vec![Permutation::identity(1); a5.generators().len()];
        let spec = SemidirectSpec::new(a5.clone(), vec![Factor { omega: 1, action, group: a5 }]).unwrap();
        let y = SemidirectGroup::new(spec).unwrap();
        let n = count_sections(&y, 100_000, Execution::Parallel).unwrap();
        // trivial map plus the 120 automorphisms
        assert_eq!(n, 121);
        let c = a5_constants(121, 22);
        assert!(BigUint::from(n) <= c.c7.value);
        let b = section_count_bound(&c, &[5]).unwrap();
        assert_eq!(b.steps[0].recursion_log2, c.c7.log2_upper);
        assert!(b.holds);
    }

    #[test]
    fn recursion_levels() {
        let c = a5_constants(121, 22);
        let b = section_count_bound(&c, &[5, 5, 5, 5]).unwrap();
        assert!(b.holds);
        assert_eq!(b.steps[3].alpha, BigUint::from(5u32 * 5 + 2 * 5 + 3));
        assert_eq!(b.steps[3].beta, BigUint::from(5u32 * 5 + 5 + 1));
        assert!(section_count_bound(&c, &[5, 1]).is_err());
    }

    #[test]
    fn alpha_beta_small_orbits() {
        // d_i = 2 everywhere is the extreme case for both inequalities
        let c = a5_constants(121, 22);
        for n in 1..=10 {
            let b = section_count_bound(&c, &vec![2; n]).unwrap();
            assert!(b.steps.iter().all(|s| s.alpha_ok && s.beta_ok), "n = {n}");
        }
    }

    proptest! {
        #[test]
        fn alpha_beta_inequalities(sizes in proptest::collection::vec(2usize..9, 1..=10)) {
            let c = a5_constants(121, 22);
            let b = section_count_bound(&c, &sizes).unwrap();
            prop_assert!(b.steps.iter().all(|s| s.alpha_ok && s.beta_ok));
        }
    }
}
