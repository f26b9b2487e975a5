use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{PkMode, PkResult};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::permcore::PermGroup;

/// Two-sided 95% normal quantile.
pub const WILSON_Z: f64 = 1.959_963_984_540_054;

/// Samples per random stream. Fixed so that results do not depend on the
/// number of worker threads.
const BATCH: u64 = 256;

#[derive(Clone, Debug, Serialize)]
pub struct McEstimate {
    pub samples: u64,
    pub successes: u64,
    pub seed: u64,
    /// Wilson 95% interval, rounded outward to the nearest doubles and
    /// written as exact rationals.
    #[serde(with = "crate::io::ratio")]
    pub low: BigRational,
    #[serde(with = "crate::io::ratio")]
    pub high: BigRational,
    /// `sqrt(p̂(1 − p̂)/n)`.
    pub sigma: f64,
}

impl McEstimate {
    pub fn point(&self) -> f64 {
        self.successes as f64 / self.samples as f64
    }

    pub fn contains(&self, p: &BigRational) -> bool {
        &self.low <= p && p <= &self.high
    }
}

/// Wilson score interval for `successes` out of `n` at quantile `z`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if p == 1.0 { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// Estimate `p_k(g)` from `samples` uniform `k`-tuples. Stream `b` of
/// `ChaCha8Rng::seed_from_u64(seed)` draws samples `b·256 ..`; a tuple
/// succeeds when the order of the group it generates equals `|g|`.
pub fn pk_montecarlo(g: &PermGroup, k: u32, samples: u64, seed: u64, exec: Execution) -> Result<PkResult> {
    if samples < 100 {
        return Err(Error::input(format!("at least 100 samples are needed, got {samples}")));
    }
    let order = g.order();
    let chain = g.chain_arc();
    let batches = samples.div_ceil(BATCH);
    let hits = par::map_range(exec, batches as usize, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let count = BATCH.min(samples - b as u64 * BATCH);
        (0..count)
            .filter(|_| {
                let tuple = (0..k).map(|_| chain.random_element(&mut rng)).collect();
                PermGroup::new(g.degree(), tuple).expect("same degree").order() == order
            })
            .count() as u64
    });
    let successes: u64 = hits.into_iter().sum();
    let (lo, hi) = wilson_interval(successes, samples, WILSON_Z);
    let p = successes as f64 / samples as f64;
    let estimate = McEstimate {
        samples,
        successes,
        seed,
        low: exact(if lo > 0.0 { lo.next_down().max(0.0) } else { 0.0 }),
        high: exact(if hi < 1.0 { hi.next_up().min(1.0) } else { 1.0 }),
        sigma: (p * (1.0 - p) / samples as f64).sqrt(),
    };
    Ok(PkResult {
        group: g.name().map(str::to_string),
        k,
        mode: PkMode::Mc,
        value: BigRational::new(BigInt::from(successes), BigInt::from(samples)),
        estimate: Some(estimate),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn trivial_group_always_generates() {
        let r = pk_montecarlo(&catalog::trivial(), 3, 100, 7, Execution::Parallel).unwrap();
        assert_eq!(r.value, BigRational::from_integer(1.into()));
        assert!(pk_montecarlo(&catalog::trivial(), 1, 99, 7, Execution::Parallel).is_err());
    }

    #[test]
    fn deterministic_across_execution_modes() {
        let g = catalog::alternating(5);
        let a = pk_montecarlo(&g, 2, 1000, 3, Execution::Parallel).unwrap();
        let b = pk_montecarlo(&g, 2, 1000, 3, Execution::Sequential).unwrap();
        assert_eq!(a.value, b.value);
        let c = pk_montecarlo(&g, 2, 1000, 4, Execution::Sequential).unwrap();
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn wilson_shape() {
        let (lo, hi) = wilson_interval(0, 100, WILSON_Z);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson_interval(100, 100, WILSON_Z);
        assert!(lo > 0.95 && hi == 1.0);
        let w1 = wilson_interval(50, 100, WILSON_Z);
        let w2 = wilson_interval(5000, 10000, WILSON_Z);
        // width shrinks like 1/√n
        let ratio = (w1.1 - w1.0) / (w2.1 - w2.0);
        assert!((ratio - 10.0).abs() < 0.2, "{ratio}");
    }
}
