use serde::{Deserialize, Serialize};

use crate::par::Execution;

/// Explicit limits for every exhaustive computation. Exceeding one yields a
/// [`crate::Error::Cap`] naming it; nothing is truncated silently.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest permutation degree a tower level may have.
    pub degree: usize,
    /// Largest group order for which a full subgroup lattice is built.
    pub lattice_order: usize,
    /// Largest domain for invariant-partition enumeration.
    pub partition_domain: usize,
    /// Largest number of k-tuples visited by exhaustive p_k.
    pub exhaustive_tuples: u64,
    /// Largest group order that is enumerated element by element.
    pub enumeration: usize,
    /// Largest order for exhaustive one-element-extension maximality tests.
    pub maximality: usize,
    /// Largest number of candidate image tuples in a homomorphism search.
    pub hom_candidates: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            degree: 10_000,
            lattice_order: 2_000,
            partition_domain: 12,
            exhaustive_tuples: 10_000_000,
            enumeration: 100_000,
            maximality: 10_000,
            hom_candidates: 20_000_000,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub caps: Caps,
    pub seed: u64,
    pub samples: u64,
    pub execution: Execution,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { caps: Caps::default(), seed: 0, samples: 10_000, execution: Execution::default() }
    }
}
