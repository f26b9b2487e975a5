//! Permutations, stabilizer chains and the basic group algorithms built on
//! them.

pub mod chain;
pub mod group;
pub mod hom;
pub mod partitions;
pub mod perm;

pub use chain::{ChainRecord, StabilizerChain};
pub use group::{GeneratorSpec, GroupDescription, PerfectionReport, PermGroup};
pub use hom::Homomorphism;
pub use partitions::{count_invariant_partitions, invariant_partitions, Partition};
pub use perm::Permutation;
