//! Exhaustive subgroup machinery for small groups: multiplication tables,
//! the full subgroup lattice with conjugacy classes and Möbius function,
//! quotients, automorphism groups and homomorphism counts.

pub mod maps;
pub mod quotient;
pub mod subgroups;
pub mod table;

pub use maps::{automorphisms, hom_count, isomorphism, AutomorphismGroup};
pub use quotient::{all_quotients, coset_action, out_order, quotient, simple_power, simple_quotient_kernels, Quotient, SimplePower};
pub use subgroups::{center, ConjugacyClass, MaximalClass, Subgroup, SubgroupLattice};
pub use table::{Bitset, ElementTable};
