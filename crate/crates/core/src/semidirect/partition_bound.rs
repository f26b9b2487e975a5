use num_bigint::BigUint;
use num_traits::Pow;
use serde::Serialize;

use super::multiple_action;
use crate::error::Result;
use crate::permcore::{count_invariant_partitions, PermGroup, Permutation};

/// The counts `a_Ω`, `a_{r·Ω}` and both readings of the bound on
/// `a_{r·Ω}`: `(2|Ω|)^{r−1} a_Ω^r` and `(2|Ω|²)^{r−1} a_Ω^r`.
#[derive(Clone, Debug, Serialize)]
pub struct PartitionBoundReport {
    pub omega: usize,
    pub r: usize,
    pub a_omega: u64,
    pub a_r_omega: u64,
    #[serde(with = "crate::io::uint")]
    pub bound_linear: BigUint,
    #[serde(with = "crate::io::uint")]
    pub bound_quadratic: BigUint,
    pub holds_linear: bool,
    pub holds_quadratic: bool,
}

/// `action` lists the permutations of `Ω` induced by the generators of `X`.
pub fn partition_bound(action: &[Permutation], omega: usize, r: usize, cap: usize) -> Result<PartitionBoundReport> {
    let one = PermGroup::new(omega, action.to_vec())?;
    let many = PermGroup::new(omega * r, multiple_action(action, r))?;
    let a_omega = count_invariant_partitions(&one, &(0..omega as u32).collect::<Vec<_>>(), cap)?;
    let a_r_omega = count_invariant_partitions(&many, &(0..(omega * r) as u32).collect::<Vec<_>>(), cap)?;
    let ar = BigUint::from(a_omega).pow(r);
    let e = r.saturating_sub(1);
    let bound_linear = BigUint::from(2 * omega).pow(e) * &ar;
    let bound_quadratic = BigUint::from(2 * omega * omega).pow(e) * &ar;
    let count = BigUint::from(a_r_omega);
    Ok(PartitionBoundReport {
        omega,
        r,
        a_omega,
        a_r_omega,
        holds_linear: count <= bound_linear,
        holds_quadratic: count <= bound_quadratic,
        bound_linear,
        bound_quadratic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_four_points() {
        let c4 = vec![Permutation::from_cycles("(0 1 2 3)", 4).unwrap()];
        let r1 = partition_bound(&c4, 4, 1, 12).unwrap();
        // singletons, {02|13}, one block
        assert_eq!(r1.a_omega, 3);
        assert_eq!(r1.a_r_omega, 3);
        let r2 = partition_bound(&c4, 4, 2, 12).unwrap();
        assert!(r2.holds_linear && r2.holds_quadratic);
    }

    #[test]
    fn singleton_omega_counts_are_bell_numbers() {
        for (r, bell) in [(1, 1), (2, 2), (3, 5)] {
            let rep = partition_bound(&[], 1, r, 12).unwrap();
            assert_eq!(rep.a_r_omega, bell);
        }
        // (2·1)^2 · 1 = 4 < 5
        let rep = partition_bound(&[], 1, 3, 12).unwrap();
        assert!(!rep.holds_linear && !rep.holds_quadratic);
    }
}
