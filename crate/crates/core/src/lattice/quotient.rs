use super::maps::automorphisms;
use super::subgroups::SubgroupLattice;
use super::table::{Bitset, ElementTable};
use crate::error::Result;
use crate::permcore::{PermGroup, Permutation};

/// Action of the elements `acting` on the left cosets `xH` of `sub`, with
/// cosets numbered by their least element.
pub fn coset_action(table: &ElementTable, sub: &Bitset, acting: &[usize]) -> Vec<Permutation> {
    let n = table.len();
    let mut coset_of = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for x in 0..n {
        if coset_of[x] == usize::MAX {
            let c = reps.len();
            reps.push(x);
            for h in sub.iter() {
                coset_of[table.mul(x, h)] = c;
            }
        }
    }
    acting
        .iter()
        .map(|&g| {
            let images = reps.iter().map(|&r| coset_of[table.mul(g, r)] as u32).collect();
            Permutation::from_images(images).expect("coset action is a permutation")
        })
        .collect()
}

/// A quotient `G/K` by a normal subgroup, realised as the coset action.
#[derive(Clone, Debug)]
pub struct Quotient {
    /// Lattice index of the kernel `K`.
    pub kernel: usize,
    pub group: PermGroup,
    /// Images of the parent generators, in order.
    pub generator_images: Vec<Permutation>,
}

impl Quotient {
    pub fn order(&self) -> usize {
        self.group.order_u64().expect("small") as usize
    }
}

pub fn quotient(lattice: &SubgroupLattice, kernel: usize) -> Quotient {
    let t = lattice.table();
    let gens: Vec<usize> = t.generators().iter().map(|&g| g as usize).collect();
    let images = coset_action(t, &lattice.subgroups()[kernel].bits, &gens);
    let degree = lattice.order() / lattice.subgroups()[kernel].order;
    let group = PermGroup::new(degree, images.clone()).expect("coset degree");
    Quotient { kernel, group, generator_images: images }
}

/// Quotients by every normal subgroup, ordered by kernel index.
pub fn all_quotients(lattice: &SubgroupLattice) -> Vec<Quotient> {
    lattice.normal_subgroups().into_iter().map(|k| quotient(lattice, k)).collect()
}

/// Kernels of the simple quotients: proper normal subgroups maximal among
/// normal subgroups.
pub fn simple_quotient_kernels(lattice: &SubgroupLattice) -> Vec<usize> {
    let normals = lattice.normal_subgroups();
    let whole = lattice.whole();
    normals
        .iter()
        .copied()
        .filter(|&k| k != whole)
        .filter(|&k| !normals.iter().any(|&m| m != k && m != whole && lattice.includes(m, k)))
        .collect()
}

/// Decomposition of a group as `T^r` with `T` non-abelian simple.
#[derive(Clone, Debug)]
pub struct SimplePower {
    pub factor_order: usize,
    pub r: usize,
    /// One factor `T`, as a subgroup of the group examined.
    pub factor: PermGroup,
}

/// Decide whether `g` is a direct power of a non-abelian simple group: its
/// minimal normal subgroups must be simple, non-abelian, of equal order, and
/// their orders must multiply to `|g|`. Factors of equal order are treated
/// as isomorphic, which holds for every group within lattice caps.
pub fn simple_power(g: &PermGroup, cap: usize) -> Result<Option<SimplePower>> {
    if g.is_trivial() {
        return Ok(None);
    }
    let lat = SubgroupLattice::build(g, cap)?;
    let normals = lat.normal_subgroups();
    let minimal: Vec<usize> = normals
        .iter()
        .copied()
        .filter(|&k| k != lat.trivial())
        .filter(|&k| !normals.iter().any(|&m| m != k && m != lat.trivial() && lat.includes(k, m)))
        .collect();
    let first_order = lat.subgroups()[minimal[0]].order;
    let mut product = 1usize;
    for &m in &minimal {
        let order = lat.subgroups()[m].order;
        if order != first_order {
            return Ok(None);
        }
        let t = lat.subgroup_group(m);
        if t.is_abelian() || SubgroupLattice::build(&t, cap)?.normal_subgroups().len() != 2 {
            return Ok(None);
        }
        product = product.saturating_mul(order);
    }
    if product != lat.order() {
        return Ok(None);
    }
    Ok(Some(SimplePower { factor_order: first_order, r: minimal.len(), factor: lat.subgroup_group(minimal[0]) }))
}

/// `|Out(G)|` by brute-force automorphism search.
pub fn out_order(g: &PermGroup, cap: usize) -> Result<usize> {
    Ok(automorphisms(g, cap)?.out_order())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s4_quotients() {
        let s4 = PermGroup::from_cycles(4, &["(0 1 2 3)", "(0 1)"]).unwrap();
        let lat = SubgroupLattice::build(&s4, 2000).unwrap();
        let mut orders: Vec<usize> = all_quotients(&lat).iter().map(|q| q.order()).collect();
        orders.sort();
        assert_eq!(orders, vec![1, 2, 6, 24]);
        let simple = simple_quotient_kernels(&lat);
        assert_eq!(simple.len(), 1);
        assert_eq!(lat.subgroups()[simple[0]].order, 12);
    }

    #[test]
    fn simple_powers() {
        let a5 = PermGroup::from_cycles(5, &["(0 1 2 3 4)", "(0 1 2)"]).unwrap();
        let sp = simple_power(&a5, 2000).unwrap().unwrap();
        assert_eq!((sp.factor_order, sp.r), (60, 1));
        let a5a5 = PermGroup::from_cycles(10, &["(0 1 2 3 4)", "(0 1 2)", "(5 6 7 8 9)", "(5 6 7)"]).unwrap();
        let sp = simple_power(&a5a5, 4000).unwrap().unwrap();
        assert_eq!((sp.factor_order, sp.r), (60, 2));
        let s3 = PermGroup::from_cycles(3, &["(0 1 2)", "(0 1)"]).unwrap();
        assert!(simple_power(&s3, 2000).unwrap().is_none());
        let s5 = PermGroup::from_cycles(5, &["(0 1 2 3 4)", "(0 1)"]).unwrap();
        assert!(simple_power(&s5, 2000).unwrap().is_none());
        assert_eq!(out_order(&a5, 2000).unwrap(), 2);
    }
}
