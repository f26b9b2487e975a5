use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::table::{Bitset, ElementTable};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::permcore::PermGroup;

#[derive(Clone, Debug)]
pub struct Subgroup {
    pub bits: Bitset,
    pub order: usize,
    pub class: usize,
}

#[derive(Clone, Debug)]
pub struct ConjugacyClass {
    /// Subgroup indices, the canonical representative first.
    pub members: Vec<usize>,
    pub order: usize,
    pub mobius: i64,
    pub maximal: bool,
}

impl ConjugacyClass {
    pub fn representative(&self) -> usize {
        self.members[0]
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Every subgroup of a small group, with inclusion available through bitset
/// tests, conjugacy classes and the Möbius function `μ(H, G)`.
#[derive(Clone, Debug)]
pub struct SubgroupLattice {
    table: Arc<ElementTable>,
    degree: usize,
    subgroups: Vec<Subgroup>,
    classes: Vec<ConjugacyClass>,
}

/// One conjugacy class of maximal subgroups.
#[derive(Clone, Debug)]
pub struct MaximalClass {
    pub representative: PermGroup,
    pub order: usize,
    pub index: usize,
    pub class_size: usize,
}

impl SubgroupLattice {
    pub fn build(g: &PermGroup, cap: usize) -> Result<Self> {
        Self::build_with(g, cap, Execution::default())
    }

    pub fn build_with(g: &PermGroup, cap: usize, exec: Execution) -> Result<Self> {
        g.order_capped(cap, "subgroup lattice")?;
        let table = Arc::new(ElementTable::new(g, cap)?);
        Ok(Self::from_table(table, g.degree(), exec))
    }

    pub fn from_table(table: Arc<ElementTable>, degree: usize, exec: Execution) -> Self {
        let n = table.len();
        let cmaps: Vec<Vec<u32>> = table.generators().iter().map(|&g| table.conjugation_map(g as usize)).collect();

        // one generator per cyclic subgroup of prime-power order
        let mut cyclic: Vec<(usize, Bitset)> = Vec::new();
        let mut seen_cyclic: HashMap<Bitset, ()> = HashMap::new();
        for x in 1..n {
            if !is_prime_power(table.element_order(x)) {
                continue;
            }
            let c = table.closure(&[x]);
            if seen_cyclic.insert(c.clone(), ()).is_none() {
                cyclic.push((x, c));
            }
        }

        let mut index: HashMap<Bitset, usize> = HashMap::new();
        let mut raw: Vec<Bitset> = Vec::new();
        let mut raw_classes: Vec<Vec<usize>> = Vec::new();
        let mut add_class = |bits: Bitset, index: &mut HashMap<Bitset, usize>, raw: &mut Vec<Bitset>| -> usize {
            let mut members = vec![raw.len()];
            index.insert(bits.clone(), raw.len());
            raw.push(bits);
            let mut k = 0;
            while k < members.len() {
                let b = raw[members[k]].clone();
                for m in &cmaps {
                    let c = b.map(n, m);
                    if !index.contains_key(&c) {
                        index.insert(c.clone(), raw.len());
                        members.push(raw.len());
                        raw.push(c);
                    }
                }
                k += 1;
            }
            raw_classes.push(members);
            raw_classes.len() - 1
        };

        let mut work: Vec<usize> = Vec::new();
        let trivial = Bitset::from_indices(n, [0]);
        add_class(trivial, &mut index, &mut raw);
        work.push(0);
        for (_, c) in &cyclic {
            if !index.contains_key(c) {
                let id = raw.len();
                add_class(c.clone(), &mut index, &mut raw);
                work.push(id);
            }
        }
        let mut k = 0;
        while k < work.len() {
            let h = raw[work[k]].clone();
            k += 1;
            let joins: Vec<Option<Bitset>> = par::map(exec, &cyclic, |(x, _)| {
                if h.contains(*x) {
                    None
                } else {
                    Some(table.join_element(&h, *x))
                }
            });
            for j in joins.into_iter().flatten() {
                if !index.contains_key(&j) {
                    let id = raw.len();
                    add_class(j, &mut index, &mut raw);
                    work.push(id);
                }
            }
        }

        // canonical order: classes by (order, representative element list)
        let mut classes: Vec<(usize, Vec<usize>)> = raw_classes
            .into_iter()
            .map(|mut members| {
                members.sort_by_cached_key(|&i| raw[i].iter().collect::<Vec<_>>());
                (raw[members[0]].count(), members)
            })
            .collect();
        classes.sort_by_cached_key(|(o, m)| (*o, raw[m[0]].iter().collect::<Vec<_>>()));

        let mut subgroups = Vec::with_capacity(raw.len());
        let mut out_classes = Vec::with_capacity(classes.len());
        for (ci, (order, members)) in classes.into_iter().enumerate() {
            let ids: Vec<usize> = (subgroups.len()..subgroups.len() + members.len()).collect();
            for &m in &members {
                subgroups.push(Subgroup { bits: raw[m].clone(), order, class: ci });
            }
            out_classes.push(ConjugacyClass { members: ids, order, mobius: 0, maximal: false });
        }

        let mut lat = SubgroupLattice { table, degree, subgroups, classes: out_classes };
        lat.compute_mobius();
        lat.compute_maximal(exec);
        lat
    }

    fn compute_mobius(&mut self) {
        let top = self.classes.len() - 1;
        let mut nonzero: Vec<(usize, i64)> = Vec::new();
        for ci in (0..self.classes.len()).rev() {
            let mu = if ci == top {
                1
            } else {
                let h = &self.subgroups[self.classes[ci].representative()];
                -nonzero
                    .iter()
                    .filter(|&&(k, _)| {
                        let ko = self.subgroups[k].order;
                        ko > h.order && ko % h.order == 0 && h.bits.is_subset(&self.subgroups[k].bits)
                    })
                    .map(|&(_, m)| m)
                    .sum::<i64>()
            };
            self.classes[ci].mobius = mu;
            if mu != 0 {
                nonzero.extend(self.classes[ci].members.iter().map(|&m| (m, mu)));
            }
        }
    }

    fn compute_maximal(&mut self, exec: Execution) {
        let g = self.order();
        let subgroups = &self.subgroups;
        let flags = par::map(exec, &self.classes, |c| {
            let h = &subgroups[c.representative()];
            if h.order == g {
                return false;
            }
            !subgroups.iter().any(|k| {
                k.order > h.order && k.order < g && k.order % h.order == 0 && h.bits.is_subset(&k.bits)
            })
        });
        for (c, f) in self.classes.iter_mut().zip(flags) {
            c.maximal = f;
        }
    }

    pub fn table(&self) -> &ElementTable {
        &self.table
    }

    pub fn table_arc(&self) -> Arc<ElementTable> {
        self.table.clone()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Order of the parent group.
    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn len(&self) -> usize {
        self.subgroups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgroups.is_empty()
    }

    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    pub fn classes(&self) -> &[ConjugacyClass] {
        &self.classes
    }

    pub fn trivial(&self) -> usize {
        0
    }

    pub fn whole(&self) -> usize {
        self.subgroups.len() - 1
    }

    pub fn mobius(&self, i: usize) -> i64 {
        self.classes[self.subgroups[i].class].mobius
    }

    /// Is subgroup `inner` contained in subgroup `outer`?
    pub fn includes(&self, outer: usize, inner: usize) -> bool {
        self.subgroups[inner].bits.is_subset(&self.subgroups[outer].bits)
    }

    pub fn find(&self, bits: &Bitset) -> Option<usize> {
        self.subgroups.iter().position(|s| &s.bits == bits)
    }

    pub fn subgroup_group(&self, i: usize) -> PermGroup {
        self.table.to_group(&self.subgroups[i].bits, self.degree)
    }

    pub fn is_normal(&self, i: usize) -> bool {
        self.classes[self.subgroups[i].class].size() == 1
    }

    pub fn normal_subgroups(&self) -> Vec<usize> {
        self.classes.iter().filter(|c| c.size() == 1).map(|c| c.members[0]).collect()
    }

    pub fn maximal_classes(&self) -> Vec<&ConjugacyClass> {
        self.classes.iter().filter(|c| c.maximal).collect()
    }

    pub fn maximal_subgroups(&self) -> Vec<MaximalClass> {
        self.maximal_classes()
            .into_iter()
            .map(|c| MaximalClass {
                representative: self.subgroup_group(c.representative()),
                order: c.order,
                index: self.order() / c.order,
                class_size: c.size(),
            })
            .collect()
    }

    /// `p_k(G) = Σ_H μ(H, G) (|H|/|G|)^k`, exactly.
    pub fn pk_mobius(&self, k: u32) -> BigRational {
        let g = BigInt::from(self.order()).pow(k);
        let mut num = BigInt::zero();
        for c in &self.classes {
            if c.mobius != 0 {
                num += BigInt::from(c.mobius) * BigInt::from(c.size()) * BigInt::from(c.order).pow(k);
            }
        }
        BigRational::new(num, g)
    }

    /// Check `Σ_{K ≥ H} μ(K) = 0` for every proper `H` and `μ(G) = 1`.
    pub fn verify_mobius(&self) -> Result<()> {
        if self.mobius(self.whole()) != 1 {
            return Err(Error::invariant("μ(G, G) ≠ 1"));
        }
        for h in 0..self.len() - 1 {
            let s: i64 = (0..self.len()).filter(|&k| self.includes(k, h)).map(|k| self.mobius(k)).sum();
            if s != 0 {
                return Err(Error::invariant(format!("Möbius identity fails at subgroup {h}")));
            }
        }
        Ok(())
    }

    /// Number of subgroups containing subgroup `k` (the subgroup count of
    /// the quotient when `k` is normal).
    pub fn count_overgroups(&self, k: usize) -> usize {
        (0..self.len()).filter(|&h| self.includes(h, k)).count()
    }

    /// Number of non-abelian subgroups.
    pub fn count_nonabelian(&self) -> usize {
        let t = &self.table;
        self.classes
            .iter()
            .filter(|c| {
                let bits = &self.subgroups[c.representative()].bits;
                let gens = t.subgroup_generators(bits);
                gens.iter().any(|&a| gens.iter().any(|&b| t.mul(a, b) != t.mul(b, a)))
            })
            .map(|c| c.size())
            .sum()
    }

    /// Order of the normalizer of subgroup `i`, from its class size.
    pub fn normalizer_order(&self, i: usize) -> usize {
        self.order() / self.classes[self.subgroups[i].class].size()
    }
}

fn is_prime_power(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    let mut m = n;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            return m == 1;
        }
        p += 1;
    }
    true
}

/// Centre of a group given by its table, as a bitset.
pub fn center(table: &ElementTable) -> Bitset {
    let gens = table.generators();
    Bitset::from_indices(
        table.len(),
        (0..table.len()).filter(|&z| gens.iter().all(|&g| table.mul(z, g as usize) == table.mul(g as usize, z))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(degree: usize, gens: &[&str]) -> SubgroupLattice {
        SubgroupLattice::build(&PermGroup::from_cycles(degree, gens).unwrap(), 2000).unwrap()
    }

    #[test]
    fn subgroup_counts() {
        assert_eq!(lat(3, &["(0 1 2)", "(0 1)"]).len(), 6);
        assert_eq!(lat(4, &["(0 1 2 3)"]).len(), 3);
        let a5 = lat(5, &["(0 1 2 3 4)", "(0 1 2)"]);
        assert_eq!(a5.len(), 59);
        assert_eq!(a5.classes().len(), 9);
        // S4 has 30 subgroups in 11 classes
        let s4 = lat(4, &["(0 1 2 3)", "(0 1)"]);
        assert_eq!(s4.len(), 30);
        assert_eq!(s4.classes().len(), 11);
    }

    #[test]
    fn maximal_classes() {
        let a5 = lat(5, &["(0 1 2 3 4)", "(0 1 2)"]);
        let mut idx: Vec<usize> = a5.maximal_subgroups().iter().map(|m| m.index).collect();
        idx.sort();
        assert_eq!(idx, vec![5, 6, 10]);
        let c6 = lat(6, &["(0 1 2 3 4 5)"]);
        let mut idx: Vec<usize> = c6.maximal_subgroups().iter().map(|m| m.index).collect();
        idx.sort();
        assert_eq!(idx, vec![2, 3]);
        let s3 = lat(3, &["(0 1 2)", "(0 1)"]);
        let mut shape: Vec<(usize, usize)> = s3.maximal_subgroups().iter().map(|m| (m.order, m.class_size)).collect();
        shape.sort();
        assert_eq!(shape, vec![(2, 3), (3, 1)]);
    }

    #[test]
    fn mobius_identity_and_pk() {
        for l in [
            lat(3, &["(0 1 2)", "(0 1)"]),
            lat(4, &["(0 1)(2 3)", "(0 2)(1 3)"]),
            lat(5, &["(0 1 2 3 4)", "(0 1 2)"]),
            lat(4, &["(0 1 2 3)", "(0 1)"]),
        ] {
            l.verify_mobius().unwrap();
        }
        let v4 = lat(4, &["(0 1)(2 3)", "(0 2)(1 3)"]);
        assert_eq!(v4.pk_mobius(2), BigRational::new(3.into(), 8.into()));
        assert_eq!(lat(2, &["(0 1)"]).pk_mobius(1), BigRational::new(1.into(), 2.into()));
        let a5 = lat(5, &["(0 1 2 3 4)", "(0 1 2)"]);
        assert_eq!(a5.pk_mobius(2), BigRational::new(19.into(), 30.into()));
        assert_eq!(a5.mobius(a5.trivial()), -60);
    }

    #[test]
    fn quotient_subgroup_counts_and_nonabelian() {
        let a5 = lat(5, &["(0 1 2 3 4)", "(0 1 2)"]);
        assert_eq!(a5.normal_subgroups().len(), 2);
        assert_eq!(a5.count_nonabelian(), 22);
        assert_eq!(a5.count_overgroups(a5.trivial()), 59);
        assert_eq!(center(a5.table()).count(), 1);
    }
}
