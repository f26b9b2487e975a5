use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::permcore::{PermGroup, Permutation};

/// Multiplication table of a small group. Elements are sorted, so index 0
/// is the identity (the image array `0..n` is lexicographically smallest).
#[derive(Clone, Debug)]
pub struct ElementTable {
    elements: Vec<Permutation>,
    index: HashMap<Permutation, u32>,
    mul: Vec<u16>,
    inv: Vec<u32>,
    orders: Vec<u32>,
    gens: Vec<u32>,
}

impl ElementTable {
    pub fn new(g: &PermGroup, cap: usize) -> Result<Self> {
        let cap = cap.min(u16::MAX as usize);
        let elements = g.elements(cap)?;
        let n = elements.len();
        let index: HashMap<Permutation, u32> =
            elements.iter().enumerate().map(|(i, e)| (e.clone(), i as u32)).collect();
        let gens: Vec<u32> = g.generators().iter().map(|x| index[x]).collect();

        // left multiplication by each generator as an index map
        let left: Vec<Vec<u32>> = g
            .generators()
            .iter()
            .map(|s| elements.iter().map(|e| index[&s.compose(e)]).collect())
            .collect();

        // rows by BFS: a = s·a' gives row(a)[b] = left_s[row(a')[b]]
        let mut mul = vec![0u16; n * n];
        let mut done = vec![false; n];
        for b in 0..n {
            mul[b] = b as u16;
        }
        done[0] = true;
        let mut queue = vec![0usize];
        let mut k = 0;
        while k < queue.len() {
            let a = queue[k];
            k += 1;
            for l in &left {
                let c = l[a] as usize;
                if !done[c] {
                    done[c] = true;
                    for b in 0..n {
                        mul[c * n + b] = l[mul[a * n + b] as usize] as u16;
                    }
                    queue.push(c);
                }
            }
        }
        if queue.len() != n {
            return Err(Error::invariant("generators do not reach every element"));
        }
        let mut inv = vec![0u32; n];
        for a in 0..n {
            for b in 0..n {
                if mul[a * n + b] == 0 {
                    inv[a] = b as u32;
                    break;
                }
            }
        }
        let mut orders = vec![1u32; n];
        for (a, o) in orders.iter_mut().enumerate() {
            let mut x = a;
            while x != 0 {
                x = mul[x * n + a] as usize;
                *o += 1;
            }
        }
        Ok(ElementTable { elements, index, mul, inv, orders, gens })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, i: usize) -> &Permutation {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).map(|&i| i as usize)
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.len() + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn element_order(&self, a: usize) -> u32 {
        self.orders[a]
    }

    /// Indices of the parent group's generators.
    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    /// `g a g⁻¹` for every `a`, as an index map.
    pub fn conjugation_map(&self, g: usize) -> Vec<u32> {
        let gi = self.inv(g);
        (0..self.len()).map(|a| self.mul(self.mul(g, a), gi) as u32).collect()
    }

    /// Subgroup generated by `gens`, as a bitset.
    pub fn closure(&self, gens: &[usize]) -> Bitset {
        let mut bits = Bitset::new(self.len());
        bits.insert(0);
        let mut list = vec![0usize];
        let mut k = 0;
        while k < list.len() {
            let a = list[k];
            k += 1;
            for &g in gens {
                let c = self.mul(a, g);
                if !bits.contains(c) {
                    bits.insert(c);
                    list.push(c);
                }
            }
        }
        bits
    }

    /// `⟨H, x⟩` for a subgroup `H` given by its bitset.
    pub fn join_element(&self, h: &Bitset, x: usize) -> Bitset {
        // H is closed, so each new element brings its whole coset c·H
        let members: Vec<usize> = h.iter().collect();
        let mut bits = h.clone();
        let mut list = members.clone();
        let mut k = 0;
        while k < list.len() {
            let a = list[k];
            k += 1;
            let c = self.mul(a, x);
            if !bits.contains(c) {
                // the whole coset c·H lies in the join
                for &m in &members {
                    let d = self.mul(c, m);
                    if !bits.contains(d) {
                        bits.insert(d);
                        list.push(d);
                    }
                }
            }
        }
        bits
    }

    /// Generators (parent-group permutations) of a subgroup bitset, reduced
    /// greedily.
    pub fn subgroup_generators(&self, bits: &Bitset) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = Bitset::new(self.len());
        span.insert(0);
        for a in bits.iter() {
            if !span.contains(a) {
                gens.push(a);
                span = self.join_element(&span, a);
                if span.count() == bits.count() {
                    break;
                }
            }
        }
        gens
    }

    pub fn to_group(&self, bits: &Bitset, degree: usize) -> PermGroup {
        let gens = self.subgroup_generators(bits).into_iter().map(|i| self.elements[i].clone()).collect();
        PermGroup::new(degree, gens).expect("elements share the degree")
    }
}

/// Fixed-size bitset over element indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitset {
    words: Vec<u64>,
}

impl Bitset {
    pub fn new(n: usize) -> Self {
        Bitset { words: vec![0; n.div_ceil(64)] }
    }

    pub fn from_indices(n: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut b = Bitset::new(n);
        for i in idx {
            b.insert(i);
        }
        b
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &Bitset) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &Bitset) -> Bitset {
        Bitset { words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect() }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + t)
                }
            })
        })
    }

    /// Image under an index map.
    pub fn map(&self, n: usize, f: &[u32]) -> Bitset {
        let mut b = Bitset::new(n);
        for i in self.iter() {
            b.insert(f[i] as usize);
        }
        b
    }
}
