use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::perm::Permutation;
use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

/// One level of a stabilizer chain: the basic orbit of `base` under the
/// level generators, together with coset representatives `u` satisfying
/// `u(base) = orbit point`.
#[derive(Clone, Debug)]
pub struct Level {
    base: u32,
    gens: Vec<Permutation>,
    orbit: Vec<u32>,
    index: Vec<u32>,
    transversal: Vec<Permutation>,
    inverse: Vec<Permutation>,
    // checked[k] = number of generators already paired with orbit[k] whose
    // Schreier generator is known to lie in the next level's group
    checked: Vec<usize>,
}

impl Level {
    fn new(base: u32, degree: usize) -> Self {
        let mut index = vec![NONE; degree];
        index[base as usize] = 0;
        Level {
            base,
            gens: Vec::new(),
            orbit: vec![base],
            index,
            transversal: vec![Permutation::identity(degree)],
            inverse: vec![Permutation::identity(degree)],
            checked: vec![0],
        }
    }

    pub fn base(&self) -> usize {
        self.base as usize
    }

    pub fn orbit(&self) -> &[u32] {
        &self.orbit
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.gens
    }

    /// Coset representative mapping the base point to `p`, if `p` lies in
    /// the basic orbit.
    pub fn representative(&self, p: usize) -> Option<&Permutation> {
        match self.index[p] {
            NONE => None,
            k => Some(&self.transversal[k as usize]),
        }
    }

    fn extend_orbit(&mut self) {
        let mut k = 0;
        while k < self.orbit.len() {
            let p = self.orbit[k] as usize;
            for g in &self.gens {
                let q = g.apply(p);
                if self.index[q] == NONE {
                    let u = g.compose(&self.transversal[k]);
                    self.index[q] = self.orbit.len() as u32;
                    self.orbit.push(q as u32);
                    self.inverse.push(u.inverse());
                    self.transversal.push(u);
                    self.checked.push(0);
                }
            }
            k += 1;
        }
    }
}

/// Base and strong generating set built by the deterministic incremental
/// Schreier–Sims algorithm.
#[derive(Clone, Debug)]
pub struct StabilizerChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabilizerChain {
    pub fn trivial(degree: usize) -> Self {
        StabilizerChain { degree, levels: Vec::new() }
    }

    pub fn new(degree: usize, gens: &[Permutation]) -> Self {
        Self::with_base_prefix(degree, gens, &[])
    }

    /// Build a chain whose base starts with `prefix`. Point stabilizers are
    /// then read off the levels directly.
    pub fn with_base_prefix(degree: usize, gens: &[Permutation], prefix: &[usize]) -> Self {
        let mut chain = StabilizerChain {
            degree,
            levels: prefix.iter().map(|&b| Level::new(b as u32, degree)).collect(),
        };
        for g in gens {
            chain.add_generator(g);
        }
        chain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base()).collect()
    }

    /// Strong generators: union of all level generator lists.
    pub fn strong_generators(&self) -> Vec<Permutation> {
        // S_{i+1} ⊆ S_i is not guaranteed, so collect from every level
        let mut out: Vec<Permutation> = Vec::new();
        for l in &self.levels {
            for g in &l.gens {
                if !out.contains(g) {
                    out.push(g.clone());
                }
            }
        }
        out
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::from(1u32), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    /// Order as a machine integer, or `None` on overflow.
    pub fn order_u64(&self) -> Option<u64> {
        self.levels.iter().try_fold(1u64, |acc, l| acc.checked_mul(l.orbit.len() as u64))
    }

    pub fn basic_orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    /// Strip `g` through levels `start..`. Returns `None` when `g` reduces to
    /// the identity, otherwise the level where it got stuck (or the number of
    /// levels when it passed them all) and the partially stripped element.
    fn sift_from(&self, mut g: Permutation, start: usize) -> Option<(usize, Permutation)> {
        for (i, level) in self.levels.iter().enumerate().skip(start) {
            let k = level.index[g.apply(level.base as usize)];
            if k == NONE {
                return Some((i, g));
            }
            if k != 0 {
                g = level.inverse[k as usize].compose(&g);
            }
        }
        if g.is_identity() {
            None
        } else {
            Some((self.levels.len(), g))
        }
    }

    /// Residue of `g` after stripping through the chain; the identity exactly
    /// when `g` is a member.
    pub fn sift(&self, g: &Permutation) -> Permutation {
        self.sift_from(g.clone(), 0)
            .map(|(_, r)| r)
            .unwrap_or_else(|| Permutation::identity(self.degree))
    }

    pub fn contains(&self, g: &Permutation) -> Result<bool> {
        if g.degree() != self.degree {
            return Err(Error::input(format!(
                "degree mismatch: permutation of degree {} vs group of degree {}",
                g.degree(),
                self.degree
            )));
        }
        Ok(self.sift_from(g.clone(), 0).is_none())
    }

    /// Add `g` to the group, completing the chain. Returns false when `g` was
    /// already a member.
    pub fn add_generator(&mut self, g: &Permutation) -> bool {
        assert_eq!(g.degree(), self.degree, "generator degree mismatch");
        match self.sift_from(g.clone(), 0) {
            None => false,
            Some((j, r)) => {
                self.insert(r, 0, j);
                self.complete(j);
                true
            }
        }
    }

    fn insert(&mut self, r: Permutation, from: usize, j: usize) {
        if j == self.levels.len() {
            let b = r.support_min().expect("nontrivial residue moves a point");
            self.levels.push(Level::new(b as u32, self.degree));
        }
        for level in &mut self.levels[from..=j] {
            level.gens.push(r.clone());
            level.extend_orbit();
        }
    }

    fn complete(&mut self, top: usize) {
        let mut i = top as isize;
        'outer: while i >= 0 {
            let li = i as usize;
            let mut k = 0;
            while k < self.levels[li].orbit.len() {
                while self.levels[li].checked[k] < self.levels[li].gens.len() {
                    let level = &self.levels[li];
                    let s = &level.gens[level.checked[k]];
                    let img = s.apply(level.orbit[k] as usize);
                    let q = level.index[img] as usize;
                    let h = level.inverse[q].compose(&s.compose(&level.transversal[k]));
                    self.levels[li].checked[k] += 1;
                    if let Some((j, r)) = self.sift_from(h, li + 1) {
                        self.insert(r, li + 1, j);
                        i = j as isize;
                        continue 'outer;
                    }
                }
                k += 1;
            }
            i -= 1;
        }
    }

    /// Uniform random element: one uniform transversal pick per level.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        let mut g = Permutation::identity(self.degree);
        for level in &self.levels {
            let k = rng.random_range(0..level.orbit.len());
            g = g.compose(&level.transversal[k]);
        }
        g
    }

    /// All elements, in the order given by the transversal product. Caller is
    /// responsible for checking the order against a cap first.
    pub fn elements(&self) -> Vec<Permutation> {
        let mut out = vec![Permutation::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for u in &level.transversal {
                for g in &out {
                    next.push(u.compose(g));
                }
            }
            out = next;
        }
        out
    }

    /// Generators of the pointwise stabilizer of the first `depth` base
    /// points.
    pub fn stabilizer_generators(&self, depth: usize) -> Vec<Permutation> {
        if depth < self.levels.len() {
            self.levels[depth].gens.clone()
        } else {
            Vec::new()
        }
    }

    pub fn to_record(&self) -> ChainRecord {
        ChainRecord {
            degree: self.degree,
            base: self.base(),
            strong_generators: self.strong_generators(),
            order: self.order().to_string(),
        }
    }

    /// Rebuild from a stored record. The strong generators are fed through
    /// Schreier–Sims again with the stored base as prefix, and the resulting
    /// order must match the record.
    pub fn from_record(rec: &ChainRecord) -> Result<Self> {
        let chain = Self::with_base_prefix(rec.degree, &rec.strong_generators, &rec.base);
        if chain.order().to_string() != rec.order {
            return Err(Error::invariant(format!(
                "cached chain order {} disagrees with rebuilt order {}",
                rec.order,
                chain.order()
            )));
        }
        Ok(chain)
    }
}

/// Serializable form of a chain.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ChainRecord {
    pub degree: usize,
    pub base: Vec<usize>,
    pub strong_generators: Vec<Permutation>,
    pub order: String,
}
