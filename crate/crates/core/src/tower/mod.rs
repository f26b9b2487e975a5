//! The iterated wreath products `L_{n+1} = L_n ⋉ L^{S_n}` acting on words
//! `S_n = D^n`.
//!
//! A word `(a_1, .., a_n)` is encoded as `Σ a_m |D|^{n-m}` (first letter most
//! significant), so the lift of `L_{n-1}` permutes contiguous blocks.

mod element;
mod witness;

pub use element::WreathElement;
pub use witness::{AbelianizationWitness, FixedPointWitness, WitnessCheck};

use num_bigint::BigUint;
use num_traits::{One, Pow};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::permcore::{PermGroup, Permutation};

/// Defining data of a tower: the base group `L` on `D` and its orbits.
#[derive(Clone, Debug)]
pub struct TowerSpec {
    base: PermGroup,
    orbits: Vec<Vec<u32>>,
}

/// Orbit of `L_n` on `S_n`, named by the word of `L`-orbit indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitSignature {
    pub word: Vec<usize>,
    pub size: BigUint,
}

impl TowerSpec {
    pub fn new(base: PermGroup) -> Result<Self> {
        if base.degree() == 0 {
            return Err(Error::input("the base group must act on at least one point"));
        }
        let orbits = base.orbits();
        Ok(TowerSpec { base, orbits })
    }

    pub fn base(&self) -> &PermGroup {
        &self.base
    }

    /// `|D|`.
    pub fn degree(&self) -> usize {
        self.base.degree()
    }

    pub fn orbits(&self) -> &[Vec<u32>] {
        &self.orbits
    }

    /// `ℓ`, the number of `L`-orbits on `D`.
    pub fn orbit_count(&self) -> usize {
        self.orbits.len()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.orbits.iter().map(|o| o.len()).collect()
    }

    /// Points fixed by every generator of `L`.
    pub fn fixed_points(&self) -> Vec<usize> {
        self.orbits.iter().filter(|o| o.len() == 1).map(|o| o[0] as usize).collect()
    }

    /// `|S_n| = |D|^n`.
    pub fn words(&self, n: usize) -> BigUint {
        BigUint::from(self.degree()).pow(n)
    }

    /// Number of leaves of the structured form at level `n`:
    /// `1 + |D| + .. + |D|^{n-1}`.
    pub fn leaf_count(&self, n: usize) -> BigUint {
        (0..n).map(|m| BigUint::from(self.degree()).pow(m)).sum()
    }

    /// `|L_n| = |L|^{1 + |D| + .. + |D|^{n-1}}`.
    pub fn level_order(&self, n: usize) -> BigUint {
        let e = self.leaf_count(n);
        let mut acc = BigUint::one();
        let l = self.base.order();
        // exponent is small at any materialisable level
        let e: u64 = e.try_into().expect("exponent fits in u64");
        for _ in 0..e {
            acc *= &l;
        }
        acc
    }

    /// The `ℓ^n` orbit signatures of `L_n` on `S_n`, in lexicographic order.
    pub fn orbit_signatures(&self, n: usize) -> Vec<OrbitSignature> {
        let sizes = self.orbit_sizes();
        let l = sizes.len();
        let total = l.pow(n as u32);
        (0..total)
            .map(|mut c| {
                let mut word = vec![0; n];
                for m in (0..n).rev() {
                    word[m] = c % l;
                    c /= l;
                }
                let size = word.iter().map(|&i| BigUint::from(sizes[i])).product();
                OrbitSignature { word, size }
            })
            .collect()
    }

    /// Point set of the orbit with the given signature, as encoded words.
    pub fn signature_points(&self, word: &[usize]) -> Vec<u32> {
        let d = self.degree() as u32;
        let mut pts = vec![0u32];
        for &i in word {
            pts = pts.iter().flat_map(|&p| self.orbits[i].iter().map(move |&a| p * d + a)).collect();
        }
        pts.sort_unstable();
        pts
    }

    /// Permutation generators of `L_n` on `D^n`: the lifted generators of
    /// `L_{n-1}` and, for every prefix `v`, each generator of `L` acting on
    /// the last letter of words starting with `v`.
    pub fn level_generators(&self, n: usize, degree_cap: usize) -> Result<Vec<Permutation>> {
        let d = self.degree();
        let size = self.words(n);
        if size > BigUint::from(degree_cap) {
            return Err(Error::cap(format!("tower level {n} on {size} points"), format!("degree = {degree_cap}")));
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut gens: Vec<Permutation> = self.base.generators().to_vec();
        let mut deg = d;
        for _ in 1..n {
            let next = deg * d;
            let mut lifted: Vec<Permutation> = gens
                .iter()
                .map(|g| {
                    let images = (0..next).map(|p| (g.apply(p / d) * d + p % d) as u32).collect();
                    Permutation::from_images_unchecked(images)
                })
                .collect();
            for v in 0..deg {
                for s in self.base.generators() {
                    let mut images: Vec<u32> = (0..next as u32).collect();
                    for j in 0..d {
                        images[v * d + j] = (v * d + s.apply(j)) as u32;
                    }
                    lifted.push(Permutation::from_images_unchecked(images));
                }
            }
            gens = lifted;
            deg = next;
        }
        Ok(gens)
    }

    /// `L_n` as a permutation group on `D^n`.
    pub fn build_level(&self, n: usize, degree_cap: usize) -> Result<PermGroup> {
        if n == 0 {
            return Ok(PermGroup::trivial(1).with_name("L_0"));
        }
        let deg = self.degree().pow(n as u32);
        Ok(PermGroup::new(deg, self.level_generators(n, degree_cap)?)?.with_name(format!("L_{n}")))
    }

    /// The structured elements matching [`TowerSpec::level_generators`] one
    /// for one.
    pub fn structured_generators(&self, n: usize) -> Vec<WreathElement> {
        if n == 0 {
            return Vec::new();
        }
        let d = self.degree();
        let mut gens: Vec<WreathElement> =
            self.base.generators().iter().map(|s| WreathElement::from_layers(vec![vec![s.clone()]])).collect();
        for m in 1..n {
            let leaves = d.pow(m as u32);
            let mut next: Vec<WreathElement> = gens.iter().map(|g| g.lift(d)).collect();
            for v in 0..leaves {
                for s in self.base.generators() {
                    let mut e = WreathElement::identity(d, m + 1);
                    e.layers_mut()[m][v] = s.clone();
                    next.push(e);
                }
            }
            gens = next;
        }
        gens
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a5_spec() -> TowerSpec {
        TowerSpec::new(PermGroup::from_cycles(5, &["(0 1 2 3 4)", "(0 1 2)"]).unwrap()).unwrap()
    }

    #[test]
    fn level_orders() {
        let spec = a5_spec();
        assert_eq!(spec.build_level(1, 10_000).unwrap().order(), BigUint::from(60u32));
        let l2 = spec.build_level(2, 10_000).unwrap();
        assert_eq!(l2.order(), BigUint::from(60u32).pow(6u32));
        assert!(l2.is_transitive());
        assert_eq!(spec.level_order(2), l2.order());
        assert!(spec.build_level(7, 10_000).is_err());
    }

    #[test]
    fn orbit_signatures_match_level_orbits() {
        // two orbits of sizes 2 and 3
        let l = PermGroup::from_cycles(5, &["(0 1)", "(2 3 4)"]).unwrap();
        let spec = TowerSpec::new(l).unwrap();
        for n in 1..=3 {
            let g = spec.build_level(n, 10_000).unwrap();
            let mut orbits = g.orbits();
            orbits.sort();
            let mut expected: Vec<Vec<u32>> =
                spec.orbit_signatures(n).iter().map(|s| spec.signature_points(&s.word)).collect();
            expected.sort();
            assert_eq!(orbits, expected);
            for s in spec.orbit_signatures(n) {
                assert!(s.size >= BigUint::from(2u32).pow(n) && s.size <= BigUint::from(5u32).pow(n));
            }
        }
    }

    #[test]
    fn structured_generators_match_permutations() {
        let spec = a5_spec();
        for n in 1..=3 {
            let perms = spec.level_generators(n, 10_000).unwrap();
            let st: Vec<Permutation> = spec.structured_generators(n).iter().map(|e| e.to_permutation()).collect();
            assert_eq!(perms, st);
        }
    }
}
