use std::collections::VecDeque;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::chain::StabilizerChain;
use super::perm::Permutation;
use crate::error::{Error, Result};

/// A permutation group given by generators. The stabilizer chain is built
/// lazily on first use and shared afterwards.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    name: Option<String>,
    chain: OnceLock<Arc<StabilizerChain>>,
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermGroup")
            .field("name", &self.name)
            .field("degree", &self.degree)
            .field("generators", &self.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>())
            .finish()
    }
}

/// Outcome of a perfection test, carrying the derived subgroup as witness.
#[derive(Clone, Debug)]
pub struct PerfectionReport {
    pub perfect: bool,
    pub order: BigUint,
    pub derived: PermGroup,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::input(format!(
                    "generator {g} has degree {} but the group has degree {degree}",
                    g.degree()
                )));
            }
        }
        // identities carry no information and only slow down Schreier–Sims
        let generators = generators.into_iter().filter(|g| !g.is_identity()).collect();
        Ok(PermGroup { degree, generators, name: None, chain: OnceLock::new() })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup { degree, generators: Vec::new(), name: None, chain: OnceLock::new() }
    }

    /// Build from cycle strings, e.g. `["(0 1 2 3 4)", "(0 1 2)"]`.
    pub fn from_cycles(degree: usize, gens: &[&str]) -> Result<Self> {
        let gens = gens.iter().map(|s| Permutation::from_cycles(s, degree)).collect::<Result<_>>()?;
        PermGroup::new(degree, gens)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Attach a chain that was built elsewhere (e.g. loaded from cache). The
    /// generators must be members, which is checked.
    pub fn with_chain(self, chain: StabilizerChain) -> Result<Self> {
        if chain.degree() != self.degree {
            return Err(Error::input("chain degree mismatch"));
        }
        for g in &self.generators {
            if !chain.contains(g)? {
                return Err(Error::invariant(format!("generator {g} fails membership in supplied chain")));
            }
        }
        let _ = self.chain.set(Arc::new(chain));
        Ok(self)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.degree)
    }

    pub fn chain(&self) -> &StabilizerChain {
        self.chain.get_or_init(|| Arc::new(StabilizerChain::new(self.degree, &self.generators)))
    }

    pub fn chain_arc(&self) -> Arc<StabilizerChain> {
        self.chain();
        self.chain.get().expect("initialised above").clone()
    }

    pub fn order(&self) -> BigUint {
        self.chain().order()
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.chain().order_u64()
    }

    /// Order as usize, failing with a cap error above `cap`.
    pub fn order_capped(&self, cap: usize, what: &str) -> Result<usize> {
        match self.order().to_usize() {
            Some(n) if n <= cap => Ok(n),
            _ => Err(Error::cap(format!("{what}: group order {} too large", self.order()), cap)),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn contains(&self, g: &Permutation) -> Result<bool> {
        self.chain().contains(g)
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        self.chain().random_element(rng)
    }

    /// All elements, sorted. Fails above `cap`.
    pub fn elements(&self, cap: usize) -> Result<Vec<Permutation>> {
        self.order_capped(cap, "element enumeration")?;
        let mut e = self.chain().elements();
        e.sort();
        Ok(e)
    }

    pub fn orbit(&self, p: usize) -> Result<Vec<u32>> {
        if p >= self.degree {
            return Err(Error::input(format!("point {p} out of range for degree {}", self.degree)));
        }
        let mut seen = vec![false; self.degree];
        seen[p] = true;
        let mut out = vec![p as u32];
        let mut k = 0;
        while k < out.len() {
            let x = out[k] as usize;
            for g in &self.generators {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y as u32);
                }
            }
            k += 1;
        }
        out.sort_unstable();
        Ok(out)
    }

    /// The orbit partition, each orbit sorted, orbits ordered by least point.
    pub fn orbits(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for p in 0..self.degree {
            if !seen[p] {
                let o = self.orbit(p).expect("in range");
                for &x in &o {
                    seen[x as usize] = true;
                }
                out.push(o);
            }
        }
        out
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || self.orbit(0).map(|o| o.len() == self.degree).unwrap_or(false)
    }

    pub fn is_abelian(&self) -> bool {
        let g = &self.generators;
        (0..g.len()).all(|i| (i + 1..g.len()).all(|j| g[i].compose(&g[j]) == g[j].compose(&g[i])))
    }

    pub fn subgroup(&self, gens: Vec<Permutation>) -> Result<PermGroup> {
        PermGroup::new(self.degree, gens)
    }

    /// Is `self` a subgroup of `other`? Checked on generators.
    pub fn is_subgroup_of(&self, other: &PermGroup) -> Result<bool> {
        for g in &self.generators {
            if !other.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Smallest normal subgroup of `self` containing `seeds`.
    pub fn normal_closure(&self, seeds: &[Permutation]) -> PermGroup {
        let mut chain = StabilizerChain::trivial(self.degree);
        let mut gens = Vec::new();
        let mut queue: VecDeque<Permutation> = seeds.iter().cloned().collect();
        while let Some(c) = queue.pop_front() {
            if chain.add_generator(&c) {
                for g in &self.generators {
                    queue.push_back(g.conjugate(&c));
                }
                gens.push(c);
            }
        }
        let group = PermGroup::new(self.degree, gens).expect("degrees match");
        let _ = group.chain.set(Arc::new(chain));
        group
    }

    /// Derived subgroup: normal closure of the pairwise generator commutators.
    pub fn derived_subgroup(&self) -> PermGroup {
        let g = &self.generators;
        let mut comms = Vec::new();
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                let c = Permutation::commutator(&g[i], &g[j]);
                if !c.is_identity() {
                    comms.push(c);
                }
            }
        }
        self.normal_closure(&comms)
    }

    pub fn is_perfect(&self) -> PerfectionReport {
        let derived = self.derived_subgroup();
        let order = derived.order();
        PerfectionReport { perfect: order == self.order(), order, derived }
    }

    /// Pointwise stabilizer of `points`, read off a chain with those points
    /// as base prefix.
    pub fn pointwise_stabilizer(&self, points: &[usize]) -> Result<PermGroup> {
        if let Some(&p) = points.iter().find(|&&p| p >= self.degree) {
            return Err(Error::input(format!("point {p} out of range for degree {}", self.degree)));
        }
        let chain = StabilizerChain::with_base_prefix(self.degree, &self.generators, points);
        let gens = chain.stabilizer_generators(points.len());
        PermGroup::new(self.degree, gens)
    }

    pub fn stabilizer(&self, point: usize) -> Result<PermGroup> {
        self.pointwise_stabilizer(&[point])
    }

    /// The action on an invariant subset, relabelled by position.
    pub fn restrict(&self, points: &[u32]) -> Result<PermGroup> {
        let gens = self.generators.iter().map(|g| g.restrict(points)).collect::<Result<Vec<_>>>()?;
        PermGroup::new(points.len(), gens)
    }

    /// Remove generators that are products of the earlier ones.
    pub fn reduced_generators(&self) -> Vec<Permutation> {
        let mut chain = StabilizerChain::trivial(self.degree);
        let mut out = Vec::new();
        for g in &self.generators {
            if chain.add_generator(g) {
                out.push(g.clone());
            }
        }
        out
    }

    pub fn description(&self) -> GroupDescription {
        GroupDescription {
            degree: self.degree,
            generators: self.generators.iter().map(|g| GeneratorSpec::Images(g.images().to_vec())).collect(),
            name: self.name.clone(),
        }
    }
}

/// A generator as it appears in a group file: either an image array or a
/// cycle-notation string.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum GeneratorSpec {
    Images(Vec<u32>),
    Cycles(String),
}

/// The JSON group description: `{ "degree": n, "generators": [...], "name": .. }`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupDescription {
    pub degree: usize,
    pub generators: Vec<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl GroupDescription {
    pub fn to_group(&self) -> Result<PermGroup> {
        let gens = self
            .generators
            .iter()
            .map(|g| match g {
                GeneratorSpec::Images(v) => {
                    if v.len() != self.degree {
                        return Err(Error::input(format!(
                            "generator of length {} in a group of degree {}",
                            v.len(),
                            self.degree
                        )));
                    }
                    Permutation::from_images(v.clone())
                }
                GeneratorSpec::Cycles(s) => Permutation::from_cycles(s, self.degree),
            })
            .collect::<Result<Vec<_>>>()?;
        let g = PermGroup::new(self.degree, gens)?;
        Ok(match &self.name {
            Some(n) => g.with_name(n.clone()),
            None => g,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn a5() -> PermGroup {
        PermGroup::from_cycles(5, &["(0 1 2 3 4)", "(0 1 2)"]).unwrap()
    }

    #[test]
    fn orbits_of_fixtures() {
        assert_eq!(a5().orbit(0).unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(PermGroup::trivial(3).orbit(2).unwrap(), vec![2]);
        let a5_6 = PermGroup::from_cycles(6, &["(0 1 2 3 4)", "(0 1 2)"]).unwrap();
        assert_eq!(a5_6.orbit(5).unwrap(), vec![5]);
        assert_eq!(a5_6.orbits().len(), 2);
        assert!(a5().orbit(5).is_err());
    }

    #[test]
    fn perfection() {
        assert!(a5().is_perfect().perfect);
        assert!(!PermGroup::from_cycles(2, &["(0 1)"]).unwrap().is_perfect().perfect);
        let s3 = PermGroup::from_cycles(3, &["(0 1 2)", "(0 1)"]).unwrap();
        let r = s3.is_perfect();
        assert!(!r.perfect);
        assert_eq!(r.order, BigUint::from(3u32));
        assert!(PermGroup::trivial(4).is_perfect().perfect);
    }

    #[test]
    fn stabilizers() {
        let a6 = PermGroup::from_cycles(6, &["(0 1 2 3 4)", "(1 2 3 4 5)"]).unwrap();
        assert_eq!(a6.order(), BigUint::from(360u32));
        assert_eq!(a6.stabilizer(0).unwrap().order(), BigUint::from(60u32));
        let psl = PermGroup::from_cycles(6, &["(0 1 2 3 4)", "(0 5)(1 4)"]).unwrap();
        assert_eq!(psl.order(), BigUint::from(60u32));
        assert_eq!(psl.stabilizer(0).unwrap().order(), BigUint::from(10u32));
    }

    #[test]
    fn sampling_is_deterministic_and_in_group() {
        let g = a5();
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x = g.random_element(&mut r1);
            assert!(g.contains(&x).unwrap());
            assert_eq!(x, g.random_element(&mut r2));
        }
    }

    #[test]
    fn description_parses_both_generator_forms() {
        let json = r#"{"degree":5,"generators":[[1,2,3,4,0],"(0 1 2)"],"name":"A5"}"#;
        let d: GroupDescription = serde_json::from_str(json).unwrap();
        let g = d.to_group().unwrap();
        assert_eq!(g.order(), BigUint::from(60u32));
        assert_eq!(g.name(), Some("A5"));
        let bad = r#"{"degree":4,"generators":[[1,2,3,4,0]]}"#;
        let d: GroupDescription = serde_json::from_str(bad).unwrap();
        assert!(d.to_group().is_err());
    }
}
