//! Semidirect products `Y = X ⋉ (B_1^{Ω_1} × .. × B_t^{Ω_t})` with `X`
//! permuting coordinates, their standard normal subgroups, and the
//! constructions and classification of clean maximal subgroups surjecting
//! onto `X`.
//!
//! `Y` is realised as a permutation group on the points of `X` followed by
//! one block of `deg(B_i)` points for every `w ∈ Ω_i`. An element `(x, f)`
//! sends `(w, p)` to `(x·w, f(w)·p)`, the same left-action convention as the
//! tower.

mod classify;
mod construct;
mod partition_bound;

pub use classify::{classify_maximal, count_graph_iso_classes, CaseTag, CaseWitness, GraphIsoCount, MaximalClassReport};
pub use construct::{
    construct_graph_iso, construct_normalizer_t, construct_subdiagonal, ConstructionReport, SubdiagonalData,
    SubdiagonalReport,
};
pub use partition_bound::{partition_bound, PartitionBoundReport};

use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, Pow};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Bitset, ElementTable, SubgroupLattice};
use crate::permcore::{GroupDescription, Homomorphism, PermGroup, Permutation};

/// One factor `B^Ω`: the transitive `X`-set `Ω` (given by the images of the
/// generators of `X`) and the group `B`.
#[derive(Clone, Debug)]
pub struct Factor {
    pub omega: usize,
    pub action: Vec<Permutation>,
    pub group: PermGroup,
}

/// Validated defining data of `Y`.
#[derive(Clone, Debug)]
pub struct SemidirectSpec {
    x: PermGroup,
    factors: Vec<Factor>,
}

impl SemidirectSpec {
    /// `action[i]` lists the permutations of `Ω_i` induced by
    /// `x.generators()`, in order.
    pub fn new(x: PermGroup, factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::input("at least one factor B^Ω is required"));
        }
        for (i, f) in factors.iter().enumerate() {
            if f.omega == 0 {
                return Err(Error::input(format!("Ω_{i} is empty")));
            }
            if f.action.len() != x.generators().len() {
                return Err(Error::input(format!(
                    "Ω_{i}: {} generator images for {} generators of X",
                    f.action.len(),
                    x.generators().len()
                )));
            }
            if f.action.iter().any(|p| p.degree() != f.omega) {
                return Err(Error::input(format!("Ω_{i}: action images must have degree {}", f.omega)));
            }
            let image = PermGroup::new(f.omega, f.action.clone())?;
            Homomorphism::new(&x, &image, f.action.clone())
                .map_err(|_| Error::input(format!("Ω_{i}: the action is not a homomorphism from X")))?;
            if !image.is_transitive() {
                return Err(Error::input(format!("Ω_{i} is not a transitive X-set")));
            }
            if f.group.is_trivial() {
                return Err(Error::input(format!("B_{i} is trivial")));
            }
            if !f.group.is_perfect().perfect {
                return Err(Error::input(format!("B_{i} is not perfect")));
            }
        }
        Ok(SemidirectSpec { x, factors })
    }

    pub fn x(&self) -> &PermGroup {
        &self.x
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn t(&self) -> usize {
        self.factors.len()
    }
}

/// JSON fixture form: `X`, and per factor `|Ω|`, the action of each
/// generator of `X` on `Ω` (image arrays) and `B`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SemidirectDescription {
    pub x: GroupDescription,
    pub factors: Vec<FactorDescription>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorDescription {
    pub omega: usize,
    #[serde(default)]
    pub action: Vec<Vec<u32>>,
    pub group: GroupDescription,
}

impl SemidirectDescription {
    pub fn to_spec(&self) -> Result<SemidirectSpec> {
        let x = self.x.to_group()?;
        let factors = self
            .factors
            .iter()
            .map(|f| {
                Ok(Factor {
                    omega: f.omega,
                    action: f.action.iter().map(|a| Permutation::from_images(a.clone())).collect::<Result<_>>()?,
                    group: f.group.to_group()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        SemidirectSpec::new(x, factors)
    }
}

/// `(x, f_1, .., f_t)` with `f_i` listed over `Ω_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StructuredElement {
    pub x: Permutation,
    pub f: Vec<Vec<Permutation>>,
}

/// `Y` as a permutation group together with its structure maps.
#[derive(Clone, Debug)]
pub struct SemidirectGroup {
    spec: SemidirectSpec,
    group: PermGroup,
    pi: Homomorphism,
    omega_maps: Vec<Homomorphism>,
    offsets: Vec<usize>,
    table: OnceLock<Arc<ElementTable>>,
}

impl SemidirectGroup {
    pub fn new(spec: SemidirectSpec) -> Result<Self> {
        let dx = spec.x.degree();
        let mut offsets = Vec::with_capacity(spec.t());
        let mut degree = dx;
        for f in &spec.factors {
            offsets.push(degree);
            degree += f.omega * f.group.degree();
        }
        let omega_maps = spec
            .factors
            .iter()
            .map(|f| Homomorphism::new(&spec.x, &PermGroup::new(f.omega, f.action.clone())?, f.action.clone()))
            .collect::<Result<Vec<_>>>()?;
        let mut y = SemidirectGroup {
            group: PermGroup::trivial(degree),
            pi: Homomorphism::new(&PermGroup::trivial(1), &PermGroup::trivial(1), Vec::new())?,
            spec,
            omega_maps,
            offsets,
            table: OnceLock::new(),
        };
        let mut gens = Vec::new();
        for (gi, x) in y.spec.x.generators().iter().enumerate() {
            let f: Vec<Vec<Permutation>> = y.spec.factors.iter().map(|fac| vec![Permutation::identity(fac.group.degree()); fac.omega]).collect();
            let images: Vec<Permutation> = y.spec.factors.iter().map(|fac| fac.action[gi].clone()).collect();
            gens.push(y.assemble(x, &images, &f));
        }
        for (i, fac) in y.spec.factors.iter().enumerate() {
            for b in fac.group.generators() {
                gens.push(y.leaf(i, 0, b));
            }
        }
        y.group = PermGroup::new(degree, gens)?.with_name("Y");
        let pi_images: Vec<Permutation> = y.group.generators().iter().map(|g| y.project(g)).collect();
        y.pi = Homomorphism::new(&y.group, &y.spec.x, pi_images)?;
        Ok(y)
    }

    pub fn spec(&self) -> &SemidirectSpec {
        &self.spec
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    /// The projection `π: Y → X`.
    pub fn pi(&self) -> &Homomorphism {
        &self.pi
    }

    pub fn degree(&self) -> usize {
        self.group.degree()
    }

    /// `|Y| = |X| ∏ |B_i|^{|Ω_i|}`.
    pub fn order(&self) -> BigUint {
        self.spec.factors.iter().fold(self.spec.x.order(), |acc, f| acc * f.group.order().pow(f.omega))
    }

    /// `|∏ B_i^{Ω_i}|`.
    pub fn base_order(&self) -> BigUint {
        self.spec.factors.iter().fold(BigUint::one(), |acc, f| acc * f.group.order().pow(f.omega))
    }

    fn block(&self, i: usize, w: usize) -> usize {
        self.offsets[i] + w * self.spec.factors[i].group.degree()
    }

    fn assemble(&self, x: &Permutation, omega_images: &[Permutation], f: &[Vec<Permutation>]) -> Permutation {
        let mut images: Vec<u32> = x.images().to_vec();
        images.resize(self.group.degree(), 0);
        for (i, fac) in self.spec.factors.iter().enumerate() {
            let d = fac.group.degree();
            for w in 0..fac.omega {
                let to = self.block(i, omega_images[i].apply(w));
                let from = self.block(i, w);
                for p in 0..d {
                    images[from + p] = (to + f[i][w].apply(p)) as u32;
                }
            }
        }
        Permutation::from_images_unchecked(images)
    }

    /// `b ∈ B_i` placed at coordinate `w ∈ Ω_i`.
    pub fn leaf(&self, i: usize, w: usize, b: &Permutation) -> Permutation {
        let mut images: Vec<u32> = (0..self.group.degree() as u32).collect();
        let start = self.block(i, w);
        for p in 0..b.degree() {
            images[start + p] = (start + b.apply(p)) as u32;
        }
        Permutation::from_images_unchecked(images)
    }

    /// `π(y)`, read off the points of `X`.
    pub fn project(&self, y: &Permutation) -> Permutation {
        let dx = self.spec.x.degree();
        Permutation::from_images_unchecked(y.images()[..dx].to_vec())
    }

    /// The action of `x ∈ X` on `Ω_i`.
    pub fn omega_action(&self, i: usize, x: &Permutation) -> Result<Permutation> {
        self.omega_maps[i].apply(x)
    }

    /// The coordinate `f_i(w)` of `y`.
    pub fn coordinate(&self, y: &Permutation, i: usize, w: usize) -> Permutation {
        let d = self.spec.factors[i].group.degree();
        let start = self.block(i, w);
        let to = y.apply(start);
        let base = self.offsets[i] + (to - self.offsets[i]) / d * d;
        let images = (0..d).map(|p| (y.apply(start + p) - base) as u32).collect();
        Permutation::from_images_unchecked(images)
    }

    pub fn is_in_base(&self, y: &Permutation) -> bool {
        (0..self.spec.x.degree()).all(|p| y.apply(p) == p)
    }

    pub fn decode(&self, y: &Permutation) -> StructuredElement {
        let f = self
            .spec
            .factors
            .iter()
            .enumerate()
            .map(|(i, fac)| (0..fac.omega).map(|w| self.coordinate(y, i, w)).collect())
            .collect();
        StructuredElement { x: self.project(y), f }
    }

    pub fn encode(&self, e: &StructuredElement) -> Result<Permutation> {
        if e.f.len() != self.spec.t() {
            return Err(Error::input("wrong number of coordinate maps"));
        }
        let images =
            (0..self.spec.t()).map(|i| self.omega_action(i, &e.x)).collect::<Result<Vec<_>>>()?;
        Ok(self.assemble(&e.x, &images, &e.f))
    }

    /// `(x₁, f₁)(x₂, f₂) = (x₁x₂, w ↦ f₁(x₂·w) f₂(w))`.
    pub fn mult(&self, a: &StructuredElement, b: &StructuredElement) -> Result<StructuredElement> {
        let mut f = Vec::with_capacity(self.spec.t());
        for i in 0..self.spec.t() {
            let act = self.omega_action(i, &b.x)?;
            f.push((0..self.spec.factors[i].omega).map(|w| a.f[i][act.apply(w)].compose(&b.f[i][w])).collect());
        }
        Ok(StructuredElement { x: a.x.compose(&b.x), f })
    }

    /// Element table of `Y`, built once when `|Y| ≤ cap`.
    pub fn table(&self, cap: usize) -> Result<Arc<ElementTable>> {
        if let Some(t) = self.table.get() {
            return Ok(t.clone());
        }
        let t = Arc::new(ElementTable::new(&self.group, cap)?);
        Ok(self.table.get_or_init(|| t).clone())
    }

    /// Subgroup of `Y` generated by `gens`, as a bitset over the table.
    pub fn subgroup_bits(&self, gens: &[Permutation], cap: usize) -> Result<Bitset> {
        let t = self.table(cap)?;
        let idx = gens
            .iter()
            .map(|g| t.index_of(g).ok_or_else(|| Error::input(format!("{g} is not an element of Y"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(t.closure(&idx))
    }

    /// `M ∩ ∏ B_i^{Ω_i}`.
    pub fn base_intersection(&self, m: &Bitset, cap: usize) -> Result<Bitset> {
        let t = self.table(cap)?;
        Ok(Bitset::from_indices(t.len(), m.iter().filter(|&a| self.is_in_base(t.element(a)))))
    }

    /// `N_Y(H)` by testing every element on the generators of `H`.
    pub fn normalizer(&self, h: &Bitset, cap: usize) -> Result<Bitset> {
        let t = self.table(cap)?;
        let gens = t.subgroup_generators(h);
        Ok(Bitset::from_indices(
            t.len(),
            (0..t.len()).filter(|&y| {
                let yi = t.inv(y);
                gens.iter().all(|&g| h.contains(t.mul(t.mul(y, g), yi)))
            }),
        ))
    }

    /// Does `M` map onto `X`?
    pub fn surjects(&self, m: &Bitset, cap: usize) -> Result<bool> {
        let t = self.table(cap)?;
        let gens: Vec<Permutation> =
            t.subgroup_generators(m).iter().map(|&a| self.project(t.element(a))).collect();
        Ok(PermGroup::new(self.spec.x.degree(), gens)?.order() == self.spec.x.order())
    }

    /// The largest standard normal subgroup `∏ N_i^{Ω_i}` inside `M`.
    pub fn standard_core(&self, m: &Bitset, cap: usize) -> Result<StandardCore> {
        let t = self.table(cap)?;
        let mut parts = Vec::with_capacity(self.spec.t());
        for (i, fac) in self.spec.factors.iter().enumerate() {
            let lat = SubgroupLattice::build(&fac.group, cap)?;
            let mut gens: Vec<Permutation> = Vec::new();
            for k in lat.normal_subgroups() {
                let n = lat.subgroup_group(k);
                let inside = n.generators().iter().all(|b| {
                    (0..fac.omega).all(|w| t.index_of(&self.leaf(i, w, b)).is_some_and(|a| m.contains(a)))
                });
                if inside {
                    gens.extend(n.generators().iter().cloned());
                }
            }
            parts.push(PermGroup::new(fac.group.degree(), gens)?);
        }
        let order = parts
            .iter()
            .zip(&self.spec.factors)
            .fold(BigUint::one(), |acc, (n, f)| acc * n.order().pow(f.omega));
        Ok(StandardCore { parts, order })
    }

    /// `⟨M, y⟩ = Y` for every `y ∉ M`, testing one `y` per double coset
    /// `MyM`. Returns a witness `y` when `M` is not maximal.
    pub fn maximality(&self, m: &Bitset, cap: usize) -> Result<Maximality> {
        let t = self.table(cap)?;
        let n = t.len();
        if m.count() == n {
            return Ok(Maximality { proper: false, maximal: false, witness: None });
        }
        let mgens = t.subgroup_generators(m);
        let mut covered = m.clone();
        for y in 0..n {
            if covered.contains(y) {
                continue;
            }
            let join = t.join_element(m, y);
            if join.count() != n {
                return Ok(Maximality { proper: true, maximal: false, witness: Some(t.element(y).clone()) });
            }
            // mark the double coset MyM
            covered.insert(y);
            let mut list = vec![y];
            let mut k = 0;
            while k < list.len() {
                let a = list[k];
                k += 1;
                for &g in &mgens {
                    for b in [t.mul(g, a), t.mul(a, g)] {
                        if !covered.contains(b) {
                            covered.insert(b);
                            list.push(b);
                        }
                    }
                }
            }
        }
        Ok(Maximality { proper: true, maximal: true, witness: None })
    }

    /// The `Y`-conjugates of `M`, and the least of them as canonical key.
    pub fn conjugates(&self, m: &Bitset, cap: usize) -> Result<Vec<Bitset>> {
        let t = self.table(cap)?;
        let maps: Vec<Vec<u32>> = t.generators().iter().map(|&g| t.conjugation_map(g as usize)).collect();
        let mut seen = std::collections::HashSet::new();
        seen.insert(m.clone());
        let mut list = vec![m.clone()];
        let mut k = 0;
        while k < list.len() {
            for f in &maps {
                let c = list[k].map(t.len(), f);
                if seen.insert(c.clone()) {
                    list.push(c);
                }
            }
            k += 1;
        }
        Ok(list)
    }

    pub fn class_key(&self, m: &Bitset, cap: usize) -> Result<Bitset> {
        Ok(self.conjugates(m, cap)?.into_iter().min().expect("non-empty"))
    }

    /// `M^0`, the intersection of all conjugates of `M`.
    pub fn core(&self, m: &Bitset, cap: usize) -> Result<Bitset> {
        Ok(self.conjugates(m, cap)?.iter().fold(m.clone(), |acc, c| acc.intersection(c)))
    }

    /// The quotient `Y/∏N_i^{Ω_i}` by a standard normal subgroup, with the
    /// map on elements. Factors with `N_i = B_i` disappear.
    pub fn quotient_by(&self, core: &StandardCore, cap: usize) -> Result<Option<(SemidirectGroup, StandardQuotient)>> {
        let mut factors = Vec::new();
        let mut maps = Vec::new();
        for (i, fac) in self.spec.factors.iter().enumerate() {
            let n = &core.parts[i];
            if n.order() == fac.group.order() {
                maps.push(None);
                continue;
            }
            let table = ElementTable::new(&fac.group, cap)?;
            let bits = table.closure(&n.generators().iter().map(|g| table.index_of(g).expect("member")).collect::<Vec<_>>());
            let gens: Vec<usize> = table.generators().iter().map(|&g| g as usize).collect();
            let images = crate::lattice::coset_action(&table, &bits, &gens);
            let q = PermGroup::new(table.len() / bits.count(), images.clone())?;
            maps.push(Some((factors.len(), Homomorphism::new(&fac.group, &q, images)?)));
            factors.push(Factor { omega: fac.omega, action: fac.action.clone(), group: q });
        }
        if factors.is_empty() {
            return Ok(None);
        }
        let y = SemidirectGroup::new(SemidirectSpec::new(self.spec.x.clone(), factors)?)?;
        Ok(Some((y, StandardQuotient { maps })))
    }

    /// Image of an element of `Y` in a standard quotient.
    pub fn map_to_quotient(&self, target: &SemidirectGroup, q: &StandardQuotient, y: &Permutation) -> Result<Permutation> {
        let e = self.decode(y);
        let mut f = vec![Vec::new(); target.spec.t()];
        for (i, m) in q.maps.iter().enumerate() {
            if let Some((j, hom)) = m {
                f[*j] = e.f[i].iter().map(|b| hom.apply(b)).collect::<Result<_>>()?;
            }
        }
        target.encode(&StructuredElement { x: e.x, f })
    }
}

#[derive(Clone, Debug)]
pub struct StandardCore {
    /// `N_i` for every factor.
    pub parts: Vec<PermGroup>,
    pub order: BigUint,
}

impl StandardCore {
    pub fn is_trivial(&self) -> bool {
        self.order.is_one()
    }
}

#[derive(Clone, Debug)]
pub struct StandardQuotient {
    /// For every original factor, its position in the quotient and the map
    /// `B_i → B_i/N_i`, or `None` when the factor was killed.
    pub maps: Vec<Option<(usize, Homomorphism)>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Maximality {
    pub proper: bool,
    pub maximal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Permutation>,
}

/// The action of the generators on `r·Ω`, `r` disjoint copies of `Ω`.
pub fn multiple_action(action: &[Permutation], r: usize) -> Vec<Permutation> {
    action.iter().map(|a| Permutation::direct_sum(&vec![a; r])).collect()
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn a5() -> PermGroup {
        PermGroup::from_cycles(5, &["(0 1 2 3 4)", "(0 1 2)"]).unwrap().with_name("A5")
    }

    /// `A_5^r` on `5r` points.
    pub fn a5_power(r: usize) -> PermGroup {
        let a = a5();
        let gens = (0..r)
            .flat_map(|j| {
                a.generators()
                    .iter()
                    .map(move |g| g.shifted(5 * j, 5 * r))
                    .collect::<Vec<_>>()
            })
            .collect();
        PermGroup::new(5 * r, gens).unwrap()
    }

    pub fn trivial_x() -> PermGroup {
        PermGroup::trivial(1)
    }

    /// `X` acting on itself-sized `Ω` by its own generators.
    pub fn natural(x: PermGroup, b: PermGroup) -> SemidirectGroup {
        let omega = x.degree();
        let action = x.generators().to_vec();
        SemidirectGroup::new(SemidirectSpec::new(x, vec![Factor { omega, action, group: b }]).unwrap()).unwrap()
    }

    pub fn a5_times_a5() -> SemidirectGroup {
        let f = || Factor { omega: 1, action: Vec::new(), group: a5() };
        SemidirectGroup::new(SemidirectSpec::new(trivial_x(), vec![f(), f()]).unwrap()).unwrap()
    }

    pub fn c2_swap_a5() -> SemidirectGroup {
        natural(PermGroup::from_cycles(2, &["(0 1)"]).unwrap(), a5())
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orders_and_projection() {
        let y = a5_times_a5();
        assert_eq!(y.group().order(), BigUint::from(3600u32));
        assert_eq!(y.order(), y.group().order());
        let y = c2_swap_a5();
        assert_eq!(y.group().order(), BigUint::from(7200u32));
        assert!(y.pi().is_surjective());
        assert_eq!(y.pi().kernel().order(), y.base_order());
    }

    #[test]
    fn standing_assumptions_checked() {
        let s3 = PermGroup::from_cycles(3, &["(0 1 2)", "(0 1)"]).unwrap();
        let f = Factor { omega: 1, action: Vec::new(), group: s3 };
        assert!(SemidirectSpec::new(trivial_x(), vec![f]).is_err());
        // two points not connected by X
        let f = Factor { omega: 2, action: Vec::new(), group: a5() };
        assert!(SemidirectSpec::new(trivial_x(), vec![f]).is_err());
        let f = Factor { omega: 1, action: Vec::new(), group: PermGroup::trivial(3) };
        assert!(SemidirectSpec::new(trivial_x(), vec![f]).is_err());
    }

    #[test]
    fn structured_product_matches_permutations() {
        let x = PermGroup::from_cycles(3, &["(0 1 2)", "(0 1)"]).unwrap();
        let y = natural(x, a5());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let a = y.group().random_element(&mut rng);
            let b = y.group().random_element(&mut rng);
            let (sa, sb) = (y.decode(&a), y.decode(&b));
            assert_eq!(y.encode(&sa).unwrap(), a);
            let ab = y.mult(&sa, &sb).unwrap();
            assert_eq!(y.encode(&ab).unwrap(), a.compose(&b));
            assert_eq!(y.pi().apply(&a).unwrap(), sa.x);
        }
    }

    #[test]
    fn standard_cores() {
        let y = a5_times_a5();
        let t = y.table(10_000).unwrap();
        let whole = Bitset::from_indices(t.len(), 0..t.len());
        assert_eq!(y.standard_core(&whole, 10_000).unwrap().order, BigUint::from(3600u32));
        let first: Vec<Permutation> = a5().generators().iter().map(|b| y.leaf(0, 0, b)).collect();
        let m = y.subgroup_bits(&first, 10_000).unwrap();
        let core = y.standard_core(&m, 10_000).unwrap();
        assert_eq!(core.order, BigUint::from(60u32));
        assert!(!core.is_trivial());
        let diag: Vec<Permutation> =
            a5().generators().iter().map(|b| y.leaf(0, 0, b).compose(&y.leaf(1, 0, b))).collect();
        let d = y.subgroup_bits(&diag, 10_000).unwrap();
        assert!(y.standard_core(&d, 10_000).unwrap().is_trivial());
    }

    #[test]
    fn maximality_by_extension() {
        let y = a5_times_a5();
        let diag: Vec<Permutation> =
            a5().generators().iter().map(|b| y.leaf(0, 0, b).compose(&y.leaf(1, 0, b))).collect();
        let d = y.subgroup_bits(&diag, 10_000).unwrap();
        assert!(y.maximality(&d, 10_000).unwrap().maximal);
        let small = y.subgroup_bits(&diag[..1], 10_000).unwrap();
        let r = y.maximality(&small, 10_000).unwrap();
        assert!(r.proper && !r.maximal && r.witness.is_some());
        assert_eq!(y.core(&d, 10_000).unwrap().count(), 1);
    }
}
