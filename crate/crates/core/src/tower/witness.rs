//! Quotient maps witnessing that a tower is not finitely generated.

use rand::Rng;
use serde::Serialize;

use super::{TowerSpec, WreathElement};
use crate::error::{Error, Result};
use crate::lattice::{coset_action, ElementTable};
use crate::permcore::{Homomorphism, PermGroup, Permutation};

/// A surjection `π: L → A` onto a nontrivial abelian group, extended to
/// `L_{n+1} → A` by `(x, f) ↦ ∏_v π(f(v))`.
#[derive(Clone, Debug)]
pub struct AbelianizationWitness {
    pi: Homomorphism,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessCheck {
    pub pairs: usize,
    pub multiplicative: bool,
    pub surjective: bool,
    pub identity_to_identity: bool,
}

impl WitnessCheck {
    pub fn ok(&self) -> bool {
        self.multiplicative && self.surjective && self.identity_to_identity
    }
}

impl AbelianizationWitness {
    pub fn new(spec: &TowerSpec, target: &PermGroup, images: Vec<Permutation>) -> Result<Self> {
        if !target.is_abelian() {
            return Err(Error::input("target of an abelianization witness must be abelian"));
        }
        let pi = Homomorphism::new(spec.base(), target, images)?;
        if !pi.is_surjective() {
            return Err(Error::input("abelianization witness is not surjective"));
        }
        Ok(AbelianizationWitness { pi })
    }

    /// The map onto `L/[L,L]`, or `None` when `L` is perfect.
    pub fn find(spec: &TowerSpec, cap: usize) -> Result<Option<Self>> {
        let l = spec.base();
        let derived = l.derived_subgroup();
        if derived.order() == l.order() {
            return Ok(None);
        }
        let table = ElementTable::new(l, cap)?;
        let bits = table.closure(
            &derived.generators().iter().map(|g| table.index_of(g).expect("member")).collect::<Vec<_>>(),
        );
        let gens: Vec<usize> = table.generators().iter().map(|&g| g as usize).collect();
        let images = coset_action(&table, &bits, &gens);
        let degree = table.len() / bits.count();
        let target = PermGroup::new(degree, images.clone())?.with_name("L/[L,L]");
        Ok(Some(Self::new(spec, &target, images)?))
    }

    pub fn target(&self) -> &PermGroup {
        self.pi.target()
    }

    pub fn images(&self) -> &[Permutation] {
        self.pi.images()
    }

    /// `∏_v π(f(v))` over the last layer of `e`.
    pub fn evaluate(&self, e: &WreathElement) -> Result<Permutation> {
        let mut acc = self.pi.target().identity();
        for leaf in e.leaves() {
            acc = acc.compose(&self.pi.apply(leaf)?);
        }
        Ok(acc)
    }

    /// Check the map on `L_{n+1}` for multiplicativity on random pairs and
    /// surjectivity on leaf generators.
    pub fn verify<R: Rng + ?Sized>(&self, spec: &TowerSpec, n: usize, pairs: usize, rng: &mut R) -> Result<WitnessCheck> {
        let level = n + 1;
        let mut multiplicative = true;
        for _ in 0..pairs {
            let a = WreathElement::random(spec, level, rng);
            let b = WreathElement::random(spec, level, rng);
            let lhs = self.evaluate(&a.mult(&b)?)?;
            let rhs = self.evaluate(&a)?.compose(&self.evaluate(&b)?);
            if lhs != rhs {
                multiplicative = false;
                break;
            }
        }
        let gens = spec.structured_generators(level);
        let images = gens.iter().map(|g| self.evaluate(g)).collect::<Result<Vec<_>>>()?;
        let image = PermGroup::new(self.target().degree(), images)?;
        let surjective = image.order() == self.target().order();
        let identity_to_identity = self.evaluate(&WreathElement::identity(spec.degree(), level))?.is_identity();
        Ok(WitnessCheck { pairs, multiplicative, surjective, identity_to_identity })
    }
}

/// For a point `j` fixed by `L`, the map `L_{n+1} → L_n × L`,
/// `(x, f) ↦ (x, f(j, .., j))`.
#[derive(Clone, Debug, Serialize)]
pub struct FixedPointWitness {
    pub point: usize,
}

impl FixedPointWitness {
    pub fn new(spec: &TowerSpec, j: usize) -> Result<Self> {
        if j >= spec.degree() {
            return Err(Error::input(format!("point {j} out of range")));
        }
        if spec.base().generators().iter().any(|g| g.apply(j) != j) {
            return Err(Error::input(format!("point {j} is not fixed by L")));
        }
        Ok(FixedPointWitness { point: j })
    }

    pub fn find(spec: &TowerSpec) -> Option<Self> {
        spec.fixed_points().first().map(|&j| FixedPointWitness { point: j })
    }

    fn diagonal_word(&self, d: usize, n: usize) -> usize {
        (0..n).fold(0, |acc, _| acc * d + self.point)
    }

    pub fn evaluate(&self, e: &WreathElement) -> (WreathElement, Permutation) {
        let d = e.layers()[0][0].degree();
        let n = e.level() - 1;
        (e.top(), e.leaves()[self.diagonal_word(d, n)].clone())
    }

    pub fn verify<R: Rng + ?Sized>(&self, spec: &TowerSpec, n: usize, pairs: usize, rng: &mut R) -> Result<WitnessCheck> {
        let level = n + 1;
        let d = spec.degree();
        let mut multiplicative = true;
        for _ in 0..pairs {
            let a = WreathElement::random(spec, level, rng);
            let b = WreathElement::random(spec, level, rng);
            let (x, s) = self.evaluate(&a.mult(&b)?);
            let (xa, sa) = self.evaluate(&a);
            let (xb, sb) = self.evaluate(&b);
            let top_ok = if n == 0 { true } else { x == xa.mult(&xb)? };
            if !top_ok || s != sa.compose(&sb) {
                multiplicative = false;
                break;
            }
        }
        // images of the generators must generate L_n × L
        let images: Vec<Permutation> = spec
            .structured_generators(level)
            .iter()
            .map(|g| {
                let (x, s) = self.evaluate(g);
                let xp = if n == 0 { Permutation::identity(1) } else { x.to_permutation() };
                Permutation::direct_sum(&[&xp, &s])
            })
            .collect();
        let image = PermGroup::new(d.pow(n as u32) + d, images)?;
        let surjective = image.order() == spec.level_order(n) * spec.base().order();
        let (x0, s0) = self.evaluate(&WreathElement::identity(d, level));
        let identity_to_identity = (n == 0 || x0.is_identity()) && s0.is_identity();
        Ok(WitnessCheck { pairs, multiplicative, surjective, identity_to_identity })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sign_witness_for_s3() {
        let spec = TowerSpec::new(PermGroup::from_cycles(3, &["(0 1 2)", "(0 1)"]).unwrap()).unwrap();
        let w = AbelianizationWitness::find(&spec, 1000).unwrap().unwrap();
        assert_eq!(w.target().order(), 2u32.into());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let check = w.verify(&spec, 1, 200, &mut rng).unwrap();
        assert!(check.ok(), "{check:?}");
    }

    #[test]
    fn perfect_base_has_no_abelian_witness() {
        let spec = TowerSpec::new(PermGroup::from_cycles(5, &["(0 1 2 3 4)", "(0 1 2)"]).unwrap()).unwrap();
        assert!(AbelianizationWitness::find(&spec, 1000).unwrap().is_none());
        assert!(FixedPointWitness::find(&spec).is_none());
    }

    #[test]
    fn fixed_point_witness_for_a5_on_six_points() {
        let spec = TowerSpec::new(PermGroup::from_cycles(6, &["(0 1 2 3 4)", "(0 1 2)"]).unwrap()).unwrap();
        let w = FixedPointWitness::find(&spec).unwrap();
        assert_eq!(w.point, 5);
        assert!(FixedPointWitness::new(&spec, 0).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 0..=1 {
            let check = w.verify(&spec, n, 100, &mut rng).unwrap();
            assert!(check.ok(), "n = {n}: {check:?}");
        }
        // kernel element: nontrivial leaf away from the diagonal word
        let mut e = WreathElement::identity(6, 2);
        e.layers_mut()[1][0] = Permutation::from_cycles("(0 1 2)", 6).unwrap();
        let (x, s) = w.evaluate(&e);
        assert!(x.is_identity() && s.is_identity());
    }
}
