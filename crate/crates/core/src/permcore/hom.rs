use super::chain::StabilizerChain;
use super::group::PermGroup;
use super::perm::Permutation;
use crate::error::{Error, Result};

/// A homomorphism between permutation groups given by generator images.
///
/// Well-definedness is decided through the graph subgroup
/// `Γ = ⟨(s_i, t_i)⟩ ≤ source × target` acting on disjoint point sets: the
/// assignment extends to a homomorphism exactly when `|Γ| = |source|`.
/// Evaluation sifts `(x, e)` through a chain of `Γ`.
#[derive(Clone, Debug)]
pub struct Homomorphism {
    source: PermGroup,
    target: PermGroup,
    images: Vec<Permutation>,
    graph: StabilizerChain,
}

impl Homomorphism {
    pub fn new(source: &PermGroup, target: &PermGroup, images: Vec<Permutation>) -> Result<Self> {
        if images.len() != source.generators().len() {
            return Err(Error::input(format!(
                "{} images supplied for {} source generators",
                images.len(),
                source.generators().len()
            )));
        }
        for t in &images {
            if !target.contains(t)? {
                return Err(Error::input(format!("image {t} does not lie in the target group")));
            }
        }
        let ds = source.degree();
        let graph_gens: Vec<Permutation> =
            source.generators().iter().zip(&images).map(|(s, t)| Permutation::direct_sum(&[s, t])).collect();
        let graph = StabilizerChain::new(ds + target.degree(), &graph_gens);
        if graph.order() != source.order() {
            return Err(Error::input("generator images do not define a homomorphism"));
        }
        Ok(Homomorphism { source: source.clone(), target: target.clone(), images, graph })
    }

    pub fn source(&self) -> &PermGroup {
        &self.source
    }

    pub fn target(&self) -> &PermGroup {
        &self.target
    }

    pub fn images(&self) -> &[Permutation] {
        &self.images
    }

    pub fn apply(&self, x: &Permutation) -> Result<Permutation> {
        let ds = self.source.degree();
        let dt = self.target.degree();
        if x.degree() != ds {
            return Err(Error::input("degree mismatch in homomorphism argument"));
        }
        let lifted = x.shifted(0, ds + dt);
        // residue is (x·s⁻¹, φ(s)⁻¹) for the element s the chain matched
        let r = self.graph.sift(&lifted);
        if (0..ds).any(|p| r.apply(p) != p) {
            return Err(Error::input(format!("{x} is not in the source group")));
        }
        let t: Vec<u32> = (ds..ds + dt).map(|p| (r.apply(p) - ds) as u32).collect();
        Ok(Permutation::from_images_unchecked(t).inverse())
    }

    pub fn image(&self) -> PermGroup {
        PermGroup::new(self.target.degree(), self.images.clone()).expect("degrees checked")
    }

    pub fn is_surjective(&self) -> bool {
        self.image().order() == self.target.order()
    }

    /// Kernel as a subgroup of the source: the part of `Γ` fixing every
    /// target point.
    pub fn kernel(&self) -> PermGroup {
        let ds = self.source.degree();
        let dt = self.target.degree();
        let graph_gens: Vec<Permutation> = self
            .source
            .generators()
            .iter()
            .zip(&self.images)
            .map(|(s, t)| Permutation::direct_sum(&[s, t]))
            .collect();
        let target_points: Vec<usize> = (ds..ds + dt).collect();
        let chain = StabilizerChain::with_base_prefix(ds + dt, &graph_gens, &target_points);
        let gens = chain
            .stabilizer_generators(dt)
            .iter()
            .map(|g| g.restrict(&(0..ds as u32).collect::<Vec<_>>()).expect("source block invariant"))
            .collect();
        PermGroup::new(ds, gens).expect("degree matches")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn sign_map_of_s4() {
        let s4 = PermGroup::from_cycles(4, &["(0 1 2 3)", "(0 1)"]).unwrap();
        let c2 = PermGroup::from_cycles(2, &["(0 1)"]).unwrap();
        let t = Permutation::from_cycles("(0 1)", 2).unwrap();
        let sign = Homomorphism::new(&s4, &c2, vec![t.clone(), t.clone()]).unwrap();
        assert!(sign.is_surjective());
        assert_eq!(sign.kernel().order(), BigUint::from(12u32));
        let x = Permutation::from_cycles("(0 1 2)", 4).unwrap();
        assert!(sign.apply(&x).unwrap().is_identity());
        let y = Permutation::from_cycles("(1 3)", 4).unwrap();
        assert_eq!(sign.apply(&y).unwrap(), t);
        // not a homomorphism: 4-cycle to identity but transposition to swap
        assert!(Homomorphism::new(&s4, &c2, vec![Permutation::identity(2), t]).is_err());
    }

    #[test]
    fn s4_onto_s3() {
        let s4 = PermGroup::from_cycles(4, &["(0 1 2 3)", "(0 1)"]).unwrap();
        let s3 = PermGroup::from_cycles(3, &["(0 1 2)", "(0 1)"]).unwrap();
        let imgs = vec![Permutation::from_cycles("(0 2)", 3).unwrap(), Permutation::from_cycles("(1 2)", 3).unwrap()];
        let h = Homomorphism::new(&s4, &s3, imgs).unwrap();
        assert!(h.is_surjective());
        assert_eq!(h.kernel().order(), BigUint::from(4u32));
        for x in s4.elements(100).unwrap() {
            for y in s4.elements(100).unwrap().iter().step_by(5) {
                let lhs = h.apply(&x.compose(y)).unwrap();
                let rhs = h.apply(&x).unwrap().compose(&h.apply(y).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }
}
