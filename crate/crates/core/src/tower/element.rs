use rand::Rng;
use serde::{Deserialize, Serialize};

use super::TowerSpec;
use crate::error::{Error, Result};
use crate::permcore::Permutation;

/// An element `(x, f)` of `L_n`, stored densely by layer: `layers[m]` holds
/// the value of the leaf map at every word of length `m`, so `layers[0]` is
/// the root element of `L` and the last layer is `f`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WreathElement {
    layers: Vec<Vec<Permutation>>,
}

impl WreathElement {
    pub fn from_layers(layers: Vec<Vec<Permutation>>) -> Self {
        WreathElement { layers }
    }

    /// Validate shape (`d^m` leaves on layer `m`, all of degree `d`) and
    /// membership of every leaf in `L`.
    pub fn validate(&self, spec: &TowerSpec) -> Result<()> {
        let d = spec.degree();
        for (m, layer) in self.layers.iter().enumerate() {
            if layer.len() != d.pow(m as u32) {
                return Err(Error::input(format!("layer {m} has {} leaves, expected {}", layer.len(), d.pow(m as u32))));
            }
            for p in layer {
                if p.degree() != d || !spec.base().contains(p)? {
                    return Err(Error::input(format!("leaf {p} is not an element of L")));
                }
            }
        }
        Ok(())
    }

    pub fn identity(d: usize, n: usize) -> Self {
        WreathElement { layers: (0..n).map(|m| vec![Permutation::identity(d); d.pow(m as u32)]).collect() }
    }

    pub fn random<R: Rng + ?Sized>(spec: &TowerSpec, n: usize, rng: &mut R) -> Self {
        let d = spec.degree();
        let chain = spec.base().chain();
        WreathElement {
            layers: (0..n).map(|m| (0..d.pow(m as u32)).map(|_| chain.random_element(rng)).collect()).collect(),
        }
    }

    pub fn level(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Vec<Permutation>] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut Vec<Vec<Permutation>> {
        &mut self.layers
    }

    fn d(&self) -> usize {
        self.layers[0][0].degree()
    }

    /// The `L_{n-1}` component `x`.
    pub fn top(&self) -> WreathElement {
        WreathElement { layers: self.layers[..self.layers.len() - 1].to_vec() }
    }

    /// The leaf map `f: S_{n-1} → L`.
    pub fn leaves(&self) -> &[Permutation] {
        self.layers.last().expect("level ≥ 1")
    }

    pub fn from_parts(top: WreathElement, leaves: Vec<Permutation>) -> Self {
        let mut layers = top.layers;
        layers.push(leaves);
        WreathElement { layers }
    }

    /// `(x, 1)` one level up.
    pub fn lift(&self, d: usize) -> WreathElement {
        let n = self.level();
        let mut layers = self.layers.clone();
        layers.push(vec![Permutation::identity(d); d.pow(n as u32)]);
        WreathElement { layers }
    }

    /// Image of the word with code `w` (length `m ≤ level`) under the top
    /// `m` layers.
    fn act_prefix(&self, w: usize, m: usize) -> usize {
        let d = self.d();
        let mut out = 0;
        let mut prefix = 0;
        for k in 0..m {
            let letter = (w / d.pow((m - 1 - k) as u32)) % d;
            out = out * d + self.layers[k][prefix].apply(letter);
            prefix = prefix * d + letter;
        }
        out
    }

    /// `(x, f)(v, j) = (x(v), f(v) j)`, applied letter by letter. The word
    /// is given as its letters.
    pub fn act(&self, word: &[usize]) -> Result<Vec<usize>> {
        let d = self.d();
        if word.len() != self.level() || word.iter().any(|&a| a >= d) {
            return Err(Error::input(format!("word {word:?} is not in S_{}", self.level())));
        }
        let (v, j) = word.split_at(word.len() - 1);
        let mut image = if v.is_empty() { Vec::new() } else { self.top().act(v)? };
        let code = v.iter().fold(0, |acc, &a| acc * d + a);
        image.push(self.leaves()[code].apply(j[0]));
        Ok(image)
    }

    pub fn to_permutation(&self) -> Permutation {
        let d = self.d();
        let n = self.level();
        let size = d.pow(n as u32);
        let images = (0..size).map(|w| self.act_prefix(w, n) as u32).collect();
        Permutation::from_images_unchecked(images)
    }

    /// Decode a permutation of `D^n` preserving the prefix structure. Fails
    /// when the permutation does not lie in the wreath structure or a leaf
    /// is outside `L`.
    pub fn from_permutation(spec: &TowerSpec, n: usize, p: &Permutation) -> Result<Self> {
        let d = spec.degree();
        if p.degree() != d.pow(n as u32) {
            return Err(Error::input("permutation degree does not match the tower level"));
        }
        let mut layers = Vec::with_capacity(n);
        for m in 0..n {
            let shift = d.pow((n - 1 - m) as u32);
            let mut layer = Vec::with_capacity(d.pow(m as u32));
            for prefix in 0..d.pow(m as u32) {
                let images = (0..d).map(|a| ((p.apply((prefix * d + a) * shift) / shift) % d) as u32).collect();
                layer.push(Permutation::from_images(images)?);
            }
            layers.push(layer);
        }
        let e = WreathElement { layers };
        if &e.to_permutation() != p {
            return Err(Error::input("permutation does not preserve the word structure"));
        }
        e.validate(spec)?;
        Ok(e)
    }

    /// `(x₁, f₁)(x₂, f₂) = (x₁x₂, f₁^{x₂} f₂)` with `f^{x}(w) = f(x w)`.
    pub fn mult(&self, other: &WreathElement) -> Result<WreathElement> {
        if self.level() != other.level() {
            return Err(Error::input(format!("level mismatch: {} vs {}", self.level(), other.level())));
        }
        let layers = (0..self.level())
            .map(|m| {
                (0..self.layers[m].len())
                    .map(|w| {
                        let xw = other.act_prefix(w, m);
                        self.layers[m][xw].compose(&other.layers[m][w])
                    })
                    .collect()
            })
            .collect();
        Ok(WreathElement { layers })
    }

    pub fn inverse(&self) -> WreathElement {
        // (x, f)⁻¹ = (x⁻¹, w ↦ f(x⁻¹ w)⁻¹)
        let d = self.d();
        let p = self.to_permutation().inverse();
        let n = self.level();
        let mut layers = Vec::with_capacity(n);
        for m in 0..n {
            let shift = d.pow((n - 1 - m) as u32);
            let layer = (0..d.pow(m as u32))
                .map(|prefix| {
                    let images = (0..d).map(|a| ((p.apply((prefix * d + a) * shift) / shift) % d) as u32).collect();
                    Permutation::from_images_unchecked(images)
                })
                .collect();
            layers.push(layer);
        }
        WreathElement { layers }
    }

    pub fn is_identity(&self) -> bool {
        self.layers.iter().flatten().all(|p| p.is_identity())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permcore::PermGroup;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn s2_level_two_example() {
        let spec = TowerSpec::new(PermGroup::from_cycles(2, &["(0 1)"]).unwrap()).unwrap();
        let swap = Permutation::from_cycles("(0 1)", 2).unwrap();
        let id = Permutation::identity(2);
        let a = WreathElement::from_layers(vec![vec![swap.clone()], vec![id.clone(), id.clone()]]);
        let b = WreathElement::from_layers(vec![vec![id.clone()], vec![swap.clone(), id.clone()]]);
        a.validate(&spec).unwrap();
        b.validate(&spec).unwrap();
        let ab = a.mult(&b).unwrap();
        // g(w) = f1(swap·w)·f2(w) = f2(w) since f1 is trivial
        assert_eq!(ab.layers()[0][0], swap);
        assert_eq!(ab.layers()[1], vec![swap.clone(), id.clone()]);
        assert_eq!(ab.to_permutation(), a.to_permutation().compose(&b.to_permutation()));
    }

    #[test]
    fn leaf_transposition_moves_two_points() {
        let spec = TowerSpec::new(PermGroup::from_cycles(3, &["(0 1 2)", "(0 1)"]).unwrap()).unwrap();
        let mut e = WreathElement::identity(3, 2);
        e.layers_mut()[1][2] = Permutation::from_cycles("(0 1)", 3).unwrap();
        e.validate(&spec).unwrap();
        let p = e.to_permutation();
        let moved: Vec<usize> = (0..9).filter(|&w| p.apply(w) != w).collect();
        assert_eq!(moved, vec![6, 7]);
        assert_eq!(e.act(&[2, 0]).unwrap(), vec![2, 1]);
        assert!(e.act(&[3, 0]).is_err());
    }

    #[test]
    fn decode_and_inverse() {
        let spec = TowerSpec::new(PermGroup::from_cycles(4, &["(0 1 2 3)", "(0 1)"]).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=3 {
            let e = WreathElement::random(&spec, n, &mut rng);
            let back = WreathElement::from_permutation(&spec, n, &e.to_permutation()).unwrap();
            assert_eq!(back, e);
            assert!(e.mult(&e.inverse()).unwrap().is_identity());
        }
        let bad = Permutation::from_cycles("(0 4)", 16).unwrap();
        assert!(WreathElement::from_permutation(&spec, 2, &bad).is_err());
    }
}
