use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection of `{0, .., degree-1}` stored as its image array.
///
/// Products follow function composition: `a.compose(&b)` applies `b` first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Permutation {
    images: Box<[u32]>,
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Permutation::from_images(v)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Vec<u32> {
        p.images.into_vec()
    }
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation { images: (0..degree as u32).collect() }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(Error::input(format!("image array {images:?} is not a bijection")));
            }
            seen[x] = true;
        }
        Ok(Permutation { images: images.into_boxed_slice() })
    }

    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Permutation::from_images(images.clone()).is_ok());
        Permutation { images: images.into_boxed_slice() }
    }

    /// Parse cycle notation such as `"(0 1 2)(3 4)"`. Commas are accepted as
    /// separators; `"()"` or an empty string is the identity.
    pub fn from_cycles(text: &str, degree: usize) -> Result<Self> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut seen = vec![false; degree];
        let mut rest = text.trim();
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::input(format!("expected '(' in cycle string {text:?}")))?;
            let close = open
                .find(')')
                .ok_or_else(|| Error::input(format!("unclosed cycle in {text:?}")))?;
            let body = &open[..close];
            let pts = body
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<u32>().map_err(|_| Error::input(format!("bad point {s:?} in {text:?}")))
                })
                .collect::<Result<Vec<u32>>>()?;
            for &p in &pts {
                if p as usize >= degree {
                    return Err(Error::input(format!("point {p} out of range for degree {degree}")));
                }
                if std::mem::replace(&mut seen[p as usize], true) {
                    return Err(Error::input(format!("point {p} repeated in {text:?}")));
                }
            }
            for (i, &p) in pts.iter().enumerate() {
                images[p as usize] = pts[(i + 1) % pts.len()];
            }
            rest = open[close + 1..].trim_start();
        }
        Ok(Permutation { images: images.into_boxed_slice() })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, p: usize) -> usize {
        self.images[p] as usize
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        let images = other.images.iter().map(|&x| self.images[x as usize]).collect();
        Permutation { images }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Permutation { images: inv.into_boxed_slice() }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self⁻¹ ∘ g ∘ self`.
    pub fn conjugate(&self, g: &Permutation) -> Permutation {
        self.inverse().compose(g).compose(self)
    }

    /// `a⁻¹ b⁻¹ a b`.
    pub fn commutator(a: &Permutation, b: &Permutation) -> Permutation {
        a.inverse().compose(&b.inverse()).compose(a).compose(b)
    }

    pub fn pow(&self, mut e: u64) -> Permutation {
        let mut base = self.clone();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut cyc = vec![start as u32];
            seen[start] = true;
            let mut p = self.apply(start);
            while p != start {
                seen[p] = true;
                cyc.push(p as u32);
                p = self.apply(p);
            }
            if cyc.len() > 1 {
                out.push(cyc);
            }
        }
        out
    }

    pub fn order(&self) -> BigUint {
        self.cycles()
            .iter()
            .fold(BigUint::from(1u32), |acc, c| acc.lcm(&BigUint::from(c.len())))
    }

    /// Order when it fits in a machine word, which is always the case for
    /// the degrees handled by exhaustive code.
    pub fn order_u64(&self) -> u64 {
        self.cycles().iter().fold(1u64, |acc, c| acc.lcm(&(c.len() as u64)))
    }

    pub fn support_min(&self) -> Option<usize> {
        self.images.iter().enumerate().find(|&(i, &x)| i as u32 != x).map(|(i, _)| i)
    }

    /// Embed into a larger degree, moving every point up by `offset`.
    pub fn shifted(&self, offset: usize, degree: usize) -> Permutation {
        assert!(offset + self.degree() <= degree);
        let mut images: Vec<u32> = (0..degree as u32).collect();
        for (i, &x) in self.images.iter().enumerate() {
            images[offset + i] = offset as u32 + x;
        }
        Permutation { images: images.into_boxed_slice() }
    }

    /// Concatenate actions on disjoint point ranges.
    pub fn direct_sum(parts: &[&Permutation]) -> Permutation {
        let mut images = Vec::with_capacity(parts.iter().map(|p| p.degree()).sum());
        let mut offset = 0u32;
        for p in parts {
            images.extend(p.images.iter().map(|&x| x + offset));
            offset += p.degree() as u32;
        }
        Permutation { images: images.into_boxed_slice() }
    }

    /// Restriction to an invariant subset, relabelled by position in `points`.
    pub fn restrict(&self, points: &[u32]) -> Result<Permutation> {
        let mut pos = vec![u32::MAX; self.degree()];
        for (i, &p) in points.iter().enumerate() {
            pos[p as usize] = i as u32;
        }
        let images = points
            .iter()
            .map(|&p| {
                let q = pos[self.apply(p as usize)];
                if q == u32::MAX {
                    Err(Error::input(format!("point set is not invariant under {self}")))
                } else {
                    Ok(q)
                }
            })
            .collect::<Result<Vec<u32>>>()?;
        Ok(Permutation { images: images.into_boxed_slice() })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (i, p) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}]{}", self.degree(), self)
    }
}
