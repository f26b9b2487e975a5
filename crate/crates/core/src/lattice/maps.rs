//! Generator-image searches: automorphism groups and homomorphism counts.
//!
//! An assignment of images to the source generators is checked against the
//! whole Cayley graph of the source: the map is propagated along a spanning
//! tree and every remaining edge `x → x·g` must agree. That proves the map is
//! a homomorphism without needing a presentation.

use super::subgroups::center;
use super::table::ElementTable;
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::permcore::{PermGroup, Permutation};

/// Cayley-graph traversal of a source group: for every element except the
/// identity, the BFS parent and the generator leading to it, plus all other
/// edges for verification.
struct Cayley {
    n: usize,
    gens: Vec<usize>,
    tree: Vec<(usize, usize, usize)>,
    extra: Vec<(usize, usize, usize)>,
}

impl Cayley {
    fn new(table: &ElementTable, gens: &[usize]) -> Self {
        let n = table.len();
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut order = vec![0usize];
        let mut tree = Vec::with_capacity(n);
        let mut extra = Vec::new();
        let mut k = 0;
        while k < order.len() {
            let x = order[k];
            k += 1;
            for (gi, &g) in gens.iter().enumerate() {
                let y = table.mul(x, g);
                if seen[y] {
                    extra.push((x, gi, y));
                } else {
                    seen[y] = true;
                    tree.push((x, gi, y));
                    order.push(y);
                }
            }
        }
        Cayley { n, gens: gens.to_vec(), tree, extra }
    }

    /// Extend `images` along the tree and check the remaining edges.
    fn extend<T: Clone, M: Fn(&T, &T) -> T, E: Fn(&T, &T) -> bool>(
        &self,
        identity: T,
        images: &[T],
        mul: M,
        eq: E,
    ) -> Option<Vec<T>> {
        let mut phi: Vec<Option<T>> = vec![None; self.n];
        phi[0] = Some(identity);
        for &(x, gi, y) in &self.tree {
            let v = mul(phi[x].as_ref().expect("tree order"), &images[gi]);
            phi[y] = Some(v);
        }
        for &(x, gi, y) in &self.extra {
            let v = mul(phi[x].as_ref().expect("total"), &images[gi]);
            if !eq(&v, phi[y].as_ref().expect("total")) {
                return None;
            }
        }
        Some(phi.into_iter().map(|v| v.expect("total")).collect())
    }
}

fn generator_indices(g: &PermGroup, table: &ElementTable) -> Vec<usize> {
    g.reduced_generators().iter().map(|x| table.index_of(x).expect("generator is an element")).collect()
}

/// All automorphisms, each stored as the full element map.
#[derive(Clone, Debug)]
pub struct AutomorphismGroup {
    /// Source generators as element indices.
    pub generators: Vec<usize>,
    /// For each automorphism, the image index of every element.
    pub maps: Vec<Vec<u32>>,
    pub inner_order: usize,
}

impl AutomorphismGroup {
    pub fn order(&self) -> usize {
        self.maps.len()
    }

    pub fn out_order(&self) -> usize {
        self.maps.len() / self.inner_order
    }

    /// Generator images of every automorphism.
    pub fn assignments(&self) -> Vec<Vec<usize>> {
        self.maps.iter().map(|m| self.generators.iter().map(|&g| m[g] as usize).collect()).collect()
    }

    /// Composition of any two automorphisms is again in the set.
    pub fn is_closed(&self) -> bool {
        let set: std::collections::HashSet<&Vec<u32>> = self.maps.iter().collect();
        self.maps.iter().all(|a| {
            self.maps.iter().all(|b| {
                let c: Vec<u32> = b.iter().map(|&x| a[x as usize]).collect();
                set.contains(&c)
            })
        })
    }
}

pub fn automorphisms(g: &PermGroup, cap: usize) -> Result<AutomorphismGroup> {
    automorphisms_with(g, cap, Execution::default())
}

pub fn automorphisms_with(g: &PermGroup, cap: usize, exec: Execution) -> Result<AutomorphismGroup> {
    let table = ElementTable::new(g, cap)?;
    automorphisms_of_table(&table, &generator_indices(g, &table), exec)
}

pub(crate) fn automorphisms_of_table(table: &ElementTable, gens: &[usize], exec: Execution) -> Result<AutomorphismGroup> {
    let n = table.len();
    let cayley = Cayley::new(table, gens);
    let cands: Vec<Vec<usize>> = gens
        .iter()
        .map(|&x| (0..n).filter(|&y| table.element_order(y) == table.element_order(x)).collect())
        .collect();
    let pair_orders: Vec<Vec<u32>> =
        gens.iter().map(|&a| gens.iter().map(|&b| table.element_order(table.mul(a, b))).collect()).collect();
    let first = cands.first().cloned().unwrap_or_default();
    let per_first: Vec<Vec<Vec<u32>>> = par::map(exec, &first, |&c0| {
        let mut out = Vec::new();
        let mut assign = vec![c0];
        search(&cands, &mut assign, &|i, j, a, b| table.element_order(table.mul(a, b)) == pair_orders[i][j], &mut |imgs| {
            if let Some(phi) = cayley.extend(0usize, imgs, |&x, &y| table.mul(x, y), |a, b| a == b) {
                let mut hit = vec![false; n];
                if phi.iter().all(|&v| !std::mem::replace(&mut hit[v], true)) {
                    out.push(phi.into_iter().map(|v| v as u32).collect());
                }
            }
        });
        out
    });
    let maps: Vec<Vec<u32>> = if gens.is_empty() {
        vec![(0..n as u32).collect()]
    } else {
        per_first.into_iter().flatten().collect()
    };
    let z = center(table).count();
    Ok(AutomorphismGroup { generators: cayley.gens.clone(), maps, inner_order: n / z })
}

/// An isomorphism `source → target` as images of `source.generators()`, or
/// `None` when the groups are not isomorphic.
pub fn isomorphism(source: &PermGroup, target: &PermGroup, cap: usize) -> Result<Option<Vec<Permutation>>> {
    if source.order() != target.order() {
        return Ok(None);
    }
    let st = ElementTable::new(source, cap)?;
    let tt = ElementTable::new(target, cap)?;
    let gens = generator_indices(source, &st);
    let n = st.len();
    let cayley = Cayley::new(&st, &gens);
    let cands: Vec<Vec<usize>> = gens
        .iter()
        .map(|&x| (0..n).filter(|&y| tt.element_order(y) == st.element_order(x)).collect())
        .collect();
    let pair_orders: Vec<Vec<u32>> =
        gens.iter().map(|&a| gens.iter().map(|&b| st.element_order(st.mul(a, b))).collect()).collect();
    let mut found: Option<Vec<usize>> = None;
    let mut assign = Vec::new();
    search(&cands, &mut assign, &|i, j, a, b| tt.element_order(tt.mul(a, b)) == pair_orders[i][j], &mut |imgs| {
        if found.is_some() {
            return;
        }
        if let Some(phi) = cayley.extend(0usize, imgs, |&x, &y| tt.mul(x, y), |a, b| a == b) {
            let mut hit = vec![false; n];
            if phi.iter().all(|&v| !std::mem::replace(&mut hit[v], true)) {
                found = Some(phi);
            }
        }
    });
    Ok(found.map(|phi| {
        source.generators().iter().map(|g| tt.element(phi[st.index_of(g).expect("member")]).clone()).collect()
    }))
}

fn search<F: FnMut(&[usize])>(
    cands: &[Vec<usize>],
    assign: &mut Vec<usize>,
    pair_ok: &dyn Fn(usize, usize, usize, usize) -> bool,
    visit: &mut F,
) {
    let i = assign.len();
    if i == cands.len() {
        visit(assign);
        return;
    }
    for &c in &cands[i] {
        if (0..i).all(|j| pair_ok(j, i, assign[j], c) && pair_ok(i, j, c, assign[j])) {
            assign.push(c);
            search(cands, assign, pair_ok, visit);
            assign.pop();
        }
    }
}

/// `|Hom(source, target)|` by generator-image search, each candidate checked
/// on the full Cayley graph of the source.
pub fn hom_count(source: &PermGroup, target: &PermGroup, caps: &Caps, exec: Execution) -> Result<u64> {
    let table = ElementTable::new(source, caps.lattice_order.max(caps.enumeration))?;
    let gens = generator_indices(source, &table);
    if gens.is_empty() {
        return Ok(1);
    }
    let targets = target.elements(caps.enumeration)?;
    let t_orders: Vec<u64> = targets.iter().map(|t| t.order_u64()).collect();
    let cands: Vec<Vec<usize>> = gens
        .iter()
        .map(|&x| {
            let o = table.element_order(x) as u64;
            (0..targets.len()).filter(|&y| o % t_orders[y] == 0).collect()
        })
        .collect();
    let total: f64 = cands.iter().map(|c| c.len() as f64).product();
    if total > caps.hom_candidates as f64 {
        return Err(Error::cap(
            format!("homomorphism search with {total:.3e} candidate tuples"),
            format!("hom_candidates = {}", caps.hom_candidates),
        ));
    }
    let cayley = Cayley::new(&table, &gens);
    let pair_orders: Vec<Vec<u64>> = gens
        .iter()
        .map(|&a| gens.iter().map(|&b| table.element_order(table.mul(a, b)) as u64).collect())
        .collect();
    let ident = Permutation::identity(target.degree());
    let pair_ok = |i: usize, j: usize, a: usize, b: usize| {
        pair_orders[i][j] % targets[a].compose(&targets[b]).order_u64() == 0
    };
    let counts: Vec<u64> = par::map(exec, &cands[0], |&c0| {
        let mut count = 0u64;
        let mut assign = vec![c0];
        search(&cands, &mut assign, &pair_ok, &mut |imgs| {
            let perms: Vec<Permutation> = imgs.iter().map(|&i| targets[i].clone()).collect();
            if cayley.extend(ident.clone(), &perms, |x, y| x.compose(y), |a, b| a == b).is_some() {
                count += 1;
            }
        });
        count
    });
    Ok(counts.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(degree: usize, gens: &[&str]) -> PermGroup {
        PermGroup::from_cycles(degree, gens).unwrap()
    }

    #[test]
    fn automorphism_orders() {
        let a5 = automorphisms(&g(5, &["(0 1 2 3 4)", "(0 1 2)"]), 2000).unwrap();
        assert_eq!(a5.order(), 120);
        assert_eq!(a5.out_order(), 2);
        assert!(a5.is_closed());
        let c2 = automorphisms(&g(2, &["(0 1)"]), 2000).unwrap();
        assert_eq!(c2.order(), 1);
        let s3 = automorphisms(&g(3, &["(0 1 2)", "(0 1)"]), 2000).unwrap();
        assert_eq!((s3.order(), s3.out_order()), (6, 1));
        let v4 = automorphisms(&g(4, &["(0 1)(2 3)", "(0 2)(1 3)"]), 2000).unwrap();
        assert_eq!(v4.order(), 6);
        assert!(v4.is_closed());
    }

    #[test]
    fn isomorphisms_between_copies() {
        let a5 = g(5, &["(0 1 2 3 4)", "(0 1 2)"]);
        let other = g(6, &["(0 1 2 3 4)", "(0 5)(1 4)"]);
        let phi = isomorphism(&a5, &other, 2000).unwrap().unwrap();
        let hom = crate::permcore::Homomorphism::new(&a5, &other, phi).unwrap();
        assert!(hom.is_surjective());
        let s3 = g(3, &["(0 1 2)", "(0 1)"]);
        let c6 = g(6, &["(0 1 2 3 4 5)"]);
        assert!(isomorphism(&s3, &c6, 2000).unwrap().is_none());
    }

    #[test]
    fn hom_counts() {
        let caps = Caps::default();
        let a5 = g(5, &["(0 1 2 3 4)", "(0 1 2)"]);
        let c2 = g(2, &["(0 1)"]);
        let s3 = g(3, &["(0 1 2)", "(0 1)"]);
        assert_eq!(hom_count(&a5, &a5, &caps, Execution::Parallel).unwrap(), 121);
        assert_eq!(hom_count(&a5, &c2, &caps, Execution::Sequential).unwrap(), 1);
        assert_eq!(hom_count(&c2, &s3, &caps, Execution::Sequential).unwrap(), 4);
        // Hom(C3, S3) = 3 and Hom(S3, S3) = 1 + 3 + 6
        assert_eq!(hom_count(&g(3, &["(0 1 2)"]), &s3, &caps, Execution::Sequential).unwrap(), 3);
        assert_eq!(hom_count(&s3, &s3, &caps, Execution::Sequential).unwrap(), 10);
    }
}
