use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Pow, Zero};
use serde::Serialize;

use super::{SemidirectGroup, multiple_action};
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::lattice::{simple_power, Bitset};
use crate::permcore::{Homomorphism, PermGroup, Permutation};

/// Outcome of building a candidate maximal subgroup `M ≤ Y`.
#[derive(Clone, Debug, Serialize)]
pub struct ConstructionReport {
    #[serde(with = "crate::io::uint")]
    pub order: BigUint,
    #[serde(with = "crate::io::uint")]
    pub index: BigUint,
    pub proper: bool,
    /// `None` when `|Y|` is above the maximality cap.
    pub maximal: Option<bool>,
    pub clean: bool,
    pub surjects_onto_x: bool,
    /// The lower bound on `[Y:M]` claimed for this shape, and whether it holds.
    #[serde(with = "crate::io::uint")]
    pub index_bound: BigUint,
    pub index_bound_holds: bool,
    pub diagnostics: Vec<String>,
    #[serde(skip)]
    pub bits: Bitset,
}

fn finish(
    y: &SemidirectGroup,
    m: Bitset,
    bound: BigUint,
    bound_squared: bool,
    caps: &Caps,
    diagnostics: Vec<String>,
) -> Result<ConstructionReport> {
    let order = BigUint::from(m.count());
    let index = y.order() / &order;
    let proper = !index.is_one();
    let maximal = if y.order() <= BigUint::from(caps.maximality) {
        Some(y.maximality(&m, caps.enumeration)?.maximal)
    } else {
        None
    };
    let clean = y.standard_core(&m, caps.enumeration)?.is_trivial();
    let surjects_onto_x = y.surjects(&m, caps.enumeration)?;
    // a bound of the form |T|^{r|Ω|/2} is compared after squaring
    let index_bound_holds = if bound_squared { &index * &index >= bound } else { index >= bound };
    Ok(ConstructionReport {
        order,
        index,
        proper,
        maximal,
        clean,
        surjects_onto_x,
        index_bound: bound,
        index_bound_holds,
        diagnostics,
        bits: m,
    })
}

fn check_isomorphism(source: &PermGroup, target: &PermGroup, images: Vec<Permutation>, what: &str) -> Result<Homomorphism> {
    let hom = Homomorphism::new(source, target, images).map_err(|e| Error::input(format!("{what}: {e}")))?;
    if source.order() != target.order() || !hom.is_surjective() {
        return Err(Error::input(format!("{what} is not an isomorphism")));
    }
    Ok(hom)
}

/// `M = N_Y(graph(F))` for `F(f)(σ(w)) = φ_w(f(w))`, where `t = 2`, `σ` is
/// an `X`-equivariant bijection `Ω_1 → Ω_2` and `phi[w]` gives `φ_w` as
/// images of the generators of `B_1`.
pub fn construct_graph_iso(
    y: &SemidirectGroup,
    sigma: &[usize],
    phi: &[Vec<Permutation>],
    caps: &Caps,
) -> Result<ConstructionReport> {
    let spec = y.spec();
    if spec.t() != 2 {
        return Err(Error::input(format!("graph construction needs two factors, Y has {}", spec.t())));
    }
    let (f1, f2) = (&spec.factors()[0], &spec.factors()[1]);
    if f1.omega != f2.omega {
        return Err(Error::input(format!("no bijection between Ω_1 (size {}) and Ω_2 (size {})", f1.omega, f2.omega)));
    }
    if sigma.len() != f1.omega || phi.len() != f1.omega {
        return Err(Error::input("σ and φ must be given at every point of Ω_1"));
    }
    let mut hit = vec![false; f2.omega];
    for &v in sigma {
        if v >= f2.omega || std::mem::replace(&mut hit[v], true) {
            return Err(Error::input("σ is not a bijection Ω_1 → Ω_2"));
        }
    }
    for (a1, a2) in f1.action.iter().zip(&f2.action) {
        if (0..f1.omega).any(|w| sigma[a1.apply(w)] != a2.apply(sigma[w])) {
            return Err(Error::input("σ is not X-equivariant: x·σ(w) ≠ σ(x·w)"));
        }
    }
    let mut gens = Vec::new();
    for (w, images) in phi.iter().enumerate() {
        check_isomorphism(&f1.group, &f2.group, images.clone(), &format!("φ_{w}"))?;
        for (b, c) in f1.group.generators().iter().zip(images) {
            gens.push(y.leaf(0, w, b).compose(&y.leaf(1, sigma[w], c)));
        }
    }
    let graph = y.subgroup_bits(&gens, caps.enumeration)?;
    let m = y.normalizer(&graph, caps.enumeration)?;
    let bound = f1.group.order().pow(f1.omega);
    finish(y, m, bound, false, caps, Vec::new())
}

/// A product of subdiagonals inside `U^Ω = T^{r·Ω}` for `U = T_1 × .. × T_r
/// ⊴ B`. Coordinate `(j, w)` of `r·Ω` is numbered `j·|Ω| + w`.
#[derive(Clone, Debug)]
pub struct SubdiagonalData {
    /// Generators of each simple factor `T_j`.
    pub factors: Vec<Vec<Permutation>>,
    /// The blocks `A ∈ P`.
    pub partition: Vec<Vec<usize>>,
    /// `φ_c` for every coordinate, as images of the generators of `T_1` in
    /// the factor of that coordinate. `None` uses the listed generators of
    /// each factor as the images.
    pub twists: Option<Vec<Vec<Permutation>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubdiagonalReport {
    /// `e = Σ_{A ∈ P} (|A| − 1)`.
    pub exponent: usize,
    #[serde(with = "crate::io::uint")]
    pub h_order: BigUint,
    /// `[T^{r·Ω} : H]`, from chain orders.
    #[serde(with = "crate::io::uint")]
    pub index: BigUint,
    #[serde(with = "crate::io::uint")]
    pub expected_index: BigUint,
    pub index_matches: bool,
    /// `N_Y(H)`, when `Y` can be enumerated.
    pub normalizer: Option<ConstructionReport>,
    #[serde(skip)]
    pub generators: Vec<Permutation>,
}

pub fn construct_subdiagonal(y: &SemidirectGroup, data: &SubdiagonalData, caps: &Caps) -> Result<SubdiagonalReport> {
    let spec = y.spec();
    if spec.t() != 1 {
        return Err(Error::input("subdiagonal construction needs a single factor B^Ω"));
    }
    let fac = &spec.factors()[0];
    let r = data.factors.len();
    if r == 0 {
        return Err(Error::input("U must have at least one simple factor"));
    }
    let omega = fac.omega;
    let b = &fac.group;
    let copies = data
        .factors
        .iter()
        .map(|g| PermGroup::new(b.degree(), g.clone()))
        .collect::<Result<Vec<_>>>()?;
    for t in &copies {
        if !t.is_subgroup_of(b)? {
            return Err(Error::input("a factor of U is not a subgroup of B"));
        }
    }
    let t1 = &copies[0];
    let sp = simple_power(t1, caps.lattice_order)?;
    if sp.as_ref().map(|s| s.r) != Some(1) {
        return Err(Error::input("T is not non-abelian simple"));
    }
    let u = PermGroup::new(b.degree(), data.factors.concat())?;
    if u.order() != t1.order().pow(r) {
        return Err(Error::input("the factors do not form a direct product T^r"));
    }
    let normal = b.generators().iter().all(|g| {
        u.generators().iter().all(|h| u.contains(&g.conjugate(h)).unwrap_or(false))
    });
    if !normal {
        return Err(Error::input("U is not normal in B"));
    }

    let n = r * omega;
    let mut seen = vec![false; n];
    for block in &data.partition {
        if block.len() < 2 {
            return Err(Error::input(format!(
                "block {block:?} has a single coordinate; every block needs |A| ≥ 2"
            )));
        }
        for &c in block {
            if c >= n || std::mem::replace(&mut seen[c], true) {
                return Err(Error::input(format!("coordinate {c} is out of range or repeated")));
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::input("the blocks do not cover r·Ω"));
    }
    let mut sorted: Vec<Vec<usize>> = data.partition.iter().map(|a| {
        let mut a = a.clone();
        a.sort_unstable();
        a
    }).collect();
    sorted.sort();
    for a in multiple_action(&fac.action, r) {
        let mut image: Vec<Vec<usize>> = sorted
            .iter()
            .map(|blk| {
                let mut v: Vec<usize> = blk.iter().map(|&c| a.apply(c)).collect();
                v.sort_unstable();
                v
            })
            .collect();
        image.sort();
        if image != sorted {
            return Err(Error::input("the partition of r·Ω is not X-invariant"));
        }
    }

    let twists: Vec<Vec<Permutation>> = match &data.twists {
        Some(t) => {
            if t.len() != n {
                return Err(Error::input(format!("{} twists given for {n} coordinates", t.len())));
            }
            t.clone()
        }
        None => (0..n).map(|c| data.factors[c / omega].clone()).collect(),
    };
    for (c, images) in twists.iter().enumerate() {
        check_isomorphism(t1, &copies[c / omega], images.clone(), &format!("φ_{c}"))?;
    }

    let mut gens = Vec::new();
    for block in &sorted {
        for gi in 0..t1.generators().len() {
            let mut g = Permutation::identity(y.degree());
            for &c in block {
                g = g.compose(&y.leaf(0, c % omega, &twists[c][gi]));
            }
            gens.push(g);
        }
    }
    let h = PermGroup::new(y.degree(), gens.clone())?;
    let h_order = h.order();
    let full = t1.order().pow(n);
    let (index, rem) = full.div_rem(&h_order);
    if !rem.is_zero() {
        return Err(Error::invariant("|H| does not divide |T^{r·Ω}|"));
    }
    let exponent: usize = sorted.iter().map(|a| a.len() - 1).sum();
    let expected_index = t1.order().pow(exponent);
    let normalizer = if y.order() <= BigUint::from(caps.enumeration) {
        let hb = y.subgroup_bits(&gens, caps.enumeration)?;
        let m = y.normalizer(&hb, caps.enumeration)?;
        Some(finish(y, m, t1.order().pow(n), true, caps, Vec::new())?)
    } else {
        None
    };
    Ok(SubdiagonalReport {
        exponent,
        h_order,
        index_matches: index == expected_index,
        index,
        expected_index,
        normalizer,
        generators: gens,
    })
}

/// `M = N_Y(T^Ω)` for a proper nontrivial `T < B` (single factor).
pub fn construct_normalizer_t(y: &SemidirectGroup, t_gens: &[Permutation], caps: &Caps) -> Result<ConstructionReport> {
    let spec = y.spec();
    if spec.t() != 1 {
        return Err(Error::input("the normalizer construction needs a single factor B^Ω"));
    }
    let fac = &spec.factors()[0];
    let t = PermGroup::new(fac.group.degree(), t_gens.to_vec())?;
    if !t.is_subgroup_of(&fac.group)? {
        return Err(Error::input("T is not a subgroup of B"));
    }
    if t.is_trivial() || t.order() == fac.group.order() {
        return Err(Error::input("T must be a proper nontrivial subgroup of B"));
    }
    let mut diagnostics = Vec::new();
    let normal = fac.group.generators().iter().all(|g| {
        t.generators().iter().all(|h| t.contains(&g.conjugate(h)).unwrap_or(false))
    });
    if normal {
        diagnostics.push("T is normal in B, so T^Ω is normal in Y and its normalizer is not proper".to_string());
    }
    let gens: Vec<Permutation> =
        (0..fac.omega).flat_map(|w| t.generators().iter().map(move |b| (w, b))).map(|(w, b)| y.leaf(0, w, b)).collect();
    let tb = y.subgroup_bits(&gens, caps.enumeration)?;
    let m = y.normalizer(&tb, caps.enumeration)?;
    let bound = (fac.group.order() / t.order()).pow(fac.omega);
    finish(y, m, bound, false, caps, diagnostics)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{Factor, SemidirectGroup, SemidirectSpec};
    use super::*;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn diagonal_of_a5_squared() {
        let y = a5_times_a5();
        let id = a5().generators().to_vec();
        let r = construct_graph_iso(&y, &[0], &[id.clone()], &caps()).unwrap();
        assert_eq!(r.index, BigUint::from(60u32));
        assert_eq!(r.maximal, Some(true));
        assert!(r.clean && r.surjects_onto_x && r.index_bound_holds && r.proper);
        // an inner twist gives a conjugate subgroup
        let b = Permutation::from_cycles("(0 1 2)", 5).unwrap();
        let twisted: Vec<Permutation> = id.iter().map(|g| b.conjugate(g)).collect();
        let r2 = construct_graph_iso(&y, &[0], &[twisted], &caps()).unwrap();
        assert_ne!(r.bits, r2.bits);
        assert_eq!(y.class_key(&r.bits, 10_000).unwrap(), y.class_key(&r2.bits, 10_000).unwrap());
    }

    #[test]
    fn graph_iso_rejects_bad_sigma() {
        let x = PermGroup::from_cycles(2, &["(0 1)"]).unwrap();
        let f2 = |omega: usize| Factor {
            omega,
            action: vec![if omega == 2 { Permutation::from_cycles("(0 1)", 2).unwrap() } else { Permutation::identity(1) }],
            group: a5(),
        };
        let y = SemidirectGroup::new(SemidirectSpec::new(x, vec![f2(2), f2(1)]).unwrap()).unwrap();
        let id = a5().generators().to_vec();
        assert!(construct_graph_iso(&y, &[0, 0], &[id.clone(), id], &caps()).is_err());
    }

    #[test]
    fn normalizer_of_a4() {
        let y = natural(trivial_x(), a5());
        let a4 = vec![Permutation::from_cycles("(0 1 2)", 5).unwrap(), Permutation::from_cycles("(0 1)(2 3)", 5).unwrap()];
        let r = construct_normalizer_t(&y, &a4, &caps()).unwrap();
        assert_eq!(r.index, BigUint::from(5u32));
        assert_eq!(r.maximal, Some(true));
        assert!(r.index_bound_holds);
        assert!(construct_normalizer_t(&y, a5().generators(), &caps()).is_err());
    }

    #[test]
    fn normal_t_is_flagged() {
        let b = a5_power(2);
        let y = natural(trivial_x(), b);
        let first: Vec<Permutation> = a5_power(2).generators()[..2].to_vec();
        let r = construct_normalizer_t(&y, &first, &caps()).unwrap();
        assert!(!r.proper);
        assert_eq!(r.diagnostics.len(), 1);
    }

    #[test]
    fn subdiagonal_indices() {
        // r = 2, Ω a singleton, one pairing block
        let b = a5_power(2);
        let y = natural(trivial_x(), b.clone());
        let data = SubdiagonalData {
            factors: vec![b.generators()[..2].to_vec(), b.generators()[2..].to_vec()],
            partition: vec![vec![0, 1]],
            twists: None,
        };
        let r = construct_subdiagonal(&y, &data, &caps()).unwrap();
        assert!(r.index_matches);
        assert_eq!(r.index, BigUint::from(60u32));
        let m = r.normalizer.unwrap();
        assert_eq!(m.maximal, Some(true));
        // singleton blocks are rejected
        let bad = SubdiagonalData { partition: vec![vec![0], vec![1]], ..data };
        assert!(construct_subdiagonal(&y, &bad, &caps()).is_err());
    }

    #[test]
    fn subdiagonal_over_swapped_pair() {
        let y = c2_swap_a5();
        let data = SubdiagonalData { factors: vec![a5().generators().to_vec()], partition: vec![vec![0, 1]], twists: None };
        let r = construct_subdiagonal(&y, &data, &caps()).unwrap();
        assert_eq!(r.index, BigUint::from(60u32));
        let m = r.normalizer.unwrap();
        assert_eq!(m.index, BigUint::from(60u32));
        assert!(m.index_bound_holds && m.surjects_onto_x && m.clean);
        assert_eq!(m.maximal, Some(true));
    }
}
