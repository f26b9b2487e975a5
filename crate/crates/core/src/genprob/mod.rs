//! Generation probabilities `p_k`, the zeta function `ζ_{Y|X}` of a
//! surjection and the lower bounds built from them.

mod montecarlo;

pub use montecarlo::{pk_montecarlo, wilson_interval, McEstimate, WILSON_Z};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::Serialize;

use crate::config::Caps;
use crate::error::{Error, Result};
use crate::lattice::{Bitset, ElementTable, SubgroupLattice};
use crate::par::{self, Execution};
use crate::permcore::{Homomorphism, PermGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PkMode {
    Exact,
    Mc,
}

/// `p_k(G)`: exact, or a Monte-Carlo estimate with its interval.
#[derive(Clone, Debug, Serialize)]
pub struct PkResult {
    pub group: Option<String>,
    pub k: u32,
    pub mode: PkMode,
    /// The exact value, or the observed success fraction.
    #[serde(with = "crate::io::ratio")]
    pub value: BigRational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<McEstimate>,
}

fn ratio(n: BigUint, d: BigUint) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Count the `k`-tuples of `g` that generate `g` by walking the tuple tree.
/// A prefix that already generates `g` contributes `|g|^{remaining}` at once.
pub fn pk_exact_exhaustive(g: &PermGroup, k: u32, caps: &Caps, exec: Execution) -> Result<BigRational> {
    let n = g.order();
    let tuples = Pow::pow(&n, k);
    if tuples > BigUint::from(caps.exhaustive_tuples) {
        return Err(Error::cap(format!("{tuples} {k}-tuples"), format!("exhaustive_tuples = {}", caps.exhaustive_tuples)));
    }
    let table = ElementTable::new(g, caps.enumeration)?;
    let size = table.len();
    if k == 0 {
        return Ok(if size == 1 { BigRational::one() } else { BigRational::zero() });
    }
    fn walk(table: &ElementTable, h: &Bitset, depth: u32) -> BigUint {
        let n = table.len();
        if h.count() == n {
            return Pow::pow(BigUint::from(n), depth);
        }
        if depth == 0 {
            return BigUint::zero();
        }
        let inside = BigUint::from(h.count()) * walk(table, h, depth - 1);
        (0..n).filter(|&x| !h.contains(x)).fold(inside, |acc, x| acc + walk(table, &table.join_element(h, x), depth - 1))
    }
    let parts = par::map_range(exec, size, |x| walk(&table, &table.closure(&[x]), k - 1));
    let count: BigUint = parts.into_iter().sum();
    Ok(ratio(count, tuples))
}

/// `p_k` from the Möbius function of the subgroup lattice.
pub fn pk_exact_mobius(g: &PermGroup, k: u32, caps: &Caps) -> Result<BigRational> {
    Ok(SubgroupLattice::build(g, caps.lattice_order)?.pk_mobius(k))
}

/// Exact `p_k` by whichever method the caps allow, lattice first.
pub fn pk_exact(g: &PermGroup, k: u32, caps: &Caps, exec: Execution) -> Result<BigRational> {
    if g.order() <= BigUint::from(caps.lattice_order) {
        pk_exact_mobius(g, k, caps)
    } else {
        pk_exact_exhaustive(g, k, caps, exec)
    }
}

pub fn pk_exact_result(g: &PermGroup, k: u32, caps: &Caps, exec: Execution) -> Result<PkResult> {
    Ok(PkResult {
        group: g.name().map(str::to_string),
        k,
        mode: PkMode::Exact,
        value: pk_exact(g, k, caps, exec)?,
        estimate: None,
    })
}

/// One class of maximal subgroups counted in `ζ_{Y|X}`.
#[derive(Clone, Debug, Serialize)]
pub struct ZetaTerm {
    pub index: usize,
    pub order: usize,
    pub class_size: usize,
    #[serde(with = "crate::io::ratio")]
    pub term: BigRational,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZetaValue {
    pub s: u32,
    pub terms: Vec<ZetaTerm>,
    #[serde(with = "crate::io::ratio")]
    pub total: BigRational,
}

/// `ζ_{Y|X}(s) = Σ 1/[Y:M]^s` over the classes of proper maximal `M ≤ Y`
/// with `π(M) = X`, where `π = pi: Y → X`.
pub fn zeta(pi: &Homomorphism, s: u32, caps: &Caps) -> Result<ZetaValue> {
    let y = pi.source();
    let x = pi.target();
    let lat = SubgroupLattice::build(y, caps.lattice_order)?;
    let mut terms = Vec::new();
    for m in lat.maximal_subgroups() {
        let images = m.representative.generators().iter().map(|g| pi.apply(g)).collect::<Result<Vec<_>>>()?;
        if PermGroup::new(x.degree(), images)?.order() != x.order() {
            continue;
        }
        let term = BigRational::new(BigInt::one(), Pow::pow(BigInt::from(m.index), s));
        terms.push(ZetaTerm { index: m.index, order: m.order, class_size: m.class_size, term });
    }
    terms.sort_by_key(|t| (t.index, t.class_size));
    let total = terms.iter().map(|t| &t.term).sum();
    Ok(ZetaValue { s, terms, total })
}

/// Both sides of `p_k(Y) ≥ (1 − ζ_{Y|X}(k−1)) · p_k(X)`.
#[derive(Clone, Debug, Serialize)]
pub struct QuotientBoundReport {
    pub k: u32,
    #[serde(with = "crate::io::ratio")]
    pub pk_y: BigRational,
    #[serde(with = "crate::io::ratio")]
    pub pk_x: BigRational,
    #[serde(with = "crate::io::ratio")]
    pub zeta: BigRational,
    #[serde(with = "crate::io::ratio")]
    pub rhs: BigRational,
    #[serde(with = "crate::io::ratio")]
    pub slack: BigRational,
    pub holds: bool,
}

pub fn bhattacharjee_check(pi: &Homomorphism, k: u32, caps: &Caps, exec: Execution) -> Result<QuotientBoundReport> {
    if k == 0 {
        return Err(Error::input("k must be at least 1"));
    }
    let pk_y = pk_exact(pi.source(), k, caps, exec)?;
    let pk_x = pk_exact(pi.target(), k, caps, exec)?;
    let zeta = zeta(pi, k - 1, caps)?.total;
    let rhs = (BigRational::one() - &zeta) * &pk_x;
    let slack = &pk_y - &rhs;
    Ok(QuotientBoundReport { k, holds: !slack.is_negative(), pk_y, pk_x, zeta, rhs, slack })
}

/// `∏_n (1 − ζ_n) · p_k(L_{n_1})`, closed off by `1 − tail` where `tail`
/// bounds the sum of all ζ-terms not listed.
#[derive(Clone, Debug, Serialize)]
pub struct TailBound {
    #[serde(with = "crate::io::ratio")]
    pub pk_base: BigRational,
    #[serde(with = "crate::io::ratio")]
    pub tail_sum: BigRational,
    /// `pk_base · ∏_{m ≤ j} (1 − ζ_m)` for every prefix.
    #[serde(serialize_with = "serialize_ratios")]
    pub partial_products: Vec<BigRational>,
    #[serde(with = "crate::io::opt_ratio")]
    pub lower_bound: Option<BigRational>,
    pub void_reason: Option<String>,
}

fn serialize_ratios<S: serde::Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(crate::io::ratio_string))
}

/// `terms` are the ζ values (or upper bounds) at consecutive levels from
/// `n_1` on; `tail_sum` bounds the sum of everything after them.
pub fn tail_bound(terms: &[BigRational], tail_sum: &BigRational, pk_base: &BigRational) -> Result<TailBound> {
    let zero = BigRational::zero();
    let one = BigRational::one();
    if pk_base <= &zero || pk_base > &one {
        return Err(Error::input("p_k at the base level must lie in (0, 1]"));
    }
    if tail_sum.is_negative() || terms.iter().any(|t| t.is_negative()) {
        return Err(Error::input("ζ terms and the tail sum must be non-negative"));
    }
    let mut acc = pk_base.clone();
    let mut partial_products = Vec::with_capacity(terms.len());
    let mut void_reason = None;
    for (j, t) in terms.iter().enumerate() {
        if t >= &one {
            void_reason = Some(format!("term {j} is {} ≥ 1", crate::io::ratio_string(t)));
            break;
        }
        acc *= &one - t;
        partial_products.push(acc.clone());
    }
    if void_reason.is_none() && tail_sum >= &one {
        void_reason = Some(format!("tail sum {} ≥ 1", crate::io::ratio_string(tail_sum)));
    }
    let lower_bound = void_reason.is_none().then(|| acc * (&one - tail_sum));
    Ok(TailBound { pk_base: pk_base.clone(), tail_sum: tail_sum.clone(), partial_products, lower_bound, void_reason })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn exhaustive_values() {
        let caps = Caps::default();
        let ex = Execution::Parallel;
        assert_eq!(pk_exact_exhaustive(&catalog::alternating(5), 2, &caps, ex).unwrap(), r(19, 30));
        assert_eq!(pk_exact_exhaustive(&catalog::trivial(), 1, &caps, ex).unwrap(), r(1, 1));
        assert_eq!(pk_exact_exhaustive(&catalog::klein_four(), 2, &caps, ex).unwrap(), r(3, 8));
        // a generator of C6 is one of the φ(6) = 2 elements of order 6
        assert_eq!(pk_exact_exhaustive(&catalog::cyclic(6), 1, &caps, ex).unwrap(), r(1, 3));
        assert_eq!(
            pk_exact_exhaustive(&catalog::symmetric(3), 2, &caps, Execution::Sequential).unwrap(),
            pk_exact_mobius(&catalog::symmetric(3), 2, &caps).unwrap()
        );
    }

    #[test]
    fn exhaustive_respects_cap() {
        let caps = Caps { exhaustive_tuples: 1000, ..Caps::default() };
        assert!(matches!(pk_exact_exhaustive(&catalog::alternating(5), 2, &caps, Execution::Sequential), Err(Error::Cap { .. })));
    }

    #[test]
    fn zeta_of_a5() {
        let s = catalog::surjections().unwrap();
        let a5 = &s.iter().find(|s| s.name == "A5 -> 1").unwrap().map;
        let z = zeta(a5, 1, &Caps::default()).unwrap();
        assert_eq!(z.total, r(7, 15));
        assert_eq!(z.terms.iter().map(|t| t.index).collect::<Vec<_>>(), vec![5, 6, 10]);
        let id = Homomorphism::new(&catalog::alternating(5), &catalog::alternating(5), catalog::alternating(5).generators().to_vec()).unwrap();
        assert!(zeta(&id, 1, &Caps::default()).unwrap().total.is_zero());
        // C2×C2 → C2 by the first coordinate: ⟨(2 3)⟩ is excluded
        let v = &s.iter().find(|s| s.name == "C2xC2 -> C2").unwrap().map;
        assert_eq!(zeta(v, 1, &Caps::default()).unwrap().total, r(1, 1));
    }

    #[test]
    fn quotient_bound_a5() {
        let s = catalog::surjections().unwrap();
        let a5 = &s.iter().find(|s| s.name == "A5 -> 1").unwrap().map;
        let rep = bhattacharjee_check(a5, 2, &Caps::default(), Execution::Parallel).unwrap();
        assert_eq!(rep.rhs, r(8, 15));
        assert_eq!(rep.pk_y, r(19, 30));
        assert!(rep.holds);
    }

    #[test]
    fn tail_bounds() {
        let half = r(1, 2);
        let t = tail_bound(&[r(0, 1), r(0, 1)], &r(0, 1), &half).unwrap();
        assert_eq!(t.lower_bound, Some(half.clone()));
        // ζ = 1/4, 1/16, 1/256 then a geometric tail 1/256·(1/2 + 1/4 + ..)
        let terms = [r(1, 4), r(1, 16), r(1, 256)];
        let t = tail_bound(&terms, &r(1, 256), &half).unwrap();
        let lb = t.lower_bound.unwrap();
        let sum: BigRational = terms.iter().sum::<BigRational>() + r(1, 256);
        assert!(lb >= &half * (BigRational::one() - sum));
        assert!(t.partial_products.windows(2).all(|w| w[1] <= w[0]));
        let v = tail_bound(&[r(1, 1)], &r(0, 1), &half).unwrap();
        assert!(v.lower_bound.is_none() && v.void_reason.is_some());
    }
}
