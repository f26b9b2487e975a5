use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive};
use serde::Serialize;

use super::log2;
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::lattice::{self, hom_count, simple_power, SubgroupLattice};
use crate::par::Execution;
use crate::permcore::{count_invariant_partitions, PermGroup};
use crate::semidirect::{Factor, SemidirectGroup, SemidirectSpec};
use crate::tower::TowerSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ComputedExact,
    ComputedBound,
    UserSupplied,
}

impl Provenance {
    fn join(self, other: Provenance) -> Provenance {
        match (self, other) {
            (Provenance::ComputedExact, Provenance::ComputedExact) => Provenance::ComputedExact,
            _ => Provenance::ComputedBound,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Constant {
    pub name: String,
    #[serde(with = "crate::io::uint")]
    pub value: BigUint,
    #[serde(with = "crate::io::ratio")]
    pub log2_upper: BigRational,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Constant {
    fn new(name: &str, value: BigUint, provenance: Provenance, note: Option<String>) -> Self {
        let value = value.max(BigUint::one());
        Constant { name: name.into(), log2_upper: log2::upper(&value), value, provenance, note }
    }
}

/// A normal subgroup `N ≅ T^r` of a nontrivial quotient `B` of `L`, with `T`
/// non-abelian simple.
#[derive(Clone, Debug, Serialize)]
pub struct Case2Pair {
    pub quotient_order: usize,
    pub n_order: usize,
    pub r: usize,
    pub t_order: usize,
    pub out_t: usize,
}

/// User-supplied constant values, by name.
#[derive(Clone, Debug, Default)]
pub struct Overrides(BTreeMap<String, BigUint>);

impl Overrides {
    pub const NAMES: [&'static str; 7] = ["C1", "C2", "C3", "C6", "C7", "C9", "K"];

    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: &str, value: BigUint) -> Result<()> {
        let key = name.trim();
        if !Self::NAMES.contains(&key) {
            return Err(Error::input(format!("unknown constant {key:?}; expected one of {:?}", Self::NAMES)));
        }
        if value < BigUint::one() {
            return Err(Error::input(format!("{key} must be at least 1")));
        }
        self.0.insert(key.to_string(), value);
        Ok(())
    }

    /// Parse `NAME=value`.
    pub fn parse_assignment(&mut self, text: &str) -> Result<()> {
        let (name, value) =
            text.split_once('=').ok_or_else(|| Error::input(format!("expected NAME=value, got {text:?}")))?;
        let value: BigUint =
            value.trim().parse().map_err(|_| Error::input(format!("{name}: {value:?} is not a positive integer")))?;
        self.set(name, value)
    }

    fn get(&self, name: &str) -> Option<Constant> {
        self.0.get(name).map(|v| Constant::new(name, v.clone(), Provenance::UserSupplied, None))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstantsReport {
    pub c1: Constant,
    pub c2: Constant,
    pub c3: Constant,
    pub c6: Constant,
    pub c7: Constant,
    pub c9: Constant,
    pub k: Constant,
    /// Upper bound on `log2 C_8 = (K+1)/2 · log2 C_7 + K · log2 |D|`.
    #[serde(with = "crate::io::ratio")]
    pub c8_log2_upper: BigRational,
    /// `C_8^2 = C_7^{K+1} |D|^{2K}` when small enough to write out.
    #[serde(with = "crate::io::opt_uint")]
    pub c8_squared: Option<BigUint>,
    pub degree: usize,
    pub orbit_count: usize,
    pub orbit_sizes: Vec<usize>,
    pub case2_pairs: Vec<Case2Pair>,
    pub crude_bounds: bool,
}

impl ConstantsReport {
    pub fn all(&self) -> [&Constant; 7] {
        [&self.c1, &self.c2, &self.c3, &self.c6, &self.c7, &self.c9, &self.k]
    }

    /// Recompute `C_8` from `C_7`, `K` and `|D|` and compare with the stored
    /// values.
    pub fn c8_consistent(&self) -> bool {
        let expected = c8_log2(&self.c7.log2_upper, &self.k.value, self.degree);
        let squared_ok = match &self.c8_squared {
            None => true,
            Some(s) => Some(s.clone()) == c8_squared(&self.c7.value, &self.k.value, self.degree),
        };
        expected == self.c8_log2_upper && squared_ok
    }
}

/// Largest exact `C_8^2` that is written out, in bits.
const C8_BITS: u64 = 1 << 16;

fn c8_log2(c7_log2: &BigRational, k: &BigUint, degree: usize) -> BigRational {
    let half = BigRational::new(1.into(), 2.into());
    log2::scale(c7_log2, &(k + 1u32)) * half + log2::scale(&log2::upper_usize(degree), k)
}

fn c8_squared(c7: &BigUint, k: &BigUint, degree: usize) -> Option<BigUint> {
    let k = k.to_u64()?;
    let bits = (k + 1).checked_mul(c7.bits())?.checked_add((2 * k).checked_mul(64 - (degree as u64).leading_zeros() as u64)?)?;
    if bits > C8_BITS {
        return None;
    }
    Some(Pow::pow(c7, k + 1) * Pow::pow(BigUint::from(degree), 2 * k))
}

fn bell(n: usize) -> BigUint {
    let mut row = vec![BigUint::one()];
    for _ in 1..n.max(1) {
        let mut next = vec![row.last().unwrap().clone()];
        for x in &row {
            let v = next.last().unwrap() + x;
            next.push(v);
        }
        row = next;
    }
    if n == 0 {
        BigUint::one()
    } else {
        row.last().unwrap().clone()
    }
}

/// Order bound at which `Hom(L, ·)` is counted exhaustively.
pub const HOM_ORDER: u64 = 100_000;

struct Computer<'a> {
    spec: &'a TowerSpec,
    caps: &'a Caps,
    exec: Execution,
    crude: bool,
}

impl Computer<'_> {
    fn uncomputable(&self, name: &str, why: String) -> Error {
        Error::cap(
            format!("constant {name} cannot be computed ({why}); supply it with an override or enable crude bounds"),
            "caps",
        )
    }

    fn c3(&self) -> Result<Constant> {
        let l = self.spec.base();
        let mut best = BigUint::one();
        let mut prov = Provenance::ComputedExact;
        for orbit in self.spec.orbits() {
            let count = if orbit.len() <= self.caps.partition_domain {
                BigUint::from(count_invariant_partitions(l, orbit, self.caps.partition_domain)?)
            } else if self.crude {
                prov = Provenance::ComputedBound;
                bell(orbit.len())
            } else {
                return Err(self.uncomputable("C3", format!("an orbit has {} points", orbit.len())));
            };
            best = best.max(count);
        }
        let note = (prov == Provenance::ComputedBound).then(|| "Bell number of the orbit size".to_string());
        Ok(Constant::new("C3", best, prov, note))
    }

    /// `L ⋉ B^{D_j}` with `L` permuting the coordinates through its action
    /// on the orbit.
    fn extension(&self, b: &PermGroup, orbit: &[u32]) -> Result<PermGroup> {
        let l = self.spec.base();
        if b.is_trivial() {
            return Ok(l.clone());
        }
        let action = l.generators().iter().map(|g| g.restrict(orbit)).collect::<Result<Vec<_>>>()?;
        let spec = SemidirectSpec::new(l.clone(), vec![Factor { omega: orbit.len(), action, group: b.clone() }])?;
        Ok(SemidirectGroup::new(spec)?.group().clone())
    }

    /// `C_7` and `K` from every quotient `B` (trivial included) and orbit.
    fn c7_and_k(&self, quotients: &[PermGroup], need_c7: bool, need_k: bool) -> Result<(Option<Constant>, Option<Constant>)> {
        let l = self.spec.base();
        let l_order = l.order();
        let gens = l.reduced_generators().len() as u64;
        let (mut c7, mut c7_prov) = (BigUint::one(), Provenance::ComputedExact);
        let (mut k, mut k_prov) = (BigUint::one(), Provenance::ComputedExact);
        for b in quotients {
            for orbit in self.spec.orbits() {
                let order = &l_order * Pow::pow(b.order(), orbit.len());
                let small = order <= BigUint::from(HOM_ORDER);
                let g = if small { Some(self.extension(b, orbit)?) } else { None };
                if need_c7 {
                    let exact = match &g {
                        Some(g) => match hom_count(l, g, self.caps, self.exec) {
                            Ok(n) => Some(BigUint::from(n)),
                            Err(Error::Cap { .. }) if self.crude => None,
                            Err(e) => return Err(e),
                        },
                        None => None,
                    };
                    let value = match exact {
                        Some(v) => v,
                        None if self.crude => {
                            c7_prov = c7_prov.join(Provenance::ComputedBound);
                            Pow::pow(&order, gens)
                        }
                        None => return Err(self.uncomputable("C7", format!("|L ⋉ B^D_j| = {order} exceeds {HOM_ORDER}"))),
                    };
                    c7 = c7.max(value);
                }
                if need_k {
                    let value = match &g {
                        Some(g) if order <= BigUint::from(self.caps.lattice_order) => {
                            BigUint::from(SubgroupLattice::build_with(g, self.caps.lattice_order, self.exec)?.count_nonabelian())
                        }
                        _ if self.crude => {
                            k_prov = k_prov.join(Provenance::ComputedBound);
                            Pow::pow(&order, log2::floor_log2(&order))
                        }
                        _ => {
                            return Err(self.uncomputable(
                                "K",
                                format!("|L ⋉ B^D_j| = {order} exceeds lattice_order = {}", self.caps.lattice_order),
                            ))
                        }
                    };
                    k = k.max(value);
                }
            }
        }
        let note = |p: Provenance, s: &str| (p == Provenance::ComputedBound).then(|| s.to_string());
        Ok((
            need_c7.then(|| Constant::new("C7", c7, c7_prov, note(c7_prov, "|G|^d(L) for the largest extensions"))),
            need_k.then(|| Constant::new("K", k, k_prov, note(k_prov, "|G|^⌊log2 |G|⌋ for the largest extensions"))),
        ))
    }
}

/// The constants of a YES tower. Overridden constants are taken as given;
/// the others are computed exactly within `caps`, or by the crude bounds
/// `C_3 ≤ Bell(|D_i|)`, `C_7 ≤ |G|^{d(L)}`, `K ≤ |G|^{⌊log2|G|⌋}` when
/// `crude_bounds` is set. Anything else fails with an error naming the
/// constant.
pub fn constants(spec: &TowerSpec, overrides: &Overrides, crude_bounds: bool, caps: &Caps, exec: Execution) -> Result<ConstantsReport> {
    let l = spec.base();
    if !l.is_perfect().perfect || !spec.fixed_points().is_empty() {
        return Err(Error::input("constants are only defined for towers whose limit is finitely generated"));
    }
    let comp = Computer { spec, caps, exec, crude: crude_bounds };
    let lat = SubgroupLattice::build_with(l, caps.lattice_order, exec)
        .map_err(|e| Error::cap(format!("subgroup lattice of L is required for the constants: {e}"), caps.lattice_order))?;
    let normals = lat.normal_subgroups();
    let quotients = lattice::all_quotients(&lat);

    let c1 = match overrides.get("C1") {
        Some(c) => c,
        None => Constant::new("C1", lattice::simple_quotient_kernels(&lat).len().into(), Provenance::ComputedExact, None),
    };
    let c2 = match overrides.get("C2") {
        Some(c) => c,
        None => {
            let mut best = 1usize;
            for k in lattice::simple_quotient_kernels(&lat) {
                best = best.max(lattice::out_order(&lattice::quotient(&lat, k).group, caps.enumeration)?);
            }
            Constant::new("C2", best.into(), Provenance::ComputedExact, None)
        }
    };
    let c3 = match overrides.get("C3") {
        Some(c) => c,
        None => comp.c3()?,
    };
    let c6 = match overrides.get("C6") {
        Some(c) => c,
        None => {
            let total: usize = normals.iter().map(|&k| lat.count_overgroups(k)).sum();
            Constant::new("C6", total.into(), Provenance::ComputedExact, Some("subgroups summed over all quotients".into()))
        }
    };
    let c9 = match overrides.get("C9") {
        Some(c) => c,
        None => Constant::new("C9", normals.len().into(), Provenance::ComputedExact, None),
    };
    let groups: Vec<PermGroup> = quotients.iter().map(|q| q.group.clone()).collect();
    let (c7o, ko) = (overrides.get("C7"), overrides.get("K"));
    let (c7c, kc) = comp.c7_and_k(&groups, c7o.is_none(), ko.is_none())?;
    let c7 = c7o.or(c7c).expect("computed when not overridden");
    let k = ko.or(kc).expect("computed when not overridden");

    let mut case2_pairs = Vec::new();
    for q in quotients.iter().filter(|q| q.order() > 1) {
        let blat = SubgroupLattice::build_with(&q.group, caps.lattice_order, exec)?;
        for n in blat.normal_subgroups() {
            if n == blat.trivial() {
                continue;
            }
            if let Some(sp) = simple_power(&blat.subgroup_group(n), caps.lattice_order)? {
                case2_pairs.push(Case2Pair {
                    quotient_order: q.order(),
                    n_order: blat.subgroups()[n].order,
                    r: sp.r,
                    t_order: sp.factor_order,
                    out_t: lattice::out_order(&sp.factor, caps.enumeration)?,
                });
            }
        }
    }

    let degree = spec.degree();
    Ok(ConstantsReport {
        c8_log2_upper: c8_log2(&c7.log2_upper, &k.value, degree),
        c8_squared: c8_squared(&c7.value, &k.value, degree),
        c1,
        c2,
        c3,
        c6,
        c7,
        c9,
        k,
        degree,
        orbit_count: spec.orbit_count(),
        orbit_sizes: spec.orbit_sizes(),
        case2_pairs,
        crude_bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn bell_numbers() {
        let b: Vec<u32> = (0..7).map(|n| bell(n).to_u32().unwrap()).collect();
        assert_eq!(b, vec![1, 1, 2, 5, 15, 52, 203]);
    }

    #[test]
    fn a5_constants() {
        let spec = TowerSpec::new(catalog::alternating(5)).unwrap();
        let caps = Caps::default();
        let err = constants(&spec, &Overrides::new(), false, &caps, Execution::Parallel).unwrap_err();
        assert!(err.to_string().contains("C7"), "{err}");

        let c = constants(&spec, &Overrides::new(), true, &caps, Execution::Parallel).unwrap();
        assert_eq!(c.c1.value, 1u32.into());
        assert_eq!(c.c2.value, 2u32.into());
        assert_eq!(c.c3.value, 2u32.into());
        assert_eq!(c.c9.value, 2u32.into());
        // subgroups of A5 plus the trivial quotient
        assert_eq!(c.c6.value, 60u32.into());
        assert_eq!(c.c7.value, Pow::pow(BigUint::from(60u32), 12u32));
        assert_eq!(c.k.value, Pow::pow(BigUint::from(60u32), 210u32));
        assert_eq!(c.c7.provenance, Provenance::ComputedBound);
        assert_eq!(c.case2_pairs.len(), 1);
        assert_eq!((c.case2_pairs[0].r, c.case2_pairs[0].out_t), (1, 2));
        assert!(c.c8_consistent());
        assert!(c.c8_squared.is_none());
    }

    #[test]
    fn overrides_are_used_and_validated() {
        let spec = TowerSpec::new(catalog::alternating(5)).unwrap();
        let mut o = Overrides::new();
        o.parse_assignment("C7=1000000").unwrap();
        o.parse_assignment("K=3").unwrap();
        assert!(o.parse_assignment("C4=3").is_err());
        assert!(o.parse_assignment("C7=0").is_err());
        let c = constants(&spec, &o, false, &Caps::default(), Execution::Parallel).unwrap();
        assert_eq!(c.c7.provenance, Provenance::UserSupplied);
        assert_eq!(c.k.value, 3u32.into());
        assert_eq!(c.c8_squared, Some(Pow::pow(BigUint::from(1_000_000u32), 4u32) * BigUint::from(5u32).pow(6u32)));
        assert!(c.c8_consistent());
    }

    #[test]
    fn refuses_no_towers() {
        let spec = TowerSpec::new(catalog::cyclic(3)).unwrap();
        assert!(constants(&spec, &Overrides::new(), true, &Caps::default(), Execution::Parallel).is_err());
    }
}
