use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Pow};
use serde::Serialize;

use super::{construct_graph_iso, SemidirectGroup};
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::lattice::{automorphisms, isomorphism, simple_power, Bitset, SubgroupLattice};
use crate::par::{self, Execution};
use crate::permcore::{PermGroup, Permutation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    GraphIso,
    Subdiagonal,
    NormalizerT,
    Section,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseWitness {
    /// `M ∩ (B_1^{Ω_1} × B_2^{Ω_2})` is the graph of an isomorphism that
    /// carries coordinate `w` of `Ω_1` to `sigma[w]`.
    GraphIso {
        #[serde(with = "crate::io::uint")]
        intersection_order: BigUint,
        sigma: Vec<usize>,
    },
    /// `U = T^r ⊴ B` with `pr_w(M ∩ U^Ω) = U` at every coordinate.
    Subdiagonal {
        u_order: usize,
        t_order: usize,
        r: usize,
        #[serde(with = "crate::io::uint")]
        intersection_order: BigUint,
    },
    /// `T = pr_w(M ∩ B^Ω)` is proper, and `M = N_Y(∏_w pr_w(M ∩ B^Ω))`.
    NormalizerT {
        t_order: usize,
        b_order: usize,
        normalizer_matches: bool,
    },
    /// `M = {(x, h_x)}`: the values `h_x` at the generators of `X`.
    Section { cocycle: Vec<CocycleValue> },
}

#[derive(Clone, Debug, Serialize)]
pub struct CocycleValue {
    pub x: Permutation,
    pub h: Vec<Vec<Permutation>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MaximalClassReport {
    #[serde(with = "crate::io::uint")]
    pub order: BigUint,
    #[serde(with = "crate::io::uint")]
    pub index: BigUint,
    pub case: Option<CaseTag>,
    pub witness: Option<CaseWitness>,
    pub clean: bool,
    pub surjects_onto_x: bool,
    /// `None` when `|Y|` is above the maximality cap and maximality was
    /// taken on trust.
    pub maximal: Option<bool>,
    /// `M^0 ∩ ∏ B_i^{Ω_i} = e`.
    pub core_meets_base_trivially: bool,
    #[serde(with = "crate::io::uint")]
    pub standard_core_order: BigUint,
    /// Classified in `Y/M_s` because `M` is not clean.
    pub via_quotient: bool,
    #[serde(with = "crate::io::opt_uint")]
    pub index_bound: Option<BigUint>,
    pub index_bound_holds: Option<bool>,
    pub diagnostic: Option<String>,
}

/// Assign the case of a clean maximal subgroup `M` with `π(M) = X`. A
/// non-clean `M` is classified through `Y/M_s`; anything else yields a
/// diagnostic and no tag.
pub fn classify_maximal(y: &SemidirectGroup, m: &Bitset, caps: &Caps) -> Result<MaximalClassReport> {
    let cap = caps.enumeration;
    let t = y.table(cap)?;
    let order = BigUint::from(m.count());
    let index = y.order() / &order;
    let mut report = MaximalClassReport {
        order,
        index,
        case: None,
        witness: None,
        clean: false,
        surjects_onto_x: y.surjects(m, cap)?,
        maximal: None,
        core_meets_base_trivially: false,
        standard_core_order: BigUint::one(),
        via_quotient: false,
        index_bound: None,
        index_bound_holds: None,
        diagnostic: None,
    };
    if y.order() <= BigUint::from(caps.maximality) {
        let mx = y.maximality(m, cap)?;
        report.maximal = Some(mx.maximal);
        if !mx.proper {
            report.diagnostic = Some("M = Y is not proper".into());
            return Ok(report);
        }
        if !mx.maximal {
            let w = mx.witness.map(|w| w.to_string()).unwrap_or_default();
            report.diagnostic = Some(format!("M is not maximal: ⟨M, {w}⟩ is a proper subgroup"));
            return Ok(report);
        }
    }
    if !report.surjects_onto_x {
        report.diagnostic = Some("π(M) ≠ X".into());
        return Ok(report);
    }
    let core = y.base_intersection(&y.core(m, cap)?, cap)?;
    report.core_meets_base_trivially = core.count() == 1;
    let std_core = y.standard_core(m, cap)?;
    report.standard_core_order = std_core.order.clone();
    if !std_core.is_trivial() {
        let Some((q, maps)) = y.quotient_by(&std_core, cap)? else {
            report.diagnostic = Some("M contains the whole base and is not proper".into());
            return Ok(report);
        };
        let gens = t
            .subgroup_generators(m)
            .iter()
            .map(|&a| y.map_to_quotient(&q, &maps, t.element(a)))
            .collect::<Result<Vec<_>>>()?;
        let mq = q.subgroup_bits(&gens, cap)?;
        let inner = classify_maximal(&q, &mq, caps)?;
        return Ok(MaximalClassReport {
            order: report.order,
            index: report.index,
            clean: false,
            via_quotient: true,
            standard_core_order: report.standard_core_order,
            core_meets_base_trivially: report.core_meets_base_trivially,
            maximal: report.maximal.or(inner.maximal),
            ..inner
        });
    }
    report.clean = true;
    let inter = y.base_intersection(m, cap)?;
    let spec = y.spec();
    match spec.t() {
        2 => classify_graph(y, &inter, &mut report, cap)?,
        1 => classify_single(y, m, &inter, &mut report, caps)?,
        t => {
            return Err(Error::invariant(format!(
                "a clean maximal subgroup surjecting onto X exists with {t} factors"
            )))
        }
    }
    if let Some(bound) = &report.index_bound {
        let holds = if report.case == Some(CaseTag::Subdiagonal) {
            &report.index * &report.index >= *bound
        } else {
            report.index >= *bound
        };
        report.index_bound_holds = Some(holds);
    }
    Ok(report)
}

fn classify_graph(y: &SemidirectGroup, inter: &Bitset, report: &mut MaximalClassReport, cap: usize) -> Result<()> {
    let t = y.table(cap)?;
    let spec = y.spec();
    let (f1, f2) = (&spec.factors()[0], &spec.factors()[1]);
    let is_identity_on = |a: usize, i: usize| {
        let e = t.element(a);
        (0..spec.factors()[i].omega).all(|w| y.coordinate(e, i, w).is_identity())
    };
    let faithful_both = inter.iter().all(|a| a == 0 || (!is_identity_on(a, 0) && !is_identity_on(a, 1)));
    let full1 = f1.group.order().pow(f1.omega);
    let full2 = f2.group.order().pow(f2.omega);
    let io = BigUint::from(inter.count());
    if !(faithful_both && io == full1 && io == full2) {
        return Err(Error::invariant("clean maximal subgroup with two factors is not of graph type"));
    }
    // σ from elements supported at a single coordinate of Ω_1
    let mut sigma = vec![usize::MAX; f1.omega];
    for a in inter.iter() {
        let e = t.element(a);
        let s1: Vec<usize> = (0..f1.omega).filter(|&w| !y.coordinate(e, 0, w).is_identity()).collect();
        if s1.len() == 1 && sigma[s1[0]] == usize::MAX {
            let s2: Vec<usize> = (0..f2.omega).filter(|&v| !y.coordinate(e, 1, v).is_identity()).collect();
            if s2.len() == 1 {
                sigma[s1[0]] = s2[0];
            }
        }
    }
    report.case = Some(CaseTag::GraphIso);
    report.witness = Some(CaseWitness::GraphIso { intersection_order: io, sigma });
    report.index_bound = Some(full1);
    Ok(())
}

fn classify_single(
    y: &SemidirectGroup,
    m: &Bitset,
    inter: &Bitset,
    report: &mut MaximalClassReport,
    caps: &Caps,
) -> Result<()> {
    let cap = caps.enumeration;
    let t = y.table(cap)?;
    let fac = &y.spec().factors()[0];
    let b = &fac.group;
    if inter.count() == 1 {
        let mut cocycle = Vec::new();
        for x in y.spec().x().generators() {
            let a = m
                .iter()
                .find(|&a| &y.project(t.element(a)) == x)
                .ok_or_else(|| Error::invariant("section misses a generator of X"))?;
            cocycle.push(CocycleValue { x: x.clone(), h: y.decode(t.element(a)).f });
        }
        report.case = Some(CaseTag::Section);
        report.witness = Some(CaseWitness::Section { cocycle });
        return Ok(());
    }
    let igens: Vec<Permutation> = t.subgroup_generators(inter).iter().map(|&a| t.element(a).clone()).collect();
    let projections = (0..fac.omega)
        .map(|w| PermGroup::new(b.degree(), igens.iter().map(|g| y.coordinate(g, 0, w)).collect()))
        .collect::<Result<Vec<_>>>()?;
    let b_order = b.order();
    if projections.iter().all(|p| p.order() == b_order) {
        // U: a minimal normal N with M ∩ N^Ω ≠ e, else B itself
        let lat = SubgroupLattice::build(b, caps.lattice_order)?;
        let normals = lat.normal_subgroups();
        let minimal: Vec<usize> = normals
            .iter()
            .copied()
            .filter(|&k| k != lat.trivial())
            .filter(|&k| !normals.iter().any(|&j| j != k && j != lat.trivial() && lat.includes(k, j)))
            .collect();
        let mut u = b.clone();
        for k in minimal {
            let n = lat.subgroup_group(k);
            let meets = inter.iter().any(|a| {
                a != 0 && {
                    let e = t.element(a);
                    (0..fac.omega).all(|w| n.contains(&y.coordinate(e, 0, w)).unwrap_or(false))
                }
            });
            if meets {
                u = n;
                break;
            }
        }
        let sp = simple_power(&u, caps.lattice_order)?
            .ok_or_else(|| Error::invariant("U is not a power of a non-abelian simple group"))?;
        let u_order = u.order();
        report.case = Some(CaseTag::Subdiagonal);
        report.witness = Some(CaseWitness::Subdiagonal {
            u_order: sp.factor_order.pow(sp.r as u32),
            t_order: sp.factor_order,
            r: sp.r,
            intersection_order: BigUint::from(inter.count()),
        });
        // compared after squaring: [Y:M]^2 ≥ |U|^{|Ω|}
        report.index_bound = Some(u_order.pow(fac.omega));
    } else {
        let tw = &projections[0];
        let gens: Vec<Permutation> = projections
            .iter()
            .enumerate()
            .flat_map(|(w, p)| p.generators().iter().map(move |g| y.leaf(0, w, g)).collect::<Vec<_>>())
            .collect();
        let prod = y.subgroup_bits(&gens, cap)?;
        let normalizer_matches = &y.normalizer(&prod, cap)? == m;
        let t_order = tw.order();
        report.case = Some(CaseTag::NormalizerT);
        report.witness = Some(CaseWitness::NormalizerT {
            t_order: usize::try_from(&t_order).unwrap_or(usize::MAX),
            b_order: usize::try_from(&b_order).unwrap_or(usize::MAX),
            normalizer_matches,
        });
        report.index_bound = Some((b_order / t_order).pow(fac.omega));
    }
    Ok(())
}

/// Graph-type clean maximal subgroups up to conjugacy, against the bound
/// `|Out(B_1)| · |{v ∈ Ω_2 : Stab_X(v) = Stab_X(v_1)}|`.
#[derive(Clone, Debug, Serialize)]
pub struct GraphIsoCount {
    pub classes: usize,
    pub out_order: usize,
    pub eligible: usize,
    pub bound: usize,
    pub holds: bool,
    pub candidates: usize,
}

/// Enumerate every `M = N_Y(graph(F))` over `X`-equivariant bijections `σ`
/// and families `φ_w = α_w ∘ φ_0` with `α_w ∈ Aut(B_2)`, and count the
/// `Y`-classes of those that are proper, maximal, clean and surject onto `X`.
pub fn count_graph_iso_classes(y: &SemidirectGroup, caps: &Caps, exec: Execution) -> Result<GraphIsoCount> {
    let spec = y.spec();
    if spec.t() != 2 {
        return Err(Error::input("graph-type subgroups need exactly two factors"));
    }
    let (f1, f2) = (&spec.factors()[0], &spec.factors()[1]);
    let out_order = automorphisms(&f1.group, caps.lattice_order)?.out_order();
    let eligible = eligible_points(y)?;
    let bound = out_order * eligible;
    let iso = if f1.omega == f2.omega { isomorphism(&f1.group, &f2.group, caps.lattice_order)? } else { None };
    let Some(phi0) = iso else {
        return Ok(GraphIsoCount { classes: 0, out_order, eligible, bound, holds: true, candidates: 0 });
    };
    let sigmas = equivariant_bijections(y);
    let aut = automorphisms(&f2.group, caps.lattice_order)?;
    let b2 = crate::lattice::ElementTable::new(&f2.group, caps.lattice_order)?;
    let phi0_idx: Vec<usize> = phi0.iter().map(|p| b2.index_of(p).expect("image in B_2")).collect();
    let naut = aut.maps.len();
    let per_sigma = (naut as f64).powi(f1.omega as i32);
    let total = per_sigma * sigmas.len() as f64;
    if total > caps.enumeration as f64 {
        return Err(Error::cap(
            format!("{total:.3e} graph candidates"),
            format!("enumeration = {}", caps.enumeration),
        ));
    }
    let per_sigma = per_sigma as usize;
    y.table(caps.enumeration)?;
    let jobs: Vec<(usize, usize)> =
        (0..sigmas.len()).flat_map(|s| (0..per_sigma).map(move |c| (s, c))).collect();
    let keys: Vec<Option<Bitset>> = par::map(exec, &jobs, |&(s, mut code)| {
        let phi: Vec<Vec<Permutation>> = (0..f1.omega)
            .map(|_| {
                let alpha = &aut.maps[code % naut];
                code /= naut;
                phi0_idx.iter().map(|&i| b2.element(alpha[i] as usize).clone()).collect()
            })
            .collect();
        let r = construct_graph_iso(y, &sigmas[s], &phi, caps).ok()?;
        if r.proper && r.maximal != Some(false) && r.clean && r.surjects_onto_x {
            y.class_key(&r.bits, caps.enumeration).ok()
        } else {
            None
        }
    });
    let classes: BTreeSet<Bitset> = keys.into_iter().flatten().collect();
    Ok(GraphIsoCount { classes: classes.len(), out_order, eligible, bound, holds: classes.len() <= bound, candidates: jobs.len() })
}

/// All `X`-equivariant bijections `Ω_1 → Ω_2`.
fn equivariant_bijections(y: &SemidirectGroup) -> Vec<Vec<usize>> {
    let spec = y.spec();
    let (f1, f2) = (&spec.factors()[0], &spec.factors()[1]);
    let mut out = Vec::new();
    if f1.omega != f2.omega {
        return out;
    }
    'start: for v0 in 0..f2.omega {
        let mut sigma = vec![usize::MAX; f1.omega];
        sigma[0] = v0;
        let mut queue = vec![0usize];
        let mut k = 0;
        while k < queue.len() {
            let w = queue[k];
            k += 1;
            for (a1, a2) in f1.action.iter().zip(&f2.action) {
                let (w2, v2) = (a1.apply(w), a2.apply(sigma[w]));
                if sigma[w2] == usize::MAX {
                    sigma[w2] = v2;
                    queue.push(w2);
                } else if sigma[w2] != v2 {
                    continue 'start;
                }
            }
        }
        let mut seen = vec![false; f2.omega];
        if sigma.iter().all(|&v| !std::mem::replace(&mut seen[v], true)) {
            out.push(sigma);
        }
    }
    out
}

/// `|{v ∈ Ω_2 : Stab_X(v) = Stab_X(v_1)}|` with `v_1 = 0 ∈ Ω_1`.
fn eligible_points(y: &SemidirectGroup) -> Result<usize> {
    let spec = y.spec();
    let stab = |i: usize, v: usize| -> Result<PermGroup> {
        let f = &spec.factors()[i];
        let dx = spec.x().degree();
        let gens: Vec<Permutation> =
            spec.x().generators().iter().zip(&f.action).map(|(x, a)| Permutation::direct_sum(&[x, a])).collect();
        let g = PermGroup::new(dx + f.omega, gens)?;
        g.stabilizer(dx + v)?.restrict(&(0..dx as u32).collect::<Vec<_>>())
    };
    let s1 = stab(0, 0)?;
    let mut n = 0;
    for v in 0..spec.factors()[1].omega {
        let s = stab(1, v)?;
        if s.order() == s1.order() && s.is_subgroup_of(&s1)? {
            n += 1;
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{construct_normalizer_t, construct_subdiagonal, Factor, SemidirectGroup, SemidirectSpec, SubdiagonalData};
    use super::*;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn diagonal_is_graph_type() {
        let y = a5_times_a5();
        let r = construct_graph_iso(&y, &[0], &[a5().generators().to_vec()], &caps()).unwrap();
        let c = classify_maximal(&y, &r.bits, &caps()).unwrap();
        assert_eq!(c.case, Some(CaseTag::GraphIso));
        assert_eq!(c.index_bound_holds, Some(true));
        assert!(c.clean && c.core_meets_base_trivially);
        match c.witness {
            Some(CaseWitness::GraphIso { sigma, .. }) => assert_eq!(sigma, vec![0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn graph_classes_of_a5_squared() {
        let y = a5_times_a5();
        let n = count_graph_iso_classes(&y, &caps(), Execution::Parallel).unwrap();
        assert_eq!((n.classes, n.bound, n.out_order, n.eligible), (2, 2, 2, 1));
        assert!(n.holds);
    }

    #[test]
    fn normalizer_case() {
        let y = natural(trivial_x(), a5());
        let a4 = vec![Permutation::from_cycles("(0 1 2)", 5).unwrap(), Permutation::from_cycles("(0 1)(2 3)", 5).unwrap()];
        let r = construct_normalizer_t(&y, &a4, &caps()).unwrap();
        let c = classify_maximal(&y, &r.bits, &caps()).unwrap();
        assert_eq!(c.case, Some(CaseTag::NormalizerT));
        assert_eq!(c.index_bound_holds, Some(true));
        match c.witness {
            Some(CaseWitness::NormalizerT { t_order, normalizer_matches, .. }) => {
                assert_eq!(t_order, 12);
                assert!(normalizer_matches);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn subdiagonal_case_over_swapped_pair() {
        let y = c2_swap_a5();
        let data = SubdiagonalData { factors: vec![a5().generators().to_vec()], partition: vec![vec![0, 1]], twists: None };
        let m = construct_subdiagonal(&y, &data, &caps()).unwrap().normalizer.unwrap();
        let c = classify_maximal(&y, &m.bits, &caps()).unwrap();
        assert_eq!(c.case, Some(CaseTag::Subdiagonal));
        assert_eq!(c.index_bound_holds, Some(true));
    }

    #[test]
    fn section_case() {
        // X = A_5 acting trivially on a singleton, M the graph of the identity
        let x = a5();
        let f = Factor { omega: 1, action: vec![Permutation::identity(1); x.generators().len()], group: a5() };
        let y = SemidirectGroup::new(SemidirectSpec::new(x.clone(), vec![f]).unwrap()).unwrap();
        let gens: Vec<Permutation> = x
            .generators()
            .iter()
            .map(|g| y.encode(&super::super::StructuredElement { x: g.clone(), f: vec![vec![g.clone()]] }).unwrap())
            .collect();
        let m = y.subgroup_bits(&gens, 100_000).unwrap();
        let c = classify_maximal(&y, &m, &caps()).unwrap();
        assert_eq!(c.case, Some(CaseTag::Section));
        assert_eq!(c.index, BigUint::from(60u32));
        match c.witness {
            Some(CaseWitness::Section { cocycle }) => assert_eq!(cocycle.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn complement_in_swapped_square_is_not_maximal() {
        let y = c2_swap_a5();
        let x = y.spec().x().generators()[0].clone();
        let lift = y.encode(&super::super::StructuredElement {
            x,
            f: vec![vec![Permutation::identity(5); 2]],
        })
        .unwrap();
        let m = y.subgroup_bits(&[lift], 100_000).unwrap();
        let c = classify_maximal(&y, &m, &caps()).unwrap();
        assert_eq!(c.case, None);
        assert_eq!(c.maximal, Some(false));
        assert!(c.diagnostic.unwrap().contains("not maximal"));
    }

    #[test]
    fn non_clean_goes_through_quotient() {
        // M = A_5 × A_4 has standard core A_5 × 1
        let y = a5_times_a5();
        let mut gens: Vec<Permutation> = a5().generators().iter().map(|b| y.leaf(0, 0, b)).collect();
        gens.push(y.leaf(1, 0, &Permutation::from_cycles("(0 1 2)", 5).unwrap()));
        gens.push(y.leaf(1, 0, &Permutation::from_cycles("(0 1)(2 3)", 5).unwrap()));
        let m = y.subgroup_bits(&gens, 100_000).unwrap();
        let c = classify_maximal(&y, &m, &caps()).unwrap();
        assert!(c.via_quotient && !c.clean);
        assert_eq!(c.case, Some(CaseTag::NormalizerT));
        assert_eq!(c.index, BigUint::from(5u32));
    }
}
