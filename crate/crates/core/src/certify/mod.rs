//! Deciding topological finite generation of the limit of a tower, the
//! constants and level-by-level bounds on `ζ_{L_{n+1}|L_n}`, and
//! certificates for positive finite generation.

mod bounds;
mod certificate;
mod constants;
pub mod log2;
mod sections;

pub use bounds::{case_bounds, majorants, orbit_classes, tail_log2, Bound, CaseBounds, Majorant, OrbitClass};
pub use certificate::{certified_k, BoundRow, Certificate, CertifyOptions, GeneratingTuple};
pub use constants::{constants, Case2Pair, Constant, ConstantsReport, Overrides, Provenance, HOM_ORDER};
pub use sections::{count_sections, section_count_bound, SectionBound, SectionStep};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::permcore::PermGroup;
use crate::tower::{AbelianizationWitness, FixedPointWitness, TowerSpec, WitnessCheck};

/// Random pairs on which every NO witness is checked for multiplicativity.
pub const WITNESS_PAIRS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Decision {
    #[serde(rename = "YES")]
    Yes,
    #[serde(rename = "NO")]
    No,
}

#[derive(Clone, Debug, Serialize)]
pub struct AbelianizationEvidence {
    pub target_order: u64,
    /// Image of each generator of `L`, as image arrays on the target.
    pub images: Vec<Vec<u32>>,
    pub check: WitnessCheck,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointEvidence {
    pub point: usize,
    pub check: WitnessCheck,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub decision: Decision,
    pub reasons: Vec<String>,
    pub perfect: bool,
    pub derived_order: String,
    pub order: String,
    pub orbit_sizes: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abelianization: Option<AbelianizationEvidence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_point: Option<FixedPointEvidence>,
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        self.decision == Decision::Yes
    }
}

/// YES exactly when `L` is perfect and no point of `D` is fixed by `L`. Each
/// failed condition comes with its quotient witness, checked on
/// [`WITNESS_PAIRS`] random products at level 1.
pub fn decide(spec: &TowerSpec, lattice_cap: usize) -> Result<Verdict> {
    let l = spec.base();
    let perfection = l.is_perfect();
    let orbit_sizes = spec.orbit_sizes();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut reasons = Vec::new();

    let abelianization = if perfection.perfect {
        None
    } else {
        reasons.push(format!("L is not perfect: |[L,L]| = {} < |L| = {}", perfection.order, l.order()));
        let w = AbelianizationWitness::find(spec, lattice_cap)?
            .ok_or_else(|| Error::invariant("L is not perfect but no abelian quotient was found"))?;
        let check = w.verify(spec, 1, WITNESS_PAIRS, &mut rng)?;
        if !check.ok() {
            return Err(Error::invariant("abelianization witness failed verification"));
        }
        Some(AbelianizationEvidence {
            target_order: w.target().order_u64().expect("quotient of a capped group"),
            images: w.images().iter().map(|p| p.images().to_vec()).collect(),
            check,
        })
    };

    let fixed_point = match FixedPointWitness::find(spec) {
        None => None,
        Some(w) => {
            reasons.push(format!("point {} is fixed by L", w.point));
            let check = w.verify(spec, 1, WITNESS_PAIRS, &mut rng)?;
            if !check.ok() {
                return Err(Error::invariant("fixed-point witness failed verification"));
            }
            Some(FixedPointEvidence { point: w.point, check })
        }
    };

    let decision = if reasons.is_empty() {
        reasons.push("L is perfect and every L-orbit on D has at least two points".into());
        Decision::Yes
    } else {
        Decision::No
    };
    Ok(Verdict {
        decision,
        reasons,
        perfect: perfection.perfect,
        derived_order: perfection.order.to_string(),
        order: l.order().to_string(),
        orbit_sizes,
        abelianization,
        fixed_point,
    })
}

/// For `F` on `d ≥ 3` points: the tower of `F_1 = Stab_F(0)` acting on the
/// remaining `d − 1` points.
pub fn decide_universal(f: &PermGroup, lattice_cap: usize) -> Result<Verdict> {
    let spec = universal_spec(f)?;
    decide(&spec, lattice_cap)
}

pub fn universal_spec(f: &PermGroup) -> Result<TowerSpec> {
    let d = f.degree();
    if d < 3 {
        return Err(Error::input(format!("F must act on at least 3 points, got {d}")));
    }
    let rest: Vec<u32> = (1..d as u32).collect();
    let f1 = f.stabilizer(0)?.restrict(&rest)?.with_name("F_1");
    TowerSpec::new(f1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn spec(g: PermGroup) -> TowerSpec {
        TowerSpec::new(g).unwrap()
    }

    #[test]
    fn a5_natural_is_yes() {
        let v = decide(&spec(catalog::alternating(5)), 2000).unwrap();
        assert!(v.is_yes());
        assert_eq!(v.orbit_sizes, vec![5]);
        assert!(v.abelianization.is_none() && v.fixed_point.is_none());
    }

    #[test]
    fn c2_is_no_with_sign_witness() {
        let v = decide(&spec(catalog::cyclic(2)), 2000).unwrap();
        assert_eq!(v.decision, Decision::No);
        let a = v.abelianization.unwrap();
        assert_eq!(a.target_order, 2);
        assert!(a.check.ok());
    }

    #[test]
    fn fixed_point_is_no() {
        let v = decide(&spec(catalog::a5_fixing_point()), 2000).unwrap();
        assert_eq!(v.decision, Decision::No);
        assert!(v.perfect);
        assert_eq!(v.fixed_point.unwrap().point, 5);
    }

    #[test]
    fn universal_examples() {
        assert!(decide_universal(&catalog::alternating(6), 2000).unwrap().is_yes());
        let s3 = decide_universal(&catalog::symmetric(3), 2000).unwrap();
        assert!(!s3.is_yes() && !s3.perfect);
        let psl = decide_universal(&catalog::psl2_5(), 2000).unwrap();
        assert!(!psl.is_yes());
        assert_eq!(universal_spec(&catalog::psl2_5()).unwrap().base().order(), 10u32.into());
        assert!(decide_universal(&catalog::cyclic(2), 2000).is_err());
    }
}
