//! Small named permutation groups and surjections between them, used by the
//! test suites, the self-test and the benches.

use crate::error::Result;
use crate::permcore::{Homomorphism, PermGroup, Permutation};

fn cycles(degree: usize, gens: &[&str], name: &str) -> PermGroup {
    PermGroup::from_cycles(degree, gens).expect("catalog generators are valid").with_name(name)
}

fn long_cycle(points: impl Iterator<Item = usize>) -> String {
    let body: Vec<String> = points.map(|p| p.to_string()).collect();
    format!("({})", body.join(" "))
}

pub fn trivial() -> PermGroup {
    PermGroup::trivial(1).with_name("1")
}

pub fn cyclic(n: usize) -> PermGroup {
    cycles(n, &[&long_cycle(0..n)], &format!("C{n}"))
}

pub fn klein_four() -> PermGroup {
    cycles(4, &["(0 1)", "(2 3)"], "C2xC2")
}

pub fn symmetric(n: usize) -> PermGroup {
    cycles(n, &[&long_cycle(0..n), "(0 1)"], &format!("S{n}"))
}

/// `A_n` for `n ≥ 3`.
pub fn alternating(n: usize) -> PermGroup {
    let name = format!("A{n}");
    if n == 3 {
        return cycles(3, &["(0 1 2)"], &name);
    }
    let long = if n % 2 == 1 { long_cycle(0..n) } else { long_cycle(1..n) };
    cycles(n, &[&long, "(0 1 2)"], &name)
}

/// Dihedral group of order `2n` on `n` points.
pub fn dihedral(n: usize) -> PermGroup {
    let refl: Vec<u32> = (0..n).map(|i| ((n - i) % n) as u32).collect();
    let r = Permutation::from_cycles(&long_cycle(0..n), n).expect("valid");
    let s = Permutation::from_images(refl).expect("valid");
    PermGroup::new(n, vec![r, s]).expect("valid").with_name(format!("D{}", 2 * n))
}

/// `PSL(2,5) ≅ A_5` in its action on the six points of the projective line.
pub fn psl2_5() -> PermGroup {
    cycles(6, &["(0 1 2 3 4)", "(0 5)(1 4)"], "PSL(2,5)")
}

/// `A_5` on six points, fixing the last.
pub fn a5_fixing_point() -> PermGroup {
    cycles(6, &["(0 1 2 3 4)", "(0 1 2)"], "A5+fixed")
}

/// `A_5 × A_5` on ten points.
pub fn a5_squared() -> PermGroup {
    cycles(10, &["(0 1 2 3 4)", "(0 1 2)", "(5 6 7 8 9)", "(5 6 7)"], "A5xA5")
}

/// A named surjection `Y → X`.
pub struct Surjection {
    pub name: &'static str,
    pub map: Homomorphism,
}

fn surjection(name: &'static str, y: PermGroup, x: PermGroup, images: &[&str]) -> Result<Surjection> {
    let images = images.iter().map(|c| Permutation::from_cycles(c, x.degree())).collect::<Result<Vec<_>>>()?;
    let map = Homomorphism::new(&y, &x, images).map_err(|e| crate::error::Error::input(format!("{name}: {e}")))?;
    Ok(Surjection { name, map })
}

/// Surjections between groups of order at most 120, plus `A_5 × A_5 → A_5`.
pub fn surjections() -> Result<Vec<Surjection>> {
    Ok(vec![
        surjection("A5 -> 1", alternating(5), trivial(), &["()", "()"])?,
        surjection("S3 -> C2", symmetric(3), cyclic(2), &["()", "(0 1)"])?,
        surjection("S3 -> 1", symmetric(3), trivial(), &["()", "()"])?,
        surjection("C2xC2 -> C2", klein_four(), cyclic(2), &["(0 1)", "()"])?,
        surjection("A5xA5 -> A5", a5_squared(), alternating(5), &["(0 1 2 3 4)", "(0 1 2)", "()", "()"])?,
        // S4 acting on its three pairings {01|23}, {02|13}, {03|12}
        surjection("S4 -> S3", symmetric(4), symmetric(3), &["(0 2)", "(1 2)"])?,
        surjection("S4 -> C2", symmetric(4), cyclic(2), &["(0 1)", "(0 1)"])?,
        surjection("D8 -> C2xC2", dihedral(4), klein_four(), &["(0 1)", "(2 3)"])?,
        surjection("C4 -> C2", cyclic(4), cyclic(2), &["(0 1)"])?,
        surjection("C6 -> C3", cyclic(6), cyclic(3), &["(0 1 2)"])?,
        surjection("A4 -> C3", alternating(4), cyclic(3), &["(0 2 1)", "(0 1 2)"])?,
        surjection("D10 -> C2", dihedral(5), cyclic(2), &["()", "(0 1)"])?,
        surjection("S5 -> C2", symmetric(5), cyclic(2), &["()", "(0 1)"])?,
        surjection("S4 -> S4", symmetric(4), symmetric(4), &["(0 1 2 3)", "(0 1)"])?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn orders() {
        let cases = [
            (alternating(3), 3u32),
            (alternating(4), 12),
            (alternating(5), 60),
            (alternating(6), 360),
            (symmetric(4), 24),
            (dihedral(4), 8),
            (dihedral(5), 10),
            (psl2_5(), 60),
            (a5_squared(), 3600),
        ];
        for (g, n) in cases {
            assert_eq!(g.order(), BigUint::from(n), "{:?}", g.name());
        }
        assert!(psl2_5().is_transitive());
    }

    #[test]
    fn battery_is_surjective() {
        let all = surjections().unwrap();
        assert!(all.len() >= 10);
        for s in &all {
            assert!(s.map.is_surjective(), "{}", s.name);
        }
    }
}
