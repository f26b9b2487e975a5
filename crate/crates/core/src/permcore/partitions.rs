use super::group::PermGroup;
use crate::error::{Error, Result};

/// A set partition of a point list, blocks sorted internally and by least
/// element.
pub type Partition = Vec<Vec<u32>>;

/// All partitions of `domain` that every generator of `g` maps to itself
/// (blocks permuted among themselves).
pub fn invariant_partitions(g: &PermGroup, domain: &[u32], cap: usize) -> Result<Vec<Partition>> {
    let mut out = Vec::new();
    visit_invariant(g, domain, cap, |labels, nblocks| {
        let mut blocks = vec![Vec::new(); nblocks];
        for (i, &b) in labels.iter().enumerate() {
            blocks[b as usize].push(domain[i]);
        }
        out.push(blocks);
    })?;
    Ok(out)
}

/// Number of invariant partitions of `domain` (the a-value of the domain).
pub fn count_invariant_partitions(g: &PermGroup, domain: &[u32], cap: usize) -> Result<u64> {
    let mut n = 0u64;
    visit_invariant(g, domain, cap, |_, _| n += 1)?;
    Ok(n)
}

fn visit_invariant(
    g: &PermGroup,
    domain: &[u32],
    cap: usize,
    mut emit: impl FnMut(&[u8], usize),
) -> Result<()> {
    if domain.len() > cap {
        return Err(Error::cap(
            format!("invariant partitions of a {}-point domain", domain.len()),
            format!("partition_domain = {cap}"),
        ));
    }
    let mut pos = vec![usize::MAX; g.degree()];
    for (i, &p) in domain.iter().enumerate() {
        if p as usize >= g.degree() || pos[p as usize] != usize::MAX {
            return Err(Error::input(format!("bad domain point {p}")));
        }
        pos[p as usize] = i;
    }
    // generator action in domain coordinates
    let mut maps = Vec::new();
    for gen in g.generators() {
        let mut m = Vec::with_capacity(domain.len());
        for &p in domain {
            let q = pos[gen.apply(p as usize)];
            if q == usize::MAX {
                return Err(Error::input("domain is not invariant under the group"));
            }
            m.push(q);
        }
        maps.push(m);
    }
    let n = domain.len();
    if n == 0 {
        emit(&[], 0);
        return Ok(());
    }
    // restricted growth strings
    let mut labels = vec![0u8; n];
    let mut maxes = vec![0u8; n];
    loop {
        let nblocks = maxes[n - 1] as usize + 1;
        if is_invariant(&labels, &maps) {
            emit(&labels, nblocks);
        }
        // next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return Ok(());
            }
            let bound = maxes[i - 1] + 1;
            if labels[i] < bound {
                labels[i] += 1;
                maxes[i] = maxes[i - 1].max(labels[i]);
                for j in i + 1..n {
                    labels[j] = 0;
                    maxes[j] = maxes[i];
                }
                break;
            }
            i -= 1;
        }
    }
}

fn is_invariant(labels: &[u8], maps: &[Vec<usize>]) -> bool {
    let mut sizes = [0usize; 256];
    for &b in labels {
        sizes[b as usize] += 1;
    }
    for m in maps {
        // image block of each block, fixed by its first member
        let mut target = [u8::MAX; 256];
        for (i, &b) in labels.iter().enumerate() {
            let t = labels[m[i]];
            match target[b as usize] {
                u8::MAX => {
                    if sizes[t as usize] != sizes[b as usize] {
                        return false;
                    }
                    target[b as usize] = t;
                }
                x if x != t => return false,
                _ => {}
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_counts() {
        let a5 = PermGroup::from_cycles(5, &["(0 1 2 3 4)", "(0 1 2)"]).unwrap();
        let parts = invariant_partitions(&a5, &[0, 1, 2, 3, 4], 12).unwrap();
        assert_eq!(parts.len(), 2);
        assert!(parts.contains(&vec![vec![0, 1, 2, 3, 4]]));
        assert!(parts.contains(&(0..5).map(|i| vec![i]).collect::<Vec<_>>()));
        assert_eq!(count_invariant_partitions(&PermGroup::trivial(3), &[0, 1, 2], 12).unwrap(), 5);
        let v = PermGroup::from_cycles(4, &["(0 1)(2 3)"]).unwrap();
        assert_eq!(count_invariant_partitions(&v, &[0, 1, 2, 3], 12).unwrap(), 7);
        assert!(count_invariant_partitions(&PermGroup::trivial(13), &(0..13).collect::<Vec<_>>(), 12).is_err());
    }

    #[test]
    fn bell_numbers_for_trivial_group() {
        let bell = [1u64, 1, 2, 5, 15, 52, 203, 877];
        for (n, &b) in bell.iter().enumerate() {
            let dom: Vec<u32> = (0..n as u32).collect();
            assert_eq!(count_invariant_partitions(&PermGroup::trivial(n), &dom, 12).unwrap(), b);
        }
    }
}
