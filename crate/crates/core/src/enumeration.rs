//! Exhaustive enumeration of tanglegrams up to isomorphism, and the planar census.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::tanglegram::{CanonicalKey, Tanglegram};
use crate::tree::{Tree, TreeBuilder};
use crate::untangle::is_planar;

/// Largest size the sweep accepts.
pub const ENUMERATION_LIMIT: usize = 8;

#[derive(Clone)]
enum Shape {
    Leaf,
    Node(Box<Shape>, Box<Shape>),
}

fn shapes_of(n: usize, memo: &mut Vec<Vec<Shape>>) -> Vec<Shape> {
    while memo.len() <= n {
        let m = memo.len();
        let mut out = Vec::new();
        if m == 1 {
            out.push(Shape::Leaf);
        }
        for a in 1..=m / 2 {
            let b = m - a;
            let (la, lb) = (memo[a].clone(), memo[b].clone());
            for (x, sa) in la.iter().enumerate() {
                for (y, sb) in lb.iter().enumerate() {
                    if a == b && y < x {
                        continue;
                    }
                    out.push(Shape::Node(Box::new(sa.clone()), Box::new(sb.clone())));
                }
            }
        }
        memo.push(out);
    }
    memo[n].clone()
}

fn build(shape: &Shape, b: &mut TreeBuilder, next: &mut u32) -> usize {
    match shape {
        Shape::Leaf => {
            *next += 1;
            b.leaf(*next)
        }
        Shape::Node(l, r) => {
            let x = build(l, b, next);
            let y = build(r, b, next);
            b.join(x, y)
        }
    }
}

/// One tree per unordered rooted binary shape with `n` leaves, labelled 1..=n in leaf order.
pub fn tree_shapes(n: usize) -> Result<Vec<Tree>> {
    if n == 0 {
        return Err(invalid("size must be positive"));
    }
    let mut memo = vec![Vec::new()];
    shapes_of(n, &mut memo)
        .iter()
        .map(|s| {
            let mut b = TreeBuilder::new();
            let mut next = 0;
            let root = build(s, &mut b, &mut next);
            b.finish(root)
        })
        .collect()
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| Error::Internal(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// One representative per isomorphism class of size `n`, sorted by key.
/// `threads = None` uses the global pool.
pub fn enumerate_tanglegrams(n: usize, planar_only: bool, threads: Option<usize>) -> Result<Vec<(CanonicalKey, Tanglegram)>> {
    if n > ENUMERATION_LIMIT {
        return Err(Error::SizeGuard {
            size: n,
            limit: ENUMERATION_LIMIT,
        });
    }
    let shapes = tree_shapes(n)?;
    let pairs: Vec<(usize, usize)> = (0..shapes.len()).cartesian_product(0..shapes.len()).collect();
    let labels: Vec<u32> = (1..=n as u32).collect();
    let per_pair = with_threads(threads, || {
        pairs
            .par_iter()
            .map(|&(a, b)| {
                let mut seen: HashMap<CanonicalKey, Tanglegram> = HashMap::new();
                for perm in labels.iter().copied().permutations(n) {
                    let tg = Tanglegram::from_phi_list(shapes[a].clone(), shapes[b].clone(), &perm)
                        .expect("valid permutation");
                    if planar_only && !is_planar(&tg) {
                        continue;
                    }
                    seen.entry(tg.canonical_key()).or_insert(tg);
                }
                seen
            })
            .collect::<Vec<_>>()
    })?;
    // Shapes are isomorphism invariants, so classes never repeat across shape pairs.
    let mut out: Vec<(CanonicalKey, Tanglegram)> = per_pair.into_iter().flatten().collect();
    out.sort_by(|x, y| x.0.cmp(&y.0));
    Ok(out)
}

pub fn enumerate_planar(n: usize) -> Result<Vec<(CanonicalKey, Tanglegram)>> {
    enumerate_tanglegrams(n, true, None)
}

pub fn enumerate_all(n: usize) -> Result<Vec<(CanonicalKey, Tanglegram)>> {
    enumerate_tanglegrams(n, false, None)
}

/// Planar classes of one size, counted by number of leaf-matched pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusRow {
    pub n: usize,
    pub counts: BTreeMap<usize, u64>,
    pub total: u64,
}

impl CensusRow {
    pub fn from_counts(n: usize, counts: BTreeMap<usize, u64>) -> CensusRow {
        let total = counts.values().sum();
        CensusRow { n, counts, total }
    }
}

pub fn census(n: usize, threads: Option<usize>) -> Result<CensusRow> {
    let classes = enumerate_tanglegrams(n, true, threads)?;
    let mut counts = BTreeMap::new();
    for (_, tg) in &classes {
        *counts.entry(tg.leaf_matched_pairs().len()).or_insert(0u64) += 1;
    }
    Ok(CensusRow::from_counts(n, counts))
}

/// `n,k,count` lines under a header.
pub fn census_csv(rows: &[CensusRow]) -> String {
    let mut out = String::from("n,k,count\n");
    for r in rows {
        for (k, c) in &r.counts {
            out.push_str(&format!("{},{k},{c}\n", r.n));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_counts() {
        let counts: Vec<usize> = (1..=8).map(|n| tree_shapes(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23]);
        assert!(tree_shapes(0).is_err());
    }

    #[test]
    fn small_censuses() {
        assert_eq!(enumerate_planar(1).unwrap().len(), 1);
        let r2 = census(2, None).unwrap();
        assert_eq!(r2.counts, BTreeMap::from([(1, 1)]));
        let r4 = census(4, Some(2)).unwrap();
        assert_eq!(r4.counts, BTreeMap::from([(1, 5), (2, 4), (3, 2)]));
        assert_eq!(r4.total, 11);
        assert_eq!(census_csv(&[r4]), "n,k,count\n4,1,5\n4,2,4\n4,3,2\n");
    }

    #[test]
    fn all_tanglegrams_small_sizes() {
        // Known totals of tanglegrams up to isomorphism: 1, 1, 2, 13, 114.
        let totals: Vec<usize> = (1..=5).map(|n| enumerate_all(n).unwrap().len()).collect();
        assert_eq!(totals, vec![1, 1, 2, 13, 114]);
    }

    #[test]
    fn guard_refuses_large_sizes() {
        assert!(matches!(enumerate_planar(9), Err(Error::SizeGuard { .. })));
    }
}
