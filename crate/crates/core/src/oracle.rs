//! Exhaustive reference answers computed straight from the definitions.
//!
//! Nothing here calls the refinement, insertion or enumeration code.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::layout::Layout;
use crate::tanglegram::{IndexSet, Pair, Tanglegram};
use crate::tree::Tree;

pub const DEFAULT_GLOBAL_LIMIT: usize = 10;
pub const DEFAULT_INSERTION_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub optimum: u64,
    pub witness: Layout,
    pub examined: u64,
}

/// Every leaf order of `tree`, one per flip combination.
fn leaf_orders(tree: &Tree) -> Vec<Vec<u32>> {
    fn go(tree: &Tree, v: usize) -> Vec<Vec<u32>> {
        match tree.children(v) {
            None => vec![vec![tree.label(v).expect("leaf")]],
            Some([a, b]) => {
                let la = go(tree, a);
                let lb = go(tree, b);
                let mut out = Vec::with_capacity(2 * la.len() * lb.len());
                for x in &la {
                    for y in &lb {
                        out.push([x.as_slice(), y.as_slice()].concat());
                        out.push([y.as_slice(), x.as_slice()].concat());
                    }
                }
                out
            }
        }
    }
    go(tree, tree.root())
}

fn guard(tg: &Tanglegram, limit: usize) -> Result<()> {
    if tg.size() > limit {
        return Err(Error::SizeGuard {
            size: tg.size(),
            limit,
        });
    }
    Ok(())
}

struct Sweep {
    xs: Vec<Vec<u32>>,
    ys: Vec<Vec<u32>>,
    /// For each y order: S label -> position.
    ypos: Vec<Vec<usize>>,
}

impl Sweep {
    fn new(tg: &Tanglegram) -> Sweep {
        let xs = leaf_orders(tg.t());
        let ys = leaf_orders(tg.s());
        let max = tg.s().labels().last().copied().unwrap_or(0) as usize;
        let ypos = ys
            .iter()
            .map(|y| {
                let mut p = vec![0; max + 1];
                for (k, &l) in y.iter().enumerate() {
                    p[l as usize] = k;
                }
                p
            })
            .collect();
        Sweep { xs, ys, ypos }
    }

    fn size(&self) -> u64 {
        (self.xs.len() * self.ys.len()) as u64
    }

    /// Best (crossings, x index, y index), optionally only over layouts
    /// with no crossing between two edges of `active`.
    fn best(&self, tg: &Tanglegram, active: Option<&IndexSet>) -> Option<(u64, usize, usize)> {
        self.xs
            .par_iter()
            .enumerate()
            .filter_map(|(xi, x)| {
                let act: Vec<bool> = x
                    .iter()
                    .map(|i| active.map_or(true, |a| a.contains(i)))
                    .collect();
                let mut best: Option<(u64, usize, usize)> = None;
                let mut seq = vec![0usize; x.len()];
                'ys: for (yi, pos) in self.ypos.iter().enumerate() {
                    for (k, i) in x.iter().enumerate() {
                        seq[k] = pos[tg.phi(*i).expect("label") as usize];
                    }
                    let mut c = 0u64;
                    for a in 0..seq.len() {
                        for b in a + 1..seq.len() {
                            if seq[a] > seq[b] {
                                if active.is_some() && act[a] && act[b] {
                                    continue 'ys;
                                }
                                c += 1;
                            }
                        }
                    }
                    if best.map_or(true, |(bc, _, _)| c < bc) {
                        best = Some((c, xi, yi));
                    }
                }
                best
            })
            .min()
    }
}

/// Minimum crossings over all layouts.
pub fn brute_crossing_number(tg: &Tanglegram) -> Result<OracleReport> {
    brute_crossing_number_limited(tg, DEFAULT_GLOBAL_LIMIT)
}

pub fn brute_crossing_number_limited(tg: &Tanglegram, limit: usize) -> Result<OracleReport> {
    guard(tg, limit)?;
    let sw = Sweep::new(tg);
    let (c, xi, yi) = sw.best(tg, None).expect("at least one layout");
    Ok(OracleReport {
        optimum: c,
        witness: Layout::new(sw.xs[xi].clone(), sw.ys[yi].clone()),
        examined: sw.size(),
    })
}

/// Minimum crossings over layouts whose restriction to `active` is crossing-free.
pub fn brute_insertion_optimum(tg: &Tanglegram, active: &IndexSet) -> Result<OracleReport> {
    brute_insertion_optimum_limited(tg, active, DEFAULT_INSERTION_LIMIT)
}

pub fn brute_insertion_optimum_limited(
    tg: &Tanglegram,
    active: &IndexSet,
    limit: usize,
) -> Result<OracleReport> {
    guard(tg, limit)?;
    tg.check_labels(active)?;
    let sw = Sweep::new(tg);
    let (c, xi, yi) = sw.best(tg, Some(active)).ok_or_else(|| {
        Error::Precondition("the subtanglegram on the kept labels is not planar".into())
    })?;
    Ok(OracleReport {
        optimum: c,
        witness: Layout::new(sw.xs[xi].clone(), sw.ys[yi].clone()),
        examined: sw.size(),
    })
}

/// Every crossing-free layout.
pub fn brute_planar_layouts(tg: &Tanglegram) -> Result<BTreeSet<Layout>> {
    guard(tg, DEFAULT_GLOBAL_LIMIT)?;
    let sw = Sweep::new(tg);
    let mut out = BTreeSet::new();
    for x in &sw.xs {
        for (y, pos) in sw.ys.iter().zip(&sw.ypos) {
            let seq: Vec<usize> = x.iter().map(|i| pos[tg.phi(*i).expect("label") as usize]).collect();
            if seq.windows(2).all(|w| w[0] < w[1]) {
                out.insert(Layout::new(x.clone(), y.clone()));
            }
        }
    }
    Ok(out)
}

/// All pairs of internal vertices whose leaf sets correspond under the matching.
pub fn brute_leaf_matched_pairs(tg: &Tanglegram) -> Vec<Pair> {
    let (t, s) = (tg.t(), tg.s());
    let s_sets: Vec<(usize, BTreeSet<u32>)> = s
        .internal_vertices()
        .map(|v| (v, s.leaf_label_set(v)))
        .collect();
    let mut out = Vec::new();
    for u in t.internal_vertices() {
        let image: BTreeSet<u32> = t
            .leaf_labels(u)
            .into_iter()
            .map(|i| tg.phi(i).expect("label"))
            .collect();
        for (v, set) in &s_sets {
            if *set == image {
                out.push(Pair::new(u, *v));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_numbers() {
        let ex = Tanglegram::from_strs("(((1,2),3),(4,5))", "(((1,(2,3)),4),5)", &[4, 2, 5, 1, 3]).unwrap();
        let r = brute_crossing_number(&ex).unwrap();
        assert_eq!(r.optimum, 0);
        assert_eq!(r.examined, 256);
        let tg6 = Tanglegram::from_strs("((((1,2),(3,4)),5),6)", "(1,(2,((3,4),(5,6))))", &[1, 5, 2, 3, 4, 6])
            .unwrap();
        assert_eq!(brute_crossing_number(&tg6).unwrap().optimum, 2);
        let rest: IndexSet = [1, 3, 4, 5, 6].into();
        assert_eq!(brute_insertion_optimum(&tg6, &rest).unwrap().optimum, 3);
        let bad: IndexSet = [2, 3, 4, 5, 6].into();
        assert!(matches!(brute_insertion_optimum(&tg6, &bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn size_guard_refuses() {
        let t = "((((((((((1,2),3),4),5),6),7),8),9),10),11)";
        let big = Tanglegram::from_strs(t, t, &(1..=11).collect::<Vec<_>>()).unwrap();
        assert!(matches!(brute_crossing_number(&big), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn planar_layout_sets() {
        let one = Tanglegram::from_strs("1", "1", &[1]).unwrap();
        assert_eq!(brute_planar_layouts(&one).unwrap().len(), 1);
        let irr = Tanglegram::from_strs("((1,2),3)", "(1,(2,3))", &[1, 2, 3]).unwrap();
        assert_eq!(brute_leaf_matched_pairs(&irr).len(), 1);
        assert_eq!(brute_planar_layouts(&irr).unwrap().len(), 2);
    }
}
