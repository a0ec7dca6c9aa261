//! Leaf-order layouts, crossing counts and the flip / paired flip / switch moves.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::tanglegram::{IndexSet, Pair, Side, Tanglegram};
use crate::tree::{Tree, VertexId};

/// Top-to-bottom leaf orders: `x` lists T labels, `y` lists S labels.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Layout {
    pub x: Vec<u32>,
    pub y: Vec<u32>,
}

impl Layout {
    pub fn new(x: Vec<u32>, y: Vec<u32>) -> Self {
        Layout { x, y }
    }

    /// The layout given by the stored child order of both trees.
    pub fn natural(tg: &Tanglegram) -> Layout {
        Layout {
            x: tg.t().leaf_labels(tg.t().root()),
            y: tg.s().leaf_labels(tg.s().root()),
        }
    }

    pub fn list(&self, side: Side) -> &[u32] {
        match side {
            Side::T => &self.x,
            Side::S => &self.y,
        }
    }

    pub fn list_mut(&mut self, side: Side) -> &mut Vec<u32> {
        match side {
            Side::T => &mut self.x,
            Side::S => &mut self.y,
        }
    }

    /// Parses `X = ...` and `Y = ...` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Layout> {
        let mut x = None;
        let mut y = None;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                token: content.split_whitespace().next().unwrap_or("").to_string(),
                message: "expected `X =` or `Y =`".into(),
            })?;
            let mut labels = Vec::new();
            for tok in value.split_whitespace() {
                labels.push(tok.parse::<u32>().map_err(|_| Error::Parse {
                    line,
                    token: tok.to_string(),
                    message: "expected a positive integer".into(),
                })?);
            }
            match key.trim() {
                "X" if x.is_none() => x = Some(labels),
                "Y" if y.is_none() => y = Some(labels),
                other => {
                    return Err(Error::Parse {
                        line,
                        token: other.to_string(),
                        message: "expected a single `X =` and a single `Y =` line".into(),
                    })
                }
            }
        }
        let missing = |w: &str| Error::Parse {
            line: text.lines().count().max(1),
            token: String::new(),
            message: format!("missing `{w} =` line"),
        };
        Ok(Layout {
            x: x.ok_or_else(|| missing("X"))?,
            y: y.ok_or_else(|| missing("Y"))?,
        })
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u32]| v.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ");
        write!(f, "X = {}\nY = {}", join(&self.x), join(&self.y))
    }
}

/// Label-indexed positions of a list.
pub(crate) struct Positions(Vec<u32>);

impl Positions {
    pub(crate) fn of(list: &[u32]) -> Positions {
        let max = list.iter().copied().max().unwrap_or(0) as usize;
        let mut pos = vec![u32::MAX; max + 1];
        for (p, &l) in list.iter().enumerate() {
            pos[l as usize] = p as u32;
        }
        Positions(pos)
    }

    pub(crate) fn get(&self, label: u32) -> u32 {
        self.0[label as usize]
    }
}

/// Number of inversions, by merge sort.
pub fn inversions(seq: &[u32]) -> u64 {
    fn sort(a: &mut [u32], buf: &mut [u32]) -> u64 {
        let n = a.len();
        if n < 2 {
            return 0;
        }
        let mid = n / 2;
        let mut inv = sort(&mut a[..mid], &mut buf[..mid]) + sort(&mut a[mid..], &mut buf[mid..]);
        let (mut i, mut j, mut k) = (0, mid, 0);
        while i < mid && j < n {
            if a[i] <= a[j] {
                buf[k] = a[i];
                i += 1;
            } else {
                buf[k] = a[j];
                inv += (mid - i) as u64;
                j += 1;
            }
            k += 1;
        }
        buf[k..k + mid - i].copy_from_slice(&a[i..mid]);
        k += mid - i;
        buf[k..k + n - j].copy_from_slice(&a[j..n]);
        a.copy_from_slice(&buf[..n]);
        inv
    }
    let mut a = seq.to_vec();
    let mut buf = vec![0; a.len()];
    sort(&mut a, &mut buf)
}

/// Crossings between the edges whose labels appear in `x`; `y` must hold their images.
pub(crate) fn list_crossings(tg: &Tanglegram, x: &[u32], y: &[u32]) -> u64 {
    let ypos = Positions::of(y);
    let seq: Vec<u32> = x
        .iter()
        .map(|&i| ypos.get(tg.phi(i).expect("known label")))
        .collect();
    inversions(&seq)
}

fn check_permutation(tree: &Tree, list: &[u32], side: &str) -> Result<()> {
    if list.len() != tree.leaf_total() {
        return Err(invalid(format!(
            "{side} list has {} entries, tree has {} leaves",
            list.len(),
            tree.leaf_total()
        )));
    }
    let mut seen = BTreeSet::new();
    for &l in list {
        if !tree.has_label(l) || !seen.insert(l) {
            return Err(invalid(format!("{side} list: label {l} unknown or repeated")));
        }
    }
    Ok(())
}

/// Whether every vertex's present leaves occupy a contiguous block of `list`.
/// `list` may hold any subset of the tree's labels.
pub fn is_tree_consistent(tree: &Tree, list: &[u32]) -> bool {
    let pos = Positions::of(list);
    let m = tree.vertex_count();
    let mut lo = vec![u32::MAX; m];
    let mut hi = vec![0u32; m];
    let mut cnt = vec![0u32; m];
    for v in tree.postorder() {
        match tree.children(v) {
            None => {
                let l = tree.label(v).expect("leaf label") as usize;
                if l < pos.0.len() && pos.0[l] != u32::MAX {
                    lo[v] = pos.0[l];
                    hi[v] = pos.0[l];
                    cnt[v] = 1;
                }
            }
            Some([a, b]) => {
                cnt[v] = cnt[a] + cnt[b];
                lo[v] = lo[a].min(lo[b]);
                hi[v] = hi[a].max(hi[b]);
                if cnt[v] > 0 && hi[v] - lo[v] + 1 != cnt[v] {
                    return false;
                }
            }
        }
    }
    true
}

/// Checks that `ly` lists every leaf once and is realizable as a drawing.
pub fn validate(tg: &Tanglegram, ly: &Layout) -> Result<()> {
    check_permutation(tg.t(), &ly.x, "X")?;
    check_permutation(tg.s(), &ly.y, "Y")?;
    if !is_tree_consistent(tg.t(), &ly.x) || !is_tree_consistent(tg.s(), &ly.y) {
        return Err(invalid("layout is not consistent with the trees"));
    }
    Ok(())
}

pub fn count_crossings(tg: &Tanglegram, ly: &Layout) -> Result<u64> {
    check_permutation(tg.t(), &ly.x, "X")?;
    check_permutation(tg.s(), &ly.y, "Y")?;
    Ok(list_crossings(tg, &ly.x, &ly.y))
}

/// Reverses the block of `list` holding the leaves below `v`.
pub(crate) fn flip_block(tree: &Tree, list: &mut [u32], v: VertexId) {
    let idx: Vec<usize> = (0..list.len())
        .filter(|&p| tree.covers_label(v, list[p]))
        .collect();
    if let (Some(&a), Some(&b)) = (idx.first(), idx.last()) {
        debug_assert_eq!(b - a + 1, idx.len(), "flip block is not contiguous");
        list[a..=b].reverse();
    }
}

/// Exchanges the blocks of `v`'s two children within `list`.
pub(crate) fn switch_block(tree: &Tree, list: &mut [u32], v: VertexId) {
    let Some([c1, c2]) = tree.children(v) else {
        return;
    };
    let idx: Vec<usize> = (0..list.len())
        .filter(|&p| tree.covers_label(v, list[p]))
        .collect();
    let (Some(&a), Some(&b)) = (idx.first(), idx.last()) else {
        return;
    };
    debug_assert_eq!(b - a + 1, idx.len(), "switch block is not contiguous");
    let first_child = if tree.covers_label(c1, list[a]) { c1 } else { c2 };
    let (head, tail): (Vec<u32>, Vec<u32>) = list[a..=b]
        .iter()
        .partition(|&&l| tree.covers_label(first_child, l));
    let mut k = a;
    for l in tail.into_iter().chain(head) {
        list[k] = l;
        k += 1;
    }
}

fn require_internal(tree: &Tree, v: VertexId) -> Result<()> {
    if v >= tree.vertex_count() || tree.is_leaf(v) {
        return Err(invalid(format!("vertex {v} is not an internal vertex")));
    }
    Ok(())
}

pub fn apply_flip(tg: &Tanglegram, ly: &Layout, side: Side, v: VertexId) -> Result<Layout> {
    validate(tg, ly)?;
    let tree = tg.tree(side);
    require_internal(tree, v)?;
    let mut out = ly.clone();
    flip_block(tree, out.list_mut(side), v);
    Ok(out)
}

pub fn apply_paired_flip(tg: &Tanglegram, ly: &Layout, pair: Pair) -> Result<Layout> {
    validate(tg, ly)?;
    require_internal(tg.t(), pair.u)?;
    require_internal(tg.s(), pair.v)?;
    let images: BTreeSet<u32> = tg
        .t()
        .leaf_labels(pair.u)
        .into_iter()
        .map(|i| tg.phi(i).expect("label"))
        .collect();
    if images != tg.s().leaf_label_set(pair.v) {
        return Err(invalid("not a leaf-matched pair"));
    }
    let mut out = ly.clone();
    flip_block(tg.t(), &mut out.x, pair.u);
    flip_block(tg.s(), &mut out.y, pair.v);
    Ok(out)
}

pub fn apply_subtree_switch(tg: &Tanglegram, ly: &Layout, side: Side, v: VertexId) -> Result<Layout> {
    validate(tg, ly)?;
    let tree = tg.tree(side);
    require_internal(tree, v)?;
    let mut out = ly.clone();
    switch_block(tree, out.list_mut(side), v);
    Ok(out)
}

/// Keeps only `labels` in `x` and their images in `y`, preserving order.
pub fn restrict_layout(tg: &Tanglegram, ly: &Layout, labels: &IndexSet) -> Result<Layout> {
    tg.check_labels(labels)?;
    let images: BTreeSet<u32> = labels.iter().map(|&l| tg.phi(l).expect("label")).collect();
    Ok(Layout {
        x: ly.x.iter().copied().filter(|l| labels.contains(l)).collect(),
        y: ly.y.iter().copied().filter(|l| images.contains(l)).collect(),
    })
}

/// How many of the listed edge pairs (named by T labels) cross in `ly`.
pub fn crossings_involving(tg: &Tanglegram, ly: &Layout, pairs: &[(u32, u32)]) -> Result<u64> {
    count_crossings(tg, ly)?;
    let xpos = Positions::of(&ly.x);
    let ypos = Positions::of(&ly.y);
    let mut c = 0;
    for &(i, j) in pairs {
        if tg.phi(i).is_none() || tg.phi(j).is_none() {
            return Err(invalid(format!("unknown edge label in ({i},{j})")));
        }
        if edges_cross(tg, &xpos, &ypos, i, j) {
            c += 1;
        }
    }
    Ok(c)
}

/// Whether the edges labelled `i` and `j` cross, given label positions.
pub(crate) fn edges_cross(tg: &Tanglegram, xpos: &Positions, ypos: &Positions, i: u32, j: u32) -> bool {
    let (pi, pj) = (tg.phi(i).expect("label"), tg.phi(j).expect("label"));
    (xpos.get(i) < xpos.get(j)) != (ypos.get(pi) < ypos.get(pj))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn five_leaf_example() -> Tanglegram {
        Tanglegram::from_strs("(((1,2),3),(4,5))", "(((1,(2,3)),4),5)", &[4, 2, 5, 1, 3]).unwrap()
    }

    fn pairwise(tg: &Tanglegram, ly: &Layout) -> u64 {
        let xpos = Positions::of(&ly.x);
        let ypos = Positions::of(&ly.y);
        let mut c = 0;
        for a in 0..ly.x.len() {
            for b in a + 1..ly.x.len() {
                if edges_cross(tg, &xpos, &ypos, ly.x[a], ly.x[b]) {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn example_counts() {
        let tg = five_leaf_example();
        let id = Layout::new(vec![1, 2, 3, 4, 5], vec![1, 2, 3, 4, 5]);
        assert_eq!(count_crossings(&tg, &id).unwrap(), 6);
        let planar = Layout::new(vec![3, 1, 2, 5, 4], vec![5, 4, 2, 3, 1]);
        assert_eq!(count_crossings(&tg, &planar).unwrap(), 0);
        assert_eq!(pairwise(&tg, &id), 6);
        assert!(count_crossings(&tg, &Layout::new(vec![1, 2, 3, 4], vec![1, 2, 3, 4])).is_err());
    }

    #[test]
    fn flip_example() {
        let tg = five_leaf_example();
        let id = Layout::new(vec![1, 2, 3, 4, 5], vec![1, 2, 3, 4, 5]);
        let s = tg.s();
        let v = s.lca([s.leaf(1).unwrap(), s.leaf(4).unwrap()]).unwrap();
        let out = apply_flip(&tg, &id, Side::S, v).unwrap();
        assert_eq!(out.y, vec![4, 3, 2, 1, 5]);
        assert_eq!(apply_flip(&tg, &out, Side::S, v).unwrap(), id);
        assert!(apply_flip(&tg, &id, Side::S, s.leaf(1).unwrap()).is_err());
    }

    #[test]
    fn restrict_example() {
        let tg = five_leaf_example();
        let ly = Layout::new(vec![1, 2, 3, 4, 5], vec![4, 3, 2, 1, 5]);
        let r = restrict_layout(&tg, &ly, &[1, 2, 4, 5].into()).unwrap();
        assert_eq!(r, Layout::new(vec![1, 2, 4, 5], vec![4, 3, 2, 1]));
        assert_eq!(restrict_layout(&tg, &ly, &tg.label_set()).unwrap(), ly);
        let one = restrict_layout(&tg, &ly, &[3].into()).unwrap();
        assert_eq!(one, Layout::new(vec![3], vec![5]));
    }

    #[test]
    fn crossings_involving_example() {
        let tg = five_leaf_example();
        let id = Layout::new(vec![1, 2, 3, 4, 5], vec![1, 2, 3, 4, 5]);
        assert_eq!(crossings_involving(&tg, &id, &[(1, 2), (1, 3)]).unwrap(), 1);
        assert_eq!(crossings_involving(&tg, &id, &[]).unwrap(), 0);
        let all: Vec<(u32, u32)> = (1..=5).flat_map(|a| (a + 1..=5).map(move |b| (a, b))).collect();
        assert_eq!(crossings_involving(&tg, &id, &all).unwrap(), 6);
        assert!(crossings_involving(&tg, &id, &[(1, 9)]).is_err());
    }

    #[test]
    fn switch_moves_child_blocks() {
        let tg = Tanglegram::from_strs("((1,2),(3,(4,5)))", "((1,2),(3,(4,5)))", &[1, 2, 3, 4, 5]).unwrap();
        let ly = Layout::natural(&tg);
        let t = tg.t();
        let v = t.lca([t.leaf(3).unwrap(), t.leaf(5).unwrap()]).unwrap();
        let out = apply_subtree_switch(&tg, &ly, Side::T, v).unwrap();
        assert_eq!(out.x, vec![1, 2, 4, 5, 3]);
        assert_eq!(apply_subtree_switch(&tg, &out, Side::T, v).unwrap(), ly);
        let w = t.lca([t.leaf(4).unwrap(), t.leaf(5).unwrap()]).unwrap();
        assert_eq!(
            apply_subtree_switch(&tg, &ly, Side::T, w).unwrap(),
            apply_flip(&tg, &ly, Side::T, w).unwrap()
        );
    }

    #[test]
    fn paired_flip_of_size_two_reverses_both() {
        let tg = Tanglegram::from_strs("(1,2)", "(1,2)", &[1, 2]).unwrap();
        let ly = Layout::natural(&tg);
        let out = apply_paired_flip(&tg, &ly, Pair::new(tg.t().root(), tg.s().root())).unwrap();
        assert_eq!(out, Layout::new(vec![2, 1], vec![2, 1]));
        assert!(apply_paired_flip(&tg, &ly, Pair::new(tg.t().root(), tg.s().leaf(1).unwrap())).is_err());
    }

    #[test]
    fn consistency_check() {
        let t = Tree::parse("((1,2),(3,4))").unwrap();
        assert!(is_tree_consistent(&t, &[2, 1, 4, 3]));
        assert!(!is_tree_consistent(&t, &[1, 3, 2, 4]));
        assert!(is_tree_consistent(&t, &[1, 3]));
    }

    #[test]
    fn layout_text_round_trip() {
        let ly = Layout::new(vec![3, 1, 2], vec![2, 3, 1]);
        assert_eq!(Layout::parse(&ly.to_string()).unwrap(), ly);
        assert!(Layout::parse("X = 1 2\nY = 1 b\n").is_err());
    }
}
