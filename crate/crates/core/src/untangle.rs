//! Planar layout construction by successive refinement, with leaf-matched pair detection.

use crate::error::{invalid, Result};
use crate::layout::{list_crossings, Layout};
use crate::tanglegram::{IndexSet, Pair, Side, Tanglegram};
use crate::tree::{Tree, VertexId};

/// `get(u, v)` holds when some active leaf below T-vertex `u` is matched below S-vertex `v`.
#[derive(Clone)]
pub struct BoolTable {
    words: usize,
    rows: Vec<u64>,
}

impl BoolTable {
    pub fn get(&self, u: VertexId, v: VertexId) -> bool {
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    fn row(&self, u: VertexId) -> &[u64] {
        &self.rows[u * self.words..(u + 1) * self.words]
    }

    /// Whether row `u` has any true entry.
    pub fn row_any(&self, u: VertexId) -> bool {
        self.row(u).iter().any(|w| *w != 0)
    }
}

pub fn build_table(tg: &Tanglegram, active: &IndexSet) -> BoolTable {
    let (t, s) = (tg.t(), tg.s());
    let words = s.vertex_count().div_ceil(64);
    let mut rows = vec![0u64; t.vertex_count() * words];
    for u in t.postorder() {
        let base = u * words;
        match t.children(u) {
            None => {
                let i = t.label(u).expect("leaf label");
                if active.contains(&i) {
                    for v in s.ancestors(tg.s_leaf(i)) {
                        rows[base + v / 64] |= 1 << (v % 64);
                    }
                }
            }
            Some([a, b]) => {
                for w in 0..words {
                    rows[base + w] = rows[a * words + w] | rows[b * words + w];
                }
            }
        }
    }
    BoolTable { words, rows }
}

/// Ordered vertex lists mid-refinement; edges are implied by the table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialLayout {
    pub x: Vec<VertexId>,
    pub y: Vec<VertexId>,
}

/// State of one refinement run.
pub struct Untangler<'a> {
    tg: &'a Tanglegram,
    table: BoolTable,
    x: Vec<VertexId>,
    y: Vec<VertexId>,
    deg_t: Vec<u32>,
    deg_s: Vec<u32>,
    pairs: Vec<Pair>,
}

impl<'a> Untangler<'a> {
    pub fn new(tg: &'a Tanglegram, active: &IndexSet) -> Result<Self> {
        tg.check_labels(active)?;
        let table = build_table(tg, active);
        let (rt, rs) = (tg.t().root(), tg.s().root());
        let mut deg_t = vec![0; tg.t().vertex_count()];
        let mut deg_s = vec![0; tg.s().vertex_count()];
        if table.get(rt, rs) {
            deg_t[rt] = 1;
            deg_s[rs] = 1;
        }
        Ok(Untangler {
            tg,
            table,
            x: vec![rt],
            y: vec![rs],
            deg_t,
            deg_s,
            pairs: Vec::new(),
        })
    }

    pub fn table(&self) -> &BoolTable {
        &self.table
    }

    pub fn partial(&self) -> PartialLayout {
        PartialLayout {
            x: self.x.clone(),
            y: self.y.clone(),
        }
    }

    pub fn degree(&self, side: Side, v: VertexId) -> u32 {
        match side {
            Side::T => self.deg_t[v],
            Side::S => self.deg_s[v],
        }
    }

    fn adjacent(&self, side: Side, a: VertexId, b: VertexId) -> bool {
        match side {
            Side::T => self.table.get(a, b),
            Side::S => self.table.get(b, a),
        }
    }

    /// Internal vertex of highest degree, earliest in X then Y.
    pub fn select(&self) -> Option<(Side, VertexId)> {
        let mut best: Option<(Side, VertexId, u32)> = None;
        for (side, list) in [(Side::T, &self.x), (Side::S, &self.y)] {
            let tree = self.tg.tree(side);
            for &v in list {
                if tree.is_leaf(v) {
                    continue;
                }
                let d = self.degree(side, v);
                if best.map_or(true, |(_, _, bd)| d > bd) {
                    best = Some((side, v, d));
                }
            }
        }
        best.map(|(s, v, _)| (s, v))
    }

    /// Replaces `u` by its children in the order chosen by the last-adjacency test.
    pub fn refine(&mut self, side: Side, u: VertexId) -> Result<()> {
        let tree: &Tree = self.tg.tree(side);
        let [u1, u2] = tree
            .children(u)
            .ok_or_else(|| invalid(format!("vertex {u} is a leaf")))?;
        let (own, other) = match side {
            Side::T => (&self.x, &self.y),
            Side::S => (&self.y, &self.x),
        };
        let p = own
            .iter()
            .position(|&w| w == u)
            .ok_or_else(|| invalid(format!("vertex {u} is not in the partial layout")))?;
        let deg_u = self.degree(side, u);
        let mut last1: Option<usize> = None;
        let mut adj2 = Vec::new();
        let (mut d1, mut d2) = (0u32, 0u32);
        let mut delta: Vec<(VertexId, u32, u32)> = Vec::new();
        for (j, &b) in other.iter().enumerate() {
            let a0 = self.adjacent(side, u, b);
            if !a0 {
                continue;
            }
            let a1 = self.adjacent(side, u1, b);
            let a2 = self.adjacent(side, u2, b);
            if a1 {
                last1 = Some(j);
                d1 += 1;
            }
            if a2 {
                adj2.push(j);
                d2 += 1;
            }
            delta.push((b, a1 as u32, a2 as u32));
        }
        let keep = if d1 == 0 && d2 > 0 {
            false
        } else if d2 == 0 || deg_u <= 1 {
            true
        } else {
            let k = last1.expect("u1 has a neighbor");
            adj2.iter().all(|&j| j >= k)
        };
        let (first, second) = if keep { (u1, u2) } else { (u2, u1) };
        let (own_deg, other_deg) = match side {
            Side::T => (&mut self.deg_t, &mut self.deg_s),
            Side::S => (&mut self.deg_s, &mut self.deg_t),
        };
        for (b, a1, a2) in delta {
            other_deg[b] = other_deg[b] - 1 + a1 + a2;
        }
        own_deg[u1] = d1;
        own_deg[u2] = d2;
        let own = match side {
            Side::T => &mut self.x,
            Side::S => &mut self.y,
        };
        own.splice(p..=p, [first, second]);
        Ok(())
    }

    /// One loop iteration; returns false once only leaves remain.
    pub fn step(&mut self) -> bool {
        let Some((side, u)) = self.select() else {
            return false;
        };
        if self.degree(side, u) == 1 {
            let other = match side {
                Side::T => &self.y,
                Side::S => &self.x,
            };
            let nb = *other
                .iter()
                .find(|&&b| self.adjacent(side, u, b))
                .expect("degree-one vertex has a neighbor");
            self.pairs.push(match side {
                Side::T => Pair::new(u, nb),
                Side::S => Pair::new(nb, u),
            });
        }
        self.refine(side, u).expect("selected vertex is internal and present");
        true
    }

    pub fn finish(mut self) -> (Layout, Vec<Pair>) {
        while self.step() {}
        let t = self.tg.t();
        let s = self.tg.s();
        let ly = Layout {
            x: self.x.iter().map(|&v| t.label(v).expect("leaf")).collect(),
            y: self.y.iter().map(|&v| s.label(v).expect("leaf")).collect(),
        };
        (ly, self.pairs)
    }
}

/// Runs the refinement loop with the matching restricted to `active`.
/// Returns a layout of the whole tanglegram and the recorded degree-one pairs.
pub fn modified_untangle(tg: &Tanglegram, active: &IndexSet) -> Result<(Layout, Vec<Pair>)> {
    Ok(Untangler::new(tg, active)?.finish())
}

pub fn is_planar(tg: &Tanglegram) -> bool {
    let (ly, _) = modified_untangle(tg, &tg.label_set()).expect("full label set");
    list_crossings(tg, &ly.x, &ly.y) == 0
}

/// Whether the subtanglegram induced by `active` is planar.
pub fn residual_is_planar(tg: &Tanglegram, active: &IndexSet) -> Result<bool> {
    let (ly, _) = modified_untangle(tg, active)?;
    Ok(restricted_crossings(tg, &ly, active) == 0)
}

pub(crate) fn restricted_crossings(tg: &Tanglegram, ly: &Layout, active: &IndexSet) -> u64 {
    let x: Vec<u32> = ly.x.iter().copied().filter(|l| active.contains(l)).collect();
    let y: Vec<u32> = ly
        .y
        .iter()
        .copied()
        .filter(|&l| tg.phi_inv(l).is_some_and(|i| active.contains(&i)))
        .collect();
    list_crossings(tg, &x, &y)
}

/// Per-vertex counts of active leaves in T and of their images in S.
pub(crate) fn active_counts(tg: &Tanglegram, active: &IndexSet) -> (Vec<usize>, Vec<usize>) {
    let count = |tree: &Tree, is_active: &dyn Fn(u32) -> bool| {
        let mut c = vec![0usize; tree.vertex_count()];
        for v in tree.postorder() {
            c[v] = match tree.children(v) {
                None => is_active(tree.label(v).expect("leaf")) as usize,
                Some([a, b]) => c[a] + c[b],
            };
        }
        c
    };
    let ct = count(tg.t(), &|l| active.contains(&l));
    let cs = count(tg.s(), &|l| tg.phi_inv(l).is_some_and(|i| active.contains(&i)));
    (ct, cs)
}

/// Lowest vertex below `v` with the same active leaves.
pub(crate) fn reduce_vertex(tree: &Tree, counts: &[usize], mut v: VertexId) -> VertexId {
    while let Some([a, b]) = tree.children(v) {
        if counts[a] == 0 {
            v = b;
        } else if counts[b] == 0 {
            v = a;
        } else {
            break;
        }
    }
    v
}

/// Maps recorded pairs to the leaf-matched pairs of the subtanglegram induced by `active`,
/// expressed with vertices of the original trees.
pub fn reduce_pairs(tg: &Tanglegram, pairs: &[Pair], active: &IndexSet) -> Vec<Pair> {
    let (ct, cs) = active_counts(tg, active);
    let mut out: Vec<Pair> = Vec::new();
    for p in pairs {
        let u = reduce_vertex(tg.t(), &ct, p.u);
        let v = reduce_vertex(tg.s(), &cs, p.v);
        if ct[u] == cs[v] && ct[u] > 1 {
            let q = Pair::new(u, v);
            if !out.contains(&q) {
                out.push(q);
            }
        }
    }
    out
}

/// Layout and leaf-matched pairs of the subtanglegram induced by `active`.
pub fn untangle_restricted(tg: &Tanglegram, active: &IndexSet) -> Result<(Layout, Vec<Pair>)> {
    let (ly, l) = modified_untangle(tg, active)?;
    Ok((ly, reduce_pairs(tg, &l, active)))
}
