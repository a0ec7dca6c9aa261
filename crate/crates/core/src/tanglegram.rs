//! Tanglegrams, the `.tgl` text format, induced subtanglegrams and canonical keys.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::tree::{Tree, TreeBuilder, VertexId};

/// A set of T-leaf labels.
pub type IndexSet = BTreeSet<u32>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    T,
    S,
}

/// A T-vertex and an S-vertex, as recorded for leaf-matched pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    pub u: VertexId,
    pub v: VertexId,
}

impl Pair {
    pub fn new(u: VertexId, v: VertexId) -> Self {
        Pair { u, v }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Tanglegram {
    t: Tree,
    s: Tree,
    phi: BTreeMap<u32, u32>,
    phi_inv: BTreeMap<u32, u32>,
}

impl Tanglegram {
    pub fn new(t: Tree, s: Tree, phi: BTreeMap<u32, u32>) -> Result<Self> {
        if t.leaf_total() != s.leaf_total() || phi.len() != t.leaf_total() {
            return Err(invalid("trees and matching disagree in size"));
        }
        let mut phi_inv = BTreeMap::new();
        for (&a, &b) in &phi {
            if !t.has_label(a) || !s.has_label(b) {
                return Err(invalid(format!("matching entry {a} -> {b} names an unknown leaf")));
            }
            if phi_inv.insert(b, a).is_some() {
                return Err(invalid(format!("matching is not injective at {b}")));
            }
        }
        Ok(Tanglegram { t, s, phi, phi_inv })
    }

    /// Matching given as a list: the k-th entry is the image of the k-th smallest T label.
    pub fn from_phi_list(t: Tree, s: Tree, images: &[u32]) -> Result<Self> {
        let labels = t.labels();
        if labels.len() != images.len() {
            return Err(invalid(format!(
                "matching has {} entries but T has {} leaves",
                images.len(),
                labels.len()
            )));
        }
        let phi = labels.into_iter().zip(images.iter().copied()).collect();
        Self::new(t, s, phi)
    }

    /// Parses e.g. `("(((1,2),3),(4,5))", "(((1,(2,3)),4),5)", &[4, 2, 5, 1, 3])`.
    pub fn from_strs(t: &str, s: &str, images: &[u32]) -> Result<Self> {
        Self::from_phi_list(Tree::parse(t)?, Tree::parse(s)?, images)
    }

    pub fn t(&self) -> &Tree {
        &self.t
    }

    pub fn s(&self) -> &Tree {
        &self.s
    }

    pub fn tree(&self, side: Side) -> &Tree {
        match side {
            Side::T => &self.t,
            Side::S => &self.s,
        }
    }

    pub fn size(&self) -> usize {
        self.phi.len()
    }

    /// Sorted T labels.
    pub fn labels(&self) -> Vec<u32> {
        self.phi.keys().copied().collect()
    }

    pub fn label_set(&self) -> IndexSet {
        self.phi.keys().copied().collect()
    }

    pub fn phi(&self, i: u32) -> Option<u32> {
        self.phi.get(&i).copied()
    }

    pub fn phi_inv(&self, j: u32) -> Option<u32> {
        self.phi_inv.get(&j).copied()
    }

    pub fn phi_map(&self) -> &BTreeMap<u32, u32> {
        &self.phi
    }

    /// Leaf vertex of `t_i`.
    pub fn t_leaf(&self, i: u32) -> VertexId {
        self.t.leaf(i).expect("known T label")
    }

    /// Leaf vertex of `s_phi(i)`.
    pub fn s_leaf(&self, i: u32) -> VertexId {
        self.s.leaf(self.phi[&i]).expect("known S label")
    }

    /// Whether the edge with T-label `i` has an endpoint below `v` on `side`.
    pub fn edge_below(&self, side: Side, v: VertexId, i: u32) -> bool {
        match side {
            Side::T => self.t.is_ancestor(v, self.t_leaf(i)),
            Side::S => self.s.is_ancestor(v, self.s_leaf(i)),
        }
    }

    /// T-labels of the edges with an endpoint below `v` on `side`.
    pub fn edges_below(&self, side: Side, v: VertexId) -> Vec<u32> {
        match side {
            Side::T => self.t.leaf_labels(v),
            Side::S => self.s.leaf_labels(v).into_iter().map(|j| self.phi_inv[&j]).collect(),
        }
    }

    pub fn check_labels(&self, labels: &IndexSet) -> Result<()> {
        match labels.iter().find(|l| !self.phi.contains_key(l)) {
            Some(l) => Err(invalid(format!("label {l} is not a T leaf"))),
            None => Ok(()),
        }
    }

    pub fn induced_subtanglegram(&self, labels: &IndexSet) -> Result<Tanglegram> {
        self.check_labels(labels)?;
        let t = self.t.induced_subtree(labels)?;
        let images: IndexSet = labels.iter().map(|l| self.phi[l]).collect();
        let s = self.s.induced_subtree(&images)?;
        let phi = labels.iter().map(|&l| (l, self.phi[&l])).collect();
        Tanglegram::new(t, s, phi)
    }

    /// Parses the `.tgl` format: `T = ...`, `S = ...`, `phi = ...`, `#` comments.
    pub fn parse_tgl(text: &str) -> Result<Tanglegram> {
        let mut t = None;
        let mut s = None;
        let mut phi: Option<(usize, Vec<u32>)> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                token: content.split_whitespace().next().unwrap_or("").to_string(),
                message: "expected `T =`, `S =` or `phi =`".into(),
            })?;
            let dup = |tok: &str| Error::Parse {
                line,
                token: tok.to_string(),
                message: "duplicate entry".into(),
            };
            match key.trim() {
                "T" if t.is_none() => t = Some(Tree::parse_line(value, line)?),
                "S" if s.is_none() => s = Some(Tree::parse_line(value, line)?),
                "phi" if phi.is_none() => {
                    let mut images = Vec::new();
                    for tok in value.split_whitespace() {
                        let v: u32 = tok.parse().map_err(|_| Error::Parse {
                            line,
                            token: tok.to_string(),
                            message: "expected a positive integer".into(),
                        })?;
                        images.push(v);
                    }
                    phi = Some((line, images));
                }
                "T" | "S" | "phi" => return Err(dup(key.trim())),
                other => {
                    return Err(Error::Parse {
                        line,
                        token: other.to_string(),
                        message: "expected `T`, `S` or `phi`".into(),
                    })
                }
            }
        }
        let missing = |what: &str| Error::Parse {
            line: text.lines().count().max(1),
            token: String::new(),
            message: format!("missing `{what} =` line"),
        };
        let t = t.ok_or_else(|| missing("T"))?;
        let s = s.ok_or_else(|| missing("S"))?;
        let (line, images) = phi.ok_or_else(|| missing("phi"))?;
        Tanglegram::from_phi_list(t, s, &images).map_err(|e| Error::Parse {
            line,
            token: images.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
            message: e.to_string(),
        })
    }

    pub fn to_tgl(&self) -> String {
        let images: Vec<String> = self.phi.values().map(|x| x.to_string()).collect();
        format!("T = {}\nS = {}\nphi = {}\n", self.t, self.s, images.join(" "))
    }

    /// All leaf-matched pairs, found through the LCA of each T-vertex's matched leaves.
    pub fn leaf_matched_pairs(&self) -> Vec<Pair> {
        let mut out = Vec::new();
        for u in self.t.internal_vertices() {
            let images = self.t.leaf_labels(u).into_iter().map(|i| self.s_leaf(i));
            let v = self.s.lca(images).expect("nonempty");
            if self.s.leaf_count(v) == self.t.leaf_count(u) {
                out.push(Pair::new(u, v));
            }
        }
        out
    }

    /// Canonical form up to flips and relabelling.
    pub fn canonical_key(&self) -> CanonicalKey {
        let (ts, t_orders) = minimal_embeddings(&self.t);
        let (ss, s_orders) = minimal_embeddings(&self.s);
        let mut best: Option<Vec<u8>> = None;
        for y in &s_orders {
            let mut ypos = BTreeMap::new();
            for (p, &l) in y.iter().enumerate() {
                ypos.insert(l, p as u8);
            }
            for x in &t_orders {
                let perm: Vec<u8> = x.iter().map(|i| ypos[&self.phi[i]]).collect();
                if best.as_ref().map_or(true, |b| perm < *b) {
                    best = Some(perm);
                }
            }
        }
        let mut enc = Vec::new();
        enc.extend_from_slice(ts.as_bytes());
        enc.push(b'|');
        enc.extend_from_slice(ss.as_bytes());
        enc.push(b'|');
        enc.extend(best.unwrap_or_default());
        CanonicalKey(enc)
    }

    /// Exchanges the roles of the two trees.
    pub fn swap_sides(&self) -> Tanglegram {
        Tanglegram::new(self.s.clone(), self.t.clone(), self.phi_inv.clone())
            .expect("mirror of a valid tanglegram")
    }

    /// Applies label maps to both trees.
    pub fn relabel(&self, t_map: &BTreeMap<u32, u32>, s_map: &BTreeMap<u32, u32>) -> Result<Tanglegram> {
        let t = relabel_tree(&self.t, t_map)?;
        let s = relabel_tree(&self.s, s_map)?;
        let phi = self
            .phi
            .iter()
            .map(|(a, b)| (t_map[a], s_map[b]))
            .collect();
        Tanglegram::new(t, s, phi)
    }
}

impl fmt::Debug for Tanglegram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let images: Vec<String> = self.phi.iter().map(|(a, b)| format!("{a}->{b}")).collect();
        write!(f, "Tanglegram(T = {}, S = {}, phi = {})", self.t, self.s, images.join(" "))
    }
}

fn relabel_tree(tree: &Tree, map: &BTreeMap<u32, u32>) -> Result<Tree> {
    let mut b = TreeBuilder::new();
    let mut built = vec![0; tree.vertex_count()];
    for v in tree.postorder() {
        built[v] = match tree.children(v) {
            None => {
                let l = tree.label(v).expect("leaf label");
                b.leaf(*map.get(&l).ok_or_else(|| invalid(format!("no image for {l}")))?)
            }
            Some([x, y]) => b.join(built[x], built[y]),
        };
    }
    b.finish(built[tree.root()])
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(pub Vec<u8>);

/// Minimal shape string of `tree`, plus the leaf orders of every embedding attaining it.
fn minimal_embeddings(tree: &Tree) -> (String, Vec<Vec<u32>>) {
    let mut code: Vec<String> = vec![String::new(); tree.vertex_count()];
    let mut orders: Vec<Vec<Vec<u32>>> = vec![Vec::new(); tree.vertex_count()];
    for v in tree.postorder() {
        match tree.children(v) {
            None => {
                code[v] = "0".into();
                orders[v] = vec![vec![tree.label(v).expect("leaf label")]];
            }
            Some([a, b]) => {
                let ab = format!("({}{})", code[a], code[b]);
                let ba = format!("({}{})", code[b], code[a]);
                let firsts: Vec<(VertexId, VertexId)> = match ab.cmp(&ba) {
                    std::cmp::Ordering::Less => vec![(a, b)],
                    std::cmp::Ordering::Greater => vec![(b, a)],
                    std::cmp::Ordering::Equal => vec![(a, b), (b, a)],
                };
                let mut acc = Vec::new();
                for (p, q) in firsts {
                    for x in &orders[p] {
                        for y in &orders[q] {
                            let mut o = x.clone();
                            o.extend_from_slice(y);
                            acc.push(o);
                        }
                    }
                }
                code[v] = ab.min(ba);
                orders[v] = acc;
                orders[a] = Vec::new();
                orders[b] = Vec::new();
            }
        }
    }
    let r = tree.root();
    (std::mem::take(&mut code[r]), std::mem::take(&mut orders[r]))
}

/// Reference canonical key: minimum over every flip combination, no pruning.
pub fn canonical_key_exhaustive(tg: &Tanglegram) -> CanonicalKey {
    let t_emb = all_embeddings(tg.t());
    let s_emb = all_embeddings(tg.s());
    let mut best: Option<Vec<u8>> = None;
    for (ts, x) in &t_emb {
        for (ss, y) in &s_emb {
            let ypos: BTreeMap<u32, u8> = y.iter().enumerate().map(|(p, &l)| (l, p as u8)).collect();
            let mut enc = Vec::new();
            enc.extend_from_slice(ts.as_bytes());
            enc.push(b'|');
            enc.extend_from_slice(ss.as_bytes());
            enc.push(b'|');
            enc.extend(x.iter().map(|i| ypos[&tg.phi(*i).expect("label")]));
            if best.as_ref().map_or(true, |b| enc < *b) {
                best = Some(enc);
            }
        }
    }
    CanonicalKey(best.unwrap_or_default())
}

fn all_embeddings(tree: &Tree) -> Vec<(String, Vec<u32>)> {
    let mut memo: Vec<Vec<(String, Vec<u32>)>> = vec![Vec::new(); tree.vertex_count()];
    for v in tree.postorder() {
        memo[v] = match tree.children(v) {
            None => vec![("0".into(), vec![tree.label(v).expect("leaf label")])],
            Some([a, b]) => {
                let mut acc = Vec::new();
                for (p, q) in [(a, b), (b, a)] {
                    for (cp, op) in &memo[p] {
                        for (cq, oq) in &memo[q] {
                            let mut o = op.clone();
                            o.extend_from_slice(oq);
                            acc.push((format!("({cp}{cq})"), o));
                        }
                    }
                }
                acc
            }
        };
    }
    std::mem::take(&mut memo[tree.root()])
}
