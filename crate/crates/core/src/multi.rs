//! Inserting several matched leaf pairs: one at a time, and exactly over a decision poset.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::insertion::{crossings_with, execute, plan};
use crate::layout::{flip_block, list_crossings, switch_block, validate, Layout};
use crate::tanglegram::{IndexSet, Pair, Side, Tanglegram};
use crate::tree::{Tree, VertexId};
use crate::untangle::{active_counts, restricted_crossings, untangle_restricted};

/// Most free decisions the exact search will enumerate (2^limit passes).
pub const FREE_DECISION_LIMIT: usize = 20;

fn planar_start(tg: &Tanglegram, active: &IndexSet) -> Result<(Layout, Vec<Pair>)> {
    if active.is_empty() {
        return Err(invalid("the kept label set is empty"));
    }
    tg.check_labels(active)?;
    let (ly, pairs) = untangle_restricted(tg, active)?;
    if restricted_crossings(tg, &ly, active) != 0 {
        return Err(Error::Precondition("the subtanglegram on the kept labels is not planar".into()));
    }
    Ok((ly, pairs))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IteratedStep {
    pub label: u32,
    /// Number of edges once this label is in.
    pub size: usize,
    /// Crossings added by this step.
    pub added: u64,
}

#[derive(Debug, Clone)]
pub struct IteratedReport {
    pub layout: Layout,
    pub crossings: u64,
    pub steps: Vec<IteratedStep>,
}

/// Last index in `list` holding a label covered by `v`.
fn block_end(tree: &Tree, list: &[u32], v: VertexId) -> Option<usize> {
    list.iter().rposition(|&l| tree.covers_label(v, l))
}

/// Lowest strict ancestor of `leaf` with a label in `list`.
fn lowest_anchor(tree: &Tree, list: &[u32], leaf: VertexId) -> Option<VertexId> {
    let mut v = tree.parent(leaf)?;
    loop {
        if block_end(tree, list, v).is_some() {
            return Some(v);
        }
        v = tree.parent(v)?;
    }
}

pub fn iterated_insertion(tg: &Tanglegram, active: &IndexSet) -> Result<Layout> {
    Ok(iterated_insertion_report(tg, active)?.layout)
}

/// Adds the missing labels in increasing order, each with the single-edge rules,
/// flipping every pair of the starting subtanglegram at most once.
pub fn iterated_insertion_report(tg: &Tanglegram, active: &IndexSet) -> Result<IteratedReport> {
    let (start, pairs) = planar_start(tg, active)?;
    let (t, s) = (tg.t(), tg.s());
    let mut x: Vec<u32> = start.x.iter().copied().filter(|l| active.contains(l)).collect();
    let mut y: Vec<u32> = start
        .y
        .iter()
        .copied()
        .filter(|&l| active.contains(&tg.phi_inv(l).expect("label")))
        .collect();
    let mut usable = pairs;
    let mut kept = active.clone();
    let mut steps = Vec::new();
    for i in tg.labels().into_iter().filter(|l| !active.contains(l)) {
        let before = list_crossings(tg, &x, &y);
        let si = tg.phi(i).expect("label");
        let u0 = lowest_anchor(t, &x, tg.t_leaf(i)).expect("kept labels exist");
        let v0 = lowest_anchor(s, &y, tg.s_leaf(i)).expect("kept labels exist");
        let px = block_end(t, &x, u0).expect("anchor block") + 1;
        x.insert(px, i);
        let py = block_end(s, &y, v0).expect("anchor block") + 1;
        y.insert(py, si);
        let others: Vec<u32> = kept.iter().copied().collect();
        let ctx = plan(tg, i, &others, &usable)?;
        usable.retain(|p| !ctx.l_t.contains(p) && !ctx.l_s.contains(p));
        execute(tg, &ctx, &mut x, &mut y);
        kept.insert(i);
        debug_assert_eq!(
            restricted_crossings(tg, &Layout::new(x.clone(), y.clone()), active),
            0,
            "kept labels must stay crossing-free"
        );
        let after = list_crossings(tg, &x, &y);
        steps.push(IteratedStep {
            label: i,
            size: kept.len(),
            added: after - before,
        });
    }
    let crossings = list_crossings(tg, &x, &y);
    Ok(IteratedReport {
        layout: Layout::new(x, y),
        crossings,
        steps,
    })
}

/// A decision point: a leaf-matched pair or a single tree vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    Pair(Pair),
    T(VertexId),
    S(VertexId),
}

impl Element {
    fn part(self, side: Side) -> Option<VertexId> {
        match (self, side) {
            (Element::Pair(p), Side::T) => Some(p.u),
            (Element::Pair(p), Side::S) => Some(p.v),
            (Element::T(u), Side::T) => Some(u),
            (Element::S(v), Side::S) => Some(v),
            _ => None,
        }
    }
}

/// Which kind of nearby pair puts a parent vertex in `m0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketKind {
    /// Some pair lies below `P(t_i)` on T and above `P(s_i)` on S.
    BelowT,
    /// Some pair lies below `P(s_i)` on S and above `P(t_i)` on T.
    BelowS,
}

#[derive(Debug, Clone)]
pub struct MultiPartition {
    pub active: IndexSet,
    /// Leaf-matched pairs of the kept subtanglegram, as reduced vertices.
    pub l_i: Vec<Pair>,
    /// Pairs covering the same inserted edges on both sides; flipping them changes nothing.
    pub l0: Vec<Pair>,
    /// Pairs with exactly one inserted leaf below `u` and none below `v`.
    pub l_t: Vec<Pair>,
    /// Pairs with exactly one inserted leaf below `v` and none below `u`.
    pub l_s: Vec<Pair>,
    /// Remaining pairs; decided by enumeration.
    pub l1: Vec<Pair>,
    /// Vertices absent from the kept subtanglegram (one child has no kept leaf).
    pub m_i: Vec<Element>,
    /// Parents of both ends of an inserted edge that sit on either side of some pair.
    pub m0: Vec<Element>,
    pub m_t: Vec<Element>,
    pub m_s: Vec<Element>,
    /// Remaining absent vertices; decided by enumeration.
    pub m1: Vec<Element>,
    /// Inserted label -> (P(t_i), P(s_phi(i))).
    pub parents: BTreeMap<u32, (VertexId, VertexId)>,
    /// Inserted label -> lowest ancestors with kept leaves on each side.
    pub anchors: BTreeMap<u32, (VertexId, VertexId)>,
    /// For elements of `m0`, `m_t`, `m_s`: the inserted label they are the parent of.
    pub owner: BTreeMap<Element, u32>,
    pub bracket: BTreeMap<Element, BracketKind>,
}

fn ancestor_with(tree: &Tree, counts: &[usize], leaf: VertexId) -> VertexId {
    let mut v = tree.parent(leaf).expect("not the root");
    while counts[v] == 0 {
        v = tree.parent(v).expect("root has kept leaves");
    }
    v
}

/// Splits the pairs and absent vertices of the kept subtanglegram by how the inserted leaves sit.
pub fn partition_sets(tg: &Tanglegram, active: &IndexSet) -> Result<MultiPartition> {
    let (_, pairs) = planar_start(tg, active)?;
    Ok(partition_with(tg, active, pairs))
}

fn partition_with(tg: &Tanglegram, active: &IndexSet, l_i: Vec<Pair>) -> MultiPartition {
    let (t, s) = (tg.t(), tg.s());
    let (kt, ks) = active_counts(tg, active);
    let missing: Vec<u32> = tg.labels().into_iter().filter(|l| !active.contains(l)).collect();
    let gone: IndexSet = missing.iter().copied().collect();
    let (mt_count, ms_count) = active_counts(tg, &gone);

    let (mut l0, mut l_t, mut l_s, mut l1) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for &p in &l_i {
        let under_u: BTreeSet<u32> = missing
            .iter()
            .filter(|&&i| t.covers_label(p.u, i))
            .map(|&i| tg.phi(i).expect("label"))
            .collect();
        let under_v: BTreeSet<u32> = missing
            .iter()
            .map(|&i| tg.phi(i).expect("label"))
            .filter(|&j| s.covers_label(p.v, j))
            .collect();
        if under_u == under_v {
            l0.push(p);
        } else if under_u.len() == 1 && under_v.is_empty() {
            l_t.push(p);
        } else if under_u.is_empty() && under_v.len() == 1 {
            l_s.push(p);
        } else {
            l1.push(p);
        }
    }

    let absent = |tree: &Tree, counts: &[usize], wrap: fn(VertexId) -> Element| -> Vec<Element> {
        tree.internal_vertices()
            .filter(|&v| {
                let [a, b] = tree.children(v).expect("internal");
                counts[a] == 0 || counts[b] == 0
            })
            .map(wrap)
            .collect()
    };
    let mut m_i = absent(t, &kt, Element::T);
    m_i.extend(absent(s, &ks, Element::S));

    let mut parents = BTreeMap::new();
    let mut anchors = BTreeMap::new();
    for &i in &missing {
        let (ti, si) = (tg.t_leaf(i), tg.s_leaf(i));
        parents.insert(i, (t.parent(ti).expect("size >= 2"), s.parent(si).expect("size >= 2")));
        anchors.insert(i, (ancestor_with(t, &kt, ti), ancestor_with(s, &ks, si)));
    }

    let above_t = |a: VertexId, b: VertexId| t.is_strict_ancestor(a, b);
    let above_s = |a: VertexId, b: VertexId| s.is_strict_ancestor(a, b);
    let mut m0 = Vec::new();
    let mut owner = BTreeMap::new();
    let mut bracket = BTreeMap::new();
    for &i in &missing {
        let (pt, ps) = parents[&i];
        if mt_count[pt] != 1 || ms_count[ps] != 1 {
            continue;
        }
        let kind = if l_i.iter().any(|p| above_t(pt, p.u) && above_s(p.v, ps)) {
            BracketKind::BelowT
        } else if l_i.iter().any(|p| above_s(ps, p.v) && above_t(p.u, pt)) {
            BracketKind::BelowS
        } else {
            continue;
        };
        for e in [Element::T(pt), Element::S(ps)] {
            m0.push(e);
            owner.insert(e, i);
            bracket.insert(e, kind);
        }
    }

    // Whether some kept leaf below `a` (T) is matched to one below `b` (S).
    let linked = |a: VertexId, b: VertexId| {
        active
            .iter()
            .any(|&j| t.covers_label(a, j) && s.covers_label(b, tg.phi(j).expect("label")))
    };
    let (mut m_t, mut m_s) = (Vec::new(), Vec::new());
    for &i in &missing {
        let (pt, ps) = parents[&i];
        let (at, as_) = anchors[&i];
        let es = Element::S(ps);
        if !owner.contains_key(&es)
            && ms_count[ps] == 1
            && (!linked(at, ps) || l_i.iter().any(|p| above_t(at, p.u) && above_s(p.v, ps)))
        {
            m_s.push(es);
            owner.insert(es, i);
        }
        let et = Element::T(pt);
        if !owner.contains_key(&et)
            && mt_count[pt] == 1
            && (!linked(pt, as_) || l_i.iter().any(|p| above_t(p.u, pt) && above_s(as_, p.v)))
        {
            m_t.push(et);
            owner.insert(et, i);
        }
    }
    let m1: Vec<Element> = m_i.iter().copied().filter(|e| !owner.contains_key(e)).collect();

    MultiPartition {
        active: active.clone(),
        l_i,
        l0,
        l_t,
        l_s,
        l1,
        m_i,
        m0,
        m_t,
        m_s,
        m1,
        parents,
        anchors,
        owner,
        bracket,
    }
}

#[derive(Debug, Clone)]
pub struct DecisionPoset {
    pub elements: Vec<Element>,
    /// `less[a][b]`: element `a` lies strictly below element `b`.
    less: Vec<Vec<bool>>,
    /// (lower, upper) for each covering relation.
    pub covers: Vec<(Element, Element)>,
    /// Linear extension, lowest first.
    pub extension: Vec<Element>,
}

impl DecisionPoset {
    fn index(&self, e: Element) -> Option<usize> {
        self.elements.iter().position(|&x| x == e)
    }

    pub fn is_below(&self, a: Element, b: Element) -> bool {
        match (self.index(a), self.index(b)) {
            (Some(i), Some(j)) => self.less[i][j],
            _ => false,
        }
    }

    /// Elements covered by `e`.
    pub fn covered_by(&self, e: Element) -> Vec<Element> {
        self.covers
            .iter()
            .filter(|(_, up)| *up == e)
            .map(|(lo, _)| *lo)
            .collect()
    }
}

/// The order on pairs and absent vertices induced by ancestry in each tree.
pub fn build_poset(tg: &Tanglegram, mp: &MultiPartition) -> Result<DecisionPoset> {
    let (t, s) = (tg.t(), tg.s());
    let mut elements: Vec<Element> = mp
        .l_t
        .iter()
        .chain(&mp.l_s)
        .chain(&mp.l1)
        .map(|&p| Element::Pair(p))
        .chain(mp.m_i.iter().copied())
        .collect();
    elements.sort();
    elements.dedup();
    let n = elements.len();
    // Non-strict base relation from the tree orders.
    let base = |a: Element, b: Element| -> bool {
        match (a, b) {
            (Element::Pair(p), Element::Pair(q)) => t.is_ancestor(q.u, p.u) && s.is_ancestor(q.v, p.v),
            (Element::Pair(p), Element::T(u)) => t.is_ancestor(u, p.u),
            (Element::T(u), Element::Pair(p)) => t.is_ancestor(p.u, u),
            (Element::Pair(p), Element::S(v)) => s.is_ancestor(v, p.v),
            (Element::S(v), Element::Pair(p)) => s.is_ancestor(p.v, v),
            (Element::T(a), Element::T(b)) => t.is_ancestor(b, a),
            (Element::S(a), Element::S(b)) => s.is_ancestor(b, a),
            _ => false,
        }
    };
    let mut le = vec![vec![false; n]; n];
    for a in 0..n {
        for b in 0..n {
            le[a][b] = a == b || base(elements[a], elements[b]);
        }
    }
    for k in 0..n {
        for a in 0..n {
            if le[a][k] {
                for b in 0..n {
                    if le[k][b] {
                        le[a][b] = true;
                    }
                }
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            if le[a][b] && le[b][a] {
                return Err(Error::Internal(format!(
                    "decision order is not antisymmetric at {:?} and {:?}",
                    elements[a], elements[b]
                )));
            }
        }
    }
    let less: Vec<Vec<bool>> = (0..n)
        .map(|a| (0..n).map(|b| a != b && le[a][b]).collect())
        .collect();
    let mut covers = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if less[a][b] && !(0..n).any(|c| less[a][c] && less[c][b]) {
                covers.push((elements[a], elements[b]));
            }
        }
    }
    // Kahn's algorithm; elements are sorted, so the first ready one wins ties.
    let mut placed = vec![false; n];
    let mut extension = Vec::with_capacity(n);
    for _ in 0..n {
        let next = (0..n)
            .find(|&b| !placed[b] && (0..n).all(|a| !less[a][b] || placed[a]))
            .ok_or_else(|| Error::Internal("decision order has a cycle".into()))?;
        placed[next] = true;
        extension.push(elements[next]);
    }
    Ok(DecisionPoset {
        elements,
        less,
        covers,
        extension,
    })
}

/// Edge pairs whose crossings decide the move at `owner`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossSet {
    pub owner: Element,
    pub inserted: u32,
    /// Kept edges (T labels) paired with `inserted`.
    pub edges: IndexSet,
}

impl CrossSet {
    pub fn pairs(&self) -> BTreeSet<(u32, u32)> {
        self.edges.iter().map(|&j| (self.inserted, j)).collect()
    }
}

pub fn cross_sets(tg: &Tanglegram, mp: &MultiPartition, poset: &DecisionPoset) -> BTreeMap<Element, CrossSet> {
    let (t, s) = (tg.t(), tg.s());
    let kept: Vec<u32> = mp.active.iter().copied().collect();
    let under = |side: Side, v: VertexId, j: u32| tg.edge_below(side, v, j);
    let minus_covered = |side: Side, e: Element, top: VertexId| -> IndexSet {
        let cuts: Vec<VertexId> = poset
            .covered_by(e)
            .into_iter()
            .filter_map(|c| c.part(side))
            .collect();
        kept.iter()
            .copied()
            .filter(|&j| under(side, top, j) && !cuts.iter().any(|&c| under(side, c, j)))
            .collect()
    };
    let all_under = |side: Side, top: VertexId| -> IndexSet {
        kept.iter().copied().filter(|&j| under(side, top, j)).collect()
    };
    let mut out = BTreeMap::new();
    for &p in &mp.l_t {
        let e = Element::Pair(p);
        let i = *mp.parents.keys().find(|&&i| t.covers_label(p.u, i)).expect("one inserted leaf");
        out.insert(e, CrossSet { owner: e, inserted: i, edges: minus_covered(Side::T, e, p.u) });
    }
    for &p in &mp.l_s {
        let e = Element::Pair(p);
        let i = *mp
            .parents
            .keys()
            .find(|&&i| s.covers_label(p.v, tg.phi(i).expect("label")))
            .expect("one inserted leaf");
        out.insert(e, CrossSet { owner: e, inserted: i, edges: minus_covered(Side::S, e, p.v) });
    }
    for &e in mp.m0.iter().chain(&mp.m_t).chain(&mp.m_s) {
        let i = mp.owner[&e];
        let edges = match (e, mp.bracket.get(&e)) {
            (Element::T(u), Some(BracketKind::BelowT)) => minus_covered(Side::T, e, u),
            (Element::S(v), Some(BracketKind::BelowS)) => minus_covered(Side::S, e, v),
            (Element::T(u), _) => all_under(Side::T, u),
            (Element::S(v), _) => all_under(Side::S, v),
            (Element::Pair(_), _) => unreachable!("absent vertices are single vertices"),
        };
        out.insert(e, CrossSet { owner: e, inserted: i, edges });
    }
    out
}

#[derive(Debug, Clone)]
pub struct MultiReport {
    pub layout: Layout,
    pub crossings: u64,
    /// Free decisions taken by the best pass, or `None` if no pass beat the starting layout.
    pub chosen: Option<Vec<Element>>,
    pub passes: u64,
}

struct Plan<'a> {
    tg: &'a Tanglegram,
    mp: MultiPartition,
    poset: DecisionPoset,
    cross: BTreeMap<Element, CrossSet>,
}

impl Plan<'_> {
    /// `l1`, then `m1`, then decision points whose cross set is empty: a majority of
    /// nothing never fires, and these can still matter through the free pairs they cover.
    fn free(&self) -> Vec<Element> {
        self.mp
            .l1
            .iter()
            .map(|&p| Element::Pair(p))
            .chain(self.mp.m1.iter().copied())
            .chain(self.cross.values().filter(|c| c.edges.is_empty()).map(|c| c.owner))
            .collect()
    }

    fn majority(&self, e: Element, x: &[u32], y: &[u32]) -> bool {
        let cs = &self.cross[&e];
        2 * crossings_with(self.tg, x, y, cs.inserted, &cs.edges) > cs.edges.len()
    }

    fn pass(&self, start: &Layout, chosen: &BTreeSet<Element>) -> Layout {
        let tg = self.tg;
        let (mut x, mut y) = (start.x.clone(), start.y.clone());
        let mp = &self.mp;
        for &e in self.poset.extension.iter().rev() {
            let act = if chosen.contains(&e) {
                true
            } else if self.cross.contains_key(&e) {
                self.majority(e, &x, &y)
            } else {
                false
            };
            if !act {
                continue;
            }
            match e {
                Element::Pair(p) => {
                    flip_block(tg.t(), &mut x, p.u);
                    flip_block(tg.s(), &mut y, p.v);
                }
                Element::T(u) => switch_block(tg.t(), &mut x, u),
                Element::S(v) => switch_block(tg.s(), &mut y, v),
            }
            debug_assert_eq!(
                restricted_crossings(tg, &Layout::new(x.clone(), y.clone()), &mp.active),
                0,
                "kept labels must stay crossing-free"
            );
        }
        Layout::new(x, y)
    }
}

fn make_plan<'a>(tg: &'a Tanglegram, active: &IndexSet) -> Result<(Layout, Plan<'a>)> {
    let (start, pairs) = planar_start(tg, active)?;
    let mp = partition_with(tg, active, pairs);
    let poset = build_poset(tg, &mp)?;
    let cross = cross_sets(tg, &mp, &poset);
    Ok((start, Plan { tg, mp, poset, cross }))
}

pub fn multi_insertion(tg: &Tanglegram, active: &IndexSet) -> Result<Layout> {
    Ok(multi_insertion_report(tg, active)?.layout)
}

/// Tries every subset of the free decisions and keeps the first layout with the fewest crossings.
pub fn multi_insertion_report(tg: &Tanglegram, active: &IndexSet) -> Result<MultiReport> {
    let (start, plan) = make_plan(tg, active)?;
    let free = plan.free();
    if free.len() > FREE_DECISION_LIMIT {
        return Err(Error::SizeGuard {
            size: free.len(),
            limit: FREE_DECISION_LIMIT,
        });
    }
    let passes = 1u64 << free.len();
    let subset = |mask: u64| -> BTreeSet<Element> {
        free.iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &e)| e)
            .collect()
    };
    let (best_c, best_mask) = (0..passes)
        .into_par_iter()
        .map(|mask| {
            let ly = plan.pass(&start, &subset(mask));
            (list_crossings(tg, &ly.x, &ly.y), mask)
        })
        .min()
        .expect("at least one pass");
    let start_c = list_crossings(tg, &start.x, &start.y);
    if best_c < start_c {
        let chosen = subset(best_mask);
        let layout = plan.pass(&start, &chosen);
        Ok(MultiReport {
            layout,
            crossings: best_c,
            chosen: Some(chosen.into_iter().collect()),
            passes,
        })
    } else {
        Ok(MultiReport {
            layout: start,
            crossings: start_c,
            chosen: None,
            passes,
        })
    }
}

/// One pass from `start` with the given free decisions forced on.
pub fn multi_insertion_from(tg: &Tanglegram, active: &IndexSet, start: &Layout, chosen: &[Element]) -> Result<Layout> {
    let (_, plan) = make_plan(tg, active)?;
    validate(tg, start)?;
    if restricted_crossings(tg, start, active) != 0 {
        return Err(Error::Precondition("start layout is not planar on the kept labels".into()));
    }
    let free: BTreeSet<Element> = plan.free().into_iter().collect();
    if let Some(e) = chosen.iter().find(|e| !free.contains(e)) {
        return Err(invalid(format!("{e:?} is not a free decision")));
    }
    Ok(plan.pass(start, &chosen.iter().copied().collect()))
}
