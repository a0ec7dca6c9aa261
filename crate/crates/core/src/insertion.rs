//! Optimal insertion of one matched leaf pair into a planar subtanglegram.
//!
//! The engine works on sublists: the layout holds only the labels of a scope
//! (the planar part plus the inserted label), so the iterated variant can reuse it.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::layout::{flip_block, list_crossings, switch_block, validate, Layout, Positions};
use crate::tanglegram::{IndexSet, Pair, Side, Tanglegram};
use crate::tree::VertexId;
use crate::untangle::{restricted_crossings, untangle_restricted};

/// Which branch of the insertion procedure applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertionCase {
    /// `u0` lies strictly above the T vertex of the highest S-side pair.
    AboveSChain,
    /// `v0` lies strictly above the S vertex of the highest T-side pair.
    AboveTChain,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Switch(Side, VertexId),
    PairedFlip(Pair),
}

/// One majority-rule decision: apply the move when the inserted edge crosses
/// more than half of `edges` (T labels).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub decision: Decision,
    pub edges: IndexSet,
}

/// Final switches at `u0` and `v0` in the general case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closing {
    pub e_u0: IndexSet,
    pub e_v0: IndexSet,
}

#[derive(Debug, Clone)]
pub struct InsertionContext {
    pub i: u32,
    pub u0: VertexId,
    pub v0: VertexId,
    pub l_i: Vec<Pair>,
    /// Pairs above `t_i` only, lowest first.
    pub l_t: Vec<Pair>,
    /// Pairs above `s_phi(i)` only, lowest first.
    pub l_s: Vec<Pair>,
    pub u_smax: Option<Pair>,
    pub v_tmax: Option<Pair>,
    pub case: InsertionCase,
    pub steps: Vec<Step>,
    pub closing: Option<Closing>,
}

/// Lowest strict ancestor of the inserted leaf on `side` that has a leaf from `others`.
fn anchor(tg: &Tanglegram, side: Side, i: u32, others: &[u32]) -> Option<VertexId> {
    let tree = tg.tree(side);
    let leaf = match side {
        Side::T => tg.t_leaf(i),
        Side::S => tg.s_leaf(i),
    };
    let mut v = tree.parent(leaf)?;
    loop {
        if others.iter().any(|&j| tg.edge_below(side, v, j)) {
            return Some(v);
        }
        v = tree.parent(v)?;
    }
}

fn side_vertex(p: Pair, side: Side) -> VertexId {
    match side {
        Side::T => p.u,
        Side::S => p.v,
    }
}

/// Edges of `others` with an endpoint below `top` on `side` but not below `cut`.
fn band(tg: &Tanglegram, others: &[u32], side: Side, top: VertexId, cut: Option<VertexId>) -> IndexSet {
    others
        .iter()
        .copied()
        .filter(|&j| tg.edge_below(side, top, j) && !cut.is_some_and(|c| tg.edge_below(side, c, j)))
        .collect()
}

/// Builds the decision plan for inserting `i` into the layout over `others ∪ {i}`.
/// `pairs` are the usable leaf-matched pairs of the planar part, as original vertices.
pub(crate) fn plan(tg: &Tanglegram, i: u32, others: &[u32], pairs: &[Pair]) -> Result<InsertionContext> {
    let (t, s) = (tg.t(), tg.s());
    let ti = tg.t_leaf(i);
    let si = tg.s_leaf(i);
    let u0 = anchor(tg, Side::T, i, others).ok_or_else(|| invalid("nothing to insert against"))?;
    let v0 = anchor(tg, Side::S, i, others).ok_or_else(|| invalid("nothing to insert against"))?;
    let mut l_t: Vec<Pair> = pairs
        .iter()
        .copied()
        .filter(|p| t.is_strict_ancestor(p.u, ti) && !s.is_strict_ancestor(p.v, si))
        .collect();
    let mut l_s: Vec<Pair> = pairs
        .iter()
        .copied()
        .filter(|p| !t.is_strict_ancestor(p.u, ti) && s.is_strict_ancestor(p.v, si))
        .collect();
    l_t.sort_by_key(|p| t.leaf_count(p.u));
    l_s.sort_by_key(|p| s.leaf_count(p.v));
    let u_smax = l_s.last().copied();
    let v_tmax = l_t.last().copied();

    let case = if u_smax.is_some_and(|p| t.is_strict_ancestor(u0, p.u)) {
        InsertionCase::AboveSChain
    } else if v_tmax.is_some_and(|p| s.is_strict_ancestor(v0, p.v)) {
        InsertionCase::AboveTChain
    } else {
        InsertionCase::General
    };

    let mut steps = Vec::new();
    let mut closing = None;
    match case {
        InsertionCase::AboveSChain | InsertionCase::AboveTChain => {
            // `chain` is the side whose pairs sit above the inserted leaf.
            let (chain, other, chain_list) = if case == InsertionCase::AboveSChain {
                (Side::S, Side::T, &l_s)
            } else {
                (Side::T, Side::S, &l_t)
            };
            let base = |side: Side| if side == Side::T { u0 } else { v0 };
            let top = *chain_list.last().expect("nonempty chain");
            steps.push(Step {
                decision: Decision::Switch(other, base(other)),
                edges: band(tg, others, other, base(other), Some(side_vertex(top, other))),
            });
            for j in (0..chain_list.len()).rev() {
                let below = if j == 0 { base(chain) } else { side_vertex(chain_list[j - 1], chain) };
                steps.push(Step {
                    decision: Decision::PairedFlip(chain_list[j]),
                    edges: band(tg, others, chain, side_vertex(chain_list[j], chain), Some(below)),
                });
            }
            steps.push(Step {
                decision: Decision::Switch(chain, base(chain)),
                edges: band(tg, others, chain, base(chain), None),
            });
        }
        InsertionCase::General => {
            for j in (0..l_t.len()).rev() {
                let below = if j == 0 { u0 } else { l_t[j - 1].u };
                steps.push(Step {
                    decision: Decision::PairedFlip(l_t[j]),
                    edges: band(tg, others, Side::T, l_t[j].u, Some(below)),
                });
            }
            for j in (0..l_s.len()).rev() {
                let below = if j == 0 { v0 } else { l_s[j - 1].v };
                steps.push(Step {
                    decision: Decision::PairedFlip(l_s[j]),
                    edges: band(tg, others, Side::S, l_s[j].v, Some(below)),
                });
            }
            let e_u0 = band(tg, others, Side::T, u0, None);
            let e_v0 = band(tg, others, Side::S, v0, None);
            if cfg!(debug_assertions) {
                let t_sets: Vec<&IndexSet> = steps[..l_t.len()].iter().map(|st| &st.edges).collect();
                let s_sets: Vec<&IndexSet> = steps[l_t.len()..].iter().map(|st| &st.edges).collect();
                for a in t_sets.iter().copied().chain([&e_u0]) {
                    for b in s_sets.iter().copied().chain([&e_v0]) {
                        if !(std::ptr::eq(a, &e_u0) && std::ptr::eq(b, &e_v0)) {
                            debug_assert!(a.is_disjoint(b), "edge sets overlap away from u0 and v0");
                        }
                    }
                }
            }
            closing = Some(Closing { e_u0, e_v0 });
        }
    }

    Ok(InsertionContext {
        i,
        u0,
        v0,
        l_i: pairs.to_vec(),
        l_t,
        l_s,
        u_smax,
        v_tmax,
        case,
        steps,
        closing,
    })
}

/// Crossings of edge `i` against `edges` in the given lists.
pub(crate) fn crossings_with(tg: &Tanglegram, x: &[u32], y: &[u32], i: u32, edges: &IndexSet) -> usize {
    let xp = Positions::of(x);
    let yp = Positions::of(y);
    let (xi, yi) = (xp.get(i), yp.get(tg.phi(i).expect("label")));
    edges
        .iter()
        .filter(|&&j| (xp.get(j) < xi) != (yp.get(tg.phi(j).expect("label")) < yi))
        .count()
}

fn majority(tg: &Tanglegram, x: &[u32], y: &[u32], i: u32, edges: &IndexSet) -> bool {
    2 * crossings_with(tg, x, y, i, edges) > edges.len()
}

pub(crate) fn apply(tg: &Tanglegram, x: &mut [u32], y: &mut [u32], d: Decision) {
    match d {
        Decision::Switch(Side::T, v) => switch_block(tg.t(), x, v),
        Decision::Switch(Side::S, v) => switch_block(tg.s(), y, v),
        Decision::PairedFlip(p) => {
            flip_block(tg.t(), x, p.u);
            flip_block(tg.s(), y, p.v);
        }
    }
}

/// Runs the plan on sublists `x`, `y` over the scope.
pub(crate) fn execute(tg: &Tanglegram, ctx: &InsertionContext, x: &mut Vec<u32>, y: &mut Vec<u32>) {
    let i = ctx.i;
    for st in &ctx.steps {
        if majority(tg, x, y, i, &st.edges) {
            apply(tg, x, y, st.decision);
        }
    }
    let Some(cl) = &ctx.closing else {
        return;
    };
    let su = Decision::Switch(Side::T, ctx.u0);
    let sv = Decision::Switch(Side::S, ctx.v0);
    if cl.e_u0.is_disjoint(&cl.e_v0) {
        if majority(tg, x, y, i, &cl.e_u0) {
            apply(tg, x, y, su);
        }
        if majority(tg, x, y, i, &cl.e_v0) {
            apply(tg, x, y, sv);
        }
        return;
    }
    let mut best: Option<(u64, Vec<u32>, Vec<u32>)> = None;
    for (do_u, do_v) in [(false, false), (true, false), (false, true), (true, true)] {
        let (mut cx, mut cy) = (x.clone(), y.clone());
        if do_u {
            apply(tg, &mut cx, &mut cy, su);
        }
        if do_v {
            apply(tg, &mut cx, &mut cy, sv);
        }
        let c = list_crossings(tg, &cx, &cy);
        if best.as_ref().map_or(true, |(bc, _, _)| c < *bc) {
            best = Some((c, cx, cy));
        }
    }
    let (_, bx, by) = best.expect("four candidates");
    *x = bx;
    *y = by;
}

fn residual(tg: &Tanglegram, i: u32) -> Result<IndexSet> {
    if tg.phi(i).is_none() {
        return Err(invalid(format!("label {i} is not a leaf")));
    }
    if tg.size() < 2 {
        return Err(Error::Precondition("insertion needs at least two leaves".into()));
    }
    let mut rest = tg.label_set();
    rest.remove(&i);
    Ok(rest)
}

fn planar_start(tg: &Tanglegram, rest: &IndexSet) -> Result<(Layout, Vec<Pair>)> {
    let (ly, pairs) = untangle_restricted(tg, rest)?;
    if restricted_crossings(tg, &ly, rest) != 0 {
        return Err(Error::Precondition(
            "the subtanglegram without the inserted edge is not planar".into(),
        ));
    }
    Ok((ly, pairs))
}

pub fn build_context(tg: &Tanglegram, i: u32) -> Result<InsertionContext> {
    let rest = residual(tg, i)?;
    let (_, pairs) = planar_start(tg, &rest)?;
    let others: Vec<u32> = rest.into_iter().collect();
    plan(tg, i, &others, &pairs)
}

/// Best layout among those whose restriction to all labels but `i` is crossing-free.
pub fn insert_edge(tg: &Tanglegram, i: u32) -> Result<Layout> {
    let rest = residual(tg, i)?;
    let (start, pairs) = planar_start(tg, &rest)?;
    let others: Vec<u32> = rest.into_iter().collect();
    let ctx = plan(tg, i, &others, &pairs)?;
    let (mut x, mut y) = (start.x, start.y);
    execute(tg, &ctx, &mut x, &mut y);
    Ok(Layout::new(x, y))
}

/// As [`insert_edge`], but starting from `start`, which must restrict to a planar layout.
pub fn insert_edge_from(tg: &Tanglegram, i: u32, start: &Layout) -> Result<Layout> {
    let rest = residual(tg, i)?;
    validate(tg, start)?;
    if restricted_crossings(tg, start, &rest) != 0 {
        return Err(Error::Precondition("start layout is not planar without the inserted edge".into()));
    }
    let (_, pairs) = planar_start(tg, &rest)?;
    let others: Vec<u32> = rest.into_iter().collect();
    let ctx = plan(tg, i, &others, &pairs)?;
    let (mut x, mut y) = (start.x.clone(), start.y.clone());
    execute(tg, &ctx, &mut x, &mut y);
    Ok(Layout::new(x, y))
}

pub fn crtei(tg: &Tanglegram, i: u32) -> Result<u64> {
    let ly = insert_edge(tg, i)?;
    Ok(list_crossings(tg, &ly.x, &ly.y))
}

/// `crtei` for every label whose removal leaves a planar tanglegram.
pub fn crtei_all(tg: &Tanglegram) -> Result<Vec<(u32, u64)>> {
    let out: Vec<Result<Option<(u32, u64)>>> = tg
        .labels()
        .into_par_iter()
        .map(|i| match crtei(tg, i) {
            Ok(c) => Ok(Some((i, c))),
            Err(Error::Precondition(_)) => Ok(None),
            Err(e) => Err(e),
        })
        .collect();
    let mut v = Vec::new();
    for r in out {
        if let Some(p) = r? {
            v.push(p);
        }
    }
    Ok(v)
}

pub fn crtei_min(tg: &Tanglegram) -> Result<u64> {
    crtei_all(tg)?
        .into_iter()
        .map(|(_, c)| c)
        .min()
        .ok_or_else(|| Error::NotApplicable("no single edge leaves a planar subtanglegram".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::count_crossings;

    fn six_leaf_example() -> Tanglegram {
        Tanglegram::from_strs("((((1,2),(3,4)),5),6)", "(1,(2,((3,4),(5,6))))", &[1, 5, 2, 3, 4, 6]).unwrap()
    }

    #[test]
    fn non_planar_example_has_crtei_three() {
        let tg = six_leaf_example();
        assert_eq!(crtei(&tg, 2).unwrap(), 3);
        assert_eq!(crtei_min(&tg).unwrap(), 3);
        assert!(matches!(crtei(&tg, 1), Err(Error::Precondition(_))));
        assert_eq!(crtei_all(&tg).unwrap(), vec![(2, 3)]);
    }

    #[test]
    fn size_two_context_is_empty() {
        let tg = Tanglegram::from_strs("(1,2)", "(1,2)", &[1, 2]).unwrap();
        let ctx = build_context(&tg, 1).unwrap();
        assert!(ctx.l_i.is_empty() && ctx.l_t.is_empty() && ctx.l_s.is_empty());
        assert_eq!(crtei(&tg, 1).unwrap(), 0);
    }

    #[test]
    fn planar_reinsertion_is_free() {
        let tg = Tanglegram::from_strs("(((1,2),3),(4,5))", "(((1,(2,3)),4),5)", &[4, 2, 5, 1, 3]).unwrap();
        for i in 1..=5 {
            assert_eq!(crtei(&tg, i).unwrap(), 0, "label {i}");
        }
        assert_eq!(crtei_min(&tg).unwrap(), 0);
    }

    #[test]
    fn above_s_chain_walkthrough() {
        let tg = Tanglegram::from_strs(
            "((1,2),(9,((3,4),((5,(6,7)),8))))",
            "((((1,2),3),4),(5,(((9,6),7),8)))",
            &[1, 2, 3, 4, 5, 6, 7, 8, 9],
        )
        .unwrap();
        let ctx = build_context(&tg, 9).unwrap();
        assert_eq!(ctx.case, InsertionCase::AboveSChain);
        assert!(ctx.l_t.is_empty());
        assert_eq!(ctx.l_s.len(), 2);
        let start = Layout::new(vec![1, 2, 9, 3, 4, 5, 6, 7, 8], vec![1, 2, 3, 4, 5, 9, 6, 7, 8]);
        let out = insert_edge_from(&tg, 9, &start).unwrap();
        assert_eq!(out.x, vec![1, 2, 3, 4, 5, 7, 6, 8, 9]);
        assert_eq!(out.y, vec![1, 2, 3, 4, 5, 7, 6, 9, 8]);
        assert_eq!(count_crossings(&tg, &out).unwrap(), 1);
    }

    #[test]
    fn unknown_label_is_rejected() {
        assert!(matches!(crtei(&six_leaf_example(), 9), Err(Error::InvalidArgument(_))));
        let one = Tanglegram::from_strs("1", "1", &[1]).unwrap();
        assert!(matches!(crtei(&one, 1), Err(Error::Precondition(_))));
        assert!(matches!(crtei_min(&one), Err(Error::NotApplicable(_))));
    }
}
