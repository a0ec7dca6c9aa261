//! All planar layouts via paired flips, the flip graph, and irreducible components.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::error::{invalid, Result};
use crate::layout::{flip_block, list_crossings, Layout};
use crate::tanglegram::{Pair, Tanglegram};
use crate::tree::{Tree, TreeBuilder, VertexId};
use crate::untangle::modified_untangle;

/// Planar layouts as nodes, joined when one paired flip maps one to the other.
#[derive(Debug, Clone)]
pub struct FlipGraph {
    pub nodes: Vec<Layout>,
    pub adjacency: Vec<BTreeSet<usize>>,
}

impl FlipGraph {
    pub fn is_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(a) = queue.pop_front() {
            for &b in &self.adjacency[a] {
                if !seen[b] {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    /// Adjacency lines `<id>: <neighbors>` preceded by a node table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, ly) in self.nodes.iter().enumerate() {
            let join = |v: &[u32]| v.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ");
            out.push_str(&format!("node {k}: X = {} | Y = {}\n", join(&ly.x), join(&ly.y)));
        }
        for (k, adj) in self.adjacency.iter().enumerate() {
            let ids: Vec<String> = adj.iter().map(|b| b.to_string()).collect();
            out.push_str(&format!("{k}: {}\n", ids.join(" ")));
        }
        out
    }
}

fn paired_flip(tg: &Tanglegram, ly: &Layout, p: Pair) -> Layout {
    let mut out = ly.clone();
    flip_block(tg.t(), &mut out.x, p.u);
    flip_block(tg.s(), &mut out.y, p.v);
    out
}

pub fn flip_graph(tg: &Tanglegram) -> Result<FlipGraph> {
    let (start, pairs) = modified_untangle(tg, &tg.label_set())?;
    if list_crossings(tg, &start.x, &start.y) != 0 {
        return Err(invalid("tanglegram is not planar"));
    }
    let mut index: HashMap<Layout, usize> = HashMap::new();
    let mut nodes = vec![start.clone()];
    let mut adjacency = vec![BTreeSet::new()];
    index.insert(start, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(a) = queue.pop_front() {
        for &p in &pairs {
            let next = paired_flip(tg, &nodes[a], p);
            let b = match index.get(&next) {
                Some(&b) => b,
                None => {
                    let b = nodes.len();
                    index.insert(next.clone(), b);
                    nodes.push(next);
                    adjacency.push(BTreeSet::new());
                    queue.push_back(b);
                    b
                }
            };
            if a != b {
                adjacency[a].insert(b);
                adjacency[b].insert(a);
            }
        }
    }
    Ok(FlipGraph { nodes, adjacency })
}

pub fn all_planar_layouts(tg: &Tanglegram) -> Result<BTreeSet<Layout>> {
    Ok(flip_graph(tg)?.nodes.into_iter().collect())
}

pub fn is_irreducible(tg: &Tanglegram) -> Result<bool> {
    if tg.size() < 2 {
        return Err(invalid("irreducibility needs at least two leaves"));
    }
    Ok(tg.leaf_matched_pairs().len() == 1)
}

/// Contracts every maximal non-root leaf-matched pair to a single matched leaf pair.
/// The contracted leaves take the smallest T label of the pair and its image.
pub fn irreducible_component(tg: &Tanglegram) -> Result<Tanglegram> {
    if tg.size() < 2 {
        return Err(invalid("irreducible component needs at least two leaves"));
    }
    let (t, s) = (tg.t(), tg.s());
    let inner: Vec<Pair> = tg
        .leaf_matched_pairs()
        .into_iter()
        .filter(|p| p.u != t.root())
        .collect();
    let maximal: Vec<Pair> = inner
        .iter()
        .copied()
        .filter(|p| !inner.iter().any(|q| t.is_strict_ancestor(q.u, p.u)))
        .collect();
    let mut t_cut = BTreeMap::new();
    let mut s_cut = BTreeMap::new();
    for p in &maximal {
        let label = *t.leaf_labels(p.u).iter().min().expect("nonempty");
        t_cut.insert(p.u, label);
        s_cut.insert(p.v, tg.phi(label).expect("label"));
    }
    let contract = |tree: &Tree, cut: &BTreeMap<VertexId, u32>| -> Result<Tree> {
        let mut b = TreeBuilder::new();
        let mut built = vec![None; tree.vertex_count()];
        let mut order = tree.postorder();
        order.reverse();
        // Preorder walk marks vertices hidden beneath a cut.
        let mut hidden = vec![false; tree.vertex_count()];
        for &v in &order {
            if let Some(p) = tree.parent(v) {
                hidden[v] = hidden[p] || cut.contains_key(&p);
            }
        }
        for v in tree.postorder() {
            if hidden[v] {
                continue;
            }
            built[v] = Some(match (cut.get(&v), tree.children(v)) {
                (Some(&l), _) => b.leaf(l),
                (None, None) => b.leaf(tree.label(v).expect("leaf")),
                (None, Some([x, y])) => b.join(built[x].expect("built"), built[y].expect("built")),
            });
        }
        b.finish(built[tree.root()].expect("root built"))
    };
    let new_t = contract(t, &t_cut)?;
    let new_s = contract(s, &s_cut)?;
    let phi = new_t
        .labels()
        .into_iter()
        .map(|l| (l, tg.phi(l).expect("label")))
        .collect();
    Tanglegram::new(new_t, new_s, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_planar_layouts;

    #[test]
    fn irreducible_has_two_mirror_layouts() {
        let tg = Tanglegram::from_strs("((1,2),3)", "(1,(2,3))", &[1, 2, 3]).unwrap();
        let g = flip_graph(&tg).unwrap();
        assert_eq!(g.nodes.len(), 2);
        assert_eq!(g.edge_count(), 1);
        let a = &g.nodes[0];
        let b = &g.nodes[1];
        let mut rx = a.x.clone();
        rx.reverse();
        let mut ry = a.y.clone();
        ry.reverse();
        assert_eq!((rx, ry), (b.x.clone(), b.y.clone()));
        assert!(is_irreducible(&tg).unwrap());
    }

    #[test]
    fn size_one_and_two() {
        let one = Tanglegram::from_strs("1", "1", &[1]).unwrap();
        let g = flip_graph(&one).unwrap();
        assert_eq!(g.nodes.len(), 1);
        assert_eq!(g.edge_count(), 0);
        assert!(is_irreducible(&one).is_err());
        assert!(irreducible_component(&one).is_err());
        let two = Tanglegram::from_strs("(1,2)", "(1,2)", &[1, 2]).unwrap();
        let g = flip_graph(&two).unwrap();
        assert!(g.is_connected());
        assert_eq!(all_planar_layouts(&two).unwrap(), brute_planar_layouts(&two).unwrap());
        assert!(is_irreducible(&two).unwrap());
    }

    #[test]
    fn example_layouts_match_brute_force() {
        let tg = Tanglegram::from_strs("(((1,2),3),(4,5))", "(((1,(2,3)),4),5)", &[4, 2, 5, 1, 3]).unwrap();
        assert_eq!(all_planar_layouts(&tg).unwrap(), brute_planar_layouts(&tg).unwrap());
    }

    #[test]
    fn non_planar_is_rejected() {
        let tg = Tanglegram::from_strs("((((1,2),(3,4)),5),6)", "(1,(2,((3,4),(5,6))))", &[1, 5, 2, 3, 4, 6])
            .unwrap();
        assert!(all_planar_layouts(&tg).is_err());
    }

    #[test]
    fn contraction_round_trip() {
        // Core ((1,2),3) | (1,(2,3)); leaf 1 replaced by the planar pair (1,4) | (4,1).
        let tg = Tanglegram::from_strs("(((1,4),2),3)", "((4,1),(2,3))", &[1, 2, 3, 4]).unwrap();
        assert!(!is_irreducible(&tg).unwrap());
        let core = irreducible_component(&tg).unwrap();
        let expect = Tanglegram::from_strs("((1,2),3)", "(1,(2,3))", &[1, 2, 3]).unwrap();
        assert_eq!(core.canonical_key(), expect.canonical_key());
        assert!(is_irreducible(&core).unwrap());
        assert_eq!(irreducible_component(&core).unwrap(), core);
    }
}
