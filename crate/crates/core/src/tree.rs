//! Rooted binary trees with labelled leaves.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{invalid, Error, Result};

pub type VertexId = usize;

/// Incrementally assembles a tree bottom-up.
#[derive(Debug, Default, Clone)]
pub struct TreeBuilder {
    children: Vec<Option<[VertexId; 2]>>,
    label: Vec<Option<u32>>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn leaf(&mut self, label: u32) -> VertexId {
        self.children.push(None);
        self.label.push(Some(label));
        self.children.len() - 1
    }

    pub fn join(&mut self, a: VertexId, b: VertexId) -> VertexId {
        self.children.push(Some([a, b]));
        self.label.push(None);
        self.children.len() - 1
    }

    /// Finishes the tree rooted at `root`; vertices not below `root` are dropped.
    pub fn finish(self, root: VertexId) -> Result<Tree> {
        if root >= self.children.len() {
            return Err(invalid("root out of range"));
        }
        // Re-index the vertices reachable from the root in preorder.
        let mut order = Vec::new();
        let mut remap = vec![usize::MAX; self.children.len()];
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            if remap[v] != usize::MAX {
                return Err(invalid("vertex reachable twice; not a tree"));
            }
            remap[v] = order.len();
            order.push(v);
            if let Some([a, b]) = self.children[v] {
                stack.push(b);
                stack.push(a);
            }
        }
        let children = order
            .iter()
            .map(|&v| self.children[v].map(|[a, b]| [remap[a], remap[b]]))
            .collect();
        let label = order.iter().map(|&v| self.label[v]).collect();
        Tree::from_parts(children, label, 0)
    }
}

#[derive(Clone)]
pub struct Tree {
    children: Vec<Option<[VertexId; 2]>>,
    parent: Vec<Option<VertexId>>,
    label: Vec<Option<u32>>,
    root: VertexId,
    leaf_of: BTreeMap<u32, VertexId>,
    tin: Vec<u32>,
    tout: Vec<u32>,
    leaf_count: Vec<usize>,
}

impl Tree {
    fn from_parts(
        children: Vec<Option<[VertexId; 2]>>,
        label: Vec<Option<u32>>,
        root: VertexId,
    ) -> Result<Tree> {
        let m = children.len();
        let mut parent = vec![None; m];
        for (v, c) in children.iter().enumerate() {
            match (c, label[v]) {
                (Some([a, b]), None) => {
                    for &ch in [a, b] {
                        if ch >= m || parent[ch].is_some() || ch == root {
                            return Err(invalid("malformed child relation"));
                        }
                        parent[ch] = Some(v);
                    }
                }
                (None, Some(0)) => return Err(invalid("leaf labels must be positive")),
                (None, Some(_)) => {}
                _ => return Err(invalid("leaves carry labels, internal vertices do not")),
            }
        }
        let mut leaf_of = BTreeMap::new();
        for (v, l) in label.iter().enumerate() {
            if let Some(l) = l {
                if leaf_of.insert(*l, v).is_some() {
                    return Err(invalid(format!("duplicate leaf label {l}")));
                }
            }
        }
        let mut tree = Tree {
            children,
            parent,
            label,
            root,
            leaf_of,
            tin: vec![0; m],
            tout: vec![0; m],
            leaf_count: vec![0; m],
        };
        tree.index()?;
        Ok(tree)
    }

    fn index(&mut self) -> Result<()> {
        let m = self.children.len();
        let mut clock = 0u32;
        let mut seen = 0usize;
        let mut stack = vec![(self.root, false)];
        while let Some((v, done)) = stack.pop() {
            if done {
                self.tout[v] = clock;
                self.leaf_count[v] = match self.children[v] {
                    None => 1,
                    Some([a, b]) => self.leaf_count[a] + self.leaf_count[b],
                };
                continue;
            }
            seen += 1;
            self.tin[v] = clock;
            clock += 1;
            stack.push((v, true));
            if let Some([a, b]) = self.children[v] {
                stack.push((b, false));
                stack.push((a, false));
            }
        }
        if seen != m {
            return Err(invalid("not every vertex is reachable from the root"));
        }
        Ok(())
    }

    /// Parses nested-parentheses notation such as `(((1,2),3),(4,5))`.
    /// `line` is only used in error messages.
    pub fn parse_line(text: &str, line: usize) -> Result<Tree> {
        let err = |token: &str, message: &str| Error::Parse {
            line,
            token: token.to_string(),
            message: message.to_string(),
        };
        let mut b = TreeBuilder::new();
        let mut frames: Vec<Vec<VertexId>> = Vec::new();
        let mut done: Option<VertexId> = None;
        let mut expect_item = true;
        let bytes = text.as_bytes();
        let mut k = 0;
        while k < bytes.len() {
            let c = bytes[k] as char;
            if c.is_whitespace() {
                k += 1;
                continue;
            }
            if done.is_some() {
                return Err(err(&c.to_string(), "trailing input after tree"));
            }
            match c {
                '(' => {
                    if !expect_item {
                        return Err(err("(", "expected `,` or `)`"));
                    }
                    frames.push(Vec::new());
                    k += 1;
                }
                ',' => {
                    if expect_item || frames.last().map_or(true, |f| f.len() != 1) {
                        return Err(err(",", "misplaced comma"));
                    }
                    expect_item = true;
                    k += 1;
                }
                ')' => {
                    let f = frames.pop().ok_or_else(|| err(")", "unbalanced parenthesis"))?;
                    if expect_item || f.len() != 2 {
                        return Err(err(")", "every internal vertex needs exactly two children"));
                    }
                    let v = b.join(f[0], f[1]);
                    match frames.last_mut() {
                        Some(p) => p.push(v),
                        None => done = Some(v),
                    }
                    expect_item = false;
                    k += 1;
                }
                '0'..='9' => {
                    let start = k;
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    let tok = &text[start..k];
                    if !expect_item {
                        return Err(err(tok, "expected `,` or `)`"));
                    }
                    let l: u32 = tok
                        .parse()
                        .map_err(|_| err(tok, "leaf label out of range"))?;
                    if l == 0 {
                        return Err(err(tok, "leaf labels must be positive"));
                    }
                    let v = b.leaf(l);
                    match frames.last_mut() {
                        Some(p) => p.push(v),
                        None => done = Some(v),
                    }
                    expect_item = false;
                }
                _ => {
                    let tok: String = text[k..].chars().take_while(|c| !c.is_whitespace()).collect();
                    return Err(err(&tok, "unexpected character"));
                }
            }
        }
        let root = done.ok_or_else(|| err(text.trim(), "incomplete tree"))?;
        b.finish(root).map_err(|e| err(text.trim(), &e.to_string()))
    }

    pub fn parse(text: &str) -> Result<Tree> {
        Self::parse_line(text, 1)
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn vertex_count(&self) -> usize {
        self.children.len()
    }

    pub fn leaf_total(&self) -> usize {
        self.leaf_of.len()
    }

    pub fn children(&self, v: VertexId) -> Option<[VertexId; 2]> {
        self.children[v]
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v]
    }

    pub fn label(&self, v: VertexId) -> Option<u32> {
        self.label[v]
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.children[v].is_none()
    }

    pub fn leaf(&self, label: u32) -> Option<VertexId> {
        self.leaf_of.get(&label).copied()
    }

    pub fn has_label(&self, label: u32) -> bool {
        self.leaf_of.contains_key(&label)
    }

    /// Sorted leaf labels.
    pub fn labels(&self) -> Vec<u32> {
        self.leaf_of.keys().copied().collect()
    }

    pub fn internal_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.children.len()).filter(move |&v| self.children[v].is_some())
    }

    /// Number of leaves below `v`.
    pub fn leaf_count(&self, v: VertexId) -> usize {
        self.leaf_count[v]
    }

    /// `a` is `b` or an ancestor of `b`.
    pub fn is_ancestor(&self, a: VertexId, b: VertexId) -> bool {
        self.tin[a] <= self.tin[b] && self.tout[b] <= self.tout[a]
    }

    pub fn is_strict_ancestor(&self, a: VertexId, b: VertexId) -> bool {
        a != b && self.is_ancestor(a, b)
    }

    /// `v` lies above the leaf labelled `label` (non-strict).
    pub fn covers_label(&self, v: VertexId, label: u32) -> bool {
        self.leaf(label).is_some_and(|l| self.is_ancestor(v, l))
    }

    /// Leaf labels below `v` in stored child order.
    pub fn leaf_labels(&self, v: VertexId) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.leaf_count[v]);
        let mut stack = vec![v];
        while let Some(w) = stack.pop() {
            match self.children[w] {
                None => out.push(self.label[w].expect("leaf label")),
                Some([a, b]) => {
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
        out
    }

    pub fn leaf_label_set(&self, v: VertexId) -> BTreeSet<u32> {
        self.leaf_labels(v).into_iter().collect()
    }

    /// Vertices on the path from `v` up to the root, starting with `v`.
    pub fn ancestors(&self, v: VertexId) -> Vec<VertexId> {
        let mut out = vec![v];
        let mut w = v;
        while let Some(p) = self.parent[w] {
            out.push(p);
            w = p;
        }
        out
    }

    /// Vertex ids in post-order (children before parents).
    pub fn postorder(&self) -> Vec<VertexId> {
        let mut order: Vec<VertexId> = (0..self.children.len()).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(self.tin[v]));
        order
    }

    /// Lowest common ancestor of a nonempty vertex set.
    pub fn lca(&self, vs: impl IntoIterator<Item = VertexId>) -> Option<VertexId> {
        let mut it = vs.into_iter();
        let mut acc = it.next()?;
        for v in it {
            while !self.is_ancestor(acc, v) {
                acc = self.parent[acc]?;
            }
        }
        Some(acc)
    }

    /// The other child of `v`'s parent.
    pub fn sibling(&self, v: VertexId) -> Option<VertexId> {
        let [a, b] = self.children[self.parent[v]?]?;
        Some(if a == v { b } else { a })
    }

    /// Tree on `labels` with unary vertices suppressed, keeping child order.
    pub fn induced_subtree(&self, labels: &BTreeSet<u32>) -> Result<Tree> {
        if labels.is_empty() {
            return Err(invalid("label set is empty"));
        }
        if let Some(l) = labels.iter().find(|l| !self.has_label(**l)) {
            return Err(invalid(format!("label {l} is not a leaf of the tree")));
        }
        let mut b = TreeBuilder::new();
        let mut built: Vec<Option<VertexId>> = vec![None; self.children.len()];
        for v in self.postorder() {
            built[v] = match self.children[v] {
                None => {
                    let l = self.label[v].expect("leaf label");
                    labels.contains(&l).then(|| b.leaf(l))
                }
                Some([x, y]) => match (built[x], built[y]) {
                    (Some(p), Some(q)) => Some(b.join(p, q)),
                    (one, None) | (None, one) => one,
                },
            };
        }
        b.finish(built[self.root].expect("nonempty label set"))
    }

    /// Ordered nested-parentheses rendering of the subtree at `v`.
    pub fn render(&self, v: VertexId) -> String {
        let mut out = String::new();
        let mut stack: Vec<std::result::Result<VertexId, char>> = vec![Ok(v)];
        while let Some(item) = stack.pop() {
            match item {
                Err(c) => out.push(c),
                Ok(w) => match self.children[w] {
                    None => out.push_str(&self.label[w].expect("leaf label").to_string()),
                    Some([a, b]) => {
                        out.push('(');
                        stack.push(Err(')'));
                        stack.push(Ok(b));
                        stack.push(Err(','));
                        stack.push(Ok(a));
                    }
                },
            }
        }
        out
    }

    /// Depth of every vertex (root at 0).
    pub fn depths(&self) -> Vec<usize> {
        let mut d = vec![0; self.children.len()];
        let mut order: Vec<VertexId> = (0..self.children.len()).collect();
        order.sort_by_key(|&v| self.tin[v]);
        for v in order {
            if let Some(p) = self.parent[v] {
                d[v] = d[p] + 1;
            }
        }
        d
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(self.root))
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree({self})")
    }
}

impl PartialEq for Tree {
    fn eq(&self, other: &Self) -> bool {
        self.to_string() == other.to_string()
    }
}

impl Eq for Tree {}

/// A caterpillar: `((((a1,a2),a3),a4),...)`.
pub fn caterpillar(labels: &[u32]) -> Result<Tree> {
    let (&first, rest) = labels.split_first().ok_or_else(|| invalid("no labels"))?;
    let mut b = TreeBuilder::new();
    let mut acc = b.leaf(first);
    for &l in rest {
        let leaf = b.leaf(l);
        acc = b.join(acc, leaf);
    }
    b.finish(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[u32]) -> BTreeSet<u32> {
        v.iter().copied().collect()
    }

    #[test]
    fn parse_and_render_round_trip() {
        for s in ["(((1,2),3),(4,5))", "7", "(1,2)", "((10,2),(3,(4,5)))"] {
            assert_eq!(Tree::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(Tree::parse(" ( 1 , 2 ) ").unwrap().to_string(), "(1,2)");
    }

    #[test]
    fn parse_errors_name_the_token() {
        let e = Tree::parse_line("((1,2),x)", 4).unwrap_err();
        match e {
            Error::Parse { line, token, .. } => {
                assert_eq!(line, 4);
                assert_eq!(token, "x)");
            }
            other => panic!("{other:?}"),
        }
        assert!(Tree::parse("(1,2,3)").is_err());
        assert!(Tree::parse("((1,2)").is_err());
        assert!(Tree::parse("(1,1)").is_err());
        assert!(Tree::parse("(0,1)").is_err());
        assert!(Tree::parse("").is_err());
        assert!(Tree::parse("(1,2) 3").is_err());
    }

    #[test]
    fn induced_subtree_examples() {
        let t = Tree::parse("(((1,2),3),(4,5))").unwrap();
        assert_eq!(t.induced_subtree(&set(&[1, 2, 4, 5])).unwrap().to_string(), "((1,2),(4,5))");
        assert_eq!(t.induced_subtree(&set(&[1, 2, 3, 4, 5])).unwrap(), t);
        assert_eq!(t.induced_subtree(&set(&[3])).unwrap().to_string(), "3");
        assert!(t.induced_subtree(&set(&[])).is_err());
        assert!(t.induced_subtree(&set(&[9])).is_err());
    }

    #[test]
    fn ancestry_queries() {
        let t = Tree::parse("(((1,2),3),(4,5))").unwrap();
        let l1 = t.leaf(1).unwrap();
        let l3 = t.leaf(3).unwrap();
        let p = t.lca([l1, l3]).unwrap();
        assert_eq!(t.leaf_label_set(p), set(&[1, 2, 3]));
        assert!(t.is_strict_ancestor(t.root(), l1));
        assert!(!t.is_strict_ancestor(l1, l1));
        assert!(t.is_ancestor(l1, l1));
        assert_eq!(t.leaf_count(t.root()), 5);
        assert_eq!(t.internal_vertices().count(), 4);
        assert_eq!(t.ancestors(l1).len(), 4);
    }

    #[test]
    fn caterpillar_shape() {
        assert_eq!(caterpillar(&[1, 2, 3, 4]).unwrap().to_string(), "(((1,2),3),4)");
    }
}
