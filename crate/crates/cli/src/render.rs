//! SVG drawing of a layout: T on the left, S mirrored on the right, dashed matching edges.

use std::fmt::Write;

use tanglegram::{Layout, Side, Tanglegram, Tree, VertexId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeStyle {
    /// Solid tree edges, dashed between-tree edges.
    SolidTreesDashedMatching,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderSpec {
    /// Vertical spacing between consecutive leaves.
    pub unit: f64,
    /// Horizontal distance per tree level.
    pub tree_depth_px: f64,
    pub edge_style: EdgeStyle,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            unit: 30.0,
            tree_depth_px: 40.0,
            edge_style: EdgeStyle::SolidTreesDashedMatching,
        }
    }
}

const MARGIN: f64 = 30.0;

/// Vertex coordinates for one tree; `dir` is +1 for a tree growing rightwards from its root.
fn place(tree: &Tree, order: &[u32], spec: &RenderSpec, root_x: f64, dir: f64) -> Vec<(f64, f64)> {
    let depths = tree.depths();
    let height = depths.iter().copied().max().unwrap_or(0) as f64;
    let mut pos = vec![(0.0, 0.0); tree.vertex_count()];
    for (k, &l) in order.iter().enumerate() {
        let v = tree.leaf(l).expect("layout matches tree");
        pos[v] = (root_x + dir * height * spec.tree_depth_px, MARGIN + k as f64 * spec.unit);
    }
    for v in tree.postorder() {
        if let Some([a, b]) = tree.children(v) {
            let y = (pos[a].1 + pos[b].1) / 2.0;
            pos[v] = (root_x + dir * depths[v] as f64 * spec.tree_depth_px, y);
        }
    }
    pos
}

fn tree_height(tree: &Tree) -> f64 {
    tree.depths().into_iter().max().unwrap_or(0) as f64
}

/// Endpoints of the dashed matching edges, in `X` order.
pub fn matching_segments(tg: &Tanglegram, ly: &Layout, spec: &RenderSpec) -> Vec<((f64, f64), (f64, f64))> {
    let (tp, sp) = coordinates(tg, ly, spec);
    ly.x.iter()
        .map(|&i| {
            let t = tp[tg.t().leaf(i).expect("label")];
            let s = sp[tg.s().leaf(tg.phi(i).expect("label")).expect("label")];
            (t, s)
        })
        .collect()
}

fn coordinates(tg: &Tanglegram, ly: &Layout, spec: &RenderSpec) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let gap = 4.0 * spec.tree_depth_px;
    let t_root_x = MARGIN;
    let s_root_x = MARGIN + (tree_height(tg.t()) + tree_height(tg.s())) * spec.tree_depth_px + gap;
    (
        place(tg.t(), &ly.x, spec, t_root_x, 1.0),
        place(tg.s(), &ly.y, spec, s_root_x, -1.0),
    )
}

pub fn render_svg(tg: &Tanglegram, ly: &Layout, spec: &RenderSpec) -> String {
    let (tp, sp) = coordinates(tg, ly, spec);
    let width = 2.0 * MARGIN + (tree_height(tg.t()) + tree_height(tg.s()) + 4.0) * spec.tree_depth_px;
    let height = 2.0 * MARGIN + (tg.size().max(1) - 1) as f64 * spec.unit;
    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    let (tree_dash, match_dash) = match spec.edge_style {
        EdgeStyle::SolidTreesDashedMatching => ("", r#" stroke-dasharray="4,3""#),
    };
    for (side, pos) in [(Side::T, &tp), (Side::S, &sp)] {
        let tree = tg.tree(side);
        writeln!(out, r#"<g class="tree-{side:?}" stroke="black" stroke-width="1.5"{tree_dash}>"#).unwrap();
        for v in tree.internal_vertices() {
            for c in tree.children(v).expect("internal") {
                let (a, b) = (pos[v], pos[c]);
                writeln!(out, r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}"/>"#, a.0, a.1, b.0, b.1).unwrap();
            }
        }
        writeln!(out, "</g>").unwrap();
    }
    writeln!(out, r#"<g class="matching" stroke="gray" stroke-width="1"{match_dash}>"#).unwrap();
    for ((x1, y1), (x2, y2)) in matching_segments(tg, ly, spec) {
        writeln!(out, r#"<line class="match" x1="{x1:.1}" y1="{y1:.1}" x2="{x2:.1}" y2="{y2:.1}"/>"#).unwrap();
    }
    writeln!(out, "</g>").unwrap();
    let leaves = |side: Side, pos: &[(f64, f64)], anchor: &str, dx: f64, out: &mut String| {
        let tree = tg.tree(side);
        for l in tree.labels() {
            let v: VertexId = tree.leaf(l).expect("label");
            let (x, y) = pos[v];
            writeln!(out, r#"<circle cx="{x:.1}" cy="{y:.1}" r="2.5"/>"#).unwrap();
            writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-size="11" font-family="sans-serif" text-anchor="{anchor}">{l}</text>"#,
                x + dx,
                y + 4.0
            )
            .unwrap();
        }
    };
    leaves(Side::T, &tp, "end", -6.0, &mut out);
    leaves(Side::S, &sp, "start", 6.0, &mut out);
    writeln!(out, "</svg>").unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use tanglegram::count_crossings;

    fn proper_intersections(segs: &[((f64, f64), (f64, f64))]) -> usize {
        let orient = |a: (f64, f64), b: (f64, f64), c: (f64, f64)| (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
        let mut n = 0;
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                let ((p, q), (r, s)) = (segs[i], segs[j]);
                if orient(p, q, r) * orient(p, q, s) < 0.0 && orient(r, s, p) * orient(r, s, q) < 0.0 {
                    n += 1;
                }
            }
        }
        n
    }

    fn example() -> Tanglegram {
        Tanglegram::from_strs("(((1,2),3),(4,5))", "(((1,(2,3)),4),5)", &[4, 2, 5, 1, 3]).unwrap()
    }

    #[test]
    fn drawn_segments_cross_as_often_as_counted() {
        let tg = example();
        let spec = RenderSpec::default();
        let natural = Layout::new(vec![1, 2, 3, 4, 5], vec![1, 2, 3, 4, 5]);
        assert_eq!(proper_intersections(&matching_segments(&tg, &natural, &spec)), 6);
        let planar = Layout::new(vec![3, 1, 2, 5, 4], vec![5, 4, 2, 3, 1]);
        assert_eq!(count_crossings(&tg, &planar).unwrap(), 0);
        assert_eq!(proper_intersections(&matching_segments(&tg, &planar, &spec)), 0);
    }

    #[test]
    fn single_leaf_drawing() {
        let tg = Tanglegram::from_strs("1", "1", &[1]).unwrap();
        let svg = render_svg(&tg, &Layout::new(vec![1], vec![1]), &RenderSpec::default());
        assert_eq!(svg.matches(r#"class="match""#).count(), 1);
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.contains(r#"version="1.1""#));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn parents_sit_between_children() {
        let tg = example();
        let ly = Layout::new(vec![1, 2, 3, 4, 5], vec![1, 2, 3, 4, 5]);
        let (tp, _) = coordinates(&tg, &ly, &RenderSpec::default());
        let t = tg.t();
        for v in t.internal_vertices() {
            let [a, b] = t.children(v).unwrap();
            assert_eq!(tp[v].1, (tp[a].1 + tp[b].1) / 2.0);
            assert!(tp[v].0 < tp[a].0 && tp[v].0 < tp[b].0);
        }
    }
}
