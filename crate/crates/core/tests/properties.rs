use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ::tanglegram::layout::is_tree_consistent;
use ::tanglegram::oracle::brute_crossing_number_limited;
use ::tanglegram::untangle::Untangler;
use ::tanglegram::{
    apply_flip, apply_subtree_switch, brute_crossing_number, build_context, count_crossings, crtei, insert_edge,
    iterated_insertion_report, multi_insertion_report, partition_sets, random_planar_subset, random_tanglegram,
    residual_is_planar, restrict_layout, IndexSet, Layout, Side, Tanglegram, Tree, TreeBuilder, VertexId,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn internal(tree: &Tree) -> Vec<VertexId> {
    tree.internal_vertices().collect()
}

/// Natural layout with a random flip at every internal vertex.
fn random_layout(tg: &Tanglegram, r: &mut ChaCha8Rng) -> Layout {
    let mut ly = Layout::natural(tg);
    for side in [Side::T, Side::S] {
        for v in internal(tg.tree(side)) {
            if r.gen_bool(0.5) {
                ly = apply_flip(tg, &ly, side, v).unwrap();
            }
        }
    }
    ly
}

fn crossing_pairs(tg: &Tanglegram, ly: &Layout) -> BTreeSet<(u32, u32)> {
    let pos = |list: &[u32], l: u32| list.iter().position(|&m| m == l).unwrap();
    let mut out = BTreeSet::new();
    for &i in &ly.x {
        for &j in &ly.x {
            if i < j {
                let (xi, xj) = (pos(&ly.x, i), pos(&ly.x, j));
                let (yi, yj) = (pos(&ly.y, tg.phi(i).unwrap()), pos(&ly.y, tg.phi(j).unwrap()));
                if (xi < xj) != (yi < yj) {
                    out.insert((i, j));
                }
            }
        }
    }
    out
}

/// Rebuilds `tree` with the two children of `at` exchanged.
fn swapped(tree: &Tree, at: VertexId) -> Tree {
    let mut b = TreeBuilder::new();
    let mut built = vec![0; tree.vertex_count()];
    for v in tree.postorder() {
        built[v] = match tree.children(v) {
            None => b.leaf(tree.label(v).unwrap()),
            Some([x, y]) if v == at => b.join(built[y], built[x]),
            Some([x, y]) => b.join(built[x], built[y]),
        };
    }
    b.finish(built[tree.root()]).unwrap()
}

fn consistent(tg: &Tanglegram, ly: &Layout) -> bool {
    is_tree_consistent(tg.t(), &ly.x) && is_tree_consistent(tg.s(), &ly.y)
}

fn cases() -> impl Strategy<Value = (usize, u64)> {
    (2usize..=8, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn crossing_count_matches_pairwise_loop((n, seed) in cases()) {
        let mut r = rng(seed);
        let tg = random_tanglegram(n, &mut r).unwrap();
        let ly = random_layout(&tg, &mut r);
        prop_assert_eq!(count_crossings(&tg, &ly).unwrap(), crossing_pairs(&tg, &ly).len() as u64);
    }

    #[test]
    fn flips_commute((n, seed) in cases()) {
        let mut r = rng(seed);
        let tg = random_tanglegram(n, &mut r).unwrap();
        let ly = random_layout(&tg, &mut r);
        let side = if r.gen_bool(0.5) { Side::T } else { Side::S };
        let vs = internal(tg.tree(side));
        let a = *vs.choose(&mut r).unwrap();
        let b = *vs.choose(&mut r).unwrap();
        let ab = apply_flip(&tg, &apply_flip(&tg, &ly, side, a).unwrap(), side, b).unwrap();
        let ba = apply_flip(&tg, &apply_flip(&tg, &ly, side, b).unwrap(), side, a).unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn moves_keep_layouts_tree_consistent((n, seed) in cases()) {
        let mut r = rng(seed);
        let tg = random_tanglegram(n, &mut r).unwrap();
        let ly = random_layout(&tg, &mut r);
        for side in [Side::T, Side::S] {
            for v in internal(tg.tree(side)) {
                prop_assert!(consistent(&tg, &apply_flip(&tg, &ly, side, v).unwrap()));
                prop_assert!(consistent(&tg, &apply_subtree_switch(&tg, &ly, side, v).unwrap()));
            }
        }
        for p in tg.leaf_matched_pairs() {
            prop_assert!(consistent(&tg, &::tanglegram::apply_paired_flip(&tg, &ly, p).unwrap()));
        }
    }

    #[test]
    fn switch_is_flip_then_child_flips((n, seed) in cases()) {
        let mut r = rng(seed);
        let tg = random_tanglegram(n, &mut r).unwrap();
        let ly = random_layout(&tg, &mut r);
        let side = if r.gen_bool(0.5) { Side::T } else { Side::S };
        let tree = tg.tree(side);
        let v = *internal(tree).choose(&mut r).unwrap();
        let mut expect = apply_flip(&tg, &ly, side, v).unwrap();
        for c in tree.children(v).unwrap() {
            if !tree.is_leaf(c) {
                expect = apply_flip(&tg, &expect, side, c).unwrap();
            }
        }
        prop_assert_eq!(apply_subtree_switch(&tg, &ly, side, v).unwrap(), expect);
    }

    #[test]
    fn restriction_composes((n, seed) in cases()) {
        let mut r = rng(seed);
        let tg = random_tanglegram(n, &mut r).unwrap();
        let labels = tg.labels();
        let k = r.gen_range(1..=n);
        let outer: IndexSet = labels.choose_multiple(&mut r, k).copied().collect();
        let outer_list: Vec<u32> = outer.iter().copied().collect();
        let m = r.gen_range(1..=k);
        let inner: IndexSet = outer_list.choose_multiple(&mut r, m).copied().collect();
        let twice = tg.induced_subtanglegram(&outer).unwrap().induced_subtanglegram(&inner).unwrap();
        prop_assert_eq!(twice, tg.induced_subtanglegram(&inner).unwrap());
    }

    #[test]
    fn canonical_key_ignores_flips_and_relabelling((n, seed) in cases()) {
        let mut r = rng(seed);
        let tg = random_tanglegram(n, &mut r).unwrap();
        let key = tg.canonical_key();
        for v in internal(tg.t()) {
            let f = Tanglegram::new(swapped(tg.t(), v), tg.s().clone(), tg.phi_map().clone()).unwrap();
            prop_assert_eq!(&f.canonical_key(), &key);
        }
        for v in internal(tg.s()) {
            let f = Tanglegram::new(tg.t().clone(), swapped(tg.s(), v), tg.phi_map().clone()).unwrap();
            prop_assert_eq!(&f.canonical_key(), &key);
        }
        let mut images: Vec<u32> = (1..=n as u32).map(|l| l + 100).collect();
        images.shuffle(&mut r);
        let t_map: BTreeMap<u32, u32> = tg.labels().into_iter().zip(images.iter().copied()).collect();
        images.shuffle(&mut r);
        let s_map: BTreeMap<u32, u32> = tg.s().labels().into_iter().zip(images).collect();
        prop_assert_eq!(tg.relabel(&t_map, &s_map).unwrap().canonical_key(), key);
    }

    #[test]
    fn tgl_round_trip((n, seed) in cases()) {
        let tg = random_tanglegram(n, &mut rng(seed)).unwrap();
        prop_assert_eq!(Tanglegram::parse_tgl(&tg.to_tgl()).unwrap(), tg);
    }

    #[test]
    fn restricted_untangling_agrees_with_oracle((n, seed) in cases()) {
        let mut r = rng(seed);
        let tg = random_tanglegram(n, &mut r).unwrap();
        let k = r.gen_range(1..=n);
        let active: IndexSet = tg.labels().choose_multiple(&mut r, k).copied().collect();
        let sub = tg.induced_subtanglegram(&active).unwrap();
        let planar = brute_crossing_number(&sub).unwrap().optimum == 0;
        prop_assert_eq!(residual_is_planar(&tg, &active).unwrap(), planar);
    }

    #[test]
    fn refinement_picks_a_highest_degree_vertex((n, seed) in cases()) {
        let tg = random_tanglegram(n, &mut rng(seed)).unwrap();
        let mut run = Untangler::new(&tg, &tg.label_set()).unwrap();
        while let Some((side, u)) = run.select() {
            let part = run.partial();
            let best = [(Side::T, &part.x), (Side::S, &part.y)]
                .into_iter()
                .flat_map(|(s, list)| {
                    let tree = tg.tree(s);
                    let run = &run;
                    list.iter().filter(move |&&v| !tree.is_leaf(v)).map(move |&v| run.degree(s, v))
                })
                .max()
                .unwrap();
            prop_assert_eq!(run.degree(side, u), best);
            run.step();
        }
    }

    #[test]
    fn unchanged_pairs_keep_every_crossing((n, seed) in (4usize..=8, any::<u64>())) {
        let mut r = rng(seed);
        let tg = random_tanglegram(n, &mut r).unwrap();
        let active = random_planar_subset(&tg, 2, &mut r).unwrap();
        let mp = partition_sets(&tg, &active).unwrap();
        let ly = random_layout(&tg, &mut r);
        let before = crossing_pairs(&tg, &ly);
        for p in &mp.l0 {
            let flipped = apply_flip(&tg, &apply_flip(&tg, &ly, Side::T, p.u).unwrap(), Side::S, p.v).unwrap();
            prop_assert_eq!(&crossing_pairs(&tg, &flipped), &before);
        }
    }

    #[test]
    fn single_insertion_properties((n, seed) in (3usize..=8, any::<u64>())) {
        let mut r = rng(seed);
        let tg = random_tanglegram(n, &mut r).unwrap();
        let crt = brute_crossing_number(&tg).unwrap().optimum;
        prop_assert!(2 * crt < (n * (n - 1) / 2) as u64);
        for i in tg.labels() {
            let rest: IndexSet = tg.labels().into_iter().filter(|&l| l != i).collect();
            if !residual_is_planar(&tg, &rest).unwrap() {
                continue;
            }
            let ly = insert_edge(&tg, i).unwrap();
            prop_assert_eq!(count_crossings(&tg.induced_subtanglegram(&rest).unwrap(), &restrict_layout(&tg, &ly, &rest).unwrap()).unwrap(), 0);
            prop_assert!(crtei(&tg, i).unwrap() >= crt);
            let ctx = build_context(&tg, i).unwrap();
            for w in ctx.l_t.windows(2) {
                prop_assert!(tg.t().is_strict_ancestor(w[1].u, w[0].u));
            }
            for w in ctx.l_s.windows(2) {
                prop_assert!(tg.s().is_strict_ancestor(w[1].v, w[0].v));
            }
        }
    }

    #[test]
    fn iterated_insertion_steps_are_bounded((n, seed) in (4usize..=12, any::<u64>())) {
        let mut r = rng(seed);
        let tg = random_tanglegram(n, &mut r).unwrap();
        let active = random_planar_subset(&tg, 2, &mut r).unwrap();
        let report = iterated_insertion_report(&tg, &active).unwrap();
        let sub = tg.induced_subtanglegram(&active).unwrap();
        prop_assert_eq!(count_crossings(&sub, &restrict_layout(&tg, &report.layout, &active).unwrap()).unwrap(), 0);
        prop_assert_eq!(count_crossings(&tg, &report.layout).unwrap(), report.crossings);
        for step in &report.steps {
            prop_assert!(step.added + 3 <= step.size as u64 || step.added == 0, "{:?}", step);
        }
    }

    #[test]
    fn multi_insertion_is_optimal_on_small_cases((n, seed) in (3usize..=7, any::<u64>())) {
        let mut r = rng(seed);
        let tg = random_tanglegram(n, &mut r).unwrap();
        let active = random_planar_subset(&tg, 2, &mut r).unwrap();
        let report = multi_insertion_report(&tg, &active).unwrap();
        let exact = ::tanglegram::brute_insertion_optimum(&tg, &active).unwrap().optimum;
        prop_assert_eq!(report.crossings, exact);
        prop_assert_eq!(count_crossings(&tg, &report.layout).unwrap(), exact);
        prop_assert!(brute_crossing_number_limited(&tg, 8).unwrap().optimum <= exact);
    }
}
