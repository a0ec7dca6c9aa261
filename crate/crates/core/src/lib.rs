//! Tanglegram layout algorithms.
//!
//! A tanglegram is a pair of rooted binary trees whose leaves are matched one to one.
//! This crate builds crossing-free layouts, enumerates every crossing-free layout
//! through paired flips, inserts matching edges into a planar subtanglegram with
//! the fewest crossings, and counts planar tanglegrams up to isomorphism.

pub mod enumeration;
pub mod error;
pub mod insertion;
pub mod layout;
pub mod multi;
pub mod oracle;
pub mod planarset;
pub mod random;
pub mod series;
pub mod tanglegram;
pub mod tree;
pub mod untangle;

pub use enumeration::{census, census_csv, enumerate_all, enumerate_planar, enumerate_tanglegrams, CensusRow};
pub use error::{Error, Result};
pub use insertion::{build_context, crtei, crtei_all, crtei_min, insert_edge, insert_edge_from, InsertionContext};
pub use layout::{
    apply_flip, apply_paired_flip, apply_subtree_switch, count_crossings, crossings_involving,
    restrict_layout, Layout,
};
pub use multi::{
    build_poset, cross_sets, iterated_insertion, iterated_insertion_report, multi_insertion, multi_insertion_from,
    multi_insertion_report, partition_sets, Element, IteratedReport, MultiPartition, MultiReport,
};
pub use oracle::{
    brute_crossing_number, brute_insertion_optimum, brute_leaf_matched_pairs, brute_planar_layouts, OracleReport,
};
pub use planarset::{all_planar_layouts, flip_graph, irreducible_component, is_irreducible, FlipGraph};
pub use random::{random_planar_subset, random_tanglegram};
pub use series::{irreducible_series, parse_h_file, solve_f, SeriesTable};
pub use tanglegram::{CanonicalKey, IndexSet, Pair, Side, Tanglegram};
pub use tree::{caterpillar, Tree, TreeBuilder, VertexId};
pub use untangle::{is_planar, modified_untangle, reduce_pairs, residual_is_planar, untangle_restricted};
