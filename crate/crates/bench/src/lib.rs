//! Inputs shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tanglegram::{caterpillar, random_planar_subset, random_tanglegram, IndexSet, Tanglegram};

/// Identical caterpillars on `1..=n` except that the middle label hangs off the S root.
/// The whole tanglegram is planar; returns it with the label to reinsert.
pub fn caterpillar_insertion(n: u32) -> (Tanglegram, u32) {
    assert!(n >= 3, "needs at least three leaves");
    let m = n / 2;
    let t_order: Vec<u32> = (1..=n).collect();
    let mut s_order: Vec<u32> = (1..=n).filter(|&l| l != m).collect();
    s_order.push(m);
    let t = caterpillar(&t_order).expect("labels");
    let s = caterpillar(&s_order).expect("labels");
    let phi = (1..=n).map(|l| (l, l)).collect();
    (Tanglegram::new(t, s, phi).expect("identity matching"), m)
}

/// Seeded random tanglegram with a planar-inducing kept set of at least two labels.
pub fn random_instance(n: usize, seed: u64) -> (Tanglegram, IndexSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tg = random_tanglegram(n, &mut rng).expect("positive size");
    let keep = random_planar_subset(&tg, 2, &mut rng).expect("two labels are always planar");
    (tg, keep)
}

/// The eleven-leaf multiple insertion example with its kept labels.
pub fn eleven_leaf_example() -> (Tanglegram, IndexSet) {
    let tg = Tanglegram::from_strs(
        "(((((1,2),3),(4,5)),(6,7)),(8,(9,(10,11))))",
        "(((((1,(6,2)),4),5),(3,(8,9))),(10,(7,11)))",
        &(1..=11).collect::<Vec<_>>(),
    )
    .expect("valid");
    (tg, [1, 2, 4, 5, 8, 9, 10, 11].into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use tanglegram::residual_is_planar;

    #[test]
    fn caterpillar_rest_is_planar() {
        let (tg, m) = caterpillar_insertion(20);
        let rest: IndexSet = tg.labels().into_iter().filter(|&l| l != m).collect();
        assert!(residual_is_planar(&tg, &rest).unwrap());
        let ly = tanglegram::insert_edge(&tg, m).unwrap();
        assert_eq!(tanglegram::count_crossings(&tg, &ly).unwrap(), 0);
    }
}
