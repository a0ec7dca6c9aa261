//! Seedable random tanglegrams and planar-inducing label subsets.
//!
//! Trees come from joining two random roots of a forest until one remains, so the
//! distribution is not uniform over classes.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{invalid, Result};
use crate::tanglegram::{IndexSet, Tanglegram};
use crate::tree::{Tree, TreeBuilder};
use crate::untangle::residual_is_planar;

pub fn random_tree<R: Rng + ?Sized>(labels: &[u32], rng: &mut R) -> Result<Tree> {
    if labels.is_empty() {
        return Err(invalid("no labels"));
    }
    let mut b = TreeBuilder::new();
    let mut roots: Vec<usize> = labels.iter().map(|&l| b.leaf(l)).collect();
    while roots.len() > 1 {
        let a = roots.swap_remove(rng.gen_range(0..roots.len()));
        let c = roots.swap_remove(rng.gen_range(0..roots.len()));
        roots.push(b.join(a, c));
    }
    b.finish(roots[0])
}

/// Random trees on labels `1..=n` and a uniformly random matching.
pub fn random_tanglegram<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Tanglegram> {
    let labels: Vec<u32> = (1..=n as u32).collect();
    let t = random_tree(&labels, rng)?;
    let s = random_tree(&labels, rng)?;
    let mut images = labels;
    images.shuffle(rng);
    Tanglegram::from_phi_list(t, s, &images)
}

/// A random label set of size between `min` and `n - 1` whose induced subtanglegram is planar.
/// Tries a random target size first and shrinks it when samples keep failing.
pub fn random_planar_subset<R: Rng + ?Sized>(tg: &Tanglegram, min: usize, rng: &mut R) -> Result<IndexSet> {
    let n = tg.size();
    if min == 0 || min >= n {
        return Err(invalid(format!("need 1 <= min < {n}")));
    }
    let labels = tg.labels();
    let mut k = rng.gen_range(min..n);
    loop {
        for _ in 0..64 {
            let pick: IndexSet = labels.choose_multiple(rng, k).copied().collect();
            if residual_is_planar(tg, &pick)? {
                return Ok(pick);
            }
        }
        if k == min {
            // Two labels always induce a planar subtanglegram, so this only loops for min > 2.
            return Err(invalid("no planar subset found"));
        }
        k -= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = random_tanglegram(9, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = random_tanglegram(9, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.size(), 9);
    }

    #[test]
    fn subsets_are_planar() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let tg = random_tanglegram(8, &mut rng).unwrap();
            let s = random_planar_subset(&tg, 2, &mut rng).unwrap();
            assert!(s.len() >= 2 && s.len() < 8);
            assert!(residual_is_planar(&tg, &s).unwrap());
        }
    }
}
