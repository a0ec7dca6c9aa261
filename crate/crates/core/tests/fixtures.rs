use std::collections::BTreeMap;

use ::tanglegram::oracle::{brute_crossing_number_limited, brute_insertion_optimum_limited};
use ::tanglegram::series::solve_f_rearranged;
use ::tanglegram::{
    brute_crossing_number, brute_insertion_optimum, census, crtei_all, enumerate_all, irreducible_series,
    iterated_insertion_report, multi_insertion_report, residual_is_planar, solve_f, IndexSet, Tanglegram,
};

fn eleven_leaf_example() -> (Tanglegram, IndexSet) {
    let tg = Tanglegram::from_strs(
        "(((((1,2),3),(4,5)),(6,7)),(8,(9,(10,11))))",
        "(((((1,(6,2)),4),5),(3,(8,9))),(10,(7,11)))",
        &(1..=11).collect::<Vec<_>>(),
    )
    .unwrap();
    (tg, [1, 2, 4, 5, 8, 9, 10, 11].into())
}

#[test]
fn eleven_leaf_example_reaches_the_exhaustive_optimum() {
    let (tg, active) = eleven_leaf_example();
    let exact = brute_insertion_optimum_limited(&tg, &active, 11).unwrap().optimum;
    let multi = multi_insertion_report(&tg, &active).unwrap();
    assert!(exact < 7);
    assert_eq!(multi.crossings, exact);
    let iterated = iterated_insertion_report(&tg, &active).unwrap();
    assert!(iterated.crossings >= exact);
    assert!(iterated.crossings <= (11 - 8) * (11 + 8 - 5) / 2);
}

#[test]
fn multi_insertion_matches_oracle_for_every_size_six_case() {
    let mut cases = 0;
    for (_, tg) in enumerate_all(6).unwrap() {
        let labels = tg.labels();
        for mask in 0u32..1 << 6 {
            let active: IndexSet = labels
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &l)| l)
                .collect();
            if active.len() < 2 || !residual_is_planar(&tg, &active).unwrap() {
                continue;
            }
            let fast = multi_insertion_report(&tg, &active).unwrap().crossings;
            let slow = brute_insertion_optimum(&tg, &active).unwrap().optimum;
            assert_eq!(fast, slow, "{} kept {active:?}", tg.to_tgl());
            cases += 1;
        }
    }
    assert!(cases > 0);
}

#[test]
fn crossing_number_bounds_over_small_classes() {
    for n in 2..=6 {
        let half = n * (n - 1) / 2;
        for (_, tg) in enumerate_all(n).unwrap() {
            let crt = brute_crossing_number(&tg).unwrap().optimum;
            assert!(2 * crt < half as u64, "{}", tg.to_tgl());
            for (_, c) in crtei_all(&tg).unwrap() {
                assert!(crt <= c);
            }
        }
    }
}

#[test]
fn census_keys_stay_below_size() {
    for n in 2..=6 {
        let row = census(n, Some(2)).unwrap();
        assert!(row.counts.keys().all(|&k| 1 <= k && k < n));
    }
}

#[test]
fn rearranged_series_agrees_with_census_series() {
    let h = irreducible_series(6, &BTreeMap::new(), None).unwrap();
    assert_eq!(solve_f(&h).unwrap(), solve_f_rearranged(&h).unwrap());
}

#[test]
fn oracle_limit_is_explicit() {
    let (tg, _) = eleven_leaf_example();
    assert!(brute_crossing_number(&tg).is_err());
    assert!(brute_crossing_number_limited(&tg, 10).is_err());
}
