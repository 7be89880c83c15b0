use super::*;
use crate::oracle;
use alloc::vec::Vec;
use proptest::prelude::*;

fn g(d: usize, n: usize, edges: &[&[usize]]) -> Hypergraph {
    Hypergraph::from_edges(d, n, edges).unwrap()
}

fn one_edge_pair() -> (Hypergraph, Hypergraph) {
    (g(3, 4, &[&[0, 1, 2]]), g(3, 4, &[&[0, 1, 2], &[0, 1, 3]]))
}

fn lcis(a: &Hypergraph, b: &Hypergraph, s: LcisStrategy) -> usize {
    let out = lcis_size(a, b, s, &Budget::unlimited()).unwrap();
    assert!(out.witness.verify(a, b));
    out.size.unwrap()
}

fn count(a: &Hypergraph, b: &Hypergraph, ell: usize) -> u128 {
    count_w(a, b, ell, &Budget::unlimited())
        .unwrap()
        .count
        .unwrap()
}

#[test]
fn below_arity_always_matches() {
    let a = Hypergraph::random(3, 7, 1).unwrap();
    let b = Hypergraph::random(3, 5, 2).unwrap();
    for k in 0..=2 {
        let out = exists_common(&a, &b, k, &Budget::unlimited()).unwrap();
        match out.result {
            Existence::Found(w) => assert!(w.verify(&a, &b) && w.size == k),
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn edge_count_separates_the_small_pair() {
    let (a, b) = one_edge_pair();
    let four = exists_common(&a, &b, 4, &Budget::unlimited()).unwrap();
    assert_eq!(four.result, Existence::Absent);
    let three = exists_common(&a, &b, 3, &Budget::unlimited()).unwrap();
    let Existence::Found(w) = three.result else {
        panic!("expected a witness")
    };
    assert!(w.verify(&a, &b));
    for s in [
        LcisStrategy::BranchAndBound,
        LcisStrategy::Descending,
        LcisStrategy::Upward,
    ] {
        assert_eq!(lcis(&a, &b, s), 3);
        assert_eq!(lcis(&b, &a, s), 3);
    }
}

#[test]
fn graph_against_itself() {
    let a = Hypergraph::random(3, 9, 11).unwrap();
    assert_eq!(lcis(&a, &a, LcisStrategy::BranchAndBound), 9);
    let out = exists_common(&a, &a, 9, &Budget::unlimited()).unwrap();
    assert!(matches!(out.result, Existence::Found(_)));
}

#[test]
fn count_small_cases() {
    let e = g(3, 3, &[]);
    let full = g(3, 3, &[&[0, 1, 2]]);
    assert_eq!(count(&e, &e, 2), 36);
    assert_eq!(count(&full, &full, 3), 36);
    assert_eq!(count(&full, &e, 3), 0);
    assert_eq!(count(&full, &e, 4), 0);
    assert_eq!(count(&e, &e, 0), 1);
}

#[test]
fn count_averages_to_the_first_moment() {
    let mut total = 0u128;
    for m1 in 0u32..16 {
        for m2 in 0u32..16 {
            let pick = |m: u32| -> Vec<Vec<usize>> {
                (0..4)
                    .filter(|k| m >> k & 1 == 1)
                    .map(|k| crate::subset::unrank(k as usize, 3))
                    .collect()
            };
            let a = Hypergraph::from_edges(3, 4, pick(m1)).unwrap();
            let b = Hypergraph::from_edges(3, 4, pick(m2)).unwrap();
            total += count(&a, &b, 3);
        }
    }
    assert_eq!(total, 288 * 256);
}

#[test]
fn out_of_range_inputs() {
    let a = Hypergraph::random(3, 5, 0).unwrap();
    let b = Hypergraph::random(4, 5, 0).unwrap();
    assert!(exists_common(&a, &a, 6, &Budget::unlimited()).is_err());
    assert!(count_w(&a, &b, 2, &Budget::unlimited()).is_err());
    assert!(lcis_size(&a, &b, LcisStrategy::Upward, &Budget::unlimited()).is_err());
}

#[test]
fn exhausted_budget_is_undecided() {
    let a = Hypergraph::random(3, 30, 3).unwrap();
    let b = Hypergraph::random(3, 30, 4).unwrap();
    let tight = Budget::nodes(50);
    let out = exists_common(&a, &b, 20, &tight).unwrap();
    assert_eq!(out.result, Existence::Undecided);
    assert!(out.stats.nodes as usize >= out.stats.max_depth);
    let out = lcis_size(&a, &b, LcisStrategy::BranchAndBound, &tight).unwrap();
    assert_eq!(out.size, None);
    assert!(out.witness.verify(&a, &b));
    assert_eq!(count_w(&a, &b, 12, &tight).unwrap().count, None);
}

#[test]
fn frontier_pieces_reassemble() {
    for seed in 0..6 {
        let a = Hypergraph::random(3, 8, seed).unwrap();
        let b = Hypergraph::random(3, 7, seed + 100).unwrap();
        let inst = Instance::new(&a, &b).unwrap();
        let ell = 4;

        let f = inst.split(SearchMode::Count(ell), 2);
        let mut pairings = f.settled.pairings;
        for p in &f.subproblems {
            let out = inst.solve(SearchMode::Count(ell), p, &Budget::unlimited(), None);
            assert!(out.complete);
            pairings += out.pairings;
        }
        assert_eq!(ordered_count(pairings, ell), count(&a, &b, ell));

        let shared = SharedBound::new();
        let f = inst.split(SearchMode::Maximize, 2);
        let mut best = f.settled.witness.map_or(0, |w| w.size);
        for p in &f.subproblems {
            let out = inst.solve(SearchMode::Maximize, p, &Budget::unlimited(), Some(&shared));
            if let Some(w) = out.witness {
                assert!(w.verify(&a, &b));
                best = best.max(w.size);
            }
        }
        assert_eq!(best, lcis(&a, &b, LcisStrategy::BranchAndBound));
    }
}

#[test]
fn higher_arity_matches_oracle() {
    let a = Hypergraph::random(5, 7, 8).unwrap();
    let b = Hypergraph::random(5, 7, 9).unwrap();
    assert_eq!(
        lcis(&a, &b, LcisStrategy::BranchAndBound),
        oracle::oracle_lcis(&a, &b).unwrap()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn agrees_with_oracle(
        d in 2usize..=4,
        n1 in 0usize..=6,
        n2 in 0usize..=6,
        s1 in any::<u64>(),
        s2 in any::<u64>(),
        ell in 0usize..=6,
    ) {
        let a = Hypergraph::random(d, n1, s1).unwrap();
        let b = Hypergraph::random(d, n2, s2).unwrap();
        let want = oracle::oracle_lcis(&a, &b).unwrap();
        for s in [LcisStrategy::BranchAndBound, LcisStrategy::Descending, LcisStrategy::Upward] {
            prop_assert_eq!(lcis(&a, &b, s), want);
        }
        prop_assert_eq!(count(&a, &b, ell), oracle::oracle_count_w(&a, &b, ell).unwrap());
    }

    #[test]
    fn count_is_relabeling_and_complement_invariant(
        s1 in any::<u64>(),
        s2 in any::<u64>(),
        perm in Just((0..7).collect::<Vec<usize>>()).prop_shuffle(),
        ell in 2usize..=5,
    ) {
        let a = Hypergraph::random(3, 7, s1).unwrap();
        let b = Hypergraph::random(3, 6, s2).unwrap();
        let base = count(&a, &b, ell);
        prop_assert_eq!(count(&a.permute(&perm).unwrap(), &b, ell), base);
        prop_assert_eq!(count(&a.complement(), &b.complement(), ell), base);
        prop_assert_eq!(count(&b, &a, ell), base);
        let exists = exists_common(&a, &b, ell, &Budget::unlimited()).unwrap();
        prop_assert_eq!(matches!(exists.result, Existence::Found(_)), base > 0);
    }

    #[test]
    fn appending_vertices_never_shrinks_lcis(s1 in any::<u64>(), s2 in any::<u64>()) {
        let big = Hypergraph::random(3, 9, s1).unwrap();
        let b = Hypergraph::random(3, 6, s2).unwrap();
        let mut last = 0;
        for n in 3..=9 {
            let a = big.prefix(n).unwrap();
            let k = lcis(&a, &b, LcisStrategy::BranchAndBound);
            prop_assert!(k >= last);
            prop_assert!(k >= 2.min(n).min(6));
            last = k;
        }
    }
}

#[test]
fn witness_tuples_are_ordered_by_first_graph() {
    let (a, b) = one_edge_pair();
    let out = lcis_size(&b, &a, LcisStrategy::BranchAndBound, &Budget::unlimited()).unwrap();
    let i = out.witness.i_tuple.as_slice();
    assert!(i.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(out.witness.size, 3);
}
