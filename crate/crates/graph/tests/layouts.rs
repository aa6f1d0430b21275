use std::collections::HashMap;

use gpasim_graph::fixtures;
use gpasim_graph::{build_partitioned_csr, partition_edge_list, sort_partition_edges_by_destination, Edge, Graph};
use proptest::prelude::*;

fn multiset(edges: impl IntoIterator<Item = Edge>) -> HashMap<Edge, usize> {
    let mut counts = HashMap::new();
    for e in edges {
        *counts.entry(e).or_insert(0) += 1;
    }
    counts
}

#[test]
fn random_1000_vertex_membership_by_rescan() {
    let g = fixtures::uniform(1000, 8000, 11);
    let parts = partition_edge_list(&g, 256);
    assert_eq!(parts.count(), 4);
    let mut total = 0;
    for p in 0..parts.count() {
        for e in parts.edges(p) {
            assert_eq!(e.src as usize / 256, p);
        }
        // re-scan: every edge of the graph with source in p appears in order
        let expected: Vec<Edge> = g
            .edges()
            .iter()
            .filter(|e| e.src as usize / 256 == p)
            .copied()
            .collect();
        assert_eq!(parts.edges(p), expected.as_slice());
        total += parts.edges(p).len();
    }
    assert_eq!(total, g.m());
}

#[test]
fn example_partition_zero_sorted_by_destination() {
    let g = fixtures::example_graph();
    let parts = partition_edge_list(&g, 3);
    let sorted = sort_partition_edges_by_destination(parts.clone());
    let dsts: Vec<u32> = sorted.edges(0).iter().map(|e| e.dst).collect();
    assert!(dsts.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(
        multiset(sorted.edges(0).iter().copied()),
        multiset(parts.edges(0).iter().copied())
    );
}

#[test]
fn reversed_ten_edges_match_reference_sort() {
    let pairs: Vec<(u32, u32)> = (0..10u32).map(|i| (i % 3, 9 - i)).collect();
    let g = Graph::from_pairs(10, &pairs);
    let sorted = sort_partition_edges_by_destination(partition_edge_list(&g, 10));
    let mut oracle: Vec<Edge> = g.edges().to_vec();
    // insertion sort on destination keeps equal keys in input order
    for i in 1..oracle.len() {
        let mut j = i;
        while j > 0 && oracle[j - 1].dst > oracle[j].dst {
            oracle.swap(j - 1, j);
            j -= 1;
        }
    }
    assert_eq!(sorted.edges(0), oracle.as_slice());
}

#[test]
fn csr_matches_independent_adjacency_lists() {
    let g = fixtures::skewed(500, 4000, 3);
    let k = 128;
    let csr = build_partitioned_csr(&g, k);
    // adjacency-list oracle: inverted edges bucketed by (partition, dst)
    let mut lists: HashMap<(usize, u32), Vec<u32>> = HashMap::new();
    for e in g.edges() {
        lists.entry((e.src as usize / k, e.dst)).or_default().push(e.src);
    }
    for p in 0..csr.count() {
        let part = csr.part(p);
        assert!(part.pointers.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*part.pointers.last().unwrap() as usize, part.neighbors.len());
        for v in 0..g.n() as u32 {
            let expected = lists.get(&(p, v)).cloned().unwrap_or_default();
            assert_eq!(part.neighbors_of(v), expected.as_slice());
        }
    }
}

fn arb_graph() -> impl Strategy<Value = Graph> {
    (1usize..60).prop_flat_map(|n| {
        proptest::collection::vec((0..n as u32, 0..n as u32), 0..200)
            .prop_map(move |pairs| Graph::from_pairs(n, &pairs))
    })
}

proptest! {
    #[test]
    fn csr_round_trip_reproduces_inverted_edges(g in arb_graph()) {
        let n = g.n();
        for k in [1, 2, (n / 2).max(1), n] {
            let csr = build_partitioned_csr(&g, k);
            let mut decoded = Vec::new();
            for p in 0..csr.count() {
                let part = csr.part(p);
                prop_assert_eq!(part.pointers.len(), n + 1);
                for v in 0..n as u32 {
                    for &u in part.neighbors_of(v) {
                        prop_assert_eq!(u as usize / k, p);
                        decoded.push(Edge::new(u, v));
                    }
                }
            }
            prop_assert_eq!(multiset(decoded), multiset(g.edges().iter().copied()));
        }
    }

    #[test]
    fn partition_membership_and_sorting(g in arb_graph(), k in 1usize..70) {
        let parts = partition_edge_list(&g, k);
        prop_assert_eq!(parts.count(), g.n().div_ceil(k));
        prop_assert_eq!(parts.m(), g.m());
        let sorted = sort_partition_edges_by_destination(parts.clone());
        for p in 0..parts.count() {
            prop_assert!(parts.edges(p).iter().all(|e| e.src as usize / k == p));
            prop_assert!(sorted.edges(p).windows(2).all(|w| w[0].dst <= w[1].dst));
            prop_assert_eq!(
                multiset(sorted.edges(p).iter().copied()),
                multiset(parts.edges(p).iter().copied())
            );
        }
    }
}
