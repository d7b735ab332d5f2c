mod common;

use std::collections::BTreeSet;

use common::{digraph, digraph_and_pair, raw_edges, reversed};
use dirlp::digraph::{Direction, DirectedGraph, Walk};
use proptest::prelude::*;

proptest! {
    #[test]
    fn loading_drops_loops_and_duplicates((n, raw) in raw_edges(12)) {
        let (g, report) = DirectedGraph::from_edges(n, raw.iter().copied()).unwrap();
        let expected: BTreeSet<_> = raw.iter().copied().filter(|(u, v)| u != v).collect();
        let expected: Vec<_> = expected.into_iter().collect();
        prop_assert_eq!(g.edges(), expected.as_slice());
        prop_assert_eq!(report.self_loops_dropped, raw.iter().filter(|(u, v)| u == v).count());
        prop_assert_eq!(report.self_loops_dropped + report.duplicates_collapsed + g.num_edges(), raw.len());
    }

    #[test]
    fn in_and_out_adjacency_agree(g in digraph(12)) {
        let n = g.num_nodes();
        prop_assert_eq!((0..n).map(|u| g.out_degree(u)).sum::<usize>(), g.num_edges());
        prop_assert_eq!((0..n).map(|u| g.in_degree(u)).sum::<usize>(), g.num_edges());
        for u in 0..n {
            for v in 0..n {
                prop_assert_eq!(g.out_neighbors(u).contains(&v), g.has_edge(u, v));
                prop_assert_eq!(g.in_neighbors(v).contains(&u), g.has_edge(u, v));
            }
            prop_assert!(g.out_neighbors(u).windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn symmetrize_is_the_smallest_symmetric_supergraph(g in digraph(12)) {
        let s = g.symmetrize();
        prop_assert!(s.is_symmetric());
        let again = s.symmetrize();
        prop_assert_eq!(again.edges(), s.edges());
        for &(u, v) in s.edges() {
            prop_assert!(g.has_edge(u, v) || g.has_edge(v, u));
        }
        prop_assert_eq!(s.num_edges(), 2 * (g.num_edges() - g.bidirectional_pairs()));
        prop_assert_eq!(g.is_symmetric(), s.num_edges() == g.num_edges());
    }

    #[test]
    fn backward_distance_is_forward_distance_on_the_reverse(((g, (s, t)), delta) in (digraph_and_pair(10), 1usize..6)) {
        let r = reversed(&g);
        let fwd = g.truncated_distance(s, t, delta, Walk::Forward).unwrap();
        prop_assert_eq!(fwd, g.truncated_distance(t, s, delta, Walk::Backward).unwrap());
        prop_assert_eq!(fwd, r.truncated_distance(t, s, delta, Walk::Forward).unwrap());
        let bfs = g.bfs_distances(s, Direction::Out, delta)[t].unwrap_or(delta).min(delta);
        prop_assert_eq!(fwd, bfs);
    }

    #[test]
    fn bfs_shells_partition_reachable_nodes(g in digraph(10)) {
        let s = g.symmetrize();
        let dist = s.bfs_distances(0, Direction::Out, 4);
        for k in 1..=4 {
            let shell = s.bfs_shell(0, k).unwrap();
            let expected: Vec<_> = (0..s.num_nodes()).filter(|&x| dist[x] == Some(k)).collect();
            prop_assert_eq!(shell, expected);
        }
    }
}
