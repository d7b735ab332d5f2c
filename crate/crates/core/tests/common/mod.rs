#![allow(dead_code)]

use dirlp::digraph::{DirectedGraph, Edge};
use proptest::prelude::*;

/// Random digraph on 2..=max_nodes nodes with self-loops and duplicates in
/// the raw edge list.
pub fn digraph(max_nodes: usize) -> impl Strategy<Value = DirectedGraph> {
    raw_edges(max_nodes).prop_map(|(n, e)| DirectedGraph::from_edges(n, e).unwrap().0)
}

pub fn raw_edges(max_nodes: usize) -> impl Strategy<Value = (usize, Vec<Edge>)> {
    (2..=max_nodes).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..n * 3)))
}

/// A digraph together with one ordered pair of distinct nodes.
pub fn digraph_and_pair(max_nodes: usize) -> impl Strategy<Value = (DirectedGraph, Edge)> {
    digraph(max_nodes).prop_flat_map(|g| {
        let n = g.num_nodes();
        (Just(g), (0..n, 0..n - 1).prop_map(|(u, v)| (u, if v >= u { v + 1 } else { v })))
    })
}

pub fn reversed(g: &DirectedGraph) -> DirectedGraph {
    DirectedGraph::from_edges(g.num_nodes(), g.edges().iter().map(|&(u, v)| (v, u))).unwrap().0
}

pub fn relabeled(g: &DirectedGraph, perm: &[usize]) -> DirectedGraph {
    DirectedGraph::from_edges(g.num_nodes(), g.edges().iter().map(|&(u, v)| (perm[u], perm[v]))).unwrap().0
}
