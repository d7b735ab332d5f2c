mod common;

use std::sync::Arc;

use common::{digraph, digraph_and_pair};
use dirlp::digraph::DirectedGraph;
use dirlp::featurize::{
    canonical_sequences, directed_dim, directed_edge_features, distance_encoding_labels, select_landmarks,
    sequence_count, undirected_dim, undirected_edge_features, LabelMode, StructuralFeaturizer,
};
use dirlp::verify::oracle::Dense;
use proptest::prelude::*;

/// `M` for a directed block of length `2 M^2 + 2 M`.
fn seq_count(len: usize) -> usize {
    (0..).find(|m| 2 * m * m + 2 * m >= len).unwrap()
}

/// Inclusion-exclusion and bounds between the pair blocks `U`, `I` (`M x M`)
/// and the per-side sizes `L`, `R`.
fn directed_consistent(z: &[f64]) -> bool {
    let m = seq_count(z.len());
    let (u, rest) = z.split_at(m * m);
    let (i, rest) = rest.split_at(m * m);
    let (l, r) = rest.split_at(m);
    (0..m).all(|a| {
        (0..m).all(|b| {
            let k = a * m + b;
            u[k] + i[k] == l[a] + r[b] && i[k] <= l[a].min(r[b]) && u[k] >= l[a].max(r[b])
        })
    })
}

fn undirected_consistent(z: &[f64]) -> bool {
    let m = z.len() / 4;
    (0..m).all(|k| {
        let (u, i, l, r) = (z[k], z[m + k], z[2 * m + k], z[3 * m + k]);
        u + i == l + r && i <= l.min(r) && u >= l.max(r)
    })
}

/// Features of `(v, u)` from those of `(u, v)`: transposed pair blocks and
/// swapped sides.
fn swap_directed(z: &[f64]) -> Vec<f64> {
    let m = seq_count(z.len());
    let t = |block: &[f64]| (0..m * m).map(|k| block[(k % m) * m + k / m]).collect::<Vec<_>>();
    [t(&z[..m * m]), t(&z[m * m..2 * m * m]), z[2 * m * m + m..].to_vec(), z[2 * m * m..2 * m * m + m].to_vec()].concat()
}

fn swap_undirected(z: &[f64]) -> Vec<f64> {
    let m = z.len() / 4;
    [&z[..m], &z[m..2 * m], &z[3 * m..], &z[2 * m..3 * m]].concat()
}

proptest! {
    #[test]
    fn sequence_enumeration(n in 1usize..8) {
        let seqs = canonical_sequences(n);
        prop_assert_eq!(seqs.len(), (1usize << (n + 1)) - 2);
        prop_assert_eq!(sequence_count(n), seqs.len());
        prop_assert!(seqs.windows(2).all(|w| (w[0].len(), w[0].steps()) < (w[1].len(), w[1].steps())));
    }

    #[test]
    fn features_match_oracle_and_blocks((g, (u, v)) in digraph_and_pair(10), radius in 1usize..4) {
        let dense = Dense::new(&g);
        let zd = directed_edge_features(&g, u, v, radius).unwrap();
        let zu = undirected_edge_features(&g, u, v, radius).unwrap();
        prop_assert_eq!(zd.len(), directed_dim(radius));
        prop_assert_eq!(zu.len(), undirected_dim(radius));
        prop_assert_eq!(&zd, &dense.directed_features(u, v, radius));
        prop_assert_eq!(&zu, &dense.undirected_features(u, v, radius));
        prop_assert!(directed_consistent(&zd));
        prop_assert!(undirected_consistent(&zu));
    }

    #[test]
    fn swapping_endpoints_swaps_sides((g, (u, v)) in digraph_and_pair(10), radius in 1usize..4) {
        let a = directed_edge_features(&g, u, v, radius).unwrap();
        let b = directed_edge_features(&g, v, u, radius).unwrap();
        prop_assert_eq!(swap_directed(&a), b);
        let a = undirected_edge_features(&g, u, v, radius).unwrap();
        let b = undirected_edge_features(&g, v, u, radius).unwrap();
        prop_assert_eq!(swap_undirected(&a), b);
    }

    #[test]
    fn masking_equals_deleting_the_edge((g, (u, v)) in digraph_and_pair(10), radius in 1usize..4) {
        let f = StructuralFeaturizer::new(Arc::new(g.clone()), radius).unwrap();
        let masked = f.masked(u, v).unwrap();
        let without = DirectedGraph::from_edges(g.num_nodes(), g.edges().iter().copied().filter(|&e| e != (u, v)))
            .unwrap()
            .0;
        prop_assert_eq!(&masked.z_dir, &directed_edge_features(&without, u, v, radius).unwrap());
        prop_assert_eq!(&masked.z_undir, &undirected_edge_features(&without, u, v, radius).unwrap());
        prop_assert_eq!(f.cached(u, v).unwrap().z_dir.clone(), directed_edge_features(&g, u, v, radius).unwrap());
    }

    #[test]
    fn labels_are_truncated_distances(g in digraph(12), k in 1usize..6, count in 1usize..3) {
        let count = count.min(g.num_nodes());
        let landmarks = select_landmarks(&g, count).unwrap();
        let mut sorted = landmarks.clone();
        sorted.sort_unstable();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), count);
        for directed in [false, true] {
            let m = distance_encoding_labels(&g, &landmarks, LabelMode::DeK(k), directed).unwrap();
            prop_assert_eq!(m.dim, count * if directed { 2 } else { 1 });
            prop_assert!(m.data.iter().all(|&x| x >= 0.0 && x <= k as f64));
            for (i, &t) in landmarks.iter().enumerate() {
                let width = m.dim / count;
                prop_assert!(m.row(t)[i * width..(i + 1) * width].iter().all(|&x| x == 0.0));
            }
        }
        let s = g.symmetrize();
        let d = distance_encoding_labels(&s, &landmarks, LabelMode::DeK(k), true).unwrap();
        prop_assert!((0..s.num_nodes()).all(|x| d.row(x).chunks(2).all(|c| c[0] == c[1])));
    }
}
