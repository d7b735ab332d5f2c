mod common;

use std::collections::HashSet;

use common::{digraph, digraph_and_pair};
use dirlp::sampling::{eval_candidates, make_splits, sample_negatives, NegativeMode, SplitRatios};
use proptest::prelude::*;

proptest! {
    #[test]
    fn splits_partition_the_edges(g in digraph(14).prop_filter("needs edges", |g| g.num_edges() >= 10), seed: u64) {
        let splits = make_splits(&g, SplitRatios::default(), seed, 3).unwrap();
        prop_assert_eq!(splits.len(), 3);
        for s in &splits {
            let mut all: Vec<_> = s.train_pos.iter().chain(&s.valid_pos).chain(&s.test_pos).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all.as_slice(), g.edges());
            let m = g.num_edges() as f64;
            prop_assert_eq!(s.valid_pos.len(), (m * 0.1).round() as usize);
            prop_assert_eq!(s.test_pos.len(), (m * 0.2).round() as usize);
        }
        prop_assert_eq!(&make_splits(&g, SplitRatios::default(), seed, 3).unwrap(), &splits);
    }

    #[test]
    fn negatives_avoid_edges_and_exclusions(g in digraph(14), seed: u64, count in 1usize..6) {
        let exclude: HashSet<_> = [(0, 1), (1, 0)].into_iter().collect();
        for mode in [NegativeMode::Directed, NegativeMode::Undirected] {
            let Ok(neg) = sample_negatives(&g, count, mode, seed, &exclude) else { continue };
            prop_assert_eq!(neg.edges.len(), count);
            let mut seen = HashSet::new();
            for &(u, v) in &neg.edges {
                prop_assert!(u != v && !g.has_edge(u, v) && !exclude.contains(&(u, v)));
                if mode == NegativeMode::Undirected {
                    prop_assert!(!g.has_edge(v, u));
                    prop_assert!(seen.insert((u.min(v), u.max(v))));
                } else {
                    prop_assert!(seen.insert((u, v)));
                }
            }
            prop_assert_eq!(sample_negatives(&g, count, mode, seed, &exclude).unwrap().edges, neg.edges);
        }
    }

    #[test]
    fn candidates_are_filtered_corruptions((g, (u, v)) in digraph_and_pair(14), count in 1usize..20, seed: u64) {
        let c = eval_candidates(&g, (u, v), count, seed).unwrap();
        let valid = (0..g.num_nodes()).filter(|&w| w != u && w != v && !g.has_edge(u, w)).count();
        prop_assert_eq!(c.shortfall, valid < count);
        prop_assert_eq!(c.candidates.len(), valid.min(count));
        let targets: HashSet<_> = c.candidates.iter().map(|&(a, w)| { assert_eq!(a, u); w }).collect();
        prop_assert_eq!(targets.len(), c.candidates.len());
        prop_assert!(targets.iter().all(|&w| w != u && w != v && !g.has_edge(u, w)));
    }
}
