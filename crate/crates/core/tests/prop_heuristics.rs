mod common;

use common::{digraph, digraph_and_pair, relabeled, reversed};
use dirlp::heuristics::{Family, HeuristicSpec, Heuristics, Variant};
use dirlp::verify::{all_heuristic_specs, oracle::Dense};
use proptest::prelude::*;

fn spec(f: Family, v: Variant) -> HeuristicSpec {
    HeuristicSpec::new(f, v).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn scores_match_dense_walks((g, (u, v)) in digraph_and_pair(10)) {
        let h = Heuristics::new(&g);
        let dense = Dense::new(&g);
        for s in all_heuristic_specs() {
            let got = h.score(&s, u, v).unwrap();
            prop_assert!(close(got, dense.score(&s, u, v)), "{s}: {got} vs {}", dense.score(&s, u, v));
            prop_assert!(got >= 0.0);
        }
    }

    #[test]
    fn sym_scores_are_symmetric((g, (u, v)) in digraph_and_pair(12)) {
        let h = Heuristics::new(&g);
        for f in [Family::Lp, Family::Ra, Family::Aa] {
            let s = spec(f, Variant::Sym);
            prop_assert!(close(h.score(&s, u, v).unwrap(), h.score(&s, v, u).unwrap()));
        }
    }

    #[test]
    fn directional_duality((g, (u, v)) in digraph_and_pair(12)) {
        let h = Heuristics::new(&g);
        for f in [Family::Ra, Family::Aa] {
            let score = |var, a, b| h.score(&spec(f, var), a, b).unwrap();
            prop_assert!(close(score(Variant::InOut, u, v), score(Variant::OutIn, v, u)));
            prop_assert!(close(score(Variant::InIn, u, v), score(Variant::InIn, v, u)));
            prop_assert!(close(score(Variant::OutOut, u, v), score(Variant::OutOut, v, u)));
            let sym = score(Variant::Sym, u, v);
            for var in Variant::DIRECTIONAL {
                prop_assert!(score(var, u, v) <= sym + 1e-12);
            }
        }
    }

    #[test]
    fn reversing_the_graph_reverses_asym_lp((g, (u, v)) in digraph_and_pair(12)) {
        let r = reversed(&g);
        let s = spec(Family::Lp, Variant::Asym);
        prop_assert!(close(Heuristics::new(&g).score(&s, u, v).unwrap(), Heuristics::new(&r).score(&s, v, u).unwrap()));
        let ra_g = Heuristics::new(&g).score(&spec(Family::Ra, Variant::InOut), u, v).unwrap();
        let ra_r = Heuristics::new(&r).score(&spec(Family::Ra, Variant::OutIn), u, v).unwrap();
        prop_assert!(close(ra_g, ra_r));
    }

    #[test]
    fn relabeling_nodes_preserves_scores((g, perm) in digraph(10).prop_flat_map(|g| {
        let n = g.num_nodes();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })) {
        let p = relabeled(&g, &perm);
        let (hg, hp) = (Heuristics::new(&g), Heuristics::new(&p));
        for s in all_heuristic_specs() {
            for u in 0..g.num_nodes() {
                for v in 0..g.num_nodes() {
                    if u != v {
                        prop_assert!(close(hg.score(&s, u, v).unwrap(), hp.score(&s, perm[u], perm[v]).unwrap()));
                    }
                }
            }
        }
    }
}
