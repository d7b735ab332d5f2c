use dirlp::eval::{hits_at_k, mrr, rank_of_positive, TiePolicy};
use dirlp::verify::oracle;
use proptest::prelude::*;

fn score() -> impl Strategy<Value = f64> {
    // Small integer grid so ties are common.
    (-4i32..5).prop_map(|x| x as f64 / 2.0)
}

proptest! {
    #[test]
    fn rank_bounds_and_tie_policies(pos in score(), negs in prop::collection::vec(score(), 0..30)) {
        let r = |t| rank_of_positive(pos, &negs, t).unwrap();
        let (o, m, p) = (r(TiePolicy::Optimistic), r(TiePolicy::Mid), r(TiePolicy::Pessimistic));
        prop_assert!(1.0 <= o && o <= m && m <= p && p <= 1.0 + negs.len() as f64);
        prop_assert_eq!(m, (o + p) / 2.0);
        for t in [TiePolicy::Optimistic, TiePolicy::Mid, TiePolicy::Pessimistic] {
            prop_assert_eq!(r(t), oracle::rank(pos, &negs, t));
        }
        let shifted: Vec<f64> = negs.iter().map(|x| 3.0 * x + 1.0).collect();
        prop_assert_eq!(rank_of_positive(3.0 * pos + 1.0, &shifted, TiePolicy::Mid).unwrap(), m);
    }

    #[test]
    fn metric_ranges(ranks in prop::collection::vec((1u32..200).prop_map(|r| r as f64 / 2.0 + 0.5), 1..50)) {
        let v = mrr(&ranks).unwrap();
        prop_assert!(v > 0.0 && v <= 1.0);
        let mut last = 0.0;
        for k in [1, 5, 20, 100] {
            let h = hits_at_k(&ranks, k).unwrap();
            prop_assert!(h >= last && h <= 1.0);
            last = h;
        }
        prop_assert_eq!(hits_at_k(&ranks, 1000).unwrap(), 1.0);
    }
}

#[test]
fn nan_scores_are_rejected() {
    assert!(rank_of_positive(f64::NAN, &[1.0], TiePolicy::Mid).is_err());
    assert!(rank_of_positive(0.0, &[f64::NAN], TiePolicy::Mid).is_err());
}
