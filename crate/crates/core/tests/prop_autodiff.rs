use std::sync::Arc;

use dirlp::autodiff::{gradcheck_tape, Init, ParamStore, SparseRows, Tape, Tensor};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn two_layer_network_gradients(rows in 1usize..6, inner in 1usize..5, outer in 1usize..4, seed: u64) {
        let mut store = ParamStore::new(seed);
        let x = store.add_init("x", rows, inner, Init::Glorot).unwrap();
        let w = store.add_init("w", inner, outer, Init::Glorot).unwrap();
        let b = store.add_init("b", 1, outer, Init::Glorot).unwrap();
        let report = gradcheck_tape(&store, 1e-6, |t, s| {
            let (x, w, b) = (t.param(s, x), t.param(s, w), t.param(s, b));
            let h = t.matmul(x, w);
            let h = t.add_bias(h, b);
            let h = t.sigmoid(h);
            let sq = t.mul(h, h);
            Ok(t.sum_all(sq))
        })
        .unwrap();
        prop_assert!(report.passed(1e-4), "{:?}", report);
    }

    #[test]
    fn sparse_mean_gradient_is_its_transpose(
        groups in prop::collection::vec(prop::collection::vec(0usize..5, 0..4), 1..6),
        seed: u64,
    ) {
        let slices: Vec<&[usize]> = groups.iter().map(Vec::as_slice).collect();
        let s = Arc::new(SparseRows::mean(5, &slices).unwrap());
        let mut store = ParamStore::new(seed);
        let x = store.add_init("x", 5, 2, Init::Glorot).unwrap();
        let mut tape = Tape::new();
        let xv = tape.param(&store, x);
        let y = tape.spmm(&s, xv);
        let loss = tape.sum_all(y);
        tape.backward(loss).unwrap();
        let grad = tape.param_grads(&store).unwrap()[0].clone().unwrap();
        for j in 0..5 {
            let expected: f64 = groups
                .iter()
                .map(|g| g.iter().filter(|&&c| c == j).count() as f64 / g.len().max(1) as f64)
                .sum();
            prop_assert!((grad.get(j, 0) - expected).abs() < 1e-12);
            prop_assert_eq!(grad.get(j, 0), grad.get(j, 1));
        }
    }

    #[test]
    fn activations_stay_in_range(values in prop::collection::vec(-50.0f64..50.0, 1..20)) {
        let mut tape = Tape::new();
        let x = tape.constant(Tensor::column(values.clone()));
        let s = tape.sigmoid(x);
        let r = tape.relu(x);
        prop_assert!(tape.value(s).data().iter().all(|&y| (0.0..=1.0).contains(&y)));
        prop_assert!(tape.value(r).data().iter().zip(&values).all(|(&y, &v)| y == v.max(0.0)));
        let targets = Arc::new(vec![1.0; values.len()]);
        let l = tape.bce_with_logits(x, &targets);
        prop_assert!(tape.scalar(l).unwrap().is_finite());
    }
}
