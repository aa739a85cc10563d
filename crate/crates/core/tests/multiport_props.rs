mod common;

use proptest::prelude::*;
use qfilter::designer::design;
use qfilter::linalg::{max_abs_diff, unitarity_residual};
use qfilter::multiport::{decompose, embed_layer, recompose, recomposition_error};
use qfilter::random::random_mesh;
use qfilter::solve;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn random_unitaries_round_trip(seed in any::<u64>(), layers in 0usize..12) {
        let mesh = random_mesh(&mut common::rng(seed), layers).unwrap();
        let u = recompose(&mesh);
        prop_assert!(unitarity_residual(&u) < 1e-12);
        let program = decompose(&u).unwrap();
        prop_assert!(program.layers.len() <= 6);
        prop_assert!(program.validate().is_ok());
        prop_assert!(recomposition_error(&program, &u) < 1e-10);
    }

    #[test]
    fn layers_are_unitary(seed in any::<u64>()) {
        let mesh = random_mesh(&mut common::rng(seed), 1).unwrap();
        let m = embed_layer(&mesh.layers[0]);
        prop_assert!(unitarity_residual(&m) < 1e-14);
    }

    #[test]
    fn designed_unitaries_round_trip(e in common::ensembles()) {
        let d = design(&e, &solve(&e).unwrap()).unwrap();
        let program = decompose(&d.unitary).unwrap();
        prop_assert!(max_abs_diff(&recompose(&program), &d.unitary) < 1e-9);
    }
}
