mod common;

use proptest::prelude::*;
use qfilter::designer::design;
use qfilter::simulator::{port_probabilities, sample, sample_sharded};
use qfilter::{instances, solve};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_failure_equals_q(e in common::ensembles()) {
        let s = solve(&e).unwrap();
        let d = design(&e, &s).unwrap();
        let r = sample(&d, &e, 2_000, 9).unwrap();
        prop_assert!((r.exact_failure - s.average_failure).abs() < 1e-10);
        prop_assert_eq!(r.violations, 0);
        let total: u64 = r.per_state.iter().map(|x| x.trials).sum();
        prop_assert_eq!(total, 2_000);
        for i in 0..3 {
            let p: f64 = port_probabilities(&d, i).iter().sum();
            prop_assert!((p - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn shard_count_only_changes_the_draws(seed in any::<u64>(), shards in 1u64..16) {
        let e = instances::worked_example_two();
        let d = design(&e, &solve(&e).unwrap()).unwrap();
        let a = sample_sharded(&d, &e, 5_000, seed, shards).unwrap();
        let b = sample_sharded(&d, &e, 5_000, seed, shards).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.trials, 5_000);
        prop_assert_eq!(a.violations, 0);
    }
}
