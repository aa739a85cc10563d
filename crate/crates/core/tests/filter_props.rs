mod common;

use proptest::prelude::*;
use qfilter::filter::{average_overlap, classify_regime, m_matrix, solve, Regime};
use qfilter::linalg::hermitian_3x3_min_eigenvalue;
use qfilter::simulator::von_neumann_baselines;
use qfilter::states::{overlaps, parallel_component_norm2};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn average_failure_is_the_prior_weighted_sum(e in common::ensembles()) {
        let s = solve(&e).unwrap();
        let eta = e.priors();
        let sum: f64 = (0..3).map(|i| eta[i] * s.q[i]).sum();
        prop_assert!((s.average_failure - sum).abs() < 1e-14);
        prop_assert_eq!(s.regime, classify_regime(&e).unwrap());
    }

    #[test]
    fn failure_products_match_overlaps(e in common::ensembles()) {
        let s = solve(&e).unwrap();
        let o = overlaps(&e);
        prop_assert!((s.q[0] * s.q[1] - o.a12()).abs() < 1e-12);
        prop_assert!((s.q[0] * s.q[2] - o.a13()).abs() < 1e-12);
    }

    #[test]
    fn q1_respects_its_bounds(e in common::ensembles()) {
        let s = solve(&e).unwrap();
        let w = parallel_component_norm2(&e).unwrap();
        prop_assert!(s.q[0] >= w - 1e-12, "q1 = {} < w = {}", s.q[0], w);
        prop_assert!(s.q.iter().all(|&q| (0.0..=1.0).contains(&q)));
        prop_assert!((s.parallel_norm2 - w).abs() < 1e-10);
    }

    #[test]
    fn success_gram_is_psd_at_optimum(e in common::ensembles()) {
        let s = solve(&e).unwrap();
        let m = m_matrix(&e, s.q[0]).unwrap();
        prop_assert!(hermitian_3x3_min_eigenvalue(&m) >= -1e-9);
    }

    #[test]
    fn swapping_the_complement_swaps_q2_q3(e in common::ensembles()) {
        let a = solve(&e).unwrap();
        let b = solve(&e.swap_complement()).unwrap();
        prop_assert!((a.average_failure - b.average_failure).abs() < 1e-13);
        prop_assert!((a.q[0] - b.q[0]).abs() < 1e-13);
        prop_assert!((a.q[1] - b.q[2]).abs() < 1e-13);
        prop_assert!((a.q[2] - b.q[1]).abs() < 1e-13);
        prop_assert_eq!(a.regime, b.regime);
    }

    #[test]
    fn interior_optimum_is_stationary(e in common::ensembles()) {
        let s = solve(&e).unwrap();
        if s.regime == Regime::Povm {
            let eta1 = e.priors()[0];
            prop_assert!((eta1 * s.q[0] * s.q[0] - average_overlap(&e)).abs() < 1e-12);
            prop_assert!((s.average_failure - 2.0 * (eta1 * s.average_overlap).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn optimum_beats_both_projective_filters(e in common::ensembles()) {
        let s = solve(&e).unwrap();
        let b = von_neumann_baselines(&e).unwrap();
        prop_assert!(s.average_failure <= b.target_projection + 1e-12);
        prop_assert!(s.average_failure <= b.parallel_projection + 1e-12);
    }

    #[test]
    fn global_phases_do_not_matter(e in common::ensembles(), phases in prop::array::uniform3(-3.0f64..3.0)) {
        let a = solve(&e).unwrap();
        let b = solve(&common::rephased(&e, phases)).unwrap();
        prop_assert!((a.average_failure - b.average_failure).abs() < 1e-13);
    }

    #[test]
    fn dependent_target_has_no_povm_region(e in common::dependent_ensembles()) {
        let s = solve(&e).unwrap();
        let eta1 = e.priors()[0];
        let a = average_overlap(&e);
        prop_assert!((s.parallel_norm2 - 1.0).abs() < 1e-9);
        prop_assert!((s.q[0] - 1.0).abs() < 1e-9);
        prop_assert!((s.average_failure - (eta1 + a)).abs() < 1e-9);
        if (a - eta1).abs() > 1e-9 {
            prop_assert!(s.regime != Regime::Povm);
        }
        let b = von_neumann_baselines(&e).unwrap();
        prop_assert!((b.target_projection - b.parallel_projection).abs() < 1e-9);
    }
}
