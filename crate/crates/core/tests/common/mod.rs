#![allow(dead_code)]

use proptest::prelude::*;
use qfilter::linalg::C64;
use qfilter::random::{random_ensemble, random_priors, random_state};
use qfilter::{Ensemble, StateVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ensemble_from_seed(seed: u64) -> Ensemble {
    random_ensemble(&mut rng(seed)).unwrap()
}

/// Random ensembles in three modes.
pub fn ensembles() -> impl Strategy<Value = Ensemble> {
    any::<u64>().prop_map(ensemble_from_seed)
}

/// `psi_1` is a random combination of `psi_2` and `psi_3`.
pub fn dependent_ensembles() -> impl Strategy<Value = Ensemble> {
    any::<u64>().prop_map(|seed| {
        let mut r = rng(seed);
        let psi2 = random_state(&mut r, 3).unwrap();
        let psi3 = random_state(&mut r, 3).unwrap();
        let c = random_state(&mut r, 2).unwrap();
        let (a, b) = (c.amplitudes()[0], c.amplitudes()[1]);
        let mix: Vec<C64> = (0..3)
            .map(|k| a * psi2.amplitudes()[k] + b * psi3.amplitudes()[k])
            .collect();
        let psi1 = StateVector::normalized(mix).unwrap();
        Ensemble::new([psi1, psi2, psi3], random_priors(&mut r)).unwrap()
    })
}

/// Every state multiplied by an independent global phase.
pub fn rephased(e: &Ensemble, phases: [f64; 3]) -> Ensemble {
    let states = [0, 1, 2].map(|i| {
        let z = C64::from_polar(1.0, phases[i]);
        StateVector::new(e.state(i).amplitudes().iter().map(|&a| a * z).collect()).unwrap()
    });
    Ensemble::new(states, e.priors()).unwrap()
}
