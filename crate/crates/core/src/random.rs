//! Random instances for property tests, the oracle suite and the examples.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::Result;
use crate::linalg::C64;
use crate::multiport::{BeamSplitterLayer, MeshProgram, MODES};
use crate::states::{Ensemble, StateVector};

/// Haar-random pure state in `dim` modes.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<StateVector> {
    let amplitudes = (0..dim)
        .map(|_| {
            C64::new(
                StandardNormal.sample(&mut *rng),
                StandardNormal.sample(&mut *rng),
            )
        })
        .collect();
    StateVector::normalized(amplitudes)
}

/// Priors drawn uniformly from the probability simplex.
pub fn random_priors<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let w: [f64; 3] = [0, 1, 2].map(|_| Exp1.sample(&mut *rng));
    let total: f64 = w.iter().sum();
    w.map(|x| x / total)
}

/// Three random states in three modes with random priors.
pub fn random_ensemble<R: Rng + ?Sized>(rng: &mut R) -> Result<Ensemble> {
    let states = [random_state(rng, 3)?, random_state(rng, 3)?, random_state(rng, 3)?];
    Ensemble::new(states, random_priors(rng))
}

/// Random mesh over every mode pair plus random output phases.
pub fn random_mesh<R: Rng + ?Sized>(rng: &mut R, layers: usize) -> Result<MeshProgram> {
    let mut program = MeshProgram::identity();
    for _ in 0..layers {
        let p = rng.random_range(1..=MODES);
        let q = loop {
            let q = rng.random_range(1..=MODES);
            if q != p {
                break q;
            }
        };
        let omega = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
        let phi = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        program.layers.push(BeamSplitterLayer::from_angle(
            p.min(q),
            p.max(q),
            omega,
            phi,
        )?);
    }
    for d in program.output_phases.iter_mut() {
        *d = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    }
    Ok(program)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn priors_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let p = random_priors(&mut rng);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn ensembles_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let e = random_ensemble(&mut rng).unwrap();
        assert_eq!(e.dim(), 3);
    }
}
