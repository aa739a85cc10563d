//! Single-photon detection statistics at the four output ports.
//!
//! `port_probabilities` is exact (`|(M(4) [psi_i; 0])_k|^2`); `sample` draws
//! Monte-Carlo clicks from those probabilities to audit unambiguity and the
//! failure rate.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::designer::{MeasurementDesign, PortRole, FAILURE_MODE};
use crate::error::{Error, Result};
use crate::filter::{average_overlap, solve, Regime};
use crate::states::Ensemble;

/// Probabilities below this are treated as exact zeros when sampling.
pub const ZERO_PROBABILITY: f64 = 1e-14;

/// Default number of independent RNG streams in [`sample`].
pub const DEFAULT_SHARDS: u64 = 8;

/// Upper bound on trials so that every count is exactly representable as `f64`.
pub const MAX_TRIALS: u64 = 1 << 53;

/// Exact detection probabilities at the four output ports for input `i` (0-based).
pub fn port_probabilities(design: &MeasurementDesign, i: usize) -> [f64; 4] {
    let out = design.unitary * design.inputs[i];
    [0, 1, 2, 3].map(|k| out[k].norm_sqr())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateStatistics {
    /// Exact port probabilities.
    pub exact: [f64; 4],
    /// Sampled clicks per port.
    pub counts: [u64; 4],
    /// Trials in which this state was prepared.
    pub trials: u64,
    /// Clicks at ports that would name the wrong subset.
    pub violations: u64,
}

impl StateStatistics {
    pub fn empirical(&self) -> [f64; 4] {
        let n = self.trials.max(1) as f64;
        self.counts.map(|c| c as f64 / n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub per_state: [StateStatistics; 3],
    pub trials: u64,
    pub violations: u64,
    /// Fraction of all trials ending at the failure port.
    pub empirical_failure: f64,
    /// `sum_i eta_i P(port 4 | i)`.
    pub exact_failure: f64,
    pub seed: u64,
    pub shards: u64,
}

impl SimulationReport {
    /// Largest `|empirical - exact|` over states and ports, in units of the
    /// binomial standard deviation of that cell. Cells with zero exact
    /// probability contribute only if they were hit.
    pub fn max_sigma_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for s in &self.per_state {
            if s.trials == 0 {
                continue;
            }
            let emp = s.empirical();
            for k in 0..4 {
                let p = s.exact[k];
                let sigma = (p * (1.0 - p) / s.trials as f64).sqrt();
                let dev = (emp[k] - p).abs();
                let z = if sigma > 0.0 {
                    dev / sigma
                } else if dev > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                };
                worst = worst.max(z);
            }
        }
        worst
    }
}

fn is_violation(design: &MeasurementDesign, state: usize, port: usize) -> bool {
    match design.port_role(port) {
        PortRole::Target => state != 0,
        PortRole::Complement => state == 0,
        PortRole::Inconclusive => false,
    }
}

/// Monte-Carlo audit with [`DEFAULT_SHARDS`] streams.
pub fn sample(
    design: &MeasurementDesign,
    e: &Ensemble,
    trials: u64,
    seed: u64,
) -> Result<SimulationReport> {
    sample_sharded(design, e, trials, seed, DEFAULT_SHARDS)
}

/// Each trial draws a state from the priors and a port from that state's exact
/// probabilities. Trials are split over `shards` ChaCha8 streams (stream
/// index = shard index, all keyed by `seed`) run in parallel; the merged
/// report depends only on `(seed, shards)`.
pub fn sample_sharded(
    design: &MeasurementDesign,
    e: &Ensemble,
    trials: u64,
    seed: u64,
    shards: u64,
) -> Result<SimulationReport> {
    if trials == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    if trials > MAX_TRIALS {
        return Err(Error::Domain(format!("trials must not exceed {MAX_TRIALS}")));
    }
    if shards == 0 {
        return Err(Error::Domain("shard count must be positive".into()));
    }
    let exact: [[f64; 4]; 3] = [0, 1, 2].map(|i| {
        port_probabilities(design, i).map(|p| if p < ZERO_PROBABILITY { 0.0 } else { p })
    });
    let state_dist = WeightedIndex::new(e.priors())
        .map_err(|err| Error::InvalidPriors(err.to_string()))?;
    let port_dists: Vec<WeightedIndex<f64>> = exact
        .iter()
        .map(|p| WeightedIndex::new(p).map_err(|err| Error::Domain(err.to_string())))
        .collect::<Result<_>>()?;

    let per_shard = trials / shards;
    let extra = trials % shards;
    let shard_counts: Vec<[[u64; 4]; 3]> = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let n = per_shard + u64::from(shard < extra);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard);
            let mut counts = [[0u64; 4]; 3];
            for _ in 0..n {
                let i = state_dist.sample(&mut rng);
                let k = port_dists[i].sample(&mut rng);
                counts[i][k] += 1;
            }
            counts
        })
        .collect();

    let mut counts = [[0u64; 4]; 3];
    for c in &shard_counts {
        for i in 0..3 {
            for k in 0..4 {
                counts[i][k] += c[i][k];
            }
        }
    }

    let per_state = [0, 1, 2].map(|i| {
        let violations = (0..4)
            .filter(|&k| is_violation(design, i, k))
            .map(|k| counts[i][k])
            .sum();
        StateStatistics {
            exact: exact[i],
            counts: counts[i],
            trials: counts[i].iter().sum(),
            violations,
        }
    });
    let failures: u64 = per_state.iter().map(|s| s.counts[FAILURE_MODE]).sum();
    let priors = e.priors();
    Ok(SimulationReport {
        violations: per_state.iter().map(|s| s.violations).sum(),
        exact_failure: (0..3).map(|i| priors[i] * exact[i][FAILURE_MODE]).sum(),
        empirical_failure: failures as f64 / trials as f64,
        per_state,
        trials,
        seed,
        shards,
    })
}

/// Failure rates of the two projective (von Neumann) filters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VonNeumannBaselines {
    /// Projection onto `psi_1` and its orthogonal complement: `eta1 + A`.
    /// It never identifies `psi_1`.
    pub target_projection: f64,
    /// Projection onto the parallel part of `psi_1`, its perpendicular part
    /// and the remaining direction: `eta1 w + A / w`.
    pub parallel_projection: f64,
}

impl VonNeumannBaselines {
    pub fn best(&self) -> f64 {
        self.target_projection.min(self.parallel_projection)
    }
}

pub fn von_neumann_baselines(e: &Ensemble) -> Result<VonNeumannBaselines> {
    let sol = solve(e)?;
    let eta1 = e.priors()[0];
    let a = average_overlap(e);
    let w = sol.parallel_norm2;
    let parallel_projection = if w > 0.0 {
        eta1 * w + a / w
    } else if a == 0.0 {
        0.0
    } else {
        eta1 + a
    };
    Ok(VonNeumannBaselines {
        target_projection: eta1 + a,
        parallel_projection,
    })
}

/// Failure rate of the projective filter used as the comparison point for
/// the optimum: the target projection when it is itself optimal (large
/// average overlap), otherwise the parallel projection, which can conclude
/// both "psi_1" and "psi_2 or psi_3".
pub fn von_neumann_baseline(e: &Ensemble) -> Result<f64> {
    let b = von_neumann_baselines(e)?;
    Ok(match solve(e)?.regime {
        Regime::VnLargeOverlap => b.target_projection,
        Regime::Povm | Regime::VnSmallOverlap => b.parallel_projection,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designer::design;
    use crate::instances;

    fn close(a: [f64; 4], b: [f64; 4], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn second_example_port_probabilities() {
        let e = instances::worked_example_two();
        let d = design(&e, &solve(&e).unwrap()).unwrap();
        let third = 1.0 / 3.0;
        assert!(close(port_probabilities(&d, 0), [third, 0.0, 0.0, 2.0 * third], 1e-12));
        assert!(close(port_probabilities(&d, 1), [0.0, third, third, third], 1e-12));
        assert!(close(port_probabilities(&d, 2), [0.0, third, third, third], 1e-12));
    }

    #[test]
    fn identity_design_routes_e1_to_port_one() {
        let e = instances::orthogonal_triple();
        let d = design(&e, &solve(&e).unwrap()).unwrap();
        assert_eq!(port_probabilities(&d, 0), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn single_trial_is_consistent() {
        let e = instances::worked_example_two();
        let d = design(&e, &solve(&e).unwrap()).unwrap();
        let r = sample(&d, &e, 1, 7).unwrap();
        assert_eq!(r.trials, 1);
        let total: u64 = r.per_state.iter().map(|s| s.counts.iter().sum::<u64>()).sum();
        assert_eq!(total, 1);
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn zero_trials_rejected() {
        let e = instances::worked_example_two();
        let d = design(&e, &solve(&e).unwrap()).unwrap();
        assert!(sample(&d, &e, 0, 1).is_err());
        assert!(sample(&d, &e, MAX_TRIALS + 1, 1).is_err());
        assert!(sample_sharded(&d, &e, 10, 1, 0).is_err());
    }

    #[test]
    fn sampling_is_reproducible() {
        let e = instances::symmetric(0.4).unwrap();
        let d = design(&e, &solve(&e).unwrap()).unwrap();
        let a = sample(&d, &e, 20_000, 42).unwrap();
        let b = sample(&d, &e, 20_000, 42).unwrap();
        let c = sample(&d, &e, 20_000, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.per_state, c.per_state);
    }

    #[test]
    fn baselines() {
        let b = von_neumann_baseline(&instances::worked_example_two()).unwrap();
        assert!((b - 5.0 / 9.0).abs() < 1e-12);
        assert_eq!(von_neumann_baseline(&instances::orthogonal_triple()).unwrap(), 0.0);
        let b = von_neumann_baseline(&instances::symmetric(0.9).unwrap()).unwrap();
        assert!((b - (1.0 / 3.0 + 2.0 * 0.81 / 3.0)).abs() < 1e-12);
        // best projective filter for the second example: eta1 + A = 13/27
        let all = von_neumann_baselines(&instances::worked_example_two()).unwrap();
        assert!((all.best() - 13.0 / 27.0).abs() < 1e-12);
    }
}
