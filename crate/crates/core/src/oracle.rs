//! Brute-force cross-checks for the closed-form solver.
//!
//! Nothing in here calls into `filter` for the optimum itself: the filtering
//! oracle scans `q1` over the whole unit interval and keeps the points where
//! the success Gram matrix is positive semidefinite, and the three-state
//! oracle scans the failure-probability cube for full unambiguous
//! discrimination.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::{solve, FilterSolution, Regime};
use crate::linalg::{hermitian_2x2_min_eigenvalue, hermitian_3x3_min_eigenvalue};
use crate::states::{overlaps, Ensemble, OverlapSet};

/// Minimum eigenvalue accepted as positive semidefinite.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Default step of the one-dimensional filtering scan.
pub const DEFAULT_FILTER_RESOLUTION: f64 = 1e-4;

/// Default per-axis step of the two-dimensional three-state scan.
pub const DEFAULT_THREE_STATE_RESOLUTION: f64 = 1e-3;

/// Smallest Gram eigenvalue for which full discrimination is attempted.
pub const INDEPENDENCE_TOLERANCE: f64 = 1e-8;

/// Points per side of the refinement window, which spans one coarse step on
/// either side of the incumbent.
const REFINE_STEPS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub q1_star: f64,
    /// Average failure at `q1_star`.
    pub q_star: f64,
    /// `[q1, q2, q3]` at the minimizer.
    pub q: [f64; 3],
    pub grid_resolution: f64,
    /// Appendix identities evaluated at the minimizer.
    pub residuals: BTreeMap<String, f64>,
}

fn check_resolution(resolution: f64, max: f64) -> Result<()> {
    if resolution > 0.0 && resolution <= max {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "resolution must lie in (0, {max}], got {resolution}"
        )))
    }
}

/// `q2, q3` forced by `q1` through the collinear failure vectors, or `None`
/// where they would exceed one or `q1 = 0` leaves them undetermined.
fn partners(o: &OverlapSet, q1: f64) -> Option<(f64, f64)> {
    let (a12, a13) = (o.a12(), o.a13());
    if q1 == 0.0 {
        return (a12 == 0.0 && a13 == 0.0).then_some((0.0, 0.0));
    }
    let (q2, q3) = (a12 / q1, a13 / q1);
    (q2 <= 1.0 + PSD_TOLERANCE && q3 <= 1.0 + PSD_TOLERANCE).then_some((q2.min(1.0), q3.min(1.0)))
}

/// Whether the success vectors can realize their required Gram matrix at `q1`.
/// The `(1, j)` entries vanish identically, leaving `1 - q1` and a 2x2 block.
fn filter_feasible(o: &OverlapSet, q1: f64) -> bool {
    if q1 > 1.0 {
        return false;
    }
    let Some((q2, q3)) = partners(o, q1) else {
        return false;
    };
    if q1 == 0.0 {
        return hermitian_2x2_min_eigenvalue(1.0, 1.0, o.o23) >= -PSD_TOLERANCE;
    }
    let m23 = o.o23 - o.o21() * o.o13 / q1;
    hermitian_2x2_min_eigenvalue(1.0 - q2, 1.0 - q3, m23) >= -PSD_TOLERANCE
}

fn filter_objective(eta: [f64; 3], o: &OverlapSet, q1: f64) -> Option<(f64, [f64; 3])> {
    if !filter_feasible(o, q1) {
        return None;
    }
    let (q2, q3) = partners(o, q1)?;
    let q = [q1, q2, q3];
    Some((eta[0] * q1 + eta[1] * q2 + eta[2] * q3, q))
}

type Incumbent = (f64, [f64; 3]);

/// Lowest objective wins; ties go to the smallest `q1`, then `q2`.
fn better(a: Option<Incumbent>, b: Option<Incumbent>) -> Option<Incumbent> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            let key = |v: &Incumbent| (v.0, v.1[0], v.1[1]);
            if key(&y).partial_cmp(&key(&x)) == Some(std::cmp::Ordering::Less) {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

/// Minimizes the average failure of the filter by scanning `q1` over `[0, 1]`.
pub fn brute_force_filter(e: &Ensemble, resolution: f64) -> Result<OracleResult> {
    check_resolution(resolution, 1e-2)?;
    let eta = e.priors();
    let o = overlaps(e);
    let n = (1.0 / resolution).floor() as usize;

    let mut grid: Vec<f64> = (0..=n).map(|k| k as f64 * resolution).collect();
    grid.push(1.0);
    let coarse = grid
        .par_iter()
        .map(|&q1| filter_objective(eta, &o, q1))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(None, better);
    let (_, q) = coarse.ok_or_else(|| Error::Infeasible("no feasible q1 on the grid".into()))?;

    let fine_step = resolution / REFINE_STEPS as f64;
    let best = (0..=2 * REFINE_STEPS)
        .map(|k| q[0] - resolution + k as f64 * fine_step)
        .filter(|&q1| (0.0..=1.0).contains(&q1))
        .map(|q1| filter_objective(eta, &o, q1))
        .fold(coarse, better);
    let (q_star, q) = best.expect("coarse incumbent survives refinement");

    Ok(OracleResult {
        q1_star: q[0],
        q_star,
        q,
        grid_resolution: resolution,
        residuals: residuals_at(e, q, None).to_map(),
    })
}

/// Absolute residuals of the Lagrange-multiplier conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppendixResiduals {
    /// Determinant of the failure Gram matrix with `r q1 = |O12||O13|` and
    /// `theta = alpha`.
    pub determinant: f64,
    /// `q1 q2 - |O12|^2`.
    pub delta_12: f64,
    /// `q1 q3 - |O13|^2`.
    pub delta_13: f64,
    /// `eta1 q1^2 - eta2 |O12|^2 - eta3 |O13|^2`. Zero only for an interior
    /// optimum.
    pub stationarity: f64,
    /// `sqrt(delta_12 delta_13 / (eta2 eta3))`, the magnitude of `1 / lambda`.
    pub inverse_multiplier: f64,
    /// Absent when no regime was supplied.
    pub regime: Option<Regime>,
}

impl AppendixResiduals {
    pub fn to_map(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([
            ("determinant".to_string(), self.determinant),
            ("delta_12".to_string(), self.delta_12),
            ("delta_13".to_string(), self.delta_13),
            ("stationarity".to_string(), self.stationarity),
            ("inverse_multiplier".to_string(), self.inverse_multiplier),
        ])
    }

    /// Largest residual among those that must vanish in the given regime:
    /// all of them for an interior optimum, all but stationarity otherwise.
    pub fn max_required(&self) -> f64 {
        let base = self
            .determinant
            .max(self.delta_12)
            .max(self.delta_13)
            .max(self.inverse_multiplier);
        match self.regime {
            Some(Regime::Povm) | None => base.max(self.stationarity),
            Some(_) => base,
        }
    }
}

fn residuals_at(e: &Ensemble, q: [f64; 3], regime: Option<Regime>) -> AppendixResiduals {
    let eta = e.priors();
    let o = overlaps(e);
    let (m12, m13) = (o.o12.norm(), o.o13.norm());
    let (a12, a13) = (m12 * m12, m13 * m13);
    let [q1, q2, q3] = q;
    let r = if q1 > 0.0 { m12 * m13 / q1 } else { 0.0 };
    // With theta = alpha, cos(theta - alpha) = 1.
    let det = q1 * q2 * q3 - r * r * q1 - a13 * q2 - a12 * q3 + 2.0 * m12 * m13 * r;
    let d12 = q1 * q2 - a12;
    let d13 = q1 * q3 - a13;
    let product = (d12 * d13).abs();
    let inverse_multiplier = if eta[1] * eta[2] > 0.0 {
        (product / (eta[1] * eta[2])).sqrt()
    } else {
        product.sqrt()
    };
    AppendixResiduals {
        determinant: det.abs(),
        delta_12: d12.abs(),
        delta_13: d13.abs(),
        stationarity: (eta[0] * q1 * q1 - eta[1] * a12 - eta[2] * a13).abs(),
        inverse_multiplier,
        regime,
    }
}

pub fn appendix_residuals(e: &Ensemble, sol: &FilterSolution) -> AppendixResiduals {
    residuals_at(e, sol.q, Some(sol.regime))
}

/// Smallest `q3` that keeps the full-discrimination failure Gram matrix
/// positive semidefinite for given `(q1, q2)`, from its vanishing
/// determinant.
fn three_state_q3(o: &OverlapSet, q1: f64, q2: f64) -> Option<f64> {
    let (a12, a13, a23) = (o.a12(), o.a13(), o.o23.norm_sqr());
    let triple = o.triple_product_sum();
    let denom = q1 * q2 - a12;
    let numer = q1 * a23 + q2 * a13 - triple;
    const EPS: f64 = 1e-13;
    let q3 = if denom > EPS {
        numer / denom
    } else if denom >= -EPS && numer.abs() <= EPS {
        // Singular 2x2 block: the determinant vanishes for every q3, so only
        // the remaining diagonal minors bind.
        let need = |a: f64, q: f64| {
            if a == 0.0 {
                Some(0.0)
            } else if q > 0.0 {
                Some(a / q)
            } else {
                None
            }
        };
        need(a13, q1)?.max(need(a23, q2)?)
    } else {
        return None;
    };
    if !(-PSD_TOLERANCE..=1.0 + PSD_TOLERANCE).contains(&q3) {
        return None;
    }
    let q3 = q3.clamp(0.0, 1.0);
    let minors_ok = q1 * q3 - a13 >= -PSD_TOLERANCE && q2 * q3 - a23 >= -PSD_TOLERANCE;
    minors_ok.then_some(q3)
}

fn three_state_objective(eta: [f64; 3], o: &OverlapSet, q1: f64, q2: f64) -> Option<Incumbent> {
    let q3 = three_state_q3(o, q1, q2)?;
    Some((eta[0] * q1 + eta[1] * q2 + eta[2] * q3, [q1, q2, q3]))
}

/// Optimal average failure `Q'` for unambiguous discrimination of all three
/// states, by grid search over `(q1, q2)` with `q3` from the vanishing
/// determinant.
pub fn three_state_q(e: &Ensemble, resolution: f64) -> Result<f64> {
    Ok(three_state_minimizer(e, resolution)?.0)
}

/// As [`three_state_q`], also returning the minimizing `[q1, q2, q3]`.
pub fn three_state_minimizer(e: &Ensemble, resolution: f64) -> Result<Incumbent> {
    check_resolution(resolution, 1e-1)?;
    let min_eig = hermitian_3x3_min_eigenvalue(&e.gram());
    if min_eig <= INDEPENDENCE_TOLERANCE {
        return Err(Error::LinearlyDependent {
            min_eigenvalue: min_eig,
        });
    }
    let eta = e.priors();
    let o = overlaps(e);
    let n = (1.0 / resolution).floor() as usize;
    let axis: Vec<f64> = (0..=n)
        .map(|k| k as f64 * resolution)
        .chain(std::iter::once(1.0))
        .collect();

    let coarse = axis
        .par_iter()
        .map(|&q1| {
            axis.iter()
                .map(|&q2| three_state_objective(eta, &o, q1, q2))
                .fold(None, better)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(None, better)
        .ok_or_else(|| Error::Infeasible("no feasible point in the three-state scan".into()))?;

    let fine_step = resolution / REFINE_STEPS as f64;
    let window = |c: f64| {
        (0..=2 * REFINE_STEPS)
            .map(move |k| c - resolution + k as f64 * fine_step)
            .filter(|v| (0.0..=1.0).contains(v))
    };
    let [c1, c2, _] = coarse.1;
    let refined = window(c1)
        .flat_map(|q1| window(c2).map(move |q2| (q1, q2)))
        .map(|(q1, q2)| three_state_objective(eta, &o, q1, q2))
        .fold(Some(coarse), better);
    Ok(refined.expect("coarse incumbent survives refinement"))
}

/// Optimal failure for two equally likely states: `|O12|`.
pub fn two_state_q(e: &Ensemble) -> f64 {
    overlaps(e).o12.norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// Optimal filtering failure.
    #[serde(rename = "Q")]
    pub q: f64,
    /// Full three-state discrimination failure.
    #[serde(rename = "Q_prime")]
    pub q_prime: f64,
    /// Two-state discrimination failure of `psi_1` against `psi_2`.
    #[serde(rename = "Q_double_prime")]
    pub q_double_prime: f64,
    /// `Q / Q'`, or 1 when `Q' = 0`.
    pub ratio: f64,
}

pub fn compare(e: &Ensemble, resolution: f64) -> Result<Comparison> {
    let q = solve(e)?.average_failure;
    let q_prime = three_state_q(e, resolution)?;
    Ok(Comparison {
        q,
        q_prime,
        q_double_prime: two_state_q(e),
        ratio: if q_prime > 0.0 { q / q_prime } else { 1.0 },
    })
}
