//! Closed-form optimal unambiguous filtering of `psi_1` against `{psi_2, psi_3}`.
//!
//! Unitarity forces the failure vectors to be collinear, which ties the
//! failure probabilities together through `q1 q2 = |O12|^2` and
//! `q1 q3 = |O13|^2`. The average failure is then
//! `Q(q1) = eta1 q1 + A / q1` with `A = eta2 |O12|^2 + eta3 |O13|^2`,
//! minimized over the feasible interval `[w, 1]` where `w` is the squared
//! norm of the projection of `psi_1` onto `span{psi_2, psi_3}`. The three
//! regimes correspond to the unconstrained minimizer `sqrt(A / eta1)` lying
//! inside the interval, above it, or below it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat3, C64};
use crate::states::{overlaps, parallel_norm2_from_overlaps, Ensemble, OverlapSet, DEGENERACY_TOLERANCE};

/// Boundary ties within this tolerance resolve to [`Regime::Povm`].
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// Intermediate average overlap: a generalized measurement is optimal.
    #[serde(rename = "POVM")]
    Povm,
    /// `A >= eta1`: project onto `psi_1` and its complement.
    #[serde(rename = "VN_LARGE_OVERLAP")]
    VnLargeOverlap,
    /// `A <= eta1 w^2`: project onto the parallel part of `psi_1`.
    #[serde(rename = "VN_SMALL_OVERLAP")]
    VnSmallOverlap,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Povm => "POVM",
            Regime::VnLargeOverlap => "VN_LARGE_OVERLAP",
            Regime::VnSmallOverlap => "VN_SMALL_OVERLAP",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Optimal failure probabilities for the filtering problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSolution {
    /// Failure probability for each input state.
    pub q: [f64; 3],
    /// Prior-weighted average failure probability `Q`.
    pub average_failure: f64,
    pub regime: Regime,
    /// `A = eta2 |O12|^2 + eta3 |O13|^2`.
    pub average_overlap: f64,
    /// Weight of `psi_1` in `span{psi_2, psi_3}`; the lower bound on `q1`.
    pub parallel_norm2: f64,
}

impl FilterSolution {
    pub fn success_probability(&self) -> f64 {
        1.0 - self.average_failure
    }

    pub fn p(&self) -> [f64; 3] {
        self.q.map(|q| (1.0 - q).max(0.0))
    }
}

pub fn average_overlap(e: &Ensemble) -> f64 {
    average_overlap_from(&overlaps(e), e.priors())
}

fn average_overlap_from(o: &OverlapSet, priors: [f64; 3]) -> f64 {
    priors[1] * o.a12() + priors[2] * o.a13()
}

/// Lower bound on `q1`. When `psi_2` and `psi_3` are parallel their span is
/// the line through `psi_2` and the bound degenerates to `|O12|^2`.
pub(crate) fn q1_lower_bound(o: &OverlapSet) -> f64 {
    let floor = o.a12().max(o.a13());
    if o.o23.norm() >= 1.0 - DEGENERACY_TOLERANCE {
        floor.min(1.0)
    } else {
        parallel_norm2_from_overlaps(o).max(floor).min(1.0)
    }
}

fn regime_of(a: f64, eta1: f64, w: f64) -> Regime {
    if a > eta1 + TIE_TOLERANCE {
        Regime::VnLargeOverlap
    } else if a < eta1 * w * w - TIE_TOLERANCE {
        Regime::VnSmallOverlap
    } else {
        Regime::Povm
    }
}

pub fn classify_regime(e: &Ensemble) -> Result<Regime> {
    let eta1 = e.priors()[0];
    if eta1 == 0.0 {
        return Err(Error::DegeneratePrior);
    }
    let o = overlaps(e);
    Ok(regime_of(
        average_overlap_from(&o, e.priors()),
        eta1,
        q1_lower_bound(&o),
    ))
}

/// Optimal failure probabilities and regime.
///
/// States 2 and 3 are ordered internally by decreasing `|O1j|`; the result is
/// reported in the caller's order.
pub fn solve(e: &Ensemble) -> Result<FilterSolution> {
    let eta = e.priors();
    if eta[0] == 0.0 {
        return Err(Error::DegeneratePrior);
    }
    let o = overlaps(e);
    if o.a13() > o.a12() {
        let mut sol = solve_ordered(&e.swap_complement())?;
        sol.q.swap(1, 2);
        return Ok(sol);
    }
    solve_ordered(e)
}

fn solve_ordered(e: &Ensemble) -> Result<FilterSolution> {
    let eta = e.priors();
    let o = overlaps(e);
    let a = average_overlap_from(&o, eta);
    let w = q1_lower_bound(&o);
    let regime = regime_of(a, eta[0], w);

    let q1 = match regime {
        Regime::Povm => (a / eta[0]).sqrt().clamp(w, 1.0),
        Regime::VnLargeOverlap => 1.0,
        Regime::VnSmallOverlap => w,
    };
    let partner = |overlap2: f64| -> Result<f64> {
        if overlap2 == 0.0 {
            Ok(0.0)
        } else if q1 > 0.0 {
            Ok((overlap2 / q1).min(1.0))
        } else {
            Err(Error::InconsistentSolution(format!(
                "q1 = 0 with nonzero overlap {overlap2}"
            )))
        }
    };
    let q = [q1, partner(o.a12())?, partner(o.a13())?];
    let average_failure = eta.iter().zip(q).map(|(n, q)| n * q).sum();
    Ok(FilterSolution {
        q,
        average_failure,
        regime,
        average_overlap: a,
        parallel_norm2: w,
    })
}

/// Gram matrix that the success vectors must realize for a given `q1`:
/// `M_jk = O_jk - sqrt(q_j q_k) exp(i(chi_k - chi_j))` with `q2, q3` tied to
/// `q1`. The optimal `q1` is feasible iff this matrix is positive semidefinite.
pub fn m_matrix(e: &Ensemble, q1: f64) -> Result<Mat3> {
    if !(q1 > 0.0) || q1 > 1.0 + TIE_TOLERANCE {
        return Err(Error::Domain(format!("q1 must lie in (0, 1], got {q1}")));
    }
    let o = overlaps(e);
    let c = |x: f64| C64::new(x, 0.0);
    let m23 = o.o23 - o.o21() * o.o13 / q1;
    Ok(Mat3::new(
        c(1.0 - q1),
        c(0.0),
        c(0.0),
        c(0.0),
        c(1.0 - o.a12() / q1),
        m23,
        c(0.0),
        m23.conj(),
        c(1.0 - o.a13() / q1),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::linalg::hermitian_3x3_min_eigenvalue;
    use crate::states::StateVector;
    use std::f64::consts::SQRT_2;

    #[test]
    fn average_overlap_examples() {
        let a = average_overlap(&instances::symmetric(0.5).unwrap());
        assert!((a - 1.0 / 6.0).abs() < 1e-12);
        assert_eq!(average_overlap(&instances::orthogonal_triple()), 0.0);
        let a = average_overlap(&instances::worked_example_two());
        assert!((a - 4.0 / 27.0).abs() < 1e-12);
    }

    #[test]
    fn regime_examples() {
        let r = |e: &Ensemble| classify_regime(e).unwrap();
        assert_eq!(r(&instances::symmetric(0.5).unwrap()), Regime::Povm);
        assert_eq!(r(&instances::symmetric(0.9).unwrap()), Regime::VnLargeOverlap);
        let e = instances::two_overlap_with_priors(0.1, 0.0, [0.98, 0.01, 0.01]).unwrap();
        // A = 0.0002, w = 0.02, eta1 w^2 = 0.000392
        assert_eq!(r(&e), Regime::VnSmallOverlap);
    }

    #[test]
    fn zero_target_prior_is_rejected() {
        let e = instances::two_overlap_with_priors(0.3, 0.2, [0.0, 0.5, 0.5]).unwrap();
        assert_eq!(classify_regime(&e), Err(Error::DegeneratePrior));
        assert_eq!(solve(&e), Err(Error::DegeneratePrior));
    }

    #[test]
    fn symmetric_povm_branch() {
        for s in [0.1, 0.3, 0.5, 0.7] {
            let sol = solve(&instances::symmetric(s).unwrap()).unwrap();
            assert_eq!(sol.regime, Regime::Povm);
            assert!((sol.q[0] - SQRT_2 * s).abs() < 1e-12);
            assert!((sol.q[1] - s / SQRT_2).abs() < 1e-12);
            assert!((sol.q[2] - s / SQRT_2).abs() < 1e-12);
            assert!((sol.average_failure - 2.0 * SQRT_2 / 3.0 * s).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_large_overlap_branch() {
        let sol = solve(&instances::symmetric(0.9).unwrap()).unwrap();
        assert_eq!(sol.q[0], 1.0);
        assert!((sol.q[1] - 0.81).abs() < 1e-12);
        assert!((sol.q[2] - 0.81).abs() < 1e-12);
        assert!((sol.average_failure - (1.0 / 3.0 + 2.0 * 0.81 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn second_example_solution() {
        let sol = solve(&instances::worked_example_two()).unwrap();
        assert!((sol.q[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((sol.q[1] - 1.0 / 3.0).abs() < 1e-12);
        assert!((sol.q[2] - 1.0 / 3.0).abs() < 1e-12);
        assert!((sol.average_failure - 4.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_triple_is_perfectly_filterable() {
        let sol = solve(&instances::orthogonal_triple()).unwrap();
        assert_eq!(sol.q, [0.0; 3]);
        assert_eq!(sol.average_failure, 0.0);
    }

    #[test]
    fn vanishing_complement_priors_fall_to_parallel_bound() {
        let e = instances::two_overlap_with_priors(0.4, 0.1, [1.0, 0.0, 0.0]).unwrap();
        let sol = solve(&e).unwrap();
        assert_eq!(sol.regime, Regime::VnSmallOverlap);
        assert!((sol.q[0] - sol.parallel_norm2).abs() < 1e-15);
        assert!((sol.average_failure - sol.parallel_norm2).abs() < 1e-15);
    }

    #[test]
    fn parallel_complement_pair_uses_line_projection() {
        let psi1 = StateVector::from_real(&[0.6, 0.8, 0.0]).unwrap();
        let psi2 = StateVector::from_real(&[0.0, 1.0, 0.0]).unwrap();
        let e = Ensemble::with_equal_priors([psi1, psi2.clone(), psi2]).unwrap();
        let sol = solve(&e).unwrap();
        assert!((sol.parallel_norm2 - 0.64).abs() < 1e-12);
        // A = 2/3 * 0.64 > eta1
        assert_eq!(sol.regime, Regime::VnLargeOverlap);
        assert_eq!(sol.q[0], 1.0);
        assert!(sol.q.iter().all(|q| (0.0..=1.0).contains(q)));
    }

    #[test]
    fn m_matrix_orthogonal() {
        let m = m_matrix(&instances::orthogonal_triple(), 0.5).unwrap();
        let expected = Mat3::from_diagonal(&nalgebra::Vector3::new(
            C64::from(0.5),
            C64::from(1.0),
            C64::from(1.0),
        ));
        assert!((m - expected).norm() < 1e-15);
    }

    #[test]
    fn m_matrix_submatrix_singular_at_bound() {
        for s in [0.2, 0.5, 0.8] {
            let e = instances::symmetric(s).unwrap();
            let w = 2.0 * s * s / (1.0 + s);
            let m = m_matrix(&e, w).unwrap();
            let det = (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)]).re;
            assert!(det.abs() < 1e-10, "s = {s}: det = {det}");
        }
    }

    #[test]
    fn m_matrix_rejects_nonpositive_q1() {
        let e = instances::symmetric(0.5).unwrap();
        assert!(matches!(m_matrix(&e, 0.0), Err(Error::Domain(_))));
        assert!(matches!(m_matrix(&e, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn m_matrix_psd_at_optimum_for_examples() {
        for e in [
            instances::symmetric(0.5).unwrap(),
            instances::symmetric(0.9).unwrap(),
            instances::worked_example_two(),
        ] {
            let sol = solve(&e).unwrap();
            let m = m_matrix(&e, sol.q[0]).unwrap();
            assert!(hermitian_3x3_min_eigenvalue(&m) >= -1e-10);
        }
    }
}
