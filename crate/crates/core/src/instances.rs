//! Named problem instances used by the examples, the CLI sweep and the tests.

use crate::error::{Error, Result};
use crate::linalg::{Mat3, C64};
use crate::states::{Ensemble, StateVector};

const EQUAL: [f64; 3] = [1.0 / 3.0; 3];

/// Equal priors, all pairwise overlaps equal to the real number `s`.
pub fn symmetric(s: f64) -> Result<Ensemble> {
    two_overlap(s, s)
}

/// Equal priors, `O12 = O13 = s1` and `O23 = s2`, all real.
pub fn two_overlap(s1: f64, s2: f64) -> Result<Ensemble> {
    two_overlap_with_priors(s1, s2, EQUAL)
}

pub fn two_overlap_with_priors(s1: f64, s2: f64, priors: [f64; 3]) -> Result<Ensemble> {
    if !(0.0..1.0).contains(&s1) || !(0.0..1.0).contains(&s2) {
        return Err(Error::Domain(format!(
            "overlaps must lie in [0, 1), got s1 = {s1}, s2 = {s2}"
        )));
    }
    let c = |x: f64| C64::new(x, 0.0);
    let gram = Mat3::new(
        c(1.0),
        c(s1),
        c(s1),
        c(s1),
        c(1.0),
        c(s2),
        c(s1),
        c(s2),
        c(1.0),
    );
    Ensemble::from_gram(&gram, priors)
}

/// The three-mode input states of the first optical example: all overlaps
/// equal `s`, with `psi_2` and `psi_3` mirror images in mode 3.
pub fn worked_example_one(s: f64) -> Result<Ensemble> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("s must lie in (0, 1), got {s}")));
    }
    let a = ((1.0 + 2.0 * s) / 3.0).sqrt();
    let b = (1.0 - s).sqrt();
    let psi1 = StateVector::from_real(&[a, (2.0f64 / 3.0).sqrt() * b, 0.0])?;
    let psi2 = StateVector::from_real(&[a, -b / 6f64.sqrt(), b / 2f64.sqrt()])?;
    let psi3 = StateVector::from_real(&[a, -b / 6f64.sqrt(), -b / 2f64.sqrt()])?;
    Ensemble::new([psi1, psi2, psi3], EQUAL)
}

/// The second optical example, realized by two 50-50 beam splitters.
pub fn worked_example_two() -> Ensemble {
    let r = (1.0f64 / 3.0).sqrt();
    let t = (2.0f64 / 3.0).sqrt();
    let psi1 = StateVector::from_real(&[t, 0.0, r]).unwrap();
    let psi2 = StateVector::from_real(&[0.0, r, t]).unwrap();
    let psi3 = StateVector::from_real(&[0.0, -r, t]).unwrap();
    Ensemble::new([psi1, psi2, psi3], EQUAL).unwrap()
}

/// `e1, e2, e3` with equal priors.
pub fn orthogonal_triple() -> Ensemble {
    let e = |k: usize| {
        let mut v = [0.0; 3];
        v[k] = 1.0;
        StateVector::from_real(&v).unwrap()
    };
    Ensemble::new([e(0), e(1), e(2)], EQUAL).unwrap()
}
