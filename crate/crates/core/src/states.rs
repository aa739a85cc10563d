//! Pure-state algebra for the three-state filtering problem: overlaps, the
//! projector onto `span{psi_2, psi_3}` and the split of `psi_1` into its
//! parallel and perpendicular parts with respect to that span.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec4, C64};

/// Maximum allowed deviation of an input norm from 1 before it is rejected.
pub const NORM_TOLERANCE: f64 = 1e-6;
/// Tolerance on the sum of the priors.
pub const PRIOR_TOLERANCE: f64 = 1e-12;
/// `|O23|` at or above `1 - DEGENERACY_TOLERANCE` means `psi_2` and `psi_3` are parallel.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;

/// A normalized pure state given by its amplitudes in a fixed mode basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
}

impl StateVector {
    /// Builds a state from amplitudes that are already normalized up to
    /// [`NORM_TOLERANCE`]; the small residual is divided out.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized {
                norm,
                tolerance: NORM_TOLERANCE,
            });
        }
        Self::checked(v / C64::from(norm))
    }

    /// Normalizes any nonzero vector.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Self::checked(v / C64::from(norm))
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    fn checked(amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::Dimension {
                expected: ">= 2".into(),
                found: amplitudes.len(),
            });
        }
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Places the state on the first modes of a four-mode register, leaving
    /// mode 4 (the failure mode) empty.
    pub fn embed4(&self) -> Result<Vec4> {
        let n = self.dim();
        if n > 4 || (n == 4 && self.amplitudes[3].norm() > 1e-12) {
            return Err(Error::Dimension {
                expected: "at most 3 occupied modes (mode 4 must be empty)".into(),
                found: n,
            });
        }
        let mut out = Vec4::zeros();
        for k in 0..n.min(3) {
            out[k] = self.amplitudes[k];
        }
        Ok(out)
    }
}

/// Three pure states with their a-priori probabilities. State 1 is the
/// filtering target; states 2 and 3 form the complementary set.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    states: [StateVector; 3],
    priors: [f64; 3],
}

impl Ensemble {
    pub fn new(states: [StateVector; 3], priors: [f64; 3]) -> Result<Self> {
        let dim = states[0].dim();
        for s in &states[1..] {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    first: dim,
                    other: s.dim(),
                });
            }
        }
        for (i, &p) in priors.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return Err(Error::InvalidPriors(format!(
                    "prior {} = {p} is outside [0, 1]",
                    i + 1
                )));
            }
        }
        let sum: f64 = priors.iter().sum();
        if (sum - 1.0).abs() > PRIOR_TOLERANCE {
            return Err(Error::InvalidPriors(format!("priors sum to {sum}")));
        }
        Ok(Self { states, priors })
    }

    pub fn with_equal_priors(states: [StateVector; 3]) -> Result<Self> {
        Self::new(states, [1.0 / 3.0; 3])
    }

    /// Realizes a prescribed Gram matrix with three vectors in three modes
    /// (columns of the upper Cholesky factor). The Gram matrix must be
    /// positive definite with unit diagonal.
    pub fn from_gram(gram: &Mat3, priors: [f64; 3]) -> Result<Self> {
        let chol = nalgebra::Cholesky::new(*gram).ok_or_else(|| {
            Error::Domain("Gram matrix is not positive definite".into())
        })?;
        let upper = chol.l().adjoint();
        let col = |i: usize| StateVector::new(upper.column(i).iter().copied().collect());
        Self::new([col(0)?, col(1)?, col(2)?], priors)
    }

    pub fn states(&self) -> &[StateVector; 3] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &StateVector {
        &self.states[i]
    }

    pub fn priors(&self) -> [f64; 3] {
        self.priors
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// `G_ij = <psi_i|psi_j>`.
    pub fn gram(&self) -> Mat3 {
        Mat3::from_fn(|i, j| self.states[i].inner(&self.states[j]))
    }

    pub fn embedded(&self) -> Result<[Vec4; 3]> {
        Ok([
            self.states[0].embed4()?,
            self.states[1].embed4()?,
            self.states[2].embed4()?,
        ])
    }

    /// The same problem with states (and priors) 2 and 3 exchanged.
    pub fn swap_complement(&self) -> Self {
        let [a, b, c] = self.states.clone();
        let [p, q, r] = self.priors;
        Self {
            states: [a, c, b],
            priors: [p, r, q],
        }
    }
}

/// The three independent pairwise overlaps `O_ij = <psi_i|psi_j>` and the
/// relative phase `alpha = -arg(O12 * conj(O13))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapSet {
    pub o12: C64,
    pub o13: C64,
    pub o23: C64,
    pub alpha: f64,
}

impl OverlapSet {
    pub fn o21(&self) -> C64 {
        self.o12.conj()
    }

    pub fn o31(&self) -> C64 {
        self.o13.conj()
    }

    pub fn o32(&self) -> C64 {
        self.o23.conj()
    }

    /// `|O12|^2`
    pub fn a12(&self) -> f64 {
        self.o12.norm_sqr()
    }

    /// `|O13|^2`
    pub fn a13(&self) -> f64 {
        self.o13.norm_sqr()
    }

    /// Overlap by 0-based indices.
    pub fn get(&self, i: usize, j: usize) -> C64 {
        match (i, j) {
            (0, 1) => self.o12,
            (0, 2) => self.o13,
            (1, 2) => self.o23,
            (1, 0) => self.o21(),
            (2, 0) => self.o31(),
            (2, 1) => self.o32(),
            (i, j) if i == j && i < 3 => C64::new(1.0, 0.0),
            _ => panic!("overlap index ({i}, {j}) out of range"),
        }
    }

    /// `O12 O23 O31 + O13 O32 O21`, i.e. twice the real part of the triple product.
    pub fn triple_product_sum(&self) -> f64 {
        2.0 * (self.o12 * self.o23 * self.o31()).re
    }
}

pub fn overlaps(e: &Ensemble) -> OverlapSet {
    let o12 = e.state(0).inner(e.state(1));
    let o13 = e.state(0).inner(e.state(2));
    let o23 = e.state(1).inner(e.state(2));
    let product = o12 * o13.conj();
    let alpha = if product.norm() == 0.0 { 0.0 } else { -product.arg() };
    OverlapSet {
        o12,
        o13,
        o23,
        alpha,
    }
}

fn check_nondegenerate(o: &OverlapSet) -> Result<()> {
    let m = o.o23.norm();
    if m >= 1.0 - DEGENERACY_TOLERANCE {
        return Err(Error::DegenerateSubspace { overlap: m });
    }
    Ok(())
}

/// `P23 = |psi_2><psi_2| + |t3><t3|` where `t3` is the normalized component of
/// `psi_3` orthogonal to `psi_2`.
pub fn projector_23(e: &Ensemble) -> Result<DMatrix<C64>> {
    let o = overlaps(e);
    check_nondegenerate(&o)?;
    let psi2 = e.state(1).amplitudes();
    let psi3 = e.state(2).amplitudes();
    let scale = 1.0 / (1.0 - o.o23.norm_sqr()).sqrt();
    let t3: DVector<C64> = (psi3 - psi2 * o.o23) * C64::from(scale);
    Ok(psi2 * psi2.adjoint() + &t3 * t3.adjoint())
}

/// The component of `psi_1` inside `span{psi_2, psi_3}`, written directly as a
/// combination of `psi_2` and `psi_3`.
pub fn parallel_component(e: &Ensemble) -> Result<DVector<C64>> {
    let o = overlaps(e);
    check_nondegenerate(&o)?;
    let denom = 1.0 - o.o23.norm_sqr();
    let c2 = (o.o21() - o.o23 * o.o31()) / denom;
    let c3 = (o.o31() - o.o32() * o.o21()) / denom;
    Ok(e.state(1).amplitudes() * c2 + e.state(2).amplitudes() * c3)
}

/// `psi_1 - P23 psi_1`.
pub fn perpendicular_component(e: &Ensemble) -> Result<DVector<C64>> {
    Ok(e.state(0).amplitudes() - parallel_component(e)?)
}

/// `<psi_par|psi_par>`: the weight of `psi_1` in `span{psi_2, psi_3}`, and the
/// smallest failure probability for `psi_1` compatible with unitarity.
pub fn parallel_component_norm2(e: &Ensemble) -> Result<f64> {
    let o = overlaps(e);
    check_nondegenerate(&o)?;
    Ok(parallel_norm2_from_overlaps(&o))
}

pub(crate) fn parallel_norm2_from_overlaps(o: &OverlapSet) -> f64 {
    let num = o.a12() + o.a13() - o.triple_product_sum();
    let w = num / (1.0 - o.o23.norm_sqr());
    w.clamp(0.0, 1.0)
}
