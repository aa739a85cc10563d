//! Construction of an explicit measurement realizing a [`FilterSolution`].
//!
//! Inputs live on modes 1-3 of a four-mode register; mode 4 is the one
//! dimensional failure space. Each output `U [psi_i; 0]` splits into a
//! success part `psi'_i` on modes 1-3 and a failure part
//! `phi_i = sqrt(q_i) exp(i chi_i) e_4`. The success parts are chosen so that
//! `psi'_1` occupies a single mode that `psi'_2, psi'_3` never touch.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::FilterSolution;
use crate::linalg::{
    basis4, fix_global_phase, hermitian_3x3_min_eigenvalue, max_abs_diff, unitarity_residual,
    Mat3, Mat4, Vec4, C64,
};
use crate::states::{overlaps, Ensemble, OverlapSet};

/// 0-based index of the failure mode.
pub const FAILURE_MODE: usize = 3;

/// Default tolerance for Gram-matrix agreement in [`complete_unitary`].
pub const GRAM_TOLERANCE: f64 = 1e-8;

const RANK_TOLERANCE: f64 = 1e-9;

/// Which output modes carry the success vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// `psi'_1` on mode 1, `psi'_2, psi'_3` on modes 2 and 3.
    Primary,
    /// First and second components interchanged: `psi'_1` on mode 2,
    /// `psi'_2, psi'_3` on modes 1 and 3.
    Swapped,
    /// The inputs are already separated by mode and the unitary is the identity.
    PassThrough,
}

impl Placement {
    pub fn target_mode(&self) -> usize {
        match self {
            Placement::Primary | Placement::PassThrough => 0,
            Placement::Swapped => 1,
        }
    }

    pub fn complement_modes(&self) -> [usize; 2] {
        match self {
            Placement::Primary | Placement::PassThrough => [1, 2],
            Placement::Swapped => [0, 2],
        }
    }

    /// What a click on the 0-based output `port` lets us conclude.
    pub fn port_role(&self, port: usize) -> PortRole {
        if port == FAILURE_MODE {
            PortRole::Inconclusive
        } else if port == self.target_mode() {
            PortRole::Target
        } else {
            PortRole::Complement
        }
    }
}

impl std::str::FromStr for Placement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "primary" => Ok(Placement::Primary),
            "swapped" => Ok(Placement::Swapped),
            "pass_through" | "pass-through" => Ok(Placement::PassThrough),
            other => Err(Error::Domain(format!("unknown placement '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PortRole {
    /// The input was `psi_1`.
    Target,
    /// The input was `psi_2` or `psi_3`.
    Complement,
    /// Failure.
    Inconclusive,
}

/// An explicit optimal measurement: the embedded inputs, the success and
/// failure parts of each output and the four-mode unitary `M(4)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementDesign {
    pub placement: Placement,
    pub inputs: [Vec4; 3],
    pub success: [Vec4; 3],
    pub failure: [Vec4; 3],
    pub unitary: Mat4,
    /// Mixing angle of `psi'_2, psi'_3` on their two modes (0 for pass-through).
    pub theta: f64,
    /// Failure-vector phases; `chi[0] = 0`.
    pub chi: [f64; 3],
}

impl MeasurementDesign {
    pub fn outputs(&self) -> [Vec4; 3] {
        [0, 1, 2].map(|i| self.success[i] + self.failure[i])
    }

    pub fn port_role(&self, port: usize) -> PortRole {
        self.placement.port_role(port)
    }

    /// Failure probability of each input as realized by the unitary.
    pub fn failure_probabilities(&self) -> [f64; 3] {
        [0, 1, 2].map(|i| (self.unitary * self.inputs[i])[FAILURE_MODE].norm_sqr())
    }

    /// Checks unitarity, the input/output mapping, the collinear failure
    /// structure and unambiguity of the success vectors.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let fail = |msg: String| Err(Error::InconsistentSolution(msg));
        let residual = unitarity_residual(&self.unitary);
        if residual > tol {
            return Err(Error::NotUnitary { residual });
        }
        let outputs = self.outputs();
        for i in 0..3 {
            let mapped = self.unitary * self.inputs[i];
            let err = max_abs_diff(&mapped, &outputs[i]);
            if err > tol {
                return fail(format!("M(4) maps input {} off its output by {err:e}", i + 1));
            }
            if self.success[i][FAILURE_MODE].norm() > tol {
                return fail(format!("success vector {} leaks into the failure mode", i + 1));
            }
            if (0..FAILURE_MODE).any(|k| self.failure[i][k].norm() > tol) {
                return fail(format!("failure vector {} is not confined to mode 4", i + 1));
            }
        }
        for j in 1..3 {
            let overlap = self.success[0].dotc(&self.success[j]).norm();
            if overlap > tol {
                return fail(format!("<psi'_1|psi'_{}> = {overlap:e}", j + 1));
            }
            let input = self.inputs[0].dotc(&self.inputs[j]);
            let failure = self.failure[0].dotc(&self.failure[j]);
            if (input - failure).norm() > tol {
                return fail(format!(
                    "<phi_1|phi_{}> differs from <psi_1|psi_{}>",
                    j + 1,
                    j + 1
                ));
            }
        }
        let target = self.placement.target_mode();
        for j in 1..3 {
            if self.success[j][target].norm() > tol {
                return fail(format!("psi'_{} reaches the target port", j + 1));
            }
        }
        for k in self.placement.complement_modes() {
            if self.success[0][k].norm() > tol {
                return fail("psi'_1 reaches a complement port".into());
            }
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus agreement of the realized failure
    /// probabilities with `sol`.
    pub fn validate_against(&self, sol: &FilterSolution, tol: f64) -> Result<()> {
        self.validate(tol)?;
        let realized = self.failure_probabilities();
        for i in 0..3 {
            if (realized[i] - sol.q[i]).abs() > tol {
                return Err(Error::InconsistentSolution(format!(
                    "realized q{} = {} but the solution has {}",
                    i + 1,
                    realized[i],
                    sol.q[i]
                )));
            }
        }
        Ok(())
    }
}

/// `chi_1 = 0`, `chi_j = arg(O_1j)`, so that `<phi_1|phi_j> = O_1j`.
pub fn failure_phases(o: &OverlapSet) -> [f64; 3] {
    let arg = |z: C64| if z.norm() == 0.0 { 0.0 } else { z.arg() };
    [0.0, arg(o.o12), arg(o.o13)]
}

pub fn failure_vectors(sol: &FilterSolution, chi: &[f64; 3]) -> [Vec4; 3] {
    [0, 1, 2].map(|i| basis4(FAILURE_MODE) * C64::from_polar(sol.q[i].max(0.0).sqrt(), chi[i]))
}

/// `L_ij = <psi_i|psi_j> - <phi_i|phi_j>`: the Gram matrix the success
/// vectors must realize.
pub fn build_l(e: &Ensemble, sol: &FilterSolution) -> Result<Mat3> {
    let chi = failure_phases(&overlaps(e));
    let gram = e.gram();
    let l = Mat3::from_fn(|i, j| {
        let c = C64::from_polar((sol.q[i] * sol.q[j]).max(0.0).sqrt(), chi[j] - chi[i]);
        gram[(i, j)] - c
    });
    for j in 1..3 {
        if l[(0, j)].norm() > 1e-8 {
            return Err(Error::InconsistentSolution(format!(
                "L_1{} = {:e} should vanish",
                j + 1,
                l[(0, j)].norm()
            )));
        }
    }
    let min_eig = hermitian_3x3_min_eigenvalue(&l);
    if min_eig < -1e-8 {
        return Err(Error::InconsistentSolution(format!(
            "L has negative eigenvalue {min_eig:e}"
        )));
    }
    Ok(l)
}

/// Success vectors for the given placement and their mixing angle `theta`.
///
/// `psi'_1 = sqrt(p1) e_t`; `psi'_2 = sqrt(p2) (cos theta e_a + sin theta e_b)`;
/// `psi'_3 = sqrt(p3) e^{i beta} (cos theta e_a - sin theta e_b)` with
/// `cos 2 theta = |L23| / sqrt(p2 p3)`. `beta = arg(L23)` is only applied when
/// `L23` has a nonzero imaginary part; for real `L23` the signed value enters
/// the arccosine. When `L23 = 0`, `beta = pi`.
pub fn success_vectors(
    l: &Mat3,
    sol: &FilterSolution,
    placement: Placement,
) -> Result<([Vec4; 3], f64)> {
    if placement == Placement::PassThrough {
        return Err(Error::Domain(
            "pass-through success vectors are the inputs themselves".into(),
        ));
    }
    let p = sol.p();
    let target = placement.target_mode();
    let [ma, mb] = placement.complement_modes();
    let l23 = l[(1, 2)];
    let scale = (p[1] * p[2]).sqrt();

    let (ratio, phase) = if scale <= 1e-15 {
        if l23.norm() > 1e-10 {
            return Err(Error::Infeasible(format!(
                "|L23| = {:e} with p2 p3 = 0",
                l23.norm()
            )));
        }
        (0.0, C64::from(1.0))
    } else if l23.norm() <= 1e-12 {
        // Orthogonal success parts: psi'_3 is psi'_2 turned by a quarter.
        (0.0, C64::from(-1.0))
    } else if l23.im.abs() <= 1e-12 {
        (l23.re / scale, C64::from(1.0))
    } else {
        (l23.norm() / scale, l23 / l23.norm())
    };
    if ratio.abs() > 1.0 + 1e-10 {
        return Err(Error::Infeasible(format!(
            "|L23| exceeds sqrt(p2 p3) by {:e}",
            ratio.abs() - 1.0
        )));
    }
    let theta = if scale <= 1e-15 {
        FRAC_PI_4
    } else {
        0.5 * ratio.clamp(-1.0, 1.0).acos()
    };

    let mut v1 = Vec4::zeros();
    v1[target] = C64::from(p[0].sqrt());
    let mut v2 = Vec4::zeros();
    v2[ma] = C64::from(p[1].sqrt() * theta.cos());
    v2[mb] = C64::from(p[1].sqrt() * theta.sin());
    let mut v3 = Vec4::zeros();
    v3[ma] = phase * (p[2].sqrt() * theta.cos());
    v3[mb] = phase * (-p[2].sqrt() * theta.sin());
    Ok(([v1, v2, v3], theta))
}

/// The unitary on four modes that sends each input to the matching output and
/// the orthogonal complement of the inputs onto that of the outputs.
///
/// Completion vectors are taken from the standard basis by largest residual
/// and then rephased so their largest-modulus entry is real and positive.
pub fn complete_unitary(inputs: &[Vec4; 3], outputs: &[Vec4; 3], tol: f64) -> Result<Mat4> {
    for i in 0..3 {
        for j in i..3 {
            let deviation = (inputs[i].dotc(&inputs[j]) - outputs[i].dotc(&outputs[j])).norm();
            if deviation > tol {
                return Err(Error::NoUnitary {
                    i: i + 1,
                    j: j + 1,
                    deviation,
                });
            }
        }
    }

    let mut ins: Vec<Vec4> = Vec::with_capacity(4);
    let mut outs: Vec<Vec4> = Vec::with_capacity(4);
    for i in 0..3 {
        let mut v = inputs[i];
        let mut u = outputs[i];
        // two passes of classical Gram-Schmidt
        for _ in 0..2 {
            for (e, f) in ins.iter().zip(&outs) {
                v -= e * e.dotc(&v);
                u -= f * f.dotc(&u);
            }
        }
        let nv = v.norm();
        let nu = u.norm();
        if nv > RANK_TOLERANCE && nu > RANK_TOLERANCE {
            ins.push(v / C64::from(nv));
            outs.push(u / C64::from(nu));
        } else if (nv - nu).abs() > tol.max(RANK_TOLERANCE) {
            return Err(Error::InconsistentSolution(format!(
                "input and output ranks disagree at vector {}",
                i + 1
            )));
        }
    }
    complete_basis(&mut ins);
    complete_basis(&mut outs);

    let mut m = Mat4::zeros();
    for (e, f) in ins.iter().zip(&outs) {
        m += f * e.adjoint();
    }

    for i in 0..3 {
        let err = max_abs_diff(&(m * inputs[i]), &outputs[i]);
        if err > tol.max(1e-9) {
            return Err(Error::InconsistentSolution(format!(
                "completed unitary misses output {} by {err:e}",
                i + 1
            )));
        }
    }
    Ok(m)
}

fn complete_basis(basis: &mut Vec<Vec4>) {
    while basis.len() < 4 {
        let residual = |k: usize| {
            let mut r = basis4(k);
            for _ in 0..2 {
                for b in basis.iter() {
                    r -= b * b.dotc(&r);
                }
            }
            r
        };
        let mut best = residual(0);
        for k in 1..4 {
            let r = residual(k);
            if r.norm() > best.norm() + 1e-12 {
                best = r;
            }
        }
        let n = best.norm();
        basis.push(fix_global_phase(&(best / C64::from(n))));
    }
}

fn pass_through_applies(inputs: &[Vec4; 3], sol: &FilterSolution) -> bool {
    const EPS: f64 = 1e-12;
    sol.q.iter().all(|&q| q <= EPS)
        && inputs[0][1].norm() <= EPS
        && inputs[0][2].norm() <= EPS
        && inputs[1][0].norm() <= EPS
        && inputs[2][0].norm() <= EPS
}

/// Builds the measurement for `sol`, using [`Placement::PassThrough`] when the
/// inputs already sit on separate ports and [`Placement::Primary`] otherwise.
pub fn design(e: &Ensemble, sol: &FilterSolution) -> Result<MeasurementDesign> {
    let inputs = e.embedded()?;
    let placement = if pass_through_applies(&inputs, sol) {
        Placement::PassThrough
    } else {
        Placement::Primary
    };
    design_with(e, sol, placement)
}

pub fn design_with(
    e: &Ensemble,
    sol: &FilterSolution,
    placement: Placement,
) -> Result<MeasurementDesign> {
    let inputs = e.embedded()?;
    let chi = failure_phases(&overlaps(e));
    let failure = failure_vectors(sol, &chi);

    let (success, theta) = if placement == Placement::PassThrough {
        if !pass_through_applies(&inputs, sol) {
            return Err(Error::Infeasible(
                "inputs are not already separated by port".into(),
            ));
        }
        (inputs, 0.0)
    } else {
        let l = build_l(e, sol)?;
        success_vectors(&l, sol, placement)?
    };

    let outputs = [0, 1, 2].map(|i| success[i] + failure[i]);
    let unitary = complete_unitary(&inputs, &outputs, GRAM_TOLERANCE)?;
    Ok(MeasurementDesign {
        placement,
        inputs,
        success,
        failure,
        unitary,
        theta,
        chi,
    })
}
