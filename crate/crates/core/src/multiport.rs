//! Triangular factorization of a four-mode unitary into two-mode beam
//! splitters with input phase shifters, and the inverse recomposition.
//!
//! A layer `T_{p,q}(t, r, phi)` acts on modes `p < q` (1-based) as
//!
//! ```text
//! [ t   r ] [ 1      0     ]   [ t    r e^{i phi} ]
//! [ -r  t ] [ 0  e^{i phi} ] = [ -r   t e^{i phi} ]
//! ```
//!
//! i.e. a real beam splitter preceded by a phase shifter on input `q`. With
//! `phi = 0` this is the plain identity-with-replaced-entries matrix.
//!
//! Layers are stored in matrix-product order: a program with layers
//! `[L0, L1, L2]` and output phases `d` stands for `diag(e^{i d}) L0 L1 L2`,
//! so `L2` is the first element the light meets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_abs_diff, unitarity_residual, wrap_angle, Mat4, C64};

pub const MODES: usize = 4;

/// Input unitarity tolerance for [`decompose`].
pub const UNITARITY_TOLERANCE: f64 = 1e-9;

/// Layers with `|r|` below this are identities and are never emitted.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// Phases smaller than this are reported as zero.
const PHASE_SNAP: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterLayer {
    /// 1-based first mode.
    pub p: usize,
    /// 1-based second mode, `p < q`.
    pub q: usize,
    /// Transmissivity.
    pub t: f64,
    /// Reflectivity, `t^2 + r^2 = 1`.
    pub r: f64,
    /// Input phase on mode `q`, radians.
    pub phi: f64,
}

impl BeamSplitterLayer {
    pub fn new(p: usize, q: usize, t: f64, r: f64, phi: f64) -> Result<Self> {
        let layer = Self { p, q, t, r, phi };
        layer.validate()?;
        Ok(layer)
    }

    /// A layer with `t = sin(omega)`, `r = cos(omega)`.
    pub fn from_angle(p: usize, q: usize, omega: f64, phi: f64) -> Result<Self> {
        Self::new(p, q, omega.sin(), omega.cos(), phi)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1 <= self.p && self.p < self.q && self.q <= MODES) {
            return Err(Error::Domain(format!(
                "mode pair ({}, {}) must satisfy 1 <= p < q <= {MODES}",
                self.p, self.q
            )));
        }
        let norm = self.t * self.t + self.r * self.r;
        if (norm - 1.0).abs() > 1e-12 || !self.phi.is_finite() {
            return Err(Error::Domain(format!(
                "layer ({}, {}) has t^2 + r^2 = {norm}",
                self.p, self.q
            )));
        }
        Ok(())
    }

    pub fn is_balanced(&self, tol: f64) -> bool {
        (self.t.abs() - std::f64::consts::FRAC_1_SQRT_2).abs() <= tol
            && (self.r.abs() - std::f64::consts::FRAC_1_SQRT_2).abs() <= tol
    }
}

/// The 4x4 matrix of a single layer.
pub fn embed_layer(l: &BeamSplitterLayer) -> Mat4 {
    let (p, q) = (l.p - 1, l.q - 1);
    let phase = C64::from_polar(1.0, l.phi);
    let mut m = Mat4::identity();
    m[(p, p)] = C64::from(l.t);
    m[(p, q)] = phase * l.r;
    m[(q, p)] = C64::from(-l.r);
    m[(q, q)] = phase * l.t;
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshProgram {
    pub layers: Vec<BeamSplitterLayer>,
    /// Phase applied at each output port, radians.
    pub output_phases: [f64; 4],
}

impl MeshProgram {
    pub fn identity() -> Self {
        Self {
            layers: Vec::new(),
            output_phases: [0.0; 4],
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.layers.iter().try_for_each(BeamSplitterLayer::validate)?;
        if self.output_phases.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("non-finite output phase".into()));
        }
        Ok(())
    }
}

/// `diag(e^{i d}) * L0 * L1 * ...`.
pub fn recompose(m: &MeshProgram) -> Mat4 {
    let mut u = Mat4::from_diagonal(&nalgebra::Vector4::from_fn(|k, _| {
        C64::from_polar(1.0, m.output_phases[k])
    }));
    for layer in &m.layers {
        u *= embed_layer(layer);
    }
    u
}

/// Factorizes a unitary into at most six layers.
///
/// Works on `V = U` by column operations `V <- V T^{-1}`, nulling the last
/// row from the left, then the third row, then the second. What remains is
/// diagonal and becomes the output phase screen.
pub fn decompose(u: &Mat4) -> Result<MeshProgram> {
    let residual = unitarity_residual(u);
    if residual > UNITARITY_TOLERANCE {
        return Err(Error::NotUnitary { residual });
    }
    let mut v = *u;
    let mut applied = Vec::new();
    for row in (1..MODES).rev() {
        for col in 0..row {
            if let Some(layer) = nulling_layer(&v, row, col) {
                v *= layer_inverse(&layer);
                applied.push(layer);
            }
        }
    }
    applied.reverse();
    let output_phases = [0, 1, 2, 3].map(|k| snap_phase(v[(k, k)].arg()));
    Ok(MeshProgram {
        layers: applied,
        output_phases,
    })
}

/// Layer on modes `(col, row)` whose inverse, applied on the right, zeroes
/// `v[(row, col)]` using `v[(row, row)]`.
fn nulling_layer(v: &Mat4, row: usize, col: usize) -> Option<BeamSplitterLayer> {
    let a = v[(row, col)];
    let b = v[(row, row)];
    if a.norm() < IDENTITY_TOLERANCE {
        return None;
    }
    let n = a.norm().hypot(b.norm());
    let phi = snap_phase(b.arg() - a.arg());
    Some(BeamSplitterLayer {
        p: col + 1,
        q: row + 1,
        t: b.norm() / n,
        r: -a.norm() / n,
        phi,
    })
}

/// Wraps to `(-pi, pi]` and flushes rounding noise to exactly zero.
fn snap_phase(phi: f64) -> f64 {
    let phi = wrap_angle(phi);
    if phi.abs() < PHASE_SNAP {
        0.0
    } else {
        phi
    }
}

fn layer_inverse(l: &BeamSplitterLayer) -> Mat4 {
    embed_layer(l).adjoint()
}

/// Largest entrywise deviation between `recompose(m)` and `u`.
pub fn recomposition_error(m: &MeshProgram, u: &Mat4) -> f64 {
    max_abs_diff(&recompose(m), u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designer::design;
    use crate::filter::solve;
    use crate::instances;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn real_mat(rows: [[f64; 4]; 4]) -> Mat4 {
        Mat4::from_fn(|i, j| re(rows[i][j]))
    }

    /// The three layers printed for the first optical example.
    fn first_example_layers(s: f64) -> Vec<BeamSplitterLayer> {
        let a = ((1.0 - s) * (1.0 + 2.0 * s)).sqrt();
        let b = (1.0 - s * SQRT_2).sqrt();
        let c = (1.0 + s - s * SQRT_2).sqrt();
        let k = (s * SQRT_2).sqrt();
        vec![
            BeamSplitterLayer::new(2, 4, b, -k, 0.0).unwrap(),
            BeamSplitterLayer::new(1, 4, c / a, -k * b / a, 0.0).unwrap(),
            BeamSplitterLayer::new(
                1,
                2,
                (2.0 * (1.0 - s) / 3.0).sqrt(),
                -((1.0 + 2.0 * s) / 3.0).sqrt(),
                0.0,
            )
            .unwrap(),
        ]
    }

    /// The printed closed-form M(4) of the first optical example.
    fn first_example_matrix(s: f64) -> Mat4 {
        let a = ((1.0 - s) * (1.0 + 2.0 * s)).sqrt();
        let b = (1.0 - s * SQRT_2).sqrt();
        let c = (1.0 + s - s * SQRT_2).sqrt();
        let k = (s * SQRT_2).sqrt();
        let p = (1.0 + 2.0 * s).sqrt();
        let m = (1.0 - s).sqrt();
        real_mat([
            [(2.0f64 / 3.0).sqrt() * c / p, -c / (3.0 * (1.0 - s)).sqrt(), 0.0, -b / a * k],
            [b / (3.0 * (1.0 + 2.0 * s)).sqrt(), (2.0f64 / 3.0).sqrt() * b / m, 0.0, -c / a * k],
            [0.0, 0.0, 1.0, 0.0],
            [
                (SQRT_2 + 1.0) * k / (3.0 * (1.0 + 2.0 * s)).sqrt(),
                (SQRT_2 - 1.0) * k / (3.0 * (1.0 - s)).sqrt(),
                0.0,
                b * c / a,
            ],
        ])
    }

    fn second_example_matrix() -> Mat4 {
        let h = FRAC_1_SQRT_2;
        real_mat([
            [h, 0.0, 0.0, -h],
            [0.0, 1.0, 0.0, 0.0],
            [-0.5, 0.0, h, -0.5],
            [0.5, 0.0, h, 0.5],
        ])
    }

    #[test]
    fn trivial_layer_is_identity() {
        let l = BeamSplitterLayer::new(1, 3, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(embed_layer(&l), Mat4::identity());
    }

    #[test]
    fn layer_validation() {
        assert!(BeamSplitterLayer::new(2, 2, 1.0, 0.0, 0.0).is_err());
        assert!(BeamSplitterLayer::new(1, 5, 1.0, 0.0, 0.0).is_err());
        assert!(BeamSplitterLayer::new(1, 2, 0.9, 0.9, 0.0).is_err());
        let l = BeamSplitterLayer::from_angle(1, 2, 0.3, 1.0).unwrap();
        assert!(unitarity_residual(&embed_layer(&l)) < 1e-15);
    }

    #[test]
    fn printed_balanced_splitters_compose_second_example() {
        let h = FRAC_1_SQRT_2;
        let t14 = BeamSplitterLayer::new(1, 4, h, -h, 0.0).unwrap();
        let t34 = BeamSplitterLayer::new(3, 4, h, -h, 0.0).unwrap();
        let m14 = embed_layer(&t14);
        assert!(max_abs_diff(
            &m14,
            &real_mat([[h, 0.0, 0.0, -h], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [h, 0.0, 0.0, h]])
        ) < 1e-15);
        let program = MeshProgram {
            layers: vec![t34, t14],
            output_phases: [0.0; 4],
        };
        assert!(recomposition_error(&program, &second_example_matrix()) < 1e-15);
    }

    #[test]
    fn t12_factor_of_first_example() {
        let s: f64 = 0.5;
        let l = first_example_layers(s)[2];
        let m = embed_layer(&l);
        let t = (2.0 * (1.0 - s) / 3.0).sqrt();
        let r = -((1.0 + 2.0 * s) / 3.0).sqrt();
        assert!((m[(0, 0)] - re(t)).norm() < 1e-15);
        assert!((m[(0, 1)] - re(r)).norm() < 1e-15);
        assert!((m[(1, 0)] - re(-r)).norm() < 1e-15);
        assert!((m[(1, 1)] - re(t)).norm() < 1e-15);
    }

    #[test]
    fn printed_three_layer_program_reproduces_first_example() {
        for s in [0.3, 0.5] {
            let program = MeshProgram {
                layers: first_example_layers(s),
                output_phases: [0.0; 4],
            };
            assert!(recomposition_error(&program, &first_example_matrix(s)) < 1e-10);
        }
    }

    #[test]
    fn identity_decomposes_to_empty_program() {
        let program = decompose(&Mat4::identity()).unwrap();
        assert!(program.layers.is_empty());
        assert_eq!(recompose(&MeshProgram::identity()), Mat4::identity());
    }

    #[test]
    fn second_example_decomposes_into_two_balanced_layers() {
        for u in [second_example_matrix(), {
            let e = instances::worked_example_two();
            design(&e, &solve(&e).unwrap()).unwrap().unitary
        }] {
            let program = decompose(&u).unwrap();
            let pairs: Vec<_> = program.layers.iter().map(|l| (l.p, l.q)).collect();
            assert_eq!(pairs, vec![(3, 4), (1, 4)]);
            assert!(program.layers.iter().all(|l| l.is_balanced(1e-12)));
            assert!(recomposition_error(&program, &u) < 1e-12);
        }
    }

    #[test]
    fn first_example_round_trip() {
        for s in [0.3, 0.5] {
            let u = first_example_matrix(s);
            let program = decompose(&u).unwrap();
            assert!(program.layers.len() <= 6);
            assert!(recomposition_error(&program, &u) < 1e-10);
        }
    }

    #[test]
    fn rejects_non_unitary() {
        let mut u = Mat4::identity();
        u[(0, 1)] = re(0.1);
        assert!(matches!(decompose(&u), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn real_orthogonal_gives_real_phases() {
        let program = decompose(&first_example_matrix(0.4)).unwrap();
        for l in &program.layers {
            let phi = l.phi.abs();
            assert!(phi < 1e-9 || (phi - std::f64::consts::PI).abs() < 1e-9, "phi = {}", l.phi);
        }
    }
}
