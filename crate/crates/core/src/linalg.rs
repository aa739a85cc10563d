//! Small fixed-size complex linear algebra helpers shared by the modules.
//!
//! Inner products are conjugate-linear in the first argument throughout:
//! `inner(a, b) = sum_k conj(a_k) * b_k`.

use nalgebra::{Matrix3, Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Vec4 = Vector4<C64>;
pub type Mat3 = Matrix3<C64>;
pub type Mat4 = Matrix4<C64>;

#[cfg(test)]
pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff<R, C, S1, S2>(
    a: &nalgebra::Matrix<C64, R, C, S1>,
    b: &nalgebra::Matrix<C64, R, C, S2>,
) -> f64
where
    R: nalgebra::Dim,
    C: nalgebra::Dim,
    S1: nalgebra::RawStorage<C64, R, C>,
    S2: nalgebra::RawStorage<C64, R, C>,
{
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `max |M^dagger M - I|` entrywise.
pub fn unitarity_residual(m: &Mat4) -> f64 {
    max_abs_diff(&(m.adjoint() * m), &Mat4::identity())
}

/// Smallest eigenvalue of the Hermitian matrix `[[a, b], [conj(b), d]]`.
pub fn hermitian_2x2_min_eigenvalue(a: f64, d: f64, b: C64) -> f64 {
    let mean = 0.5 * (a + d);
    let half_gap = 0.5 * (a - d);
    mean - (half_gap * half_gap + b.norm_sqr()).sqrt()
}

/// Smallest eigenvalue of a Hermitian 3x3 matrix (only the lower triangle is read).
pub fn hermitian_3x3_min_eigenvalue(m: &Mat3) -> f64 {
    SymmetricEigen::new(*m).eigenvalues.min()
}

/// Multiplies `v` by a global phase so that its largest-modulus entry is real and positive.
/// Ties go to the lowest index.
pub fn fix_global_phase(v: &Vec4) -> Vec4 {
    let mut best = 0;
    for k in 1..4 {
        if v[k].norm() > v[best].norm() + 1e-12 {
            best = k;
        }
    }
    let pivot = v[best];
    if pivot.norm() == 0.0 {
        return *v;
    }
    v * (pivot.conj() / pivot.norm())
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(phi: f64) -> f64 {
    use std::f64::consts::PI;
    let mut x = phi.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}

pub(crate) fn basis4(k: usize) -> Vec4 {
    let mut v = Vec4::zeros();
    v[k] = ONE;
    v
}
