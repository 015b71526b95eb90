//! The spin-½ representation: SL(2,C) matrices covering proper
//! orthochronous Lorentz transformations.
//!
//! A Hermitian matrix X = x⁰ 1 + xᵏ σ_k transforms as X ↦ U X U†, which
//! defines the Lorentz matrix Λ(U). Generators: rotations J_k = −(i/2) σ_k,
//! boosts K_k = −(1/2) σ_k, where K_k generates the boost with Λ⁰_k = −1.

use nalgebra::{Complex, Matrix2, Matrix3, Rotation3, UnitQuaternion};

use crate::error::Result;
use crate::lorentz::polar_decompose;
use crate::spacetime::{Mat4, Vec4};

pub type C64 = Complex<f64>;
pub type Mat2 = Matrix2<C64>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// σ₀ = 1, σ₁, σ₂, σ₃.
pub fn pauli() -> [Mat2; 4] {
    [
        Mat2::new(ONE, ZERO, ZERO, ONE),
        Mat2::new(ZERO, ONE, ONE, ZERO),
        Mat2::new(ZERO, -I, I, ZERO),
        Mat2::new(ONE, ZERO, ZERO, -ONE),
    ]
}

pub fn identity() -> Mat2 {
    Mat2::identity()
}

/// Spinor image of a Lorentz-algebra element A (mixed indices A^a_b).
pub fn algebra_to_spinor(a: &Mat4) -> Mat2 {
    let s = pauli();
    let boost = [a[(0, 1)], a[(0, 2)], a[(0, 3)]];
    let rot = [a[(3, 2)], a[(1, 3)], a[(2, 1)]];
    let mut out = Mat2::zeros();
    for k in 0..3 {
        out += s[k + 1] * C64::new(0.5 * boost[k], -0.5 * rot[k]);
    }
    out
}

/// exp(Z) for traceless 2×2 Z, using Z² = −det(Z)·1.
pub fn exp_traceless(z: &Mat2) -> Mat2 {
    let lambda2 = -(z[(0, 0)] * z[(1, 1)] - z[(0, 1)] * z[(1, 0)]);
    let lambda = lambda2.sqrt();
    let (c, s) = if lambda.norm() < 1e-4 {
        // series to O(λ⁸)
        let l2 = lambda2;
        let c = ONE + l2 / 2.0 + l2 * l2 / 24.0 + l2 * l2 * l2 / 720.0;
        let s = ONE + l2 / 6.0 + l2 * l2 / 120.0 + l2 * l2 * l2 / 5040.0;
        (c, s)
    } else {
        (lambda.cosh(), lambda.sinh() / lambda)
    };
    Mat2::identity() * c + z * s
}

/// Λ^ν_μ = ½ Re tr(σ_ν U σ_μ U†).
pub fn to_lorentz(u: &Mat2) -> Mat4 {
    let s = pauli();
    let ud = u.adjoint();
    let mut out = Mat4::zeros();
    for mu in 0..4 {
        let img = u * s[mu] * ud;
        for nu in 0..4 {
            out[(nu, mu)] = 0.5 * (s[nu] * img).trace().re;
        }
    }
    out
}

/// Rotation R_jk = ½ Re tr(σ_j U σ_k U†) of a (nearly) unitary U.
pub fn to_rotation(u: &Mat2) -> Matrix3<f64> {
    to_lorentz(u).fixed_view::<3, 3>(1, 1).into_owned()
}

/// Spinor lift of the standard boost to the unit timelike vector `u`.
pub fn lift_boost(u: &Vec4) -> Mat2 {
    let s = pauli();
    let g = u[0];
    let norm = (2.0 * (g + 1.0)).sqrt();
    (s[0] * C64::from(g + 1.0)
        + s[1] * C64::from(u[1])
        + s[2] * C64::from(u[2])
        + s[3] * C64::from(u[3]))
        / C64::from(norm)
}

/// Spinor lift of a rotation (sign fixed by a non-negative quaternion
/// scalar part).
pub fn lift_rotation(r: &Matrix3<f64>) -> Mat2 {
    let q = UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix_unchecked(*r));
    let q = if q.w < 0.0 {
        -q.into_inner()
    } else {
        q.into_inner()
    };
    let s = pauli();
    s[0] * C64::from(q.w)
        - (s[1] * C64::from(q.i) + s[2] * C64::from(q.j) + s[3] * C64::from(q.k)) * I
}

/// A spinor lift of a proper orthochronous Lorentz matrix (defined up to
/// sign).
pub fn lift_lorentz(lambda: &Mat4) -> Result<Mat2> {
    let (boost, rot) = polar_decompose(lambda)?;
    Ok(lift_boost(&boost.column(0).into_owned()) * lift_rotation(&rot))
}

/// Unitary factor V of the polar decomposition M = V P.
pub fn unitary_part(m: &Mat2) -> Mat2 {
    let p2 = m.adjoint() * m;
    let s = m.determinant().norm();
    let t = (p2.trace().re + 2.0 * s).sqrt();
    let p = (p2 + Mat2::identity() * C64::from(s)) / C64::from(t);
    m * p.try_inverse().expect("invertible spin matrix")
}

/// Rotation angle θ ∈ [0, π] of an SU(2) element, from |tr U| = 2 cos(θ/2).
pub fn rotation_angle(u: &Mat2) -> f64 {
    2.0 * (0.5 * u.trace().norm()).min(1.0).acos()
}
