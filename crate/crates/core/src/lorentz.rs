//! Lorentz matrices acting on frame components: boosts, polar
//! decomposition, and the rotation that acts on rest-frame spin.

use nalgebra::{Matrix3, Rotation3, Vector3};

use crate::error::{Error, Result};
use crate::frame::Tetrad;
use crate::spacetime::{eta, Mat4, Spacetime, Tangent, Vec4};

/// A Lorentz transformation between the component spaces of two tetrads:
/// components in `source` map to components in `target`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzMap {
    pub matrix: Mat4,
    pub source: Tetrad,
    pub target: Tetrad,
}

impl LorentzMap {
    /// max |Λᵀ η Λ − η|.
    pub fn lorentz_defect(&self) -> f64 {
        lorentz_defect(&self.matrix)
    }
}

pub fn lorentz_defect(m: &Mat4) -> f64 {
    (m.transpose() * eta() * m - eta()).amax()
}

/// Pure boost taking (1,0,0,0) to the unit timelike vector `u` (frame
/// components), with no rotation.
pub fn standard_boost(u: &Vec4) -> Mat4 {
    let gamma = u[0];
    let mut l = Mat4::identity();
    l[(0, 0)] = gamma;
    for i in 1..4 {
        l[(0, i)] = u[i];
        l[(i, 0)] = u[i];
        for j in 1..4 {
            l[(i, j)] += u[i] * u[j] / (1.0 + gamma);
        }
    }
    l
}

pub fn inverse_standard_boost(u: &Vec4) -> Mat4 {
    standard_boost(&Vec4::new(u[0], -u[1], -u[2], -u[3]))
}

pub fn embed_rotation(r: &Matrix3<f64>) -> Mat4 {
    let mut m = Mat4::identity();
    m.fixed_view_mut::<3, 3>(1, 1).copy_from(r);
    m
}

/// Λ = B·R with B a pure boost and R a spatial rotation.
pub fn polar_decompose(lambda: &Mat4) -> Result<(Mat4, Matrix3<f64>)> {
    if lambda[(0, 0)] <= 0.0 {
        return Err(Error::NonOrthochronous(lambda[(0, 0)]));
    }
    let image = lambda.column(0).into_owned();
    let boost = standard_boost(&image);
    let rest = inverse_standard_boost(&image) * lambda;
    Ok((boost, rest.fixed_view::<3, 3>(1, 1).into_owned()))
}

/// Rotation acting on rest-frame spin: the rotational part of
/// L(u₂)⁻¹ Λ L(u₁), where L(u) is the standard boost to the rest frame of a
/// particle with four-velocity u.
pub fn wigner_rotation(
    st: &Spacetime,
    map: &LorentzMap,
    u1: &Tangent,
    u2: &Tangent,
) -> Result<Matrix3<f64>> {
    if map.matrix[(0, 0)] <= 0.0 {
        return Err(Error::NonOrthochronous(map.matrix[(0, 0)]));
    }
    let c1 = unit_timelike(map.source.components_of(st, u1)?)?;
    let c2 = unit_timelike(map.target.components_of(st, u2)?)?;
    let x = inverse_standard_boost(&c2) * map.matrix * standard_boost(&c1);
    Ok(polar_decompose(&x)?.1)
}

pub(crate) fn unit_timelike(c: Vec4) -> Result<Vec4> {
    let n = -(c[0] * c[0]) + c[1] * c[1] + c[2] * c[2] + c[3] * c[3];
    if n >= 0.0 || c[0] <= 0.0 {
        return Err(Error::usage("velocity must be future-directed timelike"));
    }
    Ok(c / (-n).sqrt())
}

/// Rotation angle in [0, π] and unit axis (zero axis for the identity).
pub fn axis_angle(r: &Matrix3<f64>) -> (Vector3<f64>, f64) {
    match Rotation3::from_matrix_unchecked(*r).axis_angle() {
        Some((axis, angle)) => (axis.into_inner(), angle),
        None => (Vector3::zeros(), 0.0),
    }
}

pub fn rotation_angle(r: &Matrix3<f64>) -> f64 {
    ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{gauge_frame, Gauge};
    use crate::spacetime::Event;

    fn setup() -> (Spacetime, Tetrad, Tangent) {
        let st = Spacetime::minkowski();
        let e = Event::new(0.0, 0.0, 0.0, 0.0);
        let f = gauge_frame(&st, Gauge::Static, &e).unwrap();
        let rest = Tangent::new(e, Vec4::new(1.0, 0.0, 0.0, 0.0));
        (st, f, rest)
    }

    #[test]
    fn boost_is_lorentz_and_inverts() {
        let u = unit_timelike(Vec4::new(3.0, 1.0, -2.0, 0.5)).unwrap();
        let l = standard_boost(&u);
        assert!(lorentz_defect(&l) < 1e-13);
        assert!((l * Vec4::new(1.0, 0.0, 0.0, 0.0) - u).amax() < 1e-14);
        assert!((l * inverse_standard_boost(&u) - Mat4::identity()).amax() < 1e-13);
        assert!((l - l.transpose()).amax() == 0.0);
    }

    #[test]
    fn wigner_rotation_of_identity_rotation_and_boost() {
        let (st, f, rest) = setup();
        let map = |m: Mat4| LorentzMap {
            matrix: m,
            source: f,
            target: f,
        };
        let r = wigner_rotation(&st, &map(Mat4::identity()), &rest, &rest).unwrap();
        assert!((r - Matrix3::identity()).amax() < 1e-15);

        let rot = Rotation3::from_axis_angle(&Vector3::y_axis(), 0.7).into_inner();
        let r = wigner_rotation(&st, &map(embed_rotation(&rot)), &rest, &rest).unwrap();
        assert!((r - rot).amax() < 1e-15);

        let u = unit_timelike(Vec4::new(2.0, 0.3, 1.0, 0.0)).unwrap();
        let r = wigner_rotation(&st, &map(standard_boost(&u)), &rest, &rest).unwrap();
        assert!((r - Matrix3::identity()).amax() < 1e-14);

        let mut flip = Mat4::identity();
        flip[(0, 0)] = -1.0;
        assert!(matches!(
            wigner_rotation(&st, &map(flip), &rest, &rest),
            Err(Error::NonOrthochronous(_))
        ));
    }

    #[test]
    fn composed_boosts_have_thomas_rotation() {
        let ux = unit_timelike(Vec4::new(2.0, 1.7, 0.0, 0.0)).unwrap();
        let uy = unit_timelike(Vec4::new(2.0, 0.0, 1.7, 0.0)).unwrap();
        let (b, r) = polar_decompose(&(standard_boost(&ux) * standard_boost(&uy))).unwrap();
        assert!(lorentz_defect(&b) < 1e-12);
        let (axis, angle) = axis_angle(&r);
        assert!(angle > 0.1);
        assert!(axis.x.abs() < 1e-12 && axis.y.abs() < 1e-12);
        assert!((r.transpose() * r - Matrix3::identity()).amax() < 1e-12);
        assert!((r.determinant() - 1.0).abs() < 1e-12);
    }
}
