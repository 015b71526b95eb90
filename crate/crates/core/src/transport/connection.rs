//! The connection in Lorentz components, ω_μ^a_b = e^a_ν (∂_μ e_b^ν + Γ^ν_{μσ} e_b^σ),
//! and its spin-½ image.

use crate::error::Result;
use crate::frame::{gauge_frame_with_derivative, Gauge};
use crate::spacetime::{Event, Mat4, Spacetime, Vec4};
use crate::spinor::{algebra_to_spinor, Mat2};

/// ω_μ for μ = 0..3 in the given gauge. Each ω_μ is η-antisymmetric.
pub fn lorentz_connection_at(st: &Spacetime, gauge: Gauge, e: &Event) -> Result<[Mat4; 4]> {
    st.check(e)?;
    let (legs, dlegs) = gauge_frame_with_derivative(st, gauge, &e.coords);
    let gamma = st.christoffel_unchecked(&e.coords);
    let inv = coframe(st, &legs, &e.coords);
    let mut out = [Mat4::zeros(); 4];
    for (mu, w) in out.iter_mut().enumerate() {
        let mut dir = Vec4::zeros();
        dir[mu] = 1.0;
        *w = inv * (dlegs[mu] + gamma.contract_first(&dir) * legs);
    }
    Ok(out)
}

/// The spinor connection matrices M_μ (2×2, traceless).
pub fn spin_connection_at(st: &Spacetime, gauge: Gauge, e: &Event) -> Result<[Mat2; 4]> {
    let omega = lorentz_connection_at(st, gauge, e)?;
    Ok(omega.map(|w| algebra_to_spinor(&w)))
}

/// ω_μ dx^μ at `x`, without domain checks.
pub(crate) fn connection_along(st: &Spacetime, gauge: Gauge, x: &Vec4, dx: &Vec4) -> Mat4 {
    let (legs, dlegs) = gauge_frame_with_derivative(st, gauge, x);
    let gamma = st.christoffel_unchecked(x);
    let inv = coframe(st, &legs, x);
    let mut d = Mat4::zeros();
    for mu in 0..4 {
        if dx[mu] != 0.0 {
            d += dlegs[mu] * dx[mu];
        }
    }
    inv * (d + gamma.contract_first(dx) * legs)
}

fn coframe(st: &Spacetime, legs: &Mat4, x: &Vec4) -> Mat4 {
    crate::spacetime::eta() * legs.transpose() * st.metric_unchecked(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetime::eta;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn flat_static_gauge_has_no_connection() {
        let st = Spacetime::minkowski();
        let e = Event::new(1.0, 2.0, -3.0, 0.5);
        for gauge in [Gauge::Static, Gauge::BoostedStatic { rapidity: 0.3 }] {
            for m in spin_connection_at(&st, gauge, &e).unwrap() {
                assert_eq!(m.norm(), 0.0);
            }
        }
    }

    #[test]
    fn connection_is_metric_compatible() {
        let st = Spacetime::schwarzschild(1.0).unwrap();
        let e = Event::new(0.0, 7.3, 1.2, 2.0);
        for gauge in [Gauge::Static, Gauge::BoostedStatic { rapidity: 0.5 }] {
            for w in lorentz_connection_at(&st, gauge, &e).unwrap() {
                let low = eta() * w;
                assert!((low + low.transpose()).amax() < 1e-10);
            }
        }
    }

    #[test]
    fn static_schwarzschild_components() {
        let st = Spacetime::schwarzschild(1.0).unwrap();
        let r = 8.0;
        let e = Event::new(0.0, r, FRAC_PI_2, 0.0);
        let w = lorentz_connection_at(&st, Gauge::Static, &e).unwrap();
        // ω_t^1_0 = Γ^r_tt / f = M/r²
        assert!((w[0][(1, 0)] - 1.0 / (r * r)).abs() < 1e-14);
        // ω_φ^3_1 = √f
        let f = (1.0 - 2.0 / r).sqrt();
        assert!((w[3][(3, 1)] - f).abs() < 1e-14);
    }
}
