//! Orthonormal local frames (tetrads) and the gauge frame fields used to
//! express transports in Lorentz components.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lorentz::standard_boost;
use crate::spacetime::{eta, Event, Mat4, Spacetime, Tangent, Vec4};

pub const ORTHO_TOL: f64 = 1e-8;
pub const DEFAULT_GAUGE_RAPIDITY: f64 = 0.3;

/// Four orthonormal vectors at an event. Column `a` of `legs` holds the
/// coordinate components of e_a; leg 0 is timelike.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tetrad {
    pub event: Event,
    pub legs: Mat4,
}

impl Tetrad {
    pub fn new(event: Event, legs: Mat4) -> Self {
        Tetrad { event, legs }
    }

    pub fn leg(&self, a: usize) -> Tangent {
        Tangent::new(self.event, self.legs.column(a).into_owned())
    }

    /// max |g(e_a, e_b) − η_ab|.
    pub fn orthonormality_error(&self, st: &Spacetime) -> Result<f64> {
        let g = st.metric_at(&self.event)?;
        Ok((self.legs.transpose() * g * self.legs - eta()).amax())
    }

    /// Dual basis e^a_μ as a matrix (row a), i.e. η Eᵀ g.
    pub fn coframe(&self, st: &Spacetime) -> Result<Mat4> {
        let g = st.metric_at(&self.event)?;
        Ok(eta() * self.legs.transpose() * g)
    }

    /// Frame components v^a of a coordinate vector at this tetrad's event.
    pub fn components_of(&self, st: &Spacetime, v: &Tangent) -> Result<Vec4> {
        if v.event != self.event {
            return Err(Error::usage(
                "vector and tetrad are attached to different events",
            ));
        }
        Ok(self.coframe(st)? * v.components)
    }

    pub fn vector_from_components(&self, c: &Vec4) -> Tangent {
        Tangent::new(self.event, self.legs * c)
    }

    /// Lorentz matrix expressing `other`'s legs in this tetrad's components.
    pub fn relative(&self, st: &Spacetime, other: &Tetrad) -> Result<Mat4> {
        if other.event != self.event {
            return Err(Error::usage("tetrads are attached to different events"));
        }
        Ok(self.coframe(st)? * other.legs)
    }

    /// The frame obtained from this one by the pure boost that carries e_0 to
    /// the unit timelike vector `u`. Its time leg is `u` normalized.
    pub fn boosted_to(&self, st: &Spacetime, u: &Tangent) -> Result<Tetrad> {
        let mut c = self.components_of(st, u)?;
        let n = -(c[0] * c[0]) + c[1] * c[1] + c[2] * c[2] + c[3] * c[3];
        if n >= 0.0 || c[0] <= 0.0 {
            return Err(Error::usage(
                "boost target must be future-directed timelike",
            ));
        }
        c /= (-n).sqrt();
        Ok(Tetrad::new(self.event, self.legs * standard_boost(&c)))
    }

    pub fn approx_eq(&self, other: &Tetrad, tol: f64) -> bool {
        (self.event.coords - other.event.coords).amax() <= tol
            && (self.legs - other.legs).amax() <= tol
    }
}

/// Choice of reference frame field used to express transports.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum Gauge {
    #[default]
    /// Gram–Schmidt of the coordinate basis, timelike leg first.
    Static,
    /// The static frame boosted along its third spatial leg.
    BoostedStatic { rapidity: f64 },
}

impl fmt::Display for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gauge::Static => write!(f, "static"),
            Gauge::BoostedStatic { .. } => write!(f, "boosted_static"),
        }
    }
}

impl FromStr for Gauge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "static" => Ok(Gauge::Static),
            "boosted_static" => Ok(Gauge::BoostedStatic {
                rapidity: DEFAULT_GAUGE_RAPIDITY,
            }),
            other => Err(Error::Configuration(format!("unknown gauge '{other}'"))),
        }
    }
}

pub fn gauge_frame(st: &Spacetime, gauge: Gauge, e: &Event) -> Result<Tetrad> {
    st.check(e)?;
    let (legs, _) = gauge_frame_with_derivative(st, gauge, &e.coords);
    Ok(Tetrad::new(*e, legs))
}

/// Gauge frame legs and their coordinate derivatives ∂_μ e_a^ν (index `[μ]`).
/// The derivatives are exact: they are propagated through Gram–Schmidt from
/// the analytic metric derivatives.
pub(crate) fn gauge_frame_with_derivative(
    st: &Spacetime,
    gauge: Gauge,
    c: &Vec4,
) -> (Mat4, [Mat4; 4]) {
    let g = st.metric_unchecked(c);
    let dg = st.metric_derivative_unchecked(c);
    let metric = |a: usize, b: usize| Dual {
        v: g[(a, b)],
        d: [dg[0][(a, b)], dg[1][(a, b)], dg[2][(a, b)], dg[3][(a, b)]],
    };
    let dot = |x: &[Dual; 4], y: &[Dual; 4]| {
        let mut acc = Dual::constant(0.0);
        for a in 0..4 {
            for b in 0..4 {
                acc = acc + x[a] * metric(a, b) * y[b];
            }
        }
        acc
    };

    let mut legs: [[Dual; 4]; 4] = [[Dual::constant(0.0); 4]; 4];
    for i in 0..4 {
        let mut v = [Dual::constant(0.0); 4];
        v[i] = Dual::constant(1.0);
        for (j, ej) in legs.iter().enumerate().take(i) {
            let sign = if j == 0 { -1.0 } else { 1.0 };
            let coef = dot(&v, ej) * sign;
            for k in 0..4 {
                v[k] = v[k] - coef * ej[k];
            }
        }
        let n2 = dot(&v, &v);
        let norm = if i == 0 { (-n2).sqrt() } else { n2.sqrt() };
        for k in 0..4 {
            legs[i][k] = v[k] / norm;
        }
    }

    if let Gauge::BoostedStatic { rapidity } = gauge {
        let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
        let e0 = legs[0];
        let e3 = legs[3];
        for k in 0..4 {
            legs[0][k] = e0[k] * ch + e3[k] * sh;
            legs[3][k] = e0[k] * sh + e3[k] * ch;
        }
    }

    let mut value = Mat4::zeros();
    let mut deriv = [Mat4::zeros(); 4];
    for a in 0..4 {
        for nu in 0..4 {
            value[(nu, a)] = legs[a][nu].v;
            for (mu, d) in deriv.iter_mut().enumerate() {
                d[(nu, a)] = legs[a][nu].d[mu];
            }
        }
    }
    (value, deriv)
}

/// Forward-mode dual number carrying the four coordinate partials.
#[derive(Clone, Copy, Debug)]
struct Dual {
    v: f64,
    d: [f64; 4],
}

impl Dual {
    fn constant(v: f64) -> Self {
        Dual { v, d: [0.0; 4] }
    }

    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let k = 0.5 / s;
        Dual {
            v: s,
            d: self.d.map(|x| x * k),
        }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual {
            v: self.v + o.v,
            d: [
                self.d[0] + o.d[0],
                self.d[1] + o.d[1],
                self.d[2] + o.d[2],
                self.d[3] + o.d[3],
            ],
        }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        self + (-o)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual {
            v: -self.v,
            d: self.d.map(|x| -x),
        }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual {
            v: self.v * o.v,
            d: [
                self.d[0] * o.v + self.v * o.d[0],
                self.d[1] * o.v + self.v * o.d[1],
                self.d[2] * o.v + self.v * o.d[2],
                self.d[3] * o.v + self.v * o.d[3],
            ],
        }
    }
}

impl Mul<f64> for Dual {
    type Output = Dual;
    fn mul(self, k: f64) -> Dual {
        Dual {
            v: self.v * k,
            d: self.d.map(|x| x * k),
        }
    }
}

impl std::ops::Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let inv = 1.0 / o.v;
        Dual {
            v: self.v * inv,
            d: [
                (self.d[0] - self.v * inv * o.d[0]) * inv,
                (self.d[1] - self.v * inv * o.d[1]) * inv,
                (self.d[2] - self.v * inv * o.d[2]) * inv,
                (self.d[3] - self.v * inv * o.d[3]) * inv,
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn static_schwarzschild_frame_is_normalized_coordinate_basis() {
        let st = Spacetime::schwarzschild(1.0).unwrap();
        let e = Event::new(0.0, 8.0, FRAC_PI_2, 0.0);
        let f = gauge_frame(&st, Gauge::Static, &e).unwrap();
        let fac = (1.0 - 2.0 / 8.0_f64).sqrt();
        assert!((f.legs[(0, 0)] - 1.0 / fac).abs() < 1e-14);
        assert!((f.legs[(1, 1)] - fac).abs() < 1e-14);
        assert!((f.legs[(2, 2)] - 1.0 / 8.0).abs() < 1e-14);
        assert!((f.legs[(3, 3)] - 1.0 / 8.0).abs() < 1e-14);
        assert!(f.orthonormality_error(&st).unwrap() < 1e-14);
    }

    #[test]
    fn frame_derivatives_match_finite_differences() {
        let st = Spacetime::schwarzschild(1.0).unwrap();
        for gauge in [Gauge::Static, Gauge::BoostedStatic { rapidity: 0.4 }] {
            let c = Vec4::new(0.0, 6.5, 1.1, 0.7);
            let (_, d) = gauge_frame_with_derivative(&st, gauge, &c);
            for mu in 0..4 {
                let h = 1e-6;
                let mut p = c;
                let mut m = c;
                p[mu] += h;
                m[mu] -= h;
                let fd = (gauge_frame_with_derivative(&st, gauge, &p).0
                    - gauge_frame_with_derivative(&st, gauge, &m).0)
                    / (2.0 * h);
                assert!((fd - d[mu]).amax() < 1e-8, "mu={mu}");
            }
        }
    }

    #[test]
    fn boosted_gauge_is_orthonormal() {
        let st = Spacetime::weak_field(0.1, 1.0).unwrap();
        let e = Event::new(0.0, 0.3, 0.2, -1.0);
        let f = gauge_frame(&st, Gauge::BoostedStatic { rapidity: 0.8 }, &e).unwrap();
        assert!(f.orthonormality_error(&st).unwrap() < 1e-13);
    }

    #[test]
    fn boost_to_velocity() {
        let st = Spacetime::minkowski();
        let e = Event::new(0.0, 0.0, 0.0, 0.0);
        let f = gauge_frame(&st, Gauge::Static, &e).unwrap();
        let u = Tangent::new(e, Vec4::new(2.0, 1.0, 1.0, 0.5));
        let rest = f.boosted_to(&st, &u).unwrap();
        let unit = u.components / 1.75f64.sqrt();
        assert!((rest.legs.column(0) - unit).amax() < 1e-14);
        assert!(rest.orthonormality_error(&st).unwrap() < 1e-14);
        assert!("kerr".parse::<Gauge>().is_err());
    }
}
