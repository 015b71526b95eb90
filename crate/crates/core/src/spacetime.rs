//! Analytic spacetimes: metric, Christoffel symbols and chart domains.
//!
//! Units are geometric (G = c = 1) and the signature is (−,+,+,+).
//! Three charts are built in:
//!
//! * `minkowski`: Cartesian (t, x, y, z).
//! * `schwarzschild`: Schwarzschild coordinates (t, r, θ, φ). The chart
//!   excludes r ≤ 2M(1 + ε_horizon) and the polar axis sin θ ≤ 10⁻⁶.
//! * `weak_field`: Cartesian (t, x, y, z) with the linearized line element
//!   ds² = −(1 + 2εΦ) dt² + (1 − 2εΦ)(dx² + dy² + dz²),
//!   Φ = −1/√(x² + y² + z² + a²).

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{Matrix4, SymmetricEigen, Vector4};

use crate::error::{Error, Result};

pub type Vec4 = Vector4<f64>;
pub type Mat4 = Matrix4<f64>;

pub const DEFAULT_HORIZON_EPS: f64 = 1e-3;
pub const AXIS_EPS: f64 = 1e-6;
pub const DEFAULT_SOFTENING: f64 = 1.0;

/// Minkowski metric η = diag(−1, 1, 1, 1).
pub fn eta() -> Mat4 {
    Mat4::from_diagonal(&Vec4::new(-1.0, 1.0, 1.0, 1.0))
}

/// A point of spacetime, given by its chart coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub coords: Vec4,
}

impl Event {
    pub fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Event {
            coords: Vec4::new(x0, x1, x2, x3),
        }
    }

    pub fn from_coords(coords: Vec4) -> Self {
        Event { coords }
    }

    pub(crate) fn as_array(&self) -> [f64; 4] {
        [
            self.coords[0],
            self.coords[1],
            self.coords[2],
            self.coords[3],
        ]
    }
}

/// A contravariant vector attached to an event.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tangent {
    pub event: Event,
    pub components: Vec4,
}

impl Tangent {
    pub fn new(event: Event, components: Vec4) -> Self {
        Tangent { event, components }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CausalClass {
    Timelike,
    Null,
    Spacelike,
}

/// Christoffel symbols of the second kind, indexed `[λ][μ][ν]` for Γ^λ_{μν}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Christoffel(pub [[[f64; 4]; 4]; 4]);

impl Christoffel {
    pub fn zero() -> Self {
        Christoffel([[[0.0; 4]; 4]; 4])
    }

    #[inline]
    pub fn get(&self, lambda: usize, mu: usize, nu: usize) -> f64 {
        self.0[lambda][mu][nu]
    }

    fn set_sym(&mut self, lambda: usize, mu: usize, nu: usize, value: f64) {
        self.0[lambda][mu][nu] = value;
        self.0[lambda][nu][mu] = value;
    }

    /// Γ^λ_{μν} a^μ b^ν.
    pub fn contract(&self, a: &Vec4, b: &Vec4) -> Vec4 {
        let mut out = Vec4::zeros();
        for lambda in 0..4 {
            let mut acc = 0.0;
            for mu in 0..4 {
                if a[mu] == 0.0 {
                    continue;
                }
                for nu in 0..4 {
                    acc += self.0[lambda][mu][nu] * a[mu] * b[nu];
                }
            }
            out[lambda] = acc;
        }
        out
    }

    /// The matrix A^λ_ν = Γ^λ_{μν} a^μ.
    pub fn contract_first(&self, a: &Vec4) -> Mat4 {
        let mut out = Mat4::zeros();
        for lambda in 0..4 {
            for nu in 0..4 {
                let mut acc = 0.0;
                for mu in 0..4 {
                    acc += self.0[lambda][mu][nu] * a[mu];
                }
                out[(lambda, nu)] = acc;
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Geometry {
    Minkowski,
    Schwarzschild { mass: f64, horizon_eps: f64 },
    WeakField { epsilon: f64, softening: f64 },
}

/// A named analytic spacetime. Values are immutable and cheap to copy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spacetime {
    geometry: Geometry,
}

impl fmt::Display for Spacetime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.geometry {
            Geometry::Minkowski => write!(f, "minkowski"),
            Geometry::Schwarzschild { mass, .. } => write!(f, "schwarzschild(M={mass})"),
            Geometry::WeakField { epsilon, softening } => {
                write!(f, "weak_field(epsilon={epsilon}, softening={softening})")
            }
        }
    }
}

pub const SPACETIME_NAMES: [&str; 3] = ["minkowski", "schwarzschild", "weak_field"];

/// Parameter names accepted by the named spacetime, or `None` if the name is
/// not recognized.
pub fn spacetime_parameters(name: &str) -> Option<&'static [&'static str]> {
    match name {
        "minkowski" => Some(&[]),
        "schwarzschild" => Some(&["mass", "M", "horizon_eps"]),
        "weak_field" => Some(&["epsilon", "softening"]),
        _ => None,
    }
}

/// Builds a spacetime by name. Recognized parameters:
/// `mass` (alias `M`) and `horizon_eps` for schwarzschild,
/// `epsilon` and `softening` for weak_field.
pub fn make_spacetime(name: &str, params: &BTreeMap<String, f64>) -> Result<Spacetime> {
    let allowed = spacetime_parameters(name)
        .ok_or_else(|| Error::Configuration(format!("unknown spacetime '{name}'")))?;
    if let Some(key) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::Configuration(format!(
            "parameter '{key}' is not accepted by spacetime '{name}'"
        )));
    }
    let geometry = match name {
        "minkowski" => Geometry::Minkowski,
        "schwarzschild" => {
            let mass = params
                .get("mass")
                .or_else(|| params.get("M"))
                .copied()
                .ok_or_else(|| Error::Configuration("schwarzschild requires a mass".into()))?;
            let horizon_eps = params
                .get("horizon_eps")
                .copied()
                .unwrap_or(DEFAULT_HORIZON_EPS);
            Spacetime::schwarzschild_with(mass, horizon_eps)?.geometry
        }
        _ => {
            let epsilon = params
                .get("epsilon")
                .copied()
                .ok_or_else(|| Error::Configuration("weak_field requires epsilon".into()))?;
            let softening = params
                .get("softening")
                .copied()
                .unwrap_or(DEFAULT_SOFTENING);
            Spacetime::weak_field(epsilon, softening)?.geometry
        }
    };
    Ok(Spacetime { geometry })
}

impl Spacetime {
    pub fn minkowski() -> Self {
        Spacetime {
            geometry: Geometry::Minkowski,
        }
    }

    pub fn schwarzschild(mass: f64) -> Result<Self> {
        Self::schwarzschild_with(mass, DEFAULT_HORIZON_EPS)
    }

    /// `mass = 0` is accepted and yields flat spacetime in spherical coordinates.
    pub fn schwarzschild_with(mass: f64, horizon_eps: f64) -> Result<Self> {
        if !mass.is_finite() || mass < 0.0 {
            return Err(Error::Configuration(format!(
                "schwarzschild mass must be a finite non-negative number, got {mass}"
            )));
        }
        if !horizon_eps.is_finite() || horizon_eps < 0.0 {
            return Err(Error::Configuration(format!(
                "horizon_eps must be non-negative, got {horizon_eps}"
            )));
        }
        Ok(Spacetime {
            geometry: Geometry::Schwarzschild { mass, horizon_eps },
        })
    }

    /// The perturbation must keep |2εΦ| ≤ 1/2 everywhere, i.e. |ε| ≤ a/4.
    pub fn weak_field(epsilon: f64, softening: f64) -> Result<Self> {
        if !softening.is_finite() || softening <= 0.0 {
            return Err(Error::Configuration(format!(
                "weak_field softening must be positive, got {softening}"
            )));
        }
        if !epsilon.is_finite() || 4.0 * epsilon.abs() > softening {
            return Err(Error::Configuration(format!(
                "weak_field epsilon {epsilon} is not a small perturbation for softening {softening}"
            )));
        }
        Ok(Spacetime {
            geometry: Geometry::WeakField { epsilon, softening },
        })
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn name(&self) -> &'static str {
        match self.geometry {
            Geometry::Minkowski => "minkowski",
            Geometry::Schwarzschild { .. } => "schwarzschild",
            Geometry::WeakField { .. } => "weak_field",
        }
    }

    pub fn validate_event(&self, e: &Event) -> bool {
        let c = &e.coords;
        if !c.iter().all(|x| x.is_finite()) {
            return false;
        }
        match self.geometry {
            Geometry::Minkowski | Geometry::WeakField { .. } => true,
            Geometry::Schwarzschild { mass, horizon_eps } => {
                c[1] > 2.0 * mass * (1.0 + horizon_eps) && c[1] > 0.0 && c[2].sin() > AXIS_EPS
            }
        }
    }

    pub(crate) fn check(&self, e: &Event) -> Result<()> {
        if self.validate_event(e) {
            Ok(())
        } else {
            Err(Error::Domain {
                spacetime: self.name(),
                coords: e.as_array(),
            })
        }
    }

    pub fn metric_at(&self, e: &Event) -> Result<Mat4> {
        self.check(e)?;
        Ok(self.metric_unchecked(&e.coords))
    }

    pub(crate) fn metric_unchecked(&self, c: &Vec4) -> Mat4 {
        match self.geometry {
            Geometry::Minkowski => eta(),
            Geometry::Schwarzschild { mass, .. } => {
                let r = c[1];
                let f = 1.0 - 2.0 * mass / r;
                let s = c[2].sin();
                Mat4::from_diagonal(&Vec4::new(-f, 1.0 / f, r * r, r * r * s * s))
            }
            Geometry::WeakField { epsilon, softening } => {
                let phi = weak_potential(c, softening);
                let a = 1.0 + 2.0 * epsilon * phi;
                let b = 1.0 - 2.0 * epsilon * phi;
                Mat4::from_diagonal(&Vec4::new(-a, b, b, b))
            }
        }
    }

    pub fn christoffel_at(&self, e: &Event) -> Result<Christoffel> {
        self.check(e)?;
        Ok(self.christoffel_unchecked(&e.coords))
    }

    pub(crate) fn christoffel_unchecked(&self, c: &Vec4) -> Christoffel {
        let mut g = Christoffel::zero();
        match self.geometry {
            Geometry::Minkowski => {}
            Geometry::Schwarzschild { mass, .. } => {
                let r = c[1];
                let (s, co) = c[2].sin_cos();
                let f = 1.0 - 2.0 * mass / r;
                let m_r2 = mass / (r * r);
                g.set_sym(0, 0, 1, m_r2 / f);
                g.0[1][0][0] = m_r2 * f;
                g.0[1][1][1] = -m_r2 / f;
                g.0[1][2][2] = -r * f;
                g.0[1][3][3] = -r * f * s * s;
                g.set_sym(2, 1, 2, 1.0 / r);
                g.0[2][3][3] = -s * co;
                g.set_sym(3, 1, 3, 1.0 / r);
                g.set_sym(3, 2, 3, co / s);
            }
            Geometry::WeakField { epsilon, softening } => {
                let rho2 = c[1] * c[1] + c[2] * c[2] + c[3] * c[3] + softening * softening;
                let phi = -1.0 / rho2.sqrt();
                let a = 1.0 + 2.0 * epsilon * phi;
                let b = 1.0 - 2.0 * epsilon * phi;
                let inv32 = 1.0 / (rho2 * rho2.sqrt());
                // ∂_i Φ and ∂_i B = −2ε ∂_i Φ
                let dphi = [c[1] * inv32, c[2] * inv32, c[3] * inv32];
                for i in 0..3 {
                    let li = i + 1;
                    g.set_sym(0, 0, li, epsilon * dphi[i] / a);
                    g.0[li][0][0] = epsilon * dphi[i] / b;
                }
                let db = dphi.map(|d| -2.0 * epsilon * d);
                for i in 0..3 {
                    for j in 0..3 {
                        for k in 0..3 {
                            let mut v = 0.0;
                            if i == k {
                                v += db[j];
                            }
                            if i == j {
                                v += db[k];
                            }
                            if j == k {
                                v -= db[i];
                            }
                            g.0[i + 1][j + 1][k + 1] = v / (2.0 * b);
                        }
                    }
                }
            }
        }
        g
    }

    /// ∂_μ g_{ab}, indexed `[μ]`, assembled from the metric and the analytic
    /// Christoffel symbols via metric compatibility.
    pub(crate) fn metric_derivative_unchecked(&self, c: &Vec4) -> [Mat4; 4] {
        let g = self.metric_unchecked(c);
        let gamma = self.christoffel_unchecked(c);
        let mut out = [Mat4::zeros(); 4];
        for (mu, d) in out.iter_mut().enumerate() {
            // lowered[a][b] = g_{aσ} Γ^σ_{μb}
            let mut lowered = Mat4::zeros();
            for a in 0..4 {
                for b in 0..4 {
                    let mut acc = 0.0;
                    for s in 0..4 {
                        acc += g[(a, s)] * gamma.0[s][mu][b];
                    }
                    lowered[(a, b)] = acc;
                }
            }
            *d = lowered + lowered.transpose();
        }
        out
    }

    pub fn inner(&self, u: &Tangent, v: &Tangent) -> Result<f64> {
        if u.event != v.event {
            return Err(Error::usage(
                "inner product of tangents attached to different events",
            ));
        }
        let g = self.metric_at(&u.event)?;
        Ok(u.components.dot(&(g * v.components)))
    }

    pub fn causal_class(&self, u: &Tangent) -> Result<CausalClass> {
        let n = self.inner(u, u)?;
        let scale = u.components.norm_squared().max(f64::MIN_POSITIVE);
        Ok(if n < -1e-12 * scale {
            CausalClass::Timelike
        } else if n > 1e-12 * scale {
            CausalClass::Spacelike
        } else {
            CausalClass::Null
        })
    }
}

fn weak_potential(c: &Vec4, softening: f64) -> f64 {
    -1.0 / (c[1] * c[1] + c[2] * c[2] + c[3] * c[3] + softening * softening).sqrt()
}

/// True when `g` is symmetric with exactly one negative and three positive
/// eigenvalues.
pub fn has_lorentzian_signature(g: &Mat4) -> bool {
    if (g - g.transpose()).amax() > 1e-12 * g.amax().max(1.0) {
        return false;
    }
    let eig = SymmetricEigen::new(*g);
    let neg = eig.eigenvalues.iter().filter(|&&l| l < 0.0).count();
    let pos = eig.eigenvalues.iter().filter(|&&l| l > 0.0).count();
    neg == 1 && pos == 3
}
