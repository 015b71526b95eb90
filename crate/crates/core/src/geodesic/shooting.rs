//! Two-point boundary value problem O → A by damped Newton shooting.
//!
//! Unknowns are the spatial proper-velocity components w (in the static
//! frame at O) and the total proper time τ; the initial tangent is
//! u = √(1+|w|²) e₀ + wⁱ eᵢ. The residual is the chart-coordinate
//! difference between the endpoint and A.

use nalgebra::{Matrix4, Vector4};

use super::{integrate_geodesic, normalize_timelike, GeodesicSegment, IntegratorConfig, Sample};
use crate::error::{Error, Result};
use crate::frame::{gauge_frame, Gauge, Tetrad};
use crate::spacetime::{Event, Spacetime, Tangent, Vec4};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BvpConfig {
    /// Required chart-coordinate distance between endpoint and target.
    pub bvp_tol: f64,
    pub max_iter: usize,
    pub integrator: IntegratorConfig,
}

impl Default for BvpConfig {
    fn default() -> Self {
        BvpConfig {
            bvp_tol: 1e-8,
            max_iter: 50,
            integrator: IntegratorConfig {
                tol: 1e-12,
                ..IntegratorConfig::default()
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShootingReport {
    pub converged: bool,
    pub residual: f64,
    pub iterations: usize,
    pub initial_tangent: Tangent,
}

struct Shooter<'a> {
    st: &'a Spacetime,
    frame: Tetrad,
    target: Vec4,
    config: IntegratorConfig,
}

impl Shooter<'_> {
    fn tangent(&self, p: &Vector4<f64>) -> Tangent {
        let w = [p[0], p[1], p[2]];
        let w0 = (1.0 + w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
        self.frame
            .vector_from_components(&Vec4::new(w0, w[0], w[1], w[2]))
    }

    fn shoot(&self, p: &Vector4<f64>) -> Option<(GeodesicSegment, Vec4)> {
        if !(p[3] > 0.0) || p.iter().any(|x| !x.is_finite()) || p.xyz().norm() > 1e6 {
            return None;
        }
        let seg = integrate_geodesic(self.st, &self.tangent(p), p[3], &self.config).ok()?;
        let r = seg.last().event.coords - self.target;
        Some((seg, r))
    }
}

/// Finds a timelike geodesic from `origin` to `target`. Failure to converge
/// is reported through `ShootingReport::converged`, not as an error.
pub fn solve_bvp(
    st: &Spacetime,
    origin: &Event,
    target: &Event,
    guess: &Tangent,
    tau_hint: f64,
    config: &BvpConfig,
) -> Result<(GeodesicSegment, ShootingReport)> {
    st.check(origin)?;
    st.check(target)?;
    if guess.event != *origin {
        return Err(Error::usage(
            "shooting guess must be attached to the origin",
        ));
    }
    let guess = normalize_timelike(st, guess)?;

    if origin.coords == target.coords {
        let seg = GeodesicSegment::zero_length(
            *st,
            Sample {
                tau: 0.0,
                event: *origin,
                velocity: guess.components,
            },
        );
        return Ok((
            seg,
            ShootingReport {
                converged: true,
                residual: 0.0,
                iterations: 0,
                initial_tangent: guess,
            },
        ));
    }

    let frame = gauge_frame(st, Gauge::Static, origin)?;
    let c = frame.components_of(st, &guess)?;
    let tau0 = if tau_hint > 0.0 {
        tau_hint
    } else {
        ((target.coords[0] - origin.coords[0]) / guess.components[0])
            .abs()
            .max(1e-3)
    };
    let shooter = Shooter {
        st,
        frame,
        target: target.coords,
        config: config.integrator,
    };

    let mut p = Vector4::new(c[1], c[2], c[3], tau0);
    let mut best = shooter.shoot(&p);
    let mut iterations = 0;

    if let Some((_, r)) = &best {
        let mut res = r.norm();
        while res > config.bvp_tol && iterations < config.max_iter {
            iterations += 1;
            let Some(jac) = jacobian(&shooter, &p) else {
                break;
            };
            let Some(delta) = jac.lu().solve(&-best.as_ref().map(|b| b.1).unwrap()) else {
                break;
            };
            let mut lambda = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let trial = p + delta * lambda;
                if let Some((seg, r)) = shooter.shoot(&trial) {
                    if r.norm() < res {
                        p = trial;
                        res = r.norm();
                        best = Some((seg, r));
                        improved = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !improved {
                break;
            }
        }
    }

    match best {
        Some((seg, r)) => {
            let residual = r.norm();
            Ok((
                seg,
                ShootingReport {
                    converged: residual <= config.bvp_tol,
                    residual,
                    iterations,
                    initial_tangent: shooter.tangent(&p),
                },
            ))
        }
        None => Ok((
            GeodesicSegment::zero_length(
                *st,
                Sample {
                    tau: 0.0,
                    event: *origin,
                    velocity: guess.components,
                },
            ),
            ShootingReport {
                converged: false,
                residual: (target.coords - origin.coords).norm(),
                iterations,
                initial_tangent: guess,
            },
        )),
    }
}

fn jacobian(shooter: &Shooter<'_>, p: &Vector4<f64>) -> Option<Matrix4<f64>> {
    let mut jac = Matrix4::zeros();
    for j in 0..4 {
        let h = 1e-6 * p[j].abs().max(1.0);
        let mut plus = *p;
        let mut minus = *p;
        plus[j] += h;
        minus[j] -= h;
        let column = match (shooter.shoot(&plus), shooter.shoot(&minus)) {
            (Some((_, rp)), Some((_, rm))) => (rp - rm) / (2.0 * h),
            (Some((_, rp)), None) => (rp - shooter.shoot(p)?.1) / h,
            (None, Some((_, rm))) => (shooter.shoot(p)?.1 - rm) / h,
            (None, None) => return None,
        };
        jac.set_column(j, &column);
    }
    Some(jac)
}
