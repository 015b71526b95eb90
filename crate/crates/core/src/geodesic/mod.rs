//! Timelike geodesics: adaptive initial-value integration and two-point
//! shooting.

mod dopri;
mod shooting;

pub use shooting::{solve_bvp, BvpConfig, ShootingReport};

use crate::error::{Error, Result};
use crate::spacetime::{Event, Spacetime, Tangent, Vec4};
use dopri::State;

/// Tolerance on |g(u,u) + 1| along an accepted segment.
pub const NORM_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    /// Absolute and relative local error tolerance.
    pub tol: f64,
    /// No step exceeds this fraction of the total proper time.
    pub max_step_fraction: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            tol: 1e-10,
            max_step_fraction: 1.0 / 512.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorMeta {
    pub config: IntegratorConfig,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Forward,
    Backward,
}

impl Orientation {
    fn flipped(self) -> Self {
        match self {
            Orientation::Forward => Orientation::Backward,
            Orientation::Backward => Orientation::Forward,
        }
    }
}

/// One point of a discretized curve: affine parameter, event and tangent
/// components dx/dτ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub tau: f64,
    pub event: Event,
    pub velocity: Vec4,
}

impl Sample {
    pub fn tangent(&self) -> Tangent {
        Tangent::new(self.event, self.velocity)
    }
}

/// A discretized affinely parameterized geodesic, τ strictly increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicSegment {
    spacetime: Spacetime,
    samples: Vec<Sample>,
    orientation: Orientation,
    meta: IntegratorMeta,
}

impl GeodesicSegment {
    /// Builds a segment from precomputed samples (e.g. an analytic curve).
    pub fn from_samples(spacetime: Spacetime, samples: Vec<Sample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::usage("a segment needs at least one sample"));
        }
        if samples.windows(2).any(|w| w[1].tau <= w[0].tau) {
            return Err(Error::usage("affine parameter must increase strictly"));
        }
        for s in &samples {
            spacetime.check(&s.event)?;
        }
        Ok(GeodesicSegment {
            spacetime,
            samples,
            orientation: Orientation::Forward,
            meta: IntegratorMeta {
                config: IntegratorConfig::default(),
                accepted_steps: 0,
                rejected_steps: 0,
            },
        })
    }

    pub(crate) fn zero_length(spacetime: Spacetime, start: Sample) -> Self {
        GeodesicSegment {
            spacetime,
            samples: vec![start],
            orientation: Orientation::Forward,
            meta: IntegratorMeta {
                config: IntegratorConfig::default(),
                accepted_steps: 0,
                rejected_steps: 0,
            },
        }
    }

    pub fn spacetime(&self) -> &Spacetime {
        &self.spacetime
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn meta(&self) -> &IntegratorMeta {
        &self.meta
    }

    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        &self.samples[self.samples.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_zero_length(&self) -> bool {
        self.samples.len() < 2
    }

    pub fn proper_length(&self) -> f64 {
        self.last().tau - self.first().tau
    }

    /// max |g(u,u) − g(u₀,u₀)| over all samples.
    pub fn norm_drift(&self) -> f64 {
        let norm = |s: &Sample| {
            let g = self.spacetime.metric_unchecked(&s.event.coords);
            s.velocity.dot(&(g * s.velocity))
        };
        let n0 = norm(self.first());
        self.samples
            .iter()
            .map(|s| (norm(s) - n0).abs())
            .fold(0.0, f64::max)
    }

    /// The same curve traversed in the opposite direction. The parameter
    /// becomes τ' = −τ, so reversing twice restores the samples exactly.
    pub fn reverse(&self) -> GeodesicSegment {
        let samples = self
            .samples
            .iter()
            .rev()
            .map(|s| Sample {
                tau: -s.tau,
                event: s.event,
                velocity: -s.velocity,
            })
            .collect();
        GeodesicSegment {
            spacetime: self.spacetime,
            samples,
            orientation: self.orientation.flipped(),
            meta: self.meta,
        }
    }

    /// Cubic Hermite interpolation of position and velocity on the interval
    /// between samples `i` and `i+1`, at fraction `s` ∈ [0, 1].
    pub(crate) fn interpolate(&self, i: usize, s: f64) -> (Vec4, Vec4) {
        let a = &self.samples[i];
        let b = &self.samples[i + 1];
        let h = b.tau - a.tau;
        let acc_a = self.acceleration(a);
        let acc_b = self.acceleration(b);
        let (h00, h10, h01, h11) = hermite(s);
        let x = a.event.coords * h00
            + a.velocity * (h10 * h)
            + b.event.coords * h01
            + b.velocity * (h11 * h);
        let u = a.velocity * h00 + acc_a * (h10 * h) + b.velocity * h01 + acc_b * (h11 * h);
        (x, u)
    }

    fn acceleration(&self, s: &Sample) -> Vec4 {
        -self
            .spacetime
            .christoffel_unchecked(&s.event.coords)
            .contract(&s.velocity, &s.velocity)
    }
}

fn hermite(s: f64) -> (f64, f64, f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    (
        2.0 * s3 - 3.0 * s2 + 1.0,
        s3 - 2.0 * s2 + s,
        -2.0 * s3 + 3.0 * s2,
        s3 - s2,
    )
}

fn geodesic_rhs(st: &Spacetime, y: &State) -> Option<State> {
    let x = Vec4::new(y[0], y[1], y[2], y[3]);
    if !st.validate_event(&Event::from_coords(x)) {
        return None;
    }
    let u = Vec4::new(y[4], y[5], y[6], y[7]);
    let a = st.christoffel_unchecked(&x).contract(&u, &u);
    Some(State::from_column_slice(&[
        u[0], u[1], u[2], u[3], -a[0], -a[1], -a[2], -a[3],
    ]))
}

fn pack(x: &Vec4, u: &Vec4) -> State {
    State::from_column_slice(&[x[0], x[1], x[2], x[3], u[0], u[1], u[2], u[3]])
}

fn unpack(y: &State) -> (Vec4, Vec4) {
    (
        Vec4::new(y[0], y[1], y[2], y[3]),
        Vec4::new(y[4], y[5], y[6], y[7]),
    )
}

/// Normalizes `u` to g(u,u) = −1, requiring it to be timelike and
/// future-directed (u⁰ > 0).
pub fn normalize_timelike(st: &Spacetime, u: &Tangent) -> Result<Tangent> {
    let n = st.inner(u, u)?;
    if !(n < 0.0) || u.components[0] <= 0.0 {
        return Err(Error::usage(
            "initial tangent must be timelike and future-directed",
        ));
    }
    Ok(Tangent::new(u.event, u.components / (-n).sqrt()))
}

/// Integrates ẍ^λ + Γ^λ_{μν} ẋ^μ ẋ^ν = 0 from `initial` for proper time
/// `tau_end`. The initial tangent is normalized to unit norm first.
pub fn integrate_geodesic(
    st: &Spacetime,
    initial: &Tangent,
    tau_end: f64,
    config: &IntegratorConfig,
) -> Result<GeodesicSegment> {
    st.check(&initial.event)?;
    if !(tau_end > 0.0) || !tau_end.is_finite() {
        return Err(Error::usage(format!(
            "proper time must be positive, got {tau_end}"
        )));
    }
    if !(config.tol > 0.0) || !(config.max_step_fraction > 0.0) {
        return Err(Error::Configuration(
            "integrator tolerance and step fraction must be positive".into(),
        ));
    }
    let u0 = normalize_timelike(st, initial)?;
    let rhs = |y: &State| geodesic_rhs(st, y);

    let h_max = tau_end * config.max_step_fraction.min(1.0);
    let h_min = tau_end * 1e-14;
    let mut h = h_max.min(0.01 * tau_end.max(1.0)).max(h_min);
    let mut tau = 0.0;
    let mut y = pack(&initial.event.coords, &u0.components);
    let mut k1 = rhs(&y).ok_or_else(|| Error::Domain {
        spacetime: st.name(),
        coords: initial.event.as_array(),
    })?;
    let mut samples = vec![Sample {
        tau,
        event: initial.event,
        velocity: u0.components,
    }];
    let mut accepted = 0;
    let mut rejected = 0;

    while tau < tau_end {
        let last_step = tau + h >= tau_end;
        let h_try = if last_step { tau_end - tau } else { h };
        match dopri::step(&rhs, &y, &k1, h_try) {
            None => {
                rejected += 1;
                h = h_try * 0.25;
                if h < h_min {
                    let last = *samples.last().expect("non-empty");
                    return Err(Error::DomainExit {
                        last: Box::new(last),
                    });
                }
            }
            Some(res) => {
                let err = dopri::error_norm(&res.error, &y, &res.y, config.tol, config.tol);
                if err <= 1.0 {
                    tau = if last_step { tau_end } else { tau + h_try };
                    y = res.y;
                    k1 = res.dydt;
                    accepted += 1;
                    let (x, u) = unpack(&y);
                    samples.push(Sample {
                        tau,
                        event: Event::from_coords(x),
                        velocity: u,
                    });
                    let factor = if err == 0.0 {
                        5.0
                    } else {
                        (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    h = (h_try * factor).min(h_max);
                } else {
                    rejected += 1;
                    h = h_try * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                    if h < h_min {
                        return Err(Error::Integration(format!(
                            "step size underflow at tau = {tau}"
                        )));
                    }
                }
            }
        }
    }

    Ok(GeodesicSegment {
        spacetime: *st,
        samples,
        orientation: Orientation::Forward,
        meta: IntegratorMeta {
            config: *config,
            accepted_steps: accepted,
            rejected_steps: rejected,
        },
    })
}
