//! Scenario → geodesics → transports → correlations → decoherence sweep.

use nalgebra::{Matrix3, Vector3};
use sha2::{Digest, Sha256};

use super::{Chsh, Detection, Scenario};
use crate::decoherence::{averaged_state, degraded_correlation, sample_bundle};
use crate::error::{Error, Result};
use crate::frame::{gauge_frame, Gauge, ORTHO_TOL};
use crate::geodesic::{integrate_geodesic, solve_bvp, GeodesicSegment, NORM_TOL};
use crate::lorentz::{axis_angle, rotation_angle};
use crate::spacetime::{Event, Tangent};
use crate::spin::{apply_transports, chsh, correlation, singlet, Direction, TwoQubitState};
use crate::spinor;
use crate::transport::{correspondence_rotation, pair_transport, PairTransport};

/// Agreement required between the vector and spinor routes.
pub const CROSS_CHECK_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicSummary {
    /// "bvp" or "ivp".
    pub mode: &'static str,
    pub converged: bool,
    /// Coordinate distance between the endpoint and the target (0 for ivp).
    pub residual: f64,
    pub iterations: usize,
    pub proper_length: f64,
    pub norm_drift: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RotationSummary {
    /// Unit axis of the correspondence rotation in detector 2's rest triad.
    pub axis: Vector3<f64>,
    pub angle: f64,
    /// Angle of the rotation obtained by transporting detector 1's frame
    /// along A₁ → O → A₂.
    pub holonomy_angle: f64,
    /// Angle of the same rotation from the spinor transports.
    pub spin_angle: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationEntry {
    pub a_index: usize,
    pub b_index: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecoherenceRow {
    pub sigma: f64,
    pub fidelity: f64,
    pub fidelity_se: f64,
    /// E at the first a axis and its correspondence image.
    pub correlation: f64,
    pub pairs: usize,
    pub subsampled: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub norm_drift: f64,
    pub ortho_drift: f64,
    /// Largest componentwise difference between the vector-route rotations
    /// and the rotations of the spinor transports.
    pub cross_check: f64,
}

impl Diagnostics {
    pub fn norm_ok(&self) -> bool {
        self.norm_drift <= NORM_TOL
    }

    pub fn ortho_ok(&self) -> bool {
        self.ortho_drift <= ORTHO_TOL
    }

    pub fn cross_ok(&self) -> bool {
        self.cross_check <= CROSS_CHECK_TOL
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub scenario_id: String,
    pub tool_version: String,
    /// SHA-256 of the canonical scenario text.
    pub scenario_hash: String,
    pub spacetime: String,
    pub gauge: Gauge,
    pub integrator_tol: f64,
    pub bvp_tol: f64,
    pub geodesics: Vec<GeodesicSummary>,
    /// Set when the pipeline stopped early; later sections are then empty.
    pub failure: Option<String>,
    pub rotation: Option<RotationSummary>,
    pub a_count: usize,
    pub b_count: usize,
    pub correlations: Vec<CorrelationEntry>,
    pub chsh: Option<f64>,
    pub decoherence: Vec<DecoherenceRow>,
    pub diagnostics: Diagnostics,
}

impl Report {
    pub fn diagnostics_ok(&self) -> bool {
        let d = &self.diagnostics;
        d.norm_ok() && d.ortho_ok() && d.cross_ok()
    }
}

pub(crate) fn scenario_hash(s: &Scenario) -> String {
    Sha256::digest(s.to_text().as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn resolve(s: &Scenario, det: &Detection) -> Result<(GeodesicSegment, GeodesicSummary)> {
    let st = &s.spacetime;
    match det {
        Detection::Initial {
            tangent,
            proper_time,
        } => {
            let seg = integrate_geodesic(
                st,
                &Tangent::new(s.decay, *tangent),
                *proper_time,
                &s.integrator,
            )?;
            let summary = GeodesicSummary {
                mode: "ivp",
                converged: true,
                residual: 0.0,
                iterations: 0,
                proper_length: seg.proper_length(),
                norm_drift: seg.norm_drift(),
                samples: seg.len(),
            };
            Ok((seg, summary))
        }
        Detection::Target {
            event,
            guess,
            tau_hint,
        } => {
            let (guess, hint) = initial_guess(s, event, guess.as_ref())?;
            let tau = tau_hint.unwrap_or(hint);
            let (seg, rep) = solve_bvp(st, &s.decay, event, &guess, tau, &s.bvp)?;
            let summary = GeodesicSummary {
                mode: "bvp",
                converged: rep.converged,
                residual: rep.residual,
                iterations: rep.iterations,
                proper_length: seg.proper_length(),
                norm_drift: seg.norm_drift(),
                samples: seg.len(),
            };
            Ok((seg, summary))
        }
    }
}

/// The coordinate chord to the target if it is timelike at O, otherwise the
/// static observer at O.
fn initial_guess(
    s: &Scenario,
    target: &Event,
    guess: Option<&crate::spacetime::Vec4>,
) -> Result<(Tangent, f64)> {
    let st = &s.spacetime;
    let chord = Tangent::new(s.decay, target.coords - s.decay.coords);
    let n = st.inner(&chord, &chord)?;
    let fallback = (target.coords[0] - s.decay.coords[0]).abs().max(1e-3);
    let hint = if n < 0.0 { (-n).sqrt() } else { fallback };
    let g = match guess {
        Some(v) => Tangent::new(s.decay, *v),
        None if n < 0.0 && chord.components[0] > 0.0 => chord,
        None => gauge_frame(st, Gauge::Static, &s.decay)?.leg(0),
    };
    Ok((g, hint))
}

fn canonical_axes() -> [Vector3<f64>; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [
        Vector3::new(0.0, 0.0, 1.0),
        Vector3::new(1.0, 0.0, 0.0),
        Vector3::new(h, 0.0, h),
        Vector3::new(h, 0.0, -h),
    ]
}

/// Runs the whole pipeline. Numerical failures of the geodesic stage are
/// recorded in `Report::failure` rather than returned as errors.
pub fn run_scenario(s: &Scenario) -> Result<Report> {
    let mut report = Report {
        scenario_id: s.id.clone(),
        tool_version: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        scenario_hash: scenario_hash(s),
        spacetime: s.spacetime_name.clone(),
        gauge: s.gauge,
        integrator_tol: s.integrator.tol,
        bvp_tol: s.bvp.bvp_tol,
        geodesics: Vec::new(),
        failure: None,
        rotation: None,
        a_count: s.measurements.a.len(),
        b_count: 0,
        correlations: Vec::new(),
        chsh: None,
        decoherence: Vec::new(),
        diagnostics: Diagnostics {
            norm_drift: 0.0,
            ortho_drift: 0.0,
            cross_check: 0.0,
        },
    };

    let mut segments = Vec::with_capacity(2);
    for (i, det) in s.detectors.iter().enumerate() {
        match resolve(s, det) {
            Ok((seg, summary)) => {
                report.diagnostics.norm_drift =
                    report.diagnostics.norm_drift.max(summary.norm_drift);
                if !summary.converged && report.failure.is_none() {
                    report.failure = Some(format!(
                        "geodesic {} did not reach its target (residual {:.3e})",
                        i + 1,
                        summary.residual
                    ));
                }
                report.geodesics.push(summary);
                segments.push(seg);
            }
            Err(e @ (Error::DomainExit { .. } | Error::Integration(_) | Error::Domain { .. })) => {
                report.failure = Some(format!("geodesic {}: {e}", i + 1));
                return Ok(report);
            }
            Err(e) => return Err(e),
        }
    }
    if report.failure.is_some() {
        return Ok(report);
    }
    let (seg1, seg2) = (&segments[0], &segments[1]);

    let pair = pair_transport(seg1, seg2, s.gauge)?;
    let r = pair.correspondence_rotation();
    let holonomy = correspondence_rotation(seg1, seg2, s.gauge)?;
    let spin_rel = pair.spin[1].matrix * pair.spin[0].matrix.adjoint();
    let (axis, angle) = axis_angle(&r);
    report.rotation = Some(RotationSummary {
        axis,
        angle,
        holonomy_angle: rotation_angle(&holonomy),
        spin_angle: spinor::rotation_angle(&spin_rel),
    });
    report.diagnostics.ortho_drift = pair.ortho_drift;
    report.diagnostics.cross_check = (0..2)
        .map(|i| (spinor::to_rotation(&pair.spin[i].matrix) - pair.rotation[i]).amax())
        .fold((holonomy - r).amax(), f64::max);

    let state = transported_singlet(&pair)?;
    let [d1, d2] = pair.detector_frames;
    let m = &s.measurements;
    let a: Vec<Direction> =
        m.a.iter()
            .map(|v| Direction::normalized(*v, d1))
            .collect::<Result<_>>()?;
    let b: Vec<Direction> = if m.matched {
        image(&a, &r, &d2)?
    } else {
        m.b.iter()
            .map(|v| Direction::normalized(*v, d2))
            .collect::<Result<_>>()?
    };
    report.b_count = b.len();
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            report.correlations.push(CorrelationEntry {
                a_index: i,
                b_index: j,
                value: correlation(&state, ai, bj)?,
            });
        }
    }

    report.chsh = match m.chsh {
        Chsh::None => None,
        Chsh::Canonical => {
            let c = canonical_axes();
            let a = [Direction::new(c[0], d1)?, Direction::new(c[1], d1)?];
            let b = if m.matched {
                image(
                    &[Direction::new(c[2], d1)?, Direction::new(c[3], d1)?],
                    &r,
                    &d2,
                )?
            } else {
                vec![Direction::new(c[2], d2)?, Direction::new(c[3], d2)?]
            };
            Some(chsh(&state, &a[0], &a[1], &b[0], &b[1])?)
        }
        Chsh::Listed => Some(chsh(&state, &a[0], &a[1], &b[0], &b[1])?),
    };

    if let Some(dec) = &s.decoherence {
        let a0 = match a.first() {
            Some(d) => *d,
            None => Direction::new(Vector3::z(), d1)?,
        };
        let b0 = image(&[a0], &r, &d2)?[0];
        for &sigma in &dec.sigma {
            let b1 = sample_bundle(seg1, sigma, dec.n_paths, dec.seed, dec.mode)?;
            let b2 = sample_bundle(seg2, sigma, dec.n_paths, dec.seed.wrapping_add(1), dec.mode)?;
            let avg = averaged_state(&b1, &b2, s.gauge, dec.pair_budget)?;
            report.decoherence.push(DecoherenceRow {
                sigma,
                fidelity: avg.fidelity,
                fidelity_se: avg.fidelity_se,
                correlation: degraded_correlation(&avg, &a0, &b0)?,
                pairs: avg.pairs,
                subsampled: avg.subsampled,
            });
        }
    }
    Ok(report)
}

/// The singlet created in the decay frame, carried to the detectors' rest
/// frames by the spinor transports.
pub fn transported_singlet(pair: &PairTransport) -> Result<TwoQubitState> {
    apply_transports(&singlet(pair.decay_frame), &pair.spin[0], &pair.spin[1])
}

fn image(
    a: &[Direction],
    r: &Matrix3<f64>,
    frame: &crate::frame::Tetrad,
) -> Result<Vec<Direction>> {
    a.iter()
        .map(|d| Direction::normalized(r * d.components(), *frame))
        .collect()
}
