//! Parallel transport of vectors, tetrads and spin-½ amplitudes along
//! discretized curves, and the frame correspondence along A₁ → O → A₂.
//!
//! Two independent routes are kept side by side:
//!
//! * vectors and tetrads are transported in coordinate components by
//!   integrating v̇^λ = −Γ^λ_{μν} ẋ^μ v^ν (classical RK4 on a cubic Hermite
//!   reconstruction of the geodesic between samples);
//! * spinors are transported by the ordered product of exp(−M_μ Δx^μ), with
//!   M_μ the spin connection of a gauge frame field evaluated at the midpoint
//!   of each step.
//!
//! Comparing the two (through the double cover SL(2,C) → SO⁺(1,3)) is the
//! main consistency check of the crate.

mod connection;

pub use connection::{lorentz_connection_at, spin_connection_at};

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::frame::{gauge_frame, Gauge, Tetrad};
use crate::geodesic::GeodesicSegment;
use crate::lorentz::{wigner_rotation, LorentzMap};
use crate::spacetime::{Event, Mat4, Spacetime, Tangent, Vec4};
use crate::spinor::{self, algebra_to_spinor, exp_traceless, Mat2};
use connection::connection_along;

/// RK4 sub-steps per sample interval for vector transport.
const VECTOR_SUBSTEPS: usize = 2;

/// Midpoint sub-steps per sample interval for the spinor transports used by
/// pair and frame correspondences. One sub-step leaves a few 1e-6 of
/// discrepancy against the vector route on long strong-field legs.
pub const SPIN_SUBSTEPS: usize = 4;

/// A 2×2 matrix carrying spinor components referred to `source` into
/// components referred to `target`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinTransport {
    pub matrix: Mat2,
    pub source: Tetrad,
    pub target: Tetrad,
}

impl SpinTransport {
    pub fn identity(frame: Tetrad) -> Self {
        SpinTransport {
            matrix: Mat2::identity(),
            source: frame,
            target: frame,
        }
    }

    /// `next ∘ self`; `next.source` must be `self.target`.
    pub fn then(&self, next: &SpinTransport) -> Result<SpinTransport> {
        if !next.source.approx_eq(&self.target, 1e-9) {
            return Err(Error::usage("spin transports do not chain"));
        }
        Ok(SpinTransport {
            matrix: next.matrix * self.matrix,
            source: self.source,
            target: next.target,
        })
    }

    pub fn inverse(&self) -> SpinTransport {
        SpinTransport {
            matrix: self.matrix.try_inverse().expect("SL(2,C) matrix"),
            source: self.target,
            target: self.source,
        }
    }

    pub fn lorentz_map(&self) -> LorentzMap {
        LorentzMap {
            matrix: spinor::to_lorentz(&self.matrix),
            source: self.source,
            target: self.target,
        }
    }

    /// |det U − 1|.
    pub fn determinant_defect(&self) -> f64 {
        (self.matrix.determinant() - spinor::C64::new(1.0, 0.0)).norm()
    }

    /// Re-expresses the transport between rest frames: the source side is
    /// referred to `from` boosted to `u_from`, the target side to `to` boosted
    /// to `u_to`. Only the unitary (rotational) polar factor is kept; the
    /// returned transport is tagged with `from`/`to`.
    pub fn to_rest_frames(
        &self,
        st: &Spacetime,
        from: &Tetrad,
        u_from: &Tangent,
        to: &Tetrad,
        u_to: &Tangent,
    ) -> Result<SpinTransport> {
        let rest_from = self.source.relative(st, &from.boosted_to(st, u_from)?)?;
        let rest_to = self.target.relative(st, &to.boosted_to(st, u_to)?)?;
        let lift_from = spinor::lift_lorentz(&rest_from)?;
        let lift_to = spinor::lift_lorentz(&rest_to)?;
        let m = lift_to.try_inverse().expect("SL(2,C) matrix") * self.matrix * lift_from;
        Ok(SpinTransport {
            matrix: spinor::unitary_part(&m),
            source: *from,
            target: *to,
        })
    }
}

/// Transports the columns of `m` (coordinate components at the first event)
/// along `seg`.
fn transport_columns(seg: &GeodesicSegment, m: Mat4) -> Mat4 {
    let st = seg.spacetime();
    let samples = seg.samples();
    let mut v = m;
    let rate = |x: &Vec4, u: &Vec4| -st.christoffel_unchecked(x).contract_first(u);
    for i in 0..samples.len().saturating_sub(1) {
        let h = (samples[i + 1].tau - samples[i].tau) / VECTOR_SUBSTEPS as f64;
        let mut prev = seg.interpolate(i, 0.0);
        for k in 0..VECTOR_SUBSTEPS {
            let s0 = k as f64 / VECTOR_SUBSTEPS as f64;
            let s1 = (k + 1) as f64 / VECTOR_SUBSTEPS as f64;
            let mid = seg.interpolate(i, 0.5 * (s0 + s1));
            let end = seg.interpolate(i, s1);
            let a0 = rate(&prev.0, &prev.1);
            let am = rate(&mid.0, &mid.1);
            let a1 = rate(&end.0, &end.1);
            let k1 = a0 * v;
            let k2 = am * (v + k1 * (0.5 * h));
            let k3 = am * (v + k2 * (0.5 * h));
            let k4 = a1 * (v + k3 * h);
            v += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            prev = end;
        }
    }
    v
}

fn check_start(seg: &GeodesicSegment, e: &Event) -> Result<()> {
    if seg.first().event != *e {
        return Err(Error::usage(
            "vector is not attached to the first event of the segment",
        ));
    }
    Ok(())
}

/// Parallel transport of `v0` from the first to the last event of `seg`.
pub fn transport_vector(seg: &GeodesicSegment, v0: &Tangent) -> Result<Tangent> {
    check_start(seg, &v0.event)?;
    let mut m = Mat4::zeros();
    m.set_column(0, &v0.components);
    let out = transport_columns(seg, m);
    Ok(Tangent::new(seg.last().event, out.column(0).into_owned()))
}

/// Parallel transport of all four legs of `n0`.
pub fn transport_tetrad(seg: &GeodesicSegment, n0: &Tetrad) -> Result<Tetrad> {
    check_start(seg, &n0.event)?;
    if seg.is_zero_length() {
        return Ok(*n0);
    }
    Ok(Tetrad::new(
        seg.last().event,
        transport_columns(seg, n0.legs),
    ))
}

/// Ordered product of exp(−M_μ Δx^μ) along `events` (midpoint rule).
fn ordered_exponential(st: &Spacetime, gauge: Gauge, events: &[Vec4]) -> Mat2 {
    let mut u = Mat2::identity();
    for w in events.windows(2) {
        let mid = (w[0] + w[1]) * 0.5;
        let dx = w[1] - w[0];
        let omega = connection_along(st, gauge, &mid, &dx);
        u = exp_traceless(&(-algebra_to_spinor(&omega))) * u;
    }
    u
}

/// Spinor parallel transport along `seg`, expressed between the gauge
/// frames at its endpoints.
pub fn transport_spinor(seg: &GeodesicSegment, gauge: Gauge) -> Result<SpinTransport> {
    transport_spinor_refined(seg, gauge, 1)
}

/// As [`transport_spinor`], with every sample interval split into
/// `substeps` pieces on the Hermite reconstruction of the curve. Used for
/// Richardson-style step-halving checks.
pub fn transport_spinor_refined(
    seg: &GeodesicSegment,
    gauge: Gauge,
    substeps: usize,
) -> Result<SpinTransport> {
    if seg.len() < 2 {
        return Err(Error::usage("spinor transport needs at least one step"));
    }
    if substeps == 0 {
        return Err(Error::usage("substeps must be positive"));
    }
    let st = seg.spacetime();
    let points: Vec<Vec4> = if substeps == 1 {
        seg.samples().iter().map(|s| s.event.coords).collect()
    } else {
        let mut pts = Vec::with_capacity((seg.len() - 1) * substeps + 1);
        for i in 0..seg.len() - 1 {
            pts.push(seg.samples()[i].event.coords);
            for k in 1..substeps {
                pts.push(seg.interpolate(i, k as f64 / substeps as f64).0);
            }
        }
        pts.push(seg.last().event.coords);
        pts
    };
    Ok(SpinTransport {
        matrix: ordered_exponential(st, gauge, &points),
        source: gauge_frame(st, gauge, &seg.first().event)?,
        target: gauge_frame(st, gauge, &seg.last().event)?,
    })
}

/// Spinor transport along an arbitrary discretized path of events.
pub fn transport_spinor_along(
    st: &Spacetime,
    gauge: Gauge,
    events: &[Event],
) -> Result<SpinTransport> {
    if events.len() < 2 {
        return Err(Error::usage("spinor transport needs at least one step"));
    }
    for e in events {
        st.check(e)?;
    }
    let points: Vec<Vec4> = events.iter().map(|e| e.coords).collect();
    Ok(SpinTransport {
        matrix: ordered_exponential(st, gauge, &points),
        source: gauge_frame(st, gauge, &events[0])?,
        target: gauge_frame(st, gauge, &events[events.len() - 1])?,
    })
}

/// Spinor transport with [`SPIN_SUBSTEPS`] that tolerates zero-length
/// segments (identity).
pub(crate) fn spin_transport_or_identity(
    seg: &GeodesicSegment,
    gauge: Gauge,
) -> Result<SpinTransport> {
    if seg.is_zero_length() {
        Ok(SpinTransport::identity(gauge_frame(
            seg.spacetime(),
            gauge,
            &seg.first().event,
        )?))
    } else {
        transport_spinor_refined(seg, gauge, SPIN_SUBSTEPS)
    }
}

/// Result of [`frame_correspondence`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameCorrespondence {
    /// Parallel transport of n₁ along A₁ → O → A₂.
    pub n2: Tetrad,
    /// Vector holonomy from gauge components at A₁ to gauge components at A₂.
    pub map: LorentzMap,
    /// The same holonomy in the spin-½ representation.
    pub spin: SpinTransport,
}

/// Transports the frame `n1` at A₁ back along γ₁ = O→A₁ and forward along
/// γ₂ = O→A₂.
pub fn frame_correspondence(
    seg1: &GeodesicSegment,
    seg2: &GeodesicSegment,
    n1: &Tetrad,
    gauge: Gauge,
) -> Result<FrameCorrespondence> {
    if seg1.first().event != seg2.first().event {
        return Err(Error::usage("segments do not start at a common event"));
    }
    if seg1.spacetime() != seg2.spacetime() {
        return Err(Error::usage("segments belong to different spacetimes"));
    }
    let st = seg1.spacetime();
    let back = seg1.reverse();
    let n2 = transport_tetrad(seg2, &transport_tetrad(&back, n1)?)?;

    let g1 = gauge_frame(st, gauge, &seg1.last().event)?;
    let g2 = gauge_frame(st, gauge, &seg2.last().event)?;
    let carried = transport_tetrad(seg2, &transport_tetrad(&back, &g1)?)?;
    let map = LorentzMap {
        matrix: g2.relative(st, &carried)?,
        source: g1,
        target: g2,
    };
    let spin = spin_transport_or_identity(&back, gauge)?
        .then(&spin_transport_or_identity(seg2, gauge)?)?;
    Ok(FrameCorrespondence { n2, map, spin })
}

/// Rotation acting on rest-frame spin along one world line, computed by
/// vector transport: the rest frame of `from` (boosted to the initial
/// velocity) is transported along `seg` and expressed in the rest frame of
/// `to` (boosted to the final velocity).
pub fn rest_frame_rotation(
    seg: &GeodesicSegment,
    from: &Tetrad,
    to: &Tetrad,
) -> Result<Matrix3<f64>> {
    let st = seg.spacetime();
    let start = from.boosted_to(st, &seg.first().tangent())?;
    let carried = transport_tetrad(seg, &start)?;
    let end = to.boosted_to(st, &seg.last().tangent())?;
    let m = end.relative(st, &carried)?;
    Ok(m.fixed_view::<3, 3>(1, 1).into_owned())
}

/// Rotation acting on rest-frame spin along one world line, computed by
/// spinor transport in `gauge`.
pub fn rest_frame_spin(
    seg: &GeodesicSegment,
    gauge: Gauge,
    from: &Tetrad,
    to: &Tetrad,
) -> Result<SpinTransport> {
    let st = seg.spacetime();
    spin_transport_or_identity(seg, gauge)?.to_rest_frames(
        st,
        from,
        &seg.first().tangent(),
        to,
        &seg.last().tangent(),
    )
}

/// The centre-of-momentum frame of an equal-mass pair at their common
/// event: the static frame boosted to (u₁ + u₂)/|u₁ + u₂|. Both particles
/// move back to back in it.
pub fn decay_frame(st: &Spacetime, u1: &Tangent, u2: &Tangent) -> Result<Tetrad> {
    if u1.event != u2.event {
        return Err(Error::usage("velocities are attached to different events"));
    }
    let fixed = gauge_frame(st, Gauge::Static, &u1.event)?;
    let sum = Tangent::new(u1.event, u1.components + u2.components);
    fixed.boosted_to(st, &sum)
}

/// Everything needed to evaluate rest-frame spin correlations of a pair
/// created at O and detected at the ends of `seg1`, `seg2`.
///
/// Spin components of particle i refer to the rest frame obtained by the
/// standard boost of a reference frame to the particle's velocity: the decay
/// frame at O and the static detector frame at A_i.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairTransport {
    pub decay_frame: Tetrad,
    pub detector_frames: [Tetrad; 2],
    /// Rest-frame spin rotations from the spinor route (SU(2)).
    pub spin: [SpinTransport; 2],
    /// Rest-frame rotations from the vector route.
    pub rotation: [Matrix3<f64>; 2],
    /// Worst orthonormality error of the transported tetrads.
    pub ortho_drift: f64,
}

impl PairTransport {
    /// Rotation taking a rest-frame axis of particle 1 to the axis of
    /// particle 2 with perfect anticorrelation, from the vector route.
    pub fn correspondence_rotation(&self) -> Matrix3<f64> {
        self.rotation[1] * self.rotation[0].transpose()
    }
}

pub fn pair_transport(
    seg1: &GeodesicSegment,
    seg2: &GeodesicSegment,
    gauge: Gauge,
) -> Result<PairTransport> {
    if seg1.first().event != seg2.first().event {
        return Err(Error::usage("segments do not start at a common event"));
    }
    let st = seg1.spacetime();
    let n0 = decay_frame(st, &seg1.first().tangent(), &seg2.first().tangent())?;
    let mut detector_frames = [n0; 2];
    let mut spin = [SpinTransport::identity(n0); 2];
    let mut rotation = [Matrix3::identity(); 2];
    let mut ortho_drift = 0.0f64;
    for (i, seg) in [seg1, seg2].into_iter().enumerate() {
        let d = gauge_frame(st, Gauge::Static, &seg.last().event)?;
        let start = n0.boosted_to(st, &seg.first().tangent())?;
        let carried = transport_tetrad(seg, &start)?;
        ortho_drift = ortho_drift.max(carried.orthonormality_error(st)?);
        let end = d.boosted_to(st, &seg.last().tangent())?;
        let m = end.relative(st, &carried)?;
        detector_frames[i] = d;
        rotation[i] = m.fixed_view::<3, 3>(1, 1).into_owned();
        spin[i] = rest_frame_spin(seg, gauge, &n0, &d)?;
    }
    Ok(PairTransport {
        decay_frame: n0,
        detector_frames,
        spin,
        rotation,
        ortho_drift,
    })
}

/// Rest-frame image of particle 1's axes at A₁ under the literal frame
/// correspondence along A₁ → O → A₂ with n₁ the static frame at A₁,
/// expressed against the static frame at A₂.
pub fn correspondence_rotation(
    seg1: &GeodesicSegment,
    seg2: &GeodesicSegment,
    gauge: Gauge,
) -> Result<Matrix3<f64>> {
    let st = seg1.spacetime();
    let d1 = gauge_frame(st, Gauge::Static, &seg1.last().event)?;
    let d2 = gauge_frame(st, Gauge::Static, &seg2.last().event)?;
    let fc = frame_correspondence(seg1, seg2, &d1, gauge)?;
    let map = LorentzMap {
        matrix: d2.relative(st, &fc.n2)?,
        source: d1,
        target: d2,
    };
    wigner_rotation(st, &map, &seg1.last().tangent(), &seg2.last().tangent())
}
