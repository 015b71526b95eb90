//! Finite path bundles around each geodesic, and the spin state obtained by
//! averaging the transports along the bundle members.
//!
//! A bundle member is the base geodesic displaced transversally by a
//! Brownian bridge pinned at both ends. Displacements are drawn in the
//! spatial triad of the static frame, projected orthogonal to the particle's
//! spatial velocity, and scaled so that each transverse component has
//! standard deviation σ·sin(πs) at fractional proper time s.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::frame::{gauge_frame, Gauge, Tetrad};
use crate::geodesic::GeodesicSegment;
use crate::spacetime::{Event, Spacetime, Vec4};
use crate::spin::{self, kron, Density, Direction, Ket, StateData, TwoQubitState};
use crate::spinor::{Mat2, C64};
use crate::transport::{decay_frame, transport_spinor_along, SpinTransport};

/// Resampling attempts per path before giving up.
const MAX_ATTEMPTS: usize = 100;
pub const DEFAULT_PAIR_BUDGET: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    /// Amplitudes weighted by relative action phases, then normalized.
    Coherent,
    /// Uniform mixture over path pairs.
    #[default]
    Incoherent,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Coherent => "coherent",
            Mode::Incoherent => "incoherent",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coherent" => Ok(Mode::Coherent),
            "incoherent" => Ok(Mode::Incoherent),
            other => Err(Error::Configuration(format!(
                "unknown decoherence mode '{other}'"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PathBundle {
    base: GeodesicSegment,
    paths: Vec<Vec<Event>>,
    sigma: f64,
    seed: u64,
    mode: Mode,
}

impl PathBundle {
    pub fn base(&self) -> &GeodesicSegment {
        &self.base
    }

    pub fn paths(&self) -> &[Vec<Event>] {
        &self.paths
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Proper times of the base samples, shared by every path.
    fn taus(&self) -> Vec<f64> {
        self.base.samples().iter().map(|s| s.tau).collect()
    }

    /// Relative action phase of path `i`.
    pub fn action_phase(&self, i: usize) -> C64 {
        let taus = self.taus();
        let base: Vec<Event> = self.base.samples().iter().map(|s| s.event).collect();
        let st = self.base.spacetime();
        path_action_phase(st, &self.paths[i], &base, &taus)
    }
}

/// Σ g_mid(Δx, Δx)/Δτ: the discretized ∫ ⟨ẋ, ẋ⟩ dτ.
pub fn path_action(st: &Spacetime, path: &[Event], taus: &[f64]) -> f64 {
    path.windows(2)
        .zip(taus.windows(2))
        .map(|(e, t)| {
            let dx = e[1].coords - e[0].coords;
            let g = st.metric_unchecked(&((e[0].coords + e[1].coords) * 0.5));
            (dx.transpose() * g * dx)[(0, 0)] / (t[1] - t[0])
        })
        .sum()
}

/// exp(−(i/4)(S[path] − S[base])), both discretized on the same τ grid.
pub fn path_action_phase(st: &Spacetime, path: &[Event], base: &[Event], taus: &[f64]) -> C64 {
    let ds = path_action(st, path, taus) - path_action(st, base, taus);
    C64::from_polar(1.0, -0.25 * ds)
}

/// Draws `n_paths` members around `seg`. Deterministic in `seed`.
pub fn sample_bundle(
    seg: &GeodesicSegment,
    sigma: f64,
    n_paths: usize,
    seed: u64,
    mode: Mode,
) -> Result<PathBundle> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::usage("bundle width must be finite and non-negative"));
    }
    if n_paths == 0 {
        return Err(Error::usage("a bundle needs at least one path"));
    }
    let st = seg.spacetime();
    let base: Vec<Event> = seg.samples().iter().map(|s| s.event).collect();
    let mut bundle = PathBundle {
        base: seg.clone(),
        paths: Vec::with_capacity(n_paths),
        sigma,
        seed,
        mode,
    };
    if sigma == 0.0 || base.len() < 3 {
        bundle.paths = vec![base; n_paths];
        return Ok(bundle);
    }

    let tau0 = seg.first().tau;
    let length = seg.last().tau - tau0;
    let s: Vec<f64> = seg
        .samples()
        .iter()
        .map(|p| (p.tau - tau0) / length)
        .collect();
    let scale: Vec<f64> = s
        .iter()
        .map(|&s| {
            let v = s * (1.0 - s);
            if v > 0.0 {
                sigma * (std::f64::consts::PI * s).sin() / v.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    // transverse displacement basis at each base sample: columns are the
    // coordinate images of the static spatial legs, premultiplied by the
    // projector orthogonal to the spatial velocity
    let mut basis = Vec::with_capacity(base.len());
    for p in seg.samples() {
        let frame = gauge_frame(st, Gauge::Static, &p.event)?;
        let c = frame.components_of(st, &p.tangent())?;
        let v = Vector3::new(c[1], c[2], c[3]);
        let proj = if v.norm() > 1e-12 {
            let n = v / v.norm();
            Matrix3::identity() - n * n.transpose()
        } else {
            Matrix3::identity()
        };
        let legs = frame.legs.fixed_view::<4, 3>(0, 1).into_owned();
        basis.push(legs * proj);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let last = base.len() - 1;
    'paths: for _ in 0..n_paths {
        for _ in 0..MAX_ATTEMPTS {
            let mut walk = vec![Vector3::zeros(); base.len()];
            for k in 1..=last {
                let dw = Vector3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
                walk[k] = walk[k - 1] + dw * (s[k] - s[k - 1]).sqrt();
            }
            let end = walk[last];
            let mut path = base.clone();
            let mut ok = true;
            for k in 1..last {
                let d = (walk[k] - end * s[k]) * scale[k];
                let e = Event::from_coords(base[k].coords + basis[k] * d);
                if !st.validate_event(&e) {
                    ok = false;
                    break;
                }
                path[k] = e;
            }
            if ok {
                bundle.paths.push(path);
                continue 'paths;
            }
        }
        return Err(Error::Integration(format!(
            "bundle path left the chart domain in {MAX_ATTEMPTS} consecutive attempts"
        )));
    }
    Ok(bundle)
}

/// Spin state averaged over a pair of bundles.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelAverage {
    pub rho: Density,
    /// Frames of the detectors at A₁, A₂.
    pub frames: [Tetrad; 2],
    pub mode: Mode,
    /// Number of path pairs represented (n₁·n₂ when exact).
    pub pairs: usize,
    /// Whether the pair average was subsampled.
    pub subsampled: bool,
    /// Transported singlet along the base geodesics.
    pub ideal: Ket,
    /// ⟨ideal|ρ|ideal⟩.
    pub fidelity: f64,
    /// Monte-Carlo standard error of `fidelity` (zero in coherent mode).
    pub fidelity_se: f64,
    /// Normalized weights of the bundle members (coherent mode only).
    pub weights: [Vec<C64>; 2],
}

impl ChannelAverage {
    pub fn state(&self) -> TwoQubitState {
        TwoQubitState {
            data: StateData::Mixed(self.rho),
            frames: self.frames,
        }
    }
}

/// Rest-frame spin rotation along each path of a bundle.
fn member_rotations(
    bundle: &PathBundle,
    gauge: Gauge,
    n0: &Tetrad,
    detector: &Tetrad,
) -> Result<Vec<Mat2>> {
    let seg = bundle.base();
    let st = seg.spacetime();
    let (u0, u1) = (seg.first().tangent(), seg.last().tangent());
    bundle
        .paths
        .iter()
        .map(|p| {
            let raw = if p.len() < 2 {
                SpinTransport::identity(gauge_frame(st, gauge, &p[0])?)
            } else {
                transport_spinor_along(st, gauge, p)?
            };
            Ok(raw.to_rest_frames(st, n0, &u0, detector, &u1)?.matrix)
        })
        .collect()
}

/// Real 4-vector of an SU(2) matrix [[α, β], [−β̄, ᾱ]]; the Euclidean inner
/// product of two such vectors is ½ Re tr(A B†).
fn quaternion(m: &Mat2) -> Vector4<f64> {
    Vector4::new(m[(0, 0)].re, m[(0, 0)].im, m[(0, 1)].re, m[(0, 1)].im)
}

fn singlet_ket() -> Ket {
    let h = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    Ket::new(C64::from(0.0), h, -h, C64::from(0.0))
}

/// Averages the singlet over all pairs of bundle members (or a uniform
/// subsample of `pair_budget` pairs when n₁·n₂ exceeds it).
///
/// Summation order is fixed: members in sampling order, particle 2 inner.
pub fn averaged_state(
    b1: &PathBundle,
    b2: &PathBundle,
    gauge: Gauge,
    pair_budget: usize,
) -> Result<ChannelAverage> {
    let (s1, s2) = (b1.base(), b2.base());
    if s1.first().event != s2.first().event {
        return Err(Error::usage("bundles do not share their origin"));
    }
    if s1.spacetime() != s2.spacetime() {
        return Err(Error::usage("bundles live in different spacetimes"));
    }
    if b1.mode != b2.mode {
        return Err(Error::usage("bundles use different averaging modes"));
    }
    if b1.paths.is_empty() || b2.paths.is_empty() {
        return Err(Error::usage("empty bundle"));
    }
    let st = s1.spacetime();
    let n0 = decay_frame(st, &s1.first().tangent(), &s2.first().tangent())?;
    let d1 = gauge_frame(st, Gauge::Static, &s1.last().event)?;
    let d2 = gauge_frame(st, Gauge::Static, &s2.last().event)?;

    let base_bundle = |b: &PathBundle| PathBundle {
        paths: vec![b.base.samples().iter().map(|s| s.event).collect()],
        ..b.clone()
    };
    let v1 = member_rotations(&base_bundle(b1), gauge, &n0, &d1)?[0];
    let v2 = member_rotations(&base_bundle(b2), gauge, &n0, &d2)?[0];
    let singlet = singlet_ket();
    let ideal = kron(&v1, &v2) * singlet;

    let m1 = member_rotations(b1, gauge, &n0, &d1)?;
    let m2 = member_rotations(b2, gauge, &n0, &d2)?;
    let (n1, n2) = (m1.len(), m2.len());

    let mut out = ChannelAverage {
        rho: Density::zeros(),
        frames: [d1, d2],
        mode: b1.mode,
        pairs: n1 * n2,
        subsampled: false,
        ideal,
        fidelity: 0.0,
        fidelity_se: 0.0,
        weights: [Vec::new(), Vec::new()],
    };

    match b1.mode {
        Mode::Coherent => {
            let w1 = normalized_phases(b1);
            let w2 = normalized_phases(b2);
            let a1: Mat2 = m1.iter().zip(&w1).map(|(m, w)| m * *w).sum();
            let a2: Mat2 = m2.iter().zip(&w2).map(|(m, w)| m * *w).sum();
            let psi = kron(&a1, &a2) * singlet;
            let norm = psi.norm();
            if !(norm > 1e-300) {
                return Err(Error::Integration(
                    "coherent path sum cancelled to zero amplitude".into(),
                ));
            }
            let psi = psi / C64::from(norm);
            out.rho = psi * psi.adjoint();
            out.weights = [w1, w2];
        }
        Mode::Incoherent if n1.saturating_mul(n2) <= pair_budget => {
            let pure = singlet * singlet.adjoint();
            let mut inner = Density::zeros();
            for m in &m2 {
                let op = kron(&Mat2::identity(), m);
                inner += op * pure * op.adjoint();
            }
            inner /= C64::from(n2 as f64);
            for m in &m1 {
                let op = kron(m, &Mat2::identity());
                out.rho += op * inner * op.adjoint();
            }
            out.rho /= C64::from(n1 as f64);

            // f_pq = (x_p·y_q)² with x, y the quaternions of V₁†V_p, V₂†V_q
            let x: Vec<Vector4<f64>> = m1.iter().map(|m| quaternion(&(v1.adjoint() * m))).collect();
            let y: Vec<Vector4<f64>> = m2.iter().map(|m| quaternion(&(v2.adjoint() * m))).collect();
            let second = |v: &[Vector4<f64>]| {
                v.iter().map(|q| q * q.transpose()).sum::<Matrix4<f64>>() / v.len() as f64
            };
            let (xx, yy) = (second(&x), second(&y));
            let g1: Vec<f64> = x.iter().map(|q| (q.transpose() * yy * q)[(0, 0)]).collect();
            let g2: Vec<f64> = y.iter().map(|q| (q.transpose() * xx * q)[(0, 0)]).collect();
            out.fidelity_se = (variance(&g1) / n1 as f64 + variance(&g2) / n2 as f64).sqrt();
        }
        Mode::Incoherent => {
            let mut rng = ChaCha8Rng::seed_from_u64(b1.seed ^ b2.seed.rotate_left(32));
            let mut f = Vec::with_capacity(pair_budget);
            for _ in 0..pair_budget {
                let p = rng.random_range(0..n1);
                let q = rng.random_range(0..n2);
                let psi = kron(&m1[p], &m2[q]) * singlet;
                out.rho += psi * psi.adjoint();
                f.push((ideal.adjoint() * psi)[(0, 0)].norm_sqr());
            }
            out.rho /= C64::from(pair_budget as f64);
            out.pairs = pair_budget;
            out.subsampled = true;
            out.fidelity_se = (variance(&f) / pair_budget as f64).sqrt();
        }
    }
    out.fidelity = (ideal.adjoint() * out.rho * ideal)[(0, 0)].re;
    Ok(out)
}

fn normalized_phases(b: &PathBundle) -> Vec<C64> {
    let n = b.paths.len() as f64;
    (0..b.paths.len()).map(|i| b.action_phase(i) / n).collect()
}

fn variance(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64
}

/// E(a, b) = tr(ρ (a·σ) ⊗ (b·σ)).
pub fn degraded_correlation(avg: &ChannelAverage, a: &Direction, b: &Direction) -> Result<f64> {
    spin::correlation(&avg.state(), a, b)
}

/// Coordinate shift of path `k`, sample `j`, from the base (for diagnostics).
pub fn displacement(bundle: &PathBundle, k: usize, j: usize) -> Vec4 {
    bundle.paths[k][j].coords - bundle.base.samples()[j].event.coords
}
