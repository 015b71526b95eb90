//! Two-qubit spin states, spin measurements along frame-tagged axes,
//! correlations and the CHSH combination.
//!
//! Basis ordering of the product space is |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩ with the
//! first factor belonging to particle 1.

use nalgebra::{Matrix4, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::frame::Tetrad;
use crate::spinor::{pauli, unitary_part, Mat2, C64};
use crate::transport::SpinTransport;

pub type Ket = Vector4<C64>;
pub type Density = Matrix4<C64>;

const UNIT_TOL: f64 = 1e-10;
const TAG_TOL: f64 = 1e-9;

/// A unit spatial direction in the triad (e₁, e₂, e₃) of `frame`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    components: Vector3<f64>,
    frame: Tetrad,
}

impl Direction {
    pub fn new(components: Vector3<f64>, frame: Tetrad) -> Result<Self> {
        if !((components.norm() - 1.0).abs() <= UNIT_TOL) {
            return Err(Error::usage(format!(
                "direction has norm {}, expected 1",
                components.norm()
            )));
        }
        Ok(Direction { components, frame })
    }

    /// Rescales any nonzero vector to unit length.
    pub fn normalized(v: Vector3<f64>, frame: Tetrad) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::usage("direction must be a nonzero finite vector"));
        }
        Ok(Direction {
            components: v / n,
            frame,
        })
    }

    pub fn components(&self) -> &Vector3<f64> {
        &self.components
    }

    pub fn frame(&self) -> &Tetrad {
        &self.frame
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StateData {
    Pure(Ket),
    Mixed(Density),
}

/// A two-qubit state with the frames its spin components refer to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitState {
    pub data: StateData,
    pub frames: [Tetrad; 2],
}

/// (|↑↓⟩ − |↓↑⟩)/√2 with both factors referred to `n0`.
pub fn singlet(n0: Tetrad) -> TwoQubitState {
    let h = C64::from(std::f64::consts::FRAC_1_SQRT_2);
    TwoQubitState {
        data: StateData::Pure(Ket::new(C64::from(0.0), h, -h, C64::from(0.0))),
        frames: [n0, n0],
    }
}

/// a·σ.
pub fn measurement_operator(a: &Direction) -> Mat2 {
    let s = pauli();
    let c = a.components;
    s[1] * C64::from(c[0]) + s[2] * C64::from(c[1]) + s[3] * C64::from(c[2])
}

pub(crate) fn kron(a: &Mat2, b: &Mat2) -> Density {
    Density::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

impl TwoQubitState {
    pub fn density(&self) -> Density {
        match self.data {
            StateData::Pure(psi) => psi * psi.adjoint(),
            StateData::Mixed(rho) => rho,
        }
    }

    /// ⟨O⟩ = tr(ρ O).
    pub fn expectation(&self, op: &Density) -> f64 {
        match self.data {
            StateData::Pure(psi) => (psi.adjoint() * op * psi)[(0, 0)].re,
            StateData::Mixed(rho) => (rho * op).trace().re,
        }
    }

    /// Checks norm (pure) or Hermiticity, trace and positivity (mixed).
    pub fn validate(&self) -> Result<()> {
        match self.data {
            StateData::Pure(psi) => {
                if (psi.norm() - 1.0).abs() > UNIT_TOL {
                    return Err(Error::usage("pure state is not normalized"));
                }
            }
            StateData::Mixed(rho) => {
                if (rho - rho.adjoint()).camax() > UNIT_TOL {
                    return Err(Error::usage("density matrix is not Hermitian"));
                }
                if (rho.trace() - C64::from(1.0)).norm() > UNIT_TOL {
                    return Err(Error::usage("density matrix does not have unit trace"));
                }
                if min_eigenvalue(&rho) < -1e-8 {
                    return Err(Error::usage("density matrix is not positive"));
                }
            }
        }
        Ok(())
    }

    /// Reduced state of particle `which` (0 or 1).
    pub fn reduced(&self, which: usize) -> Mat2 {
        let rho = self.density();
        Mat2::from_fn(|i, j| {
            (0..2)
                .map(|k| {
                    if which == 0 {
                        rho[(2 * i + k, 2 * j + k)]
                    } else {
                        rho[(2 * k + i, 2 * k + j)]
                    }
                })
                .sum()
        })
    }
}

/// Smallest eigenvalue of a Hermitian 4×4 matrix, via its real 8×8
/// symmetric embedding.
pub fn min_eigenvalue(rho: &Density) -> f64 {
    let mut m = nalgebra::SMatrix::<f64, 8, 8>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let z = 0.5 * (rho[(i, j)] + rho[(j, i)].conj());
            m[(i, j)] = z.re;
            m[(i + 4, j + 4)] = z.re;
            m[(i, j + 4)] = -z.im;
            m[(i + 4, j)] = z.im;
        }
    }
    m.symmetric_eigenvalues().min()
}

fn same_frame(a: &Tetrad, b: &Tetrad) -> bool {
    a.approx_eq(b, TAG_TOL)
}

/// Applies U₁ ⊗ U₂ (only their unitary polar factors) and retags the state
/// with the transports' target frames.
pub fn apply_transports(
    state: &TwoQubitState,
    u1: &SpinTransport,
    u2: &SpinTransport,
) -> Result<TwoQubitState> {
    if !same_frame(&state.frames[0], &u1.source) || !same_frame(&state.frames[1], &u2.source) {
        return Err(Error::usage(
            "state frames do not match the transport sources",
        ));
    }
    let op = kron(&unitary_part(&u1.matrix), &unitary_part(&u2.matrix));
    let data = match state.data {
        StateData::Pure(psi) => StateData::Pure(op * psi),
        StateData::Mixed(rho) => StateData::Mixed(op * rho * op.adjoint()),
    };
    Ok(TwoQubitState {
        data,
        frames: [u1.target, u2.target],
    })
}

/// E(a, b) = ⟨(a·σ) ⊗ (b·σ)⟩.
pub fn correlation(state: &TwoQubitState, a: &Direction, b: &Direction) -> Result<f64> {
    if !same_frame(&state.frames[0], &a.frame) || !same_frame(&state.frames[1], &b.frame) {
        return Err(Error::usage(
            "measurement directions do not match the state frames",
        ));
    }
    let op = kron(&measurement_operator(a), &measurement_operator(b));
    Ok(state.expectation(&op))
}

/// S = E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′).
pub fn chsh(
    state: &TwoQubitState,
    a: &Direction,
    a_prime: &Direction,
    b: &Direction,
    b_prime: &Direction,
) -> Result<f64> {
    Ok(correlation(state, a, b)? - correlation(state, a, b_prime)?
        + correlation(state, a_prime, b)?
        + correlation(state, a_prime, b_prime)?)
}

/// ⟨ψ|ρ|ψ⟩ for a pure reference state ψ.
pub fn fidelity(state: &TwoQubitState, reference: &Ket) -> f64 {
    match state.data {
        StateData::Pure(psi) => (reference.adjoint() * psi)[(0, 0)].norm_sqr(),
        StateData::Mixed(rho) => (reference.adjoint() * rho * reference)[(0, 0)].re,
    }
}
