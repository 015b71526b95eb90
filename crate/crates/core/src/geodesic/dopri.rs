//! Dormand–Prince 5(4) embedded Runge–Kutta step for autonomous systems.

use nalgebra::SVector;

pub(crate) type State = SVector<f64, 8>;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

pub(crate) struct StepResult {
    pub y: State,
    pub dydt: State,
    pub error: State,
}

/// One trial step from `y` with derivative `k1 = f(y)`. `f` returns `None`
/// when a stage point leaves the domain.
pub(crate) fn step<F>(f: &F, y: &State, k1: &State, h: f64) -> Option<StepResult>
where
    F: Fn(&State) -> Option<State>,
{
    let k2 = f(&(y + k1 * (h * A21)))?;
    let k3 = f(&(y + (k1 * A31 + k2 * A32) * h))?;
    let k4 = f(&(y + (k1 * A41 + k2 * A42 + k3 * A43) * h))?;
    let k5 = f(&(y + (k1 * A51 + k2 * A52 + k3 * A53 + k4 * A54) * h))?;
    let k6 = f(&(y + (k1 * A61 + k2 * A62 + k3 * A63 + k4 * A64 + k5 * A65) * h))?;
    let y_new = y + (k1 * B1 + k3 * B3 + k4 * B4 + k5 * B5 + k6 * B6) * h;
    let k7 = f(&y_new)?;
    let error = (k1 * E1 + k3 * E3 + k4 * E4 + k5 * E5 + k6 * E6 + k7 * E7) * h;
    Some(StepResult {
        y: y_new,
        dydt: k7,
        error,
    })
}

/// Scaled max-norm of the local error estimate.
pub(crate) fn error_norm(err: &State, y0: &State, y1: &State, atol: f64, rtol: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..8 {
        let scale = atol + rtol * y0[i].abs().max(y1[i].abs());
        worst = worst.max(err[i].abs() / scale);
    }
    worst
}
