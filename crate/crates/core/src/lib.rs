//! Spin correlations of particle pairs created at a single event and
//! propagating along timelike geodesics of a curved spacetime.
//!
//! The spin states of the two particles are compared through parallel
//! transport along the composed world line A₁ → O → A₂. Modules, bottom up:
//!
//! * [`spacetime`]: analytic metrics and Christoffel symbols.
//! * [`geodesic`]: initial-value integration and two-point shooting.
//! * [`transport`]: parallel transport of vectors, tetrads and spinors.
//! * [`spin`]: two-qubit states, correlations and CHSH.
//! * [`decoherence`]: path bundles around the geodesics.
//! * [`scenario`]: scenario files, the end-to-end pipeline and reports.

// `!(x > 0.0)` is used on purpose so that NaN fails validation; tensor
// contractions read better with explicit indices.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod decoherence;
pub mod error;
pub mod frame;
pub mod geodesic;
pub mod lorentz;
pub mod scenario;
pub mod spacetime;
pub mod spin;
pub mod spinor;
pub mod transport;

pub use error::{Error, Result};
pub use frame::{Gauge, Tetrad};
pub use geodesic::{GeodesicSegment, IntegratorConfig};
pub use lorentz::LorentzMap;
pub use spacetime::{make_spacetime, Event, Spacetime, Tangent};
pub use transport::SpinTransport;
