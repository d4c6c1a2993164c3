//! Few-photon transport through a single Kerr microcavity junction.
//!
//! The crate bundles four engines that share [`model`] parameters:
//!
//! * [`scattering`]: closed-form one- and two-photon amplitudes for
//!   monochromatic input and the two-photon spectral density.
//! * [`propagator`]: time-domain propagation of finite two-photon pulses.
//! * [`lindblad`]: Fock-truncated master equation for a classically driven
//!   cavity, with emission spectra and `g^(n)` statistics.
//! * [`langevin`]: the linearized mean-field description and its closed-form
//!   weak-nonlinearity spectrum.
//!
//! All numerics are generic over [`Real`] (`f32`/`f64`); the aliases below
//! fix the double-precision flavour used by the command line tool.

pub mod error;
pub mod langevin;
pub mod lindblad;
pub mod linalg;
pub mod model;
pub mod propagator;
pub mod scalar;
pub mod scattering;
pub mod spectrum;

pub use error::{Error, ErrorClass, Result, Violation};
pub use model::{CavityParams, Channel, Envelope, ModelConfig, PulseSpec, Units, Validated};
pub use scalar::{Cx, Real};
pub use scattering::Pair;
pub use spectrum::SpectrumResult;

pub type C64 = Cx<f64>;
pub type Params64 = model::CavityParams<f64>;
pub type Pulse64 = model::PulseSpec<f64>;
pub type Spectrum64 = spectrum::SpectrumResult<f64>;
pub type Field64 = propagator::TwoPhotonField<f64>;
pub type Density64 = lindblad::DensityMatrix<f64>;
pub type Liouvillian64 = lindblad::Liouvillian<f64>;

pub type Params32 = model::CavityParams<f32>;
pub type Field32 = propagator::TwoPhotonField<f32>;
