use std::fmt;

use thiserror::Error;

/// A single violated configuration invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `gamma = (gamma_L + gamma_R) / 2` is not strictly positive.
    NonPositiveGamma,
    /// A waveguide coupling is negative.
    NegativeCoupling(&'static str),
    /// A field is NaN or infinite where a finite value is required.
    NonFiniteInput(&'static str),
    /// Pulse duration is not positive (or infinite for a finite envelope).
    BadTau,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveGamma => write!(f, "NonPositiveGamma: gamma_L + gamma_R must be > 0"),
            Violation::NegativeCoupling(name) => write!(f, "NegativeCoupling: {name} must be >= 0"),
            Violation::NonFiniteInput(name) => write!(f, "NonFiniteInput: {name} must be finite"),
            Violation::BadTau => write!(f, "BadTau: tau must be > 0 (and finite for Gaussian envelopes)"),
        }
    }
}

/// Rough classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input: configuration, grid or precondition problems.
    Config,
    /// A numerical invariant was violated during a run.
    Numerical,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {}", join(.0))]
    Invalid(Vec<Violation>),

    #[error("configuration parse error: {0}")]
    Parse(String),

    #[error("bad grid: {0}")]
    BadGrid(String),

    #[error("monochromatic envelope cannot be propagated in time; use the closed-form scattering amplitudes")]
    BadEnvelope,

    #[error("grid too small: incident pulse mass {clipped:.3e} lies outside the arrival window")]
    GridTooSmall { clipped: f64 },

    #[error("norm drift {drift:.3e} exceeds the stability bound")]
    UnstableStep { drift: f64 },

    #[error("outgoing wave leaves the stored window before t = {t_final}")]
    DomainOverrun { t_final: f64 },

    #[error("requested time {requested} is not after the current field time {current}")]
    TimeNotAdvancing { requested: f64, current: f64 },

    #[error("cavity still holds {residual:.3e} of the norm; extend the run")]
    CavityNotEmpty { residual: f64 },

    #[error("Fock cutoff too small: population of level {level} is {population:.3e}")]
    CutoffTooSmall { level: usize, population: f64 },

    #[error("steady state is not unique (null space dimension {dimension})")]
    NonUniqueSteadyState { dimension: usize },

    #[error("steady-state solve failed: {0}")]
    SingularSystem(String),

    #[error("propagated trace drifted by {drift:.3e}")]
    PropagationDrift { drift: f64 },

    #[error("correlator has not settled: residual {residual:.3e} at t_max")]
    UnsettledCorrelator { residual: f64 },

    #[error("g(n) denominator <a^dag a> = {mean:.3e} is too small")]
    VanishingDenominator { mean: f64 },

    #[error("density matrix invariant violated: {0}")]
    InvalidState(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Invalid(_)
            | Error::Parse(_)
            | Error::BadGrid(_)
            | Error::BadEnvelope
            | Error::GridTooSmall { .. }
            | Error::DomainOverrun { .. }
            | Error::TimeNotAdvancing { .. }
            | Error::CutoffTooSmall { .. } => ErrorClass::Config,
            Error::Io(_) | Error::Checkpoint(_) => ErrorClass::Io,
            _ => ErrorClass::Numerical,
        }
    }
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
