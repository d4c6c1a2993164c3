//! Junction parameters, incident drive description and unit handling.
//!
//! Everything uses hbar = c = 1. Engines accept any positive linewidth, but
//! the front end rescales to `gamma = 1` through [`nondimensionalize`] so all
//! tolerances are expressed in units of the cavity linewidth.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::scalar::{Cx, Real};

/// Physical constants of the cavity junction.
///
/// `gamma` is never stored; it is always derived from the two couplings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams<T> {
    pub omega_c: T,
    /// Kerr interaction strength (two photons in the cavity cost `2u`).
    pub u: T,
    pub gamma_l: T,
    pub gamma_r: T,
}

impl<T: Real> CavityParams<T> {
    pub fn new(omega_c: T, u: T, gamma_l: T, gamma_r: T) -> Self {
        Self { omega_c, u, gamma_l, gamma_r }
    }

    /// Symmetric junction with `gamma_L = gamma_R = gamma`.
    pub fn symmetric(omega_c: T, u: T, gamma: T) -> Self {
        Self::new(omega_c, u, gamma, gamma)
    }

    /// Total linewidth `(gamma_L + gamma_R) / 2`.
    #[inline]
    pub fn gamma(&self) -> T {
        (self.gamma_l + self.gamma_r) / T::lit(2.0)
    }

    #[inline]
    pub fn kappa_l(&self) -> T {
        self.gamma_l.sqrt()
    }

    #[inline]
    pub fn kappa_r(&self) -> T {
        self.gamma_r.sqrt()
    }

    #[inline]
    pub fn detuning(&self, omega_0: T) -> T {
        omega_0 - self.omega_c
    }

    /// Coupling `gamma_i` of an output/input channel.
    pub fn coupling(&self, ch: Channel) -> T {
        match ch {
            Channel::L => self.gamma_l,
            Channel::R => self.gamma_r,
        }
    }

    /// Checks the parameter invariants, collecting every violation.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (name, v) in [
            ("omega_c", self.omega_c),
            ("u", self.u),
            ("gamma_L", self.gamma_l),
            ("gamma_R", self.gamma_r),
        ] {
            if !v.is_finite() {
                out.push(Violation::NonFiniteInput(name));
            }
        }
        if self.gamma_l < T::zero() {
            out.push(Violation::NegativeCoupling("gamma_L"));
        }
        if self.gamma_r < T::zero() {
            out.push(Violation::NegativeCoupling("gamma_R"));
        }
        // NaN compares false, so test the positive condition.
        if !(self.gamma() > T::zero()) {
            out.push(Violation::NonPositiveGamma);
        }
        out
    }
}

/// Waveguide channel. `L` carries the incident photons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    L,
    R,
}

/// Incident two-photon envelope family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Envelope {
    /// `f = 1`.
    #[serde(rename = "mono")]
    Monochromatic,
    /// `f = pi^{-1/2} exp(-[(x1-t)^2 + (x2-t)^2] / 2 tau^2)`.
    #[serde(rename = "uncorr_gauss")]
    UncorrelatedGaussian,
    /// `f = pi^{-1/4} exp(-(x1-x2)^2 / 2 tau^2)`.
    #[serde(rename = "corr_gauss")]
    CorrelatedGaussian,
}

impl Envelope {
    pub fn is_finite_pulse(self) -> bool {
        !matches!(self, Envelope::Monochromatic)
    }

    /// Envelope value `f(x1, x2, t)` exactly as tabulated for the three
    /// incident states.
    pub fn value<T: Real>(self, x1: T, x2: T, t: T, tau: T) -> T {
        let two = T::lit(2.0);
        match self {
            Envelope::Monochromatic => T::one(),
            Envelope::UncorrelatedGaussian => {
                let a = x1 - t;
                let b = x2 - t;
                (T::FRAC_2_SQRT_PI() * T::lit(0.5)) * (-(a * a + b * b) / (two * tau * tau)).exp()
            }
            Envelope::CorrelatedGaussian => {
                let d = x1 - x2;
                (T::FRAC_2_SQRT_PI() * T::lit(0.5)).sqrt() * (-(d * d) / (two * tau * tau)).exp()
            }
        }
    }
}

/// Incident drive: carrier, envelope, duration and coherent amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec<T> {
    pub omega_0: T,
    /// Temporal extent. May be infinite only for [`Envelope::Monochromatic`];
    /// a finite value there is kept as the `1/tau^2` normalization constant.
    pub tau: T,
    pub envelope: Envelope,
    /// Coherent amplitude, used only by the classically driven engines.
    pub b: Cx<T>,
}

impl<T: Real> PulseSpec<T> {
    pub fn new(omega_0: T, tau: T, envelope: Envelope) -> Self {
        Self { omega_0, tau, envelope, b: Cx::new(T::zero(), T::zero()) }
    }

    pub fn with_b(mut self, b: Cx<T>) -> Self {
        self.b = b;
        self
    }

    /// Classical drive amplitude `f = sqrt(gamma_L / tau) b`.
    pub fn drive(&self, params: &CavityParams<T>) -> Cx<T> {
        self.b * (params.gamma_l / self.tau).sqrt()
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !self.omega_0.is_finite() {
            out.push(Violation::NonFiniteInput("omega_0"));
        }
        if !self.b.re.is_finite() || !self.b.im.is_finite() {
            out.push(Violation::NonFiniteInput("b"));
        }
        let tau_ok = if self.envelope.is_finite_pulse() {
            self.tau.is_finite() && self.tau > T::zero()
        } else {
            self.tau > T::zero()
        };
        if !tau_ok {
            out.push(Violation::BadTau);
        }
        out
    }
}

/// Unit convention: hbar = c = 1, frequencies measured in units of `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Units<T> {
    /// Linewidth of the physical system that was rescaled.
    pub gamma: T,
}

impl<T: Real> Units<T> {
    pub fn freq_to_dimensionless(&self, w: T) -> T {
        w / self.gamma
    }
    pub fn freq_to_physical(&self, w: T) -> T {
        w * self.gamma
    }
    pub fn time_to_dimensionless(&self, t: T) -> T {
        t * self.gamma
    }
    pub fn time_to_physical(&self, t: T) -> T {
        t / self.gamma
    }
}

/// Parameters and pulse that passed [`validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validated<T> {
    pub params: CavityParams<T>,
    pub pulse: PulseSpec<T>,
}

/// Checks every invariant of `params` and `pulse`, reporting all violations
/// at once.
pub fn validate<T: Real>(params: CavityParams<T>, pulse: PulseSpec<T>) -> Result<Validated<T>> {
    let mut v = params.violations();
    v.extend(pulse.violations());
    if v.is_empty() {
        Ok(Validated { params, pulse })
    } else {
        Err(Error::Invalid(v))
    }
}

/// Rescales a validated configuration so that `gamma = 1`.
///
/// Frequencies are divided by `gamma`, times multiplied by it; `b` is
/// dimensionless and unchanged. The returned [`Units`] undoes the scaling.
pub fn nondimensionalize<T: Real>(cfg: &Validated<T>) -> (Validated<T>, Units<T>) {
    let gamma = cfg.params.gamma();
    // Already in units of gamma up to the rounding of (gamma_L + gamma_R) / 2.
    if (gamma - T::one()).abs() <= T::lit(4.0) * T::EPS {
        return (*cfg, Units { gamma: T::one() });
    }
    let units = Units { gamma };
    let p = &cfg.params;
    let params = CavityParams {
        omega_c: units.freq_to_dimensionless(p.omega_c),
        u: units.freq_to_dimensionless(p.u),
        gamma_l: units.freq_to_dimensionless(p.gamma_l),
        gamma_r: units.freq_to_dimensionless(p.gamma_r),
    };
    let pulse = PulseSpec {
        omega_0: units.freq_to_dimensionless(cfg.pulse.omega_0),
        tau: units.time_to_dimensionless(cfg.pulse.tau),
        ..cfg.pulse
    };
    (Validated { params, pulse }, units)
}

/// Inverse of [`nondimensionalize`].
pub fn redimensionalize<T: Real>(cfg: &Validated<T>, units: &Units<T>) -> Validated<T> {
    let p = &cfg.params;
    Validated {
        params: CavityParams {
            omega_c: units.freq_to_physical(p.omega_c),
            u: units.freq_to_physical(p.u),
            gamma_l: units.freq_to_physical(p.gamma_l),
            gamma_r: units.freq_to_physical(p.gamma_r),
        },
        pulse: PulseSpec {
            omega_0: units.freq_to_physical(cfg.pulse.omega_0),
            tau: units.time_to_physical(cfg.pulse.tau),
            ..cfg.pulse
        },
    }
}

/// JSON form of a model configuration. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub omega_c: f64,
    pub u: f64,
    #[serde(rename = "gamma_L")]
    pub gamma_l: f64,
    #[serde(rename = "gamma_R")]
    pub gamma_r: f64,
    pub omega_0: f64,
    pub tau: f64,
    pub envelope: Envelope,
    #[serde(default)]
    pub b_re: f64,
    #[serde(default)]
    pub b_im: f64,
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_value(v: serde_json::Value) -> Result<Self> {
        serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain struct serializes")
    }

    /// Splits into typed parameters and validates them.
    pub fn validated<T: Real>(&self) -> Result<Validated<T>> {
        let params = CavityParams::new(T::lit(self.omega_c), T::lit(self.u), T::lit(self.gamma_l), T::lit(self.gamma_r));
        let pulse = PulseSpec {
            omega_0: T::lit(self.omega_0),
            tau: T::lit(self.tau),
            envelope: self.envelope,
            b: Cx::new(T::lit(self.b_re), T::lit(self.b_im)),
        };
        validate(params, pulse)
    }

    pub fn from_validated<T: Real>(cfg: &Validated<T>) -> Self {
        let p = &cfg.params;
        Self {
            omega_c: p.omega_c.to_f64_lossy(),
            u: p.u.to_f64_lossy(),
            gamma_l: p.gamma_l.to_f64_lossy(),
            gamma_r: p.gamma_r.to_f64_lossy(),
            omega_0: cfg.pulse.omega_0.to_f64_lossy(),
            tau: cfg.pulse.tau.to_f64_lossy(),
            envelope: cfg.pulse.envelope,
            b_re: cfg.pulse.b.re.to_f64_lossy(),
            b_im: cfg.pulse.b.im.to_f64_lossy(),
        }
    }
}
