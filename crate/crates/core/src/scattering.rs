//! Closed-form scattering of one and two monochromatic photons by the Kerr
//! junction, and the resulting two-photon spectral density.
//!
//! Conventions: `L` is the incident waveguide, so `c_L` is the reflection and
//! `c_R` the transmission amplitude. Pair amplitudes are functions of the
//! photon separation `d = |x1 - x2|` only.

use crate::error::Result;
use crate::model::{CavityParams, Channel};
use crate::scalar::{cx, i_unit, re, Cx, Real};
use crate::spectrum::{check_increasing, SpectrumResult};

/// Single-photon reflection (`c_l`) and transmission (`c_r`) amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleAmplitudes<T> {
    pub c_l: Cx<T>,
    pub c_r: Cx<T>,
}

impl<T: Real> SingleAmplitudes<T> {
    pub fn get(&self, ch: Channel) -> Cx<T> {
        match ch {
            Channel::L => self.c_l,
            Channel::R => self.c_r,
        }
    }
}

/// Outgoing channel pair of a two-photon amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pair {
    LL,
    RR,
    LR,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::LL, Pair::RR, Pair::LR];

    pub fn channels(self) -> (Channel, Channel) {
        match self {
            Pair::LL => (Channel::L, Channel::L),
            Pair::RR => (Channel::R, Channel::R),
            Pair::LR => (Channel::L, Channel::R),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Pair::LL => "LL",
            Pair::RR => "RR",
            Pair::LR => "LR",
        }
    }
}

/// Monochromatic two-photon amplitude `a_ij` at a given separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairAmplitude<T> {
    pub pair: Pair,
    pub separation: T,
    pub value: Cx<T>,
}

impl<T: Real> PairAmplitude<T> {
    pub fn norm_sqr(&self) -> T {
        self.value.norm_sqr()
    }
}

pub fn single_amplitudes<T: Real>(params: &CavityParams<T>, omega_0: T) -> SingleAmplitudes<T> {
    let det = params.detuning(omega_0);
    let den = cx(det, params.gamma());
    let half = T::lit(0.5);
    let c_l = -cx(det, (params.gamma_r - params.gamma_l) * half) / den;
    let c_r = i_unit::<T>() * (params.gamma_l * params.gamma_r).sqrt() / den;
    SingleAmplitudes { c_l, c_r }
}

/// Two-photon bound-state coefficient: the amplitude of the correlated term at
/// `d = 0`, so that `a_ij(d) = c_i c_j - B_ij exp[(i Delta - gamma) d]`.
pub fn bound_coefficient<T: Real>(params: &CavityParams<T>, omega_0: T, pair: Pair) -> Cx<T> {
    let (i, j) = pair.channels();
    let det = params.detuning(omega_0);
    let g = params.gamma();
    let num = params.u * params.gamma_l * (params.coupling(i) * params.coupling(j)).sqrt();
    if num == T::zero() {
        return Cx::new(T::zero(), T::zero());
    }
    let d1 = cx(det, g);
    let d2 = cx(det - params.u, g);
    re(num) / (d1 * d1 * d2)
}

/// Pair amplitude `a_ij` at separation `d` (the absolute value of `d` is used).
pub fn pair_amplitude<T: Real>(params: &CavityParams<T>, omega_0: T, pair: Pair, d: T) -> PairAmplitude<T> {
    let d = d.abs();
    let c = single_amplitudes(params, omega_0);
    let (i, j) = pair.channels();
    let product = c.get(i) * c.get(j);
    let value = if params.u == T::zero() {
        product
    } else {
        let rate = cx(-params.gamma(), params.detuning(omega_0));
        product - bound_coefficient(params, omega_0, pair) * (rate * d).exp()
    };
    PairAmplitude { pair, separation: d, value }
}

/// Probability `F(omega_0)` to form the correlated two-photon state inside the
/// cavity. Carries the explicit `1/tau^2` prefactor.
pub fn formation_probability<T: Real>(params: &CavityParams<T>, omega_0: T, tau: T) -> T {
    let g = params.gamma();
    let det = params.detuning(omega_0);
    let det_u = det - params.u;
    let two = T::lit(2.0);
    (two * g * g / (T::PI() * tau * tau)) / ((det * det + g * g) * (det_u * det_u + g * g))
}

/// Emission density `F~(omega)` of the correlated pair: a product of two
/// Lorentzians centred on `omega_c` and on its four-wave-mixing partner
/// `2 omega_0 - omega_c`.
pub fn emission_density<T: Real>(params: &CavityParams<T>, omega_0: T, omega: T) -> T {
    let g = params.gamma();
    let a = omega - params.omega_c;
    let b = omega - T::lit(2.0) * omega_0 + params.omega_c;
    T::lit(4.0) * params.u * params.u * g * g / ((a * a + g * g) * (b * b + g * g))
}

/// Closed-form integral of [`emission_density`] over all frequencies,
/// `2 pi u^2 gamma / (Delta^2 + gamma^2)`.
pub fn emission_density_integral<T: Real>(params: &CavityParams<T>, omega_0: T) -> T {
    let g = params.gamma();
    let det = params.detuning(omega_0);
    T::lit(2.0) * T::PI() * params.u * params.u * g / (det * det + g * g)
}

/// Weight `I_j^i` of the elastic single-photon line for photons sent in
/// through `input` and detected in `output`.
pub fn elastic_weight<T: Real>(params: &CavityParams<T>, omega_0: T, tau: T, output: Channel, input: Channel) -> T {
    let c = single_amplitudes(params, omega_0);
    let amp = if output == input { c.c_l } else { c.c_r };
    T::lit(2.0) * amp.norm_sqr() / tau
}

/// Two-photon spectral density for photons sent in through `input` and
/// detected in `output`, sampled on a caller-supplied increasing grid.
pub fn pair_spectral_density<T: Real>(
    params: &CavityParams<T>,
    omega_0: T,
    tau: T,
    output: Channel,
    input: Channel,
    grid: &[T],
) -> Result<SpectrumResult<T>> {
    check_increasing(grid)?;
    let g = params.gamma();
    let prefactor = params.coupling(output).powi(2) * params.coupling(input) / (g * g * g);
    let weight = prefactor * formation_probability(params, omega_0, tau);
    let continuous = grid.iter().map(|&w| weight * emission_density(params, omega_0, w)).collect();
    Ok(SpectrumResult {
        delta_weight: elastic_weight(params, omega_0, tau, output, input),
        delta_at: omega_0,
        grid: grid.to_vec(),
        continuous,
    })
}

/// Local maxima of a sampled curve (interior points strictly above one
/// neighbour and not below the other).
pub fn local_maxima<T: Real>(values: &[T]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&k| {
            let (l, c, r) = (values[k - 1], values[k], values[k + 1]);
            (c > l && c >= r) || (c >= l && c > r)
        })
        .collect()
}
