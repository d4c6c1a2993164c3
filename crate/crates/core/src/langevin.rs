//! Mean-field and linearized-fluctuation description of the driven cavity.
//!
//! The steady mean field obeys `n [gamma^2 + (Delta - 2 u n)^2] = |f|^2` with
//! `n = |<a>|^2` and `<a> = f / (Delta - 2 u n + i gamma)`. Small fluctuations
//! around it are governed by the drift matrix `A` and the diffusion matrix
//! `D`; to lowest order in the nonlinearity they produce the two-photon
//! spectrum of the scattering theory scaled by `|b|^4`.

use crate::error::Result;
use crate::linalg::eigenvalues_2x2;
use crate::model::{CavityParams, Channel, PulseSpec};
use crate::scalar::{cx, Cx, Real};
use crate::scattering::pair_spectral_density;
use crate::spectrum::SpectrumResult;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldRoot<T> {
    pub n_bar: T,
    pub amplitude: Cx<T>,
}

/// Every steady mean field for a drive, with the low branch selected.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyAmplitude<T> {
    pub drive: Cx<T>,
    pub detuning: T,
    /// Roots in ascending `n_bar`.
    pub roots: Vec<MeanFieldRoot<T>>,
    pub selected: usize,
}

impl<T: Real> SteadyAmplitude<T> {
    pub fn selected_root(&self) -> MeanFieldRoot<T> {
        self.roots[self.selected]
    }

    pub fn n_bar(&self) -> T {
        self.selected_root().n_bar
    }

    /// More than one steady state: the drive sits in the hysteresis window.
    pub fn multistable(&self) -> bool {
        self.roots.len() > 1
    }
}

fn cubic<T: Real>(params: &CavityParams<T>, det: T, n: T) -> T {
    let g = params.gamma();
    let s = det - T::lit(2.0) * params.u * n;
    n * (g * g + s * s)
}

fn cubic_slope<T: Real>(params: &CavityParams<T>, det: T, n: T) -> T {
    let g = params.gamma();
    let u = params.u;
    T::lit(12.0) * u * u * n * n - T::lit(8.0) * u * det * n + det * det + g * g
}

/// Root of `cubic - target` in a bracket where it changes sign, by bisection
/// followed by Newton polishing.
fn bracketed_root<T: Real>(params: &CavityParams<T>, det: T, target: T, mut lo: T, mut hi: T) -> T {
    let f = |n: T| cubic(params, det, n) - target;
    let rising = f(hi) > f(lo);
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > T::zero()) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut n = (lo + hi) * T::lit(0.5);
    for _ in 0..3 {
        let slope = cubic_slope(params, det, n);
        if slope == T::zero() {
            break;
        }
        let next = n - f(n) / slope;
        if (next - n).abs() > (hi - lo).abs() * T::lit(4.0) {
            break;
        }
        n = next;
    }
    n
}

/// All nonnegative steady mean fields at drive amplitude `f` and carrier
/// `omega_0`.
pub fn steady_amplitude<T: Real>(params: &CavityParams<T>, omega_0: T, f: Cx<T>) -> SteadyAmplitude<T> {
    let det = params.detuning(omega_0);
    let target = f.norm_sqr();
    let g = params.gamma();
    let u = params.u;
    let mut ns = Vec::new();
    if target == T::zero() {
        ns.push(T::zero());
    } else if u == T::zero() {
        ns.push(target / (det * det + g * g));
    } else {
        // monotone pieces between the turning points of the cubic
        let mut cuts = vec![T::zero()];
        let disc = det * det - T::lit(3.0) * g * g;
        if disc > T::zero() {
            let root = disc.sqrt();
            for c in [(T::lit(2.0) * det - root) / (T::lit(6.0) * u), (T::lit(2.0) * det + root) / (T::lit(6.0) * u)] {
                if c > T::zero() {
                    cuts.push(c);
                }
            }
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        let mut top = (target / (g * g)).max(T::one());
        while cubic(params, det, top) < target {
            top *= T::lit(2.0);
        }
        cuts.push(top.max(*cuts.last().unwrap() * T::lit(2.0)));
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (cubic(params, det, a) - target, cubic(params, det, b) - target);
            if fa == T::zero() {
                ns.push(a);
            } else if (fa < T::zero()) != (fb < T::zero()) {
                ns.push(bracketed_root(params, det, target, a, b));
            }
        }
        ns.dedup_by(|a, b| (*a - *b).abs() <= T::lit(1e-12) * b.abs().max(T::one()));
    }
    let roots = ns
        .into_iter()
        .map(|n| MeanFieldRoot { n_bar: n, amplitude: f / cx(det - T::lit(2.0) * u * n, g) })
        .collect();
    SteadyAmplitude { drive: f, detuning: det, roots, selected: 0 }
}

/// Relative residual of a root in the steady-state cubic.
pub fn cubic_residual<T: Real>(params: &CavityParams<T>, steady: &SteadyAmplitude<T>, root: &MeanFieldRoot<T>) -> T {
    let target = steady.drive.norm_sqr();
    let r = cubic(params, steady.detuning, root.n_bar) - target;
    if target == T::zero() {
        r.abs()
    } else {
        (r / target).abs()
    }
}

/// Real drive amplitude producing mean-field population `n_bar` at detuning
/// `omega_0 - omega_c`.
pub fn drive_for_population<T: Real>(params: &CavityParams<T>, omega_0: T, n_bar: T) -> T {
    cubic(params, params.detuning(omega_0), n_bar).sqrt()
}

/// Drift and diffusion of the linearized fluctuations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearizedSystem<T> {
    /// Drift matrix of `(r, theta)`.
    pub a: [[T; 2]; 2],
    /// Diffusion matrix, diagonal in `(alpha, alpha*)`.
    pub d: [[Cx<T>; 2]; 2],
    pub eigenvalues: [Cx<T>; 2],
    /// Both eigenvalues have negative real part.
    pub stable: bool,
}

/// Linearization around the selected root. An unstable fixed point is
/// reported through `stable`, not as an error.
pub fn linearize<T: Real>(params: &CavityParams<T>, steady: &SteadyAmplitude<T>) -> LinearizedSystem<T> {
    let root = steady.selected_root();
    let g = params.gamma();
    let det = steady.detuning;
    let nu = root.n_bar * params.u;
    let a = [[-g, det - T::lit(2.0) * nu], [-(det - T::lit(6.0) * nu), -g]];
    let alpha = root.amplitude;
    let z = cx(T::zero(), T::zero());
    let d = [
        [cx(T::zero(), -T::lit(2.0) * params.u) * alpha * alpha, z],
        [z, cx(T::zero(), T::lit(2.0) * params.u) * alpha.conj() * alpha.conj()],
    ];
    let eigenvalues = eigenvalues_2x2(a[0][0], a[0][1], a[1][0], a[1][1]);
    let stable = eigenvalues.iter().all(|e| e.re < T::zero());
    LinearizedSystem { a, d, eigenvalues, stable }
}

/// Weak-nonlinearity spectrum for transmission `R <- L` with the validity flag.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSpectrum<T> {
    pub spectrum: SpectrumResult<T>,
    pub n_bar: T,
    /// `n_bar u <= gamma/10`, the regime where the closed form holds.
    pub within_validity: bool,
}

/// `|b|^4` times the two-photon spectral density of the scattering theory.
pub fn analytic_spectrum<T: Real>(params: &CavityParams<T>, pulse: &PulseSpec<T>, grid: &[T]) -> Result<AnalyticSpectrum<T>> {
    let scale = pulse.b.norm_sqr().powi(2);
    let mut spectrum = pair_spectral_density(params, pulse.omega_0, pulse.tau, Channel::R, Channel::L, grid)?;
    spectrum.delta_weight *= scale;
    for v in spectrum.continuous.iter_mut() {
        *v *= scale;
    }
    let n_bar = steady_amplitude(params, pulse.omega_0, pulse.drive(params)).n_bar();
    let within_validity = n_bar * params.u.abs() <= params.gamma() / T::lit(10.0);
    Ok(AnalyticSpectrum { spectrum, n_bar, within_validity })
}
