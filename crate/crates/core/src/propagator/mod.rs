//! Time-domain propagation of a two-photon pulse through the junction.
//!
//! Photons move at unit speed, so every waveguide amplitude is stored along
//! its characteristic: a photon is labelled by the time `s` at which it
//! reaches (or reached) the cavity, and its position at time `t` is
//! `x = t - s`. The exact characteristic shift with `dt = h` then amounts to
//! advancing a step counter; only the amplitudes of the time bin currently
//! at `x = 0` change during a step.
//!
//! During one step the cavity mode and the two waveguide bins at the
//! junction form a three-mode system. Its one-photon propagator is the
//! Cayley (Crank-Nicolson) transform of the bin-coupled exchange Hamiltonian,
//! which reproduces the delta-coupling jump conditions with the midpoint value
//! `psi(0) = [psi(0-) + psi(0+)]/2` at second order, wrapped in exact
//! half-step detuning phases. The two-photon update
//! is the bosonic second quantization of that map, and the Kerr energy of a
//! doubly occupied cavity enters as a Strang-split phase. Every piece is
//! unitary, so the norm is conserved to rounding.
//!
//! The carrier `exp[i omega_0 (x1 + x2 - 2t)]` is factored out; only the
//! detuning from the cavity enters the dynamics.

mod checkpoint;
mod extract;

pub use checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC};
pub use extract::{
    extract_amplitudes, into_amplitudes, linear_pair_response, single_photon_response, CutRow, ScatteredAmplitudes,
};

use crate::error::{Error, Result};
use crate::linalg::{CMat, Lu};
use crate::model::{CavityParams, Envelope, PulseSpec};
use crate::scalar::{cx, re, Cx, Real};

/// Uniform lattice of arrival times `s_k = s_min + (k + 1/2) h`.
///
/// At time `t` the bin `k` sits at `x = t - s_k`; the run starts at
/// `t = s_min` with every bin on the incoming side and ends once the last
/// bin has crossed, at `t = s_min + n_bins h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub h: T,
    pub s_min: T,
    pub n_bins: usize,
}

impl<T: Real> GridSpec<T> {
    /// Default resolution `h = min(1/(40 gamma), tau/80)`, an arrival window
    /// starting `5 tau + 2/gamma` before the pulse centre and ending at
    /// [`default_t_final`].
    pub fn for_pulse(params: &CavityParams<T>, pulse: &PulseSpec<T>) -> Self {
        let g = params.gamma();
        let h = (T::one() / (T::lit(40.0) * g)).min(pulse.tau / T::lit(80.0));
        Self::with_step(params, pulse, h)
    }

    /// Default window at a caller-chosen step.
    pub fn with_step(params: &CavityParams<T>, pulse: &PulseSpec<T>, h: T) -> Self {
        let g = params.gamma();
        let s_min = -(T::lit(5.0) * pulse.tau + T::lit(2.0) / g);
        let t_final = default_t_final(params, pulse);
        let n_bins = ((t_final - s_min) / h).ceil().to_usize().expect("finite window");
        Self { h, s_min, n_bins }
    }

    pub fn s_center(&self, k: usize) -> T {
        self.s_min + (T::from_usize_lossy(k) + T::lit(0.5)) * self.h
    }

    pub fn s_max(&self) -> T {
        self.s_min + T::from_usize_lossy(self.n_bins) * self.h
    }

    /// Time after `steps` steps.
    pub fn time_at(&self, steps: usize) -> T {
        self.s_min + T::from_usize_lossy(steps) * self.h
    }

    /// Bin whose centre is nearest to arrival time `s`.
    pub fn nearest_bin(&self, s: T) -> usize {
        let k = ((s - self.s_min) / self.h - T::lit(0.5)).round();
        k.max(T::zero()).to_usize().unwrap_or(0).min(self.n_bins.saturating_sub(1))
    }

    fn check(&self) -> Result<()> {
        if !(self.h > T::zero()) || !self.h.is_finite() || !self.s_min.is_finite() || self.n_bins < 2 {
            return Err(Error::BadGrid(format!("h={}, s_min={}, n_bins={}", self.h, self.s_min, self.n_bins)));
        }
        Ok(())
    }
}

/// End time `max(3 tau + 15/gamma, 5 tau + 2/gamma)`: the pulse tail has
/// arrived and the cavity has rung down below `1e-6` of its population. The
/// second form only takes over for `tau gamma > 6.5`, where `3 tau` would
/// clip the tail of the pulse.
pub fn default_t_final<T: Real>(params: &CavityParams<T>, pulse: &PulseSpec<T>) -> T {
    let g = params.gamma();
    (T::lit(3.0) * pulse.tau + T::lit(15.0) / g).max(T::lit(5.0) * pulse.tau + T::lit(2.0) / g)
}

/// Discretized two-photon state.
///
/// `ll`, `rr` and `lr` are `n x n` row-major arrays over the arrival-time bins
/// of the two photons (`lr[k1][k2]`: L photon in bin `k1`, R photon in bin
/// `k2`). `ll` and `rr` are kept explicitly symmetric. `lc`/`rc` hold one
/// photon in the cavity and one in bin `k`; `cc` both photons in the cavity.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonField<T> {
    pub grid: GridSpec<T>,
    pub pulse: PulseSpec<T>,
    /// Number of bins that have crossed the junction.
    pub steps: usize,
    pub ll: Vec<Cx<T>>,
    pub rr: Vec<Cx<T>>,
    pub lr: Vec<Cx<T>>,
    pub lc: Vec<Cx<T>>,
    pub rc: Vec<Cx<T>>,
    pub cc: Cx<T>,
}

impl<T: Real> TwoPhotonField<T> {
    pub fn zeros(grid: GridSpec<T>, pulse: PulseSpec<T>) -> Self {
        let n = grid.n_bins;
        let z = Cx::new(T::zero(), T::zero());
        Self {
            grid,
            pulse,
            steps: 0,
            ll: vec![z; n * n],
            rr: vec![z; n * n],
            lr: vec![z; n * n],
            lc: vec![z; n],
            rc: vec![z; n],
            cc: z,
        }
    }

    pub fn n(&self) -> usize {
        self.grid.n_bins
    }

    pub fn t(&self) -> T {
        self.grid.time_at(self.steps)
    }

    /// Position of bin `k` at the current time.
    pub fn position(&self, k: usize) -> T {
        self.t() - self.grid.s_center(k)
    }

    #[inline]
    pub fn idx(&self, k1: usize, k2: usize) -> usize {
        k1 * self.grid.n_bins + k2
    }

    /// Total probability: waveguide pairs, one photon in the cavity, and both.
    pub fn norm(&self) -> T {
        let h = self.grid.h;
        let sum = |v: &[Cx<T>]| v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        let two = T::lit(2.0);
        h * h * (sum(&self.ll) + sum(&self.rr) + two * sum(&self.lr)) + h * (sum(&self.lc) + sum(&self.rc)) + self.cc.norm_sqr()
    }

    /// Probability carried by states with at least one photon in the cavity.
    pub fn cavity_share(&self) -> T {
        let h = self.grid.h;
        let sum = |v: &[Cx<T>]| v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        h * (sum(&self.lc) + sum(&self.rc)) + self.cc.norm_sqr()
    }

    /// Largest violation of `ll[k1][k2] == ll[k2][k1]` (same for `rr`).
    pub fn symmetry_defect(&self) -> T {
        let n = self.n();
        let mut worst = T::zero();
        for a in 0..n {
            for b in a + 1..n {
                worst = worst.max((self.ll[self.idx(a, b)] - self.ll[self.idx(b, a)]).norm());
                worst = worst.max((self.rr[self.idx(a, b)] - self.rr[self.idx(b, a)]).norm());
            }
        }
        worst
    }
}

/// Incident envelope in arrival-time coordinates, including the `1/tau`
/// normalization, so that the discrete norm of a well-resolved pulse is 1.
///
/// The correlated Gaussian's relative-coordinate profile is taken as
/// tabulated; its pair centre is localized by a normalized Gaussian window
/// `(2/pi)^{1/4} exp(-S^2/tau^2)` in the mean arrival time `S`, the same
/// centre-of-mass profile as the uncorrelated pulse.
pub fn incident_amplitude<T: Real>(pulse: &PulseSpec<T>, s1: T, s2: T) -> T {
    let tau = pulse.tau;
    match pulse.envelope {
        // arrival time s = t - x, so the (x - t) of the table is -s
        Envelope::UncorrelatedGaussian => pulse.envelope.value(-s1, -s2, T::zero(), tau) / tau,
        Envelope::CorrelatedGaussian => {
            let mean = (s1 + s2) * T::lit(0.5);
            let window = (T::lit(2.0) / T::PI()).sqrt().sqrt() * (-(mean * mean) / (tau * tau)).exp();
            pulse.envelope.value(s1, s2, T::zero(), tau) * window / tau
        }
        Envelope::Monochromatic => T::one() / tau,
    }
}

/// Sets up the incident pair in the left waveguide with an empty cavity.
pub fn init_field<T: Real>(pulse: &PulseSpec<T>, grid: GridSpec<T>) -> Result<TwoPhotonField<T>> {
    if !pulse.envelope.is_finite_pulse() {
        return Err(Error::BadEnvelope);
    }
    if !(pulse.tau > T::zero()) || !pulse.tau.is_finite() {
        return Err(Error::Invalid(vec![crate::error::Violation::BadTau]));
    }
    grid.check()?;
    let mut field = TwoPhotonField::zeros(grid, *pulse);
    let n = grid.n_bins;
    for a in 0..n {
        let sa = grid.s_center(a);
        for b in a..n {
            let v = re(incident_amplitude(pulse, sa, grid.s_center(b)));
            let (i, j) = (field.idx(a, b), field.idx(b, a));
            field.ll[i] = v;
            field.ll[j] = v;
        }
    }
    // The window is a Riemann sum of a smooth Gaussian, so the missing mass
    // is the tail cut off by the window edges.
    let clipped = (T::one() - field.norm()).abs();
    if clipped > T::lit(1e-8).max(T::EPS * T::lit(1e3)) {
        return Err(Error::GridTooSmall { clipped: clipped.to_f64_lossy() });
    }
    Ok(field)
}

/// One-step propagator at the junction for a fixed detuning and bin width.
#[derive(Debug, Clone)]
pub struct Stepper<T> {
    h: T,
    /// One-photon map on (cavity, L bin, R bin).
    u1: [[Cx<T>; 3]; 3],
    /// Half-step Kerr phase applied to the doubly occupied cavity.
    kerr_half: Cx<T>,
    sqrt_h: T,
    sqrt_2h: T,
}

impl<T: Real> Stepper<T> {
    pub fn new(params: &CavityParams<T>, omega_0: T, h: T) -> Result<Self> {
        let det = params.detuning(omega_0);
        let sqrt_h = h.sqrt();
        let gl = params.kappa_l() / sqrt_h;
        let gr = params.kappa_r() / sqrt_h;
        // Exchange with the guides via the Cayley transform of the coupling
        // Hamiltonian on (a, b_L, b_R); the detuning phase is applied exactly
        // in two half steps around it.
        let hmat = [[re(T::zero()), re(gl), re(gr)], [re(gl), re(T::zero()), re(T::zero())], [re(gr), re(T::zero()), re(T::zero())]];
        let half = cx(T::zero(), h * T::lit(0.5));
        let plus = CMat::from_fn(3, 3, |r, c| if r == c { re(T::one()) } else { re(T::zero()) } + half * hmat[r][c]);
        let minus = CMat::from_fn(3, 3, |r, c| if r == c { re(T::one()) } else { re(T::zero()) } - half * hmat[r][c]);
        let exchange = Lu::new(plus)?.solve_mat(&minus);
        let phase = cx(T::zero(), det * h * T::lit(0.5)).exp();
        let side = |r: usize| if r == 0 { phase } else { re(T::one()) };
        let mut u1 = [[re(T::zero()); 3]; 3];
        for (r, row) in u1.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = side(r) * exchange[(r, c)] * side(c);
            }
        }
        let kerr_half = cx(T::zero(), -params.u * h).exp();
        Ok(Self { h, u1, kerr_half, sqrt_h, sqrt_2h: (T::lit(2.0) * h).sqrt() })
    }

    pub fn one_photon_map(&self) -> [[Cx<T>; 3]; 3] {
        self.u1
    }

    #[inline]
    fn apply3(&self, v: [Cx<T>; 3]) -> [Cx<T>; 3] {
        let u = &self.u1;
        [
            u[0][0] * v[0] + u[0][1] * v[1] + u[0][2] * v[2],
            u[1][0] * v[0] + u[1][1] * v[1] + u[1][2] * v[2],
            u[2][0] * v[0] + u[2][1] * v[1] + u[2][2] * v[2],
        ]
    }

    /// Advances the field by one bin.
    pub fn step(&self, f: &mut TwoPhotonField<T>) {
        let n = f.n();
        let k = f.steps;
        assert!(k < n, "no bins left to cross the junction");
        let zero = Cx::new(T::zero(), T::zero());
        let s2h = self.sqrt_2h;

        f.cc = f.cc * self.kerr_half;

        // One photon at the junction, the spectator parked in bin m.
        for m in (0..n).filter(|&m| m != k) {
            // spectator in the left guide
            let (ikm, imk) = (f.idx(k, m), f.idx(m, k));
            let v = [f.lc[m], f.ll[ikm] * s2h, f.lr[imk] * s2h];
            if v != [zero; 3] {
                let w = self.apply3(v);
                f.lc[m] = w[0];
                f.ll[ikm] = w[1] / s2h;
                f.ll[imk] = f.ll[ikm];
                f.lr[imk] = w[2] / s2h;
            }
            // spectator in the right guide
            let v = [f.rc[m], f.lr[ikm] * s2h, f.rr[ikm] * s2h];
            if v != [zero; 3] {
                let w = self.apply3(v);
                f.rc[m] = w[0];
                f.lr[ikm] = w[1] / s2h;
                f.rr[ikm] = w[2] / s2h;
                f.rr[imk] = f.rr[ikm];
            }
        }

        // Both photons among {cavity, L bin, R bin}: the symmetric two-boson
        // amplitude matrix M transforms as U M U^T.
        let h = self.h;
        let sq2 = T::lit(2.0).sqrt();
        let kk = f.idx(k, k);
        let fock_scale_c = self.sqrt_h / sq2;
        let m = [
            [f.cc, f.lc[k] * fock_scale_c, f.rc[k] * fock_scale_c],
            [f.lc[k] * fock_scale_c, f.ll[kk] * h, f.lr[kk] * h],
            [f.rc[k] * fock_scale_c, f.lr[kk] * h, f.rr[kk] * h],
        ];
        let u = &self.u1;
        let mut um = [[zero; 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                um[r][c] = u[r][0] * m[0][c] + u[r][1] * m[1][c] + u[r][2] * m[2][c];
            }
        }
        let mut out = [[zero; 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                out[r][c] = um[r][0] * u[c][0] + um[r][1] * u[c][1] + um[r][2] * u[c][2];
            }
        }
        f.cc = out[0][0] * self.kerr_half;
        f.lc[k] = out[0][1] / fock_scale_c;
        f.rc[k] = out[0][2] / fock_scale_c;
        f.ll[kk] = out[1][1] / h;
        f.rr[kk] = out[2][2] / h;
        f.lr[kk] = out[1][2] / h;

        f.steps += 1;
    }
}

/// Advances `field` to `t_final` under the junction dynamics, returning the
/// relative norm drift accumulated by the run.
pub fn evolve<T: Real>(field: &mut TwoPhotonField<T>, params: &CavityParams<T>, t_final: T) -> Result<T> {
    let grid = field.grid;
    let t0 = field.t();
    if !(t_final > t0) {
        return Err(Error::TimeNotAdvancing { requested: t_final.to_f64_lossy(), current: t0.to_f64_lossy() });
    }
    let steps = ((t_final - t0) / grid.h).round().to_usize().unwrap_or(usize::MAX);
    if field.steps.saturating_add(steps) > grid.n_bins {
        return Err(Error::DomainOverrun { t_final: t_final.to_f64_lossy() });
    }
    let stepper = Stepper::new(params, field.pulse.omega_0, grid.h)?;
    let start = field.norm();
    for _ in 0..steps {
        stepper.step(field);
    }
    let drift = ((field.norm() - start) / start).abs();
    if drift > T::lit(1e-4).max(T::EPS * T::lit(1e3)) {
        return Err(Error::UnstableStep { drift: drift.to_f64_lossy() });
    }
    Ok(drift)
}

/// Result of a complete pulse run.
#[derive(Debug, Clone)]
pub struct PulseRun<T> {
    pub amplitudes: ScatteredAmplitudes<T>,
    /// Relative norm change over the run.
    pub norm_drift: T,
}

/// Initializes, propagates to the end of the window and extracts amplitudes.
pub fn run_pulse<T: Real>(params: &CavityParams<T>, pulse: &PulseSpec<T>, grid: GridSpec<T>) -> Result<PulseRun<T>> {
    let mut field = init_field(pulse, grid)?;
    let norm_drift = evolve(&mut field, params, grid.s_max())?;
    let amplitudes = into_amplitudes(field, params)?;
    Ok(PulseRun { amplitudes, norm_drift })
}
