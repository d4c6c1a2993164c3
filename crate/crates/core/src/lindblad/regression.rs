//! Two-time correlator by quantum regression and the emission spectrum.

use rustfft::FftPlanner;

use super::{annihilation, vectorize, DensityMatrix, Liouvillian};
use crate::error::{Error, Result};
use crate::scalar::{re, Cx, Real};
use crate::spectrum::{check_increasing, SpectrumResult};

/// `C(t) = Tr[a^+ e^{L t}(a rho_ss)]` on a uniform time grid, rotating frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorSeries<T> {
    pub dt: T,
    pub values: Vec<Cx<T>>,
    /// `|<a>_ss|^2`, the long-time limit of `C(t)`.
    pub asymptote: T,
    /// Drive frequency of the rotating frame.
    pub omega_0: T,
}

impl<T: Real> CorrelatorSeries<T> {
    pub fn times(&self) -> Vec<T> {
        (0..self.values.len()).map(|k| T::from_usize_lossy(k) * self.dt).collect()
    }

    /// `C(t) - |<a>|^2` at sample `k`.
    pub fn fluctuation(&self, k: usize) -> Cx<T> {
        self.values[k] - re(self.asymptote)
    }
}

/// Propagates `a rho_ss` under `l` up to `t_max` in steps of `dt`.
pub fn two_time_correlator<T: Real>(rho: &DensityMatrix<T>, l: &Liouvillian<T>, t_max: T, dt: T) -> Result<CorrelatorSeries<T>> {
    let g = l.params.gamma();
    if !(dt > T::zero()) || !(t_max >= T::lit(10.0) / g - dt * T::lit(0.5)) || !t_max.is_finite() {
        return Err(Error::BadGrid(format!("correlator needs dt > 0 and t_max >= 10/gamma, got dt={dt}, t_max={t_max}")));
    }
    if rho.dim() != l.dim() {
        return Err(Error::InvalidState(format!("state dimension {} vs generator {}", rho.dim(), l.dim())));
    }
    let steps = (t_max / dt).round().to_usize().unwrap_or(0);
    let d = l.dim();
    let a = annihilation::<T>(l.cutoff);
    let ad = a.adjoint();
    let p = l.propagator(dt);
    let mut x = vectorize(&a.matmul(&rho.data));
    let trace0 = rho.mean_field();
    // Tr[a^+ X] = sum_{ij} (a^+)_{ij} X_{ji} over column-stacked X
    let ad_t = vectorize(&ad.transpose());
    let read = |v: &[Cx<T>]| v.iter().zip(&ad_t).fold(re(T::zero()), |acc, (x, w)| acc + x * w);
    let trace_of = |v: &[Cx<T>]| (0..d).fold(re(T::zero()), |acc, k| acc + v[k * (d + 1)]);
    let mut values = Vec::with_capacity(steps + 1);
    values.push(read(&x));
    let mut next = vec![re(T::zero()); d * d];
    for _ in 0..steps {
        p.matvec_into(&x, &mut next);
        std::mem::swap(&mut x, &mut next);
        let drift = (trace_of(&x) - trace0).norm();
        if drift > T::lit(1e-6) {
            return Err(Error::PropagationDrift { drift: drift.to_f64_lossy() });
        }
        values.push(read(&x));
    }
    Ok(CorrelatorSeries { dt, values, asymptote: trace0.norm_sqr(), omega_0: l.omega_0 })
}

/// Continuous emission spectrum
/// `S(w) = (gamma_R / pi) Re int_0^inf e^{-i(w - w_0)t} [C(t) - |<a>|^2] dt`
/// on `grid`, with the coherent part `gamma_R |<a>|^2` returned as a delta
/// weight at the drive frequency.
///
/// The one-sided transform is a trapezoid sum evaluated by FFT with the
/// record zero-padded to eight times its length, then linearly interpolated
/// onto the grid. The record is truncated without a window; the fluctuation
/// must have decayed to `1e-8` of its initial size, which bounds the leakage.
pub fn emission_spectrum<T: Real>(corr: &CorrelatorSeries<T>, gamma_r: T, grid: &[T]) -> Result<SpectrumResult<T>> {
    check_increasing(grid)?;
    let m = corr.values.len();
    if m < 2 {
        return Err(Error::BadGrid("correlator record too short".into()));
    }
    let first = corr.fluctuation(0).norm();
    let last = corr.fluctuation(m - 1).norm();
    let floor = T::lit(1e-12) * corr.values[0].norm();
    if last > T::lit(1e-8) * first + floor {
        return Err(Error::UnsettledCorrelator { residual: (last / first).to_f64_lossy() });
    }

    let len = 8 * m;
    let mut buf = vec![re(T::zero()); len];
    for k in 0..m {
        let w = if k == 0 || k == m - 1 { T::lit(0.5) } else { T::one() };
        buf[k] = corr.fluctuation(k) * w;
    }
    FftPlanner::<T>::new().plan_fft_forward(len).process(&mut buf);

    // bin j holds frequency offset 2 pi j / (len dt), wrapped to negative above len/2
    let dt = corr.dt;
    let dnu = T::lit(2.0) * T::PI() / (T::from_usize_lossy(len) * dt);
    let pref = gamma_r / T::PI() * dt;
    let sample = |j: i64| pref * buf[j.rem_euclid(len as i64) as usize].re;
    let half = (len / 2) as i64;
    let continuous = grid
        .iter()
        .map(|&w| {
            let nu = (w - corr.omega_0) / dnu;
            let j = nu.floor();
            let frac = nu - j;
            let j = j.to_i64().unwrap_or(i64::MAX);
            if j < -half || j + 1 > half {
                return T::zero();
            }
            sample(j) * (T::one() - frac) + sample(j + 1) * frac
        })
        .collect();
    Ok(SpectrumResult {
        delta_weight: gamma_r * corr.asymptote,
        delta_at: corr.omega_0,
        grid: grid.to_vec(),
        continuous,
    })
}
