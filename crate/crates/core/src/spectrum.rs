//! Frequency grids and the spectrum container shared by the spectral engines.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Elastic delta weight plus a sampled continuous spectral density.
///
/// The delta peak sits at `delta_at` and is never rasterized onto `grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult<T> {
    pub delta_weight: T,
    pub delta_at: T,
    pub grid: Vec<T>,
    pub continuous: Vec<T>,
}

impl<T: Real> SpectrumResult<T> {
    /// Index and value of the largest continuous sample.
    pub fn peak(&self) -> Option<(usize, T)> {
        self.continuous
            .iter()
            .copied()
            .enumerate()
            .fold(None, |best, (i, v)| match best {
                Some((_, b)) if b >= v => best,
                _ => Some((i, v)),
            })
    }

    /// Continuous part scaled to unit maximum.
    pub fn normalized(&self) -> Vec<T> {
        let max = self.peak().map(|(_, v)| v).unwrap_or_else(T::zero);
        if max > T::zero() {
            self.continuous.iter().map(|&v| v / max).collect()
        } else {
            self.continuous.clone()
        }
    }
}

/// `n` uniformly spaced points from `lo` to `hi` inclusive.
pub fn uniform_grid<T: Real>(lo: T, hi: T, n: usize) -> Result<Vec<T>> {
    if n < 2 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::BadGrid(format!("need n >= 2 and lo < hi, got n={n}, lo={lo}, hi={hi}")));
    }
    let step = (hi - lo) / T::from_usize_lossy(n - 1);
    Ok((0..n).map(|k| lo + step * T::from_usize_lossy(k)).collect())
}

/// 2001 points spanning `omega_0 +- max(5 gamma, 2|u|)`, wide enough to hold
/// both four-wave-mixing ridges.
pub fn default_grid<T: Real>(omega_0: T, gamma: T, u: T) -> Vec<T> {
    let half = (T::lit(5.0) * gamma).max(T::lit(2.0) * u.abs());
    uniform_grid(omega_0 - half, omega_0 + half, 2001).expect("positive span")
}

pub(crate) fn check_increasing<T: Real>(grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::BadGrid("empty frequency grid".into()));
    }
    if grid.iter().any(|w| !w.is_finite()) {
        return Err(Error::BadGrid("non-finite frequency".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::BadGrid("frequency grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Full width of a peak measured on one flank: twice the distance from the
/// peak at index `peak` to the half-maximum crossing found by walking in
/// direction `dir` (`+1` towards larger `x`, `-1` towards smaller).
///
/// One-flank widths stay meaningful when the other flank runs into a
/// neighbouring feature. Returns `None` if the curve never drops to half
/// maximum before the end of the samples.
pub fn fwhm_one_side<T: Real>(x: &[T], y: &[T], peak: usize, dir: i32) -> Option<T> {
    assert_eq!(x.len(), y.len());
    let half = y[peak] * T::lit(0.5);
    let mut i = peak;
    loop {
        let j = if dir > 0 { i.checked_add(1).filter(|&j| j < x.len())? } else { i.checked_sub(1)? };
        if y[j] <= half {
            let frac = (y[i] - half) / (y[i] - y[j]);
            let xc = x[i] + (x[j] - x[i]) * frac;
            return Some(T::lit(2.0) * (xc - x[peak]).abs());
        }
        i = j;
    }
}

/// Relative L2 distance `||a - b|| / ||b||`.
pub fn relative_l2<T: Real>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len());
    let mut num = T::zero();
    let mut den = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        num += (x - y) * (x - y);
        den += y * y;
    }
    (num / den).sqrt()
}
