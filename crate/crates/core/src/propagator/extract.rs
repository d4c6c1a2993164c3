use super::{incident_amplitude, GridSpec, Stepper, TwoPhotonField};
use crate::error::{Error, Result};
use crate::model::{CavityParams, PulseSpec};
use crate::scalar::{re, Cx, Real};
use crate::scattering::Pair;

/// Outgoing two-photon amplitudes after the pulse has left the junction.
///
/// Values are `tau * psi`, the scale on which the incident envelope is the
/// tabulated `f`, over the arrival-time bins of the grid.
#[derive(Debug, Clone)]
pub struct ScatteredAmplitudes<T> {
    pub grid: GridSpec<T>,
    pub pulse: PulseSpec<T>,
    pub ll: Vec<Cx<T>>,
    pub rr: Vec<Cx<T>>,
    pub lr: Vec<Cx<T>>,
    /// Bin nearest to the centre of the incident pulse.
    pub center: usize,
    /// Single-photon output envelopes for the incident marginal profile.
    pub c_l: Vec<Cx<T>>,
    pub c_r: Vec<Cx<T>>,
}

/// One row of a cut through the pulse centre along `x1 = x2 + d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutRow<T> {
    pub d: T,
    pub ll: T,
    pub rr: T,
    pub lr: T,
}

impl<T: Real> ScatteredAmplitudes<T> {
    pub fn n(&self) -> usize {
        self.grid.n_bins
    }

    pub fn get(&self, pair: Pair, k1: usize, k2: usize) -> Cx<T> {
        let i = k1 * self.n() + k2;
        match pair {
            Pair::LL => self.ll[i],
            Pair::RR => self.rr[i],
            Pair::LR => self.lr[i],
        }
    }

    /// Incident envelope `f` at a pair of bins.
    pub fn incident(&self, k1: usize, k2: usize) -> T {
        incident_amplitude(&self.pulse, self.grid.s_center(k1), self.grid.s_center(k2)) * self.pulse.tau
    }

    /// Outgoing amplitude at coincidence, relative to the incident envelope,
    /// both taken at the pulse centre.
    pub fn center_transfer(&self, pair: Pair) -> Cx<T> {
        let c = self.center;
        self.get(pair, c, c) / self.incident(c, c)
    }

    /// `|a_ij|^2` at coincidence normalized as in [`Self::center_transfer`].
    pub fn center_probability(&self, pair: Pair) -> T {
        self.center_transfer(pair).norm_sqr()
    }

    /// Coincidence probability along `x1 = x2`, integrated over the pulse and
    /// divided by the same integral of the incident `|f|^2`. Unlike the
    /// single-point ratio this is insensitive to the delay the cavity imposes
    /// on the pulse, and it is the quantity compared with `|a_ij(0)|^2` of the
    /// monochromatic theory.
    pub fn coincidence_ratio(&self, pair: Pair) -> T {
        let (mut num, mut den) = (T::zero(), T::zero());
        for k in 0..self.n() {
            num += self.get(pair, k, k).norm_sqr();
            den += self.incident(k, k).powi(2);
        }
        num / den
    }

    /// Cut along the anti-diagonal through the pulse centre, so that the pair
    /// centroid stays fixed while the separation `d = x1 - x2` varies.
    /// Intensities are divided by the incident `|f|^2` at the centre.
    pub fn cut(&self, max_d: T) -> Vec<CutRow<T>> {
        let c = self.center as isize;
        let n = self.n() as isize;
        let h = self.grid.h;
        let norm = self.incident(self.center, self.center).powi(2);
        let jmax = (max_d / (T::lit(2.0) * h)).floor().to_isize().unwrap_or(0);
        let mut rows = Vec::new();
        for j in -jmax..=jmax {
            let (k1, k2) = (c + j, c - j);
            if k1 < 0 || k2 < 0 || k1 >= n || k2 >= n {
                continue;
            }
            let (k1, k2) = (k1 as usize, k2 as usize);
            rows.push(CutRow {
                // arrival time s = t - x, so x1 - x2 = s2 - s1
                d: -T::lit(2.0) * T::from_isize(j).unwrap() * h,
                ll: self.get(Pair::LL, k1, k2).norm_sqr() / norm,
                rr: self.get(Pair::RR, k1, k2).norm_sqr() / norm,
                lr: self.get(Pair::LR, k1, k2).norm_sqr() / norm,
            });
        }
        rows.sort_by(|a, b| a.d.partial_cmp(&b.d).unwrap());
        rows
    }
}

/// Outgoing amplitudes of a field whose pulse has fully crossed the junction.
pub fn extract_amplitudes<T: Real>(field: &TwoPhotonField<T>, params: &CavityParams<T>) -> Result<ScatteredAmplitudes<T>> {
    check_drained(field)?;
    into_amplitudes(field.clone(), params)
}

/// As [`extract_amplitudes`], reusing the field's storage.
pub fn into_amplitudes<T: Real>(field: TwoPhotonField<T>, params: &CavityParams<T>) -> Result<ScatteredAmplitudes<T>> {
    check_drained(&field)?;
    let tau = field.pulse.tau;
    let grid = field.grid;
    let n = grid.n_bins;
    let h = grid.h;
    let marginal: Vec<Cx<T>> = (0..n)
        .map(|a| {
            let w = (0..n).fold(T::zero(), |acc, b| acc + incident_amplitude(&field.pulse, grid.s_center(a), grid.s_center(b)).powi(2));
            re((w * h).sqrt())
        })
        .collect();
    let (c_l, c_r) = single_photon_response(params, field.pulse.omega_0, grid, &marginal)?;
    let scale = |mut v: Vec<Cx<T>>| {
        v.iter_mut().for_each(|z| *z = *z * tau);
        v
    };
    Ok(ScatteredAmplitudes {
        grid,
        pulse: field.pulse,
        ll: scale(field.ll),
        rr: scale(field.rr),
        lr: scale(field.lr),
        center: grid.nearest_bin(T::zero()),
        c_l,
        c_r,
    })
}

fn check_drained<T: Real>(field: &TwoPhotonField<T>) -> Result<()> {
    if field.steps < field.n() {
        return Err(Error::InvalidState(format!(
            "{} of {} bins have not reached the junction",
            field.n() - field.steps,
            field.n()
        )));
    }
    let residual = field.cavity_share();
    if residual > T::lit(1e-6) {
        return Err(Error::CavityNotEmpty { residual: residual.to_f64_lossy() });
    }
    Ok(())
}

/// Propagates one photon incident from the left with arrival-time envelope
/// `input` (one value per bin) and returns its left and right output
/// envelopes, using the same junction map as the two-photon evolution.
pub fn single_photon_response<T: Real>(
    params: &CavityParams<T>,
    omega_0: T,
    grid: GridSpec<T>,
    input: &[Cx<T>],
) -> Result<(Vec<Cx<T>>, Vec<Cx<T>>)> {
    grid.check()?;
    if input.len() != grid.n_bins {
        return Err(Error::BadGrid(format!("{} samples for {} bins", input.len(), grid.n_bins)));
    }
    let u1 = Stepper::new(params, omega_0, grid.h)?.one_photon_map();
    let sh = grid.h.sqrt();
    let mut cav = re(T::zero());
    let mut out_l = Vec::with_capacity(input.len());
    let mut out_r = Vec::with_capacity(input.len());
    for &x in input {
        let v = [cav, x * sh, re(T::zero())];
        let w: Vec<Cx<T>> = (0..3).map(|r| u1[r][0] * v[0] + u1[r][1] * v[1] + u1[r][2] * v[2]).collect();
        cav = w[0];
        out_l.push(w[1] / sh);
        out_r.push(w[2] / sh);
    }
    Ok((out_l, out_r))
}

/// Output of an arbitrary two-photon input under independent single-photon
/// scattering of each photon: the `u = 0` limit, returned as `(ll, rr, lr)`
/// in the field's normalization.
pub fn linear_pair_response<T: Real>(
    params: &CavityParams<T>,
    omega_0: T,
    grid: GridSpec<T>,
    input: &[Cx<T>],
) -> Result<(Vec<Cx<T>>, Vec<Cx<T>>, Vec<Cx<T>>)> {
    let n = grid.n_bins;
    if input.len() != n * n {
        return Err(Error::BadGrid(format!("{} samples for {n}x{n} bins", input.len())));
    }
    // second photon first, row by row
    let mut half_l = vec![re(T::zero()); n * n];
    let mut half_r = vec![re(T::zero()); n * n];
    for k1 in 0..n {
        let (l, r) = single_photon_response(params, omega_0, grid, &input[k1 * n..(k1 + 1) * n])?;
        half_l[k1 * n..(k1 + 1) * n].copy_from_slice(&l);
        half_r[k1 * n..(k1 + 1) * n].copy_from_slice(&r);
    }
    let mut ll = vec![re(T::zero()); n * n];
    let mut rr = vec![re(T::zero()); n * n];
    let mut lr = vec![re(T::zero()); n * n];
    let mut col = vec![re(T::zero()); n];
    for k2 in 0..n {
        for k1 in 0..n {
            col[k1] = half_l[k1 * n + k2];
        }
        let (l, _) = single_photon_response(params, omega_0, grid, &col)?;
        for k1 in 0..n {
            ll[k1 * n + k2] = l[k1];
        }
        for k1 in 0..n {
            col[k1] = half_r[k1 * n + k2];
        }
        let (l, r) = single_photon_response(params, omega_0, grid, &col)?;
        for k1 in 0..n {
            lr[k1 * n + k2] = l[k1];
            rr[k1 * n + k2] = r[k1];
        }
    }
    Ok((ll, rr, lr))
}
