//! Fock-truncated master equation for the classically driven Kerr cavity.
//!
//! In the frame rotating at the drive frequency the cavity obeys
//! `d rho/dt = -i[H, rho] + gamma (2 a rho a^+ - a^+ a rho - rho a^+ a)` with
//! `H = -Delta a^+ a + u a^+ a^+ a a + f a^+ + f* a`. Density matrices are
//! vectorized column by column, `vec(A X B) = (B^T (x) A) vec(X)`, and the
//! superoperator is stored dense.

mod regression;

pub use regression::{emission_spectrum, two_time_correlator, CorrelatorSeries};

use crate::error::{Error, Result};
use crate::linalg::{expm, hermitian_eigenvalues, rank, CMat, Lu};
use crate::model::{CavityParams, PulseSpec};
use crate::scalar::{cx, re, Cx, Real};

/// Default truncation: photon numbers `0..=8`.
pub const DEFAULT_CUTOFF: usize = 8;

/// Cavity density matrix in the number basis `|0>..|N>`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    pub data: CMat<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn vacuum(cutoff: usize) -> Self {
        let mut data = CMat::zeros(cutoff + 1, cutoff + 1);
        data[(0, 0)] = re(T::one());
        Self { data }
    }

    pub fn dim(&self) -> usize {
        self.data.rows()
    }

    pub fn cutoff(&self) -> usize {
        self.dim() - 1
    }

    pub fn trace(&self) -> Cx<T> {
        self.data.trace()
    }

    pub fn population(&self, n: usize) -> T {
        self.data[(n, n)].re
    }

    pub fn hermiticity_defect(&self) -> T {
        self.data.sub(&self.data.adjoint()).max_abs()
    }

    pub fn min_eigenvalue(&self) -> T {
        let herm = self.data.add(&self.data.adjoint()).scale(re(T::lit(0.5)));
        hermitian_eigenvalues(&herm)[0]
    }

    /// `<a>`.
    pub fn mean_field(&self) -> Cx<T> {
        (1..self.dim()).fold(re(T::zero()), |acc, n| acc + self.data[(n, n - 1)] * T::from_usize_lossy(n).sqrt())
    }

    /// Normally ordered moment `Tr[a^+^n a^n rho]`.
    pub fn normal_moment(&self, n: usize) -> T {
        (n..self.dim()).fold(T::zero(), |acc, k| {
            let falling = (k + 1 - n..=k).fold(T::one(), |p, j| p * T::from_usize_lossy(j));
            acc + falling * self.population(k)
        })
    }

    pub fn photon_number(&self) -> T {
        self.normal_moment(1)
    }

    /// Checks trace, Hermiticity and positivity at the stated tolerances.
    pub fn check(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - re(T::one())).norm() > T::lit(1e-10) {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let herm = self.hermiticity_defect();
        if herm > T::lit(1e-12) {
            return Err(Error::InvalidState(format!("hermiticity defect {herm:e}")));
        }
        let min = self.min_eigenvalue();
        if min < -T::lit(1e-8) {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    fn vectorized(&self) -> Vec<Cx<T>> {
        vectorize(&self.data)
    }
}

/// Column-stacking `vec`.
pub fn vectorize<T: Real>(m: &CMat<T>) -> Vec<Cx<T>> {
    let d = m.rows();
    (0..d * d).map(|i| m[(i % d, i / d)]).collect()
}

pub fn unvectorize<T: Real>(v: &[Cx<T>], d: usize) -> CMat<T> {
    CMat::from_fn(d, d, |r, c| v[c * d + r])
}

/// Annihilation operator on `|0>..|N>`.
pub fn annihilation<T: Real>(cutoff: usize) -> CMat<T> {
    let d = cutoff + 1;
    CMat::from_fn(d, d, |r, c| if c == r + 1 { re(T::from_usize_lossy(c).sqrt()) } else { re(T::zero()) })
}

/// Rotating-frame generator for a fixed drive.
#[derive(Debug, Clone)]
pub struct Liouvillian<T> {
    pub params: CavityParams<T>,
    pub omega_0: T,
    pub drive: Cx<T>,
    pub cutoff: usize,
    pub matrix: CMat<T>,
}

/// Generator for the drive `f = sqrt(gamma_L / tau) b` of `pulse`.
pub fn build_liouvillian<T: Real>(params: &CavityParams<T>, pulse: &PulseSpec<T>, cutoff: usize) -> Result<Liouvillian<T>> {
    Liouvillian::new(params, pulse.omega_0, pulse.drive(params), cutoff)
}

impl<T: Real> Liouvillian<T> {
    /// Generator for an explicit drive amplitude `f`.
    pub fn new(params: &CavityParams<T>, omega_0: T, drive: Cx<T>, cutoff: usize) -> Result<Self> {
        if cutoff < 1 {
            return Err(Error::CutoffTooSmall { level: cutoff, population: 1.0 });
        }
        let d = cutoff + 1;
        let a = annihilation::<T>(cutoff);
        let ad = a.adjoint();
        let num = ad.matmul(&a);
        let pair = ad.matmul(&ad).matmul(&a).matmul(&a);
        let det = params.detuning(omega_0);
        let h = num
            .scale(re(-det))
            .add(&pair.scale(re(params.u)))
            .add(&ad.scale(drive))
            .add(&a.scale(drive.conj()));
        let id = CMat::identity(d);
        let mi = cx(T::zero(), -T::one());
        let g = re(params.gamma());
        // -i H rho + i rho H
        let coherent = id.kron(&h).scale(mi).sub(&h.transpose().kron(&id).scale(mi));
        // gamma (2 a rho a^+ - n rho - rho n)
        let jump = ad.transpose().kron(&a).scale(re(T::lit(2.0)));
        let decay = jump.sub(&id.kron(&num)).sub(&num.transpose().kron(&id)).scale(g);
        Ok(Self { params: *params, omega_0, drive, cutoff, matrix: coherent.add(&decay) })
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    /// `L(rho)` for a matrix in the number basis.
    pub fn apply(&self, rho: &CMat<T>) -> CMat<T> {
        unvectorize(&self.matrix.matvec(&vectorize(rho)), self.dim())
    }

    /// Propagator `exp(L dt)` on vectorized matrices.
    pub fn propagator(&self, dt: T) -> CMat<T> {
        expm(&self.matrix.scale(re(dt)))
    }
}

/// Density matrices at `t = k dt`, `k = 0..=steps`, each checked against the
/// trace, Hermiticity and positivity invariants.
pub fn propagate<T: Real>(l: &Liouvillian<T>, rho0: &DensityMatrix<T>, dt: T, steps: usize) -> Result<Vec<DensityMatrix<T>>> {
    let p = l.propagator(dt);
    let d = l.dim();
    let mut v = rho0.vectorized();
    let mut out = vec![rho0.clone()];
    for _ in 0..steps {
        v = p.matvec(&v);
        let mut data = unvectorize(&v, d);
        // rounding leaves an antihermitian residue of order eps
        data = data.add(&data.adjoint()).scale(re(T::lit(0.5)));
        let rho = DensityMatrix { data };
        let drift = (rho.trace() - re(T::one())).norm();
        if drift > T::lit(1e-6) {
            return Err(Error::PropagationDrift { drift: drift.to_f64_lossy() });
        }
        rho.check()?;
        v = rho.vectorized();
        out.push(rho);
    }
    Ok(out)
}

/// Stationary state of `l`.
///
/// Solves `L vec(rho) = 0` with one (redundant) diagonal equation replaced
/// by `Tr rho = 1`. An ill-conditioned solve falls back to integrating from
/// the vacuum until the state stops changing. The top Fock level must hold
/// less than `1e-8` of the population.
pub fn steady_state<T: Real>(l: &Liouvillian<T>) -> Result<DensityMatrix<T>> {
    let d = l.dim();
    let dd = d * d;
    let mut m = l.matrix.clone();
    for c in 0..dd {
        m[(0, c)] = re(if c % (d + 1) == 0 { T::one() } else { T::zero() });
    }
    let mut rhs = vec![re(T::zero()); dd];
    rhs[0] = re(T::one());

    let kernel = || dd - rank(&l.matrix, T::lit(1e-10));
    let solved = match Lu::new(m) {
        Ok(lu) => {
            let piv = lu.pivots();
            let max = piv.iter().copied().fold(T::zero(), T::max);
            let min = piv.iter().copied().fold(T::infinity(), T::min);
            if min < T::lit(1e-13) * max {
                let dimension = kernel();
                if dimension > 1 {
                    return Err(Error::NonUniqueSteadyState { dimension });
                }
                None
            } else {
                Some(unvectorize(&lu.solve(&rhs), d))
            }
        }
        Err(_) => {
            let dimension = kernel();
            if dimension > 1 {
                return Err(Error::NonUniqueSteadyState { dimension });
            }
            None
        }
    };

    let residual_ok = |x: &CMat<T>| l.apply(x).max_abs() <= T::lit(1e-10);
    let data = match solved {
        Some(x) if residual_ok(&x) => x,
        _ => relax(l)?,
    };
    let data = data.add(&data.adjoint()).scale(re(T::lit(0.5)));
    let tr = data.trace();
    let rho = DensityMatrix { data: data.scale(re(T::one()) / tr) };
    rho.check()?;
    let top = rho.population(l.cutoff);
    if top > T::lit(1e-8) {
        return Err(Error::CutoffTooSmall { level: l.cutoff, population: top.to_f64_lossy() });
    }
    Ok(rho)
}

/// Long-time integration from the vacuum in steps of `1/gamma`.
fn relax<T: Real>(l: &Liouvillian<T>) -> Result<CMat<T>> {
    let p = l.propagator(T::one() / l.params.gamma());
    let mut v = DensityMatrix::<T>::vacuum(l.cutoff).vectorized();
    for _ in 0..100_000 {
        let next = p.matvec(&v);
        let change = next.iter().zip(&v).map(|(a, b)| (a - b).norm()).fold(T::zero(), T::max);
        v = next;
        if change < T::lit(1e-14) {
            let x = unvectorize(&v, l.dim());
            if l.apply(&x).max_abs() <= T::lit(1e-10) {
                return Ok(x);
            }
        }
    }
    Err(Error::SingularSystem("steady state did not converge under time integration".into()))
}

/// Equal-time coherence `g^(n) = <a^+^n a^n> / <a^+ a>^n`.
pub fn gn<T: Real>(rho: &DensityMatrix<T>, n: usize) -> Result<T> {
    assert!(n >= 1, "coherence order starts at 1");
    let mean = rho.photon_number();
    if mean < T::lit(1e-14) {
        return Err(Error::VanishingDenominator { mean: mean.to_f64_lossy() });
    }
    if rho.cutoff() < n + 4 {
        return Err(Error::CutoffTooSmall { level: rho.cutoff(), population: f64::NAN });
    }
    Ok(rho.normal_moment(n) / mean.powi(n as i32))
}

/// One row of a `g^(n)` scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GnRow<T> {
    pub detuning: T,
    pub photon_number: T,
    pub g2: T,
    pub g3: T,
    pub g4: T,
}

/// `g^(2..4)` of the steady state at a single drive detuning.
pub fn gn_point<T: Real>(params: &CavityParams<T>, drive: Cx<T>, detuning: T, cutoff: usize) -> Result<GnRow<T>> {
    let l = Liouvillian::new(params, params.omega_c + detuning, drive, cutoff)?;
    let rho = steady_state(&l)?;
    Ok(GnRow { detuning, photon_number: rho.photon_number(), g2: gn(&rho, 2)?, g3: gn(&rho, 3)?, g4: gn(&rho, 4)? })
}

/// `g^(2..4)` over a grid of detunings `omega_0 - omega_c` at fixed drive.
pub fn gn_scan<T: Real>(params: &CavityParams<T>, drive: Cx<T>, detunings: &[T], cutoff: usize) -> Result<Vec<GnRow<T>>> {
    detunings.iter().map(|&det| gn_point(params, drive, det, cutoff)).collect()
}

#[cfg(test)]
mod tests;
