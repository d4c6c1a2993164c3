//! Little-endian binary snapshots of a [`TwoPhotonField`].
//!
//! Layout: magic `KJCP`, `u32` version, `u64` bin count, `f64` h and s_min,
//! `u64` completed steps, pulse (`f64` omega_0, tau, `u8` envelope tag,
//! `f64` b re/im), then the complex arrays `ll`, `rr`, `lr` (row-major),
//! `lc`, `rc` and the scalar `cc`, each value as two `f64`.

use std::io::{Read, Write};

use super::{GridSpec, TwoPhotonField};
use crate::error::{Error, Result};
use crate::model::{Envelope, PulseSpec};
use crate::scalar::{cx, Cx, Real};

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"KJCP";
const VERSION: u32 = 1;

fn envelope_tag(e: Envelope) -> u8 {
    match e {
        Envelope::Monochromatic => 0,
        Envelope::UncorrelatedGaussian => 1,
        Envelope::CorrelatedGaussian => 2,
    }
}

pub fn write_checkpoint<T: Real, W: Write>(field: &TwoPhotonField<T>, mut w: W) -> Result<()> {
    let f = |x: T| x.to_f64_lossy().to_le_bytes();
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(field.grid.n_bins as u64).to_le_bytes())?;
    w.write_all(&f(field.grid.h))?;
    w.write_all(&f(field.grid.s_min))?;
    w.write_all(&(field.steps as u64).to_le_bytes())?;
    let p = &field.pulse;
    w.write_all(&f(p.omega_0))?;
    w.write_all(&f(p.tau))?;
    w.write_all(&[envelope_tag(p.envelope)])?;
    w.write_all(&f(p.b.re))?;
    w.write_all(&f(p.b.im))?;
    let mut buf = Vec::with_capacity(16 * field.ll.len());
    for arr in [&field.ll, &field.rr, &field.lr, &field.lc, &field.rc] {
        buf.clear();
        for z in arr.iter() {
            buf.extend_from_slice(&f(z.re));
            buf.extend_from_slice(&f(z.im));
        }
        w.write_all(&buf)?;
    }
    w.write_all(&f(field.cc.re))?;
    w.write_all(&f(field.cc.im))?;
    w.flush()?;
    Ok(())
}

struct Reader<R> {
    inner: R,
}

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut b = [0u8; N];
        self.inner.read_exact(&mut b).map_err(|e| Error::Checkpoint(format!("truncated snapshot: {e}")))?;
        Ok(b)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    fn real<T: Real>(&mut self) -> Result<T> {
        Ok(T::lit(f64::from_le_bytes(self.bytes()?)))
    }

    fn complex<T: Real>(&mut self) -> Result<Cx<T>> {
        let a = self.real()?;
        Ok(cx(a, self.real()?))
    }

    fn complex_vec<T: Real>(&mut self, len: usize) -> Result<Vec<Cx<T>>> {
        let mut raw = vec![0u8; 16 * len];
        self.inner.read_exact(&mut raw).map_err(|e| Error::Checkpoint(format!("truncated snapshot: {e}")))?;
        Ok(raw
            .chunks_exact(16)
            .map(|c| {
                let a = f64::from_le_bytes(c[..8].try_into().unwrap());
                let b = f64::from_le_bytes(c[8..].try_into().unwrap());
                cx(T::lit(a), T::lit(b))
            })
            .collect())
    }
}

pub fn read_checkpoint<T: Real, R: Read>(r: R) -> Result<TwoPhotonField<T>> {
    let mut r = Reader { inner: r };
    if &r.bytes::<4>()? != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint("not a field snapshot".into()));
    }
    let version = u32::from_le_bytes(r.bytes()?);
    if version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported snapshot version {version}")));
    }
    let n = usize::try_from(r.u64()?).map_err(|_| Error::Checkpoint("bin count overflow".into()))?;
    let h = r.real()?;
    let s_min = r.real()?;
    let steps = r.u64()? as usize;
    if n == 0 || steps > n || n.checked_mul(n).is_none() {
        return Err(Error::Checkpoint(format!("inconsistent header: n={n}, steps={steps}")));
    }
    let omega_0 = r.real()?;
    let tau = r.real()?;
    let envelope = match r.bytes::<1>()?[0] {
        0 => Envelope::Monochromatic,
        1 => Envelope::UncorrelatedGaussian,
        2 => Envelope::CorrelatedGaussian,
        t => return Err(Error::Checkpoint(format!("unknown envelope tag {t}"))),
    };
    let b = r.complex()?;
    let pulse = PulseSpec::new(omega_0, tau, envelope).with_b(b);
    let ll = r.complex_vec(n * n)?;
    let rr = r.complex_vec(n * n)?;
    let lr = r.complex_vec(n * n)?;
    let lc = r.complex_vec(n)?;
    let rc = r.complex_vec(n)?;
    let cc = r.complex()?;
    Ok(TwoPhotonField { grid: GridSpec { h, s_min, n_bins: n }, pulse, steps, ll, rr, lr, lc, rc, cc })
}
