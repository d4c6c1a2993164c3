//! Small dense complex linear algebra: products, LU solves, the matrix
//! exponential and Hermitian spectra. Sizes here never exceed a few hundred,
//! so everything is plain row-major storage.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct CMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<Cx<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Cx::new(T::zero(), T::zero()); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = Cx::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Cx<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Cx<T>] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Cx<T>] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| v * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Cx<T>]) -> Vec<Cx<T>> {
        let mut out = vec![Cx::new(T::zero(), T::zero()); self.rows];
        self.matvec_into(v, &mut out);
        out
    }

    pub fn matvec_into(&self, v: &[Cx<T>], out: &mut [Cx<T>]) {
        assert_eq!(self.cols, v.len());
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.row(r).iter().zip(v).fold(Cx::new(T::zero(), T::zero()), |acc, (&a, &b)| acc + a * b);
        }
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |r, c| self[(r / r2, c / c2)] * other[(r % r2, c % c2)])
    }

    pub fn trace(&self) -> Cx<T> {
        (0..self.rows.min(self.cols)).fold(Cx::new(T::zero(), T::zero()), |acc, k| acc + self[(k, k)])
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> T {
        (0..self.rows).map(|r| self.row(r).iter().fold(T::zero(), |acc, v| acc + v.norm())).fold(T::zero(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, v| acc.max(v.norm()))
    }
}

impl<T> Index<(usize, usize)> for CMat<T> {
    type Output = Cx<T>;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Cx<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for CMat<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Cx<T> {
        &mut self.data[r * self.cols + c]
    }
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: CMat<T>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn new(mut a: CMat<T>) -> Result<Self> {
        let n = a.rows;
        assert_eq!(n, a.cols, "LU needs a square matrix");
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n).map(|r| (r, a[(r, k)].norm())).fold((k, -T::one()), |best, x| if x.1 > best.1 { x } else { best });
            if pmax == T::zero() {
                return Err(Error::SingularSystem(format!("zero pivot in column {k}")));
            }
            if p != k {
                for c in 0..n {
                    a.data.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
            }
            let piv = a[(k, k)];
            for r in k + 1..n {
                let f = a[(r, k)] / piv;
                a[(r, k)] = f;
                if f.re == T::zero() && f.im == T::zero() {
                    continue;
                }
                for c in k + 1..n {
                    let v = a[(k, c)];
                    a[(r, c)] -= f * v;
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    pub fn solve(&self, b: &[Cx<T>]) -> Vec<Cx<T>> {
        let n = self.lu.rows;
        let mut x: Vec<Cx<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for r in 0..n {
            let mut s = x[r];
            for c in 0..r {
                s -= self.lu[(r, c)] * x[c];
            }
            x[r] = s;
        }
        for r in (0..n).rev() {
            let mut s = x[r];
            for c in r + 1..n {
                s -= self.lu[(r, c)] * x[c];
            }
            x[r] = s / self.lu[(r, r)];
        }
        x
    }

    /// Solves `A X = B` column by column.
    pub fn solve_mat(&self, b: &CMat<T>) -> CMat<T> {
        let mut out = CMat::zeros(b.rows, b.cols);
        let mut col = vec![Cx::new(T::zero(), T::zero()); b.rows];
        for c in 0..b.cols {
            for r in 0..b.rows {
                col[r] = b[(r, c)];
            }
            let x = self.solve(&col);
            for r in 0..b.rows {
                out[(r, c)] = x[r];
            }
        }
        out
    }

    /// Absolute values of the U diagonal, in elimination order.
    pub fn pivots(&self) -> Vec<T> {
        (0..self.lu.rows).map(|k| self.lu[(k, k)].norm()).collect()
    }
}

/// Numerical rank by Gaussian elimination with complete pivoting; pivots below
/// `rel_tol` times the largest entry count as zero.
pub fn rank<T: Real>(a: &CMat<T>, rel_tol: T) -> usize {
    let (n, m) = (a.rows, a.cols);
    let mut w = a.clone();
    let tol = rel_tol * a.max_abs();
    let mut rank = 0;
    for k in 0..n.min(m) {
        let mut best = (k, k, -T::one());
        for r in k..n {
            for c in k..m {
                let v = w[(r, c)].norm();
                if v > best.2 {
                    best = (r, c, v);
                }
            }
        }
        if best.2 <= tol {
            break;
        }
        rank += 1;
        let (pr, pc, _) = best;
        for c in 0..m {
            w.data.swap(k * m + c, pr * m + c);
        }
        for r in 0..n {
            w.data.swap(r * m + k, r * m + pc);
        }
        let piv = w[(k, k)];
        for r in k + 1..n {
            let f = w[(r, k)] / piv;
            for c in k..m {
                let v = w[(k, c)];
                w[(r, c)] -= f * v;
            }
        }
    }
    rank
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm<T: Real>(a: &CMat<T>) -> CMat<T> {
    let n = a.rows;
    let norm = a.norm_inf();
    let half = T::lit(0.5);
    let mut s = 0u32;
    let mut scale = T::one();
    while norm * scale > half {
        scale = scale * half;
        s += 1;
    }
    let x = a.scale(Cx::new(scale, T::zero()));
    // ||x|| <= 1/2: 20 terms push the truncation error far below f64 epsilon.
    let mut term = CMat::identity(n);
    let mut sum = CMat::identity(n);
    for k in 1..=20 {
        term = term.matmul(&x).scale(Cx::new(T::one() / T::from_usize_lossy(k), T::zero()));
        sum = sum.add(&term);
    }
    for _ in 0..s {
        sum = sum.matmul(&sum);
    }
    sum
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Runs cyclic Jacobi on the real symmetric embedding `[[Re, -Im], [Im, Re]]`,
/// whose spectrum is that of the input with every eigenvalue doubled up.
pub fn hermitian_eigenvalues<T: Real>(h: &CMat<T>) -> Vec<T> {
    let n = h.rows;
    let m = 2 * n;
    let mut a = vec![T::zero(); m * m];
    for r in 0..n {
        for c in 0..n {
            // symmetrize to absorb rounding-level anti-Hermitian parts
            let v = (h[(r, c)] + h[(c, r)].conj()) * T::lit(0.5);
            a[r * m + c] = v.re;
            a[(r + n) * m + (c + n)] = v.re;
            a[(r + n) * m + c] = v.im;
            a[r * m + (c + n)] = -v.im;
        }
    }
    let mut ev = jacobi_symmetric(&mut a, m);
    ev.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    ev.into_iter().step_by(2).collect()
}

fn jacobi_symmetric<T: Real>(a: &mut [T], n: usize) -> Vec<T> {
    let two = T::lit(2.0);
    for _sweep in 0..100 {
        let mut off = T::zero();
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    off += a[r * n + c] * a[r * n + c];
                }
            }
        }
        let diag: T = (0..n).fold(T::zero(), |acc, k| acc + a[k * n + k] * a[k * n + k]);
        if off <= T::EPS * T::EPS * diag.max(T::min_positive_value()) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let t = if theta == T::zero() { T::one() } else { t };
                let cs = T::one() / (t * t + T::one()).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = cs * akp - sn * akq;
                    a[k * n + q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = cs * apk - sn * aqk;
                    a[q * n + k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    (0..n).map(|k| a[k * n + k]).collect()
}

/// Eigenvalues of a real 2x2 matrix `[[a, b], [c, d]]`.
pub fn eigenvalues_2x2<T: Real>(a: T, b: T, c: T, d: T) -> [Cx<T>; 2] {
    let half = T::lit(0.5);
    let tr = a + d;
    let det = a * d - b * c;
    let disc = tr * tr * T::lit(0.25) - det;
    if disc >= T::zero() {
        let s = disc.sqrt();
        [Cx::new(tr * half - s, T::zero()), Cx::new(tr * half + s, T::zero())]
    } else {
        let s = (-disc).sqrt();
        [Cx::new(tr * half, -s), Cx::new(tr * half, s)]
    }
}
