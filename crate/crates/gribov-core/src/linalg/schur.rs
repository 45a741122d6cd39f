//! General complex eigensolver: Householder reduction to Hessenberg form, then
//! single-shift QR with Wilkinson shifts and occasional exceptional shifts.
//! Produces a Schur factorization M = Q T Q*; eigenvectors come from a guarded
//! triangular backsolve. The spectra this crate feeds in are simple for generic
//! couplings, so no defective-case machinery exists; a defective input shows up
//! as a large reported residual, not a wrong answer presented confidently.

use crate::error::{Error, Result};
use crate::fock::FockMatrix;
use crate::scalar::{Real, C};
use num_complex::Complex;

pub struct Schur<T> {
    pub t: FockMatrix<T>,
    pub q: FockMatrix<T>,
}

fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

/// Unitary 2x2 [[u11, u12], [u21, u22]] with U (x; y)^T = (r; 0)^T.
fn rotation<T: Real>(x: C<T>, y: C<T>) -> (C<T>, C<T>, C<T>, C<T>) {
    let rho = (x.norm_sqr() + y.norm_sqr()).sqrt();
    if rho == T::zero() {
        return (
            Complex::new(T::one(), T::zero()),
            czero(),
            czero(),
            Complex::new(T::one(), T::zero()),
        );
    }
    let inv = T::one() / rho;
    (x.conj() * inv, y.conj() * inv, -y * inv, x * inv)
}

pub fn hessenberg<T: Real>(m: &FockMatrix<T>) -> Schur<T> {
    let n = m.dim();
    let mut a = m.clone();
    let mut q = FockMatrix::identity(n, m.offset());
    if n < 3 {
        return Schur { t: a, q };
    }
    for k in 0..(n - 2) {
        // Householder vector for column k below the subdiagonal
        let mut v: Vec<C<T>> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let alpha = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if alpha == T::zero() {
            continue;
        }
        let phase = if v[0].norm() == T::zero() {
            Complex::new(T::one(), T::zero())
        } else {
            v[0] / Complex::new(v[0].norm(), T::zero())
        };
        let beta = -phase * alpha;
        v[0] -= beta;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if vn == T::zero() {
            continue;
        }
        let inv = T::one() / vn;
        for z in v.iter_mut() {
            *z = *z * inv;
        }
        let two = T::of(2.0);
        // left: rows k+1.., A -= 2 v (v* A)
        for j in k..n {
            let mut dot = czero();
            for (r, vr) in v.iter().enumerate() {
                dot += vr.conj() * a[(k + 1 + r, j)];
            }
            dot *= two;
            for (r, vr) in v.iter().enumerate() {
                let d = *vr * dot;
                a[(k + 1 + r, j)] -= d;
            }
        }
        // right: cols k+1.., A -= 2 (A v) v*
        for i in 0..n {
            let mut dot = czero();
            for (r, vr) in v.iter().enumerate() {
                dot += a[(i, k + 1 + r)] * *vr;
            }
            dot *= two;
            for (r, vr) in v.iter().enumerate() {
                let d = dot * vr.conj();
                a[(i, k + 1 + r)] -= d;
            }
        }
        // accumulate Q <- Q H
        for i in 0..n {
            let mut dot = czero();
            for (r, vr) in v.iter().enumerate() {
                dot += q[(i, k + 1 + r)] * *vr;
            }
            dot *= two;
            for (r, vr) in v.iter().enumerate() {
                let d = dot * vr.conj();
                q[(i, k + 1 + r)] -= d;
            }
        }
        a[(k + 1, k)] = beta;
        for i in (k + 2)..n {
            a[(i, k)] = czero();
        }
    }
    Schur { t: a, q }
}

/// Shift: eigenvalue of the trailing 2x2 block closest to its bottom-right entry.
fn wilkinson<T: Real>(h: &FockMatrix<T>, hi: usize) -> C<T> {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let half = T::of(0.5);
    let mid = (a - d) * half;
    let disc = (mid * mid + b * c).sqrt();
    let l1 = d + mid + disc;
    let l2 = d + mid - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// QR iteration on a Hessenberg matrix; returns the Schur pair with T upper
/// triangular. Iteration budget 60 sweeps per eigenvalue.
pub fn schur_from_hessenberg<T: Real>(mut s: Schur<T>) -> Result<Schur<T>> {
    let n = s.t.dim();
    if n == 0 {
        return Ok(s);
    }
    let hnorm = s.t.norm_frobenius();
    let eps = T::epsilon();
    let tiny = T::min_positive_value() / eps * T::of(4.0);
    let floor = tiny.max(eps * hnorm * T::of(1e-3));
    let mut hi = n - 1;
    let mut stalls = 0usize;
    let mut budget = 60 * n;
    'outer: while hi > 0 {
        // deflation scan for the block ending at hi
        let mut lo = hi;
        while lo > 0 {
            let small = eps * (s.t[(lo - 1, lo - 1)].norm() + s.t[(lo, lo)].norm());
            if s.t[(lo, lo - 1)].norm() <= small.max(floor) {
                s.t[(lo, lo - 1)] = czero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            stalls = 0;
            continue 'outer;
        }
        if budget == 0 {
            return Err(Error::NoConvergence(format!(
                "QR budget exhausted with active block [{lo}, {hi}] of {n}"
            )));
        }
        budget -= 1;
        stalls += 1;
        let sigma = if stalls % 12 == 0 {
            // exceptional shift breaks symmetry-induced stalls
            s.t[(hi, hi)] + Complex::new(T::of(0.75) * s.t[(hi, hi - 1)].norm(), T::zero())
        } else {
            wilkinson(&s.t, hi)
        };
        // implicit single-shift bulge chase on [lo, hi]
        let mut x = s.t[(lo, lo)] - sigma;
        let mut y = s.t[(lo + 1, lo)];
        for k in lo..hi {
            let (u11, u12, u21, u22) = rotation(x, y);
            let colstart = k.saturating_sub(1);
            // left rows k, k+1
            for j in colstart..n {
                let t1 = s.t[(k, j)];
                let t2 = s.t[(k + 1, j)];
                s.t[(k, j)] = u11 * t1 + u12 * t2;
                s.t[(k + 1, j)] = u21 * t1 + u22 * t2;
            }
            // right cols k, k+1 (apply U*)
            let rowend = (k + 2).min(hi);
            for i in 0..=rowend {
                let t1 = s.t[(i, k)];
                let t2 = s.t[(i, k + 1)];
                s.t[(i, k)] = t1 * u11.conj() + t2 * u12.conj();
                s.t[(i, k + 1)] = t1 * u21.conj() + t2 * u22.conj();
            }
            for i in 0..n {
                let q1 = s.q[(i, k)];
                let q2 = s.q[(i, k + 1)];
                s.q[(i, k)] = q1 * u11.conj() + q2 * u12.conj();
                s.q[(i, k + 1)] = q1 * u21.conj() + q2 * u22.conj();
            }
            if k + 1 < hi {
                x = s.t[(k + 1, k)];
                y = s.t[(k + 2, k)];
            }
        }
    }
    // hygiene: T is upper triangular from here on
    for i in 0..n {
        for j in 0..i {
            s.t[(i, j)] = czero();
        }
    }
    Ok(s)
}

pub fn schur_decompose<T: Real>(m: &FockMatrix<T>) -> Result<Schur<T>> {
    schur_from_hessenberg(hessenberg(m))
}

/// Eigenvectors from the Schur pair by guarded triangular backsolve; column k
/// corresponds to t[(k,k)].
pub fn eigenvectors_from_schur<T: Real>(s: &Schur<T>) -> FockMatrix<T> {
    let n = s.t.dim();
    let tnorm = s.t.norm_frobenius();
    let guard = T::epsilon() * tnorm.max(T::min_positive_value());
    let mut vecs = FockMatrix::zeros(n, s.t.offset());
    let mut y = vec![czero::<T>(); n];
    for k in 0..n {
        for v in y.iter_mut() {
            *v = czero();
        }
        y[k] = Complex::new(T::one(), T::zero());
        let lam = s.t[(k, k)];
        for i in (0..k).rev() {
            let mut acc = czero::<T>();
            for j in (i + 1)..=k {
                acc += s.t[(i, j)] * y[j];
            }
            let mut den = s.t[(i, i)] - lam;
            if den.norm() < guard {
                den = Complex::new(guard, T::zero());
            }
            y[i] = -acc / den;
            // rescale if the solve is blowing up
            let mag = y[i].norm();
            if mag > T::of(1e100) {
                let inv = T::one() / mag;
                for v in y.iter_mut().take(k + 1) {
                    *v = *v * inv;
                }
            }
        }
        // v = Q y, normalized
        let mut norm2 = T::zero();
        for i in 0..n {
            let mut acc = czero::<T>();
            for j in 0..=k {
                acc += s.q[(i, j)] * y[j];
            }
            vecs[(i, k)] = acc;
            norm2 += acc.norm_sqr();
        }
        let inv = T::one() / norm2.sqrt();
        for i in 0..n {
            let v = vecs[(i, k)] * Complex::new(inv, T::zero());
            vecs[(i, k)] = v;
        }
    }
    vecs
}
