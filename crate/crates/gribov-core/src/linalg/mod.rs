//! Self-contained dense complex linear algebra: eigendecomposition (Hermitian
//! and general), singular values and Schatten norms, the matrix exponential,
//! and diagonal resolvents. No external solver; everything here is built on
//! the submodules' Householder/QL/QR/LU kernels.

mod expm;
mod hermitian;
mod lu;
mod schur;

pub use lu::Lu;

use crate::error::{Error, Result};
use crate::fock::FockMatrix;
use crate::scalar::{cr, Real, C};
use num_complex::Complex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenMode {
    Hermitian,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    /// exp(-t M); the only direction the semigroup work needs.
    Negative,
}

/// Eigenvalues ordered modulus-ascending (ties by argument ascending), with
/// optional eigenvectors (column k pairs with eigenvalue k) and per-pair
/// residuals ||M v - sigma v|| / ||v|| when vectors were requested.
#[derive(Clone, Debug)]
pub struct SpectralData<T> {
    pub eigenvalues: Vec<C<T>>,
    pub eigenvectors: Option<FockMatrix<T>>,
    pub residuals: Vec<T>,
    /// Residual bound the solve is held to: 1e-10 * frobenius(M).
    pub tolerance: T,
}

fn spectral_order<T: Real>(z: &C<T>) -> (T, T) {
    (z.norm(), z.arg())
}

fn sort_spectrum<T: Real>(vals: &mut Vec<C<T>>, vecs: &mut Option<FockMatrix<T>>) {
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| {
        spectral_order(&vals[a])
            .partial_cmp(&spectral_order(&vals[b]))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let old_vals = vals.clone();
    for (new, &old) in order.iter().enumerate() {
        vals[new] = old_vals[old];
    }
    if let Some(v) = vecs.as_mut() {
        let old = v.clone();
        for (new, &o) in order.iter().enumerate() {
            for i in 0..old.dim() {
                v[(i, new)] = old[(i, o)];
            }
        }
    }
}

/// Dense eigensolve. Hermitian mode rejects input whose hermiticity defect
/// exceeds 1e-12 * frobenius(M); general mode runs Hessenberg + shifted QR.
/// A residual above the reported tolerance is treated as non-convergence
/// (defective or severely ill-conditioned pair), not returned silently.
pub fn eigen<T: Real>(
    m: &FockMatrix<T>,
    mode: EigenMode,
    want_vectors: bool,
) -> Result<SpectralData<T>> {
    let scale = m.norm_frobenius();
    let tolerance = T::of(1e-10) * scale.max(T::min_positive_value());
    let (mut vals, mut vecs): (Vec<C<T>>, Option<FockMatrix<T>>) = match mode {
        EigenMode::Hermitian => {
            let defect = m.hermiticity_defect();
            if defect > T::of(1e-12) * scale {
                return Err(Error::InvalidInput(format!(
                    "hermitian mode on non-Hermitian input: defect {defect:e} vs norm {scale:e}"
                )));
            }
            let (v, w) = hermitian::hermitian_eigen(m, want_vectors)?;
            (v.into_iter().map(cr).collect(), w)
        }
        EigenMode::General => {
            let s = schur::schur_decompose(m)?;
            let vals: Vec<C<T>> = (0..m.dim()).map(|k| s.t[(k, k)]).collect();
            let vecs = want_vectors.then(|| schur::eigenvectors_from_schur(&s));
            (vals, vecs)
        }
    };
    sort_spectrum(&mut vals, &mut vecs);
    let mut residuals = Vec::new();
    if let Some(v) = vecs.as_ref() {
        for (k, lam) in vals.iter().enumerate() {
            let col = v.col(k);
            let mv = m.mul_vec(&col);
            let mut acc = T::zero();
            for i in 0..m.dim() {
                acc += (mv[i] - *lam * col[i]).norm_sqr();
            }
            residuals.push(acc.sqrt());
        }
        if let Some(worst) = residuals
            .iter()
            .cloned()
            .fold(None::<T>, |a, r| Some(a.map_or(r, |x| x.max(r))))
        {
            if worst > tolerance {
                return Err(Error::NoConvergence(format!(
                    "eigenpair residual {worst:e} exceeds tolerance {tolerance:e}; defective or severely ill-conditioned input"
                )));
            }
        }
    }
    Ok(SpectralData {
        eigenvalues: vals,
        eigenvectors: vecs,
        residuals,
        tolerance,
    })
}

/// Descending s-numbers plus Schatten norms for requested exponents.
#[derive(Clone, Debug)]
pub struct SchattenReport<T> {
    pub s_numbers: Vec<T>,
    pub p_norms: Vec<(T, T)>,
}

impl<T: Real> SchattenReport<T> {
    pub fn p_norm(&self, p: T) -> Result<T> {
        if p <= T::zero() {
            return Err(Error::InvalidInput(format!(
                "Schatten exponent must be > 0, got {p}"
            )));
        }
        let sum: T = self.s_numbers.iter().map(|s| s.powf(p)).sum();
        Ok(sum.powf(T::one() / p))
    }

    pub fn fill_p_norms(&mut self, ps: &[T]) -> Result<()> {
        self.p_norms.clear();
        for &p in ps {
            let v = self.p_norm(p)?;
            self.p_norms.push((p, v));
        }
        Ok(())
    }
}

/// s-numbers as square roots of the Hermitian eigenvalues of M*M, descending.
/// The squaring loses ~cond(M)^2 of accuracy, acceptable down to s-numbers
/// around 1e-14 of the largest, which covers every check in this crate.
pub fn singular_values<T: Real>(m: &FockMatrix<T>) -> Result<SchattenReport<T>> {
    let mtm = m.adjoint().matmul(m);
    let (vals, _) = hermitian::hermitian_eigen(&mtm, false)?;
    let mut s: Vec<T> = vals
        .into_iter()
        .rev()
        .map(|v| v.max(T::zero()).sqrt())
        .collect();
    // guard the descending contract against QL's last-ulp disorder
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(SchattenReport {
        s_numbers: s,
        p_norms: Vec::new(),
    })
}

pub fn schatten_norm<T: Real>(m: &FockMatrix<T>, p: T) -> Result<T> {
    singular_values(m)?.p_norm(p)
}

/// Trace norm ||.||_1.
pub fn trace_norm<T: Real>(m: &FockMatrix<T>) -> Result<T> {
    schatten_norm(m, T::one())
}

/// exp(-t M). Diagonal input is exponentiated entrywise (exact); otherwise
/// Pade-13 scaling and squaring with an overflow guard on the scaling depth.
pub fn matrix_exp<T: Real>(m: &FockMatrix<T>, t: T, _sign: Sign) -> Result<FockMatrix<T>> {
    if !(t >= T::zero()) {
        return Err(Error::InvalidInput(format!(
            "matrix_exp needs t >= 0, got {t}"
        )));
    }
    expm::expm(&m.scale(cr(-t)))
}

/// Diagonal resolvent (scale*G - sigma)^{-1}. Rejects sigma within
/// 1e-8 * max(1, |sigma|) of any scaled diagonal entry.
pub fn resolvent_diag<T: Real>(g: &FockMatrix<T>, scale: T, sigma: C<T>) -> Result<FockMatrix<T>> {
    if !g.is_diagonal() {
        return Err(Error::InvalidInput(
            "resolvent_diag needs a diagonal matrix".into(),
        ));
    }
    let tol = T::of(1e-8) * T::one().max(sigma.norm());
    let n = g.dim();
    let mut out = FockMatrix::zeros(n, g.offset());
    for i in 0..n {
        let den = g[(i, i)] * cr(scale) - sigma;
        if den.norm() < tol {
            return Err(Error::PoleProximity(format!(
                "sigma = {}+{}i is within {tol:e} of scaled diagonal entry {} at index {i}",
                sigma.re,
                sigma.im,
                (g[(i, i)] * cr(scale)).re
            )));
        }
        out[(i, i)] = Complex::new(T::one(), T::zero()) / den;
    }
    Ok(out)
}

/// Relative Frobenius gap between Pade exp(-tM) and the eigendecomposition
/// reconstruction V e^{-t diag} V^{-1}. Large values flag ill-conditioned
/// diagonalization; reported, never silently swallowed.
pub fn expm_vs_eigen_diff<T: Real>(m: &FockMatrix<T>, t: T) -> Result<T> {
    let e = matrix_exp(m, t, Sign::Negative)?;
    let s = eigen(m, EigenMode::General, true)?;
    let v = s.eigenvectors.as_ref().expect("vectors requested");
    let n = m.dim();
    let mut d = FockMatrix::zeros(n, m.offset());
    for k in 0..n {
        d[(k, k)] = (-s.eigenvalues[k] * cr(t)).exp();
    }
    let vinv = Lu::factor(v)?.inverse(m.offset());
    let recon = v.matmul(&d).matmul(&vinv);
    let denom = e.norm_frobenius().max(T::min_positive_value());
    Ok(recon.sub(&e).norm_frobenius() / denom)
}
