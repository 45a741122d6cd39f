//! Hermitian eigensolver. The complex Hermitian problem is embedded into a
//! real symmetric one of twice the size ([[Re, -Im], [Im, Re]]), which is then
//! reduced by Householder tridiagonalization and diagonalized by implicit-shift
//! QL. Each complex eigenvalue shows up twice in the embedding; pairs are
//! collapsed after the ascending sort. Costs 8x the flops of a native complex
//! reduction and saves a page of delicate phase bookkeeping; at dense desk
//! scale (N <= ~500) that trade is easily right.

use crate::error::{Error, Result};
use crate::fock::FockMatrix;
use crate::scalar::Real;
use num_complex::Complex;

/// Eigenvalues (ascending) and, if requested, the column eigenvectors of a
/// complex Hermitian matrix.
pub fn hermitian_eigen<T: Real>(
    m: &FockMatrix<T>,
    want_vectors: bool,
) -> Result<(Vec<T>, Option<FockMatrix<T>>)> {
    let n = m.dim();
    let nn = 2 * n;
    // embed: M = R + iS, R symmetric, S antisymmetric -> [[R, -S], [S, R]]
    let mut z = vec![T::zero(); nn * nn];
    for i in 0..n {
        for j in 0..n {
            let v = m[(i, j)];
            z[i * nn + j] = v.re;
            z[i * nn + (j + n)] = -v.im;
            z[(i + n) * nn + j] = v.im;
            z[(i + n) * nn + (j + n)] = v.re;
        }
    }
    let mut d = vec![T::zero(); nn];
    let mut e = vec![T::zero(); nn];
    tred2(&mut z, nn, &mut d, &mut e);
    tql2(&mut z, nn, &mut d, &mut e)?;
    sort_columns_ascending(&mut z, nn, &mut d);

    // collapse embedding pairs: take every second eigenvalue and rebuild the
    // complex vector from the (p; q) halves of the corresponding column
    let mut vals = Vec::with_capacity(n);
    let mut vecs = if want_vectors {
        Some(FockMatrix::zeros(n, m.offset()))
    } else {
        None
    };
    for k in 0..n {
        let half = T::of(0.5);
        vals.push((d[2 * k] + d[2 * k + 1]) * half);
        if let Some(v) = vecs.as_mut() {
            let col = 2 * k;
            let mut norm2 = T::zero();
            for i in 0..n {
                let re = z[i * nn + col];
                let im = z[(i + n) * nn + col];
                norm2 += re * re + im * im;
            }
            let inv = T::one() / norm2.sqrt();
            for i in 0..n {
                v[(i, k)] = Complex::new(z[i * nn + col] * inv, z[(i + n) * nn + col] * inv);
            }
        }
    }
    Ok((vals, vecs))
}

/// Householder reduction of a real symmetric matrix (row-major in z) to
/// tridiagonal form; z is replaced by the accumulated orthogonal transform.
fn tred2<T: Real>(z: &mut [T], n: usize, d: &mut [T], e: &mut [T]) {
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = T::zero();
        if l > 0 {
            let mut scale = T::zero();
            for k in 0..i {
                scale += z[i * n + k].abs();
            }
            if scale == T::zero() {
                e[i] = z[i * n + l];
            } else {
                for k in 0..i {
                    z[i * n + k] /= scale;
                    h += z[i * n + k] * z[i * n + k];
                }
                let f = z[i * n + l];
                let g = if f >= T::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                z[i * n + l] = f - g;
                let mut fsum = T::zero();
                for j in 0..i {
                    z[j * n + i] = z[i * n + j] / h;
                    let mut g = T::zero();
                    for k in 0..=j {
                        g += z[j * n + k] * z[i * n + k];
                    }
                    for k in (j + 1)..i {
                        g += z[k * n + j] * z[i * n + k];
                    }
                    e[j] = g / h;
                    fsum += e[j] * z[i * n + j];
                }
                let hh = fsum / (h + h);
                for j in 0..i {
                    let f = z[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let corr = f * e[k] + g * z[i * n + k];
                        z[j * n + k] -= corr;
                    }
                }
            }
        } else {
            e[i] = z[i * n + l];
        }
        d[i] = h;
    }
    d[0] = T::zero();
    e[0] = T::zero();
    for i in 0..n {
        if d[i] != T::zero() {
            for j in 0..i {
                let mut g = T::zero();
                for k in 0..i {
                    g += z[i * n + k] * z[k * n + j];
                }
                for k in 0..i {
                    z[k * n + j] -= g * z[k * n + i];
                }
            }
        }
        d[i] = z[i * n + i];
        z[i * n + i] = T::one();
        for j in 0..i {
            z[j * n + i] = T::zero();
            z[i * n + j] = T::zero();
        }
    }
}

/// Implicit-shift QL on the tridiagonal (d, e) with eigenvector accumulation.
fn tql2<T: Real>(z: &mut [T], n: usize, d: &mut [T], e: &mut [T]) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let eps = T::epsilon();
    // Graded matrices (semigroup differences at small t) carry subdiagonals
    // down at the underflow level next to zero diagonals; the relative test
    // alone then never deflates them and the sweep spins on denormals. An
    // absolute floor of eps^2 * scale is invisible against the eps * scale
    // accuracy of the method and unsticks those tails.
    let mut anorm = T::zero();
    for i in 0..n {
        anorm = anorm.max(d[i].abs() + e[i].abs());
    }
    let floor = anorm * eps * eps;
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(Error::NoConvergence(format!(
                    "QL exceeded 64 sweeps at eigenvalue index {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (e[l] + e[l]);
            let mut r = g.hypot(T::one());
            let sgn = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + sgn);
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + (c + c) * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * f;
                    z[k * n + i] = c * z[k * n + i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

fn sort_columns_ascending<T: Real>(z: &mut [T], n: usize, d: &mut [T]) {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap_or(std::cmp::Ordering::Equal));
    let dz = z.to_vec();
    let dd = d.to_vec();
    for (new, &old) in order.iter().enumerate() {
        d[new] = dd[old];
        for k in 0..n {
            z[k * n + new] = dz[k * n + old];
        }
    }
}
