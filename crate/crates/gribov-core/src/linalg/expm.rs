//! Matrix exponential by Pade-13 with scaling and squaring. Diagonal input
//! takes the exact entrywise path.

use crate::error::{Error, Result};
use crate::fock::FockMatrix;
use crate::linalg::lu::Lu;
use crate::scalar::{cr, Real, C};

const THETA_13: f64 = 5.371920351148152;
const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Number of squarings allowed before the overflow guard trips; 2^64 scaling
/// of a desk-scale matrix means the caller's t or entries are absurd.
const MAX_SQUARINGS: u32 = 64;

/// exp(A) for a general complex dense A.
pub fn expm<T: Real>(a: &FockMatrix<T>) -> Result<FockMatrix<T>> {
    let n = a.dim();
    if a.is_diagonal() {
        let mut out = FockMatrix::zeros(n, a.offset());
        for i in 0..n {
            out[(i, i)] = a[(i, i)].exp();
        }
        return Ok(out);
    }
    let norm = a.norm_one_induced();
    if !norm.is_finite() {
        return Err(Error::InvalidInput(
            "non-finite entries in matrix exponential".into(),
        ));
    }
    let theta = T::of(THETA_13);
    let mut s: u32 = 0;
    if norm > theta {
        let ratio = (norm / theta).log2().ceil();
        s = ratio
            .to_f64()
            .map(|r| r as u32)
            .unwrap_or(MAX_SQUARINGS + 1);
    }
    if s > MAX_SQUARINGS {
        return Err(Error::InvalidInput(format!(
            "matrix exponential scaling needs 2^{s}; norm {norm:e} exceeds the cap"
        )));
    }
    let scale = T::of(0.5).powi(s as i32);
    let a = a.scale(cr(scale));

    let id = FockMatrix::identity(n, a.offset());
    let b: Vec<C<T>> = PADE_13.iter().map(|&x| cr(T::of(x))).collect();
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a2.matmul(&a4);
    // u = A (A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I)
    let inner_u = a6.scale(b[13]).add(&a4.scale(b[11])).add(&a2.scale(b[9]));
    let u = a.matmul(
        &a6.matmul(&inner_u)
            .add(&a6.scale(b[7]))
            .add(&a4.scale(b[5]))
            .add(&a2.scale(b[3]))
            .add(&id.scale(b[1])),
    );
    // v = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    let inner_v = a6.scale(b[12]).add(&a4.scale(b[10])).add(&a2.scale(b[8]));
    let v = a6
        .matmul(&inner_v)
        .add(&a6.scale(b[6]))
        .add(&a4.scale(b[4]))
        .add(&a2.scale(b[2]))
        .add(&id.scale(b[0]));

    let p = v.add(&u);
    let q = v.sub(&u);
    let lu =
        Lu::factor(&q).map_err(|_| Error::NoConvergence("Pade denominator is singular".into()))?;
    let mut r = lu.solve_matrix(&p);
    for _ in 0..s {
        r = r.matmul(&r);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn identity_at_zero() {
        let a = FockMatrix::<f64>::zeros(4, 0);
        let e = expm(&a).unwrap();
        assert!(e.sub(&FockMatrix::identity(4, 0)).max_abs() == 0.0);
    }

    #[test]
    fn nilpotent_closed_form() {
        let mut a = FockMatrix::<f64>::zeros(2, 0);
        a[(0, 1)] = c(-1.0, 0.0);
        let e = expm(&a).unwrap();
        assert!((e[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((e[(0, 1)] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((e[(1, 1)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(e[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn rotation_block() {
        // exp([[0, -t], [t, 0]]) = [[cos t, -sin t], [sin t, cos t]]
        let t = 0.7f64;
        let mut a = FockMatrix::<f64>::zeros(2, 0);
        a[(0, 1)] = c(-t, 0.0);
        a[(1, 0)] = c(t, 0.0);
        let e = expm(&a).unwrap();
        assert!((e[(0, 0)].re - t.cos()).abs() < 1e-14);
        assert!((e[(1, 0)].re - t.sin()).abs() < 1e-14);
    }

    #[test]
    fn large_norm_uses_squaring() {
        // norm >> theta forces s > 0; compare against the exact 1x1-ish case
        let mut a = FockMatrix::<f64>::zeros(2, 0);
        a[(0, 0)] = c(-30.0, 4.0);
        a[(1, 1)] = c(-10.0, -2.0);
        a[(0, 1)] = c(5.0, 0.0);
        // upper triangular: diagonal entries exponentiate, off-diagonal has the
        // divided-difference closed form f = (e^a - e^b)/(a - b) * a01
        let e = expm(&a).unwrap();
        let (la, lb) = (c(-30.0, 4.0), c(-10.0, -2.0));
        let f = (la.exp() - lb.exp()) / (la - lb) * c(5.0, 0.0);
        assert!((e[(0, 0)] - la.exp()).norm() < 1e-16);
        assert!((e[(1, 1)] - lb.exp()).norm() < 1e-14 * lb.exp().norm());
        assert!((e[(0, 1)] - f).norm() < 1e-14 * f.norm().max(1e-6));
    }

    #[test]
    fn overflow_guard_fires() {
        let mut a = FockMatrix::<f64>::zeros(2, 0);
        a[(0, 1)] = c(1e300, 0.0);
        a[(1, 0)] = c(1e300, 0.0);
        assert!(expm(&a).is_err());
    }
}
