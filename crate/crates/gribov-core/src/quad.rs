//! Gauss-Legendre nodes/weights and barycentric Lagrange interpolation.
//! Node computation runs in f64 regardless of the target scalar; the nodes are
//! data, not part of the generic algorithm.

use crate::scalar::Real;

/// Gauss-Legendre rule on [-1, 1]. Newton iteration on P_n from the Chebyshev
/// initial guess; converges in a handful of steps for any practical order.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            // recurrence for P_n(x) and P_{n-1}(x)
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            pp = (n as f64) * (x * p - pm1) / (x * x - 1.0);
            let dx = p / pp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x.abs();
        nodes[n - 1 - i] = x.abs();
        let w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (
        nodes.into_iter().map(T::of).collect(),
        weights.into_iter().map(T::of).collect(),
    )
}

/// Same rule mapped to [0, 1].
pub fn gauss_legendre_01<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let (x, w) = gauss_legendre::<T>(n);
    let half = T::of(0.5);
    (
        x.into_iter().map(|xi| half * (xi + T::one())).collect(),
        w.into_iter().map(|wi| half * wi).collect(),
    )
}

/// Barycentric Lagrange interpolation on a fixed node set. `coeffs(x)` returns
/// the cardinal values ell_i(x), so vector- and matrix-valued data can be
/// combined by the caller.
pub struct Barycentric<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> Barycentric<T> {
    pub fn new(nodes: Vec<T>) -> Self {
        let n = nodes.len();
        let mut weights = vec![T::one(); n];
        for i in 0..n {
            let mut w = T::one();
            for j in 0..n {
                if i != j {
                    w *= nodes[i] - nodes[j];
                }
            }
            weights[i] = T::one() / w;
        }
        // rescale so the weights stay O(1); cardinal values are scale-free
        let mx = weights.iter().fold(T::zero(), |a, w| a.max(w.abs()));
        for w in weights.iter_mut() {
            *w /= mx;
        }
        Barycentric { nodes, weights }
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn coeffs(&self, x: T) -> Vec<T> {
        let n = self.nodes.len();
        let mut out = vec![T::zero(); n];
        // exact node hit: cardinal vector
        for i in 0..n {
            if x == self.nodes[i] {
                out[i] = T::one();
                return out;
            }
        }
        let mut denom = T::zero();
        for i in 0..n {
            out[i] = self.weights[i] / (x - self.nodes[i]);
            denom += out[i];
        }
        for v in out.iter_mut() {
            *v /= denom;
        }
        out
    }
}
