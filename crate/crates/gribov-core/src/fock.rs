//! Exact truncated matrix representations in the occupation basis e_n:
//! ladder operators, the diagonal regularizers S and G, the interaction
//! H_{mu,lambda} = mu a*a + i lambda a*(a+a*)a, and the assembled Hamiltonians.
//!
//! Truncation is plain Galerkin compression to a window of the basis; the
//! window start is carried as an explicit `offset` so full-space and E_0
//! results stay directly comparable.

use crate::error::{Error, Result};
use crate::scalar::{c, cr, falling_int, lambda_int, Real, C};
use num_complex::Complex;

/// The four couplings of the Hamiltonian family
/// H = lambda_cubic a*^3a^3 + mu a*a + i lambda_triple a*(a+a*)a,
/// with lambda_quartic the coupling of the quartic variant lambda' S.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GribovParams<T> {
    pub lambda_cubic: T,
    pub lambda_quartic: T,
    pub mu: T,
    pub lambda_triple: T,
}

impl<T: Real> GribovParams<T> {
    pub fn new(lambda_cubic: f64, lambda_quartic: f64, mu: f64, lambda_triple: f64) -> Self {
        GribovParams {
            lambda_cubic: T::of(lambda_cubic),
            lambda_quartic: T::of(lambda_quartic),
            mu: T::of(mu),
            lambda_triple: T::of(lambda_triple),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("lambda_cubic", self.lambda_cubic),
            ("lambda_quartic", self.lambda_quartic),
            ("mu", self.mu),
            ("lambda_triple", self.lambda_triple),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("params.{name} is not finite")));
            }
        }
        Ok(())
    }

    /// Hypotheses of the accretivity statement: mu > 0, lambda_cubic >= 0.
    pub fn require_accretive(&self) -> Result<()> {
        self.validate()?;
        if self.mu <= T::zero() {
            return Err(Error::Hypothesis(format!(
                "accretivity needs mu > 0, got {}",
                self.mu
            )));
        }
        if self.lambda_cubic < T::zero() {
            return Err(Error::Hypothesis(format!(
                "accretivity needs lambda_cubic >= 0, got {}",
                self.lambda_cubic
            )));
        }
        Ok(())
    }
}

/// Retained window of the basis: indices offset .. offset+dim.
/// offset 0 is the full basis, offset 1 is E_0 = span{e_1, ...}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub dim: usize,
    pub offset: usize,
}

impl Truncation {
    pub fn new(dim: usize, offset: usize) -> Result<Self> {
        if dim < 4 {
            return Err(Error::InvalidInput(format!(
                "trunc.dim must be >= 4 so a nonzero eigenvalue of G is retained, got {dim}"
            )));
        }
        if offset > 1 {
            return Err(Error::InvalidInput(format!(
                "trunc.offset must be 0 or 1, got {offset}"
            )));
        }
        Ok(Truncation { dim, offset })
    }

    pub fn full(dim: usize) -> Result<Self> {
        Truncation::new(dim, 0)
    }

    /// E_0 window (constant functions removed).
    pub fn zero_free(dim: usize) -> Result<Self> {
        Truncation::new(dim, 1)
    }
}

/// Dense complex matrix over a basis window. Entry (m, n) is the coefficient
/// of e_{m+offset} in the image of e_{n+offset}; storage row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FockMatrix<T> {
    dim: usize,
    offset: usize,
    entries: Vec<C<T>>,
}

impl<T: Real> FockMatrix<T> {
    pub fn zeros(dim: usize, offset: usize) -> Self {
        FockMatrix {
            dim,
            offset,
            entries: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize, offset: usize) -> Self {
        let mut m = Self::zeros(dim, offset);
        for i in 0..dim {
            m[(i, i)] = cr(T::one());
        }
        m
    }

    pub fn from_fn(dim: usize, offset: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut m = Self::zeros(dim, offset);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diag_from(offset: usize, d: &[C<T>]) -> Self {
        let mut m = Self::zeros(d.len(), offset);
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    /// Absolute occupation number of local index i.
    pub fn level(&self, i: usize) -> usize {
        i + self.offset
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn diag(&self) -> Vec<C<T>> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j && self[(i, j)] != Complex::new(T::zero(), T::zero()) {
                    return false;
                }
            }
        }
        true
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, self.offset, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, self.offset, |i, j| self[(j, i)].conj())
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut m = self.clone();
        for (a, b) in m.entries.iter_mut().zip(&other.entries) {
            *a += *b;
        }
        m
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut m = self.clone();
        for (a, b) in m.entries.iter_mut().zip(&other.entries) {
            *a -= *b;
        }
        m
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let mut m = self.clone();
        for a in m.entries.iter_mut() {
            *a *= s;
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matmul");
        let n = self.dim;
        let mut out = Self::zeros(n, self.offset);
        // ikj order keeps the inner loop on contiguous rows
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let orow = &other.entries[k * n..(k + 1) * n];
                let row = &mut out.entries[i * n..(i + 1) * n];
                for j in 0..n {
                    row[j] += a * orow[j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(v.len(), self.dim);
        let n = self.dim;
        let mut out = vec![Complex::new(T::zero(), T::zero()); n];
        for i in 0..n {
            let mut acc = Complex::new(T::zero(), T::zero());
            let row = &self.entries[i * n..(i + 1) * n];
            for j in 0..n {
                acc += row[j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn trace(&self) -> C<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..self.dim {
            acc += self[(i, i)];
        }
        acc
    }

    pub fn norm_frobenius(&self) -> T {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Induced 1-norm (max absolute column sum); cheap and what the expm
    /// scaling analysis wants.
    pub fn norm_one_induced(&self) -> T {
        let n = self.dim;
        let mut best = T::zero();
        for j in 0..n {
            let mut s = T::zero();
            for i in 0..n {
                s += self[(i, j)].norm();
            }
            if s > best {
                best = s;
            }
        }
        best
    }

    pub fn max_abs(&self) -> T {
        self.entries
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    /// Largest |entry(m,n) - entry(n,m)|; zero iff complex symmetric.
    pub fn symmetry_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..i {
                let d = (self[(i, j)] - self[(j, i)]).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Largest |entry(m,n) - conj(entry(n,m))|; zero iff Hermitian.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in 0..=i {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Apply to the standard basis vector of local index j (i.e. column j).
    pub fn col(&self, j: usize) -> Vec<C<T>> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn with_offset(mut self, offset: usize) -> Self {
        self.offset = offset;
        self
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for FockMatrix<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.entries[i * self.dim + j]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for FockMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        let n = self.dim;
        &mut self.entries[i * n + j]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Annihilation,
    Creation,
}

/// a (or a*) compressed to the window. Annihilation: entry (n-1, n) = sqrt(n+offset)
/// on the superdiagonal; the image of the lowest retained vector is dropped when
/// it leaves the window. Creation is the transpose.
pub fn build_ladder<T: Real>(trunc: Truncation, kind: Ladder) -> FockMatrix<T> {
    let mut m = FockMatrix::zeros(trunc.dim, trunc.offset);
    for j in 1..trunc.dim {
        let level = (j + trunc.offset) as f64;
        m[(j - 1, j)] = c(level.sqrt(), 0.0);
    }
    match kind {
        Ladder::Annihilation => m,
        Ladder::Creation => m.transpose(),
    }
}

/// Diagonal of a*^k a^k: entry n(n-1)...(n-k+1) at occupation n. k in {1,2,3};
/// k=2 is S, k=3 is G.
pub fn build_diag_power<T: Real>(trunc: Truncation, order: u32) -> Result<FockMatrix<T>> {
    if !(1..=3).contains(&order) {
        return Err(Error::InvalidInput(format!(
            "diag power order must be 1, 2 or 3, got {order}"
        )));
    }
    let mut m = FockMatrix::zeros(trunc.dim, trunc.offset);
    for j in 0..trunc.dim {
        let n = (j + trunc.offset) as u64;
        m[(j, j)] = cr(T::of_usize(falling_int(n, order) as usize));
    }
    Ok(m)
}

/// H_{mu,lambda} = mu a*a + i lambda a*(a+a*)a: tridiagonal, complex symmetric.
/// Column n carries mu*n on the diagonal and i*lambda*n*sqrt(n+1) on both
/// neighbours of the n..n+1 bond.
pub fn build_interaction<T: Real>(trunc: Truncation, params: GribovParams<T>) -> FockMatrix<T> {
    let mut m = FockMatrix::zeros(trunc.dim, trunc.offset);
    let i_lambda = Complex::new(T::zero(), params.lambda_triple);
    for j in 0..trunc.dim {
        let n = j + trunc.offset;
        m[(j, j)] = cr(params.mu * T::of_usize(n));
        if j + 1 < trunc.dim {
            let v = i_lambda * cr(T::of_usize(n) * T::of_usize(n + 1).sqrt());
            m[(j + 1, j)] = v;
            m[(j, j + 1)] = v;
        }
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regularizer {
    /// lambda_cubic * G
    Cubic,
    /// lambda_quartic * S
    Quartic,
    /// interaction only
    None,
}

/// Assembled Hamiltonian: regularizer + H_{mu,lambda}. Complex symmetric,
/// bandwidth 1.
pub fn build_hamiltonian<T: Real>(
    trunc: Truncation,
    params: GribovParams<T>,
    regularizer: Regularizer,
) -> FockMatrix<T> {
    let mut m = build_interaction(trunc, params);
    let (order, coupling) = match regularizer {
        Regularizer::Cubic => (3, params.lambda_cubic),
        Regularizer::Quartic => (2, params.lambda_quartic),
        Regularizer::None => return m,
    };
    for j in 0..trunc.dim {
        let n = (j + trunc.offset) as u64;
        m[(j, j)] += cr(coupling * T::of_usize(falling_int(n, order) as usize));
    }
    m
}

/// Delete the lowest d rows and columns; offset grows by d so entries keep
/// their occupation labels.
pub fn restrict_subspace<T: Real>(m: &FockMatrix<T>, drop_lowest: usize) -> Result<FockMatrix<T>> {
    if drop_lowest >= m.dim() {
        return Err(Error::InvalidInput(format!(
            "cannot drop {} rows from a {}-dimensional window",
            drop_lowest,
            m.dim()
        )));
    }
    let nd = m.dim() - drop_lowest;
    let mut out = FockMatrix::zeros(nd, m.offset() + drop_lowest);
    for i in 0..nd {
        for j in 0..nd {
            out[(i, j)] = m[(i + drop_lowest, j + drop_lowest)];
        }
    }
    Ok(out)
}

/// lambda_cubic * lambda_n over the window, as reals. Exact integer products.
pub fn scaled_g_diag<T: Real>(trunc: Truncation, scale: T) -> Vec<T> {
    (0..trunc.dim)
        .map(|j| scale * T::of_usize(lambda_int((j + trunc.offset) as u64) as usize))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type M = FockMatrix<f64>;

    fn params(lc: f64, lq: f64, mu: f64, lt: f64) -> GribovParams<f64> {
        GribovParams::new(lc, lq, mu, lt)
    }

    #[test]
    fn annihilation_full_basis() {
        let a: M = build_ladder(Truncation::full(4).unwrap(), Ladder::Annihilation);
        assert_eq!(a[(0, 1)], c(1.0, 0.0));
        assert_eq!(a[(1, 2)], c(2f64.sqrt(), 0.0));
        assert_eq!(a[(2, 3)], c(3f64.sqrt(), 0.0));
        assert_eq!(a[(1, 0)], c(0.0, 0.0));
        assert_eq!(a[(0, 0)], c(0.0, 0.0));
    }

    #[test]
    fn creation_is_transpose() {
        let t = Truncation::full(5).unwrap();
        let a: M = build_ladder(t, Ladder::Annihilation);
        let ad: M = build_ladder(t, Ladder::Creation);
        assert_eq!(ad, a.transpose());
    }

    #[test]
    fn annihilation_zero_free_window() {
        let a: M = build_ladder(Truncation::zero_free(4).unwrap(), Ladder::Annihilation);
        assert_eq!(a[(0, 1)], c(2f64.sqrt(), 0.0));
        assert_eq!(a[(1, 2)], c(3f64.sqrt(), 0.0));
        assert_eq!(a[(2, 3)], c(4f64.sqrt(), 0.0));
    }

    #[test]
    fn g_diagonal() {
        let g: M = build_diag_power(Truncation::full(5).unwrap(), 3).unwrap();
        let want = [0.0, 0.0, 0.0, 6.0, 24.0];
        for (j, w) in want.iter().enumerate() {
            assert_eq!(g[(j, j)], c(*w, 0.0));
        }
        assert!(g.is_diagonal());
    }

    #[test]
    fn s_diagonal() {
        let s: M = build_diag_power(Truncation::full(5).unwrap(), 2).unwrap();
        let want = [0.0, 0.0, 2.0, 6.0, 12.0];
        for (j, w) in want.iter().enumerate() {
            assert_eq!(s[(j, j)], c(*w, 0.0));
        }
    }

    #[test]
    fn g_diagonal_offset_window() {
        // indices 1,2,3
        let g: M = build_diag_power(Truncation::zero_free(4).unwrap(), 3).unwrap();
        assert_eq!(g[(0, 0)], c(0.0, 0.0));
        assert_eq!(g[(1, 1)], c(0.0, 0.0));
        assert_eq!(g[(2, 2)], c(6.0, 0.0));
    }

    #[test]
    fn diag_power_order_guard() {
        assert!(build_diag_power::<f64>(Truncation::full(4).unwrap(), 4).is_err());
        assert!(build_diag_power::<f64>(Truncation::full(4).unwrap(), 0).is_err());
    }

    #[test]
    fn interaction_columns() {
        let m: M = build_interaction(Truncation::full(4).unwrap(), params(0.0, 0.0, 1.0, 1.0));
        // column 1: diagonal mu*1, bond to row 2 = i*1*sqrt(2), nothing to row 0
        assert_eq!(m[(1, 1)], c(1.0, 0.0));
        assert_eq!(m[(2, 1)], c(0.0, 2f64.sqrt()));
        assert_eq!(m[(0, 1)], c(0.0, 0.0));
        // column 2: row 1 entry i*sqrt(2), diagonal 2, row 3 entry 2i*sqrt(3)
        assert_eq!(m[(1, 2)], c(0.0, 2f64.sqrt()));
        assert_eq!(m[(2, 2)], c(2.0, 0.0));
        assert_eq!(m[(3, 2)], c(0.0, 2.0 * 3f64.sqrt()));
    }

    #[test]
    fn interaction_lambda_zero_is_real_diagonal() {
        let m: M = build_interaction(Truncation::full(6).unwrap(), params(1.0, 0.0, 0.7, 0.0));
        assert!(m.is_diagonal());
        for j in 0..6 {
            assert_eq!(m[(j, j)], c(0.7 * j as f64, 0.0));
        }
    }

    #[test]
    fn interaction_matches_ladder_composition() {
        // mu a*a + i lambda a*(a+a*)a assembled from the ladder matrices is an
        // independent route to the same entries (up to sqrt rounding).
        let t = Truncation::full(12).unwrap();
        let p = params(0.0, 0.0, 0.3, 0.8);
        let a: M = build_ladder(t, Ladder::Annihilation);
        let ad: M = build_ladder(t, Ladder::Creation);
        let composed = ad.matmul(&a).scale(c(p.mu, 0.0)).add(
            &ad.matmul(&a.add(&ad))
                .matmul(&a)
                .scale(c(0.0, p.lambda_triple)),
        );
        let direct: M = build_interaction(t, p);
        // the truncated composition corrupts the last bond (a*a* image of the
        // top vector leaves the window), so compare the interior block
        let interior = 10;
        for i in 0..interior {
            for j in 0..interior {
                let d = (composed[(i, j)] - direct[(i, j)]).norm();
                assert!(
                    d <= 1e-13 * (1.0 + direct[(i, j)].norm()),
                    "mismatch at ({i},{j}): {d}"
                );
            }
        }
    }

    #[test]
    fn hamiltonian_cubic_diag() {
        let m: M = build_hamiltonian(
            Truncation::full(5).unwrap(),
            params(1.0, 0.0, 1.0, 0.0),
            Regularizer::Cubic,
        );
        let want = [0.0, 1.0, 2.0, 9.0, 28.0];
        for (j, w) in want.iter().enumerate() {
            assert_eq!(m[(j, j)], c(*w, 0.0));
        }
    }

    #[test]
    fn hamiltonian_zero_params() {
        let m: M = build_hamiltonian(
            Truncation::full(4).unwrap(),
            params(0.0, 0.0, 0.0, 0.0),
            Regularizer::Cubic,
        );
        assert_eq!(m.max_abs(), 0.0);
    }

    #[test]
    fn hamiltonian_quartic_diag() {
        let m: M = build_hamiltonian(
            Truncation::full(4).unwrap(),
            params(0.0, 1.0, 0.0, 0.0),
            Regularizer::Quartic,
        );
        let want = [0.0, 0.0, 2.0, 6.0];
        for (j, w) in want.iter().enumerate() {
            assert_eq!(m[(j, j)], c(*w, 0.0));
        }
    }

    #[test]
    fn restrict_drops_lowest() {
        let g: M = build_diag_power(Truncation::full(6).unwrap(), 3).unwrap();
        let r = restrict_subspace(&g, 3).unwrap();
        assert_eq!(r.dim(), 3);
        assert_eq!(r.offset(), 3);
        assert_eq!(r[(0, 0)], c(6.0, 0.0));
        assert_eq!(r[(1, 1)], c(24.0, 0.0));
        assert_eq!(r[(2, 2)], c(60.0, 0.0));
    }

    #[test]
    fn restrict_zero_is_identity() {
        let m: M = build_interaction(Truncation::full(5).unwrap(), params(0.0, 0.0, 0.2, 0.4));
        assert_eq!(restrict_subspace(&m, 0).unwrap(), m);
    }

    #[test]
    fn restrict_rejects_full_drop() {
        let m: M = FockMatrix::zeros(4, 0);
        assert!(restrict_subspace(&m, 4).is_err());
    }

    #[test]
    fn restrict_one_matches_zero_free_builder() {
        let p = params(0.0, 0.0, 0.9, 0.4);
        let full: M = build_interaction(Truncation::full(8).unwrap(), p);
        let dropped = restrict_subspace(&full, 1).unwrap();
        let direct: M = build_interaction(Truncation::zero_free(7).unwrap(), p);
        assert_eq!(dropped, direct);
    }

    #[test]
    fn truncation_guards() {
        assert!(Truncation::new(3, 0).is_err());
        assert!(Truncation::new(4, 2).is_err());
        assert!(Truncation::new(4, 1).is_ok());
    }

    #[test]
    fn accretivity_hypotheses() {
        assert!(params(1.0, 0.0, -1.0, 0.0).require_accretive().is_err());
        assert!(params(-0.5, 0.0, 1.0, 0.0).require_accretive().is_err());
        assert!(params(0.0, 0.0, 0.1, 0.5).require_accretive().is_ok());
    }

    #[test]
    fn offdiag_growth_rate() {
        // |M(n+1,n)| = |lambda| n sqrt(n+1); against |lambda| n^{3/2} the ratio
        // is sqrt(1+1/n): within 1% at n=100
        let t = Truncation::full(102).unwrap();
        let m: M = build_interaction(t, params(0.0, 0.0, 0.0, 0.7));
        let n = 100usize;
        let got = m[(n + 1, n)].norm();
        let ratio = got / (0.7 * (n as f64).powf(1.5));
        assert!((ratio - 1.0).abs() < 0.01, "ratio {ratio}");
    }

    #[test]
    fn g_diag_cubic_growth() {
        // lambda_n / n^3 = (1-1/n)(1-2/n): 2.97% off at n=100, inside 1% only
        // by n=300
        let g100: M = build_diag_power(Truncation::full(101).unwrap(), 3).unwrap();
        let r100 = g100[(100, 100)].re / 100f64.powi(3);
        assert!((r100 - 1.0).abs() < 0.03, "n=100 ratio {r100}");
        let g300: M = build_diag_power(Truncation::full(301).unwrap(), 3).unwrap();
        let r300 = g300[(300, 300)].re / 300f64.powi(3);
        assert!((r300 - 1.0).abs() < 0.01, "n=300 ratio {r300}");
    }

    proptest! {
        #[test]
        fn interaction_complex_symmetric_exactly(
            mu in -2.0f64..2.0,
            lt in -2.0f64..2.0,
            dim in 4usize..40,
            offset in 0usize..2,
        ) {
            let t = Truncation::new(dim, offset).unwrap();
            let m: M = build_interaction(t, params(0.0, 0.0, mu, lt));
            prop_assert_eq!(m.symmetry_defect(), 0.0);
        }

        #[test]
        fn interaction_nonnormal_when_coupled(
            mu in 0.1f64..2.0,
            lt in 0.1f64..2.0,
            dim in 4usize..32,
        ) {
            let t = Truncation::full(dim).unwrap();
            let m: M = build_interaction(t, params(0.0, 0.0, mu, lt));
            prop_assert!(m.hermiticity_defect() > 0.0);
        }

        #[test]
        fn hamiltonian_symmetric_any_regularizer(
            lc in 0.0f64..2.0,
            mu in -1.0f64..2.0,
            lt in -2.0f64..2.0,
            dim in 4usize..24,
        ) {
            let t = Truncation::full(dim).unwrap();
            for reg in [Regularizer::Cubic, Regularizer::Quartic, Regularizer::None] {
                let m: M = build_hamiltonian(t, params(lc, 0.7, mu, lt), reg);
                prop_assert_eq!(m.symmetry_defect(), 0.0);
            }
        }
    }

    #[test]
    fn f32_builders_smoke() {
        let t = Truncation::full(5).unwrap();
        let g: FockMatrix<f32> = build_diag_power(t, 3).unwrap();
        assert_eq!(g[(4, 4)].re, 24.0f32);
        let m: FockMatrix<f32> = build_interaction(t, GribovParams::new(1.0, 1.0, 0.1, 0.05));
        assert_eq!(m.symmetry_defect(), 0.0f32);
    }
}
