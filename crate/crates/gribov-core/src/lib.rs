//! Truncated Fock-basis numerics for the Gribov operator
//! H = lambda'' a*^3a^3 + mu a*a + i lambda a*(a+a*)a and its quartic variant.
//!
//! Everything is coefficient-space linear algebra over a retained window of the
//! occupation basis e_n: exact builders ([`fock`]), self-contained dense
//! complex eigen/svd/expm ([`linalg`]), Dyson terms and trace-norm asymptotics
//! of e^{-tH} ([`semigroup`]), both sides of the regularized trace formula
//! ([`trace_formula`]), and bound/class diagnostics ([`diagnostics`]).
//!
//! All numerics are generic over the scalar through [`scalar::Real`]; the `64`
//! aliases below are what the reports and the CLI run at.

pub mod diagnostics;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod quad;
pub mod scalar;
pub mod semigroup;
pub mod trace_formula;

pub use error::{Error, Result};
pub use scalar::Real;

pub type GribovParams64 = fock::GribovParams<f64>;
pub type FockMatrix64 = fock::FockMatrix<f64>;
pub type SpectralData64 = linalg::SpectralData<f64>;
pub type SchattenReport64 = linalg::SchattenReport<f64>;
pub type AsymptoticsRow64 = semigroup::AsymptoticsRow<f64>;
pub type ContourSpec64 = trace_formula::ContourSpec<f64>;
pub type FormulaRow64 = trace_formula::FormulaRow<f64>;
pub type BoundReport64 = diagnostics::BoundReport<f64>;

pub type GribovParams32 = fock::GribovParams<f32>;
pub type FockMatrix32 = fock::FockMatrix<f32>;
