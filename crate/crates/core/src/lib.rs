//! Restricted additive Schwarz preconditioned FGMRES for the 2D Helmholtz
//! equation, with subdomain systems solved directly (banded LU) or inexactly
//! by GMRES preconditioned with two-level Bézier deflation or ILU(0).
//!
//! Numeric kernels are generic over [`Scalar`] (`f32`/`f64`); the aliases
//! below fix the double precision types the experiment harness uses.

pub mod decomposition;
pub mod deflation;
pub mod error;
pub mod grid_fem;
pub mod harness;
pub mod krylov;
pub mod linalg;
pub mod ras;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type SparseMatrix = linalg::CsrMatrix<f64>;
pub type DenseMatrix = linalg::DenseMatrix<f64>;
pub type BandedLu = linalg::BandedLu<f64>;
pub type Ilu0Factors = linalg::Ilu0Factors<f64>;
pub type Vector = Vec<f64>;
pub type LocalSystem = decomposition::LocalSystem<f64>;
pub type DeflationContext = deflation::DeflationContext<f64>;
pub type RasPreconditioner = ras::RasPreconditioner<f64>;
