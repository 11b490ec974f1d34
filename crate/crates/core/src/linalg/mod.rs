//! Sparse and dense kernels: CSR products, banded LU, ILU(0), dense LU oracle.

mod banded;
mod dense;
mod ilu0;
pub mod mtx;
mod sparse;

pub use banded::BandedLu;
pub use dense::{dense_lu_solve, DenseMatrix};
pub use ilu0::Ilu0Factors;
pub use mtx::{read_matrix_market, write_matrix_market, write_vector_market, Symmetry};
pub use sparse::{sparse_triple_product, CsrMatrix};
