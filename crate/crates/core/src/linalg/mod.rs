//! Dense complex linear algebra: the substrate for every other module.

pub mod dft;
pub mod eigen;
pub mod matrix;
pub mod norms;

pub use dft::dft_unitary;
pub use eigen::{apply_function, eig_hermitian, EigenSystem};
pub use matrix::{ComplexMatrix, HermitianMatrix, MatrixJson};
pub use norms::{operator_norm, schatten_norm, singular_values, trace_norm, SchattenP};
