//! Dense complex linear algebra used by every certificate in the crate.

mod decomp;
mod eigen;
mod matrix;

pub use decomp::{
    complete_orthonormal, gram_factor, inverse, is_psd, matrix_power, polar_decompose, psd_sqrt, psd_sqrt_with_tol,
    reciprocal_condition, tall_polar, PositivityCertificate, DEFAULT_TOL,
};
pub use eigen::{hermitian_eig, hermitian_eigenvalues, jacobi_svd, EigenDecomposition, JacobiSvd};
pub use matrix::{c64, ComplexMatrix};

pub(crate) use matrix::dot;
