//! Dense complex-matrix toolkit for the numerical radius.
//!
//! The crate certifies bounds of the form `‖A‖ ≤ 1` and `w(A) ≤ 1` through
//! positivity of structured block matrices, and builds the constructive
//! witnesses behind them:
//!
//! - [`linalg`]: Hermitian Jacobi eigensolver, PSD tests, square roots,
//!   polar decomposition.
//! - [`blockforms`]: `R_n`, `Δ_n`, `Γ_n`, block-Toeplitz and Fejér-weighted
//!   Toeplitz constructors.
//! - [`radius`]: numerical radius, operator norm, numerical-range boundary,
//!   power-inequality checks.
//! - [`certify`]: executable positivity equivalences and scalar Fejér–Riesz
//!   factorization.
//! - [`ando`]: Hermitian witness `H`, factors `X, Y`, the contraction `C`
//!   and the isometry `V`.
//! - [`dilation`]: finite-horizon unitary dilations, 2-dilation verification
//!   and the von Neumann inequality.
//! - [`harness`]: seeded random corpora, equivalence sweeps and golden values.

pub mod ando;
pub mod blockforms;
pub mod certify;
pub mod dilation;
mod error;
pub mod harness;
pub mod linalg;
pub mod radius;

pub use error::{Error, Result};
pub use linalg::{
    c64, gram_factor, hermitian_eig, is_psd, matrix_power, polar_decompose, psd_sqrt, ComplexMatrix,
    EigenDecomposition, PositivityCertificate, DEFAULT_TOL,
};
pub use radius::{numerical_radius, operator_norm, RadiusResult};
