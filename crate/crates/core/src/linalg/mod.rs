//! Dense complex linear algebra for desk-scale systems.
//!
//! Everything here is double precision and row-major. Nothing in this module
//! knows about channels or detectors.

mod dense;
mod eigen;
mod factor;

pub use dense::{dot_conj, norm, CMatrix, CVector, HermitianView, C64};
pub use eigen::{extreme_eigenvalues, hermitian_eigenvalues, spectral_norm};
pub use factor::{
    cholesky, cholesky_invert, hermitian_gram, lower_tri_solve, splitting, upper_tri_solve,
};

pub(crate) use dense::{hermitize_from_lower, ONE, ZERO};
pub(crate) use factor::{gram_unchecked, inverse_from_cholesky, lower_tri_inverse};
