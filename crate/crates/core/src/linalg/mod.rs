//! Dense complex matrices and the Hermitian spectral kernels.

mod eig;
mod matrix;
mod spectral;

pub(crate) use eig::extreme_eigenvalues_unchecked;
pub use eig::{hermitian_eig, hermitian_eigenvalues, top_eigenvector, HermEig};
pub use matrix::{inner, vec_norm, ComplexMatrix, C64, I, ONE, ZERO};
pub use spectral::{
    default_cutoff, min_singular_value, numerical_rank, numerical_rank_default, pinv_psd, psd_eig, spectral_norm,
    sqrt_psd,
};
