//! Complex matrix and affine-group arithmetic.

pub mod affine;
pub mod decomp;
pub mod matrix;

pub use affine::{
    affine_compose, affine_conj, affine_inverse, compose_all, consimilarity_transform, det_modulus, group_conjugate,
    homogeneous_embed, homogeneous_extract, is_coninvolution, product_residual, Affine, ConinvolutionCheck, Tolerance,
};
pub use decomp::{inverse_checked, inverse_with_rcond, solve_sylvester, Lu, Schur, Svd};
pub use matrix::{vector, Matrix};
