//! Products of coninvolutions in the complex affine group.
//!
//! An affine map `g = (A, v)`, `x ↦ A x + v`, is a *coninvolution* when
//! `g ḡ = e`, where the bar is entrywise complex conjugation. This crate
//! decides when `g` is a product of two coninvolutions (exactly when the
//! linear part is similar to `Ā⁻¹`), and constructs explicit factorizations
//! into two, three (given a consimilarity witness) or at most four
//! coninvolutions, each returned with a certificate whose residuals are
//! recomputed independently.
//!
//! All numerics are generic over the real scalar [`Real`] (`f64` or `f32`);
//! the aliases below fix the production type `f64`.

pub mod certify;
pub mod error;
pub mod factorization;
pub mod linalg;
pub mod reversibility;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::{c, Real};

/// `Complex<f64>`.
pub type C64 = num_complex::Complex<f64>;
/// Dense complex matrix over binary64.
pub type ComplexMatrix = linalg::Matrix<f64>;
/// Affine map over binary64.
pub type AffineMap = linalg::Affine<f64>;
/// Thresholds for binary64 work.
pub type Tolerance = linalg::Tolerance<f64>;
pub type JordanStructure = spectral::JordanStructure<f64>;
pub type ReverserWitness = reversibility::ReverserWitness<f64>;
pub type FactorizationCertificate = factorization::Certificate<f64>;

/// Single-precision variants.
pub type ComplexMatrix32 = linalg::Matrix<f32>;
pub type AffineMap32 = linalg::Affine<f32>;
pub type Tolerance32 = linalg::Tolerance<f32>;
