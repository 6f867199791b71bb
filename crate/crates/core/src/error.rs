use thiserror::Error;

/// Failure modes shared by every module.
///
/// Variants that carry a residual report the last measured value so callers
/// can log the failing instance verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(&'static str),
    #[error("numerically singular matrix (reciprocal condition {rcond:e})")]
    Singular { rcond: f64 },
    #[error("eigenvalue iteration failed to converge after {iterations} iterations")]
    IterationFailure { iterations: usize },
    #[error("ill-conditioned input: {0}")]
    IllConditioned(String),
    #[error("borderline spectrum: eigenvalue {distance:e} from 1 is not clustered with the unipotent part")]
    BorderlineSpectrum { distance: f64 },
    #[error("matrix is not unipotent")]
    NotUnipotent,
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("spectrum meets the closed negative real axis")]
    NegativeRealSpectrum,
    #[error("CReversibilityRequired: linear part is not conjugate to its conjugate-inverse")]
    CReversibilityRequired,
    #[error("inconsistent reverser equations (residual {residual:e})")]
    InconsistentSystem { residual: f64 },
    #[error("not a coninvolution (residuals {linear:e}, {translation:e})")]
    NotConinvolution { linear: f64, translation: f64 },
    #[error("DeterminantModulusNotOne: |det| = {modulus}")]
    DeterminantModulusNotOne { modulus: f64 },
    #[error("scalar input where a nonscalar matrix is required")]
    ScalarInput,
    #[error("prescribed values are invalid: {0}")]
    InvalidPrescription(String),
    #[error("witness rejected: {0}")]
    WitnessRejected(String),
    #[error("invalid reverser witness (reverse residual {reverse:e}, coninvolution residual {coninv:e})")]
    InvalidWitness { reverse: f64, coninv: f64 },
    #[error("certificate rejected: {identity} (residual {residual:e})")]
    CertificateRejected { identity: String, residual: f64 },
    #[error("retries exhausted in {stage} after {attempts} attempts (last residual {last_residual:e})")]
    RetriesExhausted {
        stage: &'static str,
        attempts: usize,
        last_residual: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
