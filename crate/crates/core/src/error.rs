use num_complex::Complex64;
use thiserror::Error;

/// Failure modes of the kernel, Green-function and correlation machinery.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid medium: {0}")]
    InvalidModel(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("grid [{grid_min}, {grid_max}] does not strictly contain layer [{z_min}, {z_max}]")]
    GridMismatch {
        z_min: f64,
        z_max: f64,
        grid_min: f64,
        grid_max: f64,
    },

    #[error("kernel is not reciprocal (relative defect {defect:.3e})")]
    NotReciprocal { defect: f64 },

    #[error("kernel is not Hermitian (relative defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error(
        "spectrum is not positive (smallest eigenvalue {min:.3e}); no square-root factor exists"
    )]
    NonPositiveSpectrum { min: f64 },

    #[error("{count} eigenvalue(s) within {threshold:.3e} of zero")]
    ZeroEigenvalue { count: usize, threshold: f64 },

    #[error(
        "Maxwell operator is singular at omega = {omega} (condition estimate {condition:.3e})"
    )]
    SingularOperator { omega: Complex64, condition: f64 },

    #[error("Green function has {} candidate pole(s) in the upper half-plane", poles.len())]
    AnalyticityViolation { poles: Vec<Complex64> },

    #[error("frequency grid too coarse: estimated error {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    GridTooCoarse { estimate: f64, tolerance: f64 },
}

impl Error {
    /// Stable machine-readable identifier, used in reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidModel(_) => "invalid_model",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::InvalidInput(_) => "invalid_input",
            Error::GridMismatch { .. } => "grid_mismatch",
            Error::NotReciprocal { .. } => "not_reciprocal",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NonPositiveSpectrum { .. } => "non_positive_spectrum",
            Error::ZeroEigenvalue { .. } => "zero_eigenvalue",
            Error::SingularOperator { .. } => "singular_operator",
            Error::AnalyticityViolation { .. } => "analyticity_violation",
            Error::GridTooCoarse { .. } => "grid_too_coarse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
