//! Error types shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building covariance matrices or
/// evaluating correlation measures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The two-mode symplectic invariant `delta^2 - 4 det V` came out negative
    /// beyond what floating-point cancellation at the pure-state boundary can
    /// explain.
    #[error("symplectic discriminant {discriminant:.3e} is negative beyond the degeneracy tolerance")]
    NumericalDegeneracy { discriminant: f64 },

    /// `gr2_entanglement` only evaluates squeezed-thermal-class states
    /// (`nu3 * nu3p <= 0`); anything else needs the general numerical recipe.
    #[error("covariance matrix outside squeezed-thermal class (nu3*nu3p = {det_v3:.3e} > 0)")]
    OutOfClass { det_v3: f64 },

    #[error("drift matrix is not Hurwitz (max eigenvalue real part {max_re:.3e}); no steady state exists")]
    NoSteadyState { max_re: f64 },

    #[error("lyapunov solve residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    LyapunovResidual { residual: f64, tolerance: f64 },

    #[error("spectral quadrature did not converge for CM entry ({row},{col}); worst error {error:.3e}")]
    IntegrationFailure { row: usize, col: usize, error: f64 },

    /// Extracted 4x4 sub-block is not in standard form; signals a quadrature
    /// ordering or dynamics bug upstream.
    #[error("sub-block violates standard form (residual {residual:.3e} at ({row},{col}))")]
    FormViolation { residual: f64, row: usize, col: usize },

    #[error("bracket does not straddle the entanglement boundary: {0}")]
    Bracket(String),

    #[error("entanglement is not monotone on the bracket: {0}")]
    MonotonicityViolation(String),

    /// Config / CLI validation failure; `path` points at the offending field.
    #[error("{path}: {message}")]
    Validation { path: String, message: String },

    #[error("non-physical covariance matrix (nu_minus = {nu_minus}) at {context}")]
    NonPhysical { nu_minus: f64, context: String },

    #[error("cannot plot: {0}")]
    EmptyPlot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config parse error at {path}: {message}")]
    ConfigParse { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Convenience constructor for validation errors.
    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}
