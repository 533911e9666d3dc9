use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside its physical or structural domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A zero-width spectral profile was asked for a pointwise density.
    #[error("degenerate spectral profile: zero width has no pointwise spectral density")]
    DegenerateProfile,

    /// The pump center is too far from twice the photon center frequency.
    #[error(
        "pump center detuned from twice the photon center frequency by a relative \
         {relative:.2e} (limit {limit:.0e})"
    )]
    PumpDetuned { relative: f64, limit: f64 },

    /// Doubling the oracle grid moved the result by more than the tolerance.
    #[error(
        "oracle grid not converged: {coarse:.9e} at {coarse_samples} time samples vs \
         {fine:.9e} at doubled resolution (relative shift {shift:.2e} > {tolerance:.1e})"
    )]
    NotConverged {
        coarse_samples: usize,
        coarse: f64,
        fine: f64,
        shift: f64,
        tolerance: f64,
    },

    /// A rate curve violates a structural invariant.
    #[error("invalid rate curve: {0}")]
    InvalidCurve(String),

    /// The curve is too short or too coarsely sampled for the requested analysis.
    #[error("scan cannot resolve {0}")]
    Unresolved(String),

    /// The least-squares dip fit did not produce a usable model.
    #[error("dip fit failed: {0}")]
    FitFailed(String),
}
