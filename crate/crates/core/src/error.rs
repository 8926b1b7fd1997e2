use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("basis dimension {0} is too small (need at least {min})", min = crate::circuit::MIN_BASIS_DIM)]
    BasisTooSmall(usize),

    #[error("symmetric eigen-solver did not converge on a {dim}x{dim} matrix")]
    EigenSolver { dim: usize },

    #[error("oscillator basis not converged: doubling the basis moved a transition by {shift_khz:.3} kHz")]
    BasisNotConverged { shift_khz: f64 },

    #[error("level index {index} out of range ({available} levels computed)")]
    LevelOutOfRange { index: usize, available: usize },

    #[error("at flux {flux}: {source}")]
    AtFlux { flux: f64, source: Box<Error> },

    #[error("fit did not converge after {iterations} iterations (cost {cost:e})")]
    NotConverged { iterations: usize, cost: f64 },

    #[error("rank-deficient problem: {0}")]
    RankDeficient(String),

    #[error("not identifiable: {0}")]
    NonIdentifiable(String),

    #[error("fit rejected: {0}")]
    FitRejected(String),

    #[error("population inversion: p0 = {0} implies a nonpositive temperature")]
    PopulationInversion(f64),

    #[error("integrator step unstable: step x fastest rate = {ratio:.3}")]
    StepFailure { ratio: f64 },

    #[error("pulse-train minimum at grid edge (amplitude {amplitude}); widen the grid")]
    NotBracketed { amplitude: f64 },

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// Rejects non-finite values and, when `positive`, values ≤ 0.
pub(crate) fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite, got {value}")))
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<()> {
    check_finite(name, value)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be > 0, got {value}")))
    }
}

pub(crate) fn check_nonnegative(name: &'static str, value: f64) -> Result<()> {
    check_finite(name, value)?;
    if value >= 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be >= 0, got {value}")))
    }
}
