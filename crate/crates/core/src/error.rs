//! Error type shared by all estimation modules.

use thiserror::Error;

/// Errors produced by construction-time validation and by operations whose
/// preconditions can fail at runtime.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum CoreError {
    /// A domain type was constructed with values violating its invariants.
    #[error("invalid {what}: {why}")]
    InvalidInput { what: &'static str, why: String },

    /// An impurity symbol was not found in the species database.
    #[error("unknown impurity species `{0}`")]
    UnknownSpecies(String),

    /// Atomic fraction outside (0, 1) or number density outside (0, N0).
    #[error("purity grade out of range: {0}")]
    GradeOutOfRange(String),

    /// An operation requiring a nonempty collection got an empty one.
    #[error("{0} must not be empty")]
    EmptyInput(&'static str),

    /// Reference strain density of states is zero or undefined at the probe
    /// frequency, so the suppression ratio is undefined.
    #[error("reference density undefined at omega = {omega:.6e} rad/s: {why}")]
    ReferenceDensity { omega: f64, why: String },

    /// Poisson mean n·V outside the exactly-representable sampler range.
    #[error("Poisson mean {lambda:.6e} exceeds sampler range (max {max:.6e}); refusing to clamp")]
    PoissonRange { lambda: f64, max: f64 },

    /// Extracted suppression came out negative: the quoted parasitic rate
    /// exceeds the total measured rate, so the inputs are inconsistent.
    #[error("inconsistent relaxation data: parasitic rate exceeds total rate (S_eff = {0:.6e})")]
    InconsistentParasitics(f64),

    /// Sweep specification failed validation.
    #[error("invalid sweep spec: {0}")]
    SweepSpec(String),

    /// No parasitic-dominance crossover exists or it lies outside the
    /// swept range.
    #[error("crossover not available: {0}")]
    Crossover(String),
}

impl CoreError {
    pub(crate) fn invalid(what: &'static str, why: impl Into<String>) -> Self {
        CoreError::InvalidInput {
            what,
            why: why.into(),
        }
    }
}
