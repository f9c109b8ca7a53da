use thiserror::Error;

use crate::contexts::PathLabel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("basis is not orthonormal: Gram matrix deviates from identity by {deviation:.3e}")]
    NonOrthonormalBasis { deviation: f64 },
    #[error("operator is not unitary: U^dagger U deviates from identity by {deviation:.3e}")]
    NotUnitary { deviation: f64 },
    #[error("operator is not contractive: largest singular value {sigma:.15}")]
    NotContractive { sigma: f64 },
    #[error("unknown path label `{0}`")]
    UnknownLabel(String),
    #[error("modifier target {0} is not an interior path")]
    InvalidModifierTarget(PathLabel),
    #[error("more than one modifier targets path {0}")]
    DuplicateModifier(PathLabel),
    #[error("amplitude transmission {0} is outside [0, 1]")]
    InvalidTransmission(f64),
    #[error("input state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("output port must be 1, 2 or 3 (got {0})")]
    InvalidPort(usize),
    #[error("setting grid is empty")]
    EmptyGrid,
    #[error("count rate must be positive and finite (got {0})")]
    InvalidRate(f64),
    #[error("integration time must be positive and finite (got {0})")]
    InvalidDuration(f64),
    #[error("visibility {0} is outside [0, 1]")]
    VisibilityOutOfRange(f64),
    #[error("design matrix is degenerate: {distinct} distinct settings, at least 3 required")]
    DegenerateDesign { distinct: usize },
    #[error("dataset is in {found} mode, expected {expected}")]
    WrongMode {
        expected: &'static str,
        found: &'static str,
    },
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
