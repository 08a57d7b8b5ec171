use thiserror::Error;

/// Errors raised by the library.
///
/// The CLI maps these onto its exit codes, so each variant falls into one
/// of three classes: validation, usage, or numerical instability.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("state is not normalized: norm² = {norm_sqr}")]
    Normalization { norm_sqr: f64 },

    #[error("invalid density matrix: {0}")]
    DensityMatrix(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("configuration too close to a node of the wave function (density {density:e})")]
    NodeProximity { density: f64 },

    #[error("particle {particle} left the grid domain at x = {position}")]
    LeftDomain { particle: usize, position: f64 },

    #[error("norm drift {drift:e} at step {step} exceeds tolerance; reduce dt")]
    NormDrift { step: usize, drift: f64 },

    #[error("non-finite amplitude at step {step}")]
    NonFinite { step: usize },

    #[error("wave function mass {mass:e} reached the grid boundary at step {step}; enlarge the domain")]
    BoundaryMass { step: usize, mass: f64 },
}

impl Error {
    /// True for failures of the numerical integration (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NodeProximity { .. }
                | Error::LeftDomain { .. }
                | Error::NormDrift { .. }
                | Error::NonFinite { .. }
                | Error::BoundaryMass { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
