use thiserror::Error;

use crate::hitran::ParseError;

/// Errors raised by the simulation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    /// No molecular mass is tabulated for this species.
    #[error(
        "no molecular mass tabulated for molecule {molecule_id}, isotopologue {isotopologue_id}"
    )]
    UnknownSpecies {
        molecule_id: u8,
        isotopologue_id: u8,
    },

    /// A configuration the analytic model does not cover.
    #[error("not modeled: {0}")]
    NotModeled(String),

    /// The dispersion difference between a sideband pair is too large for the
    /// first-order spectral density.
    #[error(
        "dispersion difference {delta_phi} rad exceeds the weak-dispersion limit of {limit} rad"
    )]
    OutOfRegime { delta_phi: f64, limit: f64 },

    #[error("inconsistent phase-sweep trace: {0}")]
    InconsistentTrace(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
