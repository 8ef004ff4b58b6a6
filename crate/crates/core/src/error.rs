use thiserror::Error;

use crate::cert::ConjProductCert;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The operation needs something the group cannot provide
    /// (enumeration, a small enough order, a bounded orbit).
    #[error("capability error: {0}")]
    Capability(String),
    /// A documented precondition of the operation does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A constructive search ran out of attempts. The partial certificate
    /// covers the factors that were found.
    #[error("construction incomplete: {reason}")]
    ConstructionIncomplete {
        reason: String,
        partial: Box<ConjProductCert<crate::perm::Perm>>,
    },
    /// An exhaustive search proved that no object with the requested
    /// properties exists.
    #[error("no witness: {0}")]
    NoWitness(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
