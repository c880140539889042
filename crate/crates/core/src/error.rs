//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{what} exceeds the configured cap {cap}")]
    CapExceeded { what: &'static str, cap: u64 },

    #[error("operation is defined for odd primes only, got p = 2")]
    RequiresOddPrime,

    #[error("operation is defined for p = 2 only, got p = {0}")]
    RequiresQubits(u64),

    #[error("operation is defined for a single site only, got N = {0}")]
    SingleSiteOnly(usize),

    #[error("degenerate line: (n, m) = (0, 0) does not define a line")]
    DegenerateLine,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid Hamiltonian spec: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}
