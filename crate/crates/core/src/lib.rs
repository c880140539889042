//! Discrete phase-space methods for systems of N qudits of prime
//! dimension p.
//!
//! The crate builds the Heisenberg-Weyl displacement operators on
//! (C^p)^(⊗N), the Fourier-Wigner and discrete Wigner operator bases
//! derived from them, and the Wootters phase-space-point operators,
//! then uses those bases to expand density matrices into coefficient
//! grids over [p]^{2N} and to integrate many-body spin dynamics
//! directly in coefficient space.
//!
//! Phases are kept exact wherever the algebra allows: every phase that
//! arises in the displacement calculus is a 4p-th root of unity, stored
//! as an integer exponent ([`phase::Phase`]). Dense complex matrices
//! ([`operator::DenseOperator`]) carry an optional exact monomial view
//! so that group-law and orthogonality checks can be performed without
//! floating-point tolerance.

pub mod dynamics;
pub mod error;
pub mod gamma;
pub mod heisenberg_weyl;
pub mod lines;
pub mod operator;
pub mod phase;
pub mod wigner;

pub use error::{Error, Result};
pub use operator::{DenseOperator, MonomialOp};
pub use phase::{ModVec, Phase, PhasePoint, PhaseSum, Prime};
pub use wigner::{Basis, CoeffGrid};

/// Resource limits for operations that enumerate operators or triples.
///
/// `max_dim` bounds the operator dimension p^N; `max_triples` bounds the
/// number of index triples a structure-constant enumeration may visit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_dim: u64,
    pub max_triples: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_dim: 243,
            max_triples: 1_000_000_000,
        }
    }
}

impl Caps {
    /// Checks p^N against `max_dim` and returns the dimension.
    pub fn checked_dim(&self, p: Prime, n_sites: usize) -> Result<usize> {
        let dim = p
            .get()
            .checked_pow(n_sites as u32)
            .filter(|&d| d <= self.max_dim)
            .ok_or(Error::CapExceeded {
                what: "operator dimension p^N",
                cap: self.max_dim,
            })?;
        Ok(dim as usize)
    }

    /// Checks the triple count (p^{2N})^3 against `max_triples`.
    pub fn checked_triples(&self, p: Prime, n_sites: usize) -> Result<u64> {
        let grid = p
            .get()
            .checked_pow(2 * n_sites as u32)
            .and_then(|g| g.checked_pow(3))
            .filter(|&t| t <= self.max_triples)
            .ok_or(Error::CapExceeded {
                what: "structure-constant triples (p^{2N})^3",
                cap: self.max_triples,
            })?;
        Ok(grid)
    }
}
