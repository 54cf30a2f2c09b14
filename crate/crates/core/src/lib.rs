//! Dynamics of projective transformations of complex projective space.
//!
//! Classifies elements of `PSL(n+1, C)` as elliptic, parabolic or loxodromic, computes
//! their limit sets as finite unions of projective subspaces, builds certificates
//! (invariant Hermitian quadric families, attracting Grassmannian points) and provides a
//! brute-force orbit oracle to cross-check all of it.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod classification;
pub mod decomposition;
pub mod error;
pub mod grassmann;
pub mod hermitian;
pub mod limit_sets;
pub mod linalg;
pub mod orbit;
pub mod sampling;

pub use error::{Error, Result};

/// Tolerances shared across the pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Band around modulus one inside which an eigenvalue counts as unitary.
    pub unit_tol: f64,
    /// Relative tolerance for eigenvalue clustering and Jordan structure.
    pub cluster_tol: f64,
    /// Determinant floor for normalization.
    pub det_tol: f64,
    /// Cap on the condition estimate of the generalized eigenbasis.
    pub cond_cap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { unit_tol: 1e-8, cluster_tol: 1e-8, det_tol: 1e-12, cond_cap: 1e12 }
    }
}
