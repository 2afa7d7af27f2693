//! Exact enumeration, counting, and verification of minimal balanced
//! collections of subsets of `{1, …, n}`.
//!
//! A collection of coalitions (nonempty subsets of the player set) is
//! *balanced* when strictly positive weights exist whose weighted
//! characteristic vectors sum to the all-ones vector, and *minimal balanced*
//! when no proper subcollection is balanced. Everything here is computed in
//! exact rational arithmetic: balancedness tests, weight vectors, the
//! inclusion–exclusion counting formulas, column-inversion orbits, and the
//! Bondareva–Shapley core-nonemptiness test they feed into.

pub mod counting;
pub mod enumerate;
pub mod exact;
pub mod games;
pub mod golden;
pub mod model;
pub mod orbits;
pub mod weights;

use thiserror::Error;

/// Errors surfaced by operations with explicit preconditions.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension overflow: {0}")]
    DimensionOverflow(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("player count mismatch: expected {expected}, got {got}")]
    PlayerMismatch { expected: usize, got: usize },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
