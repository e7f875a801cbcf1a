//! Random-walk network embeddings on stochastic block models.
//!
//! The crate implements the full pipeline behind DeepWalk- and node2vec-style
//! community recovery: SBM graph sampling ([`sbm`]), random-walk generation and
//! the exact edge-state chain ([`walks`]), windowed co-occurrence counting
//! ([`cooccur`]), the shifted-PMI M-matrices in their empirical, limiting and
//! noiseless forms ([`mmatrix`]), spectral clustering with permutation-minimal
//! error scoring ([`spectral`]), and a brute-force path-counting oracle used to
//! validate the fast implementations ([`oracle`]).

pub mod cooccur;
pub mod mmatrix;
pub mod oracle;
pub mod sbm;
pub mod spectral;
pub mod walks;

mod rng;

pub use rng::stream_rng;

use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("matrix is not symmetric: {0}")]
    NotSymmetric(String),
    #[error("graph has no edges")]
    EdgelessGraph,
    #[error("invalid community assignment: {0}")]
    InvalidAssignment(String),
    #[error("co-occurrence window [{t_l}, {t_u}] invalid for walk length {l}")]
    InvalidWindow { t_l: usize, t_u: usize, l: usize },
    #[error("all co-occurrence counts are zero")]
    EmptyCooccurrence,
    #[error("zero step normalizer at node {node}: degree-1 dead end with alpha = 0")]
    ZeroNormalizer { node: usize },
    #[error("path enumeration budget exceeded: {count} > {budget}")]
    BudgetExceeded { count: u128, budget: u128 },
    #[error("eigendecomposition failed: {0}")]
    EigenFailure(String),
    #[error("unknown field name {name:?}; valid fields: {valid}")]
    UnknownField { name: String, valid: String },
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
