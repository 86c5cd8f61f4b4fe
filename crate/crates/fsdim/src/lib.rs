//! Finite-state dimension and finite-state mutual dimension estimation.
//!
//! The crate computes exact aligned-block frequency tables and the
//! information measures derived from them (entropy, mutual information,
//! KL divergence, self-information), builds information-lossless
//! finite-state compressors — including block-Huffman machines — and
//! turns those pieces into desk-scale estimators of finite-state
//! dimension and mutual dimension, together with a mechanical
//! verification suite for the underlying inequalities.

pub mod alphabet;
pub mod blockstats;
pub mod dimension;
pub mod error;
pub mod fsc;
pub mod huffman;
pub mod ratios;
pub mod verify;

pub use error::{Error, Result};

/// Version tag stamped into every serialized report.
pub const SCHEMA_VERSION: u32 = 1;
