//! Enumeration, exact uniform sampling and local-limit verification for
//! unicellular (one-face) maps of high genus.
//!
//! The crate is organized bottom-up:
//!
//! - [`maps`]: plane trees, permutations, rotation systems, rooted graphs, balls and canonical codes.
//! - [`exact`]: arbitrary-precision counts of unicellular maps and odd-cycle permutations.
//! - [`asympt`]: the parameter `beta(theta)`, moments of the odd log-series law and asymptotic counts.
//! - [`gw`]: limit laws, geometric Galton-Watson trees and their survival conditioning.
//! - [`sampler`]: exact uniform sampling of the underlying graph of a unicellular map.
//! - [`oracle`]: exhaustive polygon-gluing enumeration for small sizes.
//! - [`harness`]: statistics and the experiments driven by the `unimap` binary.

pub mod asympt;
pub mod dist;
pub mod error;
pub mod exact;
pub mod gw;
pub mod harness;
pub mod maps;
pub mod oracle;
pub mod sampler;

pub use error::{Error, Result};
