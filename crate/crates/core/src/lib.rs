//! Exact computation of the contributions of n-cylinder square-tiled
//! surfaces to the Masur-Veech volumes of the minimal strata `H(2g-2)`.
//!
//! The table-driven route goes through the p-numbers ([`pnum`]) and the
//! Bernoulli form of the volume contributions ([`volumes`]). Two independent
//! brute-force oracles check it: integral metrics on bipartite ribbon graphs
//! and positive plane trees ([`ribbon`]), and direct enumeration of
//! square-tiled surfaces by permutation pairs ([`sts`]).

pub mod error;
pub mod exact;
pub mod perm;
pub mod pnum;
pub mod ribbon;
pub mod sts;
pub mod volumes;

pub use error::{Error, Result};
