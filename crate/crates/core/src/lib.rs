//! Poissonized Plancherel measure on partitions: exact enumeration, the
//! discrete Bessel kernel and its relatives, Fredholm determinants, sampling
//! and edge/bulk asymptotics.

pub mod error;
pub mod lattice;
pub mod partition;
pub mod special;
pub mod quadrature;
pub mod kernels;
pub mod exact;
pub mod jet;
pub mod fredholm;
pub mod sampling;
pub mod asymptotics;
pub mod verify;

pub use error::{Error, Result};
