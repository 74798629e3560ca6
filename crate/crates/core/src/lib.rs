//! Certified numerics for adaptive versus non-adaptive strategies in quantum
//! games, and their application to bit-commitment protocols.

pub mod coding;
pub mod commitment;
pub mod error;
pub mod games;
pub mod hashing;
pub mod info;
pub mod measurement;
pub mod protocols;
pub mod quantum;
pub mod uc;

pub use error::{Error, Result};
