//! One-way functions on Cantor space, realized as finite-prefix transducers
//! over staged enumerations, together with the inverters and extraction
//! procedures that turn any inverter into a decision procedure for the
//! enumerated set.
//!
//! The halting set is uncomputable, so every construction takes a
//! [`enumeration::StagedEnumeration`] as a stand-in; [`enumeration::collatz_toy`]
//! is the built-in one.

pub mod bitcore;
pub mod cli;
pub mod constructions;
pub mod enumeration;
mod error;
pub mod inversion;
pub mod streams;

pub use error::{Error, Result};
