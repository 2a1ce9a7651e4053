//! Numerical toolkit for covert quantum communication over binary-input
//! channels: divergences, capacity formulas, a seeded covert-codebook
//! simulator and a toy entanglement-generation protocol, all evaluated with
//! exact dense linear algebra on small systems.
//!
//! All logarithms are natural; rates are in nats.

pub mod capacity;
pub mod channel;
pub mod divergence;
pub mod eg;
pub mod error;
pub mod json;
pub mod operator;
pub mod random;
pub mod sim;

pub use error::{Error, Result, SupportAssumption};
