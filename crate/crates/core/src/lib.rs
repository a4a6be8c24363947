//! Simulation of identification-in-the-limit and hallucination-detection
//! games over countable language collections.

pub mod adversary;
pub mod cli;
pub mod detect;
pub mod error;
pub mod harness;
pub mod identify;
pub mod lang;
pub mod ledger;
pub mod reduction;

pub use error::{LabError, Result};
