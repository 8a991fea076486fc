//! Comparative human causal responsibility in human-automation systems.
//!
//! The measure is the fraction of the output's Shannon entropy that is *not*
//! resolved by the automation's variables:
//!
//! ```text
//! Resp(Z) = H(Z | automation variables) / H(Z)
//! ```
//!
//! Two routes compute it:
//!
//! - [`aided_decision`]: closed form for a binary aided-detection task where an
//!   automated classifier and a human operator are equal-variance Gaussian
//!   signal detectors, and the human re-tunes their criterion per alarm state.
//! - [`flowmodel`]: any discrete information-flow network declared as
//!   conditional probability tables, evaluated by exact enumeration.
//!
//! [`simulate`] is a seedable Monte Carlo cross-check of the closed form and
//! [`sweep`] evaluates parameter grids and emits CSV.

pub mod aided_decision;
pub mod error;
pub mod flowmodel;
pub mod infotheory;
pub mod numfmt;
pub mod sdt;
pub mod simulate;
pub mod sweep;

pub use error::{Error, Result};
