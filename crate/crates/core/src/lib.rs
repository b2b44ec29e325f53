//! Secret-key generation over a two-input multiple-access channel with
//! public communication.
//!
//! The crate is organized bottom-up:
//!
//! - [`info`]: exact joint laws, channels and information measures.
//! - [`rates`]: pentagon rates, the no-feedback maximum symmetric rate and
//!   n-letter rate expressions evaluated on protocol laws.
//! - [`codes`]: feedback codes for the MAC (a two-phase adder code, identity
//!   codes, role-swapping symmetrization) and their Monte Carlo evaluation.
//! - [`converse`]: fractional partitions, the one-shot key-size converse with
//!   LP-optimized weights, and brute-force checkers for interactive
//!   communication.
//! - [`protocols`]: the communication-transmission protocol executor, key
//!   metrics, the source-emulation scheme and the feedback key pipeline.
//! - [`harness`]: seeding, JSON reports and the verification suites.
//! - [`schema`]: JSON file formats.

pub mod error;
pub mod info;
pub mod protocols;
pub mod codes;
pub mod converse;
pub mod rates;
pub mod seed;
pub mod harness;
pub mod schema;

pub use error::{Error, Result};
