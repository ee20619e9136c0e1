//! Command-line front end for `coherence-core`: JSON documents for states
//! and channels, deterministic JSON reports, and the built-in demos.
//!
//! Exit codes: 0 when a result was computed (whatever the verdict), 2 for
//! unreadable or malformed files, 3 for inputs that are not valid states or
//! channels, 4 when a search ran out of budget.

pub mod commands;
pub mod demos;
pub mod document;
pub mod error;
pub mod report;

pub use commands::run;
