//! Numerical toolkit for the resource theories of genuine and full quantum
//! coherence.
//!
//! States live in a fixed incoherent basis `{|0>, ..., |d-1>}`. The crate
//! classifies quantum channels into incoherent-operation classes, decides and
//! constructs deterministic and stochastic state conversions, computes optimal
//! conversion probabilities, and ships independent brute-force oracles that
//! the closed forms are checked against.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports and the
//! command-line driver live in the companion `coherence-cli` crate.
//!
//! Module map:
//!
//! - [`numkit`]: dense complex matrices, Hermitian eigendecomposition, Schur
//!   products, partial traces, norms and entropies.
//! - [`states`]: pure and mixed states, coherence sets, dephasing, the
//!   relative entropy of coherence, majorization.
//! - [`channels`]: Kraus maps, Schur maps, Choi matrices, representation
//!   changes, permutations.
//! - [`classify`]: membership predicates for IO, GI, SGI, FI, SIO, MIO, DIO
//!   and TIO, hidden-coherence witnesses, extremality and mixed-unitary
//!   decompositions.
//! - [`convert`]: conversion deciders and constructors.
//! - [`oracle`]: PSD completion, brute-force probability search, Monte Carlo
//!   branch sampling and definition-level minimizations.
//! - [`sample`]: seeded generators for random states and channels.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
mod math;

pub mod channels;
pub mod classify;
pub mod convert;
pub mod numkit;
pub mod oracle;
pub mod sample;
pub mod states;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use numkit::{ComplexMatrix, Tolerance};
