//! Simulation library for gates built on degenerate atomic levels.
//!
//! Modules build on each other bottom-up: [`matcore`] supplies dense complex
//! linear algebra, [`angular`] the angular-momentum factors, [`singleatom`]
//! the single-atom Hamiltonians and Hadamard sequence, [`fidelity`] average
//! gate fidelities, [`twoatom`] the two-atom controlled-Z construction and
//! [`decoherence`] Gaussian dephasing of entangled states.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angular;
pub mod decoherence;
pub mod error;
pub mod fidelity;
pub mod matcore;
pub mod singleatom;
pub mod twoatom;

pub use error::{Error, Result};
pub use matcore::{ComplexMatrix, StateVector, C64};
