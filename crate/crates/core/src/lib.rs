//! Fermionic permutation compiler for L x L nearest-neighbor qubit grids.
//!
//! The pipeline: [`planner`] splits a mode permutation into row, column and
//! row stages; [`gamma`] builds the diagonal operator that turns bare
//! vertical swaps into fermionic ones; [`fperm`] stitches the pieces into a
//! [`circuit::Circuit`]. Everything emitted is checked by the oracles in
//! [`verify`].

pub mod circuit;
pub mod cli;
pub mod encodings;
pub mod error;
pub mod fperm;
pub mod gamma;
pub mod geometry;
pub mod planner;
pub mod verify;
pub mod workloads;

pub use circuit::{Cell, Circuit, Gate, GateKind, Metrics};
pub use error::{Error, Result};
pub use geometry::{GridSpec, HilbertCurve, Permutation};
