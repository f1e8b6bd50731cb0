//! Reversible teleportation of a qubit across an optical lattice of
//! neutral atoms, simulated on a dense state vector.
//!
//! The crate is layered bottom-up:
//!
//! - [`qstate`]: mixed-radix registers and the state-vector engine.
//! - [`lattice_ops`]: the physical gate set (site/ancilla Hadamards, the
//!   global shift, selective sweeps) and replayable pulse schedules.
//! - [`protocol`]: the teleportation pipelines built from that gate set.
//! - [`reference`](mod@reference): the two textbook schemes used for cross-checks.
//! - [`oracle`]: brute-force operator construction and block classification.
//! - [`cli`]: the `lattice-teleport` command-line front end.

pub mod cli;
pub mod lattice_ops;
pub mod oracle;
pub mod protocol;
pub mod qstate;
pub mod reference;
