//! Dense pure-state simulation over mixed-dimension registers.

mod matrix;
mod register;
mod state;
mod unitary;

use num_complex::Complex64;
use thiserror::Error;

pub use matrix::CMatrix;
pub use register::{
    ancilla_label, site_label, Particle, Register, Role, ANCILLA_DIM, MAX_PARTICLE_DIM, SITE_DIM,
};
pub use state::PureState;
pub use unitary::{unit_phase, InputQubit, LocalUnitary, PairPhaseRule};

pub type Amplitude = Complex64;

/// Tolerance for exact algebraic identities (unitarity, normalization).
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Tolerance for end-to-end fidelities and leakage.
pub const END_TO_END_TOL: f64 = 1e-10;
/// Population outside a qutrit's qubit levels above which readout fails.
pub const LEAKAGE_TOL: f64 = END_TO_END_TOL;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QStateError {
    #[error("invalid register shape: {0}")]
    InvalidShape(String),
    #[error("duplicate particle label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown particle {0:?}")]
    UnknownParticle(String),
    #[error("level {level} out of range for {particle} (dimension {dim})")]
    LevelOutOfRange {
        particle: String,
        level: usize,
        dim: usize,
    },
    #[error("expected {expected} levels, got {found}")]
    WrongLevelCount { expected: usize, found: usize },
    #[error("expected {expected} amplitudes, got {found}")]
    WrongAmplitudeCount { expected: usize, found: usize },
    #[error("gate of dimension {found} applied to {particle} (dimension {expected})")]
    DimensionMismatch {
        particle: String,
        expected: usize,
        found: usize,
    },
    #[error("states live on different registers")]
    RegisterMismatch,
    #[error("matrix is not unitary (error {0:.3e})")]
    NotUnitary(f64),
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("invalid level pair ({low}, {high}) for dimension {dim}")]
    InvalidLevelPair { low: usize, high: usize, dim: usize },
    #[error("invalid phase rule: {0}")]
    InvalidRule(String),
    #[error("{particle} has population {population:.3e} outside its qubit levels")]
    Leakage { particle: String, population: f64 },
    #[error("non-finite amplitude")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, QStateError>;
