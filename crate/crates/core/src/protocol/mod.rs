//! Teleportation pipelines composed from the lattice gate set.

mod correction;
mod pipeline;
mod transfer;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice_ops::{LatticeError, PulseSchedule, DEFAULT_PHASE};
use crate::qstate::{site_label, InputQubit, LocalUnitary, PureState, QStateError, END_TO_END_TOL};

pub use correction::{three_site_operator, w_operator, w_unnormalized, CorrectionTable};
pub use pipeline::{far_sites, near_sites, Pipeline, Stage};
pub use transfer::{initialize_site_one, readout_to_ancilla, Readout};

/// Largest lattice the dense simulator accepts (two ancillas, ~600 MB).
pub const MAX_SITES: usize = 22;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    State(#[from] QStateError),
    #[error("{0} sites: odd N > 3 is not supported (use N = 3 or an even N >= 4)")]
    OddSites(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{op} is not valid at stage {found:?}")]
    Stage { op: &'static str, found: Stage },
    #[error("{op} is not part of the {mode:?} protocol")]
    WrongMode { op: &'static str, mode: Mode },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, ProtocolError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Three sites, two ancillas.
    ThreeSite,
    /// Even number of sites, two ancillas.
    EvenN,
    /// Even number of sites, one ancilla reused for both parities.
    SingleAncilla,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::ThreeSite => "three-site",
            Mode::EvenN => "even-n",
            Mode::SingleAncilla => "single-ancilla",
        }
    }

    /// Natural mode for a two-ancilla run on `num_sites` sites.
    pub fn for_sites(num_sites: usize) -> Self {
        if num_sites == 3 {
            Mode::ThreeSite
        } else {
            Mode::EvenN
        }
    }
}

/// Which site class each ancilla reads.
///
/// `Canonical`: the first ancilla records the parity of sites `N−1, N−3, …`
/// and the second that of `N−2, N−4, …`, the sites each actually visits.
/// `Swapped` exchanges the two, as the parity labels in the equations of the
/// even-N construction would have it.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "kebab-case")]
pub enum ParityAssignment {
    #[default]
    Canonical,
    Swapped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub num_sites: usize,
    pub mode: Mode,
    pub collisional_phase: f64,
    pub tolerance: f64,
    pub parity_assignment: ParityAssignment,
}

impl ProtocolConfig {
    pub fn new(num_sites: usize, mode: Mode) -> Result<Self> {
        let config = Self {
            num_sites,
            mode,
            collisional_phase: DEFAULT_PHASE,
            tolerance: END_TO_END_TOL,
            parity_assignment: ParityAssignment::Canonical,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_sites;
        if n > 3 && n % 2 == 1 {
            return Err(ProtocolError::OddSites(n));
        }
        match self.mode {
            Mode::ThreeSite if n != 3 => {
                return Err(ProtocolError::InvalidConfig(format!(
                    "three-site mode needs 3 sites, got {n}"
                )))
            }
            Mode::EvenN | Mode::SingleAncilla if n < 4 || n % 2 == 1 => {
                return Err(ProtocolError::InvalidConfig(format!(
                    "{} mode needs an even number of sites >= 4, got {n}",
                    self.mode.as_str()
                )))
            }
            _ => {}
        }
        if n > MAX_SITES {
            return Err(ProtocolError::InvalidConfig(format!(
                "{n} sites exceeds the limit of {MAX_SITES}"
            )));
        }
        if !self.collisional_phase.is_finite() {
            return Err(ProtocolError::InvalidConfig(format!(
                "non-finite phase {}",
                self.collisional_phase
            )));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(ProtocolError::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }

    pub fn num_ancillas(&self) -> usize {
        match self.mode {
            Mode::SingleAncilla => 1,
            _ => 2,
        }
    }

    /// Number of site pairs `m = N/2`.
    pub fn pairs(&self) -> usize {
        self.num_sites / 2
    }
}

/// The fixed unitary applied to site N after the conditional correction.
///
/// Three sites: `−iσ₂`. Even N: the residual on site N is `W⁽⁰⁾†|φ⟩` for odd
/// `m` and `W⁽⁰⁾|φ⟩` for even `m`, undone by the normalized `W⁽⁰⁾` or
/// `W⁽⁰⁾†` respectively.
pub fn final_correction(config: &ProtocolConfig) -> LocalUnitary {
    match config.mode {
        Mode::ThreeSite => three_site_operator(0),
        _ if config.pairs() % 2 == 1 => w_operator(0),
        _ => w_operator(0).adjoint(),
    }
}

/// Total population of level 1 over all ancillas. The encoding only uses
/// levels 0 and 2, so any weight there is leakage.
pub fn ancilla_leakage(state: &PureState) -> Result<f64> {
    let mut total = 0.0;
    for a in state.register().ancillas() {
        total += state.level_population(&a.label, 1)?;
    }
    Ok(total)
}

#[derive(Clone, Debug, Serialize)]
pub struct TeleportReport {
    pub input: InputQubit,
    pub num_sites: usize,
    pub mode: Mode,
    pub fidelity: f64,
    pub purity: f64,
    pub leakage: f64,
    pub gate_count: usize,
    pub wall_time_ms: f64,
    pub parity_assignment_used: ParityAssignment,
    pub schedule_digest: String,
    #[serde(skip)]
    pub schedule: PulseSchedule,
}

impl TeleportReport {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.fidelity >= 1.0 - tolerance
    }
}

#[derive(Clone, Debug)]
pub struct TeleportRun {
    pub report: TeleportReport,
    pub final_state: PureState,
}

/// Site-N figures of merit for a finished run.
pub fn assess(state: &PureState, num_sites: usize, phi: &InputQubit) -> Result<(f64, f64, f64)> {
    let target = site_label(num_sites);
    Ok((
        state.fidelity_with_qubit(&target, phi)?,
        state.purity(&target)?,
        ancilla_leakage(state)?,
    ))
}

/// Prepares `phi` on site 1 and runs the full protocol of `config.mode`.
pub fn teleport(phi: &InputQubit, config: &ProtocolConfig) -> Result<TeleportRun> {
    let start = Instant::now();
    let mut pipeline = Pipeline::new(config, phi)?;
    pipeline.run()?;
    let (final_state, schedule) = pipeline.into_parts();
    let (fidelity, purity, leakage) = assess(&final_state, config.num_sites, phi)?;
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let report = TeleportReport {
        input: *phi,
        num_sites: config.num_sites,
        mode: config.mode,
        fidelity,
        purity,
        leakage,
        gate_count: schedule.len(),
        wall_time_ms,
        parity_assignment_used: config.parity_assignment,
        schedule_digest: schedule.digest(),
        schedule,
    };
    Ok(TeleportRun {
        report,
        final_state,
    })
}

/// [`teleport`] restricted to the one-ancilla variant.
pub fn single_ancilla_teleport(phi: &InputQubit, config: &ProtocolConfig) -> Result<TeleportRun> {
    if config.mode != Mode::SingleAncilla {
        return Err(ProtocolError::WrongMode {
            op: "single_ancilla_teleport",
            mode: config.mode,
        });
    }
    teleport(phi, config)
}
