use rand::RngCore;

use super::{Pipeline, ProtocolConfig, ProtocolError, Result, Stage};
use crate::lattice_ops::{PulseSchedule, Recorder};
use crate::qstate::{
    ancilla_label, site_label, InputQubit, LocalUnitary, PureState, ALGEBRAIC_TOL,
};

fn require_ground(state: &PureState, particle: &str, op: &str) -> Result<()> {
    let p0 = state.level_population(particle, 0)?;
    if 1.0 - p0 > ALGEBRAIC_TOL {
        return Err(ProtocolError::Precondition(format!(
            "{op}: {particle} is not in |0⟩"
        )));
    }
    Ok(())
}

/// Bit flip on `site` controlled by the ancilla's transport level.
fn flip_site(rec: &mut Recorder, ancilla: &str, site: usize, phase: f64) -> Result<()> {
    let label = site_label(site);
    rec.hadamard(&label)?;
    rec.sweep(ancilla, &[site], phase)?;
    rec.hadamard(&label)?;
    Ok(())
}

/// `|0⟩ ↔ |2⟩` flip of the ancilla controlled by `site`.
fn flip_ancilla(rec: &mut Recorder, ancilla: &str, site: usize, phase: f64) -> Result<()> {
    rec.hadamard(ancilla)?;
    rec.sweep(ancilla, &[site], phase)?;
    rec.hadamard(ancilla)?;
    Ok(())
}

/// Loads `phi` into site 1 through an ancilla.
///
/// The ancilla is first driven to `a|0⟩ + b|2⟩`; a site-conjugated sweep then
/// copies its value onto site 1 and an ancilla-conjugated sweep erases it
/// again, leaving the ancilla in |0⟩ and site 1 in `phi`.
pub fn initialize_site_one(
    state: PureState,
    ancilla: &str,
    phi: &InputQubit,
) -> Result<(PureState, PulseSchedule)> {
    let site = site_label(1);
    require_ground(&state, &site, "initialize_site_one")?;
    require_ground(&state, ancilla, "initialize_site_one")?;
    let phase = crate::lattice_ops::DEFAULT_PHASE;
    let mut rec = Recorder::new(state, "initialize-site-one");
    rec.local(ancilla, LocalUnitary::preparing_transport(phi))?;
    flip_site(&mut rec, ancilla, 1, phase)?;
    flip_ancilla(&mut rec, ancilla, 1, phase)?;
    Ok(rec.into_parts())
}

#[derive(Clone, Debug)]
pub struct Readout {
    /// Observed ancilla level: 0 or 2.
    pub outcome: usize,
    pub state: PureState,
    pub schedule: PulseSchedule,
}

/// Simulated fluorescence readout of site N.
///
/// Returns the ancillas to |0⟩ by repeating the read, moves site N's state
/// into the first ancilla (the initialization sequence run backwards) and
/// measures that ancilla.
pub fn readout_to_ancilla(
    state: PureState,
    config: &ProtocolConfig,
    rng: &mut dyn RngCore,
) -> Result<Readout> {
    let mut p = Pipeline::at_stage(config, state, Stage::Finished)?;
    p.reset_ancillas()?;
    let (state, mut schedule) = p.into_parts();
    let ancilla = ancilla_label(1);
    require_ground(&state, &ancilla, "readout_to_ancilla")?;
    let n = config.num_sites;
    let phase = config.collisional_phase;
    let mut rec = Recorder::new(state, "readout");
    flip_ancilla(&mut rec, &ancilla, n, phase)?;
    flip_site(&mut rec, &ancilla, n, phase)?;
    let outcome = rec.measure(&ancilla, rng)?;
    let (state, tail) = rec.into_parts();
    schedule.steps.extend(tail.steps);
    schedule.name = format!("readout-{}-{}", config.mode.as_str(), n);
    Ok(Readout {
        outcome,
        state,
        schedule,
    })
}
