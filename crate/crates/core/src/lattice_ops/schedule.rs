use std::io::{BufRead, Write};

use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{hadamard, shift, sweep, LatticeError, LevelPair, Result};
use crate::qstate::{LocalUnitary, PureState, Register, Role};

/// One physical operation on the lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum PulseStep {
    Hadamard {
        particle: String,
        levels: LevelPair,
    },
    Shift {
        phase: f64,
    },
    /// Sites are 1-based and listed in the order the ancilla visits them.
    Sweep {
        ancilla: String,
        sites: Vec<usize>,
        phase: f64,
    },
    Local {
        particle: String,
        unitary: LocalUnitary,
    },
    Measure {
        particle: String,
    },
}

impl PulseStep {
    fn touches_ancilla(&self, register: &Register) -> bool {
        let particle = match self {
            PulseStep::Hadamard { particle, .. }
            | PulseStep::Local { particle, .. }
            | PulseStep::Measure { particle } => particle,
            _ => return false,
        };
        register
            .particle(particle)
            .map(|p| p.role == Role::Ancilla)
            .unwrap_or(false)
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    schedule: String,
    num_sites: usize,
    num_ancillas: usize,
}

/// Ordered, replayable log of the steps applied to a lattice register.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSchedule {
    pub name: String,
    pub num_sites: usize,
    pub num_ancillas: usize,
    pub steps: Vec<PulseStep>,
}

impl PulseSchedule {
    pub fn new(name: impl Into<String>, num_sites: usize, num_ancillas: usize) -> Self {
        Self {
            name: name.into(),
            num_sites,
            num_ancillas,
            steps: Vec::new(),
        }
    }

    pub fn register(&self) -> Result<Register> {
        Ok(Register::lattice(self.num_sites, self.num_ancillas)?)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Checks every step against the register shape. Sweeps must visit their
    /// sites in one spatial direction.
    pub fn validate(&self) -> Result<()> {
        let reg = self.register()?;
        for step in &self.steps {
            match step {
                PulseStep::Hadamard { particle, levels } => {
                    let p = reg.particle(particle)?;
                    if *levels != LevelPair::for_role(p.role) {
                        return Err(LatticeError::InvalidLevelPair {
                            particle: particle.clone(),
                            pair: *levels,
                        });
                    }
                }
                PulseStep::Shift { phase } => {
                    if !phase.is_finite() {
                        return Err(LatticeError::NonFinitePhase(*phase));
                    }
                    if self.num_sites < 2 {
                        return Err(LatticeError::TooFewSites(self.num_sites));
                    }
                }
                PulseStep::Sweep {
                    ancilla,
                    sites,
                    phase,
                } => {
                    if !phase.is_finite() {
                        return Err(LatticeError::NonFinitePhase(*phase));
                    }
                    if reg.particle(ancilla)?.role != Role::Ancilla {
                        return Err(LatticeError::NotAnAncilla(ancilla.clone()));
                    }
                    if sites.is_empty() {
                        return Err(LatticeError::EmptySweep(ancilla.clone()));
                    }
                    if let Some(&site) = sites.iter().find(|&&j| j == 0 || j > self.num_sites) {
                        return Err(LatticeError::SiteOutOfRange {
                            site,
                            num_sites: self.num_sites,
                        });
                    }
                    let up = sites.windows(2).all(|w| w[0] < w[1]);
                    let down = sites.windows(2).all(|w| w[0] > w[1]);
                    if !up && !down {
                        return Err(LatticeError::NonMonotoneSweep {
                            ancilla: ancilla.clone(),
                            sites: sites.clone(),
                        });
                    }
                }
                PulseStep::Local { particle, unitary } => {
                    let p = reg.particle(particle)?;
                    if p.dim != unitary.dim() {
                        return Err(crate::qstate::QStateError::DimensionMismatch {
                            particle: particle.clone(),
                            expected: p.dim,
                            found: unitary.dim(),
                        }
                        .into());
                    }
                }
                PulseStep::Measure { particle } => {
                    reg.particle(particle)?;
                }
            }
        }
        Ok(())
    }

    /// The inverse schedule: steps reversed, phases negated, sweeps run
    /// backwards, local gates replaced by their adjoints.
    pub fn adjoint(&self) -> Result<Self> {
        let steps = self
            .steps
            .iter()
            .rev()
            .map(|step| match step {
                PulseStep::Hadamard { .. } => Ok(step.clone()),
                PulseStep::Shift { phase } => Ok(PulseStep::Shift { phase: -phase }),
                PulseStep::Sweep {
                    ancilla,
                    sites,
                    phase,
                } => Ok(PulseStep::Sweep {
                    ancilla: ancilla.clone(),
                    sites: sites.iter().rev().copied().collect(),
                    phase: -phase,
                }),
                PulseStep::Local { particle, unitary } => Ok(PulseStep::Local {
                    particle: particle.clone(),
                    unitary: unitary.adjoint(),
                }),
                PulseStep::Measure { .. } => Err(LatticeError::Irreversible),
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            name: format!("{}-adjoint", self.name),
            num_sites: self.num_sites,
            num_ancillas: self.num_ancillas,
            steps,
        })
    }

    /// Number of passes of the transport-level lattice: maximal runs of
    /// steps containing at least one sweep, broken by shifts, measurements
    /// and any operation on an ancilla (ancillas are addressed only while
    /// parked).
    pub fn sweep_passes(&self) -> Result<usize> {
        let reg = self.register()?;
        let mut passes = 0;
        let mut in_pass = false;
        for step in &self.steps {
            match step {
                PulseStep::Sweep { .. } => {
                    if !in_pass {
                        passes += 1;
                        in_pass = true;
                    }
                }
                PulseStep::Shift { .. } | PulseStep::Measure { .. } => in_pass = false,
                s if s.touches_ancilla(&reg) => in_pass = false,
                _ => {}
            }
        }
        Ok(passes)
    }

    /// Line-delimited text: a header object, then one step object per line.
    pub fn to_lines(&self) -> String {
        let header = Header {
            schedule: self.name.clone(),
            num_sites: self.num_sites,
            num_ancillas: self.num_ancillas,
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for step in &self.steps {
            out.push_str(&serde_json::to_string(step).expect("step serializes"));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (i, first) = lines.next().ok_or(LatticeError::Malformed {
            line: 1,
            message: "empty schedule".into(),
        })?;
        let header: Header = serde_json::from_str(first).map_err(|e| LatticeError::Malformed {
            line: i + 1,
            message: e.to_string(),
        })?;
        let mut schedule = Self::new(header.schedule, header.num_sites, header.num_ancillas);
        for (i, line) in lines {
            let step: PulseStep =
                serde_json::from_str(line).map_err(|e| LatticeError::Malformed {
                    line: i + 1,
                    message: e.to_string(),
                })?;
            schedule.steps.push(step);
        }
        schedule.validate()?;
        Ok(schedule)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(self.to_lines().as_bytes())?;
        Ok(())
    }

    pub fn read_from<R: BufRead>(mut input: R) -> Result<Self> {
        let mut text = String::new();
        input.read_to_string(&mut text)?;
        Self::parse(&text)
    }

    /// SHA-256 of the line format, hex encoded.
    pub fn digest(&self) -> String {
        format!("{:x}", Sha256::digest(self.to_lines().as_bytes()))
    }
}

/// Applies one step. Returns the outcome of a measurement step.
pub fn apply_step<'r>(
    state: &mut PureState,
    step: &PulseStep,
    rng: Option<&mut (dyn RngCore + 'r)>,
) -> Result<Option<usize>> {
    match step {
        PulseStep::Hadamard { particle, levels } => hadamard(state, particle, *levels)?,
        PulseStep::Shift { phase } => shift(state, *phase)?,
        PulseStep::Sweep {
            ancilla,
            sites,
            phase,
        } => sweep(state, ancilla, sites, *phase)?,
        PulseStep::Local { particle, unitary } => state.apply_local(particle, unitary)?,
        PulseStep::Measure { particle } => {
            let rng = rng.ok_or_else(|| LatticeError::MissingRng(particle.clone()))?;
            return Ok(Some(state.measure(particle, rng)?));
        }
    }
    Ok(None)
}

/// Applies every step of `schedule` to `state` in order. Measurement steps
/// draw from `rng`; their outcomes are returned in order.
pub fn replay<'r>(
    schedule: &PulseSchedule,
    state: &mut PureState,
    mut rng: Option<&mut (dyn RngCore + 'r)>,
) -> Result<Vec<usize>> {
    let reg = state.register();
    if reg.num_sites() != schedule.num_sites
        || reg.num_ancillas() != schedule.num_ancillas
        || *reg != schedule.register()?
    {
        return Err(LatticeError::ShapeMismatch {
            sites: schedule.num_sites,
            ancillas: schedule.num_ancillas,
        });
    }
    schedule.validate()?;
    let mut outcomes = Vec::new();
    for step in &schedule.steps {
        if let Some(k) = apply_step(state, step, rng.as_deref_mut())? {
            outcomes.push(k);
        }
    }
    Ok(outcomes)
}

/// A state together with the log of everything applied to it.
#[derive(Clone, Debug)]
pub struct Recorder {
    state: PureState,
    schedule: PulseSchedule,
}

impl Recorder {
    pub fn new(state: PureState, name: impl Into<String>) -> Self {
        let reg = state.register();
        let schedule = PulseSchedule::new(name, reg.num_sites(), reg.num_ancillas());
        Self { state, schedule }
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn schedule(&self) -> &PulseSchedule {
        &self.schedule
    }

    pub fn into_parts(self) -> (PureState, PulseSchedule) {
        (self.state, self.schedule)
    }

    pub fn apply(
        &mut self,
        step: PulseStep,
        rng: Option<&mut dyn RngCore>,
    ) -> Result<Option<usize>> {
        let out = apply_step(&mut self.state, &step, rng)?;
        self.schedule.steps.push(step);
        Ok(out)
    }

    /// Hadamard on the particle's natural level pair.
    pub fn hadamard(&mut self, particle: &str) -> Result<()> {
        let levels = LevelPair::for_role(self.state.register().particle(particle)?.role);
        self.apply(
            PulseStep::Hadamard {
                particle: particle.to_string(),
                levels,
            },
            None,
        )
        .map(drop)
    }

    pub fn shift(&mut self, phase: f64) -> Result<()> {
        self.apply(PulseStep::Shift { phase }, None).map(drop)
    }

    pub fn sweep(&mut self, ancilla: &str, sites: &[usize], phase: f64) -> Result<()> {
        self.apply(
            PulseStep::Sweep {
                ancilla: ancilla.to_string(),
                sites: sites.to_vec(),
                phase,
            },
            None,
        )
        .map(drop)
    }

    pub fn local(&mut self, particle: &str, unitary: LocalUnitary) -> Result<()> {
        self.apply(
            PulseStep::Local {
                particle: particle.to_string(),
                unitary,
            },
            None,
        )
        .map(drop)
    }

    pub fn measure(&mut self, particle: &str, rng: &mut dyn RngCore) -> Result<usize> {
        let out = self.apply(
            PulseStep::Measure {
                particle: particle.to_string(),
            },
            Some(rng),
        )?;
        Ok(out.expect("measurement yields an outcome"))
    }
}
