use serde::Serialize;

use super::{final_correction, Mode, ParityAssignment, ProtocolConfig, ProtocolError, Result};
use crate::lattice_ops::{PulseSchedule, Recorder};
use crate::qstate::{ancilla_label, site_label, InputQubit, LocalUnitary, PureState, Register};

type ReadSets = Vec<(String, Vec<usize>)>;

/// Where a [`Pipeline`] is in the protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Prepared,
    Entangled,
    Read,
    Corrected,
    EvenCarried,
    AncillaRestored,
    Finished,
    AncillasReset,
}

/// Sites read by the first ancilla: `N−1, N−3, …`, in visiting order.
pub fn near_sites(num_sites: usize) -> Vec<usize> {
    (1..num_sites).rev().step_by(2).collect()
}

/// Sites read by the second ancilla: `…, N−4, N−2`, in visiting order.
pub fn far_sites(num_sites: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (1..num_sites.saturating_sub(1)).rev().step_by(2).collect();
    v.reverse();
    v
}

/// Protocol driver that records every step into a schedule and refuses
/// out-of-order stages.
#[derive(Clone, Debug)]
pub struct Pipeline {
    config: ProtocolConfig,
    rec: Recorder,
    stage: Stage,
}

impl Pipeline {
    /// Lattice register in its initial product state with `phi` on site 1.
    /// The preparation itself is not part of the recorded schedule.
    pub fn new(config: &ProtocolConfig, phi: &InputQubit) -> Result<Self> {
        config.validate()?;
        let reg = Register::lattice(config.num_sites, config.num_ancillas())?;
        let state = PureState::with_qubit(reg, &site_label(1), phi)?;
        Ok(Self::wrap(config, state, Stage::Prepared))
    }

    /// Resumes the protocol on an arbitrary state at `stage`.
    pub fn at_stage(config: &ProtocolConfig, state: PureState, stage: Stage) -> Result<Self> {
        config.validate()?;
        let expected = Register::lattice(config.num_sites, config.num_ancillas())?;
        if *state.register() != expected {
            return Err(ProtocolError::InvalidConfig(format!(
                "state register does not match {} sites with {} ancillas",
                config.num_sites,
                config.num_ancillas()
            )));
        }
        Ok(Self::wrap(config, state, stage))
    }

    fn wrap(config: &ProtocolConfig, state: PureState, stage: Stage) -> Self {
        let name = format!("teleport-{}-{}", config.mode.as_str(), config.num_sites);
        Self {
            config: config.clone(),
            rec: Recorder::new(state, name),
            stage,
        }
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn state(&self) -> &PureState {
        self.rec.state()
    }

    pub fn schedule(&self) -> &PulseSchedule {
        self.rec.schedule()
    }

    pub fn into_parts(self) -> (PureState, PulseSchedule) {
        self.rec.into_parts()
    }

    fn expect_stage(&self, allowed: &[Stage], op: &'static str) -> Result<()> {
        if allowed.contains(&self.stage) {
            Ok(())
        } else {
            Err(ProtocolError::Stage {
                op,
                found: self.stage,
            })
        }
    }

    fn expect_mode(&self, single: bool, op: &'static str) -> Result<()> {
        if (self.config.mode == Mode::SingleAncilla) == single {
            Ok(())
        } else {
            Err(ProtocolError::WrongMode {
                op,
                mode: self.config.mode,
            })
        }
    }

    /// Total population of the ancillas' unused level.
    pub fn leakage(&self) -> Result<f64> {
        super::ancilla_leakage(self.state())
    }

    fn check_leakage(&self, op: &'static str) -> Result<()> {
        let leak = self.leakage()?;
        if leak > self.config.tolerance {
            return Err(ProtocolError::Precondition(format!(
                "{op}: ancilla leakage {leak:.3e} above tolerance"
            )));
        }
        Ok(())
    }

    /// Sites whose parity each ancilla records, in the order they are swept.
    pub fn read_sets(&self) -> Vec<(String, Vec<usize>)> {
        let n = self.config.num_sites;
        let (first, second) = match self.config.parity_assignment {
            ParityAssignment::Canonical => (near_sites(n), far_sites(n)),
            ParityAssignment::Swapped => {
                let mut a = far_sites(n);
                a.reverse();
                let mut b = near_sites(n);
                b.reverse();
                (a, b)
            }
        };
        match self.config.mode {
            Mode::SingleAncilla => vec![(ancilla_label(1), first)],
            _ => vec![(ancilla_label(1), first), (ancilla_label(2), second)],
        }
    }

    /// Hadamard on every site, the global shift, Hadamard on every site.
    pub fn entangle(&mut self) -> Result<()> {
        self.expect_stage(&[Stage::Prepared], "entangle")?;
        for a in self.state().register().ancillas() {
            let p0 = self.state().level_population(&a.label, 0)?;
            if 1.0 - p0 > self.config.tolerance {
                return Err(ProtocolError::Precondition(format!(
                    "entangle: {} not in |0⟩",
                    a.label
                )));
            }
        }
        let n = self.config.num_sites;
        for j in 1..=n {
            self.rec.hadamard(&site_label(j))?;
        }
        self.rec.shift(self.config.collisional_phase)?;
        for j in 1..=n {
            self.rec.hadamard(&site_label(j))?;
        }
        self.stage = Stage::Entangled;
        Ok(())
    }

    fn read_pass(&mut self, sets: &[(String, Vec<usize>)]) -> Result<()> {
        let phase = self.config.collisional_phase;
        for (a, _) in sets {
            self.rec.hadamard(a)?;
        }
        for (a, sites) in sets {
            if !sites.is_empty() {
                self.rec.sweep(a, sites, phase)?;
            }
        }
        for (a, _) in sets {
            self.rec.hadamard(a)?;
        }
        Ok(())
    }

    /// Both ancillas read the parity of their sites (Hadamard-conjugated
    /// sweeps). Applying it a second time restores the ancillas.
    pub fn read(&mut self) -> Result<()> {
        self.expect_mode(false, "read")?;
        self.expect_stage(&[Stage::Entangled], "read")?;
        self.check_leakage("read")?;
        self.read_pass(&self.read_sets())?;
        self.stage = Stage::Read;
        Ok(())
    }

    /// Bit flip on site N controlled by an ancilla: Hadamards on the site
    /// around a sweep that touches only site N.
    fn controlled_flip(&mut self, ancilla: &str) -> Result<()> {
        let target = site_label(self.config.num_sites);
        self.rec.hadamard(&target)?;
        self.rec.sweep(
            ancilla,
            &[self.config.num_sites],
            self.config.collisional_phase,
        )?;
        self.rec.hadamard(&target)?;
        Ok(())
    }

    /// Phase flip on site N controlled by an ancilla: a bare sweep.
    fn controlled_phase(&mut self, ancilla: &str) -> Result<()> {
        self.rec.sweep(
            ancilla,
            &[self.config.num_sites],
            self.config.collisional_phase,
        )?;
        Ok(())
    }

    /// Conditional correction of site N from the ancillas' values.
    pub fn correct(&mut self) -> Result<()> {
        self.expect_mode(false, "correct")?;
        self.expect_stage(&[Stage::Read], "correct")?;
        self.check_leakage("correct")?;
        self.controlled_flip(&ancilla_label(2))?;
        self.controlled_phase(&ancilla_label(1))?;
        self.stage = Stage::Corrected;
        Ok(())
    }

    fn single_sets(&self) -> (ReadSets, ReadSets) {
        let n = self.config.num_sites;
        let a = ancilla_label(1);
        let (mut even, mut odd) = (far_sites(n), near_sites(n));
        if self.config.parity_assignment == ParityAssignment::Swapped {
            std::mem::swap(&mut even, &mut odd);
        }
        (vec![(a.clone(), even)], vec![(a, odd)])
    }

    /// Single-ancilla step (i): read the even sites and carry the result to
    /// site N as a bit flip.
    pub fn carry_even(&mut self) -> Result<()> {
        self.expect_mode(true, "carry_even")?;
        self.expect_stage(&[Stage::Entangled], "carry_even")?;
        self.check_leakage("carry_even")?;
        let (even, _) = self.single_sets();
        self.read_pass(&even)?;
        self.controlled_flip(&ancilla_label(1))?;
        self.stage = Stage::EvenCarried;
        Ok(())
    }

    /// Single-ancilla step (ii): repeat the even read to return the ancilla
    /// to |0⟩.
    pub fn restore_ancilla(&mut self) -> Result<()> {
        self.expect_mode(true, "restore_ancilla")?;
        self.expect_stage(&[Stage::EvenCarried], "restore_ancilla")?;
        let (even, _) = self.single_sets();
        self.read_pass(&even)?;
        self.stage = Stage::AncillaRestored;
        Ok(())
    }

    /// Single-ancilla step (iii): read the odd sites and carry the result to
    /// site N as a phase flip.
    pub fn carry_odd(&mut self) -> Result<()> {
        self.expect_mode(true, "carry_odd")?;
        self.expect_stage(&[Stage::AncillaRestored], "carry_odd")?;
        self.check_leakage("carry_odd")?;
        let (_, odd) = self.single_sets();
        self.read_pass(&odd)?;
        self.controlled_phase(&ancilla_label(1))?;
        self.stage = Stage::Corrected;
        Ok(())
    }

    /// The fixed local unitary on site N that completes the teleportation.
    pub fn finish(&mut self) -> Result<()> {
        self.expect_stage(&[Stage::Corrected], "finish")?;
        let fix: LocalUnitary = final_correction(&self.config);
        self.rec.local(&site_label(self.config.num_sites), fix)?;
        self.stage = Stage::Finished;
        Ok(())
    }

    /// Repeats the read so every ancilla returns to |0⟩.
    pub fn reset_ancillas(&mut self) -> Result<()> {
        self.expect_stage(&[Stage::Finished], "reset_ancillas")?;
        let sets = match self.config.mode {
            Mode::SingleAncilla => self.single_sets().1,
            _ => self.read_sets(),
        };
        self.read_pass(&sets)?;
        self.stage = Stage::AncillasReset;
        Ok(())
    }

    /// Runs every remaining stage up to [`Stage::Finished`].
    pub fn run(&mut self) -> Result<()> {
        loop {
            match (self.stage, self.config.mode) {
                (Stage::Prepared, _) => self.entangle()?,
                (Stage::Entangled, Mode::SingleAncilla) => self.carry_even()?,
                (Stage::Entangled, _) => self.read()?,
                (Stage::Read, _) => self.correct()?,
                (Stage::EvenCarried, _) => self.restore_ancilla()?,
                (Stage::AncillaRestored, _) => self.carry_odd()?,
                (Stage::Corrected, _) => self.finish()?,
                (Stage::Finished, _) | (Stage::AncillasReset, _) => return Ok(()),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn read_site_sets() {
        assert_eq!(near_sites(3), vec![2]);
        assert_eq!(far_sites(3), vec![1]);
        assert_eq!(near_sites(8), vec![7, 5, 3, 1]);
        assert_eq!(far_sites(8), vec![2, 4, 6]);
        assert_eq!(far_sites(4), vec![2]);
    }

    #[test]
    fn stages_are_enforced() {
        let config = ProtocolConfig::new(3, Mode::ThreeSite).unwrap();
        let mut p = Pipeline::new(&config, &InputQubit::ZERO).unwrap();
        assert!(matches!(p.read(), Err(ProtocolError::Stage { .. })));
        assert!(matches!(p.correct(), Err(ProtocolError::Stage { .. })));
        assert!(matches!(
            p.carry_even(),
            Err(ProtocolError::WrongMode { .. })
        ));
        p.entangle().unwrap();
        assert!(matches!(p.entangle(), Err(ProtocolError::Stage { .. })));
        p.run().unwrap();
        assert_eq!(p.stage(), Stage::Finished);
        assert_eq!(p.schedule().len(), 18);
    }

    #[test]
    fn entangle_requires_parked_ancillas() {
        let config = ProtocolConfig::new(3, Mode::ThreeSite).unwrap();
        let reg = Register::lattice(3, 2).unwrap();
        let state = PureState::basis(reg, &[2, 0, 0, 0, 0]).unwrap();
        let mut p = Pipeline::at_stage(&config, state, Stage::Prepared).unwrap();
        assert!(matches!(p.entangle(), Err(ProtocolError::Precondition(_))));
        let wrong = PureState::basis(Register::lattice(4, 2).unwrap(), &[0; 6]).unwrap();
        assert!(Pipeline::at_stage(&config, wrong, Stage::Prepared).is_err());
    }

    #[test]
    fn read_refuses_leaked_ancillas() {
        let config = ProtocolConfig::new(3, Mode::ThreeSite).unwrap();
        let state = PureState::basis(Register::lattice(3, 2).unwrap(), &[1, 0, 0, 0, 0]).unwrap();
        let mut p = Pipeline::at_stage(&config, state, Stage::Entangled).unwrap();
        assert!(matches!(p.read(), Err(ProtocolError::Precondition(_))));
    }
}
