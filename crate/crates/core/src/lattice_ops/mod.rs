//! The lattice gate set: level-pair Hadamards, the global shift and
//! selective sweeps of the transport level, plus replayable schedules.

mod schedule;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qstate::{site_label, LocalUnitary, PairPhaseRule, PureState, QStateError, Role};

pub use schedule::{apply_step, replay, PulseSchedule, PulseStep, Recorder};

/// Ideal collisional phase.
pub const DEFAULT_PHASE: f64 = PI;

/// Ancilla level that is transported across the lattice and collides with
/// site atoms.
pub const TRANSPORT_LEVEL: usize = 2;

#[derive(Debug, Error)]
pub enum LatticeError {
    #[error(transparent)]
    State(#[from] QStateError),
    #[error("the shift needs at least 2 sites, register has {0}")]
    TooFewSites(usize),
    #[error("sweep of {0} selects no sites")]
    EmptySweep(String),
    #[error("{0} is not an ancilla")]
    NotAnAncilla(String),
    #[error("site {site} out of range 1..={num_sites}")]
    SiteOutOfRange { site: usize, num_sites: usize },
    #[error("sweep of {ancilla} visits sites {sites:?} out of spatial order")]
    NonMonotoneSweep { ancilla: String, sites: Vec<usize> },
    #[error("level pair {pair} is not valid for {particle}")]
    InvalidLevelPair { particle: String, pair: LevelPair },
    #[error("non-finite phase {0}")]
    NonFinitePhase(f64),
    #[error("schedule is for {sites} sites and {ancillas} ancillas, state register differs")]
    ShapeMismatch { sites: usize, ancillas: usize },
    #[error("measurement has no inverse")]
    Irreversible,
    #[error("schedule line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("missing random stream for measurement of {0}")]
    MissingRng(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LatticeError>;

/// Level pair a Hadamard pulse acts on: `(0, 1)` on sites, `(0, 2)` on
/// ancillas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "[usize; 2]", try_from = "[usize; 2]")]
pub enum LevelPair {
    Qubit,
    Transport,
}

impl LevelPair {
    pub fn levels(self) -> (usize, usize) {
        match self {
            LevelPair::Qubit => (0, 1),
            LevelPair::Transport => (0, TRANSPORT_LEVEL),
        }
    }

    /// The pair a particle of the given role is driven on.
    pub fn for_role(role: Role) -> Self {
        match role {
            Role::Site => LevelPair::Qubit,
            Role::Ancilla => LevelPair::Transport,
        }
    }
}

impl From<LevelPair> for [usize; 2] {
    fn from(p: LevelPair) -> Self {
        let (lo, hi) = p.levels();
        [lo, hi]
    }
}

impl TryFrom<[usize; 2]> for LevelPair {
    type Error = String;

    fn try_from(v: [usize; 2]) -> std::result::Result<Self, String> {
        match v {
            [0, 1] => Ok(LevelPair::Qubit),
            [0, 2] => Ok(LevelPair::Transport),
            other => Err(format!("unsupported level pair {other:?}")),
        }
    }
}

impl std::fmt::Display for LevelPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (lo, hi) = self.levels();
        write!(f, "({lo},{hi})")
    }
}

/// Hadamard pulse on `particle`; sites take [`LevelPair::Qubit`], ancillas
/// [`LevelPair::Transport`].
pub fn hadamard(state: &mut PureState, particle: &str, pair: LevelPair) -> Result<()> {
    let p = state.register().particle(particle)?;
    if pair != LevelPair::for_role(p.role) {
        return Err(LatticeError::InvalidLevelPair {
            particle: particle.to_string(),
            pair,
        });
    }
    let (lo, hi) = pair.levels();
    let h = LocalUnitary::hadamard(p.dim, lo, hi)?;
    state.apply_local(particle, &h)?;
    Ok(())
}

/// Pair rules making up the shift on `num_sites` sites: every adjacent
/// `|0⟩_j|1⟩_{j+1}` picks up `phase`.
pub fn shift_rules(num_sites: usize, phase: f64) -> Vec<PairPhaseRule> {
    (1..num_sites)
        .map(|j| PairPhaseRule::new(site_label(j), 0, site_label(j + 1), 1, phase))
        .collect()
}

/// Global shift of the lattice: all adjacent site pairs collide at once.
pub fn shift(state: &mut PureState, phase: f64) -> Result<()> {
    if !phase.is_finite() {
        return Err(LatticeError::NonFinitePhase(phase));
    }
    let n = state.register().num_sites();
    if n < 2 {
        return Err(LatticeError::TooFewSites(n));
    }
    for rule in shift_rules(n, phase) {
        state.apply_pair_phase(&rule)?;
    }
    Ok(())
}

/// Sweep of `ancilla`'s transport level over the lattice, colliding only
/// with the listed (1-based) sites.
pub fn sweep(state: &mut PureState, ancilla: &str, sites: &[usize], phase: f64) -> Result<()> {
    if !phase.is_finite() {
        return Err(LatticeError::NonFinitePhase(phase));
    }
    let a = state.register().particle(ancilla)?;
    if a.role != Role::Ancilla {
        return Err(LatticeError::NotAnAncilla(ancilla.to_string()));
    }
    if sites.is_empty() {
        return Err(LatticeError::EmptySweep(ancilla.to_string()));
    }
    let n = state.register().num_sites();
    if let Some(&site) = sites.iter().find(|&&j| j == 0 || j > n) {
        return Err(LatticeError::SiteOutOfRange { site, num_sites: n });
    }
    for &j in sites {
        state.apply_pair_phase(&PairPhaseRule::new(
            ancilla,
            TRANSPORT_LEVEL,
            site_label(j),
            1,
            phase,
        ))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::qstate::{CMatrix, Register};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_state(reg: Register, rng: &mut ChaCha8Rng) -> PureState {
        let mut amps: Vec<Complex64> = (0..reg.dim())
            .map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let n = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|z| *z /= n);
        PureState::from_amplitudes(reg, amps).unwrap()
    }

    #[test]
    fn hadamard_examples() {
        let reg = Register::lattice(1, 1).unwrap();
        let mut s = PureState::basis(reg.clone(), &[0, 1]).unwrap();
        hadamard(&mut s, "S1", LevelPair::Qubit).unwrap();
        assert_eq!(s.amplitude(&[0, 0]).unwrap(), c(FRAC_1_SQRT_2, 0.0));
        assert_eq!(s.amplitude(&[0, 1]).unwrap(), c(-FRAC_1_SQRT_2, 0.0));
        let mut s = PureState::basis(reg.clone(), &[2, 0]).unwrap();
        hadamard(&mut s, "A1", LevelPair::Transport).unwrap();
        assert_eq!(s.amplitude(&[0, 0]).unwrap(), c(FRAC_1_SQRT_2, 0.0));
        assert_eq!(s.amplitude(&[2, 0]).unwrap(), c(-FRAC_1_SQRT_2, 0.0));
        assert_eq!(s.amplitude(&[1, 0]).unwrap(), c(0.0, 0.0));
        assert!(hadamard(&mut s, "S1", LevelPair::Transport).is_err());
        assert!(hadamard(&mut s, "A1", LevelPair::Qubit).is_err());
    }

    #[test]
    fn level_pair_serializes_as_levels() {
        assert_eq!(
            serde_json::to_string(&LevelPair::Transport).unwrap(),
            "[0,2]"
        );
        assert_eq!(
            serde_json::from_str::<LevelPair>("[0,1]").unwrap(),
            LevelPair::Qubit
        );
        assert!(serde_json::from_str::<LevelPair>("[1,2]").is_err());
    }

    #[test]
    fn shift_truth_table() {
        let reg = Register::lattice(2, 0).unwrap();
        for (levels, sign) in [([0, 0], 1.0), ([0, 1], -1.0), ([1, 0], 1.0), ([1, 1], 1.0)] {
            let mut s = PureState::basis(reg.clone(), &levels).unwrap();
            shift(&mut s, DEFAULT_PHASE).unwrap();
            assert_eq!(s.amplitude(&levels).unwrap(), c(sign, 0.0), "{levels:?}");
        }
        let mut s = PureState::basis(Register::lattice(3, 2).unwrap(), &[0, 0, 0, 1, 1]).unwrap();
        shift(&mut s, DEFAULT_PHASE).unwrap();
        assert_eq!(s.amplitude(&[0, 0, 0, 1, 1]).unwrap(), c(-1.0, 0.0));
        let mut s = PureState::basis(Register::lattice(1, 1).unwrap(), &[0, 0]).unwrap();
        assert!(matches!(
            shift(&mut s, DEFAULT_PHASE),
            Err(LatticeError::TooFewSites(1))
        ));
    }

    #[test]
    fn shift_leaves_ancillas_alone() {
        let reg = Register::lattice(2, 2).unwrap();
        for a in 0..3 {
            let mut s = PureState::basis(reg.clone(), &[a, 2 - a, 1, 0]).unwrap();
            shift(&mut s, DEFAULT_PHASE).unwrap();
            assert_eq!(s.amplitude(&[a, 2 - a, 1, 0]).unwrap(), c(1.0, 0.0));
        }
    }

    #[test]
    fn sweep_truth_table() {
        let reg = Register::lattice(2, 1).unwrap();
        for (levels, sign) in [
            ([2, 1, 0], -1.0),
            ([2, 0, 0], 1.0),
            ([0, 1, 0], 1.0),
            ([1, 1, 1], 1.0),
            ([2, 1, 1], -1.0),
        ] {
            let mut s = PureState::basis(reg.clone(), &levels).unwrap();
            sweep(&mut s, "A1", &[1], DEFAULT_PHASE).unwrap();
            assert_eq!(s.amplitude(&levels).unwrap(), c(sign, 0.0), "{levels:?}");
        }
        // Site 2 is passed over without a collision.
        let mut s = PureState::basis(reg.clone(), &[2, 0, 1]).unwrap();
        sweep(&mut s, "A1", &[1], DEFAULT_PHASE).unwrap();
        assert_eq!(s.amplitude(&[2, 0, 1]).unwrap(), c(1.0, 0.0));
        let mut s = PureState::basis(reg, &[2, 1, 1]).unwrap();
        sweep(&mut s, "A1", &[2, 1], DEFAULT_PHASE).unwrap();
        assert_eq!(s.amplitude(&[2, 1, 1]).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn sweep_errors() {
        let mut s = PureState::basis(Register::lattice(2, 1).unwrap(), &[0, 0, 0]).unwrap();
        assert!(matches!(
            sweep(&mut s, "A1", &[], DEFAULT_PHASE),
            Err(LatticeError::EmptySweep(_))
        ));
        assert!(matches!(
            sweep(&mut s, "S1", &[2], DEFAULT_PHASE),
            Err(LatticeError::NotAnAncilla(_))
        ));
        assert!(matches!(
            sweep(&mut s, "A2", &[1], DEFAULT_PHASE),
            Err(LatticeError::State(QStateError::UnknownParticle(_)))
        ));
        assert!(matches!(
            sweep(&mut s, "A1", &[3], DEFAULT_PHASE),
            Err(LatticeError::SiteOutOfRange { .. })
        ));
        assert!(matches!(
            sweep(&mut s, "A1", &[1], f64::NAN),
            Err(LatticeError::NonFinitePhase(_))
        ));
    }

    /// Operator of `f` on the register, assembled column by column.
    fn operator_of(reg: &Register, f: impl Fn(&mut PureState)) -> CMatrix {
        let mut m = CMatrix::zeros(reg.dim());
        for col in 0..reg.dim() {
            let mut s = PureState::basis(reg.clone(), &reg.decode(col)).unwrap();
            f(&mut s);
            for (row, &z) in s.amplitudes().iter().enumerate() {
                m[(row, col)] = z;
            }
        }
        m
    }

    #[test]
    fn transport_hadamard_conjugated_sweep_is_cnot_on_site_control() {
        let reg = Register::lattice(2, 1).unwrap();
        let op = operator_of(&reg, |s| {
            hadamard(s, "A1", LevelPair::Transport).unwrap();
            sweep(s, "A1", &[2], DEFAULT_PHASE).unwrap();
            hadamard(s, "A1", LevelPair::Transport).unwrap();
        });
        // Expected: the ancilla's 0 <-> 2 flips when site 2 holds |1⟩; level 1 untouched.
        let mut expect = CMatrix::zeros(reg.dim());
        for col in 0..reg.dim() {
            let mut levels = reg.decode(col);
            if levels[2] == 1 && levels[0] != 1 {
                levels[0] = 2 - levels[0];
            }
            expect[(reg.encode(&levels).unwrap(), col)] = c(1.0, 0.0);
        }
        assert!(op.max_abs_diff(&expect) <= 1e-12);
    }

    #[test]
    fn site_hadamard_conjugated_sweep_is_cnot_on_ancilla_control() {
        let reg = Register::lattice(2, 1).unwrap();
        let op = operator_of(&reg, |s| {
            hadamard(s, "S2", LevelPair::Qubit).unwrap();
            sweep(s, "A1", &[2], DEFAULT_PHASE).unwrap();
            hadamard(s, "S2", LevelPair::Qubit).unwrap();
        });
        let mut expect = CMatrix::zeros(reg.dim());
        for col in 0..reg.dim() {
            let mut levels = reg.decode(col);
            if levels[0] == 2 {
                levels[2] ^= 1;
            }
            expect[(reg.encode(&levels).unwrap(), col)] = c(1.0, 0.0);
        }
        assert!(op.max_abs_diff(&expect) <= 1e-12);
    }

    #[test]
    fn shift_and_sweep_are_diagonal() {
        let reg = Register::lattice(3, 2).unwrap();
        for col in 0..reg.dim() {
            let levels = reg.decode(col);
            let mut s = PureState::basis(reg.clone(), &levels).unwrap();
            shift(&mut s, DEFAULT_PHASE).unwrap();
            sweep(&mut s, "A1", &[3, 1], DEFAULT_PHASE).unwrap();
            sweep(&mut s, "A2", &[2], 0.7).unwrap();
            let z = s.amplitude(&levels).unwrap();
            assert!((z.norm() - 1.0).abs() <= 1e-15);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn shift_is_an_involution(seed in any::<u64>(), n in 2usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_state(Register::lattice(n, 1).unwrap(), &mut rng);
            let mut t = s.clone();
            shift(&mut t, DEFAULT_PHASE).unwrap();
            shift(&mut t, DEFAULT_PHASE).unwrap();
            for (p, q) in s.amplitudes().iter().zip(t.amplitudes()) {
                prop_assert!((p - q).norm() <= 1e-15);
            }
        }

        #[test]
        fn sweeps_of_distinct_ancillas_commute(seed in any::<u64>(), phase in -4.0f64..4.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_state(Register::lattice(4, 2).unwrap(), &mut rng);
            let mut ab = s.clone();
            sweep(&mut ab, "A1", &[3, 1], phase).unwrap();
            sweep(&mut ab, "A2", &[2, 4], DEFAULT_PHASE).unwrap();
            let mut ba = s;
            sweep(&mut ba, "A2", &[2, 4], DEFAULT_PHASE).unwrap();
            sweep(&mut ba, "A1", &[3, 1], phase).unwrap();
            prop_assert_eq!(ab.amplitudes(), ba.amplitudes());
        }
    }
}
