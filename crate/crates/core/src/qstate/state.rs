use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::matrix::CMatrix;
use super::register::{Register, MAX_PARTICLE_DIM};
use super::unitary::{unit_phase, InputQubit, LocalUnitary, PairPhaseRule};
use super::{Amplitude, QStateError, Result, ALGEBRAIC_TOL, LEAKAGE_TOL};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Below this many amplitudes the kernels stay on the calling thread.
const PAR_THRESHOLD: usize = 1 << 14;

/// Dense state vector over a [`Register`].
///
/// Amplitudes are indexed by the register's mixed-radix encoding. Every
/// kernel touches each amplitude once and the work split never changes the
/// arithmetic, so results are identical whatever the thread count.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    register: Register,
    amps: Vec<Amplitude>,
}

impl PureState {
    /// Computational basis state with one level per particle.
    pub fn basis(register: Register, levels: &[usize]) -> Result<Self> {
        let index = register.encode(levels)?;
        let mut amps = vec![ZERO; register.dim()];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { register, amps })
    }

    /// Wraps an amplitude vector, which must be finite and of unit norm
    /// within 1e-12.
    pub fn from_amplitudes(register: Register, amps: Vec<Amplitude>) -> Result<Self> {
        if amps.len() != register.dim() {
            return Err(QStateError::WrongAmplitudeCount {
                expected: register.dim(),
                found: amps.len(),
            });
        }
        if amps.iter().any(|z| !z.is_finite()) {
            return Err(QStateError::NonFinite);
        }
        let n2: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (n2 - 1.0).abs().is_nan() || (n2 - 1.0).abs() > ALGEBRAIC_TOL {
            return Err(QStateError::NotNormalized(n2));
        }
        Ok(Self { register, amps })
    }

    /// Product state of the register's all-zero levels with `phi` on `particle`.
    pub fn with_qubit(register: Register, particle: &str, phi: &InputQubit) -> Result<Self> {
        let zeros = vec![0; register.len()];
        let mut state = Self::basis(register, &zeros)?;
        state.apply_local(particle, &LocalUnitary::preparing(phi))?;
        Ok(state)
    }

    #[inline]
    pub fn register(&self) -> &Register {
        &self.register
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Amplitude> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn amplitude(&self, levels: &[usize]) -> Result<Amplitude> {
        Ok(self.amps[self.register.encode(levels)?])
    }

    /// Applies `I ⊗ … ⊗ u ⊗ … ⊗ I` with `u` acting on `particle`.
    pub fn apply_local(&mut self, particle: &str, u: &LocalUnitary) -> Result<()> {
        let pos = self.register.position(particle)?;
        let dim = self.register.particles()[pos].dim;
        if u.dim() != dim {
            return Err(QStateError::DimensionMismatch {
                particle: particle.to_string(),
                expected: dim,
                found: u.dim(),
            });
        }
        let stride = self.register.stride(pos);
        let m = u.matrix().as_slice();
        let kernel = |chunk: &mut [Amplitude]| {
            let mut buf = [ZERO; MAX_PARTICLE_DIM];
            for inner in 0..stride {
                for (k, b) in buf.iter_mut().take(dim).enumerate() {
                    *b = chunk[inner + k * stride];
                }
                for r in 0..dim {
                    let row = &m[r * dim..(r + 1) * dim];
                    let mut acc = ZERO;
                    for (a, b) in row.iter().zip(&buf[..dim]) {
                        acc += a * b;
                    }
                    chunk[inner + r * stride] = acc;
                }
            }
        };
        let block = dim * stride;
        if self.amps.len() >= PAR_THRESHOLD && self.amps.len() / block > 1 {
            self.amps.par_chunks_mut(block).for_each(kernel);
        } else {
            self.amps.chunks_mut(block).for_each(kernel);
        }
        Ok(())
    }

    /// Applies `u` to `target` only on basis components where every
    /// `(label, level)` control matches.
    pub fn apply_controlled(
        &mut self,
        controls: &[(&str, usize)],
        target: &str,
        u: &LocalUnitary,
    ) -> Result<()> {
        let tpos = self.register.position(target)?;
        let dim = self.register.particles()[tpos].dim;
        if u.dim() != dim {
            return Err(QStateError::DimensionMismatch {
                particle: target.to_string(),
                expected: dim,
                found: u.dim(),
            });
        }
        let mut ctrl = Vec::with_capacity(controls.len());
        for &(label, level) in controls {
            let pos = self.register.position(label)?;
            let p = &self.register.particles()[pos];
            if pos == tpos {
                return Err(QStateError::InvalidRule(format!(
                    "{label} is both control and target"
                )));
            }
            if level >= p.dim {
                return Err(QStateError::LevelOutOfRange {
                    particle: label.to_string(),
                    level,
                    dim: p.dim,
                });
            }
            ctrl.push((pos, level));
        }
        let stride = self.register.stride(tpos);
        let block = dim * stride;
        let m = u.matrix().as_slice();
        let reg = &self.register;
        let kernel = |(ci, chunk): (usize, &mut [Amplitude])| {
            let mut buf = [ZERO; MAX_PARTICLE_DIM];
            for inner in 0..stride {
                let base = ci * block + inner;
                if !ctrl
                    .iter()
                    .all(|&(pos, level)| reg.digit(base, pos) == level)
                {
                    continue;
                }
                for (k, b) in buf.iter_mut().take(dim).enumerate() {
                    *b = chunk[inner + k * stride];
                }
                for r in 0..dim {
                    let mut acc = ZERO;
                    for c in 0..dim {
                        acc += m[r * dim + c] * buf[c];
                    }
                    chunk[inner + r * stride] = acc;
                }
            }
        };
        if self.amps.len() >= PAR_THRESHOLD && self.amps.len() / block > 1 {
            self.amps.par_chunks_mut(block).enumerate().for_each(kernel);
        } else {
            self.amps.chunks_mut(block).enumerate().for_each(kernel);
        }
        Ok(())
    }

    /// Multiplies every amplitude matching the rule's two levels by
    /// `exp(i·phase)`, in place.
    pub fn apply_pair_phase(&mut self, rule: &PairPhaseRule) -> Result<()> {
        if rule.first == rule.second {
            return Err(QStateError::InvalidRule(format!(
                "{} paired with itself",
                rule.first
            )));
        }
        if !rule.phase.is_finite() {
            return Err(QStateError::InvalidRule(format!(
                "non-finite phase {}",
                rule.phase
            )));
        }
        let p = self.register.position(&rule.first)?;
        let q = self.register.position(&rule.second)?;
        for (pos, level) in [(p, rule.first_level), (q, rule.second_level)] {
            let particle = &self.register.particles()[pos];
            if level >= particle.dim {
                return Err(QStateError::LevelOutOfRange {
                    particle: particle.label.clone(),
                    level,
                    dim: particle.dim,
                });
            }
        }
        let factor = unit_phase(rule.phase);
        let (sp, dp) = (self.register.stride(p), self.register.particles()[p].dim);
        let (sq, dq) = (self.register.stride(q), self.register.particles()[q].dim);
        let (lp, lq) = (rule.first_level, rule.second_level);
        let kernel = |(i, z): (usize, &mut Amplitude)| {
            if (i / sp) % dp == lp && (i / sq) % dq == lq {
                *z *= factor;
            }
        };
        if self.amps.len() >= PAR_THRESHOLD {
            self.amps.par_iter_mut().enumerate().for_each(kernel);
        } else {
            self.amps.iter_mut().enumerate().for_each(kernel);
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner_product(&self, other: &PureState) -> Result<Amplitude> {
        if self.register != other.register {
            return Err(QStateError::RegisterMismatch);
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| x.conj() * y)
            .sum())
    }

    /// Partial trace over every particle except `particle`.
    pub fn reduced_density(&self, particle: &str) -> Result<CMatrix> {
        let pos = self.register.position(particle)?;
        let dim = self.register.particles()[pos].dim;
        let stride = self.register.stride(pos);
        let mut rho = CMatrix::zeros(dim);
        // Sequential: a fixed summation order keeps the result thread-count independent.
        for chunk in self.amps.chunks(dim * stride) {
            for inner in 0..stride {
                for r in 0..dim {
                    let x = chunk[inner + r * stride];
                    if x == ZERO {
                        continue;
                    }
                    for c in 0..dim {
                        rho[(r, c)] += x * chunk[inner + c * stride].conj();
                    }
                }
            }
        }
        Ok(rho)
    }

    /// Population of `level` on `particle`.
    pub fn level_population(&self, particle: &str, level: usize) -> Result<f64> {
        let pos = self.register.position(particle)?;
        let p = &self.register.particles()[pos];
        if level >= p.dim {
            return Err(QStateError::LevelOutOfRange {
                particle: particle.to_string(),
                level,
                dim: p.dim,
            });
        }
        let stride = self.register.stride(pos);
        Ok(self
            .amps
            .chunks(p.dim * stride)
            .map(|chunk| {
                chunk[level * stride..(level + 1) * stride]
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum::<f64>()
            })
            .sum())
    }

    /// `⟨φ|ρ|φ⟩` for the marginal of `particle`.
    ///
    /// A qutrit is compared through its `{|0⟩, |1⟩}` levels; support on its
    /// level 2 above 1e-10 is reported as leakage.
    pub fn fidelity_with_qubit(&self, particle: &str, phi: &InputQubit) -> Result<f64> {
        let rho = self.reduced_density(particle)?;
        if rho.dim() > 2 {
            let leaked: f64 = (2..rho.dim()).map(|l| rho[(l, l)].re).sum();
            if leaked > LEAKAGE_TOL {
                return Err(QStateError::Leakage {
                    particle: particle.to_string(),
                    population: leaked,
                });
            }
        }
        let v = phi.amplitudes();
        let mut f = ZERO;
        for r in 0..2 {
            for c in 0..2 {
                f += v[r].conj() * rho[(r, c)] * v[c];
            }
        }
        Ok(f.re)
    }

    /// `tr(ρ²)` of the marginal of `particle`.
    pub fn purity(&self, particle: &str) -> Result<f64> {
        let rho = self.reduced_density(particle)?;
        Ok((&rho * &rho).trace().re)
    }

    /// Projective measurement of `particle` in its computational basis.
    ///
    /// Samples the outcome from `rng`, collapses the state in place and
    /// returns the observed level.
    pub fn measure<R: Rng + ?Sized>(&mut self, particle: &str, rng: &mut R) -> Result<usize> {
        let pos = self.register.position(particle)?;
        let dim = self.register.particles()[pos].dim;
        let probs: Vec<f64> = (0..dim)
            .map(|l| self.level_population(particle, l))
            .collect::<Result<_>>()?;
        let total: f64 = probs.iter().sum();
        let u: f64 = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut outcome = dim - 1;
        for (l, &p) in probs.iter().enumerate() {
            acc += p;
            if u < acc && p > 0.0 {
                outcome = l;
                break;
            }
        }
        // Guard against landing on a zero-probability tail level through rounding.
        if probs[outcome] == 0.0 {
            outcome = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        }
        let stride = self.register.stride(pos);
        let scale = 1.0 / probs[outcome].sqrt();
        for chunk in self.amps.chunks_mut(dim * stride) {
            for (l, level) in chunk.chunks_mut(stride).enumerate() {
                if l == outcome {
                    level.iter_mut().for_each(|z| *z *= scale);
                } else {
                    level.iter_mut().for_each(|z| *z = ZERO);
                }
            }
        }
        Ok(outcome)
    }
}
