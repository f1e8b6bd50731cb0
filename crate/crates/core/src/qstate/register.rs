use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{QStateError, Result};

/// Largest per-particle dimension the kernels handle (the reference
/// scheme's four-level ancilla).
pub const MAX_PARTICLE_DIM: usize = 4;

/// Site atoms carry a qubit; ancillas carry the extra transport level.
pub const SITE_DIM: usize = 2;
pub const ANCILLA_DIM: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Site,
    Ancilla,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Particle {
    pub label: String,
    pub dim: usize,
    pub role: Role,
}

impl Particle {
    pub fn new(label: impl Into<String>, dim: usize, role: Role) -> Self {
        Self {
            label: label.into(),
            dim,
            role,
        }
    }
}

/// Ordered list of particles defining a mixed-radix index layout.
///
/// The first particle is the most significant digit. Lattice registers are
/// laid out as `[A1, A2, S1, ..., SN]`, mirroring left-to-right order in the
/// lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register {
    particles: Vec<Particle>,
    strides: Vec<usize>,
    dim: usize,
}

/// Label of lattice site `j` (1-based).
pub fn site_label(j: usize) -> String {
    format!("S{j}")
}

/// Label of ancilla `k` (1-based).
pub fn ancilla_label(k: usize) -> String {
    format!("A{k}")
}

impl Register {
    /// Lattice register: `num_ancillas` qutrit ancillas followed by
    /// `num_sites` qubit sites.
    pub fn lattice(num_sites: usize, num_ancillas: usize) -> Result<Self> {
        if num_sites == 0 {
            return Err(QStateError::InvalidShape(
                "a lattice register needs at least one site".into(),
            ));
        }
        if num_ancillas > 2 {
            return Err(QStateError::InvalidShape(format!(
                "at most 2 ancillas are supported, got {num_ancillas}"
            )));
        }
        let particles = (1..=num_ancillas)
            .map(|k| Particle::new(ancilla_label(k), ANCILLA_DIM, Role::Ancilla))
            .chain((1..=num_sites).map(|j| Particle::new(site_label(j), SITE_DIM, Role::Site)))
            .collect();
        Self::from_particles(particles)
    }

    /// Arbitrary register. Checks label uniqueness and dimension bounds only;
    /// the lattice-specific dimension rules are enforced by [`Register::lattice`].
    pub fn from_particles(particles: Vec<Particle>) -> Result<Self> {
        if particles.is_empty() {
            return Err(QStateError::InvalidShape(
                "register has no particles".into(),
            ));
        }
        let mut seen = HashSet::new();
        for p in &particles {
            if !seen.insert(p.label.as_str()) {
                return Err(QStateError::DuplicateLabel(p.label.clone()));
            }
            if !(2..=MAX_PARTICLE_DIM).contains(&p.dim) {
                return Err(QStateError::InvalidShape(format!(
                    "particle {} has dimension {}, expected 2..={MAX_PARTICLE_DIM}",
                    p.label, p.dim
                )));
            }
        }
        let mut strides = vec![0; particles.len()];
        let mut acc: usize = 1;
        for (i, p) in particles.iter().enumerate().rev() {
            strides[i] = acc;
            acc = acc.checked_mul(p.dim).ok_or_else(|| {
                QStateError::InvalidShape("register dimension overflows usize".into())
            })?;
        }
        Ok(Self {
            particles,
            strides,
            dim: acc,
        })
    }

    /// Total Hilbert-space dimension.
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.particles
            .iter()
            .position(|p| p.label == label)
            .ok_or_else(|| QStateError::UnknownParticle(label.to_string()))
    }

    pub fn particle(&self, label: &str) -> Result<&Particle> {
        self.position(label).map(|i| &self.particles[i])
    }

    pub fn contains(&self, label: &str) -> bool {
        self.particles.iter().any(|p| p.label == label)
    }

    #[inline]
    pub fn stride(&self, position: usize) -> usize {
        self.strides[position]
    }

    pub fn num_sites(&self) -> usize {
        self.particles
            .iter()
            .filter(|p| p.role == Role::Site)
            .count()
    }

    pub fn num_ancillas(&self) -> usize {
        self.particles
            .iter()
            .filter(|p| p.role == Role::Ancilla)
            .count()
    }

    pub fn ancillas(&self) -> impl Iterator<Item = &Particle> {
        self.particles.iter().filter(|p| p.role == Role::Ancilla)
    }

    /// Mixed-radix encoding of one level per particle.
    pub fn encode(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.particles.len() {
            return Err(QStateError::WrongLevelCount {
                expected: self.particles.len(),
                found: levels.len(),
            });
        }
        let mut index = 0;
        for ((p, &stride), &level) in self.particles.iter().zip(&self.strides).zip(levels) {
            if level >= p.dim {
                return Err(QStateError::LevelOutOfRange {
                    particle: p.label.clone(),
                    level,
                    dim: p.dim,
                });
            }
            index += level * stride;
        }
        Ok(index)
    }

    /// Inverse of [`Register::encode`]. Panics if `index >= dim`.
    pub fn decode(&self, index: usize) -> Vec<usize> {
        assert!(
            index < self.dim,
            "index {index} out of range for dimension {}",
            self.dim
        );
        self.particles
            .iter()
            .zip(&self.strides)
            .map(|(p, &s)| (index / s) % p.dim)
            .collect()
    }

    /// Level of the particle at `position` in basis state `index`.
    #[inline]
    pub fn digit(&self, index: usize, position: usize) -> usize {
        (index / self.strides[position]) % self.particles[position].dim
    }
}
