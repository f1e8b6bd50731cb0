use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, TAU};

use num_complex::Complex64;
use rand::Rng;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::CMatrix;
use super::{QStateError, Result, ALGEBRAIC_TOL};

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `exp(i * phase)`, exact at multiples of π/2.
///
/// Collisional phases are nominally π; `Complex64::from_polar(1.0, PI)`
/// carries a 1e-16 imaginary residue, which would break exact truth tables.
pub fn unit_phase(phase: f64) -> Complex64 {
    let r = phase.rem_euclid(TAU);
    let eps = 4.0 * f64::EPSILON * phase.abs().max(1.0);
    let quarter = (r / FRAC_PI_2).round();
    if (r - quarter * FRAC_PI_2).abs() <= eps {
        match quarter as i64 % 4 {
            0 => c(1.0, 0.0),
            1 => c(0.0, 1.0),
            2 => c(-1.0, 0.0),
            _ => c(0.0, -1.0),
        }
    } else {
        Complex64::from_polar(1.0, phase)
    }
}

/// A single-particle gate, checked unitary on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalUnitary {
    matrix: CMatrix,
}

impl LocalUnitary {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let err = matrix.unitarity_error();
        if err.is_nan() || err > ALGEBRAIC_TOL {
            return Err(QStateError::NotUnitary(err));
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim),
        }
    }

    /// Hadamard on the level pair `(low, high)` of a `dim`-level particle,
    /// identity on every other level.
    pub fn hadamard(dim: usize, low: usize, high: usize) -> Result<Self> {
        if low >= high || high >= dim {
            return Err(QStateError::InvalidLevelPair { low, high, dim });
        }
        let h = c(FRAC_1_SQRT_2, 0.0);
        let mut m = CMatrix::identity(dim);
        m[(low, low)] = h;
        m[(low, high)] = h;
        m[(high, low)] = h;
        m[(high, high)] = -h;
        Ok(Self { matrix: m })
    }

    pub fn pauli_x() -> Self {
        Self {
            matrix: CMatrix::from_rows([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]),
        }
    }

    pub fn pauli_y() -> Self {
        Self {
            matrix: CMatrix::from_rows([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]),
        }
    }

    pub fn pauli_z() -> Self {
        Self {
            matrix: CMatrix::from_rows([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]]),
        }
    }

    /// Qubit rotation taking |0⟩ to `phi`.
    pub fn preparing(phi: &InputQubit) -> Self {
        let (a, b) = (phi.a, phi.b);
        Self {
            matrix: CMatrix::from_rows([[a, -b.conj()], [b, a.conj()]]),
        }
    }

    /// Qutrit rotation taking |0⟩ to `a|0⟩ + b|2⟩`, identity on level 1.
    pub fn preparing_transport(phi: &InputQubit) -> Self {
        let (a, b) = (phi.a, phi.b);
        let z = c(0.0, 0.0);
        Self {
            matrix: CMatrix::from_rows([[a, z, -b.conj()], [z, c(1.0, 0.0), z], [b, z, a.conj()]]),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self · rhs` (apply `rhs` first).
    pub fn then_after(&self, rhs: &LocalUnitary) -> Self {
        Self {
            matrix: &self.matrix * &rhs.matrix,
        }
    }

    pub fn max_abs_diff(&self, other: &LocalUnitary) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }
}

/// Serialized as rows of `[re, im]` pairs; unitarity is re-checked on load.
impl Serialize for LocalUnitary {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.dim();
        let rows: Vec<Vec<[f64; 2]>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| [self.matrix[(r, c)].re, self.matrix[(r, c)].im])
                    .collect()
            })
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LocalUnitary {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(deserializer)?;
        let n = rows.len();
        if !(2..=super::MAX_PARTICLE_DIM).contains(&n) || rows.iter().any(|r| r.len() != n) {
            return Err(de::Error::custom(format!(
                "expected a square matrix of size 2..={}",
                super::MAX_PARTICLE_DIM
            )));
        }
        let data = rows
            .into_iter()
            .flatten()
            .map(|[re, im]| c(re, im))
            .collect();
        LocalUnitary::new(CMatrix::from_vec(n, data)).map_err(de::Error::custom)
    }
}

/// Diagonal two-particle phase: the basis component with
/// `first = first_level` and `second = second_level` picks up `exp(i·phase)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairPhaseRule {
    pub first: String,
    pub first_level: usize,
    pub second: String,
    pub second_level: usize,
    pub phase: f64,
}

impl PairPhaseRule {
    pub fn new(
        first: impl Into<String>,
        first_level: usize,
        second: impl Into<String>,
        second_level: usize,
        phase: f64,
    ) -> Self {
        Self {
            first: first.into(),
            first_level,
            second: second.into(),
            second_level,
            phase,
        }
    }
}

/// The unknown qubit `a|0⟩ + b|1⟩` to be teleported.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputQubit {
    pub a: Complex64,
    pub b: Complex64,
}

impl InputQubit {
    pub const ZERO: Self = Self {
        a: c(1.0, 0.0),
        b: c(0.0, 0.0),
    };
    pub const ONE: Self = Self {
        a: c(0.0, 0.0),
        b: c(1.0, 0.0),
    };

    /// Requires `|a|² + |b|² = 1` within 1e-12.
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        Self::normalized(a, b, ALGEBRAIC_TOL)
    }

    /// Accepts amplitudes whose squared norm is within `tol` of one and
    /// rescales them to unit norm.
    pub fn normalized(a: Complex64, b: Complex64, tol: f64) -> Result<Self> {
        let n2 = a.norm_sqr() + b.norm_sqr();
        if !a.is_finite() || !b.is_finite() || (n2 - 1.0).abs() > tol {
            return Err(QStateError::NotNormalized(n2));
        }
        let n = n2.sqrt();
        Ok(Self { a: a / n, b: b / n })
    }

    /// Haar-random qubit (normalized complex Gaussian vector).
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let g: [f64; 4] = std::array::from_fn(|_| gaussian(rng));
            let (a, b) = (c(g[0], g[1]), c(g[2], g[3]));
            let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
            if n > 1e-6 {
                return Self { a: a / n, b: b / n };
            }
        }
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        [self.a, self.b]
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller; one draw is enough here.
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn unit_phase_is_exact_on_quarter_turns() {
        assert_eq!(unit_phase(PI), c(-1.0, 0.0));
        assert_eq!(unit_phase(-PI), c(-1.0, 0.0));
        assert_eq!(unit_phase(TAU), c(1.0, 0.0));
        assert_eq!(unit_phase(FRAC_PI_2), c(0.0, 1.0));
        assert_eq!(unit_phase(3.0 * PI), c(-1.0, 0.0));
        let z = unit_phase(0.3);
        assert!((z - Complex64::from_polar(1.0, 0.3)).norm() < 1e-16);
    }

    #[test]
    fn hadamard_squares_to_identity() {
        for (dim, lo, hi) in [(2, 0, 1), (3, 0, 2)] {
            let h = LocalUnitary::hadamard(dim, lo, hi).unwrap();
            let h2 = h.then_after(&h);
            assert!(h2.max_abs_diff(&LocalUnitary::identity(dim)) <= 1e-15);
        }
        assert!(LocalUnitary::hadamard(2, 0, 2).is_err());
        assert!(LocalUnitary::hadamard(3, 1, 1).is_err());
    }

    #[test]
    fn non_unitary_rejected() {
        let m = CMatrix::from_rows([[c(1.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]);
        assert!(matches!(
            LocalUnitary::new(m),
            Err(QStateError::NotUnitary(_))
        ));
    }

    #[test]
    fn preparation_rotations_map_zero_to_phi() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let phi = InputQubit::random(&mut rng);
        let u = LocalUnitary::preparing(&phi);
        assert!(u.matrix().unitarity_error() < 1e-14);
        assert_eq!(u.matrix().column(0), vec![phi.a, phi.b]);
        let t = LocalUnitary::preparing_transport(&phi);
        assert!(t.matrix().unitarity_error() < 1e-14);
        assert_eq!(t.matrix().column(0), vec![phi.a, c(0.0, 0.0), phi.b]);
    }

    #[test]
    fn input_qubit_normalization() {
        assert!(InputQubit::new(c(1.0, 0.0), c(1.0, 0.0)).is_err());
        let q = InputQubit::normalized(c(0.6, 0.0), c(0.0, 0.8 + 1e-10), 1e-9).unwrap();
        assert!((q.a.norm_sqr() + q.b.norm_sqr() - 1.0).abs() < 1e-15);
        assert!(InputQubit::normalized(c(f64::NAN, 0.0), c(0.0, 0.0), 1e-9).is_err());
    }

    #[test]
    fn local_unitary_serde_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = LocalUnitary::preparing_transport(&InputQubit::random(&mut rng));
        let text = serde_json::to_string(&u).unwrap();
        let back: LocalUnitary = serde_json::from_str(&text).unwrap();
        assert_eq!(back, u);
        assert!(serde_json::from_str::<LocalUnitary>("[[[1,0],[1,0]],[[0,0],[1,0]]]").is_err());
        assert!(serde_json::from_str::<LocalUnitary>("[[[1,0]]]").is_err());
    }
}
