use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::qstate::{CMatrix, LocalUnitary};

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Unnormalized W-class operators: `1+iσ₂`, `1−iσ₂`, `σ₃+σ₁`, `σ₃−σ₁`.
/// Each satisfies `W†W = 2·1`.
pub fn w_unnormalized(k: usize) -> CMatrix {
    let rows = match k {
        0 => [[c(1.0, 0.0), c(1.0, 0.0)], [c(-1.0, 0.0), c(1.0, 0.0)]],
        1 => [[c(1.0, 0.0), c(-1.0, 0.0)], [c(1.0, 0.0), c(1.0, 0.0)]],
        2 => [[c(1.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(-1.0, 0.0)]],
        3 => [[c(1.0, 0.0), c(-1.0, 0.0)], [c(-1.0, 0.0), c(-1.0, 0.0)]],
        _ => panic!("W-class index {k} out of range 0..4"),
    };
    CMatrix::from_rows(rows)
}

/// W-class operator `k`, divided by √2 so it is unitary.
pub fn w_operator(k: usize) -> LocalUnitary {
    LocalUnitary::new(w_unnormalized(k).scale(c(FRAC_1_SQRT_2, 0.0)))
        .expect("normalized W is unitary")
}

/// Conditional operators of the three-site protocol, indexed by the
/// branch `J` of sites 1–2: `−iσ₂`, `σ₁`, `−σ₃`, `1`.
pub fn three_site_operator(j: usize) -> LocalUnitary {
    let z = c(0.0, 0.0);
    let rows = match j {
        0 => [[z, c(-1.0, 0.0)], [c(1.0, 0.0), z]],
        1 => [[z, c(1.0, 0.0)], [c(1.0, 0.0), z]],
        2 => [[c(-1.0, 0.0), z], [z, c(1.0, 0.0)]],
        3 => [[c(1.0, 0.0), z], [z, c(1.0, 0.0)]],
        _ => panic!("branch index {j} out of range 0..4"),
    };
    LocalUnitary::new(CMatrix::from_rows(rows)).expect("Pauli-type operator is unitary")
}

/// Map from the even/odd-site parities of a branch to the W class of its
/// conditional operator.
///
/// Entries are stored for an even number of site pairs `m`; for odd `m`
/// both parities are complemented before lookup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CorrectionTable {
    /// `even_m[S_e][S_o]`.
    even_m: [[usize; 2]; 2],
}

impl CorrectionTable {
    /// `even_m[S_e][S_o]` entries must be W-class indices `0..4`.
    pub fn new(even_m: [[usize; 2]; 2]) -> Self {
        assert!(
            even_m.iter().flatten().all(|&k| k < 4),
            "W-class index out of range"
        );
        Self { even_m }
    }

    /// The table as published: `(0,0)→W⁽⁰⁾`, `(1,0)→W⁽¹⁾`, `(0,1)→W⁽²⁾`,
    /// `(1,1)→W⁽³⁾` for even `m`, keys complemented for odd `m`.
    pub fn published() -> Self {
        Self::new([[0, 2], [1, 3]])
    }

    /// The table produced by exhaustive block extraction.
    pub fn extracted() -> Self {
        Self::new([[1, 2], [3, 0]])
    }

    /// W class predicted for parities `(s_e, s_o)` with `m` site pairs.
    pub fn class(&self, s_e: u8, s_o: u8, m: usize) -> usize {
        let flip = (m % 2) as u8;
        self.even_m[((s_e ^ flip) & 1) as usize][((s_o ^ flip) & 1) as usize]
    }

    /// Copy of the table with classes `a` and `b` exchanged everywhere.
    pub fn with_classes_swapped(&self, a: usize, b: usize) -> Self {
        let mut t = *self;
        for k in t.even_m.iter_mut().flatten() {
            if *k == a {
                *k = b;
            } else if *k == b {
                *k = a;
            }
        }
        t
    }

    pub fn entries(&self) -> [[usize; 2]; 2] {
        self.even_m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w_operators_are_unitary_after_normalization() {
        for k in 0..4 {
            let w = w_unnormalized(k);
            let gram = &w.adjoint() * &w;
            assert!(gram.max_abs_diff(&CMatrix::identity(2).scale(c(2.0, 0.0))) <= 1e-15);
            assert!(w_operator(k).matrix().unitarity_error() <= 1e-12);
        }
        // W⁽¹⁾ = W⁽⁰⁾†, while W⁽²⁾ and W⁽³⁾ are Hermitian.
        assert_eq!(w_unnormalized(1), w_unnormalized(0).adjoint());
        assert!(w_unnormalized(2).is_hermitian(0.0));
        assert!(w_unnormalized(3).is_hermitian(0.0));
    }

    #[test]
    fn three_site_list() {
        let m = three_site_operator(0);
        assert_eq!(m.matrix()[(0, 1)], c(-1.0, 0.0));
        assert_eq!(three_site_operator(3), LocalUnitary::identity(2));
    }

    #[test]
    fn odd_pair_count_complements_keys() {
        let t = CorrectionTable::published();
        assert_eq!(t.class(0, 0, 2), 0);
        assert_eq!(t.class(1, 0, 2), 1);
        assert_eq!(t.class(0, 1, 2), 2);
        assert_eq!(t.class(1, 1, 2), 3);
        assert_eq!(t.class(1, 1, 3), 0);
        assert_eq!(t.class(0, 1, 3), 1);
        let swapped = t.with_classes_swapped(1, 2);
        assert_eq!(swapped.class(1, 0, 2), 2);
        assert_eq!(swapped.class(0, 1, 2), 1);
    }
}
