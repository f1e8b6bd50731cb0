//! Cross-checks between the bare-site oracle and the lattice pipeline.

use num_complex::Complex64;
use serde::Serialize;

use super::OracleError;
use super::{qn_column, Result, CLASSIFY_TOL};
use crate::protocol::{three_site_operator, Mode, Pipeline, ProtocolConfig, Stage};
use crate::qstate::{site_label, CMatrix, InputQubit, PureState, Register};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Conditional 2×2 operator on `target` for one basis branch of all other
/// particles.
#[derive(Clone, Debug)]
pub struct BranchOperator {
    /// Flat register index of the branch with `target` in |0⟩.
    pub index: usize,
    pub operator: CMatrix,
}

/// Reads the map `φ ↦ state` on `target` branch by branch from the runs
/// with `φ = |0⟩` and `φ = |1⟩`. Branches with no amplitude are skipped.
pub fn conditional_operators(
    zero: &PureState,
    one: &PureState,
    target: &str,
) -> Result<Vec<BranchOperator>> {
    if zero.register() != one.register() {
        return Err(OracleError::Mismatch(
            "runs live on different registers".into(),
        ));
    }
    let reg = zero.register();
    let pos = reg.position(target)?;
    if reg.particles()[pos].dim != 2 {
        return Err(OracleError::Mismatch(format!("{target} is not a qubit")));
    }
    let stride = reg.stride(pos);
    let (a, b) = (zero.amplitudes(), one.amplitudes());
    let mut out = Vec::new();
    for i in 0..reg.dim() {
        if (i / stride) % 2 == 1 {
            continue;
        }
        let m = CMatrix::from_rows([[a[i], b[i]], [a[i + stride], b[i + stride]]]);
        if m.as_slice().iter().all(|z| z.norm() <= 1e-12) {
            continue;
        }
        out.push(BranchOperator {
            index: i,
            operator: m,
        });
    }
    Ok(out)
}

/// `A ∝ B` with a complex factor.
pub fn proportional(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    let overlap: Complex64 = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x.conj() * y)
        .sum();
    let na = a
        .as_slice()
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let nb = b
        .as_slice()
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    (na * nb - overlap.norm()).abs() <= tol * na * nb
}

/// Number of operators that differ beyond a complex factor.
pub fn distinct_up_to_phase(ops: &[BranchOperator]) -> usize {
    let mut reps: Vec<&CMatrix> = Vec::new();
    for op in ops {
        if !reps.iter().any(|r| proportional(r, &op.operator, 1e-9)) {
            reps.push(&op.operator);
        }
    }
    reps.len()
}

/// Distinct conditional operators on site N after each single-ancilla
/// stage: entangled, even parity carried, ancilla restored, odd parity
/// carried.
pub fn single_ancilla_operator_counts(config: &ProtocolConfig) -> Result<Vec<(Stage, usize)>> {
    let mut runs = [
        Pipeline::new(config, &InputQubit::ZERO)?,
        Pipeline::new(config, &InputQubit::ONE)?,
    ];
    let target = site_label(config.num_sites);
    let mut out = Vec::new();
    type Step = fn(&mut Pipeline) -> crate::protocol::Result<()>;
    let steps: [Step; 4] = [
        Pipeline::entangle,
        Pipeline::carry_even,
        Pipeline::restore_ancilla,
        Pipeline::carry_odd,
    ];
    for step in steps {
        for p in runs.iter_mut() {
            step(p)?;
        }
        let ops = conditional_operators(runs[0].state(), runs[1].state(), &target)?;
        out.push((runs[0].stage(), distinct_up_to_phase(&ops)));
    }
    Ok(out)
}

/// Largest entrywise distance between the read step, restricted to ancilla
/// levels {0, 2}, and two ideal CNOTs: the first ancilla flips with the
/// parity of sites `N−1, N−3, …`, the second with that of `N−2, N−4, …`.
pub fn read_cnot_distance(config: &ProtocolConfig) -> Result<f64> {
    let n = config.num_sites;
    let reg = Register::lattice(n, 2)?;
    let near: Vec<usize> = (1..n).filter(|k| (n - k) % 2 == 1).collect();
    let far: Vec<usize> = (1..n).filter(|k| (n - k) % 2 == 0).collect();
    let mut worst: f64 = 0.0;
    for anc in 0..4usize {
        let (l1, l2) = (2 * (anc >> 1), 2 * (anc & 1));
        for x in 0..1usize << n {
            let bits: Vec<usize> = (1..=n).map(|k| (x >> (n - k)) & 1).collect();
            let mut levels = vec![l1, l2];
            levels.extend(&bits);
            let start = PureState::basis(reg.clone(), &levels)?;
            let mut p = Pipeline::at_stage(config, start, Stage::Entangled)?;
            p.read()?;
            let parity = |sites: &[usize]| sites.iter().map(|k| bits[k - 1]).sum::<usize>() % 2;
            let mut expect_levels = levels.clone();
            expect_levels[0] = l1 ^ (2 * parity(&near));
            expect_levels[1] = l2 ^ (2 * parity(&far));
            let expect = reg.encode(&expect_levels)?;
            for (i, z) in p.state().amplitudes().iter().enumerate() {
                let e = if i == expect {
                    c(1.0, 0.0)
                } else {
                    c(0.0, 0.0)
                };
                worst = worst.max((z - e).norm());
            }
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct RRelation {
    /// Per site branch `J`: distance of the applied correction from
    /// `±Z^{J mod 2} X^{J div 2}`.
    pub pauli_residual: Vec<f64>,
    /// Per `J`: distance of `R⁽ᴶ⁾ Ũ⁽ᴶ⁾†` from `±Ũ⁽⁰⁾†`.
    pub collapse_residual: Vec<f64>,
}

impl RRelation {
    pub fn max_residual(&self) -> f64 {
        self.pauli_residual
            .iter()
            .chain(&self.collapse_residual)
            .copied()
            .fold(0.0, f64::max)
    }
}

fn min_sign_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    a.max_abs_diff(b)
        .min(a.max_abs_diff(&b.scale(c(-1.0, 0.0))))
}

/// Reads the correction actually applied to site 3 in each branch of the
/// three-site protocol and compares it with the Pauli frame.
pub fn three_site_r_relation() -> Result<RRelation> {
    let config = ProtocolConfig::new(3, Mode::ThreeSite)?;
    let mut runs = [
        Pipeline::new(&config, &InputQubit::ZERO)?,
        Pipeline::new(&config, &InputQubit::ONE)?,
    ];
    for p in runs.iter_mut() {
        p.entangle()?;
        p.read()?;
    }
    let before = conditional_operators(runs[0].state(), runs[1].state(), "S3")?;
    for p in runs.iter_mut() {
        p.correct()?;
    }
    let after = conditional_operators(runs[0].state(), runs[1].state(), "S3")?;
    let reg = runs[0].state().register().clone();
    let x = CMatrix::from_rows([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]);
    let z = CMatrix::from_diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)]);
    let u0 = three_site_operator(0).matrix().adjoint();
    let mut rel = RRelation {
        pauli_residual: vec![f64::INFINITY; 4],
        collapse_residual: vec![f64::INFINITY; 4],
    };
    for b in &before {
        let Some(a) = after.iter().find(|a| a.index == b.index) else {
            return Err(OracleError::Mismatch(format!(
                "branch {} vanished after correction",
                b.index
            )));
        };
        let levels = reg.decode(b.index);
        let j = 2 * levels[2] + levels[3];
        // Branch amplitudes carry a factor 1/2; the block itself is unitary.
        let block = b.operator.scale(c(2.0, 0.0));
        let r = &a.operator.scale(c(2.0, 0.0)) * &block.adjoint();
        let mut frame = CMatrix::identity(2);
        if j / 2 == 1 {
            frame = &frame * &x;
        }
        if j % 2 == 1 {
            frame = &z * &frame;
        }
        rel.pauli_residual[j] = min_sign_distance(&r, &frame);
        let collapsed = &r * &three_site_operator(j).matrix().adjoint();
        rel.collapse_residual[j] = min_sign_distance(&collapsed, &u0);
    }
    Ok(rel)
}

/// Distance between the pipeline's entangled sites (ancillas in |0⟩) and
/// `Q_N |φ,0,…,0⟩` from the oracle, including any weight outside the
/// ancilla ground state.
pub fn entangler_distance(config: &ProtocolConfig, phi: &InputQubit) -> Result<f64> {
    let n = config.num_sites;
    let mut p = Pipeline::new(config, phi)?;
    p.entangle()?;
    let zero = qn_column(n, 0);
    let one = qn_column(n, 1 << (n - 1));
    let amps = p.state().amplitudes();
    let mut worst: f64 = 0.0;
    for (i, z) in amps.iter().enumerate() {
        let e = if i < zero.len() {
            phi.a * zero[i] + phi.b * one[i]
        } else {
            c(0.0, 0.0)
        };
        worst = worst.max((z - e).norm());
    }
    Ok(worst)
}

/// Whether a distance is within the oracle tolerance.
pub fn within(d: f64) -> bool {
    d <= CLASSIFY_TOL
}
