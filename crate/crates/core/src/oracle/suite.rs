use serde::Serialize;

use super::lattice::{
    entangler_distance, read_cnot_distance, single_ancilla_operator_counts, three_site_r_relation,
};
use super::{
    analyze_structure, build_qn, extract_blocks, resolve_parity_assignment, verify_induction_step,
    verify_parity_table, BlockClass, Family, OracleError, Result, MAX_DENSE_SITES,
};
use crate::protocol::{
    teleport, three_site_operator, CorrectionTable, Mode, ParityAssignment, ProtocolConfig,
};
use crate::qstate::InputQubit;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub num_sites: usize,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub max_sites: usize,
    pub parity_assignment: ParityAssignment,
    pub checks: Vec<Check>,
    pub mismatches: Vec<String>,
    pub pass: bool,
}

fn inputs() -> [InputQubit; 3] {
    use num_complex::Complex64;
    [
        InputQubit::ZERO,
        InputQubit::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).expect("normalized"),
        InputQubit::new(Complex64::new(0.5, 0.5), Complex64::new(-0.5, 0.5)).expect("normalized"),
    ]
}

/// Runs every oracle check for N = 3 and every even N up to `max_sites`,
/// with the published table checked under `assignment`.
pub fn verify_all(
    max_sites: usize,
    assignment: ParityAssignment,
    tolerance: f64,
) -> Result<SuiteReport> {
    if !(4..=MAX_DENSE_SITES).contains(&max_sites) {
        return Err(OracleError::OutOfRange(format!(
            "max sites {max_sites} outside 4..={MAX_DENSE_SITES}"
        )));
    }
    let mut checks = Vec::new();
    let mut mismatches = Vec::new();
    let mut push = |name: &str, n: usize, pass: bool, detail: String| {
        checks.push(Check {
            name: name.to_string(),
            num_sites: n,
            pass,
            detail,
        });
    };

    for n in 2..=max_sites.min(8) {
        let err = build_qn(n)?.unitarity_error();
        push(
            "entangler-unitary",
            n,
            err <= 1e-11,
            format!("max |QQ†−1| = {err:.2e}"),
        );
    }

    let blocks = extract_blocks(3)?;
    let worst = blocks
        .iter()
        .map(|b| {
            let class_ok = b.class
                == BlockClass {
                    family: Family::ThreeSite,
                    index: b.branch,
                };
            let expect = three_site_operator(b.branch)
                .matrix()
                .adjoint()
                .scale(num_complex::Complex64::new(b.sign, 0.0));
            if class_ok {
                b.matrix().max_abs_diff(&expect)
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max);
    push(
        "three-site-blocks",
        3,
        worst <= 1e-11,
        format!("max entry error {worst:.2e}"),
    );
    let rel = three_site_r_relation()?;
    push(
        "three-site-corrections",
        3,
        rel.max_residual() <= 1e-12,
        format!("max residual {:.2e}", rel.max_residual()),
    );

    for (n, mode) in [(3, Mode::ThreeSite), (4, Mode::EvenN)] {
        let d = read_cnot_distance(&ProtocolConfig::new(n, mode)?)?;
        push(
            "read-is-two-cnots",
            n,
            d <= 1e-12,
            format!("distance {d:.2e}"),
        );
    }

    let mut modes = vec![(3, Mode::ThreeSite)];
    for n in (4..=max_sites).step_by(2) {
        modes.push((n, Mode::EvenN));
        modes.push((n, Mode::SingleAncilla));
    }
    for &(n, mode) in &modes {
        let mut config = ProtocolConfig::new(n, mode)?;
        config.parity_assignment = assignment;
        let mut entangle: f64 = 0.0;
        let mut fidelity: f64 = 1.0;
        for phi in inputs() {
            entangle = entangle.max(entangler_distance(&config, &phi)?);
            fidelity = fidelity.min(teleport(&phi, &config)?.report.fidelity);
        }
        push(
            "entangler-matches-oracle",
            n,
            entangle <= 1e-12,
            format!("{} distance {entangle:.2e}", mode.as_str()),
        );
        push(
            "teleport-fidelity",
            n,
            (1.0 - fidelity).abs() <= tolerance,
            format!("{} min fidelity {fidelity:.12}", mode.as_str()),
        );
    }

    for n in (4..=max_sites).step_by(2) {
        let report = verify_parity_table(n, &CorrectionTable::published(), assignment)?;
        push(
            "published-table",
            n,
            report.pass,
            format!(
                "{} of {} branches disagree",
                report.mismatches.len(),
                report.branches.len()
            ),
        );
        mismatches.extend(report.mismatches);

        let s = analyze_structure(n)?;
        push(
            "block-structure",
            n,
            s.holds(),
            format!(
                "classes {:?}, induced table {:?}, norm error {:.2e}",
                s.class_counts, s.induced, s.norm_bookkeeping_error
            ),
        );

        let r = resolve_parity_assignment(n)?;
        push(
            "parity-assignment",
            n,
            r.resolved == Some(assignment),
            format!(
                "resolved {:?} (spread canonical {:.2e}, swapped {:.2e})",
                r.resolved, r.canonical_spread, r.swapped_spread
            ),
        );

        if n + 2 <= max_sites {
            let step = verify_induction_step(n)?;
            push(
                "induction-step",
                n,
                step.holds,
                format!(
                    "{} -> {}: interchanged {}",
                    step.from_sites, step.to_sites, step.interchanged
                ),
            );
        }

        let counts = single_ancilla_operator_counts(&ProtocolConfig::new(n, Mode::SingleAncilla)?)?;
        let seq: Vec<usize> = counts.iter().map(|(_, k)| *k).collect();
        push(
            "single-ancilla-operators",
            n,
            seq == [4, 2, 2, 1],
            format!("distinct operators {seq:?}"),
        );
    }

    let pass = checks.iter().all(|c| c.pass);
    Ok(SuiteReport {
        max_sites,
        parity_assignment: assignment,
        checks,
        mismatches,
        pass,
    })
}
