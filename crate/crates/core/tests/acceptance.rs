//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if
//! any criterion fails.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use lattice_teleport::lattice_ops::{replay, shift, sweep};
use lattice_teleport::oracle::lattice::{read_cnot_distance, single_ancilla_operator_counts};
use lattice_teleport::oracle::{
    analyze_structure, extract_blocks, resolve_parity_assignment, verify_base_case,
    verify_induction_step, verify_parity_table, BlockClass, Family,
};
use lattice_teleport::protocol::{
    teleport, CorrectionTable, Mode, ParityAssignment, Pipeline, ProtocolConfig,
};
use lattice_teleport::qstate::{CMatrix, InputQubit, PureState, Register};
use lattice_teleport::reference::{
    decomposition_residual, irreversible_statistics, reversible_four_level_teleport,
};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Self {
            pass,
            summary: summary.into(),
            details: Vec::new(),
        }
    }
}

/// `(fidelity, purity)` of the least significant qubit (site N) computed
/// straight from the amplitudes.
fn last_site_marginal(amps: &[Complex64], phi: &InputQubit) -> (f64, f64) {
    let (a, b) = (phi.a, phi.b);
    let mut fid = 0.0;
    let mut rho = [[c(0.0, 0.0); 2]; 2];
    for pair in amps.chunks(2) {
        fid += (a.conj() * pair[0] + b.conj() * pair[1]).norm_sqr();
        for i in 0..2 {
            for j in 0..2 {
                rho[i][j] += pair[i] * pair[j].conj();
            }
        }
    }
    let purity = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| (rho[i][j] * rho[j][i]).re)
        .sum();
    (fid, purity)
}

fn random_inputs(seed: u64, count: usize) -> Vec<InputQubit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| InputQubit::random(&mut rng)).collect()
}

fn criterion_1() -> Outcome {
    // Shift on two sites: only |0⟩|1⟩ picks up −1. Sweep: only |2⟩_A|1⟩_j.
    let shift_table = [((0, 0), 1.0), ((0, 1), -1.0), ((1, 0), 1.0), ((1, 1), 1.0)];
    let mut worst: f64 = 0.0;
    for ((x, y), sign) in shift_table {
        let reg = Register::lattice(2, 0).unwrap();
        let mut s = PureState::basis(reg.clone(), &[x, y]).unwrap();
        shift(&mut s, PI).unwrap();
        let idx = reg.encode(&[x, y]).unwrap();
        for (i, z) in s.amplitudes().iter().enumerate() {
            let e = if i == idx { c(sign, 0.0) } else { c(0.0, 0.0) };
            worst = worst.max((z - e).norm());
        }
    }
    for anc in 0..3 {
        for site in 0..2 {
            let reg = Register::lattice(3, 1).unwrap();
            let levels = [anc, 0, site, 0];
            let mut s = PureState::basis(reg.clone(), &levels).unwrap();
            sweep(&mut s, "A1", &[2], PI).unwrap();
            let sign = if anc == 2 && site == 1 { -1.0 } else { 1.0 };
            let idx = reg.encode(&levels).unwrap();
            for (i, z) in s.amplitudes().iter().enumerate() {
                let e = if i == idx { c(sign, 0.0) } else { c(0.0, 0.0) };
                worst = worst.max((z - e).norm());
            }
        }
    }
    // Longer chain: the shift sign is the parity of |0⟩|1⟩ neighbours.
    let n = 6;
    let reg = Register::lattice(n, 0).unwrap();
    for x in 0..1usize << n {
        let bits: Vec<usize> = (0..n).map(|k| (x >> (n - 1 - k)) & 1).collect();
        let flips = bits.windows(2).filter(|w| w == &[0, 1]).count();
        let mut s = PureState::basis(reg.clone(), &bits).unwrap();
        shift(&mut s, PI).unwrap();
        let sign = if flips % 2 == 1 { -1.0 } else { 1.0 };
        worst = worst.max((s.amplitudes()[x] - c(sign, 0.0)).norm());
    }
    Outcome::new(worst == 0.0, format!("max deviation {worst:e}"))
}

fn teleport_batch(n: usize, mode: Mode, inputs: &[InputQubit]) -> (f64, f64) {
    let config = ProtocolConfig::new(n, mode).unwrap();
    let mut fid: f64 = 1.0;
    let mut pur: f64 = 1.0;
    for phi in inputs {
        let run = teleport(phi, &config).unwrap();
        let (f, p) = last_site_marginal(run.final_state.amplitudes(), phi);
        fid = fid.min(f);
        pur = pur.min(p);
    }
    (fid, pur)
}

fn criterion_2() -> Outcome {
    let (fid, pur) = teleport_batch(3, Mode::ThreeSite, &random_inputs(2, 100));
    Outcome::new(
        fid >= 1.0 - 1e-10 && pur >= 1.0 - 1e-10,
        format!("100 inputs, min fidelity {fid:.15}, min purity {pur:.15}"),
    )
}

fn criterion_3() -> Outcome {
    let mut out = Outcome::new(true, String::new());
    let mut worst: f64 = 1.0;
    for n in [4, 6, 8, 10, 12] {
        let (fid, _) = teleport_batch(n, Mode::EvenN, &random_inputs(3 + n as u64, 20));
        out.details.push(format!("N={n}: min fidelity {fid:.15}"));
        worst = worst.min(fid);
    }
    out.pass = worst >= 1.0 - 1e-10;
    out.summary = format!("N in 4..=12, 20 inputs each, min fidelity {worst:.15}");
    out
}

fn criterion_4() -> Outcome {
    // Published table for even m, keyed [S_e][S_o].
    let published = CorrectionTable::new([[0, 2], [1, 3]]);
    assert_eq!(published.entries(), CorrectionTable::published().entries());
    let mut out = Outcome::new(true, String::new());
    let mut literal = true;
    let mut structural = true;
    for n in [4, 6, 8] {
        let report = verify_parity_table(n, &published, ParityAssignment::Canonical).unwrap();
        literal &= report.pass;
        out.details.push(format!(
            "N={n}: published table {} ({} of {} branches disagree)",
            if report.pass {
                "matches"
            } else {
                "does not match"
            },
            report.mismatches.len(),
            report.branches.len()
        ));
        let signs_ok = report
            .branches
            .iter()
            .all(|b| (b.sign.abs() - 1.0).abs() <= 1e-10);
        let s = analyze_structure(n).unwrap();
        let r = resolve_parity_assignment(n).unwrap();
        let ok = signs_ok && s.holds() && r.resolved == Some(ParityAssignment::Canonical);
        structural &= ok;
        out.details.push(format!(
            "N={n}: W-class {}, signs ±1 {}, parity-determined {}, counts {:?}, induced table {:?}, resolved assignment {:?}",
            s.all_w_class, signs_ok, s.parity_determined, s.class_counts, s.induced, r.resolved
        ));
    }
    out.pass = literal && structural;
    out.summary = format!(
        "literal published table {}, block structure and assignment resolution {}",
        if literal {
            "reproduced"
        } else {
            "NOT reproduced"
        },
        if structural { "verified" } else { "broken" }
    );
    out
}

fn criterion_5() -> Outcome {
    // Ũ⁽⁰⁾…Ũ⁽³⁾ = −iσ₂, σ₁, −σ₃, 1.
    let list = [
        [[c(0.0, 0.0), c(-1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        [[c(-1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
        [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
    ];
    let blocks = extract_blocks(3).unwrap();
    let mut worst: f64 = 0.0;
    let mut classes = true;
    for b in &blocks {
        classes &= b.class
            == BlockClass {
                family: Family::ThreeSite,
                index: b.branch,
            };
        let u = CMatrix::from_rows(list[b.branch]).adjoint();
        let d = b
            .matrix()
            .max_abs_diff(&u)
            .min(b.matrix().max_abs_diff(&u.scale(c(-1.0, 0.0))));
        worst = worst.max(d);
    }
    Outcome::new(
        classes && blocks.len() == 4 && worst <= 1e-11,
        format!("4 blocks, max entry error {worst:e}"),
    )
}

fn criterion_6() -> Outcome {
    let base = verify_base_case().unwrap();
    let s46 = verify_induction_step(4).unwrap();
    let s68 = verify_induction_step(6).unwrap();
    Outcome::new(
        base && s46.holds && s68.holds,
        format!("base N=4 {base}, 4->6 {}, 6->8 {}", s46.holds, s68.holds),
    )
}

fn criterion_7() -> Outcome {
    let d3 = read_cnot_distance(&ProtocolConfig::new(3, Mode::ThreeSite).unwrap()).unwrap();
    let d4 = read_cnot_distance(&ProtocolConfig::new(4, Mode::EvenN).unwrap()).unwrap();
    Outcome::new(
        d3.max(d4) <= 1e-12,
        format!("distance N=3 {d3:e}, N=4 {d4:e}"),
    )
}

fn criterion_8() -> Outcome {
    let mut overlap: f64 = 1.0;
    let mut purity_err: f64 = 0.0;
    let cases = [
        (3, Mode::ThreeSite),
        (4, Mode::EvenN),
        (6, Mode::EvenN),
        (4, Mode::SingleAncilla),
        (8, Mode::SingleAncilla),
    ];
    for (i, &(n, mode)) in cases.iter().enumerate() {
        let config = ProtocolConfig::new(n, mode).unwrap();
        for phi in random_inputs(80 + i as u64, 5) {
            let initial = Pipeline::new(&config, &phi).unwrap().state().clone();
            let run = teleport(&phi, &config).unwrap();
            let mut back = run.final_state.clone();
            replay(&run.report.schedule.adjoint().unwrap(), &mut back, None).unwrap();
            overlap = overlap.min(back.inner_product(&initial).unwrap().norm_sqr());

            let mut p = Pipeline::at_stage(
                &config,
                run.final_state,
                lattice_teleport::protocol::Stage::Finished,
            )
            .unwrap();
            p.reset_ancillas().unwrap();
            for a in ["A1", "A2"].iter().take(config.num_ancillas()) {
                purity_err = purity_err.max((p.state().purity(a).unwrap() - 1.0).abs());
                purity_err =
                    purity_err.max((p.state().level_population(a, 0).unwrap() - 1.0).abs());
            }
        }
    }
    Outcome::new(
        overlap >= 1.0 - 1e-10 && purity_err <= 1e-12,
        format!("min adjoint-replay overlap {overlap:.15}, ancilla reset error {purity_err:e}"),
    )
}

fn criterion_9() -> Outcome {
    let mut out = Outcome::new(true, String::new());
    let phi = random_inputs(9, 1)[0];
    let trials = 10_000;
    let stats = irreversible_statistics(&phi, trials, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
    let hist = stats.histogram.unwrap();
    let spread = hist
        .iter()
        .map(|&k| (k as f64 / trials as f64 - 0.25).abs())
        .fold(0.0, f64::max);
    let hist_ok = spread <= 0.02 && (stats.fidelity - 1.0).abs() <= 1e-12;
    out.details.push(format!(
        "irreversible: histogram {hist:?}, max deviation {spread:.4}, min fidelity {:.15}",
        stats.fidelity
    ));
    let mut four_err: f64 = 0.0;
    let mut decomposition: f64 = 0.0;
    for phi in random_inputs(19, 10) {
        let r = reversible_four_level_teleport(&phi).unwrap().report;
        four_err = four_err
            .max((r.fidelity - 1.0).abs())
            .max((r.purity - 1.0).abs());
        decomposition = decomposition.max(decomposition_residual(&phi));
    }
    out.details.push(format!(
        "four-level: max |1 - fidelity|, |1 - purity| {four_err:e}"
    ));
    out.details
        .push(format!("Bell decomposition residual {decomposition:e}"));
    out.pass = hist_ok && four_err <= 1e-12 && decomposition <= 1e-14;
    out.summary = format!("histogram spread {spread:.4}, four-level error {four_err:e}, decomposition {decomposition:e}");
    out
}

fn criterion_10() -> Outcome {
    let mut out = Outcome::new(true, String::new());
    let mut fid: f64 = 1.0;
    let mut counts_ok = true;
    for n in [4, 6] {
        let (f, _) = teleport_batch(n, Mode::SingleAncilla, &random_inputs(100 + n as u64, 20));
        fid = fid.min(f);
        let counts: Vec<usize> =
            single_ancilla_operator_counts(&ProtocolConfig::new(n, Mode::SingleAncilla).unwrap())
                .unwrap()
                .into_iter()
                .map(|(_, k)| k)
                .collect();
        counts_ok &= counts == [4, 2, 2, 1];
        out.details.push(format!(
            "N={n}: min fidelity {f:.15}, distinct site-N operators {counts:?}"
        ));
    }
    out.pass = fid >= 1.0 - 1e-10 && counts_ok;
    out.summary = format!("min fidelity {fid:.15}, operator counts 4 -> 2 -> 2 -> 1 {counts_ok}");
    out
}

fn peak_child_rss_kib() -> i64 {
    let mut usage: libc::rusage = unsafe { std::mem::zeroed() };
    unsafe { libc::getrusage(libc::RUSAGE_CHILDREN, &mut usage) };
    usage.ru_maxrss
}

fn criterion_11() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_lattice-teleport"))
        .args([
            "run",
            "--sites",
            "20",
            "--mode",
            "even-n",
            "--alpha",
            "0.6,0",
            "--beta",
            "0,0.8",
            "--deterministic",
        ])
        .output()
        .expect("spawn CLI");
    let elapsed = start.elapsed();
    let rss_mib = peak_child_rss_kib() as f64 / 1024.0;
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or_default();
    let fidelity = report["fidelity"].as_f64().unwrap_or(f64::NAN);
    Outcome::new(
        out.status.success()
            && elapsed < Duration::from_secs(60)
            && rss_mib < 1024.0
            && fidelity >= 1.0 - 1e-10,
        format!(
            "N=20 in {:.2} s, peak RSS {rss_mib:.0} MiB, fidelity {fidelity:.15}",
            elapsed.as_secs_f64()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 11] = [
        ("truth tables", criterion_1, Duration::from_secs(1)),
        (
            "three-site teleportation",
            criterion_2,
            Duration::from_secs(1),
        ),
        ("N-site teleportation", criterion_3, Duration::from_secs(30)),
        ("oracle parity table", criterion_4, Duration::from_secs(10)),
        ("three-site operator list", criterion_5, Duration::MAX),
        ("induction", criterion_6, Duration::MAX),
        ("CNOT equivalence", criterion_7, Duration::MAX),
        ("reversibility", criterion_8, Duration::MAX),
        ("reference schemes", criterion_9, Duration::MAX),
        ("single-ancilla variant", criterion_10, Duration::MAX),
        ("performance smoke test", criterion_11, Duration::MAX),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if elapsed > *budget {
            outcome.pass = false;
            outcome
                .summary
                .push_str(&format!("; over the {:?} budget", budget));
        }
        if !outcome.pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {}: {} ({}; {:.3} s)",
            i + 1,
            name,
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.summary,
            elapsed.as_secs_f64()
        );
        for d in &outcome.details {
            println!("    {d}");
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
