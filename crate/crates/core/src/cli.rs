//! Command-line front end.
//!
//! Exit codes: 0 success, 1 fidelity or verification failure, 2 usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::lattice_ops::{replay, PulseSchedule, DEFAULT_PHASE};
use crate::oracle::{verify_all, SuiteReport};
use crate::protocol::{assess, teleport, Mode, ParityAssignment, ProtocolConfig, TeleportReport};
use crate::qstate::{site_label, InputQubit, PureState, END_TO_END_TOL};
use crate::reference::{irreversible_statistics, reversible_four_level_teleport};

pub const TOLERANCE_ENV: &str = "LATTICE_TELEPORT_TOL";
pub const DEFAULT_SITES: usize = 3;
pub const DEFAULT_MAX_SITES: usize = 8;
pub const DEFAULT_TRIALS: usize = 10_000;
/// Tolerance for `|α|² + |β|² = 1` on parsed inputs.
pub const INPUT_NORM_TOL: f64 = 1e-9;

const DEFAULTS: &str = concat!(
    "Defaults (lattice-teleport ",
    env!("CARGO_PKG_VERSION"),
    "):\n",
    "  tolerance          1e-10  (overridden by LATTICE_TELEPORT_TOL)\n",
    "  phase              3.141592653589793\n",
    "  mode               three-site for 3 sites, even-n otherwise\n",
    "  sites              3\n",
    "  max-sites          8\n",
    "  trials             10000\n",
    "  parity-assignment  canonical\n",
    "  format             json\n",
    "\n",
    "Exit codes: 0 success, 1 fidelity or verification failure, 2 usage error."
);

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "lattice-teleport", version, about = "Reversible teleportation along an optical-lattice chain", after_help = DEFAULTS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    #[value(alias = "text")]
    TextSummary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Irreversible,
    FourLevel,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Zero the wall-clock fields so identical flags give identical bytes.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Amplitude of |0⟩ as `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Amplitude of |1⟩ as `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Seed for sampled inputs and measurements.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct ProtocolArgs {
    #[arg(long, default_value_t = DEFAULT_SITES)]
    sites: usize,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Collisional phase of every shift and sweep.
    #[arg(long, default_value_t = DEFAULT_PHASE, allow_hyphen_values = true)]
    phase: f64,
    #[arg(long, value_enum, default_value = "canonical")]
    parity_assignment: ParityAssignment,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Teleport a qubit from site 1 to site N.
    Run {
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the oracle checks for N = 3 and every even N up to the bound.
    Verify {
        #[arg(long, default_value_t = DEFAULT_MAX_SITES)]
        max_sites: usize,
        #[arg(long, value_enum, default_value = "canonical")]
        parity_assignment: ParityAssignment,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Dump the pulse schedule of a run, or replay a dumped schedule.
    Trace {
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[command(flatten)]
        input: InputArgs,
        /// Schedule file to replay; prints the resulting report.
        #[arg(long)]
        replay: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run one of the textbook reference schemes.
    Reference {
        #[arg(long, value_enum)]
        scheme: Scheme,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Error carrying its exit code.
#[derive(Debug)]
struct Exit {
    code: i32,
    message: String,
}

fn usage(message: impl std::fmt::Display) -> Exit {
    Exit {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

fn failure(message: impl std::fmt::Display) -> Exit {
    Exit {
        code: EXIT_FAIL,
        message: message.to_string(),
    }
}

/// Parses `re,im`.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [re, im] = parts.as_slice() else {
        return Err(format!("expected `re,im`, got `{text}`"));
    };
    let re: f64 = re
        .parse()
        .map_err(|_| format!("bad real part in `{text}`"))?;
    let im: f64 = im
        .parse()
        .map_err(|_| format!("bad imaginary part in `{text}`"))?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(format!("non-finite amplitude `{text}`"));
    }
    Ok(Complex64::new(re, im))
}

/// Tolerance from the environment, else the default.
pub fn tolerance_from_env() -> Result<f64, String> {
    match std::env::var(TOLERANCE_ENV) {
        Err(_) => Ok(END_TO_END_TOL),
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
            _ => Err(format!("{TOLERANCE_ENV}={v} is not a positive number")),
        },
    }
}

fn resolve_input(args: &InputArgs) -> Result<InputQubit, Exit> {
    if args.alpha.is_none() && args.beta.is_none() {
        return Ok(match args.seed {
            Some(seed) => InputQubit::random(&mut ChaCha8Rng::seed_from_u64(seed)),
            None => InputQubit::ZERO,
        });
    }
    let a = parse_complex(args.alpha.as_deref().unwrap_or("0,0")).map_err(usage)?;
    let b = parse_complex(args.beta.as_deref().unwrap_or("0,0")).map_err(usage)?;
    InputQubit::normalized(a, b, INPUT_NORM_TOL)
        .map_err(|e| usage(format!("invalid input qubit: {e}")))
}

fn resolve_config(args: &ProtocolArgs, tolerance: f64) -> Result<ProtocolConfig, Exit> {
    let mode = args.mode.unwrap_or_else(|| Mode::for_sites(args.sites));
    let config = ProtocolConfig {
        num_sites: args.sites,
        mode,
        collisional_phase: args.phase,
        tolerance,
        parity_assignment: args.parity_assignment,
    };
    config.validate().map_err(usage)?;
    Ok(config)
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// `key: value` lines for the top-level fields of a report.
fn text_summary<T: Serialize>(title: &str, report: &T) -> String {
    let mut out = format!("{title}\n");
    if let Ok(Value::Object(map)) = serde_json::to_value(report) {
        for (k, v) in map {
            out.push_str(&format!("{k}: {}\n", scalar_text(&v)));
        }
    }
    out
}

fn suite_summary(report: &SuiteReport) -> String {
    let mut out = format!(
        "lattice-teleport verify (max sites {}, {} assignment)\n",
        report.max_sites,
        match report.parity_assignment {
            ParityAssignment::Canonical => "canonical",
            ParityAssignment::Swapped => "swapped",
        }
    );
    for c in &report.checks {
        out.push_str(&format!(
            "{} {} N={}: {}\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.num_sites,
            c.detail
        ));
    }
    for m in &report.mismatches {
        out.push_str(&format!("mismatch: {m}\n"));
    }
    out.push_str(&format!(
        "overall: {}\n",
        if report.pass { "PASS" } else { "FAIL" }
    ));
    out
}

fn render<T: Serialize>(format: Format, title: &str, report: &T) -> Result<String, Exit> {
    match format {
        Format::Json => serde_json::to_string_pretty(report)
            .map(|s| s + "\n")
            .map_err(failure),
        Format::TextSummary => Ok(text_summary(title, report)),
    }
}

fn emit(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), Exit> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| usage(format!("cannot write {}: {e}", p.display())))
        }
        None => stdout.write_all(text.as_bytes()).map_err(failure),
    }
}

fn cmd_run(
    protocol: &ProtocolArgs,
    input: &InputArgs,
    output: &OutputArgs,
    tol: f64,
    stdout: &mut dyn Write,
) -> Result<i32, Exit> {
    let config = resolve_config(protocol, tol)?;
    let phi = resolve_input(input)?;
    let mut report = teleport(&phi, &config).map_err(failure)?.report;
    if output.deterministic {
        report.wall_time_ms = 0.0;
    }
    emit(
        output.out.as_deref(),
        &render(output.format, "lattice-teleport run", &report)?,
        stdout,
    )?;
    Ok(if report.passed(tol) {
        EXIT_OK
    } else {
        EXIT_FAIL
    })
}

fn cmd_verify(
    max_sites: usize,
    assignment: ParityAssignment,
    output: &OutputArgs,
    tol: f64,
    stdout: &mut dyn Write,
) -> Result<i32, Exit> {
    if max_sites > crate::oracle::MAX_DENSE_SITES {
        return Err(usage(format!(
            "--max-sites {max_sites} exceeds the dense limit of {}",
            crate::oracle::MAX_DENSE_SITES
        )));
    }
    if max_sites < 4 {
        return Err(usage(format!(
            "--max-sites must be at least 4, got {max_sites}"
        )));
    }
    let report = verify_all(max_sites, assignment, tol).map_err(failure)?;
    let text = match output.format {
        Format::Json => render(Format::Json, "", &report)?,
        Format::TextSummary => suite_summary(&report),
    };
    emit(output.out.as_deref(), &text, stdout)?;
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("FAIL {} N={}: {}", c.name, c.num_sites, c.detail);
    }
    Ok(if report.pass { EXIT_OK } else { EXIT_FAIL })
}

fn mode_of(schedule: &PulseSchedule, requested: Option<Mode>) -> Mode {
    requested.unwrap_or(match (schedule.num_sites, schedule.num_ancillas) {
        (_, 1) => Mode::SingleAncilla,
        (3, _) => Mode::ThreeSite,
        _ => Mode::EvenN,
    })
}

fn cmd_trace(
    protocol: &ProtocolArgs,
    input: &InputArgs,
    replay_from: Option<&Path>,
    output: &OutputArgs,
    tol: f64,
    stdout: &mut dyn Write,
) -> Result<i32, Exit> {
    let phi = resolve_input(input)?;
    let Some(path) = replay_from else {
        let config = resolve_config(protocol, tol)?;
        let run = teleport(&phi, &config).map_err(failure)?;
        emit(
            output.out.as_deref(),
            &run.report.schedule.to_lines(),
            stdout,
        )?;
        return Ok(if run.report.passed(tol) {
            EXIT_OK
        } else {
            EXIT_FAIL
        });
    };
    let file =
        File::open(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let schedule = PulseSchedule::read_from(BufReader::new(file)).map_err(usage)?;
    let start = Instant::now();
    let register = schedule.register().map_err(usage)?;
    let mut state = PureState::with_qubit(register, &site_label(1), &phi).map_err(usage)?;
    let mut rng = input.seed.map(ChaCha8Rng::seed_from_u64);
    replay(
        &schedule,
        &mut state,
        rng.as_mut().map(|r| r as &mut dyn rand::RngCore),
    )
    .map_err(usage)?;
    let (fidelity, purity, leakage) = assess(&state, schedule.num_sites, &phi).map_err(failure)?;
    let report = TeleportReport {
        input: phi,
        num_sites: schedule.num_sites,
        mode: mode_of(&schedule, protocol.mode),
        fidelity,
        purity,
        leakage,
        gate_count: schedule.len(),
        wall_time_ms: if output.deterministic {
            0.0
        } else {
            start.elapsed().as_secs_f64() * 1e3
        },
        parity_assignment_used: protocol.parity_assignment,
        schedule_digest: schedule.digest(),
        schedule,
    };
    emit(
        output.out.as_deref(),
        &render(output.format, "lattice-teleport replay", &report)?,
        stdout,
    )?;
    Ok(if report.passed(tol) {
        EXIT_OK
    } else {
        EXIT_FAIL
    })
}

fn cmd_reference(
    scheme: Scheme,
    trials: usize,
    input: &InputArgs,
    output: &OutputArgs,
    tol: f64,
    stdout: &mut dyn Write,
) -> Result<i32, Exit> {
    let phi = resolve_input(&InputArgs {
        alpha: input.alpha.clone(),
        beta: input.beta.clone(),
        seed: None,
    })?;
    let mut report = match scheme {
        Scheme::Irreversible => {
            let seed = input
                .seed
                .ok_or_else(|| usage("the irreversible scheme samples outcomes; pass --seed"))?;
            if trials == 0 {
                return Err(usage("--trials must be positive"));
            }
            irreversible_statistics(&phi, trials, &mut ChaCha8Rng::seed_from_u64(seed))
                .map_err(failure)?
        }
        Scheme::FourLevel => {
            reversible_four_level_teleport(&phi)
                .map_err(failure)?
                .report
        }
    };
    if output.deterministic {
        report.wall_time_ms = 0.0;
    }
    emit(
        output.out.as_deref(),
        &render(output.format, "lattice-teleport reference", &report)?,
        stdout,
    )?;
    Ok(if report.fidelity >= 1.0 - tol {
        EXIT_OK
    } else {
        EXIT_FAIL
    })
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code. Reports go to `stdout`, diagnostics to stderr.
pub fn execute<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(text.as_bytes());
                return EXIT_OK;
            }
            eprint!("{text}");
            return EXIT_USAGE;
        }
    };
    let tol = match tolerance_from_env() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let result = match &cli.command {
        Command::Run {
            protocol,
            input,
            output,
        } => cmd_run(protocol, input, output, tol, stdout),
        Command::Verify {
            max_sites,
            parity_assignment,
            output,
        } => cmd_verify(*max_sites, *parity_assignment, output, tol, stdout),
        Command::Trace {
            protocol,
            input,
            replay,
            output,
        } => cmd_trace(protocol, input, replay.as_deref(), output, tol, stdout),
        Command::Reference {
            scheme,
            trials,
            input,
            output,
        } => cmd_reference(*scheme, *trials, input, output, tol, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
