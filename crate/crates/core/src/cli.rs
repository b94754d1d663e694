//! Command-line front end.
//!
//! ```text
//! maskcorr verify --scenario <all|masking|recovery-xy|recovery-xz|recovery-yz|exclusivity|dispatch|nosignal>
//!                 [--trials N] [--tol T] [--seed S] [--format text|json] [--details]
//! maskcorr demo mask     (--state re0,im0,re1,im1 | --state-file F) [--out F]
//! maskcorr demo decode   --pair xy|xz|yz (--state ... | --state-file F) [--out F]
//! maskcorr demo dispatch --theta T --phi P (--state ... | --state-file F) [--out F]
//! maskcorr demo teleport (--state ... | --state-file F) [--seed S]
//! ```
//!
//! Exit status: 0 when every check passes, 1 when any check fails, 2 on
//! usage errors. `MASKCORR_SEED` supplies the seed when `--seed` is absent.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use crate::error::{Error, Result};
use crate::io::{density_to_json, state_to_json, StateFile};
use crate::linalg::{ComplexMatrix, ComplexScalar};
use crate::masking::{decode, mask, reduced_pair, reduced_system, PairId, System, QUBIT_A};
use crate::report::{all_pass, render_text, reports_to_json};
use crate::scenarios::{run_scenarios, teleportation_demo, BellOutcome, Scenario, SuiteConfig};
use crate::state::{clamp_fidelity, DensityMatrix, MeasurementBasis, StateVector};

pub const SEED_ENV: &str = "MASKCORR_SEED";
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TRIALS: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-10;

/// Inline states within this distance of unit norm are rescaled; anything
/// further off is rejected.
pub const NORMALIZATION_SLACK: f64 = 1e-6;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "maskcorr",
    version,
    about = "Verify three-partite quantum information masking"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run verification scenarios and print a report.
    Verify(VerifyArgs),
    /// Walk through a single mask/decode/dispatch/teleport flow.
    #[command(subcommand)]
    Demo(DemoCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    All,
    Masking,
    RecoveryXy,
    RecoveryXz,
    RecoveryYz,
    Exclusivity,
    Dispatch,
    Nosignal,
}

impl ScenarioArg {
    pub fn scenarios(self) -> Vec<Scenario> {
        match self {
            ScenarioArg::All => Scenario::ALL.to_vec(),
            ScenarioArg::Masking => vec![Scenario::Masking],
            ScenarioArg::RecoveryXy => vec![Scenario::Recovery(PairId::XY)],
            ScenarioArg::RecoveryXz => vec![Scenario::Recovery(PairId::XZ)],
            ScenarioArg::RecoveryYz => vec![Scenario::Recovery(PairId::YZ)],
            ScenarioArg::Exclusivity => vec![Scenario::Exclusivity],
            ScenarioArg::Dispatch => vec![Scenario::Dispatch],
            ScenarioArg::Nosignal => vec![Scenario::NoSignaling],
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub scenario: ScenarioArg,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Include per-trial records in JSON output.
    #[arg(long)]
    pub details: bool,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// Inline single-qubit state `re0,im0,re1,im1`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "state_file")]
    pub state: Option<String>,
    /// Single-qubit state file in the JSON state format.
    #[arg(long)]
    pub state_file: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write the resulting state here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum DemoCommand {
    /// Encode a qubit and show the masked register.
    Mask(StateArgs),
    /// Mask a qubit, keep only one pair of systems and decode from it.
    Decode {
        #[arg(long)]
        pair: PairId,
        #[command(flatten)]
        state: StateArgs,
    },
    /// Mask, measure A and discard the outcome, then decode from Y and Z.
    Dispatch {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        phi: f64,
        #[command(flatten)]
        state: StateArgs,
    },
    /// Standard teleportation, for contrast.
    Teleport {
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        state: StateArgs,
    },
}

/// Process-level failure carrying its exit status.
#[derive(Debug)]
struct Exit {
    code: i32,
    message: String,
}

impl Exit {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        Self {
            code: EXIT_FAIL,
            message: e.to_string(),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, env_seed: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Verify(args) => cmd_verify(&args, env_seed, out),
        Command::Demo(demo) => cmd_demo(&demo, env_seed, out),
    };
    match result {
        Ok(code) => code,
        Err(exit) => {
            let _ = writeln!(err, "maskcorr: {}", exit.message);
            exit.code
        }
    }
}

fn resolve_seed(flag: Option<u64>, env_seed: Option<&str>) -> std::result::Result<u64, Exit> {
    match (flag, env_seed) {
        (Some(s), _) => Ok(s),
        (None, Some(raw)) => raw
            .trim()
            .parse()
            .map_err(|_| Exit::usage(format!("{SEED_ENV}={raw:?} is not an unsigned integer"))),
        (None, None) => Ok(DEFAULT_SEED),
    }
}

fn check_tol(tol: f64) -> std::result::Result<(), Exit> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Exit::usage(format!("--tol must be positive, got {tol}")))
    }
}

fn cmd_verify(
    args: &VerifyArgs,
    env_seed: Option<&str>,
    out: &mut dyn Write,
) -> std::result::Result<i32, Exit> {
    let seed = resolve_seed(args.seed, env_seed)?;
    check_tol(args.tol)?;
    let scenarios = args.scenario.scenarios();
    for s in &scenarios {
        if args.trials < s.min_trials() {
            return Err(Exit::usage(format!(
                "scenario {} needs --trials >= {}",
                s.name(),
                s.min_trials()
            )));
        }
    }
    let config = SuiteConfig {
        trials: args.trials,
        tol: args.tol,
        seed,
    };
    let mut reports = run_scenarios(&scenarios, &config);
    if !(args.details && args.format == Format::Json) {
        reports = reports.iter().map(|r| r.summary()).collect();
    }
    let rendered = match args.format {
        Format::Json => reports_to_json(&reports)?,
        Format::Text => render_text(&reports),
    };
    write_out(out, &rendered)?;
    Ok(if all_pass(&reports) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    })
}

fn write_out(out: &mut dyn Write, text: &str) -> std::result::Result<(), Exit> {
    out.write_all(text.as_bytes())
        .map_err(|e| Exit::from(Error::Io(e)))
}

/// Accepts a nonzero single-qubit state within [`NORMALIZATION_SLACK`] of
/// unit norm and rescales it exactly.
pub fn normalize_input(amplitudes: Vec<ComplexScalar>) -> Result<StateVector> {
    if amplitudes.len() != 2 {
        return Err(Error::InvalidState(format!(
            "expected a single-qubit state, got {} amplitudes",
            amplitudes.len()
        )));
    }
    let norm = ComplexMatrix::column(amplitudes.clone()).norm();
    if !norm.is_finite() || norm == 0.0 {
        return Err(Error::InvalidState("state is not normalizable".into()));
    }
    if (norm - 1.0).abs() > NORMALIZATION_SLACK {
        return Err(Error::InvalidState(format!(
            "state norm {norm} is not within {NORMALIZATION_SLACK:e} of 1"
        )));
    }
    StateVector::normalized(amplitudes)
}

/// Parses `re0,im0,re1,im1`.
pub fn parse_inline_state(text: &str) -> Result<StateVector> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::InvalidState(format!(
            "expected four comma-separated reals, got {}",
            parts.len()
        )));
    }
    let values = parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidState(format!("{p:?} is not a finite real")))
        })
        .collect::<Result<Vec<f64>>>()?;
    normalize_input(vec![
        Complex64::new(values[0], values[1]),
        Complex64::new(values[2], values[3]),
    ])
}

fn load_state(args: &StateArgs) -> std::result::Result<StateVector, Exit> {
    let parsed = match (&args.state, &args.state_file) {
        (Some(inline), None) => parse_inline_state(inline),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(Error::from)
            .and_then(|text| StateFile::parse(&text))
            .and_then(|file| normalize_input(file.complex_amplitudes())),
        (None, None) => return Err(Exit::usage("one of --state or --state-file is required")),
        (Some(_), Some(_)) => return Err(Exit::usage("--state and --state-file are exclusive")),
    };
    parsed.map_err(|e| Exit::usage(e.to_string()))
}

fn fmt_c(z: ComplexScalar) -> String {
    format!("{:+.6}{:+.6}i", z.re, z.im)
}

fn fmt_density(rho: &DensityMatrix) -> String {
    let m = rho.matrix();
    (0..m.rows())
        .map(|r| {
            let row: Vec<String> = (0..m.cols()).map(|c| fmt_c(m[(r, c)])).collect();
            format!("  [{}]", row.join(", "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn pairs_json(entries: &[ComplexScalar]) -> serde_json::Value {
    entries.iter().map(|z| json!([z.re, z.im])).collect()
}

fn emit(
    out: &mut dyn Write,
    format: Format,
    text: String,
    value: serde_json::Value,
) -> std::result::Result<(), Exit> {
    match format {
        Format::Text => write_out(out, &text),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&value).map_err(Error::from)?;
            s.push('\n');
            write_out(out, &s)
        }
    }
}

fn write_file(path: &Option<PathBuf>, contents: String) -> std::result::Result<(), Exit> {
    if let Some(p) = path {
        std::fs::write(p, contents).map_err(|e| Exit::from(Error::Io(e)))?;
    }
    Ok(())
}

fn verdict(fidelity: f64, tol: f64) -> i32 {
    if (1.0 - fidelity).abs() <= tol {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn cmd_demo(
    demo: &DemoCommand,
    env_seed: Option<&str>,
    out: &mut dyn Write,
) -> std::result::Result<i32, Exit> {
    match demo {
        DemoCommand::Mask(args) => demo_mask(args, out),
        DemoCommand::Decode { pair, state } => demo_decode(*pair, state, out),
        DemoCommand::Dispatch { theta, phi, state } => {
            demo_dispatch(MeasurementBasis::new(*theta, *phi), state, out)
        }
        DemoCommand::Teleport { seed, state } => {
            demo_teleport(resolve_seed(*seed, env_seed)?, state, out)
        }
    }
}

fn demo_mask(args: &StateArgs, out: &mut dyn Write) -> std::result::Result<i32, Exit> {
    check_tol(args.tol)?;
    let psi = load_state(args)?;
    let gamma = mask(&psi)?;
    let rho = gamma.to_density();

    let mut text = format!(
        "input: {} |0> {} |1>\nmasked register (A,S1,N1,S2,N2), nonzero amplitudes:\n",
        fmt_c(psi.amplitude(0)),
        fmt_c(psi.amplitude(1))
    );
    for k in 0..gamma.dim() {
        let a = gamma.amplitude(k);
        if a.norm() > 1e-15 {
            text.push_str(&format!("  |{:05b}>  {}\n", k, fmt_c(a)));
        }
    }
    let mut reduced = serde_json::Map::new();
    for system in System::ALL {
        let r = reduced_system(&rho, system)?;
        text.push_str(&format!(
            "reduced state of {system}:\n{}\n",
            fmt_density(&r)
        ));
        reduced.insert(system.to_string(), pairs_json(r.matrix().entries()));
    }
    write_file(&args.out, state_to_json(&gamma))?;
    let value = json!({
        "input": pairs_json(psi.amplitudes().entries()),
        "num_qubits": gamma.num_qubits(),
        "amplitudes": pairs_json(gamma.amplitudes().entries()),
        "reduced": reduced,
    });
    emit(out, args.format, text, value)?;
    Ok(EXIT_PASS)
}

fn demo_decode(
    pair: PairId,
    args: &StateArgs,
    out: &mut dyn Write,
) -> std::result::Result<i32, Exit> {
    check_tol(args.tol)?;
    let psi = load_state(args)?;
    let rho = mask(&psi)?.to_density();
    let decoded = decode(pair, &reduced_pair(&rho, pair)?)?;
    let f = clamp_fidelity(decoded.recovered.fidelity_pure(&psi)?);
    let text = format!(
        "pair {pair}: decoded from the reduced state of {:?}, output on qubit {}\nrecovered state:\n{}\nfidelity: {f:.10}\n",
        pair.qubits(),
        pair.output_qubit(),
        fmt_density(&decoded.recovered),
    );
    write_file(&args.out, density_to_json(&decoded.recovered))?;
    let value = json!({
        "pair": pair.name(),
        "output_qubit": pair.output_qubit(),
        "recovered": pairs_json(decoded.recovered.matrix().entries()),
        "fidelity": f,
    });
    emit(out, args.format, text, value)?;
    Ok(verdict(f, args.tol))
}

fn demo_dispatch(
    basis: MeasurementBasis,
    args: &StateArgs,
    out: &mut dyn Write,
) -> std::result::Result<i32, Exit> {
    check_tol(args.tol)?;
    let psi = load_state(args)?;
    let measured = mask(&psi)?.to_density().measure_discard(QUBIT_A, &basis)?;
    let yz = decode(PairId::YZ, &reduced_pair(&measured, PairId::YZ)?)?;
    let f_yz = clamp_fidelity(yz.recovered.fidelity_pure(&psi)?);
    let xy = decode(PairId::XY, &measured)?;
    let f_xy = clamp_fidelity(xy.recovered.fidelity_pure(&psi)?);
    let text = format!(
        "measured A in basis theta={} phi={} and discarded the outcome\nYZ-decoded state on S1:\n{}\nYZ fidelity: {f_yz:.10}\nXY fidelity after dispatch (diagnostic): {f_xy:.10}\n",
        basis.theta,
        basis.phi,
        fmt_density(&yz.recovered),
    );
    write_file(&args.out, density_to_json(&yz.recovered))?;
    let value = json!({
        "theta": basis.theta,
        "phi": basis.phi,
        "recovered": pairs_json(yz.recovered.matrix().entries()),
        "fidelity": f_yz,
        "xy_fidelity_after_dispatch": f_xy,
    });
    emit(out, args.format, text, value)?;
    Ok(verdict(f_yz, args.tol))
}

fn demo_teleport(
    seed: u64,
    args: &StateArgs,
    out: &mut dyn Write,
) -> std::result::Result<i32, Exit> {
    check_tol(args.tol)?;
    let psi = load_state(args)?;
    let rec = teleportation_demo(&psi, seed)?;
    let mut text = format!(
        "receiver state averaged over outcomes, before correction:\n{}\n",
        fmt_density(&rec.pre_correction_bob)
    );
    for (k, outcome) in BellOutcome::ALL.iter().enumerate() {
        text.push_str(&format!(
            "outcome {:<4}  p={:.6}  corrected fidelity {:.10}\n",
            outcome.name(),
            rec.outcome_probabilities[k],
            rec.per_outcome_fidelity[k]
        ));
    }
    text.push_str(&format!(
        "average corrected fidelity: {:.10}\nsampled outcome (seed {seed}): {}\n",
        rec.average_post_fidelity,
        rec.sampled_outcome.name()
    ));
    write_file(&args.out, density_to_json(&rec.sampled_bob))?;
    let value = json!({
        "seed": seed,
        "pre_correction_bob": pairs_json(rec.pre_correction_bob.matrix().entries()),
        "outcomes": BellOutcome::ALL.iter().map(|o| o.name()).collect::<Vec<_>>(),
        "outcome_probabilities": rec.outcome_probabilities,
        "per_outcome_fidelity": rec.per_outcome_fidelity,
        "average_post_fidelity": rec.average_post_fidelity,
        "sampled_outcome": rec.sampled_outcome.name(),
    });
    emit(out, args.format, text, value)?;
    let mixed = DensityMatrix::maximally_mixed(1);
    let pre_ok = rec.pre_correction_bob.max_abs_diff(&mixed)? <= args.tol;
    let fid_ok = rec
        .per_outcome_fidelity
        .iter()
        .all(|&f| verdict(f, args.tol) == EXIT_PASS);
    Ok(if pre_ok && fid_ok {
        EXIT_PASS
    } else {
        EXIT_FAIL
    })
}
