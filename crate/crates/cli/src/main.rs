//! `lopsim` — simulate, verify and solve post-selected photonic gates.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lopsim::fock::Limits;
use lopsim::gates::{GateKind, Settings};
use lopsim::mesh::{Arm, Scheme};

/// Exit codes, stable for scripts.
pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VERIFY: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug)]
#[command(name = "lopsim", version, about = "Post-selected CZ/CCZ gates on MZI meshes")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output file; stdout when omitted. Written atomically.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Omit the wall-clock timestamp so identical runs give identical bytes.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Largest photon number any simulation may use.
    #[arg(long, global = true, default_value_t = Limits::default().photons)]
    photon_cap: usize,
    /// Largest mode count any simulation may use.
    #[arg(long, global = true, default_value_t = Limits::default().modes)]
    mode_cap: usize,
}

impl Common {
    fn limits(&self) -> Limits {
        Limits { photons: self.photon_cap, modes: self.mode_cap }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Random-input fidelity, success probability and truth table of a gate.
    Verify(VerifyArgs),
    /// Multi-start search for MZI settings satisfying the gate conditions.
    Solve(SolveArgs),
    /// Propagate a Fock or qubit input through a network file.
    Simulate(SimulateArgs),
    /// Two overlapping gates on a longer register; checks the phase pattern.
    Cascade(CascadeArgs),
    /// Write a gate network as JSON or its unitary as CSV.
    Export(ExportArgs),
    /// Phase-shifter drive for a target MZI transmittance.
    Calibrate(CalibrateArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GateArg {
    Cz,
    Cnot,
    Ccz,
    Toffoli,
}

impl From<GateArg> for GateKind {
    fn from(g: GateArg) -> Self {
        match g {
            GateArg::Cz => GateKind::Cz,
            GateArg::Cnot => GateKind::Cnot,
            GateArg::Ccz => GateKind::Ccz,
            GateArg::Toffoli => GateKind::Toffoli,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DiagonalGateArg {
    Cz,
    Ccz,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SchemeArg {
    Clements,
    Reck,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Clements => Scheme::Clements,
            SchemeArg::Reck => Scheme::Reck,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SettingsArg {
    Printed,
    Refined,
}

impl From<SettingsArg> for Settings {
    fn from(s: SettingsArg) -> Self {
        match s {
            SettingsArg::Printed => Settings::Printed,
            SettingsArg::Refined => Settings::Refined,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ProblemArg {
    Cz,
    Ccz,
    Tower,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ExportFormat {
    Json,
    #[value(name = "matrix_csv", alias = "matrix-csv")]
    MatrixCsv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ArmArg {
    Upper,
    Lower,
}

impl From<ArmArg> for Arm {
    fn from(a: ArmArg) -> Self {
        match a {
            ArmArg::Upper => Arm::Upper,
            ArmArg::Lower => Arm::Lower,
        }
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    gate: GateArg,
    #[arg(long, value_enum, default_value = "clements")]
    scheme: SchemeArg,
    #[arg(long, value_enum, default_value = "refined")]
    settings: SettingsArg,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Allowed `1 − F`; defaults to 1e-9 (refined) or 1e-4 (printed).
    #[arg(long)]
    tol: Option<f64>,
    /// Allowed deviation of `P_succ` from its reference value.
    #[arg(long, default_value_t = 1e-3)]
    p_tol: f64,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    problem: ProblemArg,
    /// Auxiliary photons for the tower problem.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
    #[arg(long, value_enum, default_value = "clements")]
    scheme: SchemeArg,
    #[arg(long, default_value_t = 200)]
    starts: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// JSON file of start points: `[t…]`, `[[t…], …]` or `{"t": [t…]}`.
    #[arg(long)]
    seed_file: Option<PathBuf>,
    /// Residual norm below which a start counts as converged.
    #[arg(long, default_value_t = lopsim::solver::ACCEPT_TOL)]
    tol: f64,
    /// Climb the success amplitude along the solution set after convergence.
    #[arg(long)]
    ascend: bool,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Network JSON, as written by `export --format json`.
    #[arg(long)]
    network: PathBuf,
    /// Occupation list, e.g. `1,1`.
    #[arg(long, conflicts_with = "qubits", required_unless_present = "qubits")]
    input: Option<String>,
    /// Basis bit string encoded in the dual-rail layout, e.g. `11`.
    #[arg(long)]
    qubits: Option<String>,
    /// Photons per auxiliary rail for `--qubits`.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    k: u32,
    /// Keep only structure-preserving outcomes and print the logical table.
    #[arg(long, requires = "qubits")]
    postselect: bool,
}

#[derive(Args, Debug)]
pub struct CascadeArgs {
    #[arg(long, value_enum)]
    gate: DiagonalGateArg,
    #[arg(long, value_enum, default_value = "clements")]
    scheme: SchemeArg,
    #[arg(long, value_enum, default_value = "refined")]
    settings: SettingsArg,
    /// Qubit groups in application order, e.g. `0,1 1,2`; defaults to two
    /// groups sharing one qubit.
    #[arg(long, num_args = 1..)]
    on: Vec<String>,
    /// Allowed deviation of each magnitude from its reference.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
}

#[derive(Args, Debug)]
pub struct ExportArgs {
    #[arg(long, value_enum)]
    gate: GateArg,
    #[arg(long, value_enum, default_value = "clements")]
    scheme: SchemeArg,
    #[arg(long, value_enum, default_value = "refined")]
    settings: SettingsArg,
    #[arg(long, value_enum, default_value = "json")]
    format: ExportFormat,
}

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    /// Target transmittance in [-1, 1].
    #[arg(long, allow_hyphen_values = true)]
    t: f64,
    /// Upper-arm phase at zero drive.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta1: f64,
    /// Lower-arm phase at zero drive.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta2: f64,
    #[arg(long, value_enum, default_value = "upper")]
    arm: ArmArg,
}

fn configure_threads() {
    if let Some(n) = std::env::var("LOPSIM_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Only fails if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    configure_threads();
    let result = match &cli.command {
        Command::Verify(a) => commands::verify(a, &cli.common),
        Command::Solve(a) => commands::solve(a, &cli.common),
        Command::Simulate(a) => commands::simulate(a, &cli.common),
        Command::Cascade(a) => commands::cascade(a, &cli.common),
        Command::Export(a) => commands::export(a, &cli.common),
        Command::Calibrate(a) => commands::calibrate(a, &cli.common),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
