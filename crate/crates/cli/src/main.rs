//! `qudit`: encode qudit operators onto qubits, synthesize and optimize
//! Trotter circuits, build conversion circuits, and price composite models.

mod commands;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "qudit", version, about = "Qudit-to-qubit encoding compiler")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the codeword of every level.
    Encode(EncodeArgs),
    /// Map a d-level operator to a Pauli sum.
    MapOp(MapOpArgs),
    /// Synthesize a Trotter circuit from a Pauli sum.
    Trotter(TrotterArgs),
    /// Run the peephole optimizer on a circuit.
    Optimize(OptimizeArgs),
    /// Build an encoding-conversion circuit.
    ConvertCircuit(ConvertCircuitArgs),
    /// Closed-form gate tallies of a conversion circuit.
    ConversionCost(ConversionCostArgs),
    /// CNOT upper bound for one transition with Hamming distance dH over K bits.
    Bounds(BoundsArgs),
    /// Upper bound and optimized count for one operator.
    BoundsOp(BoundsOpArgs),
    /// Price a composite model under the five encoding schemes.
    Report(ReportArgs),
    /// Check a circuit against the Trotter product (or exponential) of a Pauli sum.
    SimulateCheck(SimulateCheckArgs),
    /// Write a circuit as OpenQASM 2.0.
    ExportQasm(ExportQasmArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum EncArg {
    Sb,
    Gray,
    Unary,
    Bu,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalArg {
    Sb,
    Gray,
}

#[derive(Args, Debug, Clone)]
pub struct EncodingArgs {
    #[arg(long, value_enum)]
    pub enc: EncArg,
    #[arg(long)]
    pub d: usize,
    /// Block size (block unary only).
    #[arg(long)]
    pub g: Option<usize>,
    /// Code inside each block (block unary only).
    #[arg(long, value_enum)]
    pub local: Option<LocalArg>,
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub encoding: EncodingArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MapOpArgs {
    #[command(flatten)]
    pub encoding: EncodingArgs,
    /// Operator name: a, adag, q, p, q2, p2, n, n2, n_nminus1, sx, sy, sz, x_fq, b, dense.
    #[arg(long, conflicts_with = "matrix")]
    pub op: Option<String>,
    /// JSON matrix: rows of [re, im] pairs.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Rebuild a bosonic operator at the next power-of-two truncation first.
    #[arg(long)]
    pub augment: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrotterArgs {
    #[arg(long)]
    pub pauli: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    /// Number of Trotter steps; each uses theta / steps.
    #[arg(long, default_value_t = 1)]
    pub steps: usize,
    /// Optimize the result.
    #[arg(long)]
    pub optimize: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub qasm: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PassArgs {
    #[arg(long)]
    pub no_cancel: bool,
    #[arg(long)]
    pub no_merge: bool,
    #[arg(long)]
    pub no_triple: bool,
    #[arg(long, default_value_t = 50)]
    pub max_sweeps: usize,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    #[command(flatten)]
    pub passes: PassArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ConvertCircuitArgs {
    /// sb2gray, gray2sb, sb2unary, unary2sb or sb2bu.
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub qasm: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecomposeArg {
    None,
    CliffordT,
}

#[derive(Args, Debug)]
pub struct ConversionCostArgs {
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub d: usize,
    #[arg(long, value_enum, default_value = "none")]
    pub decompose: DecomposeArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long = "dH")]
    pub d_h: usize,
    #[arg(long = "K")]
    pub k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundsOpArgs {
    #[command(flatten)]
    pub encoding: EncodingArgs,
    #[arg(long)]
    pub op: String,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    #[arg(long)]
    pub model: String,
    /// Levels: a value, a list `4,8,16` or an inclusive range `4..16`.
    #[arg(long, conflicts_with = "s")]
    pub d: Option<String>,
    /// Spins (Heisenberg): a value, a list or a range stepped by 1/2.
    #[arg(long)]
    pub s: Option<String>,
    /// Sites or modes (default 3, or 4 for Franck-Condon).
    #[arg(long)]
    pub n: Option<usize>,
    /// TOML file with model parameters.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `all` or a comma list of scheme names.
    #[arg(long, default_value = "all")]
    pub schemes: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceArg {
    Trotter,
    Exact,
}

#[derive(Args, Debug)]
pub struct SimulateCheckArgs {
    #[arg(long)]
    pub pauli: PathBuf,
    #[arg(long)]
    pub circuit: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "trotter")]
    pub reference: ReferenceArg,
    /// Ignore a global phase difference.
    #[arg(long)]
    pub up_to_phase: bool,
}

#[derive(Args, Debug)]
pub struct ExportQasmArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Outcome of a successful run; `Fail` maps to exit code 1.
pub enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
