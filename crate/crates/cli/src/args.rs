use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "jgates", version, about = "Synthesize multiqubit gates as control-field loops")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for a control loop realizing a target gate.
    Synthesize(SynthesizeArgs),
    /// Re-evaluate a result file at a finer discretization.
    Verify(VerifyArgs),
    /// Write the time-domain control schedule of a result as CSV.
    Export(ExportArgs),
    /// List the built-in targets, or write one to a matrix file.
    Gates(GatesArgs),
    /// Compare edge counts of a direct loop and a two-qubit sequence.
    Cost(CostArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Simplex {
    Classical,
    Adaptive,
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    /// Built-in gate name (cnot, qft2, qft3, identity) or path to a matrix file.
    #[arg(long)]
    pub gate: String,
    /// Register size; inferred from the gate when omitted.
    #[arg(long)]
    pub qubits: Option<usize>,
    /// Adjustable polygon vertices (default 4 for two qubits, 12 for three).
    #[arg(long)]
    pub vertices: Option<usize>,
    /// Discretization points per edge.
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Objective evaluations per restart.
    #[arg(long)]
    pub max_evals: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Initial vertex coordinates are uniform in [-w, w].
    #[arg(long)]
    pub init_range: Option<f64>,
    /// Coupling constant C.
    #[arg(long, default_value_t = 1.0)]
    pub coupling: f64,
    /// Relative error at or below which the run succeeds.
    #[arg(long)]
    pub success_threshold: Option<f64>,
    /// Try every SU representative of the target and keep the best.
    #[arg(long)]
    pub scan_phase_roots: bool,
    /// SU representative to target when not scanning.
    #[arg(long, default_value_t = 0)]
    pub root_index: usize,
    /// Worker threads for edge evaluation; does not change the result.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Simplex coefficients (default: adaptive from three qubits on).
    #[arg(long, value_enum)]
    pub simplex: Option<Simplex>,
    /// Clamp every field coordinate to [-limit, limit].
    #[arg(long)]
    pub field_limit: Option<f64>,
    /// Skip the remaining restarts once one meets the threshold.
    #[arg(long)]
    pub stop_on_success: bool,
    #[arg(long, default_value = "result.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub result: PathBuf,
    /// Refined discretization is this many times the stored one.
    #[arg(long, default_value_t = 10)]
    pub points_multiplier: usize,
    /// Largest accepted change of the absolute error under refinement.
    #[arg(long, default_value_t = 1e-4)]
    pub drift_tolerance: f64,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    pub result: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub samples_per_edge: usize,
    #[arg(long, default_value = "schedule.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GatesArgs {
    /// Gate to write instead of listing.
    #[arg(long, requires = "out")]
    pub gate: Option<String>,
    /// Register size for `identity`.
    #[arg(long)]
    pub qubits: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CostArgs {
    #[arg(long, default_value_t = 3)]
    pub qubits: usize,
    /// Vertices of the direct loop.
    #[arg(long, default_value_t = 12)]
    pub vertices: usize,
    /// Number of two-qubit gates in the sequential construction.
    #[arg(long, default_value_t = 4)]
    pub two_qubit_gates: usize,
    /// Vertices per two-qubit loop.
    #[arg(long, default_value_t = 4)]
    pub two_qubit_vertices: usize,
}
