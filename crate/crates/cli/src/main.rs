mod args;

use args::{Cli, Command, CostArgs, ExportArgs, GatesArgs, Simplex, SynthesizeArgs, VerifyArgs};
use clap::Parser;
use josephson_gates::gates::{builtin_qubits, BUILTIN_NAMES};
use josephson_gates::schedule::verify_with_multiplier;
use josephson_gates::synthesis::{synthesize_over_roots, SynthesisResult};
use josephson_gates::{
    builtin_gate, cost_report, loop_to_schedule, read_matrix_file, read_result, synthesize,
    write_matrix_file, write_result, Error, RegisterModel, SynthesisConfig, TargetGate,
};
use log::info;
use std::path::Path;
use std::process::ExitCode;

const UNITARITY_LIMIT: f64 = 1e-10;
const DET_LIMIT: f64 = 1e-8;

/// Outcome of a command that ran to completion.
enum Status {
    Ok,
    /// Ran, but missed its acceptance threshold.
    Miss,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Synthesize(a) => cmd_synthesize(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Export(a) => cmd_export(a),
        Command::Gates(a) => cmd_gates(a),
        Command::Cost(a) => cmd_cost(a),
    };
    match outcome {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Miss) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool, Error> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::InvalidConfig("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    builder
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))
}

/// Resolves `--gate` to a target and the register size it acts on.
fn resolve_target(gate: &str, qubits: Option<usize>) -> Result<TargetGate, Error> {
    let path = Path::new(gate);
    if path.is_file() {
        let u = read_matrix_file(path)?;
        if let Some(n) = qubits {
            if n != u.n_qubits() {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: u.n_qubits(),
                });
            }
        }
        return TargetGate::from_unitary(gate, &u);
    }
    let n = match (builtin_qubits(gate), qubits) {
        (Some(n), None) => n,
        (_, Some(n)) => n,
        (None, None) if gate.eq_ignore_ascii_case("identity") => 2,
        (None, None) => return Err(Error::UnknownGate(gate.to_string())),
    };
    builtin_gate(gate, n)
}

fn synthesis_config(a: &SynthesizeArgs, n: usize) -> SynthesisConfig {
    let mut cfg = SynthesisConfig::for_qubits(n);
    cfg.m_points = a.points;
    cfg.seed = a.seed;
    cfg.stop_on_success = a.stop_on_success;
    cfg.field_limit = a.field_limit;
    if let Some(v) = a.vertices {
        cfg.n_vertices = v;
    }
    if let Some(r) = a.restarts {
        cfg.n_restarts = r;
    }
    if let Some(e) = a.max_evals {
        cfg.max_evals = e;
    }
    if let Some(w) = a.init_range {
        cfg.init_range = w;
    }
    if let Some(t) = a.success_threshold {
        cfg.success_threshold = t;
    }
    if let Some(s) = a.simplex {
        cfg.adaptive = matches!(s, Simplex::Adaptive);
    }
    cfg
}

fn cmd_synthesize(a: SynthesizeArgs) -> Result<Status, Error> {
    let target = resolve_target(&a.gate, a.qubits)?;
    let n = target.n_qubits();
    let model = RegisterModel::new(n, a.coupling)?;
    let cfg = synthesis_config(&a, n);
    cfg.validate(n)?;
    let target = target.with_root(a.root_index)?;
    let workers = pool(a.threads)?;
    info!("target {} on {n} qubits, coupling {}", target.name(), model.coupling());
    info!("seed {}", cfg.seed);
    info!("config {}", serde_json::to_string(&cfg).unwrap_or_default());

    let result = workers.install(|| {
        if a.scan_phase_roots {
            synthesize_over_roots(&model, &target, &cfg)
        } else {
            synthesize(&model, &target, &cfg)
        }
    })?;
    write_result(&a.out, &result)?;
    report_synthesis(&result, &a.out);
    Ok(if result.succeeded() { Status::Ok } else { Status::Miss })
}

fn report_synthesis(r: &SynthesisResult, out: &Path) {
    info!(
        "best: abs error {:.6e}, rel error {:.6e}",
        r.abs_error, r.rel_error
    );
    println!("gate            {} (root {})", r.target.name(), r.target.root_index());
    println!("abs_error       {:.6e}", r.abs_error);
    println!("rel_error       {:.6e}", r.rel_error);
    println!(
        "refined         {:.6e} at {} points per edge",
        r.refined_abs_error, r.refined_points
    );
    println!("evals           {}", r.evals_used);
    println!("best restart    {}", r.restart_index_of_best);
    println!(
        "status          {}",
        if r.succeeded() { "success" } else { "threshold missed" }
    );
    println!("result          {}", out.display());
}

fn cmd_verify(a: VerifyArgs) -> Result<Status, Error> {
    if a.drift_tolerance.is_nan() || a.drift_tolerance < 0.0 {
        return Err(Error::InvalidConfig("--drift-tolerance must be non-negative".into()));
    }
    let r = read_result(&a.result)?;
    let workers = pool(a.threads)?;
    let report = workers.install(|| {
        verify_with_multiplier(&r.model, &r.target, &r.best_loop, r.config.m_points, a.points_multiplier)
    })?;
    let n = r.model.n_qubits();
    let rel = |e: f64| josephson_gates::synthesis::relative_error(e, n);
    info!(
        "abs error {:.6e} (rel {:.6e}) at m = {}, {:.6e} (rel {:.6e}) at m = {}",
        report.abs_error_at_m,
        rel(report.abs_error_at_m),
        report.points,
        report.abs_error_at_refined,
        rel(report.abs_error_at_refined),
        report.refined_points
    );
    println!("abs_error_at_m        {:.6e}  (m = {})", report.abs_error_at_m, report.points);
    println!(
        "abs_error_at_refined  {:.6e}  (m = {})",
        report.abs_error_at_refined, report.refined_points
    );
    println!("drift                 {:.6e}", report.drift());
    println!("unitarity_residual    {:.6e}", report.unitarity_residual);
    println!("det_residual          {:.6e}", report.det_residual);
    let healthy = report.unitarity_residual < UNITARITY_LIMIT
        && report.det_residual < DET_LIMIT
        && report.drift() <= a.drift_tolerance;
    println!("status                {}", if healthy { "ok" } else { "out of tolerance" });
    Ok(if healthy { Status::Ok } else { Status::Miss })
}

fn cmd_export(a: ExportArgs) -> Result<Status, Error> {
    let r = read_result(&a.result)?;
    let schedule = loop_to_schedule(&r.best_loop, a.samples_per_edge)?;
    schedule.write_csv(&a.out)?;
    println!(
        "wrote {} rows over t in [0, {}] to {}",
        schedule.rows.len(),
        schedule.duration,
        a.out.display()
    );
    Ok(Status::Ok)
}

fn cmd_gates(a: GatesArgs) -> Result<Status, Error> {
    match (a.gate, a.out) {
        (Some(gate), Some(out)) => {
            let target = resolve_target(&gate, a.qubits)?;
            write_matrix_file(&out, target.matrix())?;
            println!("wrote {} ({}x{}) to {}", target.name(), target.dim(), target.dim(), out.display());
        }
        _ => {
            for name in BUILTIN_NAMES {
                let qubits = match builtin_qubits(name) {
                    Some(n) => n.to_string(),
                    None => "any".to_string(),
                };
                let phase = match name {
                    "cnot" => "exp(i pi/4) CNOT",
                    "qft2" => "exp(i pi/8) F_2",
                    "qft3" => "exp(-i pi/16) F_3",
                    _ => "I",
                };
                println!("{name:<10} qubits {qubits:<4} {phase}");
            }
        }
    }
    Ok(Status::Ok)
}

fn cmd_cost(a: CostArgs) -> Result<Status, Error> {
    let r = cost_report(a.qubits, a.vertices, a.two_qubit_gates, a.two_qubit_vertices);
    println!(
        "direct       {} vertices -> {} edges",
        r.direct_vertices, r.direct_edges
    );
    println!(
        "sequential   {} gates x {} edges -> {} edges",
        r.two_qubit_gates,
        r.two_qubit_vertices + 1,
        r.sequential_edges
    );
    println!("ratio        {:.4}", r.speedup);
    Ok(Status::Ok)
}
