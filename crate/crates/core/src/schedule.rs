//! Time-domain control schedules, post-synthesis verification, edge-count
//! cost comparison, and the result file format.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{MatrixDocument, TargetGate};
use crate::register::{propagate_loop, ControlLoop, ControlVertex, RegisterModel};
use crate::serial;
use crate::synthesis::{error_functional, relative_error, SynthesisConfig, SynthesisResult};

pub const DEFAULT_SAMPLES_PER_EDGE: usize = 50;

/// One sample of the field trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleRow {
    pub t: f64,
    pub bz: Vec<f64>,
    pub bx: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControlSchedule {
    pub n_qubits: usize,
    pub duration: f64,
    pub rows: Vec<ScheduleRow>,
}

/// Samples the piecewise-linear trajectory `samples_per_edge` times per
/// edge, endpoints included; breakpoints shared by two edges appear once.
pub fn loop_to_schedule(control: &ControlLoop, samples_per_edge: usize) -> Result<ControlSchedule> {
    if samples_per_edge < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 samples per edge, got {samples_per_edge}"
        )));
    }
    let n = control.n_qubits();
    let corners = control.corners();
    let last = samples_per_edge - 1;
    let mut rows = Vec::with_capacity(control.n_edges() * last + 1);
    for (e, pair) in corners.windows(2).enumerate() {
        let (start, end) = (&pair[0], &pair[1]);
        let first = if e == 0 { 0 } else { 1 };
        for s in first..=last {
            let row = if s == last {
                ScheduleRow {
                    t: (e + 1) as f64,
                    bz: end.bz().to_vec(),
                    bx: end.bx().to_vec(),
                }
            } else {
                let frac = s as f64 / last as f64;
                let lerp = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(&x, &y)| x + frac * (y - x)).collect();
                ScheduleRow {
                    t: e as f64 + frac,
                    bz: lerp(start.bz(), end.bz()),
                    bx: lerp(start.bx(), end.bx()),
                }
            };
            rows.push(row);
        }
    }
    Ok(ControlSchedule {
        n_qubits: n,
        duration: control.duration(),
        rows,
    })
}

impl ControlSchedule {
    pub fn header(n_qubits: usize) -> Vec<String> {
        std::iter::once("t".to_string())
            .chain((1..=n_qubits).map(|i| format!("bz{i}")))
            .chain((1..=n_qubits).map(|i| format!("bx{i}")))
            .collect()
    }

    /// Comma-separated text with header `t,bz1..bzN,bx1..bxN`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(Self::header(self.n_qubits))?;
        for row in &self.rows {
            let fields = std::iter::once(row.t)
                .chain(row.bz.iter().copied())
                .chain(row.bx.iter().copied())
                .map(serial::fmt_f64);
            w.write_record(fields)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header.len() < 3 || header.len().is_multiple_of(2) {
            return Err(Error::Parse(format!("bad schedule header {header:?}")));
        }
        let n = (header.len() - 1) / 2;
        if header != Self::header(n) {
            return Err(Error::Parse(format!("bad schedule header {header:?}")));
        }
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let vals = rec
                .iter()
                .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            if vals.len() != 2 * n + 1 {
                return Err(Error::DimensionMismatch {
                    expected: 2 * n + 1,
                    found: vals.len(),
                });
            }
            rows.push(ScheduleRow {
                t: vals[0],
                bz: vals[1..=n].to_vec(),
                bx: vals[n + 1..].to_vec(),
            });
        }
        let duration = rows.last().map_or(0.0, |r| r.t);
        Ok(Self {
            n_qubits: n,
            duration,
            rows,
        })
    }

    /// Rebuilds the polygon from the rows at integer times `1..duration-1`.
    pub fn breakpoints(&self) -> Result<ControlLoop> {
        let edges = self.duration.round() as usize;
        let mut vertices = Vec::with_capacity(edges.saturating_sub(1));
        for k in 1..edges {
            let row = self
                .rows
                .iter()
                .find(|r| r.t == k as f64)
                .ok_or_else(|| Error::Parse(format!("no schedule sample at t = {k}")))?;
            vertices.push(ControlVertex::new(row.bz.clone(), row.bx.clone())?);
        }
        ControlLoop::new(self.n_qubits, vertices)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub points: usize,
    pub refined_points: usize,
    pub abs_error_at_m: f64,
    pub abs_error_at_refined: f64,
    pub unitarity_residual: f64,
    pub det_residual: f64,
}

impl VerificationReport {
    pub fn drift(&self) -> f64 {
        (self.abs_error_at_m - self.abs_error_at_refined).abs()
    }
}

/// Error at `m` and `10 m` points per edge plus the residuals of the
/// `m`-point propagator.
pub fn verify(model: &RegisterModel, target: &TargetGate, control: &ControlLoop, m: usize) -> Result<VerificationReport> {
    verify_with_multiplier(model, target, control, m, 10)
}

pub fn verify_with_multiplier(
    model: &RegisterModel,
    target: &TargetGate,
    control: &ControlLoop,
    m: usize,
    multiplier: usize,
) -> Result<VerificationReport> {
    if multiplier == 0 {
        return Err(Error::InvalidConfig("points multiplier must be positive".into()));
    }
    let u = propagate_loop(model, control, m)?;
    let refined_points = m * multiplier;
    Ok(VerificationReport {
        points: m,
        refined_points,
        abs_error_at_m: target.matrix().distance(&u),
        abs_error_at_refined: error_functional(model, target, control, refined_points)?,
        unitarity_residual: u.unitarity_residual(),
        det_residual: u.det_residual(),
    })
}

/// Operation time of one direct multiqubit loop against a sequence of
/// two-qubit loops, counted in unit-time edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub n_qubits: usize,
    pub direct_vertices: usize,
    pub direct_edges: usize,
    pub two_qubit_gates: usize,
    pub two_qubit_vertices: usize,
    pub sequential_edges: usize,
    /// `sequential_edges / direct_edges`
    pub speedup: f64,
}

pub fn cost_report(
    n_qubits: usize,
    direct_vertices: usize,
    two_qubit_gates: usize,
    two_qubit_vertices: usize,
) -> CostReport {
    let direct_edges = direct_vertices + 1;
    let sequential_edges = two_qubit_gates * (two_qubit_vertices + 1);
    CostReport {
        n_qubits,
        direct_vertices,
        direct_edges,
        two_qubit_gates,
        two_qubit_vertices,
        sequential_edges,
        speedup: sequential_edges as f64 / direct_edges as f64,
    }
}

const RESULT_FORMAT: &str = "josephson-gates-result";
const RESULT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TargetDescriptor {
    name: String,
    root_index: usize,
    #[serde(flatten)]
    matrix: MatrixDocument,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ResultDocument {
    format: String,
    version: u32,
    n_qubits: usize,
    coupling: f64,
    nu: usize,
    m: usize,
    seed: u64,
    config: SynthesisConfig,
    target: TargetDescriptor,
    /// One row per vertex: `[bz_1..bz_N, bx_1..bx_N]`.
    vertices: Vec<Vec<f64>>,
    abs_error: f64,
    rel_error: f64,
    refined_points: usize,
    refined_abs_error: f64,
    evals_used: usize,
    restart_index_of_best: usize,
    restart_errors: Vec<f64>,
}

impl ResultDocument {
    fn from_result(r: &SynthesisResult) -> Self {
        Self {
            format: RESULT_FORMAT.into(),
            version: RESULT_VERSION,
            n_qubits: r.model.n_qubits(),
            coupling: r.model.coupling(),
            nu: r.config.n_vertices,
            m: r.config.m_points,
            seed: r.config.seed,
            config: r.config.clone(),
            target: TargetDescriptor {
                name: r.target.name().to_string(),
                root_index: r.target.root_index(),
                matrix: MatrixDocument::from_unitary(r.target.matrix()),
            },
            vertices: r.best_loop.vertices().iter().map(|v| v.coords().collect()).collect(),
            abs_error: r.abs_error,
            rel_error: r.rel_error,
            refined_points: r.refined_points,
            refined_abs_error: r.refined_abs_error,
            evals_used: r.evals_used,
            restart_index_of_best: r.restart_index_of_best,
            restart_errors: r.restart_errors.clone(),
        }
    }

    fn into_result(self) -> Result<SynthesisResult> {
        if self.format != RESULT_FORMAT {
            return Err(Error::Parse(format!("not a result file (format `{}`)", self.format)));
        }
        if self.version != RESULT_VERSION {
            return Err(Error::Parse(format!("unsupported result version {}", self.version)));
        }
        let model = RegisterModel::new(self.n_qubits, self.coupling)?;
        if self.nu != self.vertices.len() || self.nu != self.config.n_vertices {
            return Err(Error::DimensionMismatch {
                expected: self.nu,
                found: self.vertices.len(),
            });
        }
        if self.m != self.config.m_points || self.seed != self.config.seed {
            return Err(Error::Parse("top-level m/seed disagree with config".into()));
        }
        let vertices = self
            .vertices
            .iter()
            .map(|row| {
                if row.len() != 2 * self.n_qubits {
                    return Err(Error::DimensionMismatch {
                        expected: 2 * self.n_qubits,
                        found: row.len(),
                    });
                }
                ControlVertex::from_slice(row)
            })
            .collect::<Result<Vec<_>>>()?;
        let best_loop = ControlLoop::new(self.n_qubits, vertices)?;
        let matrix = self.target.matrix.to_unitary()?;
        if matrix.dim() != model.dim() {
            return Err(Error::DimensionMismatch {
                expected: model.dim(),
                found: matrix.dim(),
            });
        }
        let target = TargetGate::new(self.target.name, self.target.root_index, matrix)?;
        Ok(SynthesisResult {
            model,
            target,
            config: self.config,
            best_loop,
            abs_error: self.abs_error,
            rel_error: self.rel_error,
            refined_points: self.refined_points,
            refined_abs_error: self.refined_abs_error,
            evals_used: self.evals_used,
            restart_index_of_best: self.restart_index_of_best,
            restart_errors: self.restart_errors,
        })
    }
}

/// Serialized result exactly as [`write_result`] stores it.
pub fn result_to_string(result: &SynthesisResult) -> Result<String> {
    serial::to_string(&ResultDocument::from_result(result))
}

pub fn result_from_str(text: &str) -> Result<SynthesisResult> {
    let doc: ResultDocument = serde_json::from_str(text)?;
    doc.into_result()
}

pub fn write_result(path: impl AsRef<Path>, result: &SynthesisResult) -> Result<()> {
    std::fs::write(path, result_to_string(result)?)?;
    Ok(())
}

pub fn read_result(path: impl AsRef<Path>) -> Result<SynthesisResult> {
    result_from_str(&std::fs::read_to_string(path)?)
}

/// Result record for a loop that was not produced by a search, e.g. one
/// assembled by hand or imported from a schedule.
pub fn evaluate_loop(
    model: &RegisterModel,
    target: &TargetGate,
    control: &ControlLoop,
    config: &SynthesisConfig,
) -> Result<SynthesisResult> {
    let abs_error = error_functional(model, target, control, config.m_points)?;
    let refined_points = config.m_points * 10;
    Ok(SynthesisResult {
        model: *model,
        target: target.clone(),
        config: SynthesisConfig {
            n_vertices: control.n_vertices(),
            ..config.clone()
        },
        best_loop: control.clone(),
        abs_error,
        rel_error: relative_error(abs_error, model.n_qubits()),
        refined_points,
        refined_abs_error: error_functional(model, target, control, refined_points)?,
        evals_used: 0,
        restart_index_of_best: 0,
        restart_errors: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::builtin_gate;
    use crate::synthesis::unpack;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_loop(n: usize, nu: usize, seed: u64) -> ControlLoop {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..2 * n * nu).map(|_| rng.random_range(-2.0..2.0)).collect();
        unpack(&x, n, nu).unwrap()
    }

    #[test]
    fn zero_loop_schedule() {
        let s = loop_to_schedule(&ControlLoop::zeros(2, 4), 50).unwrap();
        assert_eq!(s.duration, 5.0);
        assert_eq!(s.rows.len(), 5 * 50 - 4);
        assert!(s.rows.iter().all(|r| r.bz.iter().chain(&r.bx).all(|&v| v == 0.0)));
        assert!(loop_to_schedule(&ControlLoop::zeros(2, 4), 1).is_err());
    }

    #[test]
    fn single_vertex_geometry() {
        let v = ControlVertex::new(vec![0.7], vec![-1.3]).unwrap();
        let lp = ControlLoop::new(1, vec![v.clone()]).unwrap();
        let s = loop_to_schedule(&lp, 5).unwrap();
        let at = |t: f64| s.rows.iter().find(|r| r.t == t).unwrap();
        assert_eq!(at(1.0).bz, v.bz());
        assert_eq!(at(1.0).bx, v.bx());
        assert_eq!(at(0.0).bz, vec![0.0]);
        assert_eq!(at(2.0).bx, vec![0.0]);
        assert_eq!(s.rows.len(), 2 * 5 - 1);
    }

    #[test]
    fn schedule_is_linear_between_breakpoints() {
        let lp = random_loop(3, 5, 11);
        let spe = 9;
        let s = loop_to_schedule(&lp, spe).unwrap();
        let first = s.rows.first().unwrap();
        let last = s.rows.last().unwrap();
        assert!(first.bz.iter().chain(&first.bx).all(|&v| v == 0.0));
        assert!(last.bz.iter().chain(&last.bx).all(|&v| v == 0.0));
        for e in 0..lp.n_edges() {
            let base = e * (spe - 1);
            for i in base + 1..base + spe - 1 {
                let (a, b, c) = (&s.rows[i - 1], &s.rows[i], &s.rows[i + 1]);
                for q in 0..3 {
                    assert!((b.bz[q] - 0.5 * (a.bz[q] + c.bz[q])).abs() < 1e-12);
                    assert!((b.bx[q] - 0.5 * (a.bx[q] + c.bx[q])).abs() < 1e-12);
                }
            }
        }
        assert_eq!(s.breakpoints().unwrap(), lp);
    }

    #[test]
    fn csv_round_trip_recovers_vertices() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let lp = random_loop(2, 4, 3);
        let s = loop_to_schedule(&lp, 50).unwrap();
        s.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("t,bz1,bz2,bx1,bx2\n"));
        let back = ControlSchedule::read_csv(&path).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.breakpoints().unwrap(), lp);
    }

    #[test]
    fn verify_zero_loop_identity() {
        let model = RegisterModel::with_unit_coupling(2).unwrap();
        let id = builtin_gate("identity", 2).unwrap();
        let r = verify(&model, &id, &ControlLoop::zeros(2, 4), 100).unwrap();
        assert!(r.abs_error_at_m < 1e-12);
        assert!(r.abs_error_at_refined < 1e-12);
        assert!(r.unitarity_residual < 1e-12);
        assert!(r.det_residual < 1e-12);
        assert_eq!(r.refined_points, 1000);
    }

    #[test]
    fn verify_random_loop_residuals() {
        let model = RegisterModel::with_unit_coupling(3).unwrap();
        let q = builtin_gate("qft3", 3).unwrap();
        let r = verify_with_multiplier(&model, &q, &random_loop(3, 3, 5), 20, 2).unwrap();
        assert!(r.unitarity_residual < 1e-10);
        assert!(r.det_residual < 1e-8);
        assert!(r.drift() >= 0.0);
    }

    #[test]
    fn cost_report_direct_vs_sequential() {
        let direct = cost_report(3, 12, 4, 4);
        assert_eq!(direct.direct_edges, 13);
        assert_eq!(direct.sequential_edges, 20);
        assert!((direct.speedup - 20.0 / 13.0).abs() < 1e-15);
        assert_eq!(cost_report(2, 0, 1, 0).direct_edges, 1);
        assert_eq!(cost_report(2, 0, 1, 0).sequential_edges, 1);
    }

    fn sample_result() -> SynthesisResult {
        let model = RegisterModel::new(2, 0.8).unwrap();
        let target = builtin_gate("qft2", 2).unwrap().with_root(1).unwrap();
        let cfg = SynthesisConfig {
            seed: 99,
            m_points: 7,
            ..SynthesisConfig::for_qubits(2)
        };
        let mut r = evaluate_loop(&model, &target, &random_loop(2, 4, 8), &cfg).unwrap();
        r.restart_errors = vec![0.1, 1.0 / 3.0];
        r
    }

    #[test]
    fn result_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let r = sample_result();
        write_result(&path, &r).unwrap();
        assert_eq!(read_result(&path).unwrap(), r);
    }

    #[test]
    fn result_read_errors() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(read_result(dir.path().join("nope.json")), Err(Error::Io(_))));

        let text = result_to_string(&sample_result()).unwrap();
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["n_qubits"] = 3.into();
        let err = result_from_str(&doc.to_string()).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }), "{err}");

        assert!(matches!(result_from_str("{\"format\": 1}"), Err(Error::Parse(_))));
    }
}
