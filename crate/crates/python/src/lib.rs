//! Python bindings. Matrices cross the boundary as nested lists of
//! `complex`; loops as lists of `(bz, bx)` pairs.

use josephson_gates as jg;
use jg::matrix::CMatrix;
use jg::synthesis::synthesize_over_roots;
use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

type Rows = Vec<Vec<Complex64>>;
type Vertex = (Vec<f64>, Vec<f64>);

fn err(e: jg::Error) -> PyErr {
    match e {
        jg::Error::Io(io) => PyIOError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_rows(m: &CMatrix) -> Rows {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn from_rows(rows: &Rows) -> PyResult<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be a non-empty square list of rows"));
    }
    Ok(CMatrix::from_fn(n, n, |r, c| rows[r][c]))
}

fn unitary(rows: &Rows) -> PyResult<jg::UnitaryMatrix> {
    jg::UnitaryMatrix::new(from_rows(rows)?).map_err(err)
}

fn control_loop(n_qubits: usize, vertices: Vec<Vertex>) -> PyResult<jg::ControlLoop> {
    let vs = vertices
        .into_iter()
        .map(|(bz, bx)| jg::ControlVertex::new(bz, bx))
        .collect::<jg::Result<Vec<_>>>()
        .map_err(err)?;
    jg::ControlLoop::new(n_qubits, vs).map_err(err)
}

fn vertex_pairs(lp: &jg::ControlLoop) -> Vec<Vertex> {
    lp.vertices()
        .iter()
        .map(|v| (v.bz().to_vec(), v.bx().to_vec()))
        .collect()
}

#[pyclass(name = "RegisterModel", module = "josephson_gates", frozen)]
struct PyRegisterModel(jg::RegisterModel);

#[pymethods]
impl PyRegisterModel {
    #[new]
    #[pyo3(signature = (n_qubits, coupling = 1.0))]
    fn new(n_qubits: usize, coupling: f64) -> PyResult<Self> {
        jg::RegisterModel::new(n_qubits, coupling).map(Self).map_err(err)
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.0.n_qubits()
    }

    #[getter]
    fn coupling(&self) -> f64 {
        self.0.coupling()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn hamiltonian(&self, bz: Vec<f64>, bx: Vec<f64>) -> PyResult<Rows> {
        let v = jg::ControlVertex::new(bz, bx).map_err(err)?;
        let h = jg::build_hamiltonian(&self.0, &v).map_err(err)?;
        Ok(to_rows(h.as_matrix()))
    }

    /// Propagator of the closed loop through `vertices`.
    #[pyo3(signature = (vertices, points = 100))]
    fn propagate_loop(&self, py: Python<'_>, vertices: Vec<Vertex>, points: usize) -> PyResult<Rows> {
        let lp = control_loop(self.0.n_qubits(), vertices)?;
        let u = py.detach(|| jg::propagate_loop(&self.0, &lp, points)).map_err(err)?;
        Ok(to_rows(u.as_matrix()))
    }

    #[pyo3(signature = (start, end, points = 100))]
    fn propagate_edge(&self, start: Vertex, end: Vertex, points: usize) -> PyResult<Rows> {
        let s = jg::ControlVertex::new(start.0, start.1).map_err(err)?;
        let e = jg::ControlVertex::new(end.0, end.1).map_err(err)?;
        let u = jg::propagate_edge(&self.0, &s, &e, points).map_err(err)?;
        Ok(to_rows(u.as_matrix()))
    }

    fn __repr__(&self) -> String {
        format!("RegisterModel(n_qubits={}, coupling={})", self.0.n_qubits(), self.0.coupling())
    }
}

#[pyclass(name = "TargetGate", module = "josephson_gates", frozen)]
struct PyTargetGate(jg::TargetGate);

#[pymethods]
impl PyTargetGate {
    /// Built-in target: `cnot`, `qft2`, `qft3` or `identity`.
    #[staticmethod]
    #[pyo3(signature = (name, n_qubits = None))]
    fn builtin(name: &str, n_qubits: Option<usize>) -> PyResult<Self> {
        let n = n_qubits
            .or_else(|| jg::gates::builtin_qubits(name))
            .ok_or_else(|| PyValueError::new_err(format!("{name} needs n_qubits")))?;
        jg::builtin_gate(name, n).map(Self).map_err(err)
    }

    /// Any unitary, moved into SU(2^N) by a global phase.
    #[staticmethod]
    #[pyo3(signature = (matrix, name = "custom", root_index = 0))]
    fn from_matrix(matrix: Rows, name: &str, root_index: usize) -> PyResult<Self> {
        let u = jg::su_project(&unitary(&matrix)?, root_index).map_err(err)?;
        jg::TargetGate::new(name, root_index, u).map(Self).map_err(err)
    }

    #[staticmethod]
    fn read(path: &str) -> PyResult<Self> {
        let u = jg::read_matrix_file(path).map_err(err)?;
        jg::TargetGate::from_unitary(path, &u).map(Self).map_err(err)
    }

    fn write(&self, path: &str) -> PyResult<()> {
        jg::write_matrix_file(path, self.0.matrix()).map_err(err)
    }

    fn with_root(&self, k: usize) -> PyResult<Self> {
        self.0.with_root(k).map(Self).map_err(err)
    }

    #[getter]
    fn name(&self) -> &str {
        self.0.name()
    }

    #[getter]
    fn root_index(&self) -> usize {
        self.0.root_index()
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.0.n_qubits()
    }

    #[getter]
    fn matrix(&self) -> Rows {
        to_rows(self.0.matrix().as_matrix())
    }

    fn __repr__(&self) -> String {
        format!("TargetGate({:?}, n_qubits={}, root_index={})", self.0.name(), self.0.n_qubits(), self.0.root_index())
    }
}

#[pyclass(name = "SynthesisResult", module = "josephson_gates", frozen)]
struct PySynthesisResult(jg::SynthesisResult);

#[pymethods]
impl PySynthesisResult {
    #[staticmethod]
    fn read(path: &str) -> PyResult<Self> {
        jg::read_result(path).map(Self).map_err(err)
    }

    fn write(&self, path: &str) -> PyResult<()> {
        jg::write_result(path, &self.0).map_err(err)
    }

    #[getter]
    fn abs_error(&self) -> f64 {
        self.0.abs_error
    }

    #[getter]
    fn rel_error(&self) -> f64 {
        self.0.rel_error
    }

    #[getter]
    fn refined_points(&self) -> usize {
        self.0.refined_points
    }

    #[getter]
    fn refined_abs_error(&self) -> f64 {
        self.0.refined_abs_error
    }

    #[getter]
    fn evals_used(&self) -> usize {
        self.0.evals_used
    }

    #[getter]
    fn restart_index_of_best(&self) -> usize {
        self.0.restart_index_of_best
    }

    #[getter]
    fn restart_errors(&self) -> Vec<f64> {
        self.0.restart_errors.clone()
    }

    #[getter]
    fn succeeded(&self) -> bool {
        self.0.succeeded()
    }

    #[getter]
    fn vertices(&self) -> Vec<Vertex> {
        vertex_pairs(&self.0.best_loop)
    }

    #[getter]
    fn target(&self) -> PyTargetGate {
        PyTargetGate(self.0.target.clone())
    }

    #[getter]
    fn model(&self) -> PyRegisterModel {
        PyRegisterModel(self.0.model)
    }

    /// Sampled schedule rows `[t, bz_1..bz_N, bx_1..bx_N]`.
    #[pyo3(signature = (samples_per_edge = jg::schedule::DEFAULT_SAMPLES_PER_EDGE))]
    fn schedule(&self, samples_per_edge: usize) -> PyResult<Vec<Vec<f64>>> {
        let s = jg::loop_to_schedule(&self.0.best_loop, samples_per_edge).map_err(err)?;
        Ok(s.rows
            .iter()
            .map(|r| std::iter::once(r.t).chain(r.bz.iter().copied()).chain(r.bx.iter().copied()).collect())
            .collect())
    }

    #[pyo3(signature = (path, samples_per_edge = jg::schedule::DEFAULT_SAMPLES_PER_EDGE))]
    fn write_schedule(&self, path: &str, samples_per_edge: usize) -> PyResult<()> {
        jg::loop_to_schedule(&self.0.best_loop, samples_per_edge)
            .and_then(|s| s.write_csv(path))
            .map_err(err)
    }

    /// Errors at the stored and a refined discretization plus residuals.
    #[pyo3(signature = (points_multiplier = 10))]
    fn verify<'py>(&self, py: Python<'py>, points_multiplier: usize) -> PyResult<Bound<'py, PyDict>> {
        let r = &self.0;
        let rep = py
            .detach(|| {
                jg::schedule::verify_with_multiplier(&r.model, &r.target, &r.best_loop, r.config.m_points, points_multiplier)
            })
            .map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("points", rep.points)?;
        d.set_item("refined_points", rep.refined_points)?;
        d.set_item("abs_error_at_m", rep.abs_error_at_m)?;
        d.set_item("abs_error_at_refined", rep.abs_error_at_refined)?;
        d.set_item("unitarity_residual", rep.unitarity_residual)?;
        d.set_item("det_residual", rep.det_residual)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "SynthesisResult(target={:?}, rel_error={:.3e}, restart={})",
            self.0.target.name(),
            self.0.rel_error,
            self.0.restart_index_of_best
        )
    }
}

/// Restarted Nelder-Mead search for a loop realizing `target`. Unset
/// options take the library defaults for the register size.
#[pyfunction]
#[pyo3(signature = (
    model, target, *, n_vertices = None, points = 100, max_evals = None, restarts = None,
    seed = 0, init_range = None, success_threshold = None, adaptive = None,
    field_limit = None, stop_on_success = false, scan_phase_roots = false, threads = None,
))]
#[allow(clippy::too_many_arguments)]
fn synthesize(
    py: Python<'_>,
    model: &PyRegisterModel,
    target: &PyTargetGate,
    n_vertices: Option<usize>,
    points: usize,
    max_evals: Option<usize>,
    restarts: Option<usize>,
    seed: u64,
    init_range: Option<f64>,
    success_threshold: Option<f64>,
    adaptive: Option<bool>,
    field_limit: Option<f64>,
    stop_on_success: bool,
    scan_phase_roots: bool,
    threads: Option<usize>,
) -> PyResult<PySynthesisResult> {
    let n = model.0.n_qubits();
    let mut cfg = jg::SynthesisConfig::for_qubits(n);
    cfg.m_points = points;
    cfg.seed = seed;
    cfg.field_limit = field_limit;
    cfg.stop_on_success = stop_on_success;
    cfg.n_vertices = n_vertices.unwrap_or(cfg.n_vertices);
    cfg.max_evals = max_evals.unwrap_or(cfg.max_evals);
    cfg.n_restarts = restarts.unwrap_or(cfg.n_restarts);
    cfg.init_range = init_range.unwrap_or(cfg.init_range);
    cfg.success_threshold = success_threshold.unwrap_or(cfg.success_threshold);
    cfg.adaptive = adaptive.unwrap_or(cfg.adaptive);
    cfg.validate(n).map_err(err)?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| PyValueError::new_err(e.to_string()))?;
    let (m, t) = (&model.0, &target.0);
    py.detach(|| {
        pool.install(|| {
            if scan_phase_roots {
                synthesize_over_roots(m, t, &cfg)
            } else {
                jg::synthesize(m, t, &cfg)
            }
        })
    })
    .map(PySynthesisResult)
    .map_err(err)
}

/// `exp(-i h dt)` for a Hermitian matrix `h`.
#[pyfunction]
fn step_propagator(h: Rows, dt: f64) -> PyResult<Rows> {
    let h = jg::HermitianMatrix::new(from_rows(&h)?, 1e-12).map_err(err)?;
    let u = jg::step_propagator(&h, dt).map_err(err)?;
    Ok(to_rows(u.as_matrix()))
}

#[pyfunction]
#[pyo3(signature = (matrix, root_index = 0))]
fn su_project(matrix: Rows, root_index: usize) -> PyResult<Rows> {
    let p = jg::su_project(&unitary(&matrix)?, root_index).map_err(err)?;
    Ok(to_rows(p.as_matrix()))
}

#[pyfunction]
fn vertex_condition(n_qubits: usize, n_vertices: usize) -> bool {
    jg::vertex_condition(n_qubits, n_vertices)
}

/// Frobenius distance between the target and the loop's propagator.
#[pyfunction]
#[pyo3(signature = (model, target, vertices, points = 100))]
fn error_functional(
    model: &PyRegisterModel,
    target: &PyTargetGate,
    vertices: Vec<Vertex>,
    points: usize,
) -> PyResult<f64> {
    let lp = control_loop(model.0.n_qubits(), vertices)?;
    jg::error_functional(&model.0, &target.0, &lp, points).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n_qubits = 3, vertices = 12, two_qubit_gates = 4, two_qubit_vertices = 4))]
fn cost_report(
    py: Python<'_>,
    n_qubits: usize,
    vertices: usize,
    two_qubit_gates: usize,
    two_qubit_vertices: usize,
) -> PyResult<Bound<'_, PyDict>> {
    let r = jg::cost_report(n_qubits, vertices, two_qubit_gates, two_qubit_vertices);
    let d = PyDict::new(py);
    d.set_item("direct_edges", r.direct_edges)?;
    d.set_item("sequential_edges", r.sequential_edges)?;
    d.set_item("ratio", r.speedup)?;
    Ok(d)
}

#[pymodule]
#[pyo3(name = "josephson_gates")]
pub fn josephson_gates_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRegisterModel>()?;
    m.add_class::<PyTargetGate>()?;
    m.add_class::<PySynthesisResult>()?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(step_propagator, m)?)?;
    m.add_function(wrap_pyfunction!(su_project, m)?)?;
    m.add_function(wrap_pyfunction!(vertex_condition, m)?)?;
    m.add_function(wrap_pyfunction!(error_functional, m)?)?;
    m.add_function(wrap_pyfunction!(cost_report, m)?)?;
    Ok(())
}
