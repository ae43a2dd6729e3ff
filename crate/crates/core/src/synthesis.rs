//! Gate synthesis as minimization of `||U_target - U(loop)||_F` over the
//! polygon vertex coordinates.

use log::{debug, info};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{TargetGate, SU_TOL};
use crate::nelder_mead::{nelder_mead, Coefficients, NelderMeadOptions};
use crate::register::{propagate_loop, ControlLoop, ControlVertex, RegisterModel, DEFAULT_POINTS_PER_EDGE};

/// Dimension of SU(2^N), `4^N - 1`.
pub fn group_dimension(n_qubits: usize) -> usize {
    (1usize << (2 * n_qubits)) - 1
}

/// `2 N nu >= 4^N - 1`: enough free coordinates to cover SU(2^N).
pub fn vertex_condition(n_qubits: usize, n_vertices: usize) -> bool {
    2 * n_qubits * n_vertices >= group_dimension(n_qubits)
}

fn check_vertex_condition(n_qubits: usize, n_vertices: usize) -> Result<()> {
    if vertex_condition(n_qubits, n_vertices) {
        Ok(())
    } else {
        Err(Error::VertexCondition {
            n_qubits,
            n_vertices,
            params: 2 * n_qubits * n_vertices,
            group_dim: group_dimension(n_qubits),
        })
    }
}

/// Vertex count used by default: 4 for two qubits and 12 for three, the
/// smallest count meeting [`vertex_condition`] otherwise.
pub fn default_vertices(n_qubits: usize) -> usize {
    match n_qubits {
        2 => 4,
        3 => 12,
        n => group_dimension(n).div_ceil(2 * n),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisConfig {
    pub n_vertices: usize,
    pub m_points: usize,
    /// Objective evaluations allowed per restart.
    pub max_evals: usize,
    pub n_restarts: usize,
    pub seed: u64,
    /// Initial coordinates are drawn uniformly from `[-init_range, init_range]`.
    pub init_range: f64,
    pub f_tol: f64,
    pub x_tol: f64,
    /// Relative error at or below which a run counts as successful.
    pub success_threshold: f64,
    /// Use dimension-scaled Nelder-Mead coefficients.
    pub adaptive: bool,
    /// Optional bound `|B| <= limit` applied to every field coordinate.
    pub field_limit: Option<f64>,
    /// Skip the remaining restarts once one succeeds.
    pub stop_on_success: bool,
}

impl SynthesisConfig {
    pub fn for_qubits(n_qubits: usize) -> Self {
        Self {
            n_vertices: default_vertices(n_qubits),
            m_points: DEFAULT_POINTS_PER_EDGE,
            max_evals: default_max_evals(n_qubits),
            n_restarts: 20,
            seed: 0,
            init_range: 1.5,
            f_tol: 1e-12,
            x_tol: 1e-10,
            success_threshold: 1e-4,
            adaptive: n_qubits >= 3,
            field_limit: None,
            stop_on_success: false,
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        check_vertex_condition(n_qubits, self.n_vertices)?;
        let bad = |what: &str| Err(Error::InvalidConfig(what.to_string()));
        if self.m_points == 0 {
            return bad("points per edge must be at least 1");
        }
        if self.max_evals == 0 {
            return bad("evaluation budget must be at least 1");
        }
        if self.n_restarts == 0 {
            return bad("need at least one restart");
        }
        for (name, v) in [
            ("init_range", self.init_range),
            ("f_tol", self.f_tol),
            ("x_tol", self.x_tol),
            ("success_threshold", self.success_threshold),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(l) = self.field_limit {
            if !(l > 0.0 && l.is_finite()) {
                return bad("field limit must be positive");
            }
        }
        Ok(())
    }

    fn nm_options(&self, dim: usize, max_evals: usize) -> NelderMeadOptions {
        NelderMeadOptions {
            coefficients: if self.adaptive {
                Coefficients::adaptive(dim)
            } else {
                Coefficients::CLASSICAL
            },
            f_tol: self.f_tol,
            x_tol: self.x_tol,
            max_evals,
            step_scale: 0.1,
        }
    }
}

fn default_max_evals(n_qubits: usize) -> usize {
    match n_qubits {
        1 => 20_000,
        2 => 60_000,
        _ => 400_000,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    pub model: RegisterModel,
    pub target: TargetGate,
    pub config: SynthesisConfig,
    pub best_loop: ControlLoop,
    pub abs_error: f64,
    /// `abs_error / sqrt(2^N)`, the error relative to `||U_target||_F`.
    pub rel_error: f64,
    /// Points per edge of the refined re-evaluation (ten times `m_points`).
    pub refined_points: usize,
    pub refined_abs_error: f64,
    pub evals_used: usize,
    pub restart_index_of_best: usize,
    /// Best error reached by each restart that ran.
    pub restart_errors: Vec<f64>,
}

impl SynthesisResult {
    pub fn succeeded(&self) -> bool {
        self.rel_error <= self.config.success_threshold
    }
}

pub fn relative_error(abs_error: f64, n_qubits: usize) -> f64 {
    abs_error / ((1usize << n_qubits) as f64).sqrt()
}

/// `||U_target - U(loop)||_F` with `m` midpoint steps per edge.
pub fn error_functional(model: &RegisterModel, target: &TargetGate, control: &ControlLoop, m: usize) -> Result<f64> {
    if target.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: target.dim(),
        });
    }
    let u = propagate_loop(model, control, m)?;
    Ok(target.matrix().distance(&u))
}

/// Flattens a loop vertex by vertex, each as `[bz_1..bz_N, bx_1..bx_N]`.
pub fn pack(control: &ControlLoop) -> Vec<f64> {
    control.vertices().iter().flat_map(|v| v.coords()).collect()
}

pub fn unpack(x: &[f64], n_qubits: usize, n_vertices: usize) -> Result<ControlLoop> {
    let width = 2 * n_qubits;
    if n_qubits == 0 || x.len() != width * n_vertices {
        return Err(Error::DimensionMismatch {
            expected: width * n_vertices,
            found: x.len(),
        });
    }
    let vertices = x
        .chunks_exact(width)
        .map(ControlVertex::from_slice)
        .collect::<Result<Vec<_>>>()?;
    ControlLoop::new(n_qubits, vertices)
}

/// Seeded generator for restart `k`: ChaCha stream `k` of the base seed.
fn restart_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

/// Starting point of restart `k`.
pub fn initial_point(cfg: &SynthesisConfig, n_qubits: usize, k: usize) -> Vec<f64> {
    let mut rng = restart_rng(cfg.seed, k);
    let w = cfg.init_range;
    (0..2 * n_qubits * cfg.n_vertices)
        .map(|_| rng.random_range(-w..=w))
        .collect()
}

struct Objective<'a> {
    model: &'a RegisterModel,
    target: &'a TargetGate,
    cfg: &'a SynthesisConfig,
}

impl Objective<'_> {
    fn constrain(&self, x: &[f64]) -> Vec<f64> {
        match self.cfg.field_limit {
            Some(l) => x.iter().map(|v| v.clamp(-l, l)).collect(),
            None => x.to_vec(),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let x = self.constrain(x);
        unpack(&x, self.model.n_qubits(), self.cfg.n_vertices)
            .and_then(|lp| error_functional(self.model, self.target, &lp, self.cfg.m_points))
            .unwrap_or(f64::INFINITY)
    }
}

/// A simplex re-seeded at its own optimum must cut the error by at least
/// this fraction to earn another run.
const RESEED_MIN_GAIN: f64 = 1e-3;

/// One restart: Nelder-Mead from `x0`, re-seeded with a fresh simplex at
/// the best point after each run until a run stops paying off, the error
/// hits `f_tol`, or the budget is spent.
fn restart_search(obj: &Objective<'_>, x0: Vec<f64>) -> (Vec<f64>, f64, usize) {
    let cfg = obj.cfg;
    let mut remaining = cfg.max_evals;
    let mut x = x0;
    let mut f = f64::INFINITY;
    let mut used = 0;
    while remaining > 0 {
        let opts = cfg.nm_options(x.len(), remaining);
        let out = nelder_mead(|p| obj.eval(p), &x, &opts);
        remaining -= out.evals;
        used += out.evals;
        let improved = out.f < f;
        let worthwhile = out.f < f * (1.0 - RESEED_MIN_GAIN);
        debug!(
            "simplex run: f = {:.3e} after {} evals (converged: {})",
            out.f, out.evals, out.converged
        );
        if improved {
            x = out.x;
            f = out.f;
        }
        if !worthwhile || f < cfg.f_tol {
            break;
        }
    }
    (obj.constrain(&x), f, used)
}

/// Runs `n_restarts` seeded searches and keeps the lowest error; ties go to
/// the earliest restart.
pub fn synthesize(model: &RegisterModel, target: &TargetGate, cfg: &SynthesisConfig) -> Result<SynthesisResult> {
    let n = model.n_qubits();
    cfg.validate(n)?;
    if target.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: target.dim(),
        });
    }
    let residual = target.matrix().det_residual();
    if !(residual < SU_TOL) {
        return Err(Error::NotSpecialUnitary { residual });
    }

    let obj = Objective { model, target, cfg };
    let mut best: Option<(Vec<f64>, f64, usize)> = None;
    let mut restart_errors = Vec::with_capacity(cfg.n_restarts);
    let mut evals_used = 0;
    for k in 0..cfg.n_restarts {
        let (x, f, used) = restart_search(&obj, initial_point(cfg, n, k));
        evals_used += used;
        restart_errors.push(f);
        info!(
            "restart {k}: abs error {:.6e}, rel error {:.6e}, {used} evals",
            f,
            relative_error(f, n)
        );
        if best.as_ref().is_none_or(|(_, bf, _)| f < *bf) {
            best = Some((x, f, k));
        }
        if cfg.stop_on_success && relative_error(best.as_ref().unwrap().1, n) <= cfg.success_threshold {
            break;
        }
    }
    let (x, _, restart_index_of_best) = best.expect("at least one restart");
    let best_loop = unpack(&x, n, cfg.n_vertices)?;
    let abs_error = error_functional(model, target, &best_loop, cfg.m_points)?;
    let refined_points = cfg.m_points * 10;
    let refined_abs_error = error_functional(model, target, &best_loop, refined_points)?;
    Ok(SynthesisResult {
        model: *model,
        target: target.clone(),
        config: cfg.clone(),
        best_loop,
        abs_error,
        rel_error: relative_error(abs_error, n),
        refined_points,
        refined_abs_error,
        evals_used,
        restart_index_of_best,
        restart_errors,
    })
}

/// Repeats [`synthesize`] for every SU representative of `target` and keeps
/// the best result.
pub fn synthesize_over_roots(
    model: &RegisterModel,
    target: &TargetGate,
    cfg: &SynthesisConfig,
) -> Result<SynthesisResult> {
    let mut best: Option<SynthesisResult> = None;
    for k in 0..target.dim() {
        let shifted = target.with_root(k)?;
        let res = synthesize(model, &shifted, cfg)?;
        info!("root {}: rel error {:.6e}", shifted.root_index(), res.rel_error);
        let better = best.as_ref().is_none_or(|b| res.abs_error < b.abs_error);
        let done = cfg.stop_on_success && res.succeeded();
        if better {
            best = Some(res);
        }
        if done {
            break;
        }
    }
    Ok(best.expect("dimension is at least two"))
}
