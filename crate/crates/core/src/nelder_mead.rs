//! Nelder-Mead downhill simplex ("polytope") minimization.
//!
//! Moves follow the usual ordering rules: expand when the reflected point
//! beats the best vertex, accept it when it beats the second worst, try an
//! outside contraction when it only beats the worst, an inside contraction
//! otherwise, and shrink towards the best vertex when a contraction fails.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
}

impl Coefficients {
    pub const CLASSICAL: Coefficients = Coefficients {
        reflection: 1.0,
        expansion: 2.0,
        contraction: 0.5,
        shrink: 0.5,
    };

    /// Dimension-dependent coefficients of Gao and Han, which keep the
    /// simplex from degenerating in high dimension.
    pub fn adaptive(dim: usize) -> Coefficients {
        let n = dim.max(2) as f64;
        Coefficients {
            reflection: 1.0,
            expansion: 1.0 + 2.0 / n,
            contraction: 0.75 - 1.0 / (2.0 * n),
            shrink: 1.0 - 1.0 / n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub coefficients: Coefficients,
    /// Stop once `f_worst - f_best` is below this...
    pub f_tol: f64,
    /// ...and every vertex lies within this distance of the best one.
    pub x_tol: f64,
    pub max_evals: usize,
    /// Initial simplex step along axis `i` is `step_scale * max(|x0_i|, 1)`.
    pub step_scale: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            coefficients: Coefficients::CLASSICAL,
            f_tol: 1e-12,
            x_tol: 1e-10,
            max_evals: 100_000,
            step_scale: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    /// Both tolerances were met.
    pub converged: bool,
    /// The evaluation budget ran out first.
    pub budget_exhausted: bool,
}

struct Budgeted<F> {
    objective: F,
    evals: usize,
    max_evals: usize,
    best_x: Vec<f64>,
    best_f: f64,
}

impl<F: FnMut(&[f64]) -> f64> Budgeted<F> {
    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.evals >= self.max_evals {
            return None;
        }
        self.evals += 1;
        let mut f = (self.objective)(x);
        if f.is_nan() {
            f = f64::INFINITY;
        }
        if f < self.best_f {
            self.best_f = f;
            self.best_x.clear();
            self.best_x.extend_from_slice(x);
        }
        Some(f)
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Minimizes `objective` starting from a simplex around `x0`.
///
/// Running out of budget is not an error: the best point seen so far is
/// returned with `budget_exhausted` set. The result is never worse than
/// `f(x0)`.
pub fn nelder_mead<F>(objective: F, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    assert!(!x0.is_empty(), "nelder_mead needs at least one dimension");
    let d = x0.len();
    let c = opts.coefficients;
    let mut fun = Budgeted {
        objective,
        evals: 0,
        max_evals: opts.max_evals.max(1),
        best_x: x0.to_vec(),
        best_f: f64::INFINITY,
    };

    let finish = |fun: Budgeted<F>, converged: bool, exhausted: bool| NelderMeadOutcome {
        x: fun.best_x,
        f: fun.best_f,
        evals: fun.evals,
        converged,
        budget_exhausted: exhausted,
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    let mut values: Vec<f64> = Vec::with_capacity(d + 1);
    simplex.push(x0.to_vec());
    match fun.eval(x0) {
        Some(f) => values.push(f),
        None => return finish(fun, false, true),
    }
    for i in 0..d {
        let mut p = x0.to_vec();
        p[i] += opts.step_scale * x0[i].abs().max(1.0);
        match fun.eval(&p) {
            Some(f) => values.push(f),
            None => return finish(fun, false, true),
        }
        simplex.push(p);
    }

    let mut order: Vec<usize> = (0..=d).collect();
    let mut centroid = vec![0.0; d];
    let mut trial = vec![0.0; d];
    let mut trial2 = vec![0.0; d];

    loop {
        // stable sort keeps earlier vertices first among ties
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[d];
        let second_worst = order[d - 1];

        let spread = values[worst] - values[best];
        let diameter = simplex
            .iter()
            .map(|p| distance(p, &simplex[best]))
            .fold(0.0, f64::max);
        if spread < opts.f_tol && diameter < opts.x_tol {
            return finish(fun, true, false);
        }

        centroid.iter_mut().for_each(|x| *x = 0.0);
        for &k in &order[..d] {
            for (cj, pj) in centroid.iter_mut().zip(&simplex[k]) {
                *cj += pj;
            }
        }
        centroid.iter_mut().for_each(|x| *x /= d as f64);

        let along = |out: &mut Vec<f64>, t: f64, simplex: &Vec<Vec<f64>>| {
            for j in 0..d {
                out[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
            }
        };

        along(&mut trial, -c.reflection, &simplex);
        let Some(fr) = fun.eval(&trial) else {
            return finish(fun, false, true);
        };

        if fr < values[best] {
            along(&mut trial2, -c.reflection * c.expansion, &simplex);
            let Some(fe) = fun.eval(&trial2) else {
                return finish(fun, false, true);
            };
            if fe < fr {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = fe;
            } else {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = fr;
            }
            continue;
        }
        if fr < values[second_worst] {
            simplex[worst].copy_from_slice(&trial);
            values[worst] = fr;
            continue;
        }

        let accepted = if fr < values[worst] {
            along(&mut trial2, -c.reflection * c.contraction, &simplex);
            let Some(fc) = fun.eval(&trial2) else {
                return finish(fun, false, true);
            };
            if fc <= fr {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = fc;
                true
            } else {
                false
            }
        } else {
            along(&mut trial2, c.contraction, &simplex);
            let Some(fc) = fun.eval(&trial2) else {
                return finish(fun, false, true);
            };
            if fc < values[worst] {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = fc;
                true
            } else {
                false
            }
        };
        if accepted {
            continue;
        }

        let anchor = simplex[best].clone();
        for &k in &order[1..] {
            for (pj, aj) in simplex[k].iter_mut().zip(&anchor) {
                *pj = aj + c.shrink * (*pj - aj);
            }
            let Some(f) = fun.eval(&simplex[k]) else {
                return finish(fun, false, true);
            };
            values[k] = f;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let out = nelder_mead(|x| (x[0] - 2.0).powi(2), &[0.0], &NelderMeadOptions::default());
        assert!((out.x[0] - 2.0).abs() < 1e-6, "{:?}", out);
        assert!(out.converged);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let out = nelder_mead(f, &[-1.2, 1.0], &NelderMeadOptions::default());
        assert!(out.f < 1e-8, "{:?}", out);
        assert!((out.x[0] - 1.0).abs() < 1e-3 && (out.x[1] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn constant_objective_stops_on_diameter() {
        let out = nelder_mead(|_| 5.0, &[0.3, -0.2, 1.0], &NelderMeadOptions::default());
        assert_eq!(out.f, 5.0);
        assert!(out.converged);
        assert!(!out.budget_exhausted);
    }

    #[test]
    fn budget_exhaustion_returns_best_so_far() {
        let opts = NelderMeadOptions {
            max_evals: 25,
            ..Default::default()
        };
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let x0 = [3.0, -1.0, 2.0, 0.5];
        let out = nelder_mead(f, &x0, &opts);
        assert!(out.budget_exhausted);
        assert_eq!(out.evals, 25);
        assert!(out.f <= f(&x0));
        assert_eq!(out.f, f(&out.x));
    }

    #[test]
    fn never_worse_than_start() {
        // start sits at the global minimum; simplex points are all worse
        let out = nelder_mead(|x| x[0].abs() + x[1].abs(), &[0.0, 0.0], &NelderMeadOptions::default());
        assert_eq!(out.f, 0.0);
        assert_eq!(out.x, vec![0.0, 0.0]);
    }

    #[test]
    fn adaptive_coefficients_solve_quadratic_in_higher_dimension() {
        let d = 12;
        let opts = NelderMeadOptions {
            coefficients: Coefficients::adaptive(d),
            max_evals: 200_000,
            ..Default::default()
        };
        let f = |x: &[f64]| x.iter().enumerate().map(|(i, v)| (i as f64 + 1.0) * (v - 1.0).powi(2)).sum::<f64>();
        let out = nelder_mead(f, &vec![0.0; d], &opts);
        assert!(out.f < 1e-10, "{:?}", out.f);
    }

    #[test]
    fn adaptive_reduces_to_classical_like_values() {
        let c = Coefficients::adaptive(2);
        assert_eq!(c.expansion, 2.0);
        assert_eq!(c.contraction, 0.5);
        assert_eq!(c.shrink, 0.5);
    }

    #[test]
    fn nan_is_treated_as_worst() {
        let f = |x: &[f64]| if x[0] > 1.0 { f64::NAN } else { (x[0] - 0.5).powi(2) };
        let out = nelder_mead(f, &[0.0], &NelderMeadOptions::default());
        assert!((out.x[0] - 0.5).abs() < 1e-6);
    }
}
