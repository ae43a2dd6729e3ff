//! Charge-qubit register Hamiltonian and polygon-loop propagators.
//!
//! Qubit `i` is tensor factor `i` counted from the left, so it owns bit
//! `N - 1 - i` of a computational basis index.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    array_to_matrix, expm_real_symmetric, mul_array, Array, CMatrix, HermitianMatrix, Stack, StackExpm,
    UnitaryMatrix,
};

pub const MAX_QUBITS: usize = 4;

/// Discretization points per edge used unless configured otherwise.
pub const DEFAULT_POINTS_PER_EDGE: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegisterModel {
    n_qubits: usize,
    coupling: f64,
}

impl RegisterModel {
    pub fn new(n_qubits: usize, coupling: f64) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::InvalidConfig(format!(
                "qubit count must be in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        if !(coupling > 0.0 && coupling.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "coupling constant must be positive and finite, got {coupling}"
            )));
        }
        Ok(Self { n_qubits, coupling })
    }

    /// Register with unit coupling.
    pub fn with_unit_coupling(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, 1.0)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    fn check(&self, v: &ControlVertex) -> Result<()> {
        if v.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: v.n_qubits(),
            });
        }
        Ok(())
    }

    /// Feeds every nonzero Hamiltonian term at `v` to `add(row, col, value)`.
    ///
    /// Every term is real in the computational basis: `sz` is diagonal,
    /// `sx` flips one bit and `sy (x) sy` flips two bits with sign `-1` when
    /// the flipped bits agree and `+1` when they differ.
    fn hamiltonian_terms(&self, v: &ControlVertex, mut add: impl FnMut(usize, usize, f64)) {
        let n = self.n_qubits;
        let mask = |q: usize| 1usize << (n - 1 - q);
        for b in 0..self.dim() {
            let mut diag = 0.0;
            for q in 0..n {
                let z = if b & mask(q) == 0 { 1.0 } else { -1.0 };
                diag += -0.5 * v.bz[q] * z;
            }
            add(b, b, diag);
            for q in 0..n {
                add(b ^ mask(q), b, -0.5 * v.bx[q]);
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    let same = (b & mask(i) == 0) == (b & mask(j) == 0);
                    let sign = if same { -1.0 } else { 1.0 };
                    add(b ^ mask(i) ^ mask(j), b, -self.coupling * v.bx[i] * v.bx[j] * sign);
                }
            }
        }
    }

    fn hamiltonian_real(&self, v: &ControlVertex) -> DMatrix<f64> {
        let dim = self.dim();
        let mut h = DMatrix::<f64>::zeros(dim, dim);
        self.hamiltonian_terms(v, |r, c, x| h[(r, c)] += x);
        h
    }

    fn hamiltonian_array<const D: usize>(&self, v: &ControlVertex) -> Array<f64, D> {
        let mut h = [[0.0; D]; D];
        self.hamiltonian_terms(v, |r, c, x| h[r][c] += x);
        h
    }

    fn edge_product<const D: usize>(&self, points: &[ControlVertex], dt: f64) -> Result<CMatrix>
    where
        Stack: StackExpm<D>,
    {
        let (first, rest) = points.split_first().expect("at least one step");
        let mut acc = Stack::expm(&self.hamiltonian_array::<D>(first), dt)?;
        for p in rest {
            let step = Stack::expm(&self.hamiltonian_array::<D>(p), dt)?;
            acc = mul_array(&step, &acc);
        }
        Ok(array_to_matrix(&acc))
    }

    fn edge_product_dynamic(&self, points: &[ControlVertex], dt: f64) -> Result<CMatrix> {
        let (first, rest) = points.split_first().expect("at least one step");
        let mut acc = expm_real_symmetric(self.hamiltonian_real(first), dt)?;
        for p in rest {
            acc = expm_real_symmetric(self.hamiltonian_real(p), dt)? * acc;
        }
        Ok(acc)
    }
}

/// Control fields at one instant: `bz[i]` and `bx[i]` for every qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlVertex {
    bz: Vec<f64>,
    bx: Vec<f64>,
}

impl ControlVertex {
    pub fn new(bz: Vec<f64>, bx: Vec<f64>) -> Result<Self> {
        if bz.len() != bx.len() {
            return Err(Error::DimensionMismatch {
                expected: bz.len(),
                found: bx.len(),
            });
        }
        if bz.is_empty() {
            return Err(Error::InvalidConfig("control vertex has no qubits".into()));
        }
        if bz.iter().chain(&bx).any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("control fields must be finite".into()));
        }
        Ok(Self { bz, bx })
    }

    /// The degeneracy point.
    pub fn origin(n_qubits: usize) -> Self {
        Self {
            bz: vec![0.0; n_qubits],
            bx: vec![0.0; n_qubits],
        }
    }

    /// Builds a vertex from `[bz_1..bz_N, bx_1..bx_N]`.
    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        if !coords.len().is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "vertex needs an even number of coordinates, got {}",
                coords.len()
            )));
        }
        let n = coords.len() / 2;
        Self::new(coords[..n].to_vec(), coords[n..].to_vec())
    }

    pub fn n_qubits(&self) -> usize {
        self.bz.len()
    }

    pub fn bz(&self) -> &[f64] {
        &self.bz
    }

    pub fn bx(&self) -> &[f64] {
        &self.bx
    }

    /// Coordinates in `[bz_1..bz_N, bx_1..bx_N]` order.
    pub fn coords(&self) -> impl Iterator<Item = f64> + '_ {
        self.bz.iter().chain(&self.bx).copied()
    }

    pub fn is_origin(&self) -> bool {
        self.coords().all(|x| x == 0.0)
    }

    /// `self + t (end - self)` componentwise.
    fn towards(&self, end: &ControlVertex, t: f64) -> ControlVertex {
        let lerp = |a: &[f64], b: &[f64]| -> Vec<f64> {
            a.iter().zip(b).map(|(&s, &e)| s + t * (e - s)).collect()
        };
        ControlVertex {
            bz: lerp(&self.bz, &end.bz),
            bx: lerp(&self.bx, &end.bx),
        }
    }
}

/// Closed polygon in control space. The origin is the implicit first and
/// last corner, so `nu` stored vertices give `nu + 1` unit-time edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlLoop {
    n_qubits: usize,
    vertices: Vec<ControlVertex>,
}

impl ControlLoop {
    pub fn new(n_qubits: usize, vertices: Vec<ControlVertex>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidConfig("loop needs at least one qubit".into()));
        }
        if let Some(bad) = vertices.iter().find(|v| v.n_qubits() != n_qubits) {
            return Err(Error::DimensionMismatch {
                expected: n_qubits,
                found: bad.n_qubits(),
            });
        }
        Ok(Self { n_qubits, vertices })
    }

    /// Loop whose vertices all sit at the origin.
    pub fn zeros(n_qubits: usize, n_vertices: usize) -> Self {
        Self {
            n_qubits,
            vertices: vec![ControlVertex::origin(n_qubits); n_vertices],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn vertices(&self) -> &[ControlVertex] {
        &self.vertices
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.vertices.len() + 1
    }

    /// Total traversal time; every edge takes one time unit.
    pub fn duration(&self) -> f64 {
        self.n_edges() as f64
    }

    /// Corners in traversal order, origin at both ends.
    pub fn corners(&self) -> Vec<ControlVertex> {
        let origin = ControlVertex::origin(self.n_qubits);
        let mut out = Vec::with_capacity(self.vertices.len() + 2);
        out.push(origin.clone());
        out.extend(self.vertices.iter().cloned());
        out.push(origin);
        out
    }

    /// `(start, end)` of each edge in time order.
    pub fn edges(&self) -> Vec<(ControlVertex, ControlVertex)> {
        let corners = self.corners();
        corners
            .windows(2)
            .map(|w| (w[0].clone(), w[1].clone()))
            .collect()
    }
}

/// `H = sum_i [-bz_i sz_i / 2 - bx_i sx_i / 2] - C sum_{i<j} bx_i bx_j sy_i sy_j`.
pub fn build_hamiltonian(model: &RegisterModel, fields: &ControlVertex) -> Result<HermitianMatrix> {
    model.check(fields)?;
    Ok(HermitianMatrix::from_real(model.hamiltonian_real(fields)))
}

/// Control values at the midpoints `(i - 1/2) / m`, `i = 1..=m`, of the
/// straight segment from `start` to `end`.
pub fn edge_midpoints(start: &ControlVertex, end: &ControlVertex, m: usize) -> Result<Vec<ControlVertex>> {
    if start.n_qubits() != end.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: start.n_qubits(),
            found: end.n_qubits(),
        });
    }
    check_points(m)?;
    Ok((1..=m)
        .map(|i| start.towards(end, (i as f64 - 0.5) / m as f64))
        .collect())
}

fn check_points(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidConfig(
            "need at least one discretization point per edge".into(),
        ));
    }
    Ok(())
}

/// Ordered product of the `m` midpoint step propagators of one edge, later
/// steps applied on the left.
pub fn propagate_edge(
    model: &RegisterModel,
    start: &ControlVertex,
    end: &ControlVertex,
    m: usize,
) -> Result<UnitaryMatrix> {
    model.check(start)?;
    model.check(end)?;
    let dt = 1.0 / m as f64;
    let points = edge_midpoints(start, end, m)?;
    let product = match model.dim() {
        2 => model.edge_product::<2>(&points, dt)?,
        4 => model.edge_product::<4>(&points, dt)?,
        8 => model.edge_product::<8>(&points, dt)?,
        16 => model.edge_product::<16>(&points, dt)?,
        _ => model.edge_product_dynamic(&points, dt)?,
    };
    Ok(UnitaryMatrix::from_unchecked(product))
}

/// Discretized time-ordered propagator of the whole loop.
///
/// Edges are evaluated independently (in parallel when a rayon pool is
/// available) and reduced sequentially in time order, so the result does not
/// depend on the worker count.
pub fn propagate_loop(model: &RegisterModel, control: &ControlLoop, m: usize) -> Result<UnitaryMatrix> {
    if control.n_qubits() != model.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: model.n_qubits(),
            found: control.n_qubits(),
        });
    }
    check_points(m)?;
    let edges = control.edges();
    let factors = edges
        .par_iter()
        .map(|(s, e)| propagate_edge(model, s, e, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(time_ordered_product(factors))
}

/// `F_k ... F_2 F_1` for factors given in time order.
pub fn time_ordered_product(factors: Vec<UnitaryMatrix>) -> UnitaryMatrix {
    let mut iter = factors.into_iter();
    let first = iter.next().expect("at least one factor");
    iter.fold(first, |acc, f| f.then_after(&acc))
}
