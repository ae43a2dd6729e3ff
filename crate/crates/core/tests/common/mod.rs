#![allow(dead_code)]

use josephson_gates::matrix::CMatrix;
use josephson_gates::{ControlLoop, ControlVertex};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vertex(rng: &mut impl Rng, n: usize, w: f64) -> ControlVertex {
    let bz = (0..n).map(|_| rng.random_range(-w..=w)).collect();
    let bx = (0..n).map(|_| rng.random_range(-w..=w)).collect();
    ControlVertex::new(bz, bx).unwrap()
}

pub fn random_loop(rng: &mut impl Rng, n: usize, nu: usize, w: f64) -> ControlLoop {
    ControlLoop::new(n, (0..nu).map(|_| random_vertex(rng, n, w)).collect()).unwrap()
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn sx() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn sy() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn sz() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// `p` acting on factor `i` of an `n`-qubit register, factor 0 leftmost.
pub fn on_qubit(p: &CMatrix, i: usize, n: usize) -> CMatrix {
    (0..n).fold(CMatrix::identity(1, 1), |acc, k| {
        acc.kronecker(&if k == i { p.clone() } else { identity(2) })
    })
}

/// Reference Hamiltonian assembled from explicit Kronecker products.
pub fn kron_hamiltonian(v: &ControlVertex, coupling: f64) -> CMatrix {
    let n = v.n_qubits();
    let d = 1 << n;
    let mut h = CMatrix::zeros(d, d);
    for i in 0..n {
        h -= on_qubit(&sz(), i, n) * c(0.5 * v.bz()[i], 0.0);
        h -= on_qubit(&sx(), i, n) * c(0.5 * v.bx()[i], 0.0);
        for j in i + 1..n {
            let yy = on_qubit(&sy(), i, n) * on_qubit(&sy(), j, n);
            h -= yy * c(coupling * v.bx()[i] * v.bx()[j], 0.0);
        }
    }
    h
}

/// Truncated Taylor series of `exp(-i h dt)` through order `k`.
pub fn taylor_expm(h: &CMatrix, dt: f64, k: usize) -> CMatrix {
    let d = h.nrows();
    let a = h * c(0.0, -dt);
    let mut term = identity(d);
    let mut sum = identity(d);
    for j in 1..=k {
        term = &term * &a * c(1.0 / j as f64, 0.0);
        sum += &term;
    }
    sum
}

pub fn swap() -> CMatrix {
    let mut s = CMatrix::zeros(4, 4);
    for (r, col) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        s[(r, col)] = c(1.0, 0.0);
    }
    s
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
