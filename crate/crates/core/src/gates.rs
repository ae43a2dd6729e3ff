//! Target gates in SU(2^N) and the matrix file format.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{is_power_of_two, unitarity_residual, CMatrix, UnitaryMatrix, UNITARITY_TOL};
use crate::serial;

/// Largest `|det - 1|` accepted for a synthesis target.
pub const SU_TOL: f64 = 1e-10;

pub const BUILTIN_NAMES: [&str; 4] = ["cnot", "qft2", "qft3", "identity"];

/// A synthesis target: an SU(2^N) matrix plus the label it was built from.
///
/// `root_index` records which of the `2^N` equivalent SU representatives
/// was selected relative to the gate's base representative.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetGate {
    name: String,
    root_index: usize,
    matrix: UnitaryMatrix,
}

impl TargetGate {
    /// Wraps a matrix that must already be special unitary.
    pub fn new(name: impl Into<String>, root_index: usize, matrix: UnitaryMatrix) -> Result<Self> {
        let residual = matrix.det_residual();
        if !(residual < SU_TOL) {
            return Err(Error::NotSpecialUnitary { residual });
        }
        Ok(Self {
            name: name.into(),
            root_index,
            matrix,
        })
    }

    /// SU-projects an arbitrary unitary with the principal root.
    pub fn from_unitary(name: impl Into<String>, u: &UnitaryMatrix) -> Result<Self> {
        Self::new(name, 0, su_project(u, 0)?)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn root_index(&self) -> usize {
        self.root_index
    }

    pub fn matrix(&self) -> &UnitaryMatrix {
        &self.matrix
    }

    pub fn n_qubits(&self) -> usize {
        self.matrix.n_qubits()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// The same gate multiplied by `exp(-2 pi i k / 2^N)`.
    pub fn with_root(&self, k: usize) -> Result<Self> {
        let d = self.dim();
        let k = k % d;
        let phase = Complex64::from_polar(1.0, -2.0 * PI * k as f64 / d as f64);
        let shifted = UnitaryMatrix::from_unchecked(self.matrix.as_matrix() * phase);
        Ok(Self {
            name: self.name.clone(),
            root_index: (self.root_index + k) % d,
            matrix: shifted,
        })
    }
}

/// Returns `c u` with `c = exp(-i (arg det u + 2 pi k) / 2^N)`, so that
/// `det(c u) = 1`. Different `k` give the `2^N` SU representatives of the
/// same physical gate.
pub fn su_project(u: &UnitaryMatrix, root_index: usize) -> Result<UnitaryMatrix> {
    let residual = u.unitarity_residual();
    if !(residual < UNITARITY_TOL) {
        return Err(Error::NotUnitary { residual });
    }
    let d = u.dim();
    if root_index >= d {
        return Err(Error::InvalidConfig(format!(
            "root index must be below {d}, got {root_index}"
        )));
    }
    let theta = u.determinant().arg();
    let c = Complex64::from_polar(1.0, -(theta + 2.0 * PI * root_index as f64) / d as f64);
    Ok(UnitaryMatrix::from_unchecked(u.as_matrix() * c))
}

fn from_rows(rows: &[&[Complex64]]) -> CMatrix {
    let n = rows.len();
    CMatrix::from_fn(n, n, |r, c| rows[r][c])
}

/// Plain CNOT with the first qubit as control.
pub fn cnot_matrix() -> CMatrix {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    from_rows(&[&[l, o, o, o], &[o, l, o, o], &[o, o, o, l], &[o, o, l, o]])
}

/// Two-qubit Fourier transform with entries `i^{jk} / 2`.
pub fn qft2_matrix() -> CMatrix {
    let h = 0.5;
    let p = Complex64::new(h, 0.0);
    let m = Complex64::new(-h, 0.0);
    let i = Complex64::new(0.0, h);
    let mi = Complex64::new(0.0, -h);
    from_rows(&[&[p, p, p, p], &[p, i, m, mi], &[p, m, p, m], &[p, mi, m, i]])
}

/// Powers of `w = exp(i pi / 4)` in the three-qubit Fourier transform.
#[rustfmt::skip]
const QFT3_POWERS: [[u8; 8]; 8] = [
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 2, 3, 4, 5, 6, 7],
    [0, 2, 4, 6, 0, 2, 4, 6],
    [0, 3, 6, 1, 4, 7, 2, 5],
    [0, 4, 0, 4, 0, 4, 0, 4],
    [0, 5, 2, 7, 4, 1, 6, 3],
    [0, 6, 4, 2, 0, 6, 4, 2],
    [0, 7, 6, 5, 4, 3, 2, 1],
];

/// Exact value of `exp(i pi p / 4)` for `p` in `0..8`.
fn eighth_root_power(p: u8) -> Complex64 {
    let s = FRAC_1_SQRT_2;
    match p % 8 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(s, s),
        2 => Complex64::new(0.0, 1.0),
        3 => Complex64::new(-s, s),
        4 => Complex64::new(-1.0, 0.0),
        5 => Complex64::new(-s, -s),
        6 => Complex64::new(0.0, -1.0),
        _ => Complex64::new(s, -s),
    }
}

pub fn qft3_matrix() -> CMatrix {
    let norm = 1.0 / 8f64.sqrt();
    CMatrix::from_fn(8, 8, |r, c| eighth_root_power(QFT3_POWERS[r][c]) * norm)
}

/// Built-in targets with the fixed global phases that place them in SU(2^N):
/// `exp(i pi/4) CNOT`, `exp(i pi/8) F_2`, `exp(-i pi/16) F_3`, and the
/// identity on `n_qubits` qubits.
pub fn builtin_gate(name: &str, n_qubits: usize) -> Result<TargetGate> {
    let name = name.to_ascii_lowercase();
    let (required, base, phase) = match name.as_str() {
        "cnot" => (Some(2), cnot_matrix(), PI / 4.0),
        "qft2" => (Some(2), qft2_matrix(), PI / 8.0),
        "qft3" => (Some(3), qft3_matrix(), -PI / 16.0),
        "identity" => {
            if !(1..=crate::register::MAX_QUBITS).contains(&n_qubits) {
                return Err(Error::InvalidConfig(format!(
                    "identity needs 1..={} qubits, got {n_qubits}",
                    crate::register::MAX_QUBITS
                )));
            }
            let d = 1 << n_qubits;
            (None, CMatrix::identity(d, d), 0.0)
        }
        _ => return Err(Error::UnknownGate(name)),
    };
    if let Some(req) = required {
        if req != n_qubits {
            return Err(Error::DimensionMismatch {
                expected: req,
                found: n_qubits,
            });
        }
    }
    let m = base * Complex64::from_polar(1.0, phase);
    TargetGate::new(name, 0, UnitaryMatrix::new(m)?)
}

/// Qubit count a built-in gate acts on, or `None` for `identity`.
pub fn builtin_qubits(name: &str) -> Option<usize> {
    match name.to_ascii_lowercase().as_str() {
        "cnot" | "qft2" => Some(2),
        "qft3" => Some(3),
        _ => None,
    }
}

/// On-disk matrix: `dim` and row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixDocument {
    pub fn from_unitary(u: &UnitaryMatrix) -> Self {
        Self {
            dim: u.dim(),
            entries: u.to_pairs(),
        }
    }

    /// Validates shape and unitarity.
    pub fn to_unitary(&self) -> Result<UnitaryMatrix> {
        if self.entries.len() != self.dim * self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim * self.dim,
                found: self.entries.len(),
            });
        }
        if !is_power_of_two(self.dim) {
            return Err(Error::NotPowerOfTwo(self.dim));
        }
        let m = CMatrix::from_fn(self.dim, self.dim, |r, c| {
            let [re, im] = self.entries[r * self.dim + c];
            Complex64::new(re, im)
        });
        let residual = unitarity_residual(&m);
        if !(residual < UNITARITY_TOL) {
            return Err(Error::NotUnitary { residual });
        }
        Ok(UnitaryMatrix::from_unchecked(m))
    }
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<UnitaryMatrix> {
    let text = std::fs::read_to_string(path)?;
    let doc: MatrixDocument = serde_json::from_str(&text)?;
    doc.to_unitary()
}

pub fn write_matrix_file(path: impl AsRef<Path>, u: &UnitaryMatrix) -> Result<()> {
    let text = serial::to_string(&MatrixDocument::from_unitary(u))?;
    std::fs::write(path, text)?;
    Ok(())
}
