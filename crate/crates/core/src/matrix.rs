//! Dense complex matrices used for Hamiltonians and propagators.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Tolerance used when a user-supplied matrix must be unitary.
pub const UNITARITY_TOL: f64 = 1e-10;

const EIGEN_MAX_ITER: usize = 1000;

/// Frobenius norm `sqrt(Tr(A^dag A))`.
pub fn frobenius_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `||A - B||_F` without materializing the difference.
pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let n = u.nrows();
    frobenius_distance(&(u.adjoint() * u), &CMatrix::identity(n, n))
}

pub(crate) fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// Dense unitary matrix of dimension `2^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(CMatrix);

impl UnitaryMatrix {
    /// Wraps `m` after checking squareness, power-of-two dimension, and
    /// unitarity to [`UNITARITY_TOL`].
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if !is_power_of_two(m.nrows()) {
            return Err(Error::NotPowerOfTwo(m.nrows()));
        }
        let residual = unitarity_residual(&m);
        if !(residual < UNITARITY_TOL) {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self(m))
    }

    pub(crate) fn from_unchecked(m: CMatrix) -> Self {
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn determinant(&self) -> Complex64 {
        self.0.clone().determinant()
    }

    /// `||U^dag U - I||_F`
    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.0)
    }

    /// `|det U - 1|`
    pub fn det_residual(&self) -> f64 {
        (self.determinant() - Complex64::new(1.0, 0.0)).norm()
    }

    pub fn distance(&self, other: &UnitaryMatrix) -> f64 {
        frobenius_distance(&self.0, &other.0)
    }

    /// `self * rhs`: `rhs` acts first.
    pub fn then_after(&self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        Self(&self.0 * &rhs.0)
    }

    /// Row-major `[re, im]` pairs.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        let n = self.dim();
        (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .map(|(r, c)| {
                let z = self.0[(r, c)];
                [z.re, z.im]
            })
            .collect()
    }
}

/// Dense Hermitian matrix of dimension `2^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Accepts `m` if `||m - m^dag||_F <= tol`.
    pub fn new(m: CMatrix, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let residual = frobenius_distance(&m, &m.adjoint());
        if !(residual <= tol) {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self(m))
    }

    pub(crate) fn from_real(m: DMatrix<f64>) -> Self {
        Self(m.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        frobenius_distance(&self.0, &self.0.adjoint())
    }

    fn real_part_if_real(&self) -> Option<DMatrix<f64>> {
        if self.0.iter().all(|z| z.im == 0.0) {
            Some(self.0.map(|z| z.re))
        } else {
            None
        }
    }
}

pub(crate) type Array<T, const N: usize> = [[T; N]; N];

/// `exp(-i theta) - 1` without cancellation for small `theta`.
///
/// Propagators are assembled as `I + V diag(exp(-i l dt) - 1) V^T` so that
/// rounding in the eigenvectors only enters through the small term; with
/// `V diag(exp(-i l dt)) V^T` every step would carry an `O(eps)` error
/// from `V V^T` that accumulates linearly over the steps of an edge.
fn phase_minus_one(theta: f64) -> Complex64 {
    let half = (0.5 * theta).sin();
    Complex64::new(-2.0 * half * half, -theta.sin())
}

/// `exp(-i h dt)` for real symmetric `h` via `h = V diag(l) V^T`, on the
/// stack for the register dimensions 2, 4, 8 and 16.
pub(crate) trait StackExpm<const N: usize> {
    fn expm(h: &Array<f64, N>, dt: f64) -> Result<Array<Complex64, N>>;
}

pub(crate) struct Stack;

macro_rules! stack_expm {
    ($($n:literal),*) => {$(
        impl StackExpm<$n> for Stack {
            fn expm(h: &Array<f64, $n>, dt: f64) -> Result<Array<Complex64, $n>> {
                let m = nalgebra::SMatrix::<f64, $n, $n>::from_fn(|r, c| h[r][c]);
                let eig = SymmetricEigen::try_new(m, f64::EPSILON, EIGEN_MAX_ITER)
                    .ok_or(Error::Eigendecomposition)?;
                let v = &eig.eigenvectors;
                let mut phases = [Complex64::new(0.0, 0.0); $n];
                for (p, &l) in phases.iter_mut().zip(eig.eigenvalues.iter()) {
                    *p = phase_minus_one(l * dt);
                }
                // I + V diag(phases) V^T is complex symmetric
                let mut out = [[Complex64::new(0.0, 0.0); $n]; $n];
                for r in 0..$n {
                    for c in r..$n {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..$n {
                            acc += phases[k] * (v[(r, k)] * v[(c, k)]);
                        }
                        if r == c {
                            acc += 1.0;
                        }
                        out[r][c] = acc;
                        out[c][r] = acc;
                    }
                }
                Ok(out)
            }
        }
    )*};
}

stack_expm!(2, 4, 8, 16);

/// `a * b` on stack arrays.
pub(crate) fn mul_array<const N: usize>(a: &Array<Complex64, N>, b: &Array<Complex64, N>) -> Array<Complex64, N> {
    let mut out = [[Complex64::new(0.0, 0.0); N]; N];
    for r in 0..N {
        for k in 0..N {
            let ark = a[r][k];
            for c in 0..N {
                out[r][c] += ark * b[k][c];
            }
        }
    }
    out
}

pub(crate) fn array_to_matrix<const N: usize>(a: &Array<Complex64, N>) -> CMatrix {
    CMatrix::from_fn(N, N, |r, c| a[r][c])
}

fn expm_real_via_array<const N: usize>(h: &DMatrix<f64>, dt: f64) -> Result<CMatrix>
where
    Stack: StackExpm<N>,
{
    let arr: Array<f64, N> = std::array::from_fn(|r| std::array::from_fn(|c| h[(r, c)]));
    Ok(array_to_matrix(&Stack::expm(&arr, dt)?))
}

/// `exp(-i h dt)` for real symmetric `h`. Register dimensions go through the
/// stack-allocated path shared with loop propagation.
pub(crate) fn expm_real_symmetric(h: DMatrix<f64>, dt: f64) -> Result<CMatrix> {
    match h.nrows() {
        2 => expm_real_via_array::<2>(&h, dt),
        4 => expm_real_via_array::<4>(&h, dt),
        8 => expm_real_via_array::<8>(&h, dt),
        16 => expm_real_via_array::<16>(&h, dt),
        _ => expm_dynamic(h, dt),
    }
}

fn expm_dynamic(h: DMatrix<f64>, dt: f64) -> Result<CMatrix> {
    let n = h.nrows();
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(Error::Eigendecomposition)?;
    let v = &eig.eigenvectors;
    let phases: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&l| phase_minus_one(l * dt))
        .collect();
    Ok(CMatrix::from_fn(n, n, |r, c| {
        let delta: Complex64 = (0..n).map(|k| phases[k] * (v[(r, k)] * v[(c, k)])).sum();
        if r == c {
            delta + 1.0
        } else {
            delta
        }
    }))
}

/// `exp(-i h dt)` for complex Hermitian `h` via `h = Q diag(l) Q^dag`.
fn expm_hermitian(h: CMatrix, dt: f64) -> Result<CMatrix> {
    let eig = SymmetricEigen::try_new(h, f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or(Error::Eigendecomposition)?;
    let q = &eig.eigenvectors;
    let mut scaled = q.clone();
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        let phase = phase_minus_one(l * dt);
        for z in scaled.column_mut(k).iter_mut() {
            *z *= phase;
        }
    }
    let n = q.nrows();
    Ok(scaled * q.adjoint() + CMatrix::identity(n, n))
}

/// `exp(-i h dt)` by exact Hermitian eigendecomposition.
///
/// Real symmetric input takes a real eigensolver; general Hermitian input
/// uses the complex one. Both are exact up to rounding.
pub fn step_propagator(h: &HermitianMatrix, dt: f64) -> Result<UnitaryMatrix> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "time step must be positive and finite, got {dt}"
        )));
    }
    let m = match h.real_part_if_real() {
        Some(real) => expm_real_symmetric(real, dt)?,
        None => expm_hermitian(h.0.clone(), dt)?,
    };
    Ok(UnitaryMatrix(m))
}
