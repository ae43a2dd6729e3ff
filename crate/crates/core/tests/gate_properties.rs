mod common;

use common::*;
use josephson_gates::gates::{builtin_qubits, BUILTIN_NAMES};
use josephson_gates::matrix::CMatrix;
use josephson_gates::{builtin_gate, su_project, UnitaryMatrix};
use proptest::prelude::*;
use std::f64::consts::PI;

/// Random unitary from the QR factorization of a random complex matrix.
fn random_unitary(seed: u64, d: usize) -> UnitaryMatrix {
    use rand::Rng;
    let mut r = rng(seed);
    let a = CMatrix::from_fn(d, d, |_, _| c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
    UnitaryMatrix::new(a.qr().q()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn projection_lands_in_su(n in 1usize..=4, seed in any::<u64>(), k in 0usize..16) {
        let d = 1 << n;
        let u = random_unitary(seed, d);
        let p = su_project(&u, k % d).unwrap();
        prop_assert!((p.determinant() - c(1.0, 0.0)).norm() < 1e-12);
        prop_assert!(p.unitarity_residual() < 1e-12);
    }

    #[test]
    fn projection_is_idempotent_on_su(n in 1usize..=3, seed in any::<u64>()) {
        let u = random_unitary(seed, 1 << n);
        let p = su_project(&u, 0).unwrap();
        let q = su_project(&p, 0).unwrap();
        prop_assert!(p.distance(&q) < 1e-12);
    }

    #[test]
    fn roots_differ_by_fixed_phase(n in 1usize..=3, seed in any::<u64>(), k in 0usize..8, j in 0usize..8) {
        let d = 1 << n;
        let (k, j) = (k % d, j % d);
        let u = random_unitary(seed, d);
        let pk = su_project(&u, k).unwrap();
        let pj = su_project(&u, j).unwrap();
        let phase = c(0.0, -2.0 * PI * (k as f64 - j as f64) / d as f64).exp();
        prop_assert!(max_abs(&(pk.as_matrix() - pj.as_matrix() * phase)) < 1e-12);
    }
}

#[test]
fn builtins_satisfy_target_invariants() {
    for name in BUILTIN_NAMES {
        let qubits: Vec<usize> = match builtin_qubits(name) {
            Some(n) => vec![n],
            None => (1..=4).collect(),
        };
        for n in qubits {
            let g = builtin_gate(name, n).unwrap();
            assert!(g.matrix().unitarity_residual() < 1e-12, "{name}");
            assert!(g.matrix().det_residual() < 1e-12, "{name}");
        }
    }
}

#[test]
fn qft2_phase_gives_unit_determinant() {
    let g = builtin_gate("qft2", 2).unwrap();
    assert!((g.matrix().determinant() - c(1.0, 0.0)).norm() < 1e-14);
}

#[test]
fn identity_projects_to_itself() {
    let p = su_project(&UnitaryMatrix::identity(8), 0).unwrap();
    assert_eq!(p, UnitaryMatrix::identity(8));
}
