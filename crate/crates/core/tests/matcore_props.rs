mod common;

use common::{arb_hermitian, expm_taylor};
use dqlab_core::matcore::{c, expm_generator, phase_distance, tensor, ComplexMatrix, HermitianEigen};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn propagator_is_unitary(h in arb_hermitian(6), t in -5.0..5.0f64) {
        let u = expm_generator(&h, t, 1.0).unwrap();
        prop_assert!(u.unitarity_defect() < 1e-12);
    }

    #[test]
    fn propagator_matches_taylor_oracle(h in arb_hermitian(5), t in -3.0..3.0f64, hbar in 0.5..2.0f64) {
        let u = expm_generator(&h, t, hbar).unwrap();
        prop_assert!(u.max_abs_diff(&expm_taylor(&h, t, hbar)) < 1e-10);
    }

    #[test]
    fn propagator_semigroup(h in arb_hermitian(4), s in -2.0..2.0f64, t in -2.0..2.0f64) {
        let eig = HermitianEigen::new(&h).unwrap();
        let lhs = &eig.propagator(s, 1.0) * &eig.propagator(t, 1.0);
        prop_assert!(lhs.max_abs_diff(&eig.propagator(s + t, 1.0)) < 1e-12);
    }

    #[test]
    fn exponential_semigroup_large(h in arb_hermitian(12), s in -5.0..5.0f64, t in -5.0..5.0f64) {
        let lhs = &expm_generator(&h, s, 1.0).unwrap() * &expm_generator(&h, t, 1.0).unwrap();
        prop_assert!((&lhs - &expm_generator(&h, s + t, 1.0).unwrap()).frobenius_norm() <= 1e-10);
    }

    #[test]
    fn taylor_oracle_dim_sixteen(h in arb_hermitian(16), t in -1.0..1.0f64) {
        let u = expm_generator(&h, t, 1.0).unwrap();
        prop_assert!((&u - &expm_taylor(&h, t, 1.0)).frobenius_norm() <= 1e-10);
    }

    #[test]
    fn eigenvalues_are_sorted_and_sum_to_trace(h in arb_hermitian(7)) {
        let ev = HermitianEigen::new(&h).unwrap();
        let ev = ev.eigenvalues();
        prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        let sum: f64 = ev.iter().sum();
        prop_assert!((sum - h.trace().re).abs() < 1e-12);
    }

    #[test]
    fn phase_distance_ignores_global_phase(h in arb_hermitian(4), phi in -6.0..6.0f64) {
        let u = expm_generator(&h, 1.0, 1.0).unwrap();
        let v = u.scale(c(phi.cos(), phi.sin()));
        prop_assert!(phase_distance(&v, &u) < 1e-12);
        prop_assert!(phase_distance(&u, &v) < 1e-12);
    }

    #[test]
    fn kron_mixed_product(a in arb_hermitian(2), b in arb_hermitian(3), x in arb_hermitian(2), y in arb_hermitian(3)) {
        let lhs = &tensor(&a, &b) * &tensor(&x, &y);
        let rhs = tensor(&(&a * &x), &(&b * &y));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }
}

#[test]
fn zero_time_is_identity() {
    let h = ComplexMatrix::from_real_rows([[1.0, 2.0], [2.0, -1.0]]);
    assert_eq!(expm_generator(&h, 0.0, 1.0).unwrap().max_abs_diff(&ComplexMatrix::identity(2)), 0.0);
}

#[test]
fn pauli_x_rotation() {
    let x = ComplexMatrix::from_real_rows([[0.0, 1.0], [1.0, 0.0]]);
    let t = 0.7;
    let u = expm_generator(&x, t, 1.0).unwrap();
    let expected = ComplexMatrix::from_fn(2, 2, |i, j| if i == j { c(t.cos(), 0.0) } else { c(0.0, -t.sin()) });
    assert!(u.max_abs_diff(&expected) < 1e-15);
}

#[test]
fn rejects_non_hermitian_and_bad_hbar() {
    let m = ComplexMatrix::from_real_rows([[0.0, 1.0], [0.0, 0.0]]);
    assert!(expm_generator(&m, 1.0, 1.0).is_err());
    let h = ComplexMatrix::identity(2);
    assert!(expm_generator(&h, 1.0, 0.0).is_err());
    assert!(expm_generator(&h, f64::NAN, 1.0).is_err());
}
