mod common;

use common::arb_unit_pair;
use dqlab_core::matcore::{c, cr, phase_distance, ComplexMatrix};
use dqlab_core::singleatom::{
    expansion_residuals, hadamard_gate, ideal_hadamard, integrate_odes, log_log_slope, naive_hadamard_gate,
    naive_hadamard_prediction, rabi_amplitudes, reference_coupling, taylor_expand_gate, u_schrodinger, u_tot,
    HadamardSchedule, PhysParams, RabiAmplitudes,
};
use proptest::prelude::*;
use std::f64::consts::PI;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn zero_field_hadamard_for_any_ratio(ratio in 2.0..200.0f64, theta in 0.0..PI) {
        let p = PhysParams::new(1.0, ratio).unwrap().with_field(0.0, theta).unwrap();
        prop_assert!(phase_distance(&hadamard_gate(&p).unwrap(), &ideal_hadamard()) <= 1e-10);
    }

    #[test]
    fn naive_sequence_matches_block_phase_prediction(ratio in 2.0..200.0f64, rabi in 0.3..3.0f64) {
        let p = PhysParams::new(rabi, ratio * rabi).unwrap();
        let naive = naive_hadamard_gate(&p).unwrap();
        prop_assert!(naive.max_abs_diff(&naive_hadamard_prediction(&p)) < 1e-10);
    }

    #[test]
    fn field_gate_is_unitary(ratio in 2.0..120.0f64, r in 0.0..0.1f64, theta in 0.0..PI) {
        let p = PhysParams::new(1.0, ratio).unwrap().with_field(r, theta).unwrap();
        prop_assert!(hadamard_gate(&p).unwrap().unitarity_defect() < 1e-10);
        prop_assert!(u_tot(0.37, &p).unwrap().unitarity_defect() < 1e-12);
    }

    #[test]
    fn amplitudes_preserve_norm((a0, a1) in arb_unit_pair(), t in -20.0..20.0f64) {
        let p = PhysParams::new(1.0, 50.0).unwrap();
        let init = RabiAmplitudes::ground(a0, a1).unwrap();
        let out = rabi_amplitudes(t, &init, &p).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn integrator_agrees_with_propagator((a0, a1) in arb_unit_pair(), t in 0.0..10.0f64) {
        let p = PhysParams::new(1.0, 50.0).unwrap();
        let init = RabiAmplitudes::ground(a0, a1).unwrap();
        let exact = rabi_amplitudes(t, &init, &p).unwrap().to_array();
        let ode = integrate_odes(t, &init, &p, 0.0, &reference_coupling(&p)).unwrap().to_array();
        for (x, y) in exact.iter().zip(&ode) {
            prop_assert!((x - y).norm() < 1e-9);
        }
    }

    #[test]
    fn detuned_population_follows_generalised_rabi_formula(delta in -3.0..3.0f64, t in 0.0..12.0f64) {
        let p = PhysParams::new(1.0, 50.0).unwrap();
        let init = RabiAmplitudes::ground(cr(1.0), cr(0.0)).unwrap();
        let out = integrate_odes(t, &init, &p, delta, &reference_coupling(&p)).unwrap();
        let w = (1.0 + delta * delta).sqrt();
        let expected = (w * t / 2.0).sin().powi(2) / (w * w);
        prop_assert!((out.populations()[2] - expected).abs() < 1e-9);
    }
}

#[test]
fn zero_field_evolution_never_mixes_index_pairs() {
    let p = PhysParams::new(1.0, 37.0).unwrap();
    for k in 0..50 {
        let u = u_schrodinger(0.31 * k as f64, &p).unwrap();
        for (i, j) in [(0, 1), (0, 3), (1, 0), (1, 2), (2, 1), (2, 3), (3, 0), (3, 2)] {
            assert!(u[(i, j)].norm() < 1e-14);
        }
    }
}

#[test]
fn rabi_closed_form() {
    let p = PhysParams::new(1.0, 50.0).unwrap();
    let init = RabiAmplitudes::ground(cr(1.0), cr(0.0)).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..=200 {
        let t = 8.0 * PI * k as f64 / 200.0;
        let out = integrate_odes(t, &init, &p, 0.0, &reference_coupling(&p)).unwrap();
        worst = worst.max((out.populations()[2] - (t / 2.0).sin().powi(2)).abs());
    }
    assert!(worst <= 1e-8, "max error {worst:e}");
}

#[test]
fn naive_sequence_exact_only_at_multiples_of_eight() {
    let minus_i_h = ideal_hadamard().scale(c(0.0, -1.0));
    for ratio in [8.0, 16.0, 96.0, 200.0] {
        let p = PhysParams::new(1.0, ratio).unwrap();
        assert!(naive_hadamard_gate(&p).unwrap().max_abs_diff(&minus_i_h) < 1e-10);
    }
    for ratio in [4.0, 12.0, 100.0] {
        let p = PhysParams::new(1.0, ratio).unwrap();
        let gate = naive_hadamard_gate(&p).unwrap();
        assert!(gate.max_abs_diff(&minus_i_h) > 1.0);
        assert!(gate.max_abs_diff(&ideal_hadamard().scale(c(0.0, 1.0))) < 1e-10);
    }
    for ratio in [10.0, 7.3, 50.5] {
        let p = PhysParams::new(1.0, ratio).unwrap();
        assert!(phase_distance(&naive_hadamard_gate(&p).unwrap(), &ideal_hadamard()) > 1e-3);
    }
}

#[test]
fn free_evolution_is_unitary() {
    let p = PhysParams::new(1.0, 30.0).unwrap();
    let u = u_schrodinger(1.3, &p).unwrap();
    assert!(u.unitarity_defect() < 1e-12);
    assert!(u_schrodinger(0.0, &p).unwrap().max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
}

#[test]
fn schedule_signs() {
    let slow = HadamardSchedule::for_params(&PhysParams::new(1.0, 6.0).unwrap());
    assert!(!slow.requires_reverse_free_evolution());
    let fast = HadamardSchedule::for_params(&PhysParams::new(1.0, 96.0).unwrap());
    assert!(fast.requires_reverse_free_evolution());
    assert!((fast.trailing_free - (7.0 * PI / 192.0 - PI / 2.0)).abs() < 1e-15);
}

#[test]
fn expansion_residual_is_third_order() {
    let ratios = [1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 3e-2];
    for theta in [0.0, PI / 3.0] {
        let p = PhysParams::new(1.0, 96.0).unwrap().with_field(0.0, theta).unwrap();
        let exp = taylor_expand_gate(&p, 2).unwrap();
        assert!(exp.terms[0].max_abs_diff(&ideal_hadamard()) < 1e-10);
        let res = expansion_residuals(&p, &exp, &ratios).unwrap();
        let slope = log_log_slope(&ratios, &res).unwrap();
        assert!((slope - 3.0).abs() <= 0.2, "theta {theta}: slope {slope}");
    }
}

#[test]
fn first_order_term_is_anti_hermitian_after_phase() {
    let p = PhysParams::new(1.0, 40.0).unwrap().with_field(0.0, 0.7).unwrap();
    let exp = taylor_expand_gate(&p, 1).unwrap();
    let generator = &exp.terms[1] * &exp.terms[0].adjoint();
    let sum = &generator + &generator.adjoint();
    assert!(sum.max_abs() < 1e-7);
    assert!(generator.max_abs() > 1e-3);
}
