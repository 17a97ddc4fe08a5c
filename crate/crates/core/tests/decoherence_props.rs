mod common;

use common::arb_unit_pair;
use dqlab_core::decoherence::{
    bell_density_matrix, check_density, degenerate_dephased_state, dephased_state_at, level_measurement_stats,
    mc_dephase_bell, mc_dephase_degenerate, BellKind, DegenerateBellState, DephasingParams, NoiseModel,
    SublevelWeights,
};
use dqlab_core::matcore::{cr, StateVector};
use dqlab_core::singleatom::log_log_slope;
use proptest::prelude::*;

fn unit_noise() -> NoiseModel {
    NoiseModel::new(1.0, 1.0).unwrap()
}

fn arb_kind() -> impl Strategy<Value = BellKind> {
    prop_oneof![Just(BellKind::Plus0011), Just(BellKind::Plus0110)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mixtures_are_valid_states(kind in arb_kind(), (a1, a2) in arb_unit_pair(), (b1, b2) in arb_unit_pair(),
                                 w in prop::array::uniform4(-2.0..2.0f64)) {
        let state = DegenerateBellState::new(kind, a1, a2, b1, b2).unwrap();
        for weights in [SublevelWeights::zeeman(2.0).unwrap(), SublevelWeights(w)] {
            let rho = degenerate_dephased_state(&state, &weights).unwrap();
            check_density(&rho).unwrap();
        }
    }

    #[test]
    fn finite_time_states_are_valid(kind in arb_kind(), (a1, a2) in arb_unit_pair(), (b1, b2) in arb_unit_pair(), t in 0.0..5.0f64) {
        let state = DegenerateBellState::new(kind, a1, a2, b1, b2).unwrap();
        let weights = SublevelWeights::zeeman(2.0).unwrap().pair_weights();
        let rho = dephased_state_at(&state.amplitudes(), &weights, &unit_noise(), t).unwrap();
        check_density(&rho).unwrap();
    }

    #[test]
    fn level_statistics_unchanged_by_dephasing(kind in arb_kind(), (a1, a2) in arb_unit_pair(), (b1, b2) in arb_unit_pair()) {
        let state = DegenerateBellState::new(kind, a1, a2, b1, b2).unwrap();
        let pure = StateVector::new(state.amplitudes().to_vec()).unwrap().projector();
        let mixed = degenerate_dephased_state(&state, &SublevelWeights::zeeman(2.0).unwrap()).unwrap();
        let a = level_measurement_stats(&pure).unwrap();
        let b = level_measurement_stats(&mixed).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-15);
        prop_assert!((a.gg + a.ge + a.eg + a.ee - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_matrix_is_valid(t in 0.0..10.0f64, sign in prop_oneof![Just(1.0), Just(-1.0)]) {
        check_density(&bell_density_matrix(&unit_noise(), t, sign).unwrap()).unwrap();
    }
}

#[test]
fn exchange_mixture_keeps_pure_statistics() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let state = DegenerateBellState::new(BellKind::Plus0110, cr(s), cr(s), cr(s), cr(s)).unwrap();
    let rho = degenerate_dephased_state(&state, &SublevelWeights::zeeman(2.0).unwrap()).unwrap();
    let table = level_measurement_stats(&rho).unwrap();
    assert_eq!((table.gg, table.ee), (0.0, 0.0));
    assert!((table.ge - 0.5).abs() < 1e-15 && (table.eg - 0.5).abs() < 1e-15);
}

#[test]
fn bell_monte_carlo_matches_decay_law() {
    let p = DephasingParams::new(unit_noise(), vec![0.0, 0.1, 0.25, 0.5], 100_000, 100, 42).unwrap();
    let mc = mc_dephase_bell(1.0, &p).unwrap();
    for (k, &t) in p.t_grid().iter().enumerate() {
        let exact = bell_density_matrix(&p.noise, t, 1.0).unwrap()[(0, 3)].re;
        let got = mc.density_at(k)[(0, 3)].re;
        let (_, se) = mc.coherence(k, 2.0).unwrap();
        assert!((got - exact).abs() <= 3.0 * 0.5 * se + 1e-15, "t {t}: {got} vs {exact}");
    }
    let last = mc.density_at(3)[(0, 3)].re;
    assert!(((2.0 * last - (-1.0f64).exp()) / (-1.0f64).exp()).abs() <= 0.02);
}

#[test]
fn degenerate_monte_carlo_matches_component_rates() {
    let state = DegenerateBellState::new(BellKind::Plus0110, cr(0.6), cr(0.8), cr(0.8), cr(0.6)).unwrap();
    let weights = SublevelWeights::zeeman(2.0).unwrap();
    let p = DephasingParams::new(unit_noise(), vec![0.0, 0.5, 2.0], 20_000, 400, 7).unwrap();
    let mc = mc_dephase_degenerate(&state, &weights, &p).unwrap();
    for d in &mc.differences {
        for k in 0..3 {
            let (mean, se) = mc.coherence(k, *d).unwrap();
            let exact = p.noise.coherence(*d, p.t_grid()[k]);
            assert!((mean - exact).abs() <= 4.0 * se + 1e-12, "Δw {d} t {}: {mean} vs {exact}", p.t_grid()[k]);
        }
    }
    let (survivor, _) = mc.coherence(2, 0.0).unwrap();
    assert_eq!(survivor, 1.0);
    let analytic = dephased_state_at(&state.amplitudes(), &weights.pair_weights(), &p.noise, 2.0).unwrap();
    assert!(mc.density_at(2).max_abs_diff(&analytic) < 0.02);
}

#[test]
fn monte_carlo_error_scales_as_inverse_sqrt() {
    let counts = [1_000usize, 10_000, 100_000];
    let exact = (-1.0f64).exp();
    let reps = 16;
    let mut rms = Vec::new();
    for &n in &counts {
        let mut sq = 0.0;
        for r in 0..reps {
            let p = DephasingParams::new(unit_noise(), vec![0.0, 0.5], n, 50, 1_000 * r as u64 + 17).unwrap();
            let (mean, _) = mc_dephase_bell(1.0, &p).unwrap().coherence(1, 2.0).unwrap();
            sq += (mean - exact).powi(2);
        }
        rms.push((sq / reps as f64).sqrt());
    }
    let n: Vec<f64> = counts.iter().map(|&x| x as f64).collect();
    let slope = log_log_slope(&n, &rms).unwrap();
    assert!((slope + 0.5).abs() <= 0.1, "slope {slope}, rms {rms:?}");
}

#[test]
fn monte_carlo_is_thread_count_independent() {
    let p = DephasingParams::new(unit_noise(), vec![0.0, 0.3, 0.6], 5_000, 100, 99).unwrap();
    let a = mc_dephase_bell(-1.0, &p).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| mc_dephase_bell(-1.0, &p).unwrap());
    assert_eq!(a, b);
}
