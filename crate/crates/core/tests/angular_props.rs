use dqlab_core::angular::{
    dipole_coupling_matrix, lande_factor, wigner3j, zeeman_matrix, AngularLevel, DipoleScenario, HalfInt,
};
use proptest::prelude::*;

fn h(twice: i32) -> HalfInt {
    HalfInt::from_doubled(twice)
}

fn w3j(j: [i32; 3], m: [i32; 3]) -> f64 {
    wigner3j(h(j[0]), h(j[1]), h(j[2]), h(m[0]), h(m[1]), h(m[2])).unwrap()
}

fn fact(n: i32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Projections `-j, -j+1, …, j` in doubled units.
fn projections(tj: i32) -> impl Iterator<Item = i32> {
    (0..=tj).map(move |k| -tj + 2 * k)
}

/// Valid `(2j1, 2j2, 2j3, 2m1, 2m2)` with `j ≤ 3`.
fn arb_symbol() -> impl Strategy<Value = ([i32; 3], [i32; 3])> {
    (0..=6i32, 0..=6i32)
        .prop_flat_map(|(a, b)| {
            let lo = (a - b).abs();
            let hi = a + b;
            (Just(a), Just(b), (0..=(hi - lo) / 2).prop_map(move |k| lo + 2 * k))
        })
        .prop_flat_map(|(a, b, c)| (Just([a, b, c]), 0..=a, 0..=b))
        .prop_map(|(j, k1, k2)| {
            let m1 = -j[0] + 2 * k1;
            let m2 = -j[1] + 2 * k2;
            (j, [m1, m2, -m1 - m2])
        })
        .prop_filter("|m3| ≤ j3", |(j, m)| m[2].abs() <= j[2])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cyclic_permutation_invariance((j, m) in arb_symbol()) {
        let base = w3j(j, m);
        prop_assert!((base - w3j([j[1], j[2], j[0]], [m[1], m[2], m[0]])).abs() < 1e-14);
        prop_assert!((base - w3j([j[2], j[0], j[1]], [m[2], m[0], m[1]])).abs() < 1e-14);
    }

    #[test]
    fn odd_permutation_and_reflection_sign((j, m) in arb_symbol()) {
        let base = w3j(j, m);
        let sign = if ((j[0] + j[1] + j[2]) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((sign * base - w3j([j[1], j[0], j[2]], [m[1], m[0], m[2]])).abs() < 1e-14);
        prop_assert!((sign * base - w3j(j, [-m[0], -m[1], -m[2]])).abs() < 1e-14);
    }

    #[test]
    fn zeeman_is_linear_in_field(b in -2.0..2.0f64, k in -3.0..3.0f64, theta in 0.0..3.2f64) {
        let (g, e) = (AngularLevel::s_half(), AngularLevel::p_half());
        let one = zeeman_matrix(&g, &e, b, theta, 2.0, 1.0).unwrap();
        let scaled = zeeman_matrix(&g, &e, k * b, theta, 2.0, 1.0).unwrap();
        prop_assert!(scaled.max_abs_diff(&one.scale_real(k)) < 1e-14);
        prop_assert!(one.hermitian_defect() < 1e-15);
    }

    #[test]
    fn zeeman_is_traceless_and_linear_in_field_direction(theta in 0.0..6.3f64, b in 0.0..2.0f64) {
        let (g, e) = (AngularLevel::s_half(), AngularLevel::p_half());
        let z = |t: f64| zeeman_matrix(&g, &e, b, t, 2.0, 1.0).unwrap();
        let combined = &z(0.0).scale_real(theta.cos()) + &z(std::f64::consts::FRAC_PI_2).scale_real(theta.sin());
        prop_assert!(z(theta).max_abs_diff(&combined) < 1e-14);
        prop_assert!(z(theta).trace().norm() < 1e-15);
    }

    #[test]
    fn zeeman_spectrum_is_angle_independent(theta in 0.0..6.3f64, g_s in 1.5..2.5f64) {
        let (g, e) = (AngularLevel::s_half(), AngularLevel::p_three_halves());
        let axial = zeeman_matrix(&g, &e, 0.4, 0.0, g_s, 1.0).unwrap().hermitian_eigenvalues().unwrap();
        let tilted = zeeman_matrix(&g, &e, 0.4, theta, g_s, 1.0).unwrap().hermitian_eigenvalues().unwrap();
        for (a, b) in axial.iter().zip(&tilted) {
            prop_assert!((a - b).abs() < 1e-13);
        }
    }
}

#[test]
fn orthogonality() {
    for tj1 in 0..=8i32 {
        for tj2 in 0..=8 {
            let lo = (tj1 - tj2).abs();
            for tj3 in (lo..=tj1 + tj2).step_by(2) {
                for tj3p in (lo..=tj1 + tj2).step_by(2) {
                    for m3 in projections(tj3) {
                        for m3p in projections(tj3p) {
                            let mut sum = 0.0;
                            for m1 in projections(tj1) {
                                for m2 in projections(tj2) {
                                    sum += w3j([tj1, tj2, tj3], [m1, m2, m3]) * w3j([tj1, tj2, tj3p], [m1, m2, m3p]);
                                }
                            }
                            let expected = if tj3 == tj3p && m3 == m3p { 1.0 / f64::from(tj3 + 1) } else { 0.0 };
                            assert!((sum - expected).abs() < 1e-13, "{tj1} {tj2} {tj3} {tj3p} {m3} {m3p}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn stretched_coupling_closed_form() {
    for tj1 in 0..=6i32 {
        for tj2 in 0..=6 {
            let tj = tj1 + tj2;
            for m1 in projections(tj1) {
                for m2 in projections(tj2) {
                    let tm = m1 + m2;
                    let phase = if ((tj1 - tj2 + tm) / 2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    let expected = phase
                        * (fact(tj1) * fact(tj2) * fact((tj + tm) / 2) * fact((tj - tm) / 2)
                            / (fact(tj + 1)
                                * fact((tj1 + m1) / 2)
                                * fact((tj1 - m1) / 2)
                                * fact((tj2 + m2) / 2)
                                * fact((tj2 - m2) / 2)))
                        .sqrt();
                    let got = w3j([tj1, tj2, tj], [m1, m2, -tm]);
                    assert!((got - expected).abs() < 1e-14, "{tj1} {tj2} {m1} {m2}: {got} vs {expected}");
                }
            }
        }
    }
}

#[test]
fn rank_one_diagonal_closed_form() {
    for tj in 1..=7 {
        let j = f64::from(tj) / 2.0;
        for tm in projections(tj) {
            let m = f64::from(tm) / 2.0;
            let phase = if ((tj - tm) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            let expected = phase * m / ((2.0 * j + 1.0) * (j + 1.0) * j).sqrt();
            assert!((w3j([tj, tj, 2], [tm, -tm, 0]) - expected).abs() < 1e-14);
        }
    }
}

#[test]
fn half_to_half_coupling_is_diagonal() {
    let s = DipoleScenario::new(AngularLevel::s_half(), AngularLevel::p_half(), 1.3, 0.7).unwrap();
    let m = dipole_coupling_matrix(&s);
    let expected = 1.3 * 0.7 / 6f64.sqrt();
    for i in 0..2 {
        for j in 0..2 {
            let target = if i == j { expected } else { 0.0 };
            assert!((m[(i, j)].norm() - target).abs() < 1e-15);
        }
    }
}

#[test]
fn half_to_three_halves_couples_equal_projections() {
    let s = DipoleScenario::new(AngularLevel::s_half(), AngularLevel::p_three_halves(), 1.0, 1.0).unwrap();
    let m = dipole_coupling_matrix(&s);
    assert_eq!(m.shape(), (2, 4));
    let (mg, me) = (AngularLevel::s_half().m_list(), AngularLevel::p_three_halves().m_list());
    for (i, a) in mg.iter().enumerate() {
        for (j, b) in me.iter().enumerate() {
            assert_eq!(m[(i, j)].norm() > 0.0, a == b);
        }
    }
}

#[test]
fn lande_values() {
    assert!((lande_factor(&AngularLevel::s_half(), 2.0).unwrap() - 2.0).abs() < 1e-15);
    assert!((lande_factor(&AngularLevel::p_half(), 2.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    assert!((lande_factor(&AngularLevel::p_three_halves(), 2.0).unwrap() - 4.0 / 3.0).abs() < 1e-15);
}
