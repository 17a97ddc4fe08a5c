#![allow(dead_code)]

use dqlab_core::matcore::{c, ComplexMatrix, C64};
use proptest::prelude::*;

/// `exp(−iHt/ħ)` by scaling and squaring of a truncated Taylor series.
pub fn expm_taylor(h: &ComplexMatrix, t: f64, hbar: f64) -> ComplexMatrix {
    let a = h.scale(c(0.0, -t / hbar));
    let norm = a.frobenius_norm();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let a = a.scale_real(0.5f64.powi(squarings as i32));
    let n = a.rows();
    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=30 {
        term = (&term * &a).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn hermitian_from(n: usize, re: &[f64], im: &[f64]) -> ComplexMatrix {
    let m = ComplexMatrix::from_fn(n, n, |i, j| c(re[i * n + j], im[i * n + j]));
    (&m + &m.adjoint()).scale_real(0.5)
}

pub fn arb_hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    (prop::collection::vec(-2.0..2.0f64, n * n), prop::collection::vec(-2.0..2.0f64, n * n))
        .prop_map(move |(re, im)| hermitian_from(n, &re, &im))
}

pub fn arb_complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| c(re, im))
}

pub fn arb_unit_pair() -> impl Strategy<Value = (C64, C64)> {
    (0.0..std::f64::consts::FRAC_PI_2, -3.2..3.2f64, -3.2..3.2f64)
        .prop_map(|(x, p, q)| (C64::from_polar(x.cos(), p), C64::from_polar(x.sin(), q)))
}
