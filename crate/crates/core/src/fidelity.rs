//! Average gate fidelity over Haar-uniform pure states.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matcore::{c, ComplexMatrix, StateVector, C64, COMPOSED_TOL};
use crate::singleatom::{hadamard_gate, ideal_hadamard, PhysParams};

/// Root seed used when callers do not supply one.
pub const DEFAULT_SEED: u64 = 0xD5EED;
/// Smallest accepted Monte Carlo sample count.
pub const MIN_MC_SAMPLES: usize = 1000;
/// Samples drawn from one RNG stream. Fixing the batch layout independently of
/// the thread count keeps results reproducible.
const MC_BATCH: usize = 4096;
/// Largest field ratio accepted by [`fit_quadratic_loss`].
pub const MAX_FIT_RATIO: f64 = 0.03;

fn overlap_operator(target: &ComplexMatrix, actual: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !target.is_square() || target.shape() != actual.shape() {
        return Err(Error::validation(format!(
            "fidelity needs two square matrices of equal size, got {:?} and {:?}",
            target.shape(),
            actual.shape()
        )));
    }
    for (name, m) in [("target", target), ("actual", actual)] {
        let defect = m.unitarity_defect();
        if !(defect <= COMPOSED_TOL) {
            return Err(Error::validation(format!("{name} gate is not unitary: max|U†U - I| = {defect:.3e}")));
        }
    }
    Ok(&target.adjoint() * actual)
}

/// `(n + |Tr(target†·actual)|²) / (n(n+1))`.
pub fn avg_fidelity_closed(target: &ComplexMatrix, actual: &ComplexMatrix) -> Result<f64> {
    let m = overlap_operator(target, actual)?;
    let n = m.dim() as f64;
    Ok((n + m.trace().norm_sqr()) / (n * (n + 1.0)))
}

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Draws a Haar-uniform pure state as a normalised complex Gaussian vector.
pub fn haar_state<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    loop {
        let amps: Vec<C64> = (0..dim).map(|_| c(StandardNormal.sample(rng), StandardNormal.sample(rng))).collect();
        let mut v = StateVector::new(amps).expect("positive dimension");
        if v.normalize().is_ok() {
            return v;
        }
    }
}

/// Draws a Haar-random unitary from the QR decomposition of a complex
/// Gaussian matrix, with the phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = DMatrix::from_fn(dim, dim, |_, _| c(StandardNormal.sample(rng), StandardNormal.sample(rng)));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for z in q.column_mut(j).iter_mut() {
            *z *= phase;
        }
    }
    ComplexMatrix::from_fn(dim, dim, |i, j| q[(i, j)])
}

/// Average of `|⟨ψ|target†·actual|ψ⟩|²` over `n_samples` Haar states.
///
/// Samples are split into fixed-size batches, batch `b` drawing from a ChaCha8
/// stream seeded with `seed + b`. Batches run in parallel and are reduced in
/// index order, so the result is independent of the thread count.
pub fn avg_fidelity_mc(
    target: &ComplexMatrix,
    actual: &ComplexMatrix,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if n_samples < MIN_MC_SAMPLES {
        return Err(Error::validation(format!(
            "Monte Carlo fidelity needs at least {MIN_MC_SAMPLES} samples, got {n_samples}"
        )));
    }
    let m = overlap_operator(target, actual)?;
    let dim = m.dim();
    let n_batches = n_samples.div_ceil(MC_BATCH);
    let partial: Vec<(f64, f64)> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(b as u64));
            let count = MC_BATCH.min(n_samples - b * MC_BATCH);
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..count {
                let psi = haar_state(dim, &mut rng);
                let value = psi.inner(&m.apply(&psi)).norm_sqr();
                sum += value;
                sum_sq += value * value;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partial.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let n = n_samples as f64;
    let mean = sum / n;
    let variance = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(McEstimate { estimate: mean, stderr: (variance / n).sqrt(), n_samples, seed })
}

/// Closed form and Monte Carlo estimate side by side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FidelityReport {
    pub closed_form: f64,
    pub mc_estimate: f64,
    pub mc_stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
}

pub fn fidelity_report(
    target: &ComplexMatrix,
    actual: &ComplexMatrix,
    n_samples: usize,
    seed: u64,
) -> Result<FidelityReport> {
    let closed_form = avg_fidelity_closed(target, actual)?;
    let mc = avg_fidelity_mc(target, actual, n_samples, seed)?;
    Ok(FidelityReport { closed_form, mc_estimate: mc.estimate, mc_stderr: mc.stderr, n_samples, seed })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let nf = n as f64;
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut slope = 1.0;
            for _ in 0..100 {
                // Three-term recurrence leaves P_n in `p1` and P_{n-1} in `p0`.
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    (p0, p1) = (p1, ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k);
                }
                slope = nf * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / slope;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * slope * slope))
        })
        .collect()
}

/// Average fidelity of a single-qubit gate by product quadrature over the
/// Bloch sphere: Gauss–Legendre in `cos θ`, uniform in `φ`.
pub fn bloch_sphere_fidelity(
    target: &ComplexMatrix,
    actual: &ComplexMatrix,
    n_polar: usize,
    n_azimuth: usize,
) -> Result<f64> {
    let m = overlap_operator(target, actual)?;
    if m.dim() != 2 {
        return Err(Error::validation("Bloch-sphere quadrature is defined for 2x2 gates"));
    }
    if n_polar == 0 || n_azimuth == 0 {
        return Err(Error::validation("quadrature needs at least one node per axis"));
    }
    let mut total = 0.0;
    for (x, w) in gauss_legendre(n_polar) {
        let half = x.acos() / 2.0;
        for k in 0..n_azimuth {
            let phi = 2.0 * PI * k as f64 / n_azimuth as f64;
            let psi =
                StateVector::new(vec![c(half.cos(), 0.0), C64::from_polar(half.sin(), phi)]).expect("two amplitudes");
            total += w * psi.inner(&m.apply(&psi)).norm_sqr();
        }
    }
    Ok(total / (2.0 * n_azimuth as f64))
}

/// Quadratic coefficient `c₂` in `F ≈ 1 − c₂ r²` for the field-tolerant
/// Hadamard sequence, with `a = ħΩ/2`, `b = ħω/2`:
///
/// `c₂ = (458π²a² + 2(20−7π)πab + (8−4π+π²)b²) / (180b²)`.
pub fn fidelity_series_coefficient(omega: f64, rabi_frequency: f64, hbar: f64) -> Result<f64> {
    let positive = |x: f64| x > 0.0 && x.is_finite();
    if !positive(omega) || !positive(rabi_frequency) || !positive(hbar) {
        return Err(Error::validation("frequencies and ħ must be positive and finite"));
    }
    let a = hbar * rabi_frequency / 2.0;
    let b = hbar * omega / 2.0;
    let pi2 = PI * PI;
    Ok((458.0 * pi2 * a * a + 2.0 * (20.0 - 7.0 * PI) * PI * a * b + (8.0 - 4.0 * PI + pi2) * b * b) / (180.0 * b * b))
}

/// Least-squares fit of `1 − F = ĉ·r²`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticFit {
    pub c2_hat: f64,
    /// Largest `|1 − F − ĉr²| / (1 − F)` over points with non-zero loss.
    pub max_rel_residual: f64,
    pub ratios: Vec<f64>,
    pub fidelities: Vec<f64>,
}

/// Fidelity of [`hadamard_gate`] against the ideal Hadamard at each field
/// ratio, at angle `theta`, fitted to `1 − F = ĉ·r²`.
pub fn fit_quadratic_loss(p_base: &PhysParams, r_values: &[f64], theta: f64) -> Result<QuadraticFit> {
    let mut distinct: Vec<f64> = r_values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::validation("quadratic fit needs at least three distinct field ratios"));
    }
    if r_values.iter().any(|r| !(*r >= 0.0 && *r <= MAX_FIT_RATIO)) {
        return Err(Error::validation(format!("field ratios must lie in [0, {MAX_FIT_RATIO}]")));
    }
    let target = ideal_hadamard();
    let fidelities = r_values
        .par_iter()
        .map(|&r| {
            let p = p_base.with_field(r, theta)?;
            avg_fidelity_closed(&target, &hadamard_gate(&p)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let sxx: f64 = r_values.iter().map(|r| r.powi(4)).sum();
    if sxx == 0.0 {
        return Err(Error::validation("quadratic fit is degenerate: all field ratios are zero"));
    }
    let sxy: f64 = r_values.iter().zip(&fidelities).map(|(r, f)| r * r * (1.0 - f)).sum();
    let c2_hat = sxy / sxx;
    let max_rel_residual = r_values
        .iter()
        .zip(&fidelities)
        .filter(|(_, f)| **f < 1.0)
        .map(|(r, f)| ((1.0 - f) - c2_hat * r * r).abs() / (1.0 - f))
        .fold(0.0, f64::max);
    Ok(QuadraticFit { c2_hat, max_rel_residual, ratios: r_values.to_vec(), fidelities })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        let h = ideal_hadamard();
        assert!((avg_fidelity_closed(&h, &h).unwrap() - 1.0).abs() < 1e-15);
        let f = avg_fidelity_closed(&h, &ComplexMatrix::identity(4)).unwrap();
        assert!((f - 0.2).abs() < 1e-15);
        let phased = h.scale(C64::from_polar(1.0, 0.7));
        assert!((avg_fidelity_closed(&h, &phased).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_unitary() {
        let h = ideal_hadamard();
        let bad = h.scale_real(1.1);
        assert!(matches!(avg_fidelity_closed(&h, &bad), Err(Error::Validation(_))));
        assert!(avg_fidelity_closed(&h, &ComplexMatrix::identity(2)).is_err());
    }

    #[test]
    fn mc_needs_enough_samples() {
        let h = ideal_hadamard();
        assert!(avg_fidelity_mc(&h, &h, 999, 1).is_err());
    }

    #[test]
    fn mc_perfect_gate_is_one() {
        let h = ideal_hadamard();
        let est = avg_fidelity_mc(&h, &h, 5000, DEFAULT_SEED).unwrap();
        assert!((est.estimate - 1.0).abs() < 1e-12);
        assert!(est.stderr < 1e-12);
    }

    #[test]
    fn mc_is_seed_deterministic() {
        let h = ideal_hadamard();
        let i = ComplexMatrix::identity(4);
        let a = avg_fidelity_mc(&h, &i, 10_000, 7).unwrap();
        let b = avg_fidelity_mc(&h, &i, 10_000, 7).unwrap();
        assert_eq!(a, b);
        let other = avg_fidelity_mc(&h, &i, 10_000, 8).unwrap();
        assert_ne!(a.estimate, other.estimate);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(5);
        let weight_sum: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((weight_sum - 2.0).abs() < 1e-14);
        let x8: f64 = rule.iter().map(|(x, w)| w * x.powi(8)).sum();
        assert!((x8 - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn series_coefficient_values() {
        let limit = fidelity_series_coefficient(1e9, 1e-3, 1.0).unwrap();
        let leading = (8.0 - 4.0 * PI + PI * PI) / 180.0;
        assert!((limit - leading).abs() < 1e-9);
        assert!((leading - 0.029_462_4).abs() < 1e-7);
        let equal = fidelity_series_coefficient(1.0, 1.0, 1.0).unwrap();
        let direct = (458.0 * PI * PI + 2.0 * (20.0 - 7.0 * PI) * PI + (8.0 - 4.0 * PI + PI * PI)) / 180.0;
        assert!((equal - direct).abs() < 1e-12);
        assert!(fidelity_series_coefficient(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn fit_rejects_degenerate_inputs() {
        let p = PhysParams::new(1.0, 96.0).unwrap();
        assert!(fit_quadratic_loss(&p, &[0.0, 0.0, 0.0], 0.0).is_err());
        assert!(fit_quadratic_loss(&p, &[1e-3, 1e-3, 2e-3], 0.0).is_err());
        assert!(fit_quadratic_loss(&p, &[1e-3, 2e-3, 0.05], 0.0).is_err());
    }
}
