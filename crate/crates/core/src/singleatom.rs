//! Single-atom dynamics on the `²S₁/₂ → ²P₁/₂` transition.
//!
//! States live on the basis `(α₀, α₁, β₀, β₁)`: ground `m = -½, +½` followed
//! by excited `m = -½, +½`. The Hadamard sequences here act identically on
//! the two `m` pairs.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::angular::{zeeman_matrix_with, AngularLevel, ZeemanConvention};
use crate::error::{Error, Result};
use crate::matcore::{c, cr, expm_generator, ComplexMatrix, StateVector, C64};

/// Field ratios above this leave the perturbative regime.
pub const PERTURBATIVE_LIMIT: f64 = 0.1;

/// Parameters of a single driven atom.
///
/// Times are in the same unit as `1/rabi_frequency`. The magnetic field enters
/// through the dimensionless ratio `field_ratio = μ_B B0 / (ħΩ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysParams {
    rabi_frequency: f64,
    transition_frequency: f64,
    field_ratio: f64,
    field_angle: f64,
    spin_g_factor: f64,
    hbar: f64,
    zeeman_convention: ZeemanConvention,
}

impl PhysParams {
    /// Field-free parameters with `g_s = 2` and `ħ = 1`.
    pub fn new(rabi_frequency: f64, transition_frequency: f64) -> Result<Self> {
        let p = Self {
            rabi_frequency,
            transition_frequency,
            field_ratio: 0.0,
            field_angle: 0.0,
            spin_g_factor: 2.0,
            hbar: 1.0,
            zeeman_convention: ZeemanConvention::Projection,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_field(mut self, ratio: f64, angle: f64) -> Result<Self> {
        self.field_ratio = ratio;
        self.field_angle = angle;
        self.validate()?;
        Ok(self)
    }

    pub fn with_spin_g_factor(mut self, g_s: f64) -> Result<Self> {
        self.spin_g_factor = g_s;
        self.validate()?;
        Ok(self)
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        self.hbar = hbar;
        self.validate()?;
        Ok(self)
    }

    pub fn with_zeeman_convention(mut self, convention: ZeemanConvention) -> Self {
        self.zeeman_convention = convention;
        self
    }

    fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !positive(self.rabi_frequency) {
            return Err(Error::validation("Rabi frequency must be positive and finite"));
        }
        if !positive(self.transition_frequency) {
            return Err(Error::validation("transition frequency must be positive and finite"));
        }
        if !(self.field_ratio >= 0.0) || !self.field_ratio.is_finite() {
            return Err(Error::validation("field ratio must be finite and non-negative"));
        }
        if !(0.0..=PI).contains(&self.field_angle) {
            return Err(Error::validation("field angle must lie in [0, π]"));
        }
        if !positive(self.spin_g_factor) {
            return Err(Error::validation("spin g-factor must be positive and finite"));
        }
        if !positive(self.hbar) {
            return Err(Error::validation("ħ must be positive and finite"));
        }
        Ok(())
    }

    pub fn rabi_frequency(&self) -> f64 {
        self.rabi_frequency
    }

    pub fn transition_frequency(&self) -> f64 {
        self.transition_frequency
    }

    pub fn field_ratio(&self) -> f64 {
        self.field_ratio
    }

    pub fn field_angle(&self) -> f64 {
        self.field_angle
    }

    pub fn spin_g_factor(&self) -> f64 {
        self.spin_g_factor
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn zeeman_convention(&self) -> ZeemanConvention {
        self.zeeman_convention
    }

    /// `ω/Ω`.
    pub fn frequency_ratio(&self) -> f64 {
        self.transition_frequency / self.rabi_frequency
    }

    pub fn is_perturbative(&self) -> bool {
        self.field_ratio <= PERTURBATIVE_LIMIT
    }
}

/// Amplitudes `(α₀, α₁)` of the ground pair and `(β₀, β₁)` of the excited pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RabiAmplitudes {
    pub alpha: [C64; 2],
    pub beta: [C64; 2],
}

impl RabiAmplitudes {
    /// Checks normalisation to within `1e-10`.
    pub fn new(alpha: [C64; 2], beta: [C64; 2]) -> Result<Self> {
        let a = Self { alpha, beta };
        let norm = a.norm_sqr();
        if !((norm - 1.0).abs() <= 1e-10) {
            return Err(Error::validation(format!("amplitudes are not normalised: Σ|·|² = {norm}")));
        }
        Ok(a)
    }

    pub fn ground(alpha0: C64, alpha1: C64) -> Result<Self> {
        Self::new([alpha0, alpha1], [C64::ZERO; 2])
    }

    pub fn to_array(&self) -> [C64; 4] {
        [self.alpha[0], self.alpha[1], self.beta[0], self.beta[1]]
    }

    pub fn from_array(v: [C64; 4]) -> Self {
        Self { alpha: [v[0], v[1]], beta: [v[2], v[3]] }
    }

    pub fn to_state(&self) -> StateVector {
        StateVector::new(self.to_array().to_vec()).expect("four amplitudes")
    }

    pub fn populations(&self) -> [f64; 4] {
        self.to_array().map(|z| z.norm_sqr())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.populations().iter().sum()
    }
}

/// `(ħΩ/2)` times the swap of the ground and excited pairs.
pub fn h_int(p: &PhysParams) -> ComplexMatrix {
    interaction_hamiltonian(p.hbar * p.rabi_frequency)
}

fn interaction_hamiltonian(rabi_energy: f64) -> ComplexMatrix {
    let half = rabi_energy / 2.0;
    ComplexMatrix::from_fn(4, 4, |i, j| if i.abs_diff(j) == 2 { cr(half) } else { C64::ZERO })
}

/// Free evolution `diag(e^{iωt/2}, e^{iωt/2}, e^{-iωt/2}, e^{-iωt/2})`.
pub fn u0(t: f64, p: &PhysParams) -> ComplexMatrix {
    let g = C64::from_polar(1.0, p.transition_frequency * t / 2.0);
    ComplexMatrix::from_diagonal(&[g, g, g.conj(), g.conj()])
}

/// Bare-atom Hamiltonian whose propagator is [`u0`].
pub fn h0(p: &PhysParams) -> ComplexMatrix {
    let e = p.hbar * p.transition_frequency / 2.0;
    ComplexMatrix::from_diagonal(&[cr(-e), cr(-e), cr(e), cr(e)])
}

/// Zeeman Hamiltonian for the current field ratio and angle.
pub fn h_field(p: &PhysParams) -> Result<ComplexMatrix> {
    let field_energy = p.field_ratio * p.hbar * p.rabi_frequency;
    zeeman_matrix_with(
        &AngularLevel::s_half(),
        &AngularLevel::p_half(),
        field_energy,
        p.field_angle,
        p.spin_g_factor,
        1.0,
        p.zeeman_convention,
    )
}

/// Field-free Schrödinger-picture propagator `U₀(t)·exp(-iH_int t/ħ)`. The
/// field ratio in `p` is ignored.
pub fn u_schrodinger(t: f64, p: &PhysParams) -> Result<ComplexMatrix> {
    Ok(&u0(t, p) * &expm_generator(&h_int(p), t, p.hbar)?)
}

/// Interaction-picture amplitudes at time `t`, field ignored.
pub fn rabi_amplitudes(t: f64, initial: &RabiAmplitudes, p: &PhysParams) -> Result<RabiAmplitudes> {
    let u = expm_generator(&h_int(p), t, p.hbar)?;
    let out = u.apply(&initial.to_state());
    let a = out.amplitudes();
    Ok(RabiAmplitudes::from_array([a[0], a[1], a[2], a[3]]))
}

/// Steps per shortest oscillation period used by [`integrate_odes`]; four
/// times finer than the 200-per-period ceiling.
const RK4_STEPS_PER_PERIOD: f64 = 800.0;
const RK4_MAX_STEPS: f64 = 1e9;

/// Fixed-step RK4 integration of the rotating-wave amplitude equations
///
/// `i dα_i/dt = Σ_j β_j e^{iδt} Ω_ij / (2ħ)`,
/// `i dβ_j/dt = Σ_i α_i e^{-iδt} Ω_ij* / (2ħ)`,
///
/// where `coupling` is the 2×2 block `Ω_ij` in energy units (for the
/// reference transition, `ħΩ` on the diagonal).
pub fn integrate_odes(
    t: f64,
    initial: &RabiAmplitudes,
    p: &PhysParams,
    delta: f64,
    coupling: &ComplexMatrix,
) -> Result<RabiAmplitudes> {
    if coupling.shape() != (2, 2) {
        return Err(Error::validation(format!(
            "coupling block must be 2x2, got {}x{}",
            coupling.rows(),
            coupling.cols()
        )));
    }
    if !t.is_finite() || !delta.is_finite() || !coupling.max_abs().is_finite() {
        return Err(Error::validation("time, detuning and coupling must be finite"));
    }
    let rate = (coupling.max_abs() / p.hbar).max(delta.abs());
    if rate == 0.0 || t == 0.0 {
        return Ok(*initial);
    }
    let max_step = 2.0 * PI / (RK4_STEPS_PER_PERIOD * rate);
    let n = (t.abs() / max_step).ceil();
    if !(n <= RK4_MAX_STEPS) {
        return Err(Error::config(format!(
            "integration needs {n:.3e} RK4 steps (max step {max_step:.3e}); reduce the time span"
        )));
    }
    let n = n as usize;
    let dt = t / n as f64;
    let k = coupling.scale_real(0.5 / p.hbar);
    let rhs = |time: f64, y: &[C64; 4]| -> [C64; 4] {
        let fwd = C64::from_polar(1.0, delta * time);
        let minus_i = c(0.0, -1.0);
        let mut out = [C64::ZERO; 4];
        for i in 0..2 {
            out[i] = minus_i * fwd * (k[(i, 0)] * y[2] + k[(i, 1)] * y[3]);
            out[2 + i] = minus_i * fwd.conj() * (k[(0, i)].conj() * y[0] + k[(1, i)].conj() * y[1]);
        }
        out
    };
    let axpy = |y: &[C64; 4], s: f64, d: &[C64; 4]| -> [C64; 4] { std::array::from_fn(|i| y[i] + d[i] * s) };
    let mut y = initial.to_array();
    for step in 0..n {
        let t0 = step as f64 * dt;
        let k1 = rhs(t0, &y);
        let k2 = rhs(t0 + dt / 2.0, &axpy(&y, dt / 2.0, &k1));
        let k3 = rhs(t0 + dt / 2.0, &axpy(&y, dt / 2.0, &k2));
        let k4 = rhs(t0 + dt, &axpy(&y, dt, &k3));
        y = std::array::from_fn(|i| y[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0));
    }
    Ok(RabiAmplitudes::from_array(y))
}

/// Coupling block of the reference transition in energy units, `ħΩ·I₂`.
pub fn reference_coupling(p: &PhysParams) -> ComplexMatrix {
    ComplexMatrix::identity(2).scale_real(p.hbar * p.rabi_frequency)
}

/// Free evolution in the field, `exp(-i(H₀ + H_B)t/ħ)`.
pub fn u_prime(t: f64, p: &PhysParams) -> Result<ComplexMatrix> {
    expm_generator(&(&h0(p) + &h_field(p)?), t, p.hbar)
}

/// Driven evolution in the field, `U₀(t)·exp(-i(H_int + H_B)t/ħ)`.
pub fn u_tot(t: f64, p: &PhysParams) -> Result<ComplexMatrix> {
    let generator = &h_int(p) + &h_field(p)?;
    Ok(&u0(t, p) * &expm_generator(&generator, t, p.hbar)?)
}

/// The ideal degenerate Hadamard: a Hadamard applied to each `m` pair.
pub fn ideal_hadamard() -> ComplexMatrix {
    ComplexMatrix::from_real_rows([
        [1.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 1.0],
        [1.0, 0.0, -1.0, 0.0],
        [0.0, 1.0, 0.0, -1.0],
    ])
    .scale_real(FRAC_1_SQRT_2)
}

/// Segment durations of the field-tolerant Hadamard sequence
/// `U′(t₃)·U_tot(t₂)·U′(t₁)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HadamardSchedule {
    /// `3π/(2ω)`, applied first.
    pub leading_free: f64,
    /// `π/(2Ω)`.
    pub pulse: f64,
    /// `7π/(2ω) - π/(2Ω)`, applied last.
    pub trailing_free: f64,
}

impl HadamardSchedule {
    pub fn for_params(p: &PhysParams) -> Self {
        let w = p.transition_frequency;
        let rabi = p.rabi_frequency;
        Self {
            leading_free: 3.0 * PI / (2.0 * w),
            pulse: PI / (2.0 * rabi),
            trailing_free: 7.0 * PI / (2.0 * w) - PI / (2.0 * rabi),
        }
    }

    /// True when the trailing segment is negative (`ω > 7Ω`), i.e. the free
    /// evolution must be undone rather than waited out.
    pub fn requires_reverse_free_evolution(&self) -> bool {
        self.trailing_free < 0.0
    }
}

/// The sequence `U′(7π/2ω − π/2Ω)·U_tot(π/2Ω)·U′(3π/2ω)` with its global phase
/// `i` removed, so that it equals [`ideal_hadamard`] at zero field for every
/// `ω/Ω`.
///
/// The trailing segment is negative whenever `ω > 7Ω`; it is evaluated as the
/// inverse free evolution (see [`HadamardSchedule::requires_reverse_free_evolution`]).
pub fn hadamard_gate(p: &PhysParams) -> Result<ComplexMatrix> {
    hadamard_gate_at_ratio(p, p.field_ratio)
}

/// [`hadamard_gate`] at an arbitrary signed field ratio, used for finite
/// differences around zero field.
fn hadamard_gate_at_ratio(p: &PhysParams, ratio: f64) -> Result<ComplexMatrix> {
    let mut q = *p;
    q.field_ratio = ratio;
    let s = HadamardSchedule::for_params(&q);
    let seq = &(&u_prime(s.trailing_free, &q)? * &u_tot(s.pulse, &q)?) * &u_prime(s.leading_free, &q)?;
    Ok(seq.scale(c(0.0, -1.0)))
}

/// The field-free sequence `U₀(3π/2ω)·U(π/2Ω)·U₀(3π/2ω)` composed literally.
///
/// Equals `-i` times [`ideal_hadamard`] only when `ω/Ω` is a multiple of 8;
/// otherwise the two pairs carry residual phases `e^{±iδ}` with
/// [`naive_block_phase`] `δ`.
pub fn naive_hadamard_gate(p: &PhysParams) -> Result<ComplexMatrix> {
    let free = u0(3.0 * PI / (2.0 * p.transition_frequency), p);
    let pulse = u_schrodinger(PI / (2.0 * p.rabi_frequency), p)?;
    Ok(&(&free * &pulse) * &free)
}

/// Residual phase `δ = ωπ/(4Ω)` of [`naive_hadamard_gate`], reduced to `(-π, π]`.
pub fn naive_block_phase(p: &PhysParams) -> f64 {
    let raw = p.transition_frequency * PI / (4.0 * p.rabi_frequency);
    let wrapped = raw.rem_euclid(2.0 * PI);
    if wrapped > PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}

/// Closed-form prediction for [`naive_hadamard_gate`]:
/// `-i·diag(e^{iδ}I₂, e^{-iδ}I₂)·Ĥ`.
pub fn naive_hadamard_prediction(p: &PhysParams) -> ComplexMatrix {
    let g = C64::from_polar(1.0, naive_block_phase(p));
    let phases = ComplexMatrix::from_diagonal(&[g, g, g.conj(), g.conj()]);
    (&phases * &ideal_hadamard()).scale(c(0.0, -1.0))
}

/// Field-ratio steps of the Richardson tableau.
pub const TAYLOR_STEPS: [f64; 3] = [1e-3, 5e-4, 2.5e-4];
const RICHARDSON_TOL: f64 = 1e-6;

/// Coefficients `U^(k)` of `U_Had(r) = Σ_k r^k U^(k)` about `r = 0`.
#[derive(Clone, Debug)]
pub struct TaylorExpansion {
    pub terms: Vec<ComplexMatrix>,
    /// Per order, the spread between the two first-level Richardson estimates.
    pub richardson_spread: Vec<f64>,
}

/// Extracts `U^(0) … U^(order)` (`order ≤ 2`) by central differences in the
/// field ratio with two levels of Richardson extrapolation over
/// [`TAYLOR_STEPS`]. The field ratio in `p` is ignored.
pub fn taylor_expand_gate(p: &PhysParams, order: usize) -> Result<TaylorExpansion> {
    if order > 2 {
        return Err(Error::validation("expansion order must be 0, 1 or 2"));
    }
    let u_zero = hadamard_gate_at_ratio(p, 0.0)?;
    let mut terms = vec![u_zero.clone()];
    let mut spread = vec![0.0];
    if order == 0 {
        return Ok(TaylorExpansion { terms, richardson_spread: spread });
    }
    let mut first = Vec::with_capacity(3);
    let mut second = Vec::with_capacity(3);
    for &h in &TAYLOR_STEPS {
        let plus = hadamard_gate_at_ratio(p, h)?;
        let minus = hadamard_gate_at_ratio(p, -h)?;
        first.push((&plus - &minus).scale_real(1.0 / (2.0 * h)));
        let curvature = &(&plus + &minus) - &u_zero.scale_real(2.0);
        second.push(curvature.scale_real(1.0 / (2.0 * h * h)));
    }
    for (k, estimates) in [(1, first), (2, second)].into_iter().take(order) {
        let (value, spread_k) = richardson(&estimates);
        let tol = RICHARDSON_TOL * value.max_abs().max(1.0);
        if !(spread_k <= tol) {
            return Err(Error::numerical(format!(
                "Richardson tableau for order {k} did not converge: spread {spread_k:.3e} > {tol:.1e} \
                 with steps {TAYLOR_STEPS:?}"
            )));
        }
        terms.push(value);
        spread.push(spread_k);
    }
    Ok(TaylorExpansion { terms, richardson_spread: spread })
}

/// Two levels of Richardson extrapolation on estimates at `h, h/2, h/4` with
/// even error series. Returns the extrapolated value and the spread between
/// the first-level estimates.
fn richardson(d: &[ComplexMatrix]) -> (ComplexMatrix, f64) {
    let r1a = (&d[1].scale_real(4.0) - &d[0]).scale_real(1.0 / 3.0);
    let r1b = (&d[2].scale_real(4.0) - &d[1]).scale_real(1.0 / 3.0);
    let spread = r1a.max_abs_diff(&r1b);
    let r2 = (&r1b.scale_real(16.0) - &r1a).scale_real(1.0 / 15.0);
    (r2, spread)
}

/// Closed-form first-order coefficient as printed for the Hadamard sequence,
/// evaluated at the frequencies and angle in `p`.
pub fn printed_first_order(p: &PhysParams) -> ComplexMatrix {
    let a = p.hbar * p.rabi_frequency / 2.0;
    let b = p.hbar * p.transition_frequency / 2.0;
    let (s, co) = p.field_angle.sin_cos();
    let k = 12.0 * 2f64.sqrt() * b;
    let ea = ((PI - 4.0) * b - 30.0 * PI * a) / k;
    let eb = PI * (b - 24.0 * a) / k;
    let ec = PI * (16.0 * a + b) / k;
    let ed = (10.0 * PI * a + (PI - 4.0) * b) / k;
    ComplexMatrix::from_real_rows([
        [-ea * co, ea * s, -eb * co, eb * s],
        [ea * s, ea * co, eb * s, eb * co],
        [ec * co, -ec * s, -ed * co, ed * s],
        [-ec * s, -ec * co, ed * s, ed * co],
    ])
    .scale(c(0.0, 1.0))
}

/// Closed-form second-order coefficient as printed for the Hadamard sequence.
pub fn printed_second_order(p: &PhysParams) -> ComplexMatrix {
    let a = p.hbar * p.rabi_frequency / 2.0;
    let b = p.hbar * p.transition_frequency / 2.0;
    let k = 288.0 * 2f64.sqrt() * b * b;
    let pi2 = PI * PI;
    let poly = 16.0 - 4.0 * PI + pi2;
    let ea = PI * (900.0 * PI * a * a - 60.0 * (PI - 4.0) * a * b + (PI - 4.0) * b * b) / k;
    let eb = (576.0 * pi2 * a * a - 48.0 * pi2 * a * b + poly * b * b) / k;
    let ec = (256.0 * pi2 * a * a + 32.0 * pi2 * a * b + poly * b * b) / k;
    let ed = PI * (100.0 * PI * a * a + 20.0 * (PI - 4.0) * a * b + (PI - 4.0) * b * b) / k;
    ComplexMatrix::from_real_rows([
        [-ea, 0.0, -eb, 0.0],
        [0.0, -ea, 0.0, -eb],
        [-ec, 0.0, ed, 0.0],
        [0.0, -ec, 0.0, ed],
    ])
}

/// One entry of a numeric-versus-printed coefficient comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntryComparison {
    pub order: usize,
    pub row: usize,
    pub col: usize,
    pub numeric: C64,
    pub printed: C64,
    pub abs_error: f64,
    /// `abs_error / max(|printed|, |numeric|)`, zero when both vanish.
    pub rel_error: f64,
    pub within_tolerance: bool,
}

/// Relative tolerance for agreement with the printed coefficients.
pub const PRINTED_MATCH_TOL: f64 = 1e-5;
/// Entries smaller than this are compared absolutely.
const PRINTED_ZERO_FLOOR: f64 = 1e-9;

/// Compares `expansion.terms[1..]` with [`printed_first_order`] and
/// [`printed_second_order`] entry by entry.
pub fn compare_with_printed(p: &PhysParams, expansion: &TaylorExpansion) -> Vec<EntryComparison> {
    let printed = [printed_first_order(p), printed_second_order(p)];
    let mut out = Vec::new();
    for (order, numeric) in expansion.terms.iter().enumerate().skip(1) {
        let reference = &printed[order - 1];
        for row in 0..4 {
            for col in 0..4 {
                let n = numeric[(row, col)];
                let r = reference[(row, col)];
                let abs_error = (n - r).norm();
                let scale = n.norm().max(r.norm());
                let rel_error = if scale > 0.0 { abs_error / scale } else { 0.0 };
                let within_tolerance = rel_error <= PRINTED_MATCH_TOL || abs_error <= PRINTED_ZERO_FLOOR;
                out.push(EntryComparison {
                    order,
                    row,
                    col,
                    numeric: n,
                    printed: r,
                    abs_error,
                    rel_error,
                    within_tolerance,
                });
            }
        }
    }
    out
}

/// `‖U_Had(r) − Σ_k r^k U^(k)‖_F` for each `r`.
pub fn expansion_residuals(p: &PhysParams, expansion: &TaylorExpansion, ratios: &[f64]) -> Result<Vec<f64>> {
    ratios
        .iter()
        .map(|&r| {
            let exact = hadamard_gate_at_ratio(p, r)?;
            let mut approx = ComplexMatrix::zeros(4, 4);
            let mut power = 1.0;
            for term in &expansion.terms {
                approx = &approx + &term.scale_real(power);
                power *= r;
            }
            Ok((&exact - &approx).frobenius_norm())
        })
        .collect()
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::validation("slope fit needs at least two paired points"));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::validation("slope fit needs positive values"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::validation("slope fit needs distinct abscissae"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    Ok(sxy / sxx)
}
