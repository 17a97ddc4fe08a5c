//! Dephasing of entangled states by a fluctuating magnetic field.
//!
//! Both atoms see the same white-noise field `B(t)` with
//! `⟨B(t′)B(t″)⟩ = B0²δ(t′ − t″)`. A basis state with Zeeman weight `w`
//! accumulates the phase `w·Φ(t)`, `Φ(t) = μ∫₀ᵗB`, so the coherence between
//! states of weights `w_a`, `w_b` decays as `exp(−(w_a − w_b)²μ²B0²t/2)`.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::angular::{lande_factor, AngularLevel};
use crate::error::{Error, Result};
use crate::matcore::{cr, ComplexMatrix, StateVector, C64};

/// Largest accepted `Δt·μ²B0²` per Monte Carlo step.
pub const MAX_STEP_VARIANCE: f64 = 0.01;
/// Trajectories drawn from one RNG stream.
const TRAJ_BATCH: usize = 1024;
/// Tolerance for unit trace of a density matrix.
pub const TRACE_TOL: f64 = 1e-10;

/// Effective moment `μ` and noise strength `B0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    moment: f64,
    strength: f64,
}

impl NoiseModel {
    pub fn new(moment: f64, strength: f64) -> Result<Self> {
        if !moment.is_finite() || !(strength >= 0.0) || !strength.is_finite() {
            return Err(Error::validation("moment must be finite and noise strength finite and non-negative"));
        }
        Ok(Self { moment, strength })
    }

    pub fn moment(&self) -> f64 {
        self.moment
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    /// `μ²B0²`, the growth rate of `Var Φ(t)`.
    pub fn variance_rate(&self) -> f64 {
        (self.moment * self.strength).powi(2)
    }

    /// Coherence factor `exp(−Δw²μ²B0²t/2)` for a weight difference `Δw`.
    pub fn coherence(&self, weight_difference: f64, t: f64) -> f64 {
        (-0.5 * weight_difference * weight_difference * self.variance_rate() * t).exp()
    }
}

/// Time grid and sampling controls for the Monte Carlo oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct DephasingParams {
    pub noise: NoiseModel,
    t_grid: Vec<f64>,
    n_traj: usize,
    n_steps: usize,
    seed: u64,
}

impl DephasingParams {
    pub fn new(noise: NoiseModel, t_grid: Vec<f64>, n_traj: usize, n_steps: usize, seed: u64) -> Result<Self> {
        if t_grid.first() != Some(&0.0) {
            return Err(Error::validation("time grid must start at 0"));
        }
        if t_grid.iter().any(|t| !t.is_finite()) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::validation("time grid must be finite and strictly increasing"));
        }
        if n_traj == 0 {
            return Err(Error::validation("at least one trajectory is required"));
        }
        if n_steps < 10 {
            return Err(Error::validation("at least 10 steps per trajectory are required"));
        }
        Ok(Self { noise, t_grid, n_traj, n_steps, seed })
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    pub fn n_traj(&self) -> usize {
        self.n_traj
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn horizon(&self) -> f64 {
        *self.t_grid.last().expect("non-empty grid")
    }

    /// `Δt·μ²B0²` for the configured step count.
    pub fn step_variance(&self) -> f64 {
        self.horizon() / self.n_steps as f64 * self.noise.variance_rate()
    }
}

/// `exp(−2μ²B0²t)`, the decay of the `|00⟩⟨11|` coherence.
pub fn dephase_offdiagonal(noise: &NoiseModel, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::validation("time must be non-negative"));
    }
    Ok(noise.coherence(2.0, t))
}

/// Density matrix of `(|00⟩ ± |11⟩)/√2` after dephasing for time `t`.
pub fn bell_density_matrix(noise: &NoiseModel, t: f64, sign: f64) -> Result<ComplexMatrix> {
    if sign != 1.0 && sign != -1.0 {
        return Err(Error::validation("sign must be +1 or -1"));
    }
    let e = dephase_offdiagonal(noise, t)?;
    let mut rho = ComplexMatrix::zeros(4, 4);
    rho[(0, 0)] = cr(0.5);
    rho[(3, 3)] = cr(0.5);
    rho[(0, 3)] = cr(0.5 * sign * e);
    rho[(3, 0)] = cr(0.5 * sign * e);
    Ok(rho)
}

/// Amplitudes of `(|00⟩ ± |11⟩)/√2` on `|00⟩, |01⟩, |10⟩, |11⟩`.
pub fn bell_amplitudes(sign: f64) -> [C64; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [cr(s), C64::ZERO, C64::ZERO, cr(sign * s)]
}

/// Phase weights of the qubit basis `|00⟩, |01⟩, |10⟩, |11⟩`, one unit per
/// excited qubit.
pub const BELL_WEIGHTS: [f64; 4] = [0.0, 1.0, 1.0, 2.0];

/// Per-sublevel Zeeman weights of one atom on `(α₀, α₁, α₂, α₃)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SublevelWeights(pub [f64; 4]);

impl SublevelWeights {
    /// `g_J·m` from the Landé factors of `²S₁/₂` and `²P₁/₂`.
    pub fn zeeman(g_s: f64) -> Result<Self> {
        let g_ground = lande_factor(&AngularLevel::s_half(), g_s)?;
        let g_excited = lande_factor(&AngularLevel::p_half(), g_s)?;
        Ok(Self([-0.5 * g_ground, 0.5 * g_ground, -0.5 * g_excited, 0.5 * g_excited]))
    }

    /// Weights of the product state `|α_i β_j⟩` at flat index `4i + j`.
    pub fn pair_weights(&self) -> [f64; 16] {
        std::array::from_fn(|m| self.0[m / 4] + self.0[m % 4])
    }
}

/// Which two-qubit Bell analogue a degenerate state encodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BellKind {
    /// Analogue of `|00⟩ + |11⟩`.
    Plus0011,
    /// Analogue of `|01⟩ + |10⟩`.
    Plus0110,
}

/// Degenerate Bell analogue with single-atom sublevel weights `(a1, a2)` and
/// `(b1, b2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegenerateBellState {
    pub kind: BellKind,
    a: [C64; 2],
    b: [C64; 2],
}

impl DegenerateBellState {
    pub fn new(kind: BellKind, a1: C64, a2: C64, b1: C64, b2: C64) -> Result<Self> {
        for (name, x, y) in [("a", a1, a2), ("b", b1, b2)] {
            let n = x.norm_sqr() + y.norm_sqr();
            if !((n - 1.0).abs() <= 1e-12) {
                return Err(Error::validation(format!("|{name}1|² + |{name}2|² = {n}, expected 1")));
            }
        }
        Ok(Self { kind, a: [a1, a2], b: [b1, b2] })
    }

    /// Components `(coefficient, [flat indices])`, each coefficient multiplying
    /// a sum of two product states.
    pub fn components(&self) -> [(C64, [usize; 2]); 4] {
        let [a1, a2] = self.a;
        let [b1, b2] = self.b;
        let idx = |i: usize, j: usize| 4 * i + j;
        match self.kind {
            BellKind::Plus0011 => [
                (a1 * b1, [idx(0, 0), idx(2, 2)]),
                (a1 * b2, [idx(0, 1), idx(2, 3)]),
                (a2 * b1, [idx(1, 0), idx(3, 2)]),
                (a2 * b2, [idx(1, 1), idx(3, 3)]),
            ],
            BellKind::Plus0110 => [
                (a1 * b1, [idx(0, 2), idx(2, 0)]),
                (a1 * b2, [idx(0, 3), idx(2, 1)]),
                (a2 * b1, [idx(1, 2), idx(3, 0)]),
                (a2 * b2, [idx(1, 3), idx(3, 1)]),
            ],
        }
    }

    /// Normalised 16 amplitudes.
    pub fn amplitudes(&self) -> [C64; 16] {
        let mut out = [C64::ZERO; 16];
        for (coef, idx) in self.components() {
            for i in idx {
                out[i] += coef * std::f64::consts::FRAC_1_SQRT_2;
            }
        }
        out
    }

    /// The infinite-time mixture as written out term by term for this state
    /// kind, normalised to unit trace. For `Plus0011` the mixed-level
    /// components `α₀β₁, α₁β₀` and `α₂β₃, α₃β₂` form two separate blocks.
    pub fn listed_mixture(&self) -> ComplexMatrix {
        let [a1, a2] = self.a;
        let [b1, b2] = self.b;
        let idx = |i: usize, j: usize| 4 * i + j;
        let mut rho = ComplexMatrix::zeros(16, 16);
        let mut add_block = |terms: &[(C64, usize)]| {
            for &(x, i) in terms {
                for &(y, j) in terms {
                    rho[(i, j)] += x * y.conj() * 0.5;
                }
            }
        };
        match self.kind {
            BellKind::Plus0011 => {
                for i in [idx(0, 0), idx(2, 2)] {
                    add_block(&[(a1 * b1, i)]);
                }
                for i in [idx(1, 1), idx(3, 3)] {
                    add_block(&[(a2 * b2, i)]);
                }
                add_block(&[(a1 * b2, idx(0, 1)), (a2 * b1, idx(1, 0))]);
                add_block(&[(a1 * b2, idx(2, 3)), (a2 * b1, idx(3, 2))]);
            }
            BellKind::Plus0110 => {
                add_block(&[(a1 * b1, idx(0, 2)), (a1 * b1, idx(2, 0))]);
                add_block(&[(a2 * b2, idx(1, 3)), (a2 * b2, idx(3, 1))]);
                add_block(&[(a1 * b2, idx(0, 3)), (a2 * b1, idx(3, 0))]);
                add_block(&[(a1 * b2, idx(2, 1)), (a2 * b1, idx(1, 2))]);
            }
        }
        rho
    }
}

/// Weight differences closer than this are treated as one dephasing class.
const WEIGHT_EQ_TOL: f64 = 1e-12;

/// `|ψ⟩⟨ψ|` with every coherence between states of different weight removed:
/// the `t → ∞` limit of Gaussian dephasing.
pub fn dephased_mixture(amplitudes: &[C64], weights: &[f64]) -> Result<ComplexMatrix> {
    check_state(amplitudes, weights)?;
    let n = amplitudes.len();
    Ok(ComplexMatrix::from_fn(n, n, |a, b| {
        if (weights[a] - weights[b]).abs() <= WEIGHT_EQ_TOL {
            amplitudes[a] * amplitudes[b].conj()
        } else {
            C64::ZERO
        }
    }))
}

/// `ρ_ab(t) = ψ_a ψ_b* · exp(−(w_a − w_b)²μ²B0²t/2)`.
pub fn dephased_state_at(amplitudes: &[C64], weights: &[f64], noise: &NoiseModel, t: f64) -> Result<ComplexMatrix> {
    check_state(amplitudes, weights)?;
    if !(t >= 0.0) {
        return Err(Error::validation("time must be non-negative"));
    }
    let n = amplitudes.len();
    Ok(ComplexMatrix::from_fn(n, n, |a, b| {
        amplitudes[a] * amplitudes[b].conj() * noise.coherence(weights[a] - weights[b], t)
    }))
}

/// Infinite-time state of a degenerate Bell analogue under the given weights.
pub fn degenerate_dephased_state(state: &DegenerateBellState, weights: &SublevelWeights) -> Result<ComplexMatrix> {
    dephased_mixture(&state.amplitudes(), &weights.pair_weights())
}

fn check_state(amplitudes: &[C64], weights: &[f64]) -> Result<()> {
    if amplitudes.is_empty() || amplitudes.len() != weights.len() {
        return Err(Error::validation("need one weight per amplitude"));
    }
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::validation("weights must be finite"));
    }
    let norm = StateVector::new(amplitudes.to_vec())?.norm();
    if !((norm - 1.0).abs() <= 1e-12) {
        return Err(Error::validation(format!("state norm is {norm}, expected 1")));
    }
    Ok(())
}

/// Monte Carlo averages of `e^{−iΔw·Φ(t)}` on the time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct McDephasing {
    pub times: Vec<f64>,
    /// Distinct non-negative weight differences, ascending.
    pub differences: Vec<f64>,
    /// `mean[k][d]` at `times[k]` for `differences[d]`.
    pub mean: Vec<Vec<C64>>,
    /// Standard error of the real part of each mean.
    pub stderr: Vec<Vec<f64>>,
    amplitudes: Vec<C64>,
    weights: Vec<f64>,
}

impl McDephasing {
    fn lookup(&self, k: usize, diff: f64) -> C64 {
        let d = self
            .differences
            .iter()
            .position(|x| (x - diff.abs()).abs() <= WEIGHT_EQ_TOL)
            .expect("difference was registered");
        let z = self.mean[k][d];
        if diff < 0.0 {
            z.conj()
        } else {
            z
        }
    }

    /// Trajectory-averaged density matrix at grid point `k`.
    pub fn density_at(&self, k: usize) -> ComplexMatrix {
        let n = self.amplitudes.len();
        ComplexMatrix::from_fn(n, n, |a, b| {
            let z = self.amplitudes[a] * self.amplitudes[b].conj();
            if z == C64::ZERO {
                z
            } else {
                z * self.lookup(k, self.weights[a] - self.weights[b])
            }
        })
    }

    /// Mean and standard error of `Re e^{−iΔwΦ}` at grid point `k`.
    pub fn coherence(&self, k: usize, diff: f64) -> Option<(f64, f64)> {
        let d = self.differences.iter().position(|x| (x - diff.abs()).abs() <= WEIGHT_EQ_TOL)?;
        Some((self.mean[k][d].re, self.stderr[k][d]))
    }
}

/// Simulates `n_traj` noise trajectories for a state with per-basis-state
/// weights and averages the dephased projector on the time grid.
///
/// Each trajectory integrates `Φ` with independent Gaussian increments of
/// variance `μ²B0²Δt`, splitting steps so that every grid time is hit exactly.
/// Trajectories are processed in fixed batches, batch `b` drawing from a
/// ChaCha8 stream seeded with `seed + b`, and reduced in batch order, so the
/// output does not depend on the thread count.
pub fn mc_dephase(amplitudes: &[C64], weights: &[f64], p: &DephasingParams) -> Result<McDephasing> {
    check_state(amplitudes, weights)?;
    let step_variance = p.step_variance();
    if step_variance > MAX_STEP_VARIANCE {
        return Err(Error::config(format!(
            "step too coarse: Δt·μ²B0² = {step_variance:.3e} exceeds {MAX_STEP_VARIANCE}; increase n_steps"
        )));
    }
    let mut differences: Vec<f64> = Vec::new();
    for a in 0..weights.len() {
        for b in 0..weights.len() {
            if amplitudes[a] != C64::ZERO && amplitudes[b] != C64::ZERO {
                let d = (weights[a] - weights[b]).abs();
                if !differences.iter().any(|x| (x - d).abs() <= WEIGHT_EQ_TOL) {
                    differences.push(d);
                }
            }
        }
    }
    differences.sort_by(f64::total_cmp);

    let schedule = step_schedule(p.t_grid(), p.horizon() / p.n_steps() as f64);
    let sigma_rate = p.noise.moment().abs() * p.noise.strength();
    let n_grid = p.t_grid().len();
    let n_diff = differences.len();
    let n_batches = p.n_traj().div_ceil(TRAJ_BATCH);

    // Per batch: Σ cos, Σ sin, Σ cos² for every (grid point, difference).
    let partial: Vec<Vec<[f64; 3]>> = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(p.seed().wrapping_add(b as u64));
            let count = TRAJ_BATCH.min(p.n_traj() - b * TRAJ_BATCH);
            let mut acc = vec![[0.0; 3]; n_grid * n_diff];
            for _ in 0..count {
                let mut phi = 0.0;
                let mut k = 0;
                for step in &schedule {
                    match *step {
                        Step::Advance(dt) => {
                            if sigma_rate > 0.0 {
                                let normal = Normal::new(0.0, sigma_rate * dt.sqrt()).expect("finite σ");
                                phi += normal.sample(&mut rng);
                            }
                        }
                        Step::Record => {
                            for (d, diff) in differences.iter().enumerate() {
                                let (s, c) = (diff * phi).sin_cos();
                                let slot = &mut acc[k * n_diff + d];
                                slot[0] += c;
                                slot[1] -= s;
                                slot[2] += c * c;
                            }
                            k += 1;
                        }
                    }
                }
            }
            acc
        })
        .collect();

    let mut total = vec![[0.0; 3]; n_grid * n_diff];
    for acc in &partial {
        for (t, a) in total.iter_mut().zip(acc) {
            for i in 0..3 {
                t[i] += a[i];
            }
        }
    }
    let n = p.n_traj() as f64;
    let mut mean = vec![vec![C64::ZERO; n_diff]; n_grid];
    let mut stderr = vec![vec![0.0; n_diff]; n_grid];
    for k in 0..n_grid {
        for d in 0..n_diff {
            let [sc, ss, scc] = total[k * n_diff + d];
            let m = sc / n;
            mean[k][d] = C64::new(m, ss / n);
            stderr[k][d] = if n > 1.0 { ((scc / n - m * m).max(0.0) / (n - 1.0)).sqrt() } else { 0.0 };
        }
    }
    Ok(McDephasing {
        times: p.t_grid().to_vec(),
        differences,
        mean,
        stderr,
        amplitudes: amplitudes.to_vec(),
        weights: weights.to_vec(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Step {
    Advance(f64),
    Record,
}

/// Steps of at most `dt`, cut so that each grid time gets a `Record`.
fn step_schedule(grid: &[f64], dt: f64) -> Vec<Step> {
    let mut out = Vec::new();
    let mut now = 0.0;
    for &target in grid {
        while target - now > dt * (1.0 + 1e-12) {
            out.push(Step::Advance(dt));
            now += dt;
        }
        if target > now {
            out.push(Step::Advance(target - now));
        }
        now = target;
        out.push(Step::Record);
    }
    out
}

/// Monte Carlo dephasing of `(|00⟩ ± |11⟩)/√2`.
pub fn mc_dephase_bell(sign: f64, p: &DephasingParams) -> Result<McDephasing> {
    mc_dephase(&bell_amplitudes(sign), &BELL_WEIGHTS, p)
}

/// Monte Carlo dephasing of a degenerate Bell analogue.
pub fn mc_dephase_degenerate(
    state: &DegenerateBellState,
    weights: &SublevelWeights,
    p: &DephasingParams,
) -> Result<McDephasing> {
    mc_dephase(&state.amplitudes(), &weights.pair_weights(), p)
}

/// Joint probabilities of finding each atom in its ground (`g`) or excited
/// (`e`) level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelTable {
    pub gg: f64,
    pub ge: f64,
    pub eg: f64,
    pub ee: f64,
}

impl LevelTable {
    pub fn max_abs_diff(&self, other: &LevelTable) -> f64 {
        [self.gg - other.gg, self.ge - other.ge, self.eg - other.eg, self.ee - other.ee]
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max)
    }

    pub fn as_map(&self) -> BTreeMap<&'static str, f64> {
        BTreeMap::from([("ee", self.ee), ("eg", self.eg), ("ge", self.ge), ("gg", self.gg)])
    }
}

/// Sums sublevel populations into the joint level table. Accepts the 4×4
/// qubit-pair space (states `0 = g`, `1 = e`) and the 16×16 degenerate space
/// (states `0, 1 = g`, `2, 3 = e`).
pub fn level_measurement_stats(rho: &ComplexMatrix) -> Result<LevelTable> {
    let (per_atom, excited_from) = match rho.shape() {
        (4, 4) => (2, 1),
        (16, 16) => (4, 2),
        (r, c) => return Err(Error::validation(format!("expected a 4x4 or 16x16 density matrix, got {r}x{c}"))),
    };
    let trace = rho.trace();
    if !((trace - cr(1.0)).norm() <= TRACE_TOL) {
        return Err(Error::validation(format!("density matrix trace is {trace}, expected 1")));
    }
    let mut table = [[0.0; 2]; 2];
    for m in 0..rho.rows() {
        let a = usize::from(m / per_atom >= excited_from);
        let b = usize::from(m % per_atom >= excited_from);
        table[a][b] += rho[(m, m)].re;
    }
    Ok(LevelTable { gg: table[0][0], ge: table[0][1], eg: table[1][0], ee: table[1][1] })
}

/// Checks Hermiticity, unit trace and positivity; returns the smallest
/// eigenvalue.
pub fn check_density(rho: &ComplexMatrix) -> Result<f64> {
    if rho.hermitian_defect() > 1e-12 {
        return Err(Error::validation("density matrix is not Hermitian"));
    }
    if (rho.trace() - cr(1.0)).norm() > 1e-12 {
        return Err(Error::validation("density matrix does not have unit trace"));
    }
    let min = rho.hermitian_eigenvalues()?[0];
    if min < -1e-10 {
        return Err(Error::validation(format!("density matrix has negative eigenvalue {min}")));
    }
    Ok(min)
}
