//! Two interacting atoms and the controlled-Z construction.
//!
//! Each atom carries the four states `(g, m=-½), (g, m=+½), (e, m=-½),
//! (e, m=+½)`; the pair lives on the 16-dimensional product basis with flat
//! index `m = 4i + j` (atom A state `i`, atom B state `j`).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::error::{Error, Result};
use crate::matcore::{c, cr, tensor, ComplexMatrix, ALGEBRAIC_TOL, C64, COMPOSED_TOL};
use crate::singleatom::ideal_hadamard;

/// Flat indices whose states are coupled by the exchange interaction.
pub const COUPLED_INDICES: [usize; 8] = [2, 3, 6, 7, 8, 9, 12, 13];
/// `(ground-excited, excited-ground)` pairs exchanged by the interaction.
pub const COUPLED_PAIRS: [(usize, usize); 4] = [(2, 8), (3, 9), (6, 12), (7, 13)];
/// Index groups forming the four controlled-Z blocks, one per `m` pair.
pub const CZ_BLOCKS: [[usize; 4]; 4] = [[0, 2, 8, 10], [1, 3, 9, 11], [4, 6, 12, 14], [5, 7, 13, 15]];
/// Flat indices that pick up the conditional phase (both atoms excited).
pub const PHASE_INDICES: [usize; 4] = [10, 11, 14, 15];

const DIM: usize = 16;
/// Below this modulus a template entry is treated as zero when deriving phases.
const PHASE_FLOOR: f64 = 1e-14;

/// Position in the two-atom product basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ProductBasisIndex {
    atom_a: usize,
    atom_b: usize,
}

impl ProductBasisIndex {
    pub fn new(atom_a: usize, atom_b: usize) -> Result<Self> {
        if atom_a > 3 || atom_b > 3 {
            return Err(Error::validation("single-atom states are indexed 0..=3"));
        }
        Ok(Self { atom_a, atom_b })
    }

    pub fn from_flat(m: usize) -> Result<Self> {
        if m >= DIM {
            return Err(Error::validation(format!("flat index {m} is outside 0..16")));
        }
        Ok(Self { atom_a: m / 4, atom_b: m % 4 })
    }

    pub fn flat(&self) -> usize {
        4 * self.atom_a + self.atom_b
    }

    pub fn atom_a(&self) -> usize {
        self.atom_a
    }

    pub fn atom_b(&self) -> usize {
        self.atom_b
    }
}

/// Exchange coupling between two identical atoms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoAtomModel {
    transition_frequency: f64,
    coupling: C64,
    hbar: f64,
}

impl TwoAtomModel {
    pub fn new(transition_frequency: f64, coupling: C64, hbar: f64) -> Result<Self> {
        if !(transition_frequency > 0.0) || !transition_frequency.is_finite() {
            return Err(Error::validation("transition frequency must be positive and finite"));
        }
        if !coupling.re.is_finite() || !coupling.im.is_finite() {
            return Err(Error::validation("coupling must be finite"));
        }
        if !(hbar > 0.0) || !hbar.is_finite() {
            return Err(Error::validation("ħ must be positive and finite"));
        }
        Ok(Self { transition_frequency, coupling, hbar })
    }

    pub fn transition_frequency(&self) -> f64 {
        self.transition_frequency
    }

    pub fn coupling(&self) -> C64 {
        self.coupling
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `Ω′ = |h|/ħ`.
    pub fn exchange_rate(&self) -> f64 {
        self.coupling.norm() / self.hbar
    }
}

/// Rotating-frame exchange interaction: `h` at each [`COUPLED_PAIRS`] entry
/// and `h*` at its transpose, zero elsewhere.
pub fn build_vab_interaction(model: &TwoAtomModel) -> ComplexMatrix {
    let mut v = ComplexMatrix::zeros(DIM, DIM);
    for (i, j) in COUPLED_PAIRS {
        v[(i, j)] = model.coupling;
        v[(j, i)] = model.coupling.conj();
    }
    v
}

/// Projector onto [`COUPLED_INDICES`].
pub fn coupled_projector() -> ComplexMatrix {
    let mut d = ComplexMatrix::zeros(DIM, DIM);
    for i in COUPLED_INDICES {
        d[(i, i)] = cr(1.0);
    }
    d
}

/// `I − D + cos(Ω′t)·D − i·sin(Ω′t)/(ħΩ′)·V`. With `h = 0` the evolution is
/// the identity.
pub fn u_ab_closed(t: f64, model: &TwoAtomModel) -> ComplexMatrix {
    let rate = model.exchange_rate();
    let mut u = ComplexMatrix::identity(DIM);
    if rate == 0.0 {
        return u;
    }
    let (s, co) = (rate * t).sin_cos();
    for i in COUPLED_INDICES {
        u[(i, i)] = cr(co);
    }
    let scale = c(0.0, -s / (model.hbar * rate));
    for (i, j) in COUPLED_PAIRS {
        u[(i, j)] = scale * model.coupling;
        u[(j, i)] = scale * model.coupling.conj();
    }
    u
}

/// Reads `(c, d)` from a unitary of the exchange template: `c` is the
/// excited-ground diagonal entry `U[8][8]` and `d` the ground-excited
/// off-diagonal entry `U[2][8]`.
pub fn template_entries(u: &ComplexMatrix) -> Result<(C64, C64)> {
    check_two_atom_shape(u)?;
    Ok((u[(8, 8)], u[(2, 8)]))
}

fn check_two_atom_shape(u: &ComplexMatrix) -> Result<()> {
    if u.shape() != (DIM, DIM) {
        return Err(Error::validation(format!("two-atom operators are 16x16, got {}x{}", u.rows(), u.cols())));
    }
    Ok(())
}

fn block_diag(upper: C64, lower: C64) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&[upper, upper, lower, lower])
}

/// Unit-modulus phases of `c` and `d`. A vanishing entry takes the phase that
/// puts `unit(c)·unit(d)` at `+i`, which is the continuous limit of the
/// balanced case and leaves every phase gate trivial at `c = 1, d = 0`.
fn unit_phases(cv: C64, dv: C64) -> (C64, C64) {
    let unit = |z: C64| z / z.norm();
    match (cv.norm() < PHASE_FLOOR, dv.norm() < PHASE_FLOOR) {
        (false, false) => (unit(cv), unit(dv)),
        (false, true) => {
            let uc = unit(cv);
            (uc, c(0.0, 1.0) * uc.conj())
        }
        (true, false) => {
            let ud = unit(dv);
            (c(0.0, -1.0) * ud.conj(), ud)
        }
        (true, true) => (cr(1.0), c(0.0, 1.0)),
    }
}

/// Local single-atom gates used by the controlled-Z sequence.
#[derive(Clone, Debug)]
pub struct LocalGates {
    pub p1: ComplexMatrix,
    pub p2: ComplexMatrix,
    pub p3: ComplexMatrix,
    pub p4: ComplexMatrix,
    pub p5: ComplexMatrix,
    pub p6: ComplexMatrix,
    pub s: ComplexMatrix,
    pub h: ComplexMatrix,
    pub z: ComplexMatrix,
    /// Angle with `e^{iθ} = |c| + i|d|`.
    pub theta: f64,
}

impl LocalGates {
    pub fn all(&self) -> [(&'static str, &ComplexMatrix); 9] {
        [
            ("P1", &self.p1),
            ("P2", &self.p2),
            ("P3", &self.p3),
            ("P4", &self.p4),
            ("P5", &self.p5),
            ("P6", &self.p6),
            ("S", &self.s),
            ("H", &self.h),
            ("Z", &self.z),
        ]
    }
}

/// Builds `P1 … P6, S, H, Z` from the template entries `c`, `d`.
pub fn local_gate_library(cv: C64, dv: C64) -> Result<LocalGates> {
    let norm = cv.norm_sqr() + dv.norm_sqr();
    if !((norm - 1.0).abs() <= COMPOSED_TOL) {
        return Err(Error::validation(format!("|c|² + |d|² = {norm}, expected 1")));
    }
    let (uc, ud) = unit_phases(cv, dv);
    let theta = dv.norm().atan2(cv.norm());
    let one = cr(1.0);
    let prod = uc * ud;
    Ok(LocalGates {
        p1: block_diag(one, c(0.0, -1.0) * ud),
        p2: block_diag(one, c(0.0, 1.0) * ud.conj()),
        p3: block_diag(one, C64::from_polar(1.0, FRAC_PI_4) * prod.conj().sqrt()),
        p4: block_diag(one, C64::from_polar(1.0, -FRAC_PI_4) * prod.sqrt()),
        p5: block_diag(C64::from_polar(1.0, -theta), C64::from_polar(1.0, theta)),
        p6: block_diag(one, C64::from_polar(1.0, 2.0 * theta)),
        s: block_diag(one, c(0.0, 1.0)),
        h: ideal_hadamard(),
        z: block_diag(one, cr(-1.0)),
        theta,
    })
}

/// Outcome of the controlled-Z sequence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CZDiagnostics {
    pub c: C64,
    pub d: C64,
    pub theta: f64,
    /// Largest off-diagonal modulus of `U₅`.
    pub offdiag_max: f64,
    /// `U₅` at flat index 15.
    pub phase: C64,
    /// `e^{4iθ}`.
    pub expected_phase: C64,
    /// Largest deviation of `diag(U₅)` from twelve ones and `e^{4iθ}` on
    /// [`PHASE_INDICES`].
    pub pattern_error: f64,
    /// Phase `κ` of the local alignment `diag(1,1,e^{iκ},e^{iκ})` applied to
    /// atom A before the sequence; zero for the literal sequence.
    pub alignment: f64,
}

/// The printed pattern: identity with `e^{4iθ}` at [`PHASE_INDICES`].
pub fn cz_pattern(theta: f64) -> ComplexMatrix {
    let phase = C64::from_polar(1.0, 4.0 * theta);
    let mut m = ComplexMatrix::identity(DIM);
    for k in PHASE_INDICES {
        m[(k, k)] = phase;
    }
    m
}

fn run_sequence(u: &ComplexMatrix, cv: C64, dv: C64, alignment: f64) -> Result<(ComplexMatrix, CZDiagnostics)> {
    let g = local_gate_library(cv, dv)?;
    let i4 = ComplexMatrix::identity(4);
    let u2 = &(&(&tensor(&g.p3, &g.p3) * &tensor(&g.p1, &g.p2)) * u) * &tensor(&g.p3, &g.p4);
    let hh = tensor(&g.h, &g.h);
    let s_dag = g.s.adjoint();
    let u3 = &(&(&(&tensor(&s_dag, &s_dag) * &hh) * &u2) * &hh) * &tensor(&g.s, &g.s);
    let iz = tensor(&i4, &g.z);
    let u4 = &(&(&iz * &u3) * &iz) * &u3;
    let u5 = &tensor(&g.p6, &g.p5) * &u4;
    let pattern = cz_pattern(g.theta);
    let pattern_error = (0..DIM).map(|k| (u5[(k, k)] - pattern[(k, k)]).norm()).fold(0.0, f64::max);
    let diag = CZDiagnostics {
        c: cv,
        d: dv,
        theta: g.theta,
        offdiag_max: u5.offdiag_max(),
        phase: u5[(15, 15)],
        expected_phase: pattern[(15, 15)],
        pattern_error,
        alignment,
    };
    Ok((u5, diag))
}

/// Applies `U₂ = (P3⊗P3)(P1⊗P2)·U·(P3⊗P4)`, `U₃ = (S†⊗S†)(H⊗H)·U₂·(H⊗H)(S⊗S)`,
/// `U₄ = (I⊗Z)·U₃·(I⊗Z)·U₃` and `U₅ = (P6⊗P5)·U₄`, after first rotating atom
/// A's excited pair so that `arg(c·d) = π/2`.
///
/// The sequence only produces a diagonal `U₅` when `c·d` is purely
/// imaginary with positive imaginary part; for other phases the off-diagonal
/// weight does not cancel. The alignment `Zκ = diag(1,1,e^{iκ},e^{iκ})`,
/// `U → (Zκ†⊗I)·U·(Zκ⊗I)`, is itself a local gate, leaves `c` unchanged and
/// maps `d → d·e^{iκ}`. For `κ = 0` this is exactly [`cz_sequence_literal`].
pub fn cz_sequence(u: &ComplexMatrix, cv: C64, dv: C64) -> Result<(ComplexMatrix, CZDiagnostics)> {
    check_two_atom_shape(u)?;
    let (uc, ud) = unit_phases(cv, dv);
    let kappa = FRAC_PI_2 - (uc * ud).arg();
    let z_kappa = block_diag(cr(1.0), C64::from_polar(1.0, kappa));
    let i4 = ComplexMatrix::identity(4);
    let aligned = &(&tensor(&z_kappa.adjoint(), &i4) * u) * &tensor(&z_kappa, &i4);
    let (u5, mut diag) = run_sequence(&aligned, cv, dv * C64::from_polar(1.0, kappa), kappa)?;
    diag.d = dv;
    Ok((u5, diag))
}

/// The controlled-Z sequence with no phase alignment.
pub fn cz_sequence_literal(u: &ComplexMatrix, cv: C64, dv: C64) -> Result<(ComplexMatrix, CZDiagnostics)> {
    check_two_atom_shape(u)?;
    run_sequence(u, cv, dv, 0.0)
}

/// The four `4×4` sub-blocks of a two-atom operator on [`CZ_BLOCKS`].
pub fn cz_subblocks(u: &ComplexMatrix) -> Result<[ComplexMatrix; 4]> {
    check_two_atom_shape(u)?;
    Ok(CZ_BLOCKS.map(|idx| ComplexMatrix::from_fn(4, 4, |i, j| u[(idx[i], idx[j])])))
}

/// Interaction times at which the sequence yields a controlled-Z.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CzTiming {
    /// Smallest `t > 0` with `|c(t)| = |d(t)|` read from the evolution.
    pub balanced: f64,
    /// Smallest `t > 0` with `tan²(Ω′t) = Ω′²ħ²`.
    pub literal: f64,
    /// `literal − balanced`.
    pub discrepancy: f64,
}

/// Solves for the controlled-Z time. The balanced root is found by bisection
/// on `|c(t)| − |d(t)|` using the entries of [`u_ab_closed`]; the condition
/// `tan²(Ω′t) = Ω′²ħ²` is solved in closed form alongside it.
pub fn solve_cz_time(model: &TwoAtomModel) -> Result<CzTiming> {
    let rate = model.exchange_rate();
    if rate == 0.0 {
        return Err(Error::validation("controlled-Z timing needs a non-zero coupling"));
    }
    let gap = |t: f64| -> f64 {
        let (cv, dv) = template_entries(&u_ab_closed(t, model)).expect("16x16");
        cv.norm() - dv.norm()
    };
    let quarter = FRAC_PI_2 / rate;
    let step = quarter / 64.0;
    let mut lo = 0.0;
    let mut hi = step;
    while gap(hi) > 0.0 {
        lo = hi;
        hi += step;
        if hi > 4.0 * quarter {
            return Err(Error::numerical("no sign change of |c| − |d| within one period"));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let balanced = 0.5 * (lo + hi);
    let literal = (rate * model.hbar).atan() / rate;
    Ok(CzTiming { balanced, literal, discrepancy: literal - balanced })
}

/// `H_A ⊗ I + I ⊗ H_B` with `H = half_splitting·diag(1,1,-1,-1)` on each atom.
pub fn free_two_atom_hamiltonian(half_splitting: f64) -> ComplexMatrix {
    let single = block_diag(cr(half_splitting), cr(-half_splitting));
    let i4 = ComplexMatrix::identity(4);
    &tensor(&single, &i4) + &tensor(&i4, &single)
}

/// Comparison of the free two-atom diagonal against the level energies
/// `h_g = ħω/2`, `h₀ = 0`, `h_e = −ħω/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyBookkeeping {
    /// Free energy of the ground-ground, mixed and excited-excited sectors.
    pub sectors: [f64; 3],
    pub assigned: [f64; 3],
    /// Largest `|sector − assigned|`.
    pub residual: f64,
}

/// Bookkeeping for single-atom Hamiltonians `half_splitting·diag(1,1,-1,-1)`.
/// With `half_splitting = ħω/2` the sector energies are `(ħω, 0, −ħω)`, twice
/// the assigned values; `ħω/4` reproduces them.
pub fn energy_bookkeeping(model: &TwoAtomModel, half_splitting: f64) -> EnergyBookkeeping {
    let h = free_two_atom_hamiltonian(half_splitting);
    let sectors = [h[(0, 0)].re, h[(2, 2)].re, h[(10, 10)].re];
    let e = model.hbar * model.transition_frequency / 2.0;
    let assigned = [e, 0.0, -e];
    let residual = sectors.iter().zip(&assigned).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    EnergyBookkeeping { sectors, assigned, residual }
}

/// `true` when `u` is unitary and its diagonal entries have unit modulus.
pub fn is_diagonal_unitary(u: &ComplexMatrix, tol: f64) -> bool {
    u.offdiag_max() <= tol && u.diagonal().iter().all(|z| (z.norm() - 1.0).abs() <= ALGEBRAIC_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::expm_generator;
    use std::f64::consts::PI;

    fn model(h: C64) -> TwoAtomModel {
        TwoAtomModel::new(96.0, h, 1.0).unwrap()
    }

    #[test]
    fn index_round_trip() {
        for m in 0..16 {
            assert_eq!(ProductBasisIndex::from_flat(m).unwrap().flat(), m);
        }
        assert!(ProductBasisIndex::from_flat(16).is_err());
        assert!(ProductBasisIndex::new(4, 0).is_err());
        assert_eq!(ProductBasisIndex::new(2, 1).unwrap().flat(), 9);
    }

    #[test]
    fn interaction_layout() {
        let v = build_vab_interaction(&model(cr(1.0)));
        for i in 0..16 {
            for j in 0..16 {
                let coupled = COUPLED_PAIRS.iter().any(|&(a, b)| (a, b) == (i, j) || (b, a) == (i, j));
                assert_eq!(v[(i, j)], if coupled { cr(1.0) } else { C64::ZERO });
            }
        }
        assert_eq!(build_vab_interaction(&model(C64::ZERO)).max_abs(), 0.0);
        let complex = build_vab_interaction(&model(c(0.3, 0.4)));
        assert_eq!(complex.hermitian_defect(), 0.0);
    }

    #[test]
    fn closed_form_matches_exponential() {
        for (h, t) in [(cr(1.0), 0.3), (c(0.3, 0.4), 2.1), (c(0.0, -2.0), 0.77)] {
            let m = model(h);
            let oracle = expm_generator(&build_vab_interaction(&m), t, 1.0).unwrap();
            assert!((&u_ab_closed(t, &m) - &oracle).frobenius_norm() < 1e-10);
        }
        assert_eq!(u_ab_closed(0.0, &model(cr(1.0))), ComplexMatrix::identity(16));
        assert_eq!(u_ab_closed(1.0, &model(C64::ZERO)), ComplexMatrix::identity(16));
    }

    #[test]
    fn template_reading() {
        let h = c(0.6, 0.8);
        let t = 0.4;
        let (cv, dv) = template_entries(&u_ab_closed(t, &model(h))).unwrap();
        assert!((cv - cr(t.cos())).norm() < 1e-15);
        assert!((dv - c(0.0, -1.0) * h * t.sin()).norm() < 1e-15);
        let swap = u_ab_closed(PI / 2.0, &model(h));
        assert!(swap[(8, 8)].norm() < 1e-15);
        assert!((swap[(2, 8)] - c(0.0, -1.0) * h).norm() < 1e-15);
    }

    #[test]
    fn gate_library_examples() {
        let g = local_gate_library(cr(1.0), C64::ZERO).unwrap();
        for m in [&g.p1, &g.p2, &g.p3, &g.p4, &g.p5, &g.p6] {
            assert!(m.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let g = local_gate_library(cr(s), c(0.0, -s)).unwrap();
        assert!((g.theta - PI / 4.0).abs() < 1e-15);
        assert!((g.p6[(2, 2)] - c(0.0, 1.0)).norm() < 1e-15);
        for (_, m) in g.all() {
            assert!(m.unitarity_defect() < 1e-12);
        }
        assert!(local_gate_library(cr(1.0), cr(1.0)).is_err());
    }

    #[test]
    fn sequence_gives_controlled_phase() {
        let m = model(cr(1.0));
        for (t, phase) in [(PI / 4.0, cr(-1.0)), (PI / 6.0, C64::from_polar(1.0, 2.0 * PI / 3.0)), (0.0, cr(1.0))] {
            let u = u_ab_closed(t, &m);
            let (cv, dv) = template_entries(&u).unwrap();
            let (u5, diag) = cz_sequence(&u, cv, dv).unwrap();
            assert!(diag.offdiag_max < 1e-10, "t = {t}");
            assert!((diag.phase - phase).norm() < 1e-10, "t = {t}");
            assert!(u5.max_abs_diff(&cz_pattern(diag.theta)) < 1e-10);
        }
    }

    #[test]
    fn literal_sequence_needs_aligned_phases() {
        let u = u_ab_closed(0.5, &model(cr(1.0)));
        let (cv, dv) = template_entries(&u).unwrap();
        let (_, diag) = cz_sequence_literal(&u, cv, dv).unwrap();
        assert!(diag.offdiag_max > 1e-3);
        let (_, aligned) = cz_sequence(&u, cv, dv).unwrap();
        assert!((aligned.alignment - PI).abs() < 1e-12);
        let u = u_ab_closed(0.5, &model(cr(-1.0)));
        let (cv, dv) = template_entries(&u).unwrap();
        let (_, diag) = cz_sequence_literal(&u, cv, dv).unwrap();
        assert!(diag.offdiag_max < 1e-10);
    }

    #[test]
    fn subblocks_are_controlled_phase() {
        let u = u_ab_closed(PI / 4.0, &model(c(0.3, -0.4)));
        let (cv, dv) = template_entries(&u).unwrap();
        let (u5, diag) = cz_sequence(&u, cv, dv).unwrap();
        let expected = ComplexMatrix::from_diagonal(&[cr(1.0), cr(1.0), cr(1.0), diag.expected_phase]);
        for block in cz_subblocks(&u5).unwrap() {
            assert!(block.max_abs_diff(&expected) < 1e-10);
        }
    }

    #[test]
    fn timing_roots() {
        let one = solve_cz_time(&model(cr(1.0))).unwrap();
        assert!((one.balanced - PI / 4.0).abs() < 1e-12);
        assert!((one.literal - PI / 4.0).abs() < 1e-12);
        let two = solve_cz_time(&model(cr(2.0))).unwrap();
        assert!((two.balanced - PI / 8.0).abs() < 1e-12);
        assert!((two.literal - 2f64.atan() / 2.0).abs() < 1e-15);
        assert!(two.discrepancy > 0.1);
        assert!(solve_cz_time(&model(C64::ZERO)).is_err());
    }

    #[test]
    fn bookkeeping_factor() {
        let m = model(cr(1.0));
        let printed = energy_bookkeeping(&m, m.hbar() * m.transition_frequency() / 2.0);
        assert!((printed.residual - 48.0).abs() < 1e-12);
        let halved = energy_bookkeeping(&m, m.hbar() * m.transition_frequency() / 4.0);
        assert!(halved.residual < 1e-12);
    }
}
