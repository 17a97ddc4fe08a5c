//! Angular momentum: Wigner 3j symbols, dipole couplings and the Zeeman
//! operator within fine-structure levels.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matcore::{cr, ComplexMatrix, C64};

/// A value in `½ℤ`, stored as twice its value so arithmetic stays exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_doubled(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn integer(n: i32) -> Self {
        HalfInt(2 * n)
    }

    /// Accepts any float that is an exact multiple of ½.
    pub fn from_f64(x: f64) -> Result<Self> {
        let twice = 2.0 * x;
        if !twice.is_finite() || twice.fract() != 0.0 || twice.abs() > i32::MAX as f64 {
            return Err(Error::validation(format!("{x} is not a half-integer")));
        }
        Ok(HalfInt(twice as i32))
    }

    pub const fn doubled(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

fn factorial(n: i32) -> BigInt {
    debug_assert!(n >= 0);
    (2..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Wigner 3j symbol `(j1 j2 j3; m1 m2 m3)`.
///
/// Evaluated with the Racah sum in exact rational arithmetic and converted to
/// `f64` once at the end. Returns `0` when the triangle rule or `m1+m2+m3 = 0`
/// fails.
pub fn wigner3j(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> Result<f64> {
    for (j, m) in [(j1, m1), (j2, m2), (j3, m3)] {
        if j.0 < 0 {
            return Err(Error::validation(format!("angular momentum {j} is negative")));
        }
        if m.0.abs() > j.0 || (j.0 - m.0) % 2 != 0 {
            return Err(Error::validation(format!("projection {m} is not on the lattice of j = {j}")));
        }
    }
    Ok(wigner3j_unchecked(j1, j2, j3, m1, m2, m3))
}

pub(crate) fn wigner3j_unchecked(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> f64 {
    let (j1, j2, j3, m1, m2, m3) = (j1.0, j2.0, j3.0, m1.0, m2.0, m3.0);
    if m1 + m2 + m3 != 0 {
        return 0.0;
    }
    if (j1 + j2 + j3) % 2 != 0 || j3 > j1 + j2 || j3 < (j1 - j2).abs() {
        return 0.0;
    }
    // Every combination below is an even doubled value, so halving is exact.
    let h = |x: i32| x / 2;
    let delta = BigRational::new(
        factorial(h(j1 + j2 - j3)) * factorial(h(j1 - j2 + j3)) * factorial(h(-j1 + j2 + j3)),
        factorial(h(j1 + j2 + j3) + 1),
    );
    let outer = factorial(h(j1 + m1))
        * factorial(h(j1 - m1))
        * factorial(h(j2 + m2))
        * factorial(h(j2 - m2))
        * factorial(h(j3 + m3))
        * factorial(h(j3 - m3));

    let k_min = 0.max(h(j2 - j3 - m1)).max(h(j1 - j3 + m2));
    let k_max = h(j1 + j2 - j3).min(h(j1 - m1)).min(h(j2 + m2));
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let denom = factorial(k)
            * factorial(h(j3 - j2 + m1) + k)
            * factorial(h(j3 - j1 - m2) + k)
            * factorial(h(j1 + j2 - j3) - k)
            * factorial(h(j1 - m1) - k)
            * factorial(h(j2 + m2) - k);
        let term = BigRational::new(BigInt::one(), denom);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }
    let magnitude_sq = &sum * &sum * delta * BigRational::from_integer(outer);
    let magnitude = magnitude_sq.to_f64().unwrap_or(f64::NAN).sqrt();
    let phase_exp = h(j1 - j2 - m3);
    let phase_negative = phase_exp.rem_euclid(2) == 1;
    if phase_negative ^ sum.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}

/// Reduced dipole element from an Einstein A coefficient:
/// `√(3·A·n / (4·c·α·k²))`.
pub fn line_strength(a12: f64, k12: f64, n: u32, alpha: f64, c: f64) -> Result<f64> {
    if !(k12 > 0.0) || !k12.is_finite() {
        return Err(Error::validation("wavenumber must be positive"));
    }
    if !(a12 >= 0.0) || !a12.is_finite() {
        return Err(Error::validation("decay rate must be non-negative"));
    }
    if n == 0 {
        return Err(Error::validation("degeneracy count must be at least 1"));
    }
    if !(alpha > 0.0) || !(c > 0.0) {
        return Err(Error::validation("fine-structure constant and speed of light must be positive"));
    }
    Ok((3.0 * a12 * f64::from(n) / (4.0 * c * alpha * k12 * k12)).sqrt())
}

/// A fine-structure level `(L, S, J)` with sublevels `m = -J, …, J`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AngularLevel {
    l: u32,
    s: HalfInt,
    j: HalfInt,
}

impl AngularLevel {
    pub fn new(l: u32, s: HalfInt, j: HalfInt) -> Result<Self> {
        if s.0 < 0 || j.0 < 0 {
            return Err(Error::validation("spin and total angular momentum must be non-negative"));
        }
        let l2 = 2 * l as i32;
        if j.0 > l2 + s.0 || j.0 < (l2 - s.0).abs() || (l2 + s.0 - j.0) % 2 != 0 {
            return Err(Error::validation(format!("J = {j} cannot be formed from L = {l} and S = {s}")));
        }
        Ok(Self { l, s, j })
    }

    /// `²S₁/₂`.
    pub fn s_half() -> Self {
        Self { l: 0, s: HalfInt::HALF, j: HalfInt::HALF }
    }

    /// `²P₁/₂`.
    pub fn p_half() -> Self {
        Self { l: 1, s: HalfInt::HALF, j: HalfInt::HALF }
    }

    /// `²P₃/₂`.
    pub fn p_three_halves() -> Self {
        Self { l: 1, s: HalfInt::HALF, j: HalfInt::from_doubled(3) }
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn s(&self) -> HalfInt {
        self.s
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn degeneracy(&self) -> usize {
        self.j.0 as usize + 1
    }

    /// Sublevel projections in ascending order.
    pub fn m_list(&self) -> Vec<HalfInt> {
        (0..=self.j.0).map(|k| HalfInt(-self.j.0 + 2 * k)).collect()
    }
}

/// Ground and excited level driven by a field linearly polarised along the
/// quantisation axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DipoleScenario {
    pub ground: AngularLevel,
    pub excited: AngularLevel,
    line_strength: f64,
    field_magnitude: f64,
}

impl DipoleScenario {
    pub fn new(ground: AngularLevel, excited: AngularLevel, line_strength: f64, field_magnitude: f64) -> Result<Self> {
        if !(line_strength >= 0.0) || !line_strength.is_finite() {
            return Err(Error::validation("line strength must be finite and non-negative"));
        }
        if !(field_magnitude >= 0.0) || !field_magnitude.is_finite() {
            return Err(Error::validation("field magnitude must be finite and non-negative"));
        }
        Ok(Self { ground, excited, line_strength, field_magnitude })
    }

    pub fn line_strength(&self) -> f64 {
        self.line_strength
    }

    pub fn field_magnitude(&self) -> f64 {
        self.field_magnitude
    }
}

/// Coupling block `Ω_ij = S·|E|·(J⁽⁰⁾ 1 J⁽¹⁾; -m_i 0 m_j)`, rows indexed by
/// ground sublevels and columns by excited sublevels.
pub fn dipole_coupling_matrix(s: &DipoleScenario) -> ComplexMatrix {
    let scale = s.line_strength * s.field_magnitude;
    let jg = s.ground.j;
    let je = s.excited.j;
    let mg = s.ground.m_list();
    let me = s.excited.m_list();
    ComplexMatrix::from_fn(mg.len(), me.len(), |i, j| {
        cr(scale * wigner3j_unchecked(jg, HalfInt::ONE, je, -mg[i], HalfInt::ZERO, me[j]))
    })
}

/// Landé factor from the projection theorem:
/// `g_J = ⟨L·J⟩/(J(J+1)) + g_s·⟨S·J⟩/(J(J+1))`.
pub fn lande_factor(level: &AngularLevel, g_s: f64) -> Result<f64> {
    if level.j.0 == 0 {
        return Err(Error::validation("projection onto J = 0 is undefined"));
    }
    let j = level.j.value();
    let l = f64::from(level.l);
    let s = level.s.value();
    let jj = j * (j + 1.0);
    let ll = l * (l + 1.0);
    let ss = s * (s + 1.0);
    Ok((jj + ll - ss) / (2.0 * jj) + g_s * (jj + ss - ll) / (2.0 * jj))
}

/// How the level g-factors entering the Zeeman operator depend on `g_s`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ZeemanConvention {
    /// Landé factor from the projection theorem at the given `g_s`.
    #[default]
    Projection,
    /// Nominal Landé factor at `g_s = 2`, rescaled by `g_s/2`. For
    /// `²S₁/₂`/`²P₁/₂` this gives `g_s` and `g_s/3`.
    ScaledNominal,
}

fn level_g(level: &AngularLevel, g_s: f64, convention: ZeemanConvention) -> f64 {
    if level.j.0 == 0 {
        return 0.0;
    }
    let g = match convention {
        ZeemanConvention::Projection => lande_factor(level, g_s),
        ZeemanConvention::ScaledNominal => lande_factor(level, 2.0).map(|g| g * g_s / 2.0),
    };
    g.expect("J > 0 was checked")
}

/// `J_z cos θ + J_x sin θ` on the `m`-ascending basis of one level.
fn tilted_jz(level: &AngularLevel, theta: f64) -> ComplexMatrix {
    let m = level.m_list();
    let j = level.j.value();
    let (sin, cos) = theta.sin_cos();
    ComplexMatrix::from_fn(m.len(), m.len(), |a, b| {
        let (ma, mb) = (m[a].value(), m[b].value());
        if a == b {
            cr(ma * cos)
        } else if a == b + 1 || b == a + 1 {
            let lo = ma.min(mb);
            cr(0.5 * (j * (j + 1.0) - lo * (lo + 1.0)).sqrt() * sin)
        } else {
            C64::ZERO
        }
    })
}

/// Zeeman operator on the ground ⊕ excited space with the default
/// [`ZeemanConvention::Projection`].
///
/// `b0` is the field scale with the spin factor absorbed, `g_s|B| = B0`, so
/// each level block is `μ_B (B0/g_s) g_J (J_z cos θ + J_x sin θ)`.
pub fn zeeman_matrix(
    ground: &AngularLevel,
    excited: &AngularLevel,
    b0: f64,
    theta: f64,
    g_s: f64,
    mu_b: f64,
) -> Result<ComplexMatrix> {
    zeeman_matrix_with(ground, excited, b0, theta, g_s, mu_b, ZeemanConvention::Projection)
}

pub fn zeeman_matrix_with(
    ground: &AngularLevel,
    excited: &AngularLevel,
    b0: f64,
    theta: f64,
    g_s: f64,
    mu_b: f64,
    convention: ZeemanConvention,
) -> Result<ComplexMatrix> {
    if ![b0, theta, g_s, mu_b].iter().all(|x| x.is_finite()) {
        return Err(Error::validation("Zeeman inputs must be finite"));
    }
    if g_s == 0.0 {
        return Err(Error::validation("g_s must be non-zero"));
    }
    let field = mu_b * b0 / g_s;
    let ng = ground.degeneracy();
    let ne = excited.degeneracy();
    let mut out = ComplexMatrix::zeros(ng + ne, ng + ne);
    for (offset, level) in [(0, ground), (ng, excited)] {
        let block = tilted_jz(level, theta).scale_real(field * level_g(level, g_s, convention));
        for a in 0..level.degeneracy() {
            for b in 0..level.degeneracy() {
                out[(offset + a, offset + b)] = block[(a, b)];
            }
        }
    }
    Ok(out)
}

/// Largest entrywise difference between the two Zeeman conventions. Zero when
/// `g_s = 2`.
pub fn zeeman_convention_discrepancy(
    ground: &AngularLevel,
    excited: &AngularLevel,
    b0: f64,
    theta: f64,
    g_s: f64,
    mu_b: f64,
) -> Result<f64> {
    let a = zeeman_matrix_with(ground, excited, b0, theta, g_s, mu_b, ZeemanConvention::Projection)?;
    let b = zeeman_matrix_with(ground, excited, b0, theta, g_s, mu_b, ZeemanConvention::ScaledNominal)?;
    Ok(a.max_abs_diff(&b))
}
