//! Dense complex linear algebra.
//!
//! Everything downstream carries Hamiltonians, propagators and density
//! matrices as [`ComplexMatrix`]. Propagators are produced from Hermitian
//! generators by eigendecomposition, `U = Q exp(-iΛt/ħ) Q†`, so they are
//! unitary to rounding error regardless of `t`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Absolute tolerance for algebraic identities (Hermiticity, unitarity).
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Tolerance for quantities that pass through several composed numerical steps.
pub const COMPOSED_TOL: f64 = 1e-10;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Dense complex matrix, addressed as `(row, col)`.
///
/// Square in almost every use; the dipole coupling block between two levels of
/// different degeneracy is the one rectangular case.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { inner: DMatrix::zeros(rows, cols) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { inner: DMatrix::identity(dim, dim) }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self { inner: DMatrix::from_fn(rows, cols, f) }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::validation("matrix dimensions must be positive"));
        }
        if entries.len() != rows * cols {
            return Err(Error::validation(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self { inner: DMatrix::from_row_slice(rows, cols, entries) })
    }

    /// Square real matrix from nested rows. Panics on ragged input, so it is
    /// meant for literal tables.
    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(N, N, |i, j| cr(rows[i][j]))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { C64::ZERO })
    }

    pub(crate) fn from_nalgebra(inner: DMatrix<C64>) -> Self {
        Self { inner }
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows()
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows().min(self.cols())).map(|i| self.inner[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self { inner: self.inner.adjoint() }
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { inner: &self.inner * factor }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(cr(factor))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "shape mismatch");
        self.inner.iter().zip(other.inner.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    /// `max |A - A†|`; infinite for a rectangular matrix.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    /// `max |U†U - I|`; infinite for a rectangular matrix.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.dim()))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Largest modulus outside the main diagonal.
    pub fn offdiag_max(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                if i != j {
                    worst = worst.max(self.inner[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// Kronecker product with index convention `iA * dimB + iB`.
    pub fn kron(&self, other: &Self) -> Self {
        Self { inner: self.inner.kronecker(&other.inner) }
    }

    pub fn apply(&self, v: &StateVector) -> StateVector {
        assert_eq!(self.cols(), v.dim(), "dimension mismatch");
        let out = &self.inner * DVector::from_column_slice(v.amplitudes());
        StateVector { amplitudes: out.iter().copied().collect() }
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        let eig = HermitianEigen::new(self)?;
        Ok(eig.eigenvalues().to_vec())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.inner[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.inner[idx]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols(), rhs.rows(), "dimension mismatch in product");
        ComplexMatrix { inner: &self.inner * &rhs.inner }
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self * &rhs
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in sum");
        ComplexMatrix { inner: &self.inner + &rhs.inner }
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self + &rhs
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in difference");
        ComplexMatrix { inner: &self.inner - &rhs.inner }
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self - &rhs
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix { inner: -self.inner }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.inner[(i, j)];
                write!(f, "{:>9.5}{:+.5}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Pure state amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::validation("state vector must have positive dimension"));
        }
        Ok(Self { amplitudes })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![C64::ZERO; dim];
        amplitudes[index] = cr(1.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::validation("cannot normalize a zero or non-finite state"));
        }
        for z in &mut self.amplitudes {
            *z /= n;
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|self⟩⟨self|`.
    pub fn projector(&self) -> ComplexMatrix {
        let n = self.dim();
        ComplexMatrix::from_fn(n, n, |i, j| self.amplitudes[i] * self.amplitudes[j].conj())
    }
}

/// Cached eigendecomposition `H = Q Λ Q†` of a Hermitian matrix.
///
/// Constructing once and evaluating [`HermitianEigen::propagator`] at many
/// times is the cheap path for sweeps.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
}

impl HermitianEigen {
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        check_hermitian(h)?;
        let scale = h.max_abs();
        if !scale.is_finite() {
            return Err(Error::validation("generator has non-finite entries"));
        }
        let eig = h.as_nalgebra().clone().try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_ITER).ok_or_else(|| {
            Error::numerical(format!(
                "Hermitian eigensolver did not converge (dim {}, max|H| = {scale:.3e}, ‖H‖_F = {:.3e})",
                h.dim(),
                h.frobenius_norm()
            ))
        })?;
        // Sort ascending so downstream output does not depend on solver ordering.
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let n = h.dim();
        let eigenvectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        Ok(Self { eigenvalues, eigenvectors })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `exp(-i H t / ħ)`.
    pub fn propagator(&self, t: f64, hbar: f64) -> ComplexMatrix {
        let phases: Vec<C64> = self.eigenvalues.iter().map(|&e| C64::from_polar(1.0, -e * t / hbar)).collect();
        let q = &self.eigenvectors;
        let mut scaled = q.clone();
        for (j, ph) in phases.iter().enumerate() {
            for z in scaled.column_mut(j).iter_mut() {
                *z *= ph;
            }
        }
        ComplexMatrix::from_nalgebra(scaled * q.adjoint())
    }
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    if !h.is_square() {
        return Err(Error::validation(format!("generator must be square, got {}x{}", h.rows(), h.cols())));
    }
    let defect = h.hermitian_defect();
    let tol = ALGEBRAIC_TOL * h.max_abs().max(1.0);
    if !(defect <= tol) {
        return Err(Error::validation(format!(
            "generator is not Hermitian: max|H - H†| = {defect:.3e} exceeds {tol:.1e}"
        )));
    }
    Ok(())
}

/// Returns `U = exp(-i H t / ħ)` for a Hermitian generator `H`.
pub fn expm_generator(h: &ComplexMatrix, t: f64, hbar: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(Error::validation("evolution time must be finite"));
    }
    if !(hbar > 0.0) || !hbar.is_finite() {
        return Err(Error::validation("ħ must be positive and finite"));
    }
    Ok(HermitianEigen::new(h)?.propagator(t, hbar))
}

/// Kronecker product `A ⊗ B`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// `min_φ ‖A - e^{iφ} B‖_F`.
///
/// The minimiser is `φ* = arg Tr(B† A)`; when that trace vanishes every phase
/// gives the same distance and `‖A - B‖_F` is returned.
pub fn phase_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "phase_distance needs equal shapes");
    let overlap = (&b.adjoint() * a).trace();
    let aligned = if overlap.norm() == 0.0 { b.clone() } else { b.scale(C64::from_polar(1.0, overlap.arg())) };
    (a - &aligned).frobenius_norm()
}

/// Inner product of the global-phase-aligned matrices, exposed for reports:
/// the phase `φ*` used by [`phase_distance`].
pub fn optimal_phase(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (&b.adjoint() * a).trace().arg()
}
