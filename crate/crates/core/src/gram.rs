//! Hermitian matrices and Gramians of Parseval frames.
//!
//! A Parseval frame of `N` vectors spanning a `K`-dimensional space is, up to
//! unitary equivalence, the same thing as its Gramian: an `N×N` orthogonal
//! projection of rank `K`. [`GramMatrix`] is that projection together with
//! the residuals measured when it was admitted.

use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{FrameError, Result};
use crate::matrix::CMat;
use crate::scalar::{cr, Field, Real, C};

/// Hermitian (real symmetric, for [`Field::Real`]) square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermMatrix<T: Real> {
    mat: CMat<T>,
    field: Field,
}

impl<T: Real> HermMatrix<T> {
    /// Checks the Hermitian defect against `tol.symmetry`, then symmetrizes
    /// exactly. Real-field input must have vanishing imaginary parts.
    pub fn new(mat: CMat<T>, field: Field, tol: &Tolerances) -> Result<Self> {
        if !mat.is_square() {
            return Err(FrameError::NotSquare { rows: mat.rows(), cols: mat.cols() });
        }
        let defect = mat.hermitian_defect().as_f64();
        if !(defect <= tol.symmetry) {
            return Err(FrameError::NotHermitian { defect });
        }
        if field.is_real() {
            let max_imag = mat.max_imag().as_f64();
            if !(max_imag <= tol.symmetry) {
                return Err(FrameError::ComplexEntriesInRealField { max_imag });
            }
        }
        Ok(Self::symmetrized(mat, field))
    }

    /// Replaces `X` by `(X + X*)/2` (and drops imaginary parts in the real
    /// field) without any check.
    pub fn symmetrized(mat: CMat<T>, field: Field) -> Self {
        let mut h = mat.hermitian_part();
        if field.is_real() {
            h = h.real_part();
        }
        for i in 0..h.rows() {
            h[(i, i)] = cr(h[(i, i)].re);
        }
        Self { mat: h, field }
    }

    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn matrix(&self) -> &CMat<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat<T> {
        self.mat
    }
}

/// Residuals recorded when a Gramian is admitted to the manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationResiduals {
    /// `‖G² − G‖_HS`
    pub idempotency: f64,
    /// `|tr G − K|`
    pub trace_gap: f64,
}

/// A point of the manifold of rank-`K` orthogonal projections on `F^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix<T: Real> {
    mat: HermMatrix<T>,
    k: usize,
    residuals: ValidationResiduals,
}

pub fn residuals_of<T: Real>(g: &CMat<T>, k: usize) -> ValidationResiduals {
    let idempotency = (&g.matmul(g) - g).hs_norm().as_f64();
    let trace_gap = (g.trace().re.as_f64() - k as f64).abs();
    ValidationResiduals { idempotency, trace_gap }
}

impl<T: Real> GramMatrix<T> {
    /// Admits `raw` iff `‖G²−G‖_HS` and `|tr G − K|` are both within
    /// `tol.manifold`.
    pub fn validate(raw: HermMatrix<T>, k: usize, tol: &Tolerances) -> Result<Self> {
        Self::validate_at(raw, k, tol.manifold)
    }

    pub fn validate_at(raw: HermMatrix<T>, k: usize, bound: f64) -> Result<Self> {
        let n = raw.n();
        if k == 0 || k > n {
            return Err(FrameError::BadRank { n, k });
        }
        let residuals = residuals_of(raw.matrix(), k);
        if !(residuals.idempotency <= bound) {
            return Err(FrameError::NotIdempotent { residual: residuals.idempotency });
        }
        if !(residuals.trace_gap <= bound) {
            return Err(FrameError::TraceMismatch { gap: residuals.trace_gap });
        }
        Ok(Self { mat: raw, k, residuals })
    }

    /// Convenience wrapper: Hermitian check followed by [`GramMatrix::validate`].
    pub fn from_matrix(mat: CMat<T>, field: Field, k: usize, tol: &Tolerances) -> Result<Self> {
        Self::validate(HermMatrix::new(mat, field, tol)?, k, tol)
    }

    /// Wraps a matrix known to be a projection by construction (e.g. a
    /// unitary conjugate of a validated Gramian). Residuals are still measured.
    pub(crate) fn trusted(mat: CMat<T>, field: Field, k: usize) -> Self {
        let h = HermMatrix::symmetrized(mat, field);
        let residuals = residuals_of(h.matrix(), k);
        Self { mat: h, k, residuals }
    }

    pub fn identity(n: usize, field: Field) -> Self {
        Self::trusted(CMat::identity(n), field, n)
    }

    pub fn n(&self) -> usize {
        self.mat.n()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn field(&self) -> Field {
        self.mat.field()
    }

    pub fn residuals(&self) -> ValidationResiduals {
        self.residuals
    }

    pub fn matrix(&self) -> &CMat<T> {
        self.mat.matrix()
    }

    pub fn herm(&self) -> &HermMatrix<T> {
        &self.mat
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> C<T> {
        self.mat.matrix()[(i, j)]
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n()).map(|i| self.entry(i, i).re).collect()
    }

    /// `|G_{jl}|²` for every entry.
    pub fn abs2(&self) -> Vec<Vec<T>> {
        let n = self.n();
        (0..n).map(|i| (0..n).map(|j| self.entry(i, j).norm_sqr()).collect()).collect()
    }

    /// Re-checks membership with a caller-chosen bound.
    pub fn is_on_manifold(&self, bound: f64) -> bool {
        self.residuals.idempotency <= bound && self.residuals.trace_gap <= bound
    }

    /// `Σ_{j,l} |G_{jl}|²`, which equals `K` on the manifold.
    pub fn frobenius_sq(&self) -> T {
        self.matrix().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `P G P*` for the permutation `i ↦ perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self::trusted(self.matrix().permute_symmetric(perm), self.field(), self.k)
    }

    pub fn hs_distance(&self, other: &Self) -> T {
        (self.matrix() - other.matrix()).hs_norm()
    }

    /// Re-interprets a real Gramian as a complex one (no-op on entries).
    pub fn into_field(self, field: Field) -> Self {
        let k = self.k;
        Self::trusted(self.mat.into_matrix(), field, k)
    }
}
