//! Real-analytic charts of the projection manifold.
//!
//! For a pivot set `J` of `K` linearly independent rows, the rows of
//! `(G^{J,J})^{-1} G^{J,·}` contain a `K×K` identity block in the `J`
//! columns; the remaining `K×(N−K)` block is the chart coordinate. The
//! inverse map rebuilds `A = (I_K | coords)` in `J` ordering and returns the
//! projection `A*(AA*)^{-1}A` onto the row space of `A`.

use crate::config::Tolerances;
use crate::error::{FrameError, Result};
use crate::gram::GramMatrix;
use crate::matrix::CMat;
use crate::scalar::{Field, Real};

use num_complex::Complex;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq)]
pub struct ChartCoordinates<T: Real> {
    /// Pivot rows `J`, in increasing order.
    pub pivot_rows: Vec<usize>,
    /// `K×(N−K)` block for the complementary columns, in increasing order.
    pub coords: CMat<T>,
    /// Condition number of the pivot block `G^{J,J}`.
    pub condition: f64,
    pub field: Field,
}

impl<T: Real> ChartCoordinates<T> {
    pub fn n(&self) -> usize {
        self.coords.rows() + self.coords.cols()
    }

    pub fn k(&self) -> usize {
        self.coords.rows()
    }
}

/// Greedy pivoted Cholesky on `G`: each step takes the row with the largest
/// remaining Schur-complement diagonal, which greedily maximizes `|det G^{J,J}|`.
pub fn auto_pivots<T: Real>(g: &GramMatrix<T>) -> Vec<usize> {
    let n = g.n();
    let k = g.k();
    let m = g.matrix();
    let mut resid: Vec<T> = g.diagonal();
    let mut factors: Vec<Vec<Complex<T>>> = Vec::with_capacity(k);
    let mut chosen = Vec::with_capacity(k);
    for _ in 0..k {
        let (p, _) = resid
            .iter()
            .enumerate()
            .filter(|(i, _)| !chosen.contains(i))
            .fold((usize::MAX, T::neg_infinity()), |best, (i, &d)| if d > best.1 { (i, d) } else { best });
        let dp = resid[p].max(T::min_positive_value()).sqrt();
        let mut col = vec![Complex::zero(); n];
        for i in 0..n {
            let mut v = m[(i, p)];
            for f in &factors {
                v = v - f[i] * f[p].conj();
            }
            col[i] = v / dp;
        }
        for i in 0..n {
            resid[i] = resid[i] - col[i].norm_sqr();
        }
        factors.push(col);
        chosen.push(p);
    }
    chosen.sort_unstable();
    chosen
}

/// Condition number of a Hermitian positive definite block; infinite when
/// the smallest eigenvalue is not positive.
fn hermitian_condition<T: Real>(m: &CMat<T>) -> f64 {
    let (vals, _) = m.hermitian_eigen();
    let hi = vals.first().copied().unwrap_or_else(T::zero).as_f64();
    let lo = vals.last().copied().unwrap_or_else(T::zero).as_f64();
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

pub fn chart_coordinates<T: Real>(
    g: &GramMatrix<T>,
    pivots: Option<&[usize]>,
    tol: &Tolerances,
) -> Result<ChartCoordinates<T>> {
    let n = g.n();
    let k = g.k();
    let mut j: Vec<usize> = match pivots {
        Some(p) => p.to_vec(),
        None => auto_pivots(g),
    };
    j.sort_unstable();
    j.dedup();
    if j.len() != k {
        return Err(FrameError::DimensionMismatch { expected: k, found: j.len() });
    }
    if let Some(&bad) = j.iter().find(|&&i| i >= n) {
        return Err(FrameError::IndexOutOfRange { index: bad, n });
    }
    let block = g.matrix().submatrix(&j, &j);
    let condition = hermitian_condition(&block);
    if !(condition <= tol.chart_condition) {
        return Err(FrameError::SingularPivotBlock { condition });
    }
    let inv = block.inverse().ok_or(FrameError::SingularPivotBlock { condition })?;
    let rest: Vec<usize> = (0..n).filter(|i| !j.contains(i)).collect();
    let coords = inv.matmul(&g.matrix().submatrix(&j, &rest));
    let coords = if g.field().is_real() { coords.real_part() } else { coords };
    Ok(ChartCoordinates { pivot_rows: j, coords, condition, field: g.field() })
}

/// Rebuilds the Gramian of an `(n, k)` chart point.
pub fn chart_reconstruct<T: Real>(
    c: &ChartCoordinates<T>,
    n: usize,
    k: usize,
    tol: &Tolerances,
) -> Result<GramMatrix<T>> {
    if c.k() != k {
        return Err(FrameError::DimensionMismatch { expected: k, found: c.k() });
    }
    if c.n() != n {
        return Err(FrameError::DimensionMismatch { expected: n, found: c.n() });
    }
    if c.pivot_rows.len() != k {
        return Err(FrameError::DimensionMismatch { expected: k, found: c.pivot_rows.len() });
    }
    if c.coords.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(FrameError::InvalidParameter("non-finite chart coordinates".into()));
    }
    let rest: Vec<usize> = (0..n).filter(|i| !c.pivot_rows.contains(i)).collect();
    let mut a = CMat::zeros(k, n);
    for (r, &col) in c.pivot_rows.iter().enumerate() {
        a[(r, col)] = Complex::one();
    }
    for (ci, &col) in rest.iter().enumerate() {
        for r in 0..k {
            a[(r, col)] = c.coords[(r, ci)];
        }
    }
    let q = a.matmul(&a.adjoint());
    let qinv = q.inverse().ok_or(FrameError::SingularGram)?;
    let g = a.adjoint().matmul(&qinv).matmul(&a);
    GramMatrix::from_matrix(g.hermitian_part(), c.field, k, tol)
}
