//! Tangent geometry of the projection manifold.
//!
//! Tangent vectors at `G₀` are Hermitian `X` with `G₀XG₀ = 0` and
//! `(I−G₀)X(I−G₀) = 0`. Descent directions live one level up, as
//! anti-Hermitian generators `A` of the unitary (orthogonal) group acting by
//! conjugation; they reach the tangent space through `A ↦ AG₀ − G₀A`, a
//! surjective partial isometry.

use crate::config::Tolerances;
use crate::error::{FrameError, Result};
use crate::gram::{GramMatrix, HermMatrix};
use crate::matrix::CMat;
use crate::scalar::{c, cr, Field, Real};

/// Anti-Hermitian generator (anti-symmetric in the real field).
#[derive(Debug, Clone, PartialEq)]
pub struct TangentDirection<T: Real> {
    a: CMat<T>,
    field: Field,
}

impl<T: Real> TangentDirection<T> {
    /// Projects onto the anti-Hermitian part, `(A − A*)/2`, so that
    /// `A + A* = 0` holds exactly.
    pub fn new(a: CMat<T>, field: Field) -> Self {
        assert!(a.is_square(), "tangent direction must be square");
        let mut skew = a.anti_hermitian_part();
        if field.is_real() {
            skew = skew.real_part();
        }
        for i in 0..skew.rows() {
            skew[(i, i)] = c(T::zero(), skew[(i, i)].im);
        }
        Self { a: skew, field }
    }

    pub fn zero(n: usize, field: Field) -> Self {
        Self { a: CMat::zeros(n, n), field }
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn matrix(&self) -> &CMat<T> {
        &self.a
    }

    pub fn scaled(&self, s: T) -> Self {
        Self { a: self.a.scale(s), field: self.field }
    }

    pub fn hs_norm(&self) -> T {
        self.a.hs_norm()
    }
}

/// Hermitian matrix tangent to the manifold at some base point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector<T: Real> {
    x: CMat<T>,
}

impl<T: Real> TangentVector<T> {
    pub fn matrix(&self) -> &CMat<T> {
        &self.x
    }

    pub fn hs_norm(&self) -> T {
        self.x.hs_norm()
    }

    /// Largest of `‖G₀XG₀‖`, `‖(I−G₀)X(I−G₀)‖` and `‖X − X*‖`.
    pub fn tangency_defect(&self, g0: &GramMatrix<T>) -> T {
        let g = g0.matrix();
        let q = &CMat::identity(g.rows()) - g;
        let inner = g.matmul(&self.x).matmul(g).hs_norm();
        let outer = q.matmul(&self.x).matmul(&q).hs_norm();
        inner.max(outer).max(self.x.hermitian_defect())
    }
}

fn check_dim<T: Real>(g0: &GramMatrix<T>, m: &CMat<T>) -> Result<()> {
    if !m.is_square() || m.rows() != g0.n() {
        return Err(FrameError::DimensionMismatch { expected: g0.n(), found: m.rows() });
    }
    Ok(())
}

/// Orthogonal projection `X ↦ (I−G₀)XG₀ + G₀X*(I−G₀)` onto the tangent space.
pub fn tangent_project<T: Real>(g0: &GramMatrix<T>, x: &CMat<T>) -> Result<TangentVector<T>> {
    check_dim(g0, x)?;
    let g = g0.matrix();
    let q = &CMat::identity(g.rows()) - g;
    let first = q.matmul(x).matmul(g);
    let second = g.matmul(&x.adjoint()).matmul(&q);
    let mut out = &first + &second;
    if g0.field().is_real() {
        out = out.real_part();
    }
    Ok(TangentVector { x: out })
}

/// `A ↦ AG₀ − G₀A`.
pub fn lift_to_tangent<T: Real>(g0: &GramMatrix<T>, a: &TangentDirection<T>) -> Result<TangentVector<T>> {
    check_dim(g0, a.matrix())?;
    let x = a.matrix().commutator(g0.matrix());
    Ok(TangentVector { x: HermMatrix::symmetrized(x, g0.field()).into_matrix() })
}

/// Real dimension of the manifold: `K(N−K)` over the reals, `2K(N−K)` over
/// the complex numbers.
pub fn tangent_dimension<T: Real>(g: &GramMatrix<T>) -> usize {
    g.field().real_dim() * g.k() * (g.n() - g.k())
}

/// Orthonormal basis (for the real HS inner product) of the anti-Hermitian
/// matrices: `T_{ab} = (Δ_{ab} − Δ_{ba})/√2` for `a > b`, plus, over the
/// complex numbers, `S_{aa} = iΔ_{aa}` and `S_{ab} = i(Δ_{ab} + Δ_{ba})/√2`.
pub fn anti_hermitian_basis<T: Real>(n: usize, field: Field) -> Vec<CMat<T>> {
    let r = T::one() / T::lit(2.0).sqrt();
    let mut basis = Vec::new();
    for a in 0..n {
        for b in 0..a {
            let mut t = CMat::zeros(n, n);
            t[(a, b)] = cr(r);
            t[(b, a)] = cr(-r);
            basis.push(t);
        }
    }
    if !field.is_real() {
        for a in 0..n {
            let mut s = CMat::zeros(n, n);
            s[(a, a)] = c(T::zero(), T::one());
            basis.push(s);
            for b in 0..a {
                let mut s = CMat::zeros(n, n);
                s[(a, b)] = c(T::zero(), r);
                s[(b, a)] = c(T::zero(), r);
                basis.push(s);
            }
        }
    }
    basis
}

/// Images of the anti-Hermitian basis under the lift; a Parseval frame for
/// the tangent space.
pub fn tangent_frame<T: Real>(g0: &GramMatrix<T>) -> Vec<CMat<T>> {
    anti_hermitian_basis::<T>(g0.n(), g0.field()).into_iter().map(|b| b.commutator(g0.matrix())).collect()
}

/// `Σ ⟨X, P(B)⟩ P(B)` over the tangent frame.
pub fn tangent_reconstruct<T: Real>(g0: &GramMatrix<T>, x: &CMat<T>) -> Result<CMat<T>> {
    check_dim(g0, x)?;
    let n = g0.n();
    let mut acc = CMat::zeros(n, n);
    for v in tangent_frame(g0) {
        let coeff = x.hs_inner(&v);
        acc = &acc + &v.scale(coeff);
    }
    Ok(acc)
}

/// Numeric rank of the tangent projector, counted from the eigenvalues of the
/// real Gram matrix of the tangent frame (which is itself a projection).
pub fn numeric_tangent_rank<T: Real>(g0: &GramMatrix<T>) -> usize {
    let frame = tangent_frame(g0);
    let m = frame.len();
    let gram = CMat::from_real_fn(m, m, |i, j| frame[i].hs_inner(&frame[j]));
    let (vals, _) = gram.hermitian_eigen();
    vals.into_iter().filter(|&v| v > T::lit(0.5)).count()
}

/// Moves along the curve `t ↦ U G U*`, `U = exp(−t A)`. The conjugation is
/// exactly unitary up to rounding, and the result is re-symmetrized.
pub fn retract<T: Real>(g: &GramMatrix<T>, a: &TangentDirection<T>, step: T) -> GramMatrix<T> {
    if step.is_zero() || a.matrix().max_abs().is_zero() {
        return g.clone();
    }
    let d = retraction_increment(g, a, step);
    GramMatrix::trusted(g.matrix() + &d, g.field(), g.k())
}

/// `U G U* − G` for `U = exp(−t A)`, written as `VG + GV* + VGV*` with
/// `V = U − I` so that it stays accurate relative to its own size for
/// small steps.
pub fn retraction_increment<T: Real>(g: &GramMatrix<T>, a: &TangentDirection<T>, step: T) -> CMat<T> {
    let v = a.matrix().scale(-step).expm_minus_identity();
    let gm = g.matrix();
    let vg = v.matmul(gm);
    let d = &(&vg + &gm.matmul(&v.adjoint())) + &vg.matmul(&v.adjoint());
    let d = d.hermitian_part();
    if g.field().is_real() {
        d.real_part()
    } else {
        d
    }
}

/// Alternative retraction: steps to `G − t(AG − GA)` in the ambient space and
/// projects back onto the nearest rank-`K` projection (top-`K` spectral
/// projector). Used as an independent cross-check of [`retract`].
pub fn retract_spectral<T: Real>(g: &GramMatrix<T>, a: &TangentDirection<T>, step: T) -> GramMatrix<T> {
    let moved = g.matrix() - &a.matrix().commutator(g.matrix()).scale(step);
    spectral_projection(&moved, g.k(), g.field())
}

/// Orthogonal projection onto the span of the top `k` eigenvectors of the
/// Hermitian part of `m`.
pub fn spectral_projection<T: Real>(m: &CMat<T>, k: usize, field: Field) -> GramMatrix<T> {
    let (_, vecs) = m.hermitian_eigen();
    let n = m.rows();
    let top = CMat::from_fn(n, k, |i, j| vecs[(i, j)]);
    GramMatrix::trusted(top.matmul(&top.adjoint()), field, k)
}

/// Checks that `tol.retraction` still holds after a sequence of moves.
pub fn still_on_manifold<T: Real>(g: &GramMatrix<T>, tol: &Tolerances) -> bool {
    g.is_on_manifold(tol.retraction)
}
