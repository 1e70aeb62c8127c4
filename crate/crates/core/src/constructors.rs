//! Reference frames and random Parseval initializations.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::Tolerances;
use crate::error::{FrameError, Result};
use crate::gram::GramMatrix;
use crate::matrix::{cx, CMat};
use crate::scalar::{Field, Real, C};

/// `K×N` synthesis matrix whose columns are the frame vectors `f_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameVectors<T: Real> {
    pub n: usize,
    pub k: usize,
    pub synthesis: CMat<T>,
    pub field: Field,
}

impl<T: Real> FrameVectors<T> {
    pub fn new(synthesis: CMat<T>, field: Field) -> Self {
        let synthesis = if field.is_real() { synthesis.real_part() } else { synthesis };
        Self { n: synthesis.cols(), k: synthesis.rows(), synthesis, field }
    }

    /// `‖Σ_j f_j f_j* − I_K‖_HS`.
    pub fn parseval_residual(&self) -> T {
        let s = &self.synthesis;
        (&s.matmul(&s.adjoint()) - &CMat::identity(self.k)).hs_norm()
    }

    pub fn vector(&self, j: usize) -> Vec<C<T>> {
        (0..self.k).map(|m| self.synthesis[(m, j)]).collect()
    }

    pub fn squared_norms(&self) -> Vec<T> {
        (0..self.n).map(|j| (0..self.k).map(|m| self.synthesis[(m, j)].norm_sqr()).sum()).collect()
    }
}

/// `G_{jl} = ⟨f_l, f_j⟩`, i.e. `G = S*S` for the synthesis matrix `S`.
pub fn gramian_of<T: Real>(fv: &FrameVectors<T>) -> Result<GramMatrix<T>> {
    gramian_of_with(fv, &Tolerances::default())
}

pub fn gramian_of_with<T: Real>(fv: &FrameVectors<T>, tol: &Tolerances) -> Result<GramMatrix<T>> {
    let residual = fv.parseval_residual().as_f64();
    if !(residual <= tol.manifold) {
        return Err(FrameError::NotParseval { residual });
    }
    let s = &fv.synthesis;
    GramMatrix::from_matrix(s.adjoint().matmul(s), fv.field, fv.k, tol)
}

/// Standard orthonormal basis of `F^K` as a `(K, K)` frame.
pub fn standard_basis<T: Real>(k: usize, field: Field) -> FrameVectors<T> {
    FrameVectors::new(CMat::identity(k), field)
}

/// Harmonic frame `f_j = N^{−1/2}(ω^{jm})_{m∈rows}`, `ω = e^{2πi/N}`.
/// `rows` defaults to `{0, …, K−1}`.
pub fn harmonic_frame<T: Real>(n: usize, k: usize, rows: Option<&[usize]>) -> Result<FrameVectors<T>> {
    if k == 0 || k > n {
        return Err(FrameError::BadRank { n, k });
    }
    let rows: Vec<usize> = match rows {
        Some(r) => r.to_vec(),
        None => (0..k).collect(),
    };
    if rows.len() != k {
        return Err(FrameError::BadSelection(format!("expected {k} rows, got {}", rows.len())));
    }
    let mut seen = vec![false; n];
    for &r in &rows {
        if r >= n {
            return Err(FrameError::BadSelection(format!("row {r} outside Z_{n}")));
        }
        if std::mem::replace(&mut seen[r], true) {
            return Err(FrameError::BadSelection(format!("row {r} selected twice")));
        }
    }
    let scale = 1.0 / (n as f64).sqrt();
    let s = CMat::from_fn(k, n, |m, j| {
        // reduce the exponent mod N before converting to an angle
        let phase = 2.0 * PI * ((j * rows[m]) % n) as f64 / n as f64;
        cx(scale * phase.cos(), scale * phase.sin())
    });
    Ok(FrameVectors::new(s, Field::Complex))
}

/// `f_j = √(2/N)(cos(πj/N), sin(πj/N))`; for `N > 3` a Grassmannian
/// equal-norm Parseval frame with coherence `(2/N)cos(π/N)`.
pub fn semicircle_frame<T: Real>(n: usize) -> Result<FrameVectors<T>> {
    if n < 2 {
        return Err(FrameError::InvalidParameter(format!("semicircle frame needs N ≥ 2, got {n}")));
    }
    let r = (2.0 / n as f64).sqrt();
    let s = CMat::from_real_fn(2, n, |m, j| {
        let t = PI * j as f64 / n as f64;
        T::lit(r * if m == 0 { t.cos() } else { t.sin() })
    });
    Ok(FrameVectors::new(s, Field::Real))
}

/// Equiangular `(3, 2)` frame `√(2/3)(cos(2πj/3), sin(2πj/3))`.
pub fn mercedes_benz<T: Real>() -> FrameVectors<T> {
    let r = (2.0f64 / 3.0).sqrt();
    let s = CMat::from_real_fn(2, 3, |m, j| {
        let t = 2.0 * PI * j as f64 / 3.0;
        T::lit(r * if m == 0 { t.cos() } else { t.sin() })
    });
    FrameVectors::new(s, Field::Real)
}

/// Real `(12, 4)` frame made of three scaled mutually unbiased bases.
pub fn mub12_4_frame<T: Real>() -> FrameVectors<T> {
    const SIGNS: [[i8; 8]; 4] = [
        [1, 1, 1, -1, 1, 1, 1, -1],
        [1, 1, -1, 1, 1, -1, 1, 1],
        [1, -1, -1, -1, 1, -1, -1, -1],
        [1, -1, 1, 1, -1, -1, 1, -1],
    ];
    let a = (1.0f64 / 12.0).sqrt();
    let s = (1.0f64 / 3.0).sqrt();
    let m = CMat::from_real_fn(4, 12, |r, j| {
        T::lit(if j < 4 {
            if r == j {
                s
            } else {
                0.0
            }
        } else {
            a * SIGNS[r][j - 4] as f64
        })
    });
    FrameVectors::new(m, Field::Real)
}

/// Complex `(6, 4)` Gramian built from mutually unbiased basic sequences,
/// with `λ = √(1/18)` and `ω = e^{2πi/8}`.
pub fn mubs_6_4_gramian<T: Real>() -> Result<GramMatrix<T>> {
    let l = (1.0f64 / 18.0).sqrt();
    let t = 2.0 / 3.0;
    let w = |p: u32| {
        let a = 2.0 * PI * p as f64 / 8.0;
        (l * a.cos(), l * a.sin())
    };
    let entries: [[(f64, f64); 6]; 6] = [
        [(t, 0.0), (0.0, 0.0), (l, 0.0), (0.0, l), (l, 0.0), (l, 0.0)],
        [(0.0, 0.0), (t, 0.0), (0.0, l), (l, 0.0), (-l, 0.0), (l, 0.0)],
        [(l, 0.0), (0.0, -l), (t, 0.0), (0.0, 0.0), w(5), w(3)],
        [(0.0, -l), (l, 0.0), (0.0, 0.0), (t, 0.0), w(1), w(3)],
        [(l, 0.0), (-l, 0.0), w(3), w(7), (t, 0.0), (0.0, 0.0)],
        [(l, 0.0), (l, 0.0), w(5), w(5), (0.0, 0.0), (t, 0.0)],
    ];
    let m = CMat::from_fn(6, 6, |i, j| cx(entries[i][j].0, entries[i][j].1));
    GramMatrix::from_matrix(m, Field::Complex, 4, &Tolerances::default())
}

fn joint_field(a: Field, b: Field) -> Field {
    if a.is_real() && b.is_real() {
        Field::Real
    } else {
        Field::Complex
    }
}

/// `G₁ ⊗ G₂ ∈ M_{N₁N₂, K₁K₂}`.
pub fn tensor_product<T: Real>(g1: &GramMatrix<T>, g2: &GramMatrix<T>) -> GramMatrix<T> {
    GramMatrix::trusted(g1.matrix().kron(g2.matrix()), joint_field(g1.field(), g2.field()), g1.k() * g2.k())
}

/// Block-diagonal `G₁ ⊕ G₂ ∈ M_{N₁+N₂, K₁+K₂}`.
pub fn direct_sum<T: Real>(g1: &GramMatrix<T>, g2: &GramMatrix<T>) -> GramMatrix<T> {
    GramMatrix::trusted(g1.matrix().direct_sum(g2.matrix()), joint_field(g1.field(), g2.field()), g1.k() + g2.k())
}

const DRAW_ATTEMPTS: usize = 3;

/// Projection onto the column span of an `N×K` Gaussian matrix; the law is
/// invariant under unitary (orthogonal) conjugation. Deterministic per seed.
pub fn random_parseval<T: Real>(n: usize, k: usize, field: Field, seed: u64) -> Result<GramMatrix<T>> {
    if k == 0 || k > n {
        return Err(FrameError::BadRank { n, k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..DRAW_ATTEMPTS {
        let draw = CMat::from_fn(n, k, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = if field.is_real() { 0.0 } else { StandardNormal.sample(&mut rng) };
            cx(re, im)
        });
        if let Some(q) = orthonormal_columns(&draw) {
            return Ok(GramMatrix::trusted(q.matmul(&q.adjoint()), field, k));
        }
    }
    Err(FrameError::DegenerateDraw { attempts: DRAW_ATTEMPTS })
}

/// Modified Gram–Schmidt with one reorthogonalization pass; `None` when a
/// column is numerically dependent on the previous ones.
fn orthonormal_columns<T: Real>(m: &CMat<T>) -> Option<CMat<T>> {
    let (n, k) = (m.rows(), m.cols());
    let mut cols: Vec<Vec<C<T>>> = (0..k).map(|j| (0..n).map(|i| m[(i, j)]).collect()).collect();
    for j in 0..k {
        let original: T = cols[j].iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        for _ in 0..2 {
            for p in 0..j {
                let proj: C<T> =
                    (0..n).map(|i| cols[p][i].conj() * cols[j][i]).fold(C::new(T::zero(), T::zero()), |a, b| a + b);
                for i in 0..n {
                    let v = cols[p][i] * proj;
                    cols[j][i] = cols[j][i] - v;
                }
            }
        }
        let norm: T = cols[j].iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if !(norm > T::lit(1e-8) * original) || !(original > T::zero()) {
            return None;
        }
        for z in cols[j].iter_mut() {
            *z = *z / norm;
        }
    }
    Some(CMat::from_fn(n, k, |i, j| cols[j][i]))
}

/// Built-in fixtures by name: `mercedes_benz`, `mubs6_4`, `mub12_4`,
/// `harmonic_N_K`, `semicircle_N`, `identity_N`.
pub fn named_fixture<T: Real>(name: &str) -> Result<GramMatrix<T>> {
    let parts: Vec<&str> = name.split('_').collect();
    let num = |s: &str| s.parse::<usize>().map_err(|_| FrameError::UnknownVariant(name.to_string()));
    match parts.as_slice() {
        ["mercedes", "benz"] => gramian_of(&mercedes_benz()),
        ["mubs6", "4"] => mubs_6_4_gramian(),
        ["mub12", "4"] => gramian_of(&mub12_4_frame()),
        ["harmonic", n, k] => gramian_of(&harmonic_frame(num(n)?, num(k)?, None)?),
        ["semicircle", n] => gramian_of(&semicircle_frame(num(n)?)?),
        ["identity", n] => Ok(GramMatrix::identity(num(n)?, Field::Real)),
        _ => Err(FrameError::UnknownVariant(name.to_string())),
    }
}
