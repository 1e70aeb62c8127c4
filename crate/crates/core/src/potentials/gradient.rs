//! Lifted gradients at the identity.
//!
//! For `Φ(G) = F(|G_{11}|², |G_{12}|², …)` and `W_{xy} = ∂F/∂|G_{xy}|²`
//! (each ordered entry treated as its own variable), the gradient of
//! `U ↦ Φ(UGU*)` at `U = I` is the commutator
//!
//! ```text
//! ∇Φ̂(I) = H G − G H,   H = (W + Wᵀ) ∘ G
//! ```
//!
//! which reproduces the entrywise exponential-potential formula term by term
//! after summing over `(x, y)`. All potentials below are assembled from their
//! weight matrices through this kernel.

use crate::error::{FrameError, Result};
use crate::gram::GramMatrix;
use crate::matrix::CMat;
use crate::scalar::Real;
use crate::tangent::{lift_to_tangent, TangentDirection};

use super::{check_index, row_sums, sum_exponents, PotentialParams};

/// Anti-Hermitian gradient of a lifted potential at the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientAtIdentity<T: Real> {
    dir: TangentDirection<T>,
}

impl<T: Real> GradientAtIdentity<T> {
    pub fn from_matrix(m: CMat<T>, g: &GramMatrix<T>) -> Self {
        Self { dir: TangentDirection::new(m, g.field()) }
    }

    pub fn zero(g: &GramMatrix<T>) -> Self {
        Self { dir: TangentDirection::zero(g.n(), g.field()) }
    }

    pub fn matrix(&self) -> &CMat<T> {
        self.dir.matrix()
    }

    pub fn direction(&self) -> &TangentDirection<T> {
        &self.dir
    }

    pub fn into_direction(self) -> TangentDirection<T> {
        self.dir
    }

    pub fn hs_norm(&self) -> T {
        self.dir.hs_norm()
    }

    /// `⟨∇Φ̂(I), A⟩_HS`, the directional derivative along `t ↦ e^{tA}Ge^{−tA}`.
    pub fn directional(&self, a: &TangentDirection<T>) -> T {
        self.matrix().hs_inner(a.matrix())
    }

    pub fn scale(&self, s: T) -> Self {
        Self { dir: self.dir.scaled(s) }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { dir: TangentDirection::new(self.matrix() + other.matrix(), self.dir.field()) }
    }
}

/// `[(W + Wᵀ) ∘ G, G]` for a real weight matrix `W`.
pub fn weighted_gradient<T: Real>(g: &GramMatrix<T>, w: &[Vec<T>]) -> GradientAtIdentity<T> {
    let n = g.n();
    let h = CMat::from_fn(n, n, |x, y| g.entry(x, y) * (w[x][y] + w[y][x]));
    GradientAtIdentity::from_matrix(h.commutator(g.matrix()), g)
}

/// Lifted gradient of `E^α_{x,y}`, written out entry by entry.
pub fn grad_exp_potential<T: Real>(g: &GramMatrix<T>, x: usize, y: usize, alpha: T) -> Result<GradientAtIdentity<T>> {
    check_index(g, x)?;
    check_index(g, y)?;
    let n = g.n();
    let gm = g.matrix();
    let scale = alpha * (alpha * gm[(x, y)].norm_sqr()).exp();
    let d = |i: usize, j: usize| if i == j { T::one() } else { T::zero() };
    let m = CMat::from_fn(n, n, |a, b| {
        let t = gm[(y, x)] * gm[(x, b)] * d(y, a) - gm[(a, y)] * gm[(y, x)] * d(b, x)
            + gm[(x, y)] * gm[(y, b)] * d(a, x)
            - gm[(a, x)] * gm[(x, y)] * d(b, y);
        t * scale
    });
    Ok(GradientAtIdentity::from_matrix(m, g))
}

/// Weights of `Φ_sum^η` divided by `e^{shift}`.
pub(crate) fn sum_weights<T: Real>(g: &GramMatrix<T>, eta: T, shift: T) -> Vec<Vec<T>> {
    sum_exponents(g, eta).into_iter().map(|row| row.into_iter().map(|e| eta * (e - shift).exp()).collect()).collect()
}

/// Gradient of `Φ_sum^η` itself. Note the factor `η` relative to a gradient
/// of `Φ_sum^η / η`.
pub fn grad_sum_potential<T: Real>(g: &GramMatrix<T>, eta: T) -> GradientAtIdentity<T> {
    weighted_gradient(g, &sum_weights(g, eta, T::zero()))
}

/// Gradient of `Φ_diag^δ`: `[∇]_{ab} = 2G_{ab}(G_{aa}e^{δG_{aa}²} − G_{bb}e^{δG_{bb}²})`.
pub fn grad_diag_potential<T: Real>(g: &GramMatrix<T>, delta: T) -> GradientAtIdentity<T> {
    weighted_gradient(g, &diag_weights(g, delta))
}

pub(crate) fn diag_weights<T: Real>(g: &GramMatrix<T>, delta: T) -> Vec<Vec<T>> {
    let n = g.n();
    let mut w = vec![vec![T::zero(); n]; n];
    for (j, d) in g.diagonal().into_iter().enumerate() {
        w[j][j] = (delta * d * d).exp();
    }
    w
}

/// `∂R_x/∂|G_{xj}|²`: `e^{α|G_{xj}|²}` off the diagonal, `βe^{|G_{xx}|²}` on it.
fn row_sum_partials<T: Real>(g: &GramMatrix<T>, x: usize, alpha: T, beta: T) -> Vec<T> {
    (0..g.n())
        .map(|j| {
            let a2 = g.entry(x, j).norm_sqr();
            if j == x {
                beta * a2.exp()
            } else {
                (alpha * a2).exp()
            }
        })
        .collect()
}

pub fn grad_row_sum<T: Real>(g: &GramMatrix<T>, x: usize, alpha: T, beta: T) -> Result<GradientAtIdentity<T>> {
    check_index(g, x)?;
    let n = g.n();
    let mut w = vec![vec![T::zero(); n]; n];
    w[x] = row_sum_partials(g, x, alpha, beta);
    Ok(weighted_gradient(g, &w))
}

pub(crate) fn chain_weights<T: Real>(g: &GramMatrix<T>, alpha: T, beta: T) -> Vec<Vec<T>> {
    let r = row_sums(g, alpha, beta);
    let n = r.len();
    let diff = |j: usize| r[j % n] - r[(j + 1) % n];
    (0..n)
        .map(|x| {
            // ∂Φ_ch/∂R_x = 2(D_x − D_{x−1})
            let outer = T::lit(2.0) * (diff(x) - diff(x + n - 1));
            row_sum_partials(g, x, alpha, beta).into_iter().map(|p| outer * p).collect()
        })
        .collect()
}

/// Full gradient of `Φ_ch^{α,β} = Σ_j (R_j − R_{j+1})²` by the chain rule,
/// `Σ_j 2(R_j − R_{j+1})(∇R_j − ∇R_{j+1})`, at every entry.
pub fn grad_chain_potential<T: Real>(g: &GramMatrix<T>, alpha: T, beta: T) -> GradientAtIdentity<T> {
    weighted_gradient(g, &chain_weights(g, alpha, beta))
}

pub fn grad_combined<T: Real>(g: &GramMatrix<T>, p: &PotentialParams) -> GradientAtIdentity<T> {
    let n = g.n();
    let (a, b, d, e) = (T::lit(p.alpha), T::lit(p.beta), T::lit(p.delta), T::lit(p.eta));
    let mut w = chain_weights(g, a, b);
    let wd = diag_weights(g, d);
    let ws = sum_weights(g, e, T::zero());
    for x in 0..n {
        for y in 0..n {
            w[x][y] = w[x][y] + wd[x][y] + ws[x][y];
        }
    }
    weighted_gradient(g, &w)
}

/// Gradient of `Φ^{(p)}` for `p ∈ {1, 2}`.
pub fn grad_pth_potential<T: Real>(g: &GramMatrix<T>, p: u32) -> Result<GradientAtIdentity<T>> {
    let w: Vec<Vec<T>> = match p {
        1 => vec![vec![T::one(); g.n()]; g.n()],
        2 => g.abs2().into_iter().map(|row| row.into_iter().map(|a| T::lit(2.0) * a).collect()).collect(),
        other => {
            return Err(FrameError::InvalidParameter(format!("gradient of Φ^(p) only for p ∈ {{1,2}}, got {other}")))
        }
    };
    Ok(weighted_gradient(g, &w))
}

/// HS norm of the Riemannian gradient, `‖∇Φ̂(I)G − G∇Φ̂(I)‖`.
pub fn riemannian_grad_norm<T: Real>(g: &GramMatrix<T>, grad: &GradientAtIdentity<T>) -> Result<T> {
    Ok(lift_to_tangent(g, grad.direction())?.hs_norm())
}
