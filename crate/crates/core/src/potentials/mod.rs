//! Frame potentials on the projection manifold.
//!
//! Every potential here is a function of the squared magnitudes `|G_{jl}|²`.
//! Values live in this module; lifted gradients (at the identity of the
//! unitary group) in [`gradient`]; closed-form constants and bounds in
//! [`bounds`]; the entrywise gradient formulas, kept as an independent
//! cross-check of the matrix kernel, in [`closed_form`].

pub mod bounds;
pub mod closed_form;
pub mod gradient;

use serde::{Deserialize, Serialize};

use crate::config::LOG_DOMAIN_ETA;
use crate::error::{FrameError, Result};
use crate::gram::GramMatrix;
use crate::scalar::Real;

pub use bounds::{potential_bounds, welch_constant, BoundVariant};
pub use gradient::{
    grad_chain_potential, grad_combined, grad_diag_potential, grad_exp_potential, grad_pth_potential, grad_row_sum,
    grad_sum_potential, riemannian_grad_norm, GradientAtIdentity,
};

/// Positive parameters `(α, β, δ, η)` of the combined potential
/// `Φ_ch^{α,β} + Φ_diag^δ + Φ_sum^η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub eta: f64,
}

impl PotentialParams {
    pub fn new(alpha: f64, beta: f64, delta: f64, eta: f64) -> Result<Self> {
        let p = Self { alpha, beta, delta, eta };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("delta", self.delta), ("eta", self.eta)] {
            positive(name, v)?;
        }
        Ok(())
    }
}

impl Default for PotentialParams {
    fn default() -> Self {
        Self { alpha: 1.0, beta: 1.0, delta: 1.0, eta: 1.0 }
    }
}

pub(crate) fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(FrameError::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

pub(crate) fn check_index<T: Real>(g: &GramMatrix<T>, i: usize) -> Result<()> {
    if i < g.n() {
        Ok(())
    } else {
        Err(FrameError::IndexOutOfRange { index: i, n: g.n() })
    }
}

/// `ln Σ exp(x_i)`, stable for large arguments.
pub fn log_sum_exp<T: Real>(xs: impl IntoIterator<Item = T>) -> T {
    let xs: Vec<T> = xs.into_iter().collect();
    let m = xs.iter().copied().fold(T::neg_infinity(), T::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|&x| (x - m).exp()).sum::<T>().ln()
}

/// Diagonal exponent offset `η(K²/N² − C²_{N,K})` of the sum potential.
pub fn diagonal_offset<T: Real>(n: usize, k: usize, eta: T) -> T {
    let nf = T::lit(n as f64);
    let kf = T::lit(k as f64);
    let c = welch_constant::<T>(n, k);
    eta * (kf * kf / (nf * nf) - c * c)
}

/// Exponents `η|G_{jl}|² − δ_{jl} η(K²/N² − C²)` of the terms of `Φ_sum^η`.
pub(crate) fn sum_exponents<T: Real>(g: &GramMatrix<T>, eta: T) -> Vec<Vec<T>> {
    let off = diagonal_offset(g.n(), g.k(), eta);
    let mut e = g.abs2();
    for (j, row) in e.iter_mut().enumerate() {
        for (l, v) in row.iter_mut().enumerate() {
            *v = eta * *v - if j == l { off } else { T::zero() };
        }
    }
    e
}

/// `E^η_{x,y}(G) = e^{η|G_{xy}|²}`.
pub fn exp_potential<T: Real>(g: &GramMatrix<T>, x: usize, y: usize, eta: T) -> Result<T> {
    check_index(g, x)?;
    check_index(g, y)?;
    Ok((eta * g.entry(x, y).norm_sqr()).exp())
}

/// `ln Φ_od^η(G)`, always evaluated with log-sum-exp.
pub fn log_offdiag_potential<T: Real>(g: &GramMatrix<T>, eta: T) -> T {
    let a = g.abs2();
    let n = g.n();
    log_sum_exp((0..n).flat_map(|j| (0..n).filter(move |&l| l != j).map(move |l| (j, l))).map(|(j, l)| eta * a[j][l]))
}

/// Off-diagonal sum potential `Φ_od^η = Σ_{j≠l} e^{η|G_{jl}|²}`.
pub fn offdiag_potential<T: Real>(g: &GramMatrix<T>, eta: T) -> T {
    if eta.as_f64() > LOG_DOMAIN_ETA {
        return log_offdiag_potential(g, eta).exp();
    }
    let a = g.abs2();
    let n = g.n();
    let mut s = T::zero();
    for j in 0..n {
        for l in 0..n {
            if j != l {
                s = s + (eta * a[j][l]).exp();
            }
        }
    }
    s
}

/// `ln Φ_sum^η(G)` by log-sum-exp.
pub fn log_sum_potential<T: Real>(g: &GramMatrix<T>, eta: T) -> T {
    log_sum_exp(sum_exponents(g, eta).into_iter().flatten())
}

/// Sum potential `Φ_od^η + Σ_j e^{−η(K²/N² − C²)} e^{η G_{jj}²}`.
pub fn sum_potential<T: Real>(g: &GramMatrix<T>, eta: T) -> T {
    if eta.as_f64() > LOG_DOMAIN_ETA {
        return log_sum_potential(g, eta).exp();
    }
    sum_exponents(g, eta).into_iter().flatten().map(T::exp).sum()
}

/// Diagonal potential `(1/δ)Σ_j e^{δG_{jj}²} − (N/δ)e^{δK²/N²}`; zero exactly
/// at equal-norm Gramians.
pub fn diag_potential<T: Real>(g: &GramMatrix<T>, delta: T) -> T {
    let n = T::lit(g.n() as f64);
    let k = T::lit(g.k() as f64);
    let s: T = g.diagonal().into_iter().map(|d| (delta * d * d).exp()).sum();
    (s - n * (delta * k * k / (n * n)).exp()) / delta
}

/// Exponential row sum `R_x^{α,β} = (1/α)Σ_{j≠x} e^{α|G_{xj}|²} + βe^{|G_{xx}|²}`.
pub fn row_sum_potential<T: Real>(g: &GramMatrix<T>, x: usize, alpha: T, beta: T) -> Result<T> {
    check_index(g, x)?;
    Ok(row_sum_unchecked(g, x, alpha, beta))
}

fn row_sum_unchecked<T: Real>(g: &GramMatrix<T>, x: usize, alpha: T, beta: T) -> T {
    let mut s = T::zero();
    for j in 0..g.n() {
        if j != x {
            s = s + (alpha * g.entry(x, j).norm_sqr()).exp();
        }
    }
    s / alpha + beta * g.entry(x, x).norm_sqr().exp()
}

/// All row sums `R_x^{α,β}` and their spread `max − min`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowSumProfile {
    pub values: Vec<f64>,
    pub equipartition_spread: f64,
}

pub fn row_sum_profile<T: Real>(g: &GramMatrix<T>, alpha: T, beta: T) -> RowSumProfile {
    let values: Vec<f64> = (0..g.n()).map(|x| row_sum_unchecked(g, x, alpha, beta).as_f64()).collect();
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    RowSumProfile { values, equipartition_spread: hi - lo }
}

pub(crate) fn row_sums<T: Real>(g: &GramMatrix<T>, alpha: T, beta: T) -> Vec<T> {
    (0..g.n()).map(|x| row_sum_unchecked(g, x, alpha, beta)).collect()
}

/// Chain potential `Σ_{j∈Z_N} (R_j − R_{j+1})²` with cyclic indexing.
pub fn chain_potential<T: Real>(g: &GramMatrix<T>, alpha: T, beta: T) -> T {
    let r = row_sums(g, alpha, beta);
    let n = r.len();
    (0..n).map(|j| (r[j] - r[(j + 1) % n]).powi(2)).sum()
}

pub fn combined_potential<T: Real>(g: &GramMatrix<T>, p: &PotentialParams) -> T {
    let (a, b, d, e) = (T::lit(p.alpha), T::lit(p.beta), T::lit(p.delta), T::lit(p.eta));
    chain_potential(g, a, b) + diag_potential(g, d) + sum_potential(g, e)
}

/// `p`-th frame potential `Σ_{j,l} |G_{jl}|^{2p}`.
pub fn pth_potential<T: Real>(g: &GramMatrix<T>, p: T) -> Result<T> {
    if !(p >= T::one()) {
        return Err(FrameError::InvalidParameter(format!("p must be at least 1, got {p}")));
    }
    Ok(g.abs2().into_iter().flatten().map(|a| a.powf(p)).sum())
}

/// Coherence `μ(G) = max_{j≠l} |G_{jl}|`.
pub fn coherence<T: Real>(g: &GramMatrix<T>) -> T {
    let n = g.n();
    let mut m = T::zero();
    for j in 0..n {
        for l in 0..n {
            if j != l {
                m = m.max(g.entry(j, l).norm());
            }
        }
    }
    m
}

/// Smallest off-diagonal magnitude.
pub fn min_offdiag_magnitude<T: Real>(g: &GramMatrix<T>) -> T {
    let n = g.n();
    let mut m = T::infinity();
    for j in 0..n {
        for l in 0..n {
            if j != l {
                m = m.min(g.entry(j, l).norm());
            }
        }
    }
    m
}

/// Sandwich `e^{ημ²} ≤ Φ_od^η ≤ N(N−1)e^{ημ²}` rearranged into an interval for `μ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherenceBracket {
    pub eta: f64,
    pub log_potential: f64,
    pub mu_sq_lower: f64,
    pub mu_sq_upper: f64,
}

impl CoherenceBracket {
    pub fn width(&self) -> f64 {
        self.mu_sq_upper - self.mu_sq_lower
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherenceEstimate {
    /// `√((1/η_max) ln Φ_od^{η_max})`.
    pub estimate: f64,
    pub brackets: Vec<CoherenceBracket>,
}

/// Recovers the coherence from the off-diagonal potential along an
/// increasing `η` sequence. The exponents carry `|G_{jl}|²`, so the limit of
/// `(1/η) ln Φ_od^η` is `μ(G)²`; the estimate reported is its square root.
pub fn coherence_from_potential<T: Real>(g: &GramMatrix<T>, etas: &[f64]) -> Result<CoherenceEstimate> {
    if g.n() < 2 {
        return Err(FrameError::InvalidParameter("coherence needs N ≥ 2".into()));
    }
    if etas.is_empty() {
        return Err(FrameError::InvalidParameter("empty η sequence".into()));
    }
    for w in etas.windows(2) {
        if !(w[1] > w[0]) {
            return Err(FrameError::InvalidParameter("η sequence must be strictly increasing".into()));
        }
    }
    for &e in etas {
        positive("eta", e)?;
    }
    let pairs = (g.n() * (g.n() - 1)) as f64;
    let brackets: Vec<CoherenceBracket> = etas
        .iter()
        .map(|&eta| {
            let lp = log_offdiag_potential(g, T::lit(eta)).as_f64();
            CoherenceBracket { eta, log_potential: lp, mu_sq_lower: (lp - pairs.ln()) / eta, mu_sq_upper: lp / eta }
        })
        .collect();
    let last = brackets.last().expect("non-empty");
    Ok(CoherenceEstimate { estimate: last.mu_sq_upper.max(0.0).sqrt(), brackets })
}
