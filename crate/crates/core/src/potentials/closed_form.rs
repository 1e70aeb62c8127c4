//! Entrywise gradient formulas, evaluated literally.
//!
//! These are slower than the commutator kernel in [`super::gradient`] and
//! exist to cross-check it. Two conventions to keep in mind:
//!
//! * [`sum_gradient_entrywise`] is the gradient of `Φ_sum^η / η`; multiply by
//!   `η` to compare with [`super::grad_sum_potential`].
//! * [`chain_superdiagonal`] builds its `φ_α` helper from the exponential
//!   potential formula summed over `j ≠ x` (four trilinear terms per `j`).

use crate::gram::GramMatrix;
use crate::matrix::CMat;
use crate::scalar::{Real, C};

use super::{row_sums, welch_constant};

use num_traits::Zero;

fn kd<T: Real>(i: usize, j: usize) -> T {
    if i == j {
        T::one()
    } else {
        T::zero()
    }
}

/// `[∇(Φ_sum^η/η)]_{ab} = 2Σ_{j∉{a,b}} (e^{η|G_{aj}|²} − e^{η|G_{bj}|²})G_{aj}G_{jb}
/// + 2e^{η|G_{ab}|²}(G_{ab}G_{bb} − G_{aa}G_{ab})
/// + 2e^{η(C² − K²/N²)}(e^{ηG_{aa}²}G_{aa}G_{ab} − e^{ηG_{bb}²}G_{ab}G_{bb})`.
pub fn sum_gradient_entrywise<T: Real>(g: &GramMatrix<T>, eta: T) -> CMat<T> {
    let n = g.n();
    let gm = g.matrix();
    let nf = T::lit(n as f64);
    let kf = T::lit(g.k() as f64);
    let c = welch_constant::<T>(n, g.k());
    let corr = (eta * (c * c - kf * kf / (nf * nf))).exp();
    let two = T::lit(2.0);
    let e = |i: usize, j: usize| (eta * gm[(i, j)].norm_sqr()).exp();
    CMat::from_fn(n, n, |a, b| {
        let mut s = C::<T>::zero();
        for j in 0..n {
            if j == a || j == b {
                continue;
            }
            s = s + gm[(a, j)] * gm[(j, b)] * (two * (e(a, j) - e(b, j)));
        }
        s = s + (gm[(a, b)] * gm[(b, b)] - gm[(a, a)] * gm[(a, b)]) * (two * e(a, b));
        let daa = gm[(a, a)].re;
        let dbb = gm[(b, b)].re;
        s + (gm[(a, a)] * gm[(a, b)] * (eta * daa * daa).exp() - gm[(a, b)] * gm[(b, b)] * (eta * dbb * dbb).exp())
            * (two * corr)
    })
}

/// `[∇Φ̂_diag^δ]_{ab} = 2G_{ab}(G_{aa}e^{δG_{aa}²} − G_{bb}e^{δG_{bb}²})`.
pub fn diag_gradient_entrywise<T: Real>(g: &GramMatrix<T>, delta: T) -> CMat<T> {
    let n = g.n();
    let gm = g.matrix();
    let d = g.diagonal();
    let two = T::lit(2.0);
    CMat::from_fn(n, n, |a, b| {
        gm[(a, b)] * (two * (d[a] * (delta * d[a] * d[a]).exp() - d[b] * (delta * d[b] * d[b]).exp()))
    })
}

/// `α`-part of `[∇R̂_x^{α,β}]_{ab}`:
/// `Σ_{j≠x} e^{α|G_{xj}|²}(G_{jx}G_{xb}δ_{ja} − G_{aj}G_{jx}δ_{bx} + G_{xj}G_{jb}δ_{ax} − G_{ax}G_{xj}δ_{bj})`.
pub fn row_sum_alpha_entry<T: Real>(g: &GramMatrix<T>, a: usize, b: usize, x: usize, alpha: T) -> C<T> {
    let n = g.n();
    let gm = g.matrix();
    let mut s = C::<T>::zero();
    for j in 0..n {
        if j == x {
            continue;
        }
        let w = (alpha * gm[(x, j)].norm_sqr()).exp();
        let t = gm[(j, x)] * gm[(x, b)] * kd::<T>(j, a) - gm[(a, j)] * gm[(j, x)] * kd::<T>(b, x)
            + gm[(x, j)] * gm[(j, b)] * kd::<T>(a, x)
            - gm[(a, x)] * gm[(x, j)] * kd::<T>(b, j);
        s = s + t * w;
    }
    s
}

/// `φ_α(a, b, x, G)`: difference of the `α`-parts of `∇R̂_x` and `∇R̂_{x+1}`.
pub fn phi_alpha<T: Real>(g: &GramMatrix<T>, a: usize, b: usize, x: usize, alpha: T) -> C<T> {
    let n = g.n();
    row_sum_alpha_entry(g, a, b, x % n, alpha) - row_sum_alpha_entry(g, a, b, (x + 1) % n, alpha)
}

/// Superdiagonal entry `(a, a+1)` of `∇Φ̂_ch^{α,β}` in the form that isolates
/// the `β` terms:
///
/// ```text
/// 2 Σ_j (R_j − R_{j+1}) φ_α(a, b, j, G)
///   + 4β{ −G_{aa}G_{ab}e^{G_{aa}²}(R_{a−1} − R_a)
///         + (G_{aa}G_{ab}e^{G_{aa}²} + G_{ab}G_{bb}e^{G_{bb}²})(R_a − R_b)
///         − G_{ab}G_{bb}e^{G_{bb}²}(R_b − R_{b+1}) }
/// ```
///
/// with all indices cyclic.
pub fn chain_superdiagonal<T: Real>(g: &GramMatrix<T>, a: usize, alpha: T, beta: T) -> C<T> {
    let n = g.n();
    let gm = g.matrix();
    let r = row_sums(g, alpha, beta);
    let b = (a + 1) % n;
    let diff = |j: usize| r[j % n] - r[(j + 1) % n];
    let mut s = C::<T>::zero();
    for j in 0..n {
        s = s + phi_alpha(g, a, b, j, alpha) * (T::lit(2.0) * diff(j));
    }
    let daa = gm[(a, a)].re;
    let dbb = gm[(b, b)].re;
    let ta = gm[(a, a)] * gm[(a, b)] * (daa * daa).exp();
    let tb = gm[(a, b)] * gm[(b, b)] * (dbb * dbb).exp();
    let beta_part = -(ta * diff(a + n - 1)) + (ta + tb) * diff(a) - tb * diff(b);
    s + beta_part * (T::lit(4.0) * beta)
}
