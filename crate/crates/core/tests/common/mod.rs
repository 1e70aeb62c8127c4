//! Oracles shared by the integration tests. They avoid the library's own
//! exponential and detectors so that agreement means something.

#![allow(dead_code)]

use framescape::matrix::{cx, CMat};
use framescape::{Field, Gram, GramMatrix, TangentDirection, Tolerances};
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Plain Taylor series with scaling and squaring.
pub fn taylor_expm(a: &CMat<f64>) -> CMat<f64> {
    let n = a.rows();
    let norm = a.hs_norm();
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let x = a.scale(0.5f64.powi(s));
    let mut term = CMat::identity(n);
    let mut sum = CMat::identity(n);
    for j in 1..=30 {
        term = term.matmul(&x).scale(1.0 / j as f64);
        sum = &sum + &term;
    }
    for _ in 0..s {
        sum = sum.matmul(&sum);
    }
    sum
}

/// `e^{tA} G e^{−tA}`.
pub fn conjugate(g: &Gram, a: &CMat<f64>, t: f64) -> Gram {
    let u = taylor_expm(&a.scale(t));
    let m = u.matmul(g.matrix()).matmul(&u.adjoint()).hermitian_part();
    let tol = Tolerances { manifold: 1e-8, ..Default::default() };
    GramMatrix::from_matrix(m, g.field(), g.k(), &tol).expect("conjugation stays on the manifold")
}

/// Central difference of `t ↦ f(e^{tA} G e^{−tA})` at 0.
pub fn central_difference(g: &Gram, a: &CMat<f64>, h: f64, f: impl Fn(&Gram) -> f64) -> f64 {
    (f(&conjugate(g, a, h)) - f(&conjugate(g, a, -h))) / (2.0 * h)
}

pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-12)
}

pub fn gaussian(r: &mut impl Rng) -> f64 {
    r.sample(StandardNormal)
}

pub fn random_anti_hermitian(n: usize, field: Field, r: &mut impl Rng) -> TangentDirection<f64> {
    let m = CMat::from_fn(n, n, |_, _| {
        let im = if field.is_real() { 0.0 } else { gaussian(r) };
        cx(gaussian(r), im)
    });
    TangentDirection::new(m.anti_hermitian_part(), field)
}

pub fn random_hermitian(n: usize, field: Field, r: &mut impl Rng) -> CMat<f64> {
    let m = CMat::from_fn(n, n, |_, _| {
        let im = if field.is_real() { 0.0 } else { gaussian(r) };
        cx(gaussian(r), im)
    });
    m.hermitian_part()
}

/// Equidistribution by exhaustive search: for every column `l` some
/// permutation `π` must satisfy `|G_{j,l}| = |G_{π(j),0}|` for all `j`.
pub fn equidistributed_by_search(g: &Gram, tol: f64) -> bool {
    let n = g.n();
    let mag = |j: usize, l: usize| g.entry(j, l).norm();
    (1..n).all(|l| (0..n).permutations(n).any(|p| (0..n).all(|j| (mag(j, l) - mag(p[j], 0)).abs() <= tol)))
}

pub fn max_abs_diff(a: &CMat<f64>, b: &CMat<f64>) -> f64 {
    (a - b).max_abs()
}

/// Equidistribution by comparing each column's sorted magnitudes with the
/// first column's. Sorting gives the optimal matching in the max norm, so
/// this agrees with [`equidistributed_by_search`] but scales to large `N`.
pub fn equidistributed_by_sorting(g: &Gram, tol: f64) -> bool {
    let n = g.n();
    let column = |l: usize| {
        let mut c: Vec<f64> = (0..n).map(|j| g.entry(j, l).norm()).collect();
        c.sort_by(f64::total_cmp);
        c
    };
    let first = column(0);
    (1..n).all(|l| column(l).iter().zip(&first).all(|(a, b)| (a - b).abs() <= tol))
}

/// Largest off-diagonal magnitude.
pub fn max_offdiag(g: &Gram) -> f64 {
    let n = g.n();
    (0..n)
        .flat_map(|j| (0..n).filter(move |&l| l != j).map(move |l| (j, l)))
        .map(|(j, l)| g.entry(j, l).norm())
        .fold(0.0, f64::max)
}
