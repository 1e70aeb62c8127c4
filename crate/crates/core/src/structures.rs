//! Structure detectors and family-wise criticality evidence.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{FrameError, Result};
use crate::gram::GramMatrix;
use crate::potentials::{
    self, grad_combined, log_sum_exp, log_sum_potential, potential_bounds, pth_potential, riemannian_grad_norm,
    welch_constant, BoundVariant, PotentialParams,
};
use crate::scalar::Real;

/// Outcome of a tolerance-based detector together with the measured slack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Detection {
    pub holds: bool,
    pub deviation: f64,
}

impl Detection {
    fn at(deviation: f64, tol: f64) -> Self {
        Self { holds: deviation <= tol, deviation }
    }
}

/// `max_j |G_{jj} − K/N|`.
pub fn detect_equal_norm<T: Real>(g: &GramMatrix<T>, tol: f64) -> Detection {
    let target = g.k() as f64 / g.n() as f64;
    let dev = g.diagonal().into_iter().map(|d| (d.as_f64() - target).abs()).fold(0.0, f64::max);
    Detection::at(dev, tol)
}

/// Equal norm and `max_{j≠l} ||G_{jl}| − C_{N,K}| ≤ tol`. The reported
/// deviation is the larger of the two slacks.
pub fn detect_equiangular<T: Real>(g: &GramMatrix<T>, tol: f64) -> Result<Detection> {
    let n = g.n();
    if n < 2 {
        return Err(FrameError::InvalidParameter("equiangularity needs N ≥ 2".into()));
    }
    let c = welch_constant::<f64>(n, g.k());
    let mut dev = detect_equal_norm(g, tol).deviation;
    for j in 0..n {
        for l in 0..n {
            if j != l {
                dev = dev.max((g.entry(j, l).norm().as_f64() - c).abs());
            }
        }
    }
    Ok(Detection::at(dev, tol))
}

/// Column magnitudes, each sorted in descending order.
pub fn sorted_column_magnitudes<T: Real>(g: &GramMatrix<T>) -> Vec<Vec<f64>> {
    let n = g.n();
    (0..n)
        .map(|l| {
            let mut col: Vec<f64> = (0..n).map(|j| g.entry(j, l).norm().as_f64()).collect();
            col.sort_by(|a, b| b.total_cmp(a));
            col
        })
        .collect()
}

/// Every column's sorted magnitude vector matches the first column's within
/// `tol`; sorting exhibits the permutation demanded by the definition.
pub fn detect_equidistributed<T: Real>(g: &GramMatrix<T>, tol: f64) -> Detection {
    let cols = sorted_column_magnitudes(g);
    let mismatch =
        cols.iter().skip(1).flat_map(|c| c.iter().zip(&cols[0]).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max);
    Detection::at(mismatch, tol)
}

/// Exponential row sums `A_x^α = Σ_j e^{α|G_{xj}|²}`.
pub fn exponential_row_sums<T: Real>(g: &GramMatrix<T>, alpha: f64) -> Vec<f64> {
    g.abs2().into_iter().map(|row| row.into_iter().map(|a| (alpha * a.as_f64()).exp()).sum()).collect()
}

/// `max_x A_x^α − min_x A_x^α ≤ tol`.
pub fn detect_alpha_equipartition<T: Real>(g: &GramMatrix<T>, alpha: f64, tol: f64) -> Result<Detection> {
    potentials::positive("alpha", alpha)?;
    let a = exponential_row_sums(g, alpha);
    let hi = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = a.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Detection::at(hi - lo, tol))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub holds: bool,
    /// Connected components of the graph with edges `|G_{jl}| > tol_zero`,
    /// each sorted, ordered by smallest element.
    pub partition: Vec<Vec<usize>>,
}

pub fn detect_orthodecomposable<T: Real>(g: &GramMatrix<T>, tol_zero: f64) -> Decomposition {
    let n = g.n();
    let mut label = vec![usize::MAX; n];
    let mut partition = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let id = partition.len();
        let mut comp = vec![start];
        label[start] = id;
        let mut head = 0;
        while head < comp.len() {
            let j = comp[head];
            head += 1;
            for l in 0..n {
                if label[l] == usize::MAX && g.entry(j, l).norm().as_f64() > tol_zero {
                    label[l] = id;
                    comp.push(l);
                }
            }
        }
        comp.sort_unstable();
        partition.push(comp);
    }
    Decomposition { holds: partition.len() > 1, partition }
}

/// `Φ_sum^η(G)` against the no-zero-entries threshold. Both sides are
/// compared in the log domain; `value`/`threshold` may overflow to infinity
/// for very large `η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoZeroCheck {
    pub eta: f64,
    pub below_threshold: bool,
    pub value: f64,
    pub threshold: f64,
    pub log_value: f64,
    pub log_threshold: f64,
    pub min_offdiag: f64,
    /// `below_threshold ⇒ min_offdiag > 0`.
    pub implication_holds: bool,
}

pub fn check_no_zero_threshold<T: Real>(g: &GramMatrix<T>, eta: f64) -> Result<NoZeroCheck> {
    potentials::positive("eta", eta)?;
    let (n, k) = (g.n() as f64, g.k() as f64);
    let m = n * n - 2.0;
    let expo = eta * (k / m - k * k / (n * m) + k * (n - k) / (n * (n - 1.0) * m));
    let log_threshold = log_sum_exp([2.0f64.ln(), m.ln() + expo]);
    let log_value = log_sum_potential(g, T::lit(eta)).as_f64();
    let below = log_value < log_threshold;
    let min_offdiag = potentials::min_offdiag_magnitude(g).as_f64();
    Ok(NoZeroCheck {
        eta,
        below_threshold: below,
        value: log_value.exp(),
        threshold: log_threshold.exp(),
        log_value,
        log_threshold,
        min_offdiag,
        implication_holds: !below || min_offdiag > 0.0,
    })
}

/// Sampled `(α, β, δ)` values for family-wise checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub delta: Vec<f64>,
}

impl ParamGrid {
    /// `points` equally spaced values on `[lo, hi]` for every parameter.
    pub fn uniform(lo: f64, hi: f64, points: usize) -> Self {
        let axis: Vec<f64> = match points {
            0 => Vec::new(),
            1 => vec![lo],
            p => (0..p).map(|i| lo + (hi - lo) * i as f64 / (p - 1) as f64).collect(),
        };
        Self { alpha: axis.clone(), beta: axis.clone(), delta: axis }
    }

    pub fn triples(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.alpha.len() * self.beta.len() * self.delta.len());
        for &a in &self.alpha {
            for &b in &self.beta {
                for &d in &self.delta {
                    out.push((a, b, d));
                }
            }
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        for (name, axis) in [("alpha", &self.alpha), ("beta", &self.beta), ("delta", &self.delta)] {
            if axis.is_empty() {
                return Err(FrameError::InvalidParameter(format!("{name} grid is empty")));
            }
            for &v in axis {
                potentials::positive(name, v)?;
            }
        }
        Ok(())
    }
}

impl Default for ParamGrid {
    fn default() -> Self {
        Self::uniform(0.5, 2.0, 5)
    }
}

/// Grid evidence for a family-wise critical point. A finite grid can only
/// support, never prove, vanishing of the gradient on open parameter intervals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalityReport {
    pub eta: f64,
    pub grid: Vec<(f64, f64, f64)>,
    pub max_riemannian_grad_norm: f64,
    /// Grid point attaining the maximum.
    pub worst: (f64, f64, f64),
    pub tolerance: f64,
    pub is_family_wise: bool,
    pub kind: &'static str,
}

pub fn family_wise_criticality<T: Real>(
    g: &GramMatrix<T>,
    eta: f64,
    grid: &ParamGrid,
    tol_critical: f64,
) -> Result<CriticalityReport> {
    potentials::positive("eta", eta)?;
    grid.check()?;
    let triples = grid.triples();
    let norms: Vec<f64> = triples
        .par_iter()
        .map(|&(alpha, beta, delta)| {
            let p = PotentialParams { alpha, beta, delta, eta };
            riemannian_grad_norm(g, &grad_combined(g, &p)).map(|v| v.as_f64())
        })
        .collect::<Result<_>>()?;
    // sequential reduction keeps the argmax independent of scheduling
    let (mut best, mut worst) = (f64::NEG_INFINITY, triples[0]);
    for (v, t) in norms.iter().zip(&triples) {
        if *v > best || v.is_nan() {
            best = *v;
            worst = *t;
        }
    }
    Ok(CriticalityReport {
        eta,
        grid: triples,
        max_riemannian_grad_norm: best,
        worst,
        tolerance: tol_critical,
        is_family_wise: best <= tol_critical,
        kind: "evidence",
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub n: usize,
    pub k: usize,
    pub field: crate::scalar::Field,
    pub tolerance: f64,
    pub equal_norm: Detection,
    pub equiangular: Detection,
    pub equidistributed: Detection,
    pub orthodecomposable: Decomposition,
    pub coherence: f64,
    pub has_zero_entry: bool,
    pub min_offdiag_magnitude: f64,
    pub no_zero_check: NoZeroCheck,
    /// Slack of each named inequality at `G` (zero when saturated).
    pub bound_gaps: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullReport {
    pub structure: StructureReport,
    pub criticality: CriticalityReport,
}

/// Detector flags are conjoined down the class inclusions
/// equiangular ⊂ equidistributed ⊂ equal-norm, so the reported chain is
/// consistent at a single tolerance; the raw deviations are kept.
pub fn structure_report<T: Real>(g: &GramMatrix<T>, eta: f64, tol: &Tolerances) -> Result<StructureReport> {
    let n = g.n();
    let k = g.k();
    let t = tol.detector;
    let equal_norm = detect_equal_norm(g, t);
    let mut equidistributed = detect_equidistributed(g, t);
    equidistributed.holds &= equal_norm.holds;
    let mut equiangular =
        if n >= 2 { detect_equiangular(g, t)? } else { Detection { holds: false, deviation: f64::NAN } };
    equiangular.holds &= equidistributed.holds;

    let coherence = potentials::coherence(g).as_f64();
    let min_offdiag = if n >= 2 { potentials::min_offdiag_magnitude(g).as_f64() } else { f64::NAN };
    let has_zero_entry = (0..n).any(|j| (0..n).any(|l| g.entry(j, l).norm().as_f64() <= tol.zero_entry));

    let mut gaps = BTreeMap::new();
    let bf: f64 = potential_bounds(n, k, BoundVariant::BenedettoFickus)?;
    gaps.insert("benedetto_fickus".to_string(), pth_potential(g, T::one())?.as_f64() - bf);
    let diag_energy: f64 = g.diagonal().into_iter().map(|d| d.as_f64() * d.as_f64()).sum();
    gaps.insert("diagonal".to_string(), diag_energy - potential_bounds::<f64>(n, k, BoundVariant::Diagonal)?);
    if n >= 2 {
        let p2 = pth_potential(g, T::lit(2.0))?.as_f64();
        gaps.insert("elwood".to_string(), p2 - potential_bounds::<f64>(n, k, BoundVariant::Elwood)?);
        gaps.insert("welch".to_string(), coherence - welch_constant::<f64>(n, k));
    }
    let log_sum = log_sum_potential(g, T::lit(eta)).as_f64();
    let log_bound = potential_bounds::<f64>(n, k, BoundVariant::SumPotential(eta))?.ln();
    // relative slack Φ/bound − 1, stable for large η
    gaps.insert("sum_potential".to_string(), (log_sum - log_bound).exp_m1());

    Ok(StructureReport {
        n,
        k,
        field: g.field(),
        tolerance: t,
        equal_norm,
        equiangular,
        equidistributed,
        orthodecomposable: detect_orthodecomposable(g, tol.zero_entry.max(t)),
        coherence,
        has_zero_entry,
        min_offdiag_magnitude: min_offdiag,
        no_zero_check: check_no_zero_threshold(g, eta)?,
        bound_gaps: gaps,
    })
}

pub fn full_report<T: Real>(
    g: &GramMatrix<T>,
    p: &PotentialParams,
    grid: &ParamGrid,
    tol: &Tolerances,
) -> Result<FullReport> {
    p.check()?;
    Ok(FullReport {
        structure: structure_report(g, p.eta, tol)?,
        criticality: family_wise_criticality(g, p.eta, grid, tol.critical)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::CMat;
    use crate::scalar::Field;

    fn diag10() -> GramMatrix<f64> {
        let m = CMat::from_real_fn(2, 2, |i, j| if i == 0 && j == 0 { 1.0 } else { 0.0 });
        GramMatrix::from_matrix(m, Field::Real, 1, &Tolerances::default()).unwrap()
    }

    #[test]
    fn diag10_detectors() {
        let g = diag10();
        let en = detect_equal_norm(&g, 1e-8);
        assert!(!en.holds);
        assert!((en.deviation - 0.5).abs() < 1e-15);
        let ep = detect_alpha_equipartition(&g, 1.0, 1e-8).unwrap();
        assert!((ep.deviation - (std::f64::consts::E - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn identity_is_fully_decomposed() {
        let g = GramMatrix::<f64>::identity(4, Field::Real);
        let d = detect_orthodecomposable(&g, 1e-12);
        assert!(d.holds);
        assert_eq!(d.partition, vec![vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn default_grid() {
        let g = ParamGrid::default();
        assert_eq!(g.alpha, vec![0.5, 0.875, 1.25, 1.625, 2.0]);
        assert_eq!(g.triples().len(), 125);
        assert!(ParamGrid { alpha: vec![], beta: vec![1.0], delta: vec![1.0] }.check().is_err());
    }
}
