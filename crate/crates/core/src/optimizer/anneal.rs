use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructors::random_parseval;
use crate::error::{FrameError, Result};
use crate::gram::GramMatrix;
use crate::potentials::coherence;
use crate::scalar::{Field, Real};
use crate::structures::{structure_report, StructureReport};

use super::descent::{descend, restart_seed, DescentConfig, TerminalStatus};
use super::objective::Potential;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub eta_sequence: Vec<f64>,
    /// Fresh random starts per stage, besides the warm start.
    pub restarts_per_eta: usize,
    /// Start each stage from the previous stage's best Gramian.
    pub warm_start: bool,
}

impl AnnealSchedule {
    /// `η = base^0, base^1, …` with `stages` entries.
    pub fn geometric(base: f64, stages: usize, restarts_per_eta: usize) -> Self {
        Self { eta_sequence: (0..stages).map(|i| base.powi(i as i32)).collect(), restarts_per_eta, warm_start: true }
    }

    pub fn check(&self) -> Result<()> {
        if self.eta_sequence.is_empty() {
            return Err(FrameError::InvalidParameter("empty η schedule".into()));
        }
        if self.eta_sequence.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(FrameError::InvalidParameter("η values must be positive and finite".into()));
        }
        if self.eta_sequence.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(FrameError::InvalidParameter("η schedule must be strictly increasing".into()));
        }
        if !self.warm_start && self.restarts_per_eta == 0 {
            return Err(FrameError::InvalidParameter("no starts per stage: enable warm_start or add restarts".into()));
        }
        Ok(())
    }
}

impl Default for AnnealSchedule {
    /// `η ∈ {1, 4, 16, …, 4096}`, four fresh starts per stage, warm started.
    fn default() -> Self {
        Self::geometric(4.0, 7, 4)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageResult {
    pub eta: f64,
    /// Objective of the stage winner (`ln Φ` in log-domain mode).
    pub value: f64,
    pub log_domain: bool,
    pub mu: f64,
    pub status: TerminalStatus,
    pub iterations: usize,
    /// `"warm"` or `"seed:<n>"`.
    pub origin: String,
}

#[derive(Debug, Clone)]
pub struct AnnealResult<T: Real> {
    /// Lowest-coherence stage winner.
    pub best: GramMatrix<T>,
    pub best_stage: usize,
    pub stages: Vec<StageResult>,
    pub stage_grams: Vec<GramMatrix<T>>,
    pub report: StructureReport,
}

/// Follows minimizers of `Φ^{η_m}` along the schedule. Each stage descends
/// from the previous winner (if warm-started) and from fresh seeded starts,
/// keeping the lowest objective value; the final answer is the stage winner
/// with the smallest coherence. `base` supplies the potential family (sum or
/// combined); its `η` is overwritten per stage.
pub fn anneal_grassmannian<T: Real>(
    n: usize,
    k: usize,
    field: Field,
    base: &Potential,
    schedule: &AnnealSchedule,
    cfg: &DescentConfig,
) -> Result<AnnealResult<T>> {
    schedule.check()?;
    cfg.check()?;
    if base.eta().is_none() {
        return Err(FrameError::InvalidParameter(format!("annealing needs a potential with η, got {}", base.name())));
    }
    if k == 0 || k > n {
        return Err(FrameError::BadRank { n, k });
    }
    let mut stages = Vec::new();
    let mut grams: Vec<GramMatrix<T>> = Vec::new();
    for (m, &eta) in schedule.eta_sequence.iter().enumerate() {
        let pot = base.with_eta(eta);
        let mut starts: Vec<(String, GramMatrix<T>)> = Vec::new();
        if schedule.warm_start {
            if let Some(prev) = grams.last() {
                starts.push(("warm".to_string(), prev.clone()));
            }
        }
        let fresh = if starts.is_empty() { schedule.restarts_per_eta.max(1) } else { schedule.restarts_per_eta };
        for r in 0..fresh {
            let seed = restart_seed(cfg.seed, m * 1000 + r);
            starts.push((format!("seed:{seed}"), random_parseval(n, k, field, seed)?));
        }
        let runs: Vec<_> = starts
            .into_par_iter()
            .enumerate()
            .map(|(i, (origin, g0))| descend(&g0, &pot, cfg).map(|(g, t)| (i, origin, g, t)))
            .collect::<Result<_>>()?;
        let (_, origin, g, trace) = runs
            .into_iter()
            .min_by(|a, b| a.3.final_value_direct.total_cmp(&b.3.final_value_direct).then(a.0.cmp(&b.0)))
            .expect("every stage has a start");
        stages.push(StageResult {
            eta,
            value: trace.final_value_direct,
            log_domain: trace.log_domain,
            mu: coherence(&g).as_f64(),
            status: trace.terminal_status,
            iterations: trace.last().iter,
            origin,
        });
        grams.push(g);
    }
    let best_stage = (0..stages.len())
        .min_by(|&a, &b| stages[a].mu.total_cmp(&stages[b].mu).then(a.cmp(&b)))
        .expect("non-empty schedule");
    let best = grams[best_stage].clone();
    let eta = schedule.eta_sequence[best_stage];
    let report = structure_report(&best, eta, &cfg.tolerances)?;
    Ok(AnnealResult { best, best_stage, stages, stage_grams: grams, report })
}
