use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::constructors::random_parseval;
use crate::error::{FrameError, Result};
use crate::gram::{GramMatrix, ValidationResiduals};
use crate::potentials::{coherence, min_offdiag_magnitude, riemannian_grad_norm, PotentialParams};
use crate::scalar::{Field, Real};
use crate::tangent::retraction_increment;

use super::objective::Potential;

const STEP_GROWTH: f64 = 2.0;
const MAX_STEP: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentConfig {
    /// Parameters used when a potential is built by name.
    pub params: PotentialParams,
    pub max_iters: usize,
    /// Stop once the Riemannian gradient norm is at most this.
    pub grad_tol: f64,
    /// First trial step; later trials start from twice the last accepted step.
    pub initial_step: f64,
    pub armijo_c: f64,
    pub backtrack_factor: f64,
    pub min_step: f64,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self {
            params: PotentialParams::default(),
            max_iters: 5000,
            grad_tol: 1e-8,
            initial_step: 1.0,
            armijo_c: 1e-4,
            backtrack_factor: 0.5,
            min_step: 1e-14,
            seed: 0,
            tolerances: Tolerances::default(),
        }
    }
}

impl DescentConfig {
    pub fn check(&self) -> Result<()> {
        self.params.check()?;
        let bad = |what: &str| Err(FrameError::InvalidParameter(what.to_string()));
        if !(self.grad_tol >= 0.0) {
            return bad("grad_tol must be nonnegative");
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return bad("initial_step must be positive");
        }
        if !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return bad("armijo_c must lie in (0, 1)");
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return bad("backtrack_factor must lie in (0, 1)");
        }
        if !(self.min_step > 0.0 && self.min_step <= self.initial_step) {
            return bad("min_step must be positive and at most initial_step");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminalStatus {
    Converged,
    MaxIters,
    StepUnderflow,
}

/// One accepted iterate. `step` is the step that produced it (0 for the start).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub value: f64,
    pub grad_norm: f64,
    pub step: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescentTrace {
    pub potential: Potential,
    /// Values and gradients refer to `ln Φ` instead of `Φ`.
    pub log_domain: bool,
    /// The first value is evaluated directly; later ones add the accepted
    /// increments, so they are nonincreasing by construction.
    pub iterations: Vec<TraceRow>,
    pub terminal_status: TerminalStatus,
    /// Iterations at which an off-diagonal entry came within the zero
    /// tolerance while minimizing the combined potential.
    pub zero_entry_flags: Vec<usize>,
    /// Objective re-evaluated from scratch at the final iterate.
    pub final_value_direct: f64,
    pub final_residuals: ValidationResiduals,
}

impl DescentTrace {
    pub fn last(&self) -> &TraceRow {
        self.iterations.last().expect("trace has the starting row")
    }

    pub fn is_monotone(&self) -> bool {
        self.iterations.windows(2).all(|w| w[1].value <= w[0].value)
    }

    pub fn converged(&self) -> bool {
        self.terminal_status == TerminalStatus::Converged
    }
}

/// Riemannian gradient descent with Armijo backtracking along the
/// retraction `G ↦ e^{−sA} G e^{sA}`, `A = ∇Φ̂(I)`. A step `s` is accepted when
/// `Φ(new) ≤ Φ(old) − c·s·‖∇Φ̂(I)‖²`.
pub fn descend<T: Real>(
    g0: &GramMatrix<T>,
    potential: &Potential,
    cfg: &DescentConfig,
) -> Result<(GramMatrix<T>, DescentTrace)> {
    cfg.check()?;
    potential.check()?;
    let tol = &cfg.tolerances;
    let log = potential.uses_log_domain(tol);
    let watch_zeros = matches!(potential, Potential::Combined { .. });
    let c = T::lit(cfg.armijo_c);

    let mut g = g0.clone();
    let mut value = potential.value(&g, log);
    let mut tracked = value.as_f64();
    let mut grad = potential.gradient(&g, log, value);
    let mut rows = Vec::new();
    let mut flags = Vec::new();
    let mut trial = cfg.initial_step;
    let mut taken = 0.0;
    let mut status = TerminalStatus::MaxIters;

    for iter in 0..=cfg.max_iters {
        let gn = riemannian_grad_norm(&g, &grad)?.as_f64();
        rows.push(TraceRow { iter, value: tracked, grad_norm: gn, step: taken, mu: coherence(&g).as_f64() });
        if watch_zeros && g.n() > 1 && min_offdiag_magnitude(&g).as_f64() <= tol.zero_entry {
            flags.push(iter);
        }
        if !gn.is_finite() {
            return Err(FrameError::InvalidParameter(format!("non-finite gradient at iteration {iter}")));
        }
        if gn <= cfg.grad_tol {
            status = TerminalStatus::Converged;
            break;
        }
        if iter == cfg.max_iters {
            break;
        }
        let slope = grad.hs_norm() * grad.hs_norm();
        let mut accepted = None;
        let mut s = trial;
        while s >= cfg.min_step {
            let d = retraction_increment(&g, grad.direction(), T::lit(s));
            let inc = potential.increment(&g, &d, log, value);
            if inc <= -(c * T::lit(s) * slope) {
                accepted = Some((d, inc));
                break;
            }
            s *= cfg.backtrack_factor;
        }
        let Some((d, inc)) = accepted else {
            status = TerminalStatus::StepUnderflow;
            break;
        };
        g = GramMatrix::trusted(g.matrix() + &d, g.field(), g.k());
        value = potential.value(&g, log);
        tracked += inc.as_f64();
        grad = potential.gradient(&g, log, value);
        taken = s;
        trial = (s * STEP_GROWTH).min(MAX_STEP);
    }

    let g = GramMatrix::validate_at(g.herm().clone(), g.k(), tol.retraction)?;
    let trace = DescentTrace {
        potential: *potential,
        log_domain: log,
        iterations: rows,
        terminal_status: status,
        zero_entry_flags: flags,
        final_value_direct: potential.value(&g, log).as_f64(),
        final_residuals: g.residuals(),
    };
    Ok((g, trace))
}

/// Winner of [`multi_start`] together with every run's summary.
#[derive(Debug, Clone)]
pub struct MultiStartResult<T: Real> {
    pub gram: GramMatrix<T>,
    pub trace: DescentTrace,
    pub seed: u64,
    /// `(seed, final value, status)` for each run, in seed order.
    pub runs: Vec<(u64, f64, TerminalStatus)>,
}

/// Seed of restart `i` under master seed `seed`.
pub fn restart_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_add(i as u64)
}

/// Independent descents from `restarts` seeded random starts. The winner is
/// the smallest `(final value, seed)` pair, so it does not depend on thread
/// scheduling.
pub fn multi_start<T: Real>(
    n: usize,
    k: usize,
    field: Field,
    potential: &Potential,
    cfg: &DescentConfig,
    restarts: usize,
) -> Result<MultiStartResult<T>> {
    if restarts == 0 {
        return Err(FrameError::InvalidParameter("restarts must be at least 1".into()));
    }
    let results: Vec<(u64, GramMatrix<T>, DescentTrace)> = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let seed = restart_seed(cfg.seed, i);
            let g0 = random_parseval(n, k, field, seed)?;
            let (g, t) = descend(&g0, potential, cfg)?;
            Ok((seed, g, t))
        })
        .collect::<Result<_>>()?;
    let runs = results.iter().map(|(s, _, t)| (*s, t.final_value_direct, t.terminal_status)).collect();
    let best = results
        .into_iter()
        .min_by(|a, b| a.2.final_value_direct.total_cmp(&b.2.final_value_direct).then(a.0.cmp(&b.0)))
        .expect("at least one run");
    Ok(MultiStartResult { gram: best.1, trace: best.2, seed: best.0, runs })
}
