//! Objective functions for descent, with cancellation-free increments.
//!
//! Sufficient decrease is tested on `Φ(G + D) − Φ(G)` for the exact
//! retraction increment `D`. Every potential depends on `G` only through
//! `a_{xy} = |G_{xy}|²`, and `Δa = 2Re(conj(G)∘D) + |D|²` is accurate
//! relative to `D`, so the increments below stay meaningful long after the
//! values themselves stop resolving the decrease.
//!
//! In log-domain mode the objective is `ln Φ` and its gradient `∇Φ / Φ`,
//! evaluated without forming `Φ`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{FrameError, Result};
use crate::gram::GramMatrix;
use crate::matrix::CMat;
use crate::potentials::gradient::{chain_weights, diag_weights, sum_weights, weighted_gradient};
use crate::potentials::{
    self, chain_potential, combined_potential, diag_potential, grad_chain_potential, grad_combined,
    grad_diag_potential, grad_pth_potential, grad_sum_potential, pth_potential, sum_potential, GradientAtIdentity,
    PotentialParams,
};
use crate::scalar::Real;

/// A potential that [`super::descend`] can minimize.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Potential {
    Sum {
        eta: f64,
    },
    Diag {
        delta: f64,
    },
    Chain {
        alpha: f64,
        beta: f64,
    },
    Combined {
        alpha: f64,
        beta: f64,
        delta: f64,
        eta: f64,
    },
    #[serde(rename = "pframe")]
    PFrame {
        p: u32,
    },
}

impl Potential {
    pub fn combined(p: &PotentialParams) -> Self {
        Potential::Combined { alpha: p.alpha, beta: p.beta, delta: p.delta, eta: p.eta }
    }

    /// Builds a potential from its name, drawing parameters from `params`.
    pub fn from_name(name: &str, params: &PotentialParams, p: u32) -> Result<Self> {
        let pot = match name {
            "sum" => Potential::Sum { eta: params.eta },
            "diag" => Potential::Diag { delta: params.delta },
            "chain" => Potential::Chain { alpha: params.alpha, beta: params.beta },
            "combined" => Potential::combined(params),
            "pframe" | "p-frame" => Potential::PFrame { p },
            other => return Err(FrameError::UnknownVariant(other.to_string())),
        };
        pot.check()?;
        Ok(pot)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Potential::Sum { .. } => "sum",
            Potential::Diag { .. } => "diag",
            Potential::Chain { .. } => "chain",
            Potential::Combined { .. } => "combined",
            Potential::PFrame { .. } => "pframe",
        }
    }

    pub fn check(&self) -> Result<()> {
        match *self {
            Potential::Sum { eta } => potentials::positive("eta", eta),
            Potential::Diag { delta } => potentials::positive("delta", delta),
            Potential::Chain { alpha, beta } => {
                potentials::positive("alpha", alpha)?;
                potentials::positive("beta", beta)
            }
            Potential::Combined { alpha, beta, delta, eta } => PotentialParams { alpha, beta, delta, eta }.check(),
            Potential::PFrame { p } if p == 1 || p == 2 => Ok(()),
            Potential::PFrame { p } => {
                Err(FrameError::InvalidParameter(format!("descent on Φ^(p) needs p ∈ {{1,2}}, got {p}")))
            }
        }
    }

    pub fn eta(&self) -> Option<f64> {
        match *self {
            Potential::Sum { eta } | Potential::Combined { eta, .. } => Some(eta),
            _ => None,
        }
    }

    /// Same potential with `η` replaced (no-op for potentials without `η`).
    pub fn with_eta(self, new_eta: f64) -> Self {
        match self {
            Potential::Sum { .. } => Potential::Sum { eta: new_eta },
            Potential::Combined { alpha, beta, delta, .. } => Potential::Combined { alpha, beta, delta, eta: new_eta },
            other => other,
        }
    }

    /// Whether descent runs on `ln Φ` rather than `Φ`.
    pub fn uses_log_domain(&self, tol: &Tolerances) -> bool {
        self.eta().is_some_and(|e| e > tol.log_domain_eta)
    }

    /// `Φ(G)`, or `ln Φ(G)` when `log` is set.
    pub fn value<T: Real>(&self, g: &GramMatrix<T>, log: bool) -> T {
        match (*self, log) {
            (Potential::Sum { eta }, false) => sum_potential(g, T::lit(eta)),
            (Potential::Sum { eta }, true) => potentials::log_sum_potential(g, T::lit(eta)),
            (Potential::Diag { delta }, false) => diag_potential(g, T::lit(delta)),
            (Potential::Chain { alpha, beta }, false) => chain_potential(g, T::lit(alpha), T::lit(beta)),
            (Potential::Combined { alpha, beta, delta, eta }, false) => {
                combined_potential(g, &PotentialParams { alpha, beta, delta, eta })
            }
            (Potential::Combined { alpha, beta, delta, eta }, true) => {
                let ls = potentials::log_sum_potential(g, T::lit(eta));
                let rest = chain_potential(g, T::lit(alpha), T::lit(beta)) + diag_potential(g, T::lit(delta));
                ls + (rest * (-ls).exp()).ln_1p()
            }
            (Potential::PFrame { p }, false) => pth_potential(g, T::lit(p as f64)).expect("p checked"),
            (other, true) => other.value(g, false).ln(),
        }
    }

    /// Lifted gradient of the objective; `value` must be the matching output
    /// of [`Potential::value`] (it is only read in log-domain mode).
    pub fn gradient<T: Real>(&self, g: &GramMatrix<T>, log: bool, value: T) -> GradientAtIdentity<T> {
        match (*self, log) {
            (Potential::Sum { eta }, false) => grad_sum_potential(g, T::lit(eta)),
            (Potential::Sum { eta }, true) => weighted_gradient(g, &sum_weights(g, T::lit(eta), value)),
            (Potential::Diag { delta }, false) => grad_diag_potential(g, T::lit(delta)),
            (Potential::Chain { alpha, beta }, false) => grad_chain_potential(g, T::lit(alpha), T::lit(beta)),
            (Potential::Combined { alpha, beta, delta, eta }, false) => {
                grad_combined(g, &PotentialParams { alpha, beta, delta, eta })
            }
            (Potential::Combined { alpha, beta, delta, eta }, true) => {
                let inv = (-value).exp();
                let mut w = chain_weights(g, T::lit(alpha), T::lit(beta));
                let wd = diag_weights(g, T::lit(delta));
                let ws = sum_weights(g, T::lit(eta), value);
                for (x, row) in w.iter_mut().enumerate() {
                    for (y, v) in row.iter_mut().enumerate() {
                        *v = (*v + wd[x][y]) * inv + ws[x][y];
                    }
                }
                weighted_gradient(g, &w)
            }
            (Potential::PFrame { p }, false) => grad_pth_potential(g, p).expect("p checked"),
            (other, true) => other.gradient(g, false, value).scale((-value).exp()),
        }
    }

    /// `Φ(G + D) − Φ(G)` (or the increment of `ln Φ`), where `value` is the
    /// objective at `G`.
    pub fn increment<T: Real>(&self, g: &GramMatrix<T>, d: &CMat<T>, log: bool, value: T) -> T {
        let a = g.abs2();
        let da = abs2_increment(g.matrix(), d);
        match (*self, log) {
            (Potential::Sum { eta }, false) => sum_increment(g, &da, T::lit(eta), T::zero()),
            (Potential::Sum { eta }, true) => sum_increment(g, &da, T::lit(eta), value).ln_1p(),
            (Potential::Diag { delta }, false) => diag_increment(&a, &da, T::lit(delta)),
            (Potential::Chain { alpha, beta }, false) => chain_increment(&a, &da, T::lit(alpha), T::lit(beta)),
            (Potential::Combined { alpha, beta, delta, eta }, false) => {
                chain_increment(&a, &da, T::lit(alpha), T::lit(beta))
                    + diag_increment(&a, &da, T::lit(delta))
                    + sum_increment(g, &da, T::lit(eta), T::zero())
            }
            (Potential::Combined { alpha, beta, delta, eta }, true) => {
                let rest =
                    chain_increment(&a, &da, T::lit(alpha), T::lit(beta)) + diag_increment(&a, &da, T::lit(delta));
                (rest * (-value).exp() + sum_increment(g, &da, T::lit(eta), value)).ln_1p()
            }
            (Potential::PFrame { p }, false) => {
                let mut s = T::zero();
                for (ra, rd) in a.iter().zip(&da) {
                    for (&x, &dx) in ra.iter().zip(rd) {
                        s = s + if p == 1 { dx } else { dx * (x + x + dx) };
                    }
                }
                s
            }
            (other, true) => {
                let inc = other.increment(g, d, false, value.exp());
                (inc * (-value).exp()).ln_1p()
            }
        }
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Potential::Sum { eta } => write!(f, "sum(eta={eta})"),
            Potential::Diag { delta } => write!(f, "diag(delta={delta})"),
            Potential::Chain { alpha, beta } => write!(f, "chain(alpha={alpha},beta={beta})"),
            Potential::Combined { alpha, beta, delta, eta } => {
                write!(f, "combined(alpha={alpha},beta={beta},delta={delta},eta={eta})")
            }
            Potential::PFrame { p } => write!(f, "pframe(p={p})"),
        }
    }
}

impl FromStr for Potential {
    type Err = FrameError;

    /// Parses a bare name with default parameters (`sum`, `combined`, …) or
    /// `pframe:P`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some(("pframe", p)) => {
                let p = p.parse().map_err(|_| FrameError::UnknownVariant(s.to_string()))?;
                Potential::from_name("pframe", &PotentialParams::default(), p)
            }
            Some(_) => Err(FrameError::UnknownVariant(s.to_string())),
            None => Potential::from_name(s, &PotentialParams::default(), 2),
        }
    }
}

/// `|G + D|² − |G|²` entrywise.
fn abs2_increment<T: Real>(g: &CMat<T>, d: &CMat<T>) -> Vec<Vec<T>> {
    let n = g.rows();
    (0..n)
        .map(|x| {
            (0..n)
                .map(|y| {
                    let (gv, dv) = (g[(x, y)], d[(x, y)]);
                    T::lit(2.0) * (gv.conj() * dv).re + dv.norm_sqr()
                })
                .collect()
        })
        .collect()
}

/// `Σ e^{e_{xy} − shift} expm1(η Δa_{xy})` over the sum-potential exponents.
fn sum_increment<T: Real>(g: &GramMatrix<T>, da: &[Vec<T>], eta: T, shift: T) -> T {
    let e = potentials::sum_exponents(g, eta);
    let mut s = T::zero();
    for (re, rd) in e.iter().zip(da) {
        for (&ex, &dx) in re.iter().zip(rd) {
            s = s + (ex - shift).exp() * (eta * dx).exp_m1();
        }
    }
    s
}

fn diag_increment<T: Real>(a: &[Vec<T>], da: &[Vec<T>], delta: T) -> T {
    let mut s = T::zero();
    for j in 0..a.len() {
        s = s + (delta * a[j][j]).exp() * (delta * da[j][j]).exp_m1();
    }
    s / delta
}

fn chain_increment<T: Real>(a: &[Vec<T>], da: &[Vec<T>], alpha: T, beta: T) -> T {
    let n = a.len();
    let mut r = vec![T::zero(); n];
    let mut dr = vec![T::zero(); n];
    for x in 0..n {
        let (mut v, mut dv) = (T::zero(), T::zero());
        for j in 0..n {
            if j != x {
                let base = (alpha * a[x][j]).exp();
                v = v + base;
                dv = dv + base * (alpha * da[x][j]).exp_m1();
            }
        }
        let diag = a[x][x].exp();
        r[x] = v / alpha + beta * diag;
        dr[x] = dv / alpha + beta * diag * da[x][x].exp_m1();
    }
    let mut s = T::zero();
    for j in 0..n {
        let nx = (j + 1) % n;
        let d = r[j] - r[nx];
        let dd = dr[j] - dr[nx];
        s = s + dd * (d + d + dd);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::random_parseval;
    use crate::scalar::Field;
    use crate::tangent::{retract, retraction_increment};

    fn check_increment(pot: Potential, log: bool) {
        let g: GramMatrix<f64> = random_parseval(5, 2, Field::Complex, 11).unwrap();
        let v = pot.value(&g, log);
        let grad = pot.gradient(&g, log, v);
        for step in [1e-3, 1e-1] {
            let d = retraction_increment(&g, grad.direction(), step);
            let g2 = retract(&g, grad.direction(), step);
            let direct = pot.value(&g2, log) - v;
            let inc = pot.increment(&g, &d, log, v);
            assert!((direct - inc).abs() <= 1e-10 * (1.0 + v.abs()), "{pot} {log} {direct} {inc}");
            if step == 1e-3 {
                assert!(inc < 0.0, "{pot} {log} {inc}");
            }
        }
    }

    #[test]
    fn increments_match_direct_differences() {
        let p = PotentialParams::default();
        for pot in [
            Potential::Sum { eta: 1.5 },
            Potential::Diag { delta: 0.7 },
            Potential::Chain { alpha: 1.3, beta: 0.8 },
            Potential::combined(&p),
            Potential::PFrame { p: 2 },
        ] {
            check_increment(pot, false);
        }
        check_increment(Potential::Sum { eta: 80.0 }, true);
        check_increment(Potential::Combined { alpha: 1.0, beta: 1.0, delta: 1.0, eta: 80.0 }, true);
    }

    #[test]
    fn parse_names() {
        assert_eq!("sum".parse::<Potential>().unwrap(), Potential::Sum { eta: 1.0 });
        assert_eq!("pframe:1".parse::<Potential>().unwrap(), Potential::PFrame { p: 1 });
        assert!("pframe:3".parse::<Potential>().is_err());
        assert!("frobenius".parse::<Potential>().is_err());
    }
}
