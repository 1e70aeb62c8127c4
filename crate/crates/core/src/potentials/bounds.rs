//! Closed-form lower bounds and constants for the frame potentials.

use std::fmt;
use std::str::FromStr;

use crate::error::{FrameError, Result};
use crate::scalar::Real;

/// `C_{N,K} = √(K(N−K) / (N²(N−1)))`, the common off-diagonal magnitude of an
/// equiangular Parseval frame.
pub fn welch_constant<T: Real>(n: usize, k: usize) -> T {
    if n < 2 {
        return T::zero();
    }
    let (nf, kf) = (n as f64, k as f64);
    T::lit((kf * (nf - kf) / (nf * nf * (nf - 1.0))).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundVariant {
    /// `Φ^{(1)} ≥ K` for equal-norm frames, equality iff Parseval.
    BenedettoFickus,
    /// `Φ^{(p)} ≥ (K^{2p}(N−1)^{p−1} + K^p(N−K)^p) / ((N−1)^{p−1}N^{2p−1})`, `p > 1`.
    PFrame(f64),
    /// `Σ_j G_{jj}² ≥ K²/N`.
    Diagonal,
    /// `Σ_{j,l} |G_{jl}|⁴ ≥ K²(K²−2K+N) / (N²(N−1))`.
    Elwood,
    /// `C_{N,K}`.
    Welch,
    /// `Φ_sum^η ≥ N² exp(η(K/N² − K²/N³ + K(N−K)/(N³(N−1))))`.
    SumPotential(f64),
    /// Threshold below which `Φ_sum^η(G)` forces every entry of `G` to be
    /// nonzero: `2 + (N²−2) exp(η(K/(N²−2) − K²/(N(N²−2)) + K(N−K)/(N(N−1)(N²−2))))`.
    NoZeroThreshold(f64),
}

impl fmt::Display for BoundVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundVariant::BenedettoFickus => write!(f, "benedetto-fickus"),
            BoundVariant::PFrame(p) => write!(f, "p-frame:{p}"),
            BoundVariant::Diagonal => write!(f, "diagonal"),
            BoundVariant::Elwood => write!(f, "elwood"),
            BoundVariant::Welch => write!(f, "welch"),
            BoundVariant::SumPotential(e) => write!(f, "sum:{e}"),
            BoundVariant::NoZeroThreshold(e) => write!(f, "no-zero:{e}"),
        }
    }
}

impl FromStr for BoundVariant {
    type Err = FrameError;

    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let num = |a: Option<&str>| -> Result<f64> {
            a.ok_or_else(|| FrameError::UnknownVariant(s.to_string()))?
                .parse::<f64>()
                .map_err(|_| FrameError::UnknownVariant(s.to_string()))
        };
        match (head, arg) {
            ("benedetto-fickus", None) => Ok(BoundVariant::BenedettoFickus),
            ("p-frame", a) => Ok(BoundVariant::PFrame(num(a)?)),
            ("diagonal", None) => Ok(BoundVariant::Diagonal),
            ("elwood", None) => Ok(BoundVariant::Elwood),
            ("welch", None) => Ok(BoundVariant::Welch),
            ("sum", a) => Ok(BoundVariant::SumPotential(num(a)?)),
            ("no-zero", a) => Ok(BoundVariant::NoZeroThreshold(num(a)?)),
            _ => Err(FrameError::UnknownVariant(s.to_string())),
        }
    }
}

pub fn potential_bounds<T: Real>(n: usize, k: usize, variant: BoundVariant) -> Result<T> {
    if k == 0 || k > n {
        return Err(FrameError::BadRank { n, k });
    }
    let (nf, kf) = (n as f64, k as f64);
    let v = match variant {
        BoundVariant::BenedettoFickus => kf,
        BoundVariant::PFrame(p) => {
            if !(p > 1.0) {
                return Err(FrameError::InvalidParameter(format!("p-frame bound needs p > 1, got {p}")));
            }
            if n < 2 {
                return Err(FrameError::InvalidParameter("p-frame bound needs N ≥ 2".into()));
            }
            let num = kf.powf(2.0 * p) * (nf - 1.0).powf(p - 1.0) + kf.powf(p) * (nf - kf).powf(p);
            num / ((nf - 1.0).powf(p - 1.0) * nf.powf(2.0 * p - 1.0))
        }
        BoundVariant::Diagonal => kf * kf / nf,
        BoundVariant::Elwood => {
            if n < 2 {
                return Err(FrameError::InvalidParameter("Elwood bound needs N ≥ 2".into()));
            }
            kf * kf * (kf * kf - 2.0 * kf + nf) / (nf * nf * (nf - 1.0))
        }
        BoundVariant::Welch => welch_constant::<f64>(n, k),
        BoundVariant::SumPotential(eta) => {
            let c2 = welch_constant::<f64>(n, k).powi(2);
            nf * nf * (eta * (kf / (nf * nf) - kf * kf / nf.powi(3) + c2 / nf)).exp()
        }
        BoundVariant::NoZeroThreshold(eta) => {
            let m = nf * nf - 2.0;
            let cross = if n < 2 { 0.0 } else { kf * (nf - kf) / (nf * (nf - 1.0) * m) };
            2.0 + m * (eta * (kf / m - kf * kf / (nf * m) + cross)).exp()
        }
    };
    Ok(T::lit(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welch_3_2_is_one_third() {
        assert!((welch_constant::<f64>(3, 2) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn elwood_6_4() {
        let v: f64 = potential_bounds(6, 4, BoundVariant::Elwood).unwrap();
        assert!((v - 56.0 / 45.0).abs() < 1e-14);
    }

    #[test]
    fn diag_bound_5_3() {
        let v: f64 = potential_bounds(5, 3, BoundVariant::Diagonal).unwrap();
        assert!((v - 9.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn p2_bound_equals_elwood_for_3_2() {
        let p: f64 = potential_bounds(3, 2, BoundVariant::PFrame(2.0)).unwrap();
        let e: f64 = potential_bounds(3, 2, BoundVariant::Elwood).unwrap();
        assert!((p - 2.0 / 3.0).abs() < 1e-15);
        assert!((e - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn sum_bound_3_2() {
        // all nine exponents equal η/9 for Mercedes-Benz
        let v: f64 = potential_bounds(3, 2, BoundVariant::SumPotential(1.0)).unwrap();
        assert!((v - 9.0 * (1.0f64 / 9.0).exp()).abs() < 1e-13);
    }

    #[test]
    fn parse_variants() {
        assert_eq!("elwood".parse::<BoundVariant>().unwrap(), BoundVariant::Elwood);
        assert_eq!("p-frame:3".parse::<BoundVariant>().unwrap(), BoundVariant::PFrame(3.0));
        assert_eq!("no-zero:0.5".parse::<BoundVariant>().unwrap(), BoundVariant::NoZeroThreshold(0.5));
        assert!(matches!("frobenius".parse::<BoundVariant>(), Err(FrameError::UnknownVariant(_))));
        assert!(matches!("sum".parse::<BoundVariant>(), Err(FrameError::UnknownVariant(_))));
    }
}
