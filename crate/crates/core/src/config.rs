//! Numerical tolerances, gathered in one place.

use serde::{Deserialize, Serialize};

/// Default `η` above which exponential sums switch to log-sum-exp.
pub const LOG_DOMAIN_ETA: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Entrywise Hermitian defect accepted when symmetrizing raw data.
    pub symmetry: f64,
    /// Bound on `‖G²−G‖_HS` and `|tr G − K|` for membership in the manifold.
    pub manifold: f64,
    /// Looser membership bound used after long chains of retractions.
    pub retraction: f64,
    /// Absolute tolerance of the structure detectors on magnitudes.
    pub detector: f64,
    /// Riemannian gradient norm below which a point counts as critical.
    pub critical: f64,
    /// Magnitude below which an entry is treated as an exact zero.
    pub zero_entry: f64,
    /// Largest admissible condition number of a chart pivot block.
    pub chart_condition: f64,
    /// Exponent scale `η` above which exponential sums are evaluated in the log domain.
    pub log_domain_eta: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            symmetry: 1e-12,
            manifold: 1e-10,
            retraction: 1e-9,
            detector: 1e-8,
            critical: 1e-7,
            zero_entry: 1e-14,
            chart_condition: 1e12,
            log_domain_eta: LOG_DOMAIN_ETA,
        }
    }
}

impl Tolerances {
    /// Defaults scaled for single precision work.
    pub fn single_precision() -> Self {
        Self {
            symmetry: 1e-5,
            manifold: 1e-4,
            retraction: 1e-3,
            detector: 1e-3,
            critical: 1e-3,
            zero_entry: 1e-6,
            chart_condition: 1e5,
            log_domain_eta: 20.0,
        }
    }
}
