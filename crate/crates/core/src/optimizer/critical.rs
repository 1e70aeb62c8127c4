use serde::Serialize;

use crate::config::Tolerances;
use crate::error::Result;
use crate::gram::GramMatrix;
use crate::scalar::Real;
use crate::structures::{family_wise_criticality, structure_report, CriticalityReport, ParamGrid, StructureReport};

/// A family-wise critical point without zero entries that the detectors do
/// not find equidistributed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremViolation {
    pub max_riemannian_grad_norm: f64,
    pub min_offdiag_magnitude: f64,
    pub equidistribution_mismatch: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPointVerdict {
    pub criticality: CriticalityReport,
    pub structure: StructureReport,
    /// Family-wise critical with no zero entries.
    pub premise_holds: bool,
    /// Tolerance on the equidistribution mismatch used for the conclusion.
    pub conclusion_tolerance: f64,
    pub violation: Option<TheoremViolation>,
}

/// Checks that family-wise criticality without zero entries comes with
/// equidistribution. The premise is only grid evidence, so a reported
/// violation means either a counterexample or an insufficient tolerance.
///
/// A point that is critical only to within `tol.critical` carries its
/// structure to about the same accuracy, so the conclusion is judged at
/// `max(tol.detector, tol.critical)`.
pub fn verify_critical_point<T: Real>(
    g: &GramMatrix<T>,
    eta: f64,
    grid: &ParamGrid,
    tol: &Tolerances,
) -> Result<CriticalPointVerdict> {
    let criticality = family_wise_criticality(g, eta, grid, tol.critical)?;
    let structure = structure_report(g, eta, tol)?;
    let premise_holds = criticality.is_family_wise && !structure.has_zero_entry;
    let conclusion_tolerance = tol.detector.max(tol.critical);
    let equidistributed = structure.equal_norm.deviation <= conclusion_tolerance
        && structure.equidistributed.deviation <= conclusion_tolerance;
    let violation = (premise_holds && !equidistributed).then_some(TheoremViolation {
        max_riemannian_grad_norm: criticality.max_riemannian_grad_norm,
        min_offdiag_magnitude: structure.min_offdiag_magnitude,
        equidistribution_mismatch: structure.equidistributed.deviation,
    });
    Ok(CriticalPointVerdict { criticality, structure, premise_holds, conclusion_tolerance, violation })
}
