//! Retraction-based descent on the projection manifold, multi-start, and
//! `η`-annealing toward low-coherence Parseval frames.

mod anneal;
mod critical;
mod descent;
mod objective;

pub use anneal::{anneal_grassmannian, AnnealResult, AnnealSchedule, StageResult};
pub use critical::{verify_critical_point, CriticalPointVerdict, TheoremViolation};
pub use descent::{
    descend, multi_start, restart_seed, DescentConfig, DescentTrace, MultiStartResult, TerminalStatus, TraceRow,
};
pub use objective::Potential;
