//! Parseval frame design on the manifold of rank-`K` orthogonal projections.
//!
//! A Parseval frame of `N` vectors spanning a `K`-dimensional space is
//! represented by its Gramian, an `N×N` Hermitian projection of trace `K`.
//! The crate provides validation and tangent geometry for that manifold,
//! analytic frame potentials with their lifted gradients, structure
//! detectors, reference constructions, and a retraction-based descent with
//! an `η`-annealing driver for low-coherence frames.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix `f64`.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod chart;
pub mod config;
pub mod constructors;
pub mod error;
pub mod gram;
pub mod io;
pub mod matrix;
pub mod optimizer;
pub mod potentials;
pub mod scalar;
pub mod structures;
pub mod tangent;
pub mod verify;

pub use config::Tolerances;
pub use error::{FrameError, Result};
pub use gram::{GramMatrix, HermMatrix, ValidationResiduals};
pub use matrix::CMat;
pub use potentials::{BoundVariant, GradientAtIdentity, PotentialParams};
pub use scalar::{Field, Real};
pub use tangent::{TangentDirection, TangentVector};

pub type Gram = GramMatrix<f64>;
pub type Gram32 = GramMatrix<f32>;
pub type Mat = CMat<f64>;
pub type Mat32 = CMat<f32>;
pub type Direction = TangentDirection<f64>;
pub type Gradient = GradientAtIdentity<f64>;
