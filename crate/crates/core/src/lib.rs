//! Cluster-aware two-stage iterative MIMO detection for LEO satellite uplinks.
//!
//! Users on the ground form geographic clusters. Their channels are strongly
//! correlated inside a cluster and weakly correlated across clusters, which
//! leaves the LMMSE Gram matrix ill-conditioned. The detector here first
//! inverts each cluster's diagonal block of the Gram matrix (Stage 1), then
//! runs a stationary iteration (RI, Jacobi, Gauss-Seidel or SSOR) on the
//! block-preconditioned system (Stage 2).
//!
//! Modules:
//! - [`linalg`]: dense complex primitives (Gram, Cholesky, triangular solves, eigenvalues)
//! - [`channel`]: satellite geometry, Rician channel realizations, link budget, CSI errors
//! - [`detectors`]: LMMSE, conventional splitting iterations, the two-stage detector
//! - [`metrics`]: constellations, SER, condition numbers, heatmaps, CDFs
//! - [`harness`]: scenario configs, Monte-Carlo orchestration, case studies, output files

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod detectors;
mod error;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod rng;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, HermitianView, C64};
