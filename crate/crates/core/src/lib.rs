//! Numerical toolkit for affinity-based measurement-induced nonlocality and
//! the nonbilocal correlation measure of tensorized bipartite states.
//!
//! The crate is organized around five pieces:
//!
//! - [`hilbert`]: density operators, tensor products, partial traces,
//!   PSD square roots, Schmidt decomposition, affinity, seeded sampling.
//! - [`basis`]: orthonormal Hermitian operator bases and the real
//!   coefficient (lambda) matrices of matrix square roots, plus the
//!   measurement Gamma matrix.
//! - [`measurement`]: projective measurements, the post-measurement map,
//!   and the manifold of measurements leaving a marginal invariant.
//! - [`measures`]: HS-MIN, geometric discord, affinity-MIN and the shared
//!   multistart optimizer. Max-mode values are certified lower bounds of
//!   the true suprema; the eigenvalue bounds in [`nonbilocal`] bracket them
//!   from above.
//! - [`nonbilocal`]: the nonbilocal measure, its pure-state closed formula,
//!   the MIN inequality, and the eigenvalue upper bounds.
//!
//! All values are immutable after construction and every operation is a
//! pure function, so the API is safe to drive from concurrent workers.

pub mod basis;
pub mod error;
pub mod hilbert;
pub mod measurement;
pub mod measures;
pub mod nonbilocal;
pub mod statespec;

pub use error::{Error, Result};
pub use hilbert::{
    affinity, partial_trace, permute_subsystems, random_ket, random_state, schmidt, sqrt_psd,
    swap_bipartite, tensor, C64, CMat, CVec, DensityOperator, Ket, SchmidtForm,
};
pub use measurement::{
    eigen_family, eigen_measurement, InvariantMeasurementFamily, ProjectiveMeasurement,
};
pub use measures::{
    affinity_min, geometric_discord, hs_min, MeasureResult, Mode, OptimizerConfig,
};
pub use nonbilocal::{
    bound_report, bound_thm3, bound_thm4, nonbilocal, nonbilocal_pure, thm5_closed, verify_thm1,
    BilocalInput, BoundReport, Thm1Report, Thm5Report,
};
pub use statespec::{builtin_state, StateSpec};
