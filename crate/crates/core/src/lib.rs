//! Analysis toolkit for bipartite quantum correlations.
//!
//! What lives here:
//!
//! - [`linalg`]: dense complex matrices, Kronecker products, partial trace
//!   and partial transpose, a Jacobi eigensolver, and density-operator
//!   validation.
//! - [`quantum`]: density operators, projective measurements, Bell and
//!   Werner state families, separable mixtures, and Born-rule joint
//!   probabilities.
//! - [`locality`]: behaviors `P(a,b|x,y)`, common-cause (local
//!   hidden-variable) models, deterministic-strategy enumeration, local
//!   polytope membership by phase-1 simplex with verified certificates,
//!   CHSH evaluation, no-signaling residuals, and seeded Monte Carlo
//!   sampling of local models.
//! - [`separability`]: the PPT test (exact for 2x2 and 2x3 systems),
//!   decomposition certificates, Werner thresholds, and family scans that
//!   cross-tabulate separability against CHSH and polytope membership.
//!
//! Everything is a pure function over immutable values; all randomness is
//! seeded explicitly through [`rng::SplitMix64`].

pub mod error;
pub mod linalg;
pub mod locality;
pub mod quantum;
pub mod rng;
pub mod separability;

pub use error::{Error, Result};
pub use linalg::{c64, Complex64, ComplexMatrix, Party};
pub use locality::{BehaviorTable, LhvResult, LocalModel, Scenario};
pub use quantum::{
    BellKind, DensityOperator, ProjectiveMeasurement, SeparableComponent, SeparableComponents,
};
pub use separability::{Classification, PptReport, PptVerdict, ScanFamily, ScanRow};
