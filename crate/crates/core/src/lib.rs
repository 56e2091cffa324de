//! Simulation of multiindexed demimartingales and Monte-Carlo verification
//! of their maximal, moment, upcrossing and Whittle-type inequalities.
//!
//! Modules, bottom up:
//!
//! - [`lattice`]: multiindices and boxes.
//! - [`harness`]: seeding, the deterministic parallel replicate engine,
//!   streaming estimates and suite runs.
//! - [`fields`]: random-field generators and the defining-property oracle.
//! - [`funcs`]: convex, Orlicz and threshold function families.
//! - [`stats`]: per-realization statistics (maxima, ranks, upcrossings).
//! - [`checks`]: paired Monte-Carlo checks producing verdicts.

pub mod checks;
pub mod error;
pub mod fields;
pub mod funcs;
pub mod harness;
pub mod lattice;
pub mod stats;

pub use checks::{CheckConfig, CheckOutcome, InequalityReport, Relation, Theorem, TrendReport, Verdict};
pub use error::{Error, Result};
pub use fields::{FieldSample, GeneratorSpec};
pub use harness::{derive_seed, Estimate, RunConfig, SuiteReport};
pub use lattice::{LatticeBox, MultiIndex};
