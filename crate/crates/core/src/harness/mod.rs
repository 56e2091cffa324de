//! Monte-Carlo engine, configuration and report emission.

pub mod engine;
pub mod estimate;
pub mod rng;
pub mod seed;
pub mod suite;

pub use engine::{run_replicates, Merge, CHUNK};
pub use estimate::{estimate, ColumnStats, Estimate, Welford, MASS_CARRIER_CAP};
pub use rng::{Stream, GENERATOR_ID};
pub use seed::derive_seed;
pub use suite::{exit_code, run_suite, write_suite, CheckEntry, CheckStatus, RunConfig, SuiteReport, SuiteSummary};
