//! Random-field generators and empirical oracles for association and the
//! demimartingale property.

mod generator;
mod oracle;
mod testfn;

pub use generator::{
    partial_sums, sample_field, Dist, FieldSample, GeneratorSpec, Kernel, Model, SignClass,
    DEFAULT_LOGNORMAL_SIGMA,
};
pub use oracle::{
    all_comparable_pairs, association_oracle, demimartingale_oracle, function_pairs, OracleCell,
    OracleReport, OracleVerdict,
};
pub use testfn::{Arg, TestFunction, TestFunctionFamily, GRID_POINTS};
