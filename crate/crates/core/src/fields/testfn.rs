//! Componentwise nondecreasing test functions `f: R^m -> R`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::generator::GeneratorSpec;
use crate::harness::{run_replicates, Welford};

/// Which argument(s) a single-argument member reads.
///
/// Arguments are ordered as the history `(S_k, k <= i)` in box order, so
/// `First` is `S_(1,…,1)` and `Last` is `S_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arg {
    First,
    Last,
    Max,
    At(usize),
}

impl Arg {
    fn read(&self, xs: &[f64]) -> f64 {
        match *self {
            Arg::First => xs[0],
            Arg::Last => xs[xs.len() - 1],
            Arg::Max => xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Arg::At(i) => xs[i],
        }
    }

    fn label(&self) -> String {
        match self {
            Arg::First => "first".into(),
            Arg::Last => "last".into(),
            Arg::Max => "max".into(),
            Arg::At(i) => format!("x{i}"),
        }
    }
}

/// Members are nondecreasing in every argument by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestFunction {
    Constant,
    /// `Σ x_m`: strictly increasing in every argument.
    Sum,
    Value { arg: Arg },
    /// `max(x - t, 0)`.
    Ramp { arg: Arg, t: f64 },
    /// `1(x >= t)`.
    Step { arg: Arg, t: f64 },
    /// `Σ_m max(x_m - t, 0)`.
    RampSum { t: f64 },
    /// `∏_m 1(x_m >= t)`.
    StepProduct { t: f64 },
}

impl TestFunction {
    pub fn eval(&self, xs: &[f64]) -> f64 {
        match self {
            TestFunction::Constant => 1.0,
            TestFunction::Sum => xs.iter().sum(),
            TestFunction::Value { arg } => arg.read(xs),
            TestFunction::Ramp { arg, t } => (arg.read(xs) - t).max(0.0),
            TestFunction::Step { arg, t } => f64::from(arg.read(xs) >= *t),
            TestFunction::RampSum { t } => xs.iter().map(|x| (x - t).max(0.0)).sum(),
            TestFunction::StepProduct { t } => f64::from(xs.iter().all(|x| x >= t)),
        }
    }

    /// True when the function never takes negative values.
    pub fn is_nonnegative(&self) -> bool {
        !matches!(self, TestFunction::Sum | TestFunction::Value { .. })
    }

    pub fn label(&self) -> String {
        match self {
            TestFunction::Constant => "const".into(),
            TestFunction::Sum => "sum".into(),
            TestFunction::Value { arg } => format!("value({})", arg.label()),
            TestFunction::Ramp { arg, t } => format!("ramp({},t={t:.4})", arg.label()),
            TestFunction::Step { arg, t } => format!("step({},t={t:.4})", arg.label()),
            TestFunction::RampSum { t } => format!("ramp_sum(t={t:.4})"),
            TestFunction::StepProduct { t } => format!("step_product(t={t:.4})"),
        }
    }
}

/// Number of thresholds in the standard grid.
pub const GRID_POINTS: usize = 7;
const PILOT_REPLICATES: usize = 512;
const PILOT_OFFSET: u64 = 0x7069_6c6f_7400_0000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionFamily {
    pub members: Vec<TestFunction>,
}

impl TestFunctionFamily {
    /// Threshold grid: 7 points evenly spaced over `center ± 2·scale`.
    pub fn grid(center: f64, scale: f64) -> Vec<f64> {
        (0..GRID_POINTS)
            .map(|m| center + scale * (-2.0 + 4.0 * m as f64 / (GRID_POINTS - 1) as f64))
            .collect()
    }

    /// The standard family used by the oracles: the constant 1, the sum, and
    /// per grid threshold ramps/steps of the last, first and maximal argument,
    /// a ramp sum and a step product.
    pub fn standard(center: f64, scale: f64) -> Self {
        let mut members = vec![TestFunction::Constant, TestFunction::Sum];
        for t in Self::grid(center, scale) {
            members.extend([
                TestFunction::Ramp { arg: Arg::Last, t },
                TestFunction::Step { arg: Arg::Last, t },
                TestFunction::Ramp { arg: Arg::First, t },
                TestFunction::Step { arg: Arg::Max, t },
                TestFunction::RampSum { t },
                TestFunction::StepProduct { t },
            ]);
        }
        Self { members }
    }

    /// The standard family with its grid centered and scaled on the pooled
    /// marginal of a pilot sample of the field.
    pub fn calibrated(spec: &GeneratorSpec, seed: u64) -> Self {
        let acc = run_replicates(
            seed.wrapping_add(PILOT_OFFSET),
            PILOT_REPLICATES,
            Welford::new,
            |acc, rng, _| {
                for &v in spec.sample_with(rng).values() {
                    acc.push(v);
                }
            },
        );
        let scale = acc.variance().sqrt();
        Self::standard(acc.mean(), if scale > 0.0 { scale } else { 1.0 })
    }

    /// Keep only members that are nonnegative (the demisubmartingale family).
    pub fn nonnegative(&self) -> Self {
        Self {
            members: self.members.iter().filter(|f| f.is_nonnegative()).cloned().collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.members.contains(&TestFunction::Constant) {
            return Err(Error::InvalidFunction("family must contain the constant 1".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}
