use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fields::{FieldSample, GeneratorSpec};
use crate::harness::{run_replicates, ColumnStats, Estimate, Merge};

/// Absolute slack for exact (zero-SE) comparisons, scaled by the magnitudes.
const ROUNDING: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `lhs <= rhs`.
    Le,
    /// `lhs >= rhs`.
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Hold,
    Violation,
    Inconclusive,
}

pub type Extras = BTreeMap<String, Value>;

/// Paired Monte-Carlo evaluation of one inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub theorem: String,
    pub case: String,
    pub relation: Relation,
    pub lhs: Estimate,
    pub rhs: Estimate,
    /// `rhs - lhs` for `Le`, `lhs - rhs` for `Ge`; nonnegative when the
    /// inequality holds at the point estimates.
    pub margin: f64,
    /// SE of the paired difference.
    pub margin_se: f64,
    /// `margin / margin_se`; absent when the SE is 0.
    pub z_score: Option<f64>,
    pub z: f64,
    pub verdict: Verdict,
    pub replicates: usize,
    pub seed: u64,
    pub params: Value,
    pub extras: Extras,
}

/// A side of an inequality as a smooth function of the column means.
#[derive(Debug, Clone)]
pub(crate) struct Side {
    pub value: f64,
    pub grad: Vec<f64>,
}

impl Side {
    pub fn constant(value: f64, columns: usize) -> Self {
        Self { value, grad: vec![0.0; columns] }
    }

    /// `offset + Σ w · mean[c]`.
    pub fn affine(stats: &ColumnStats, offset: f64, terms: &[(usize, f64)]) -> Self {
        let mut grad = vec![0.0; stats.columns()];
        let mut value = offset;
        for &(c, w) in terms {
            grad[c] += w;
            value += w * stats.mean(c);
        }
        Self { value, grad }
    }

    pub fn column(stats: &ColumnStats, c: usize, scale: f64) -> Self {
        Self::affine(stats, 0.0, &[(c, scale)])
    }

    pub fn estimate(&self, stats: &ColumnStats) -> Estimate {
        stats.estimate_of(self.value, &self.grad)
    }
}

/// Accumulator that also carries the first per-replicate error, in
/// replicate order.
pub(crate) struct Acc {
    pub stats: ColumnStats,
    pub err: Option<Error>,
}

impl Merge for Acc {
    fn merge(&mut self, other: Self) {
        self.stats.merge(other.stats);
        if self.err.is_none() {
            self.err = other.err;
        }
    }
}

/// Shared state of one check run.
pub(crate) struct Run<'a> {
    pub theorem: &'static str,
    pub spec: &'a GeneratorSpec,
    pub replicates: usize,
    pub seed: u64,
    pub z: f64,
    pub params: Value,
}

impl Run<'_> {
    /// Simulates `replicates` fields and accumulates `columns` values each.
    pub fn simulate<F>(&self, columns: usize, row: F) -> Result<ColumnStats>
    where
        F: Fn(&FieldSample, &mut [f64]) -> Result<()> + Sync,
    {
        simulate_on(self.spec, self.replicates, self.seed, columns, row)
    }

    pub fn report(
        &self,
        stats: &ColumnStats,
        case: impl Into<String>,
        relation: Relation,
        lhs: Side,
        rhs: Side,
        extras: Extras,
    ) -> InequalityReport {
        let (margin, grad): (f64, Vec<f64>) = match relation {
            Relation::Le => (
                rhs.value - lhs.value,
                rhs.grad.iter().zip(&lhs.grad).map(|(r, l)| r - l).collect(),
            ),
            Relation::Ge => (
                lhs.value - rhs.value,
                lhs.grad.iter().zip(&rhs.grad).map(|(l, r)| l - r).collect(),
            ),
        };
        let diff = stats.estimate_of(margin, &grad);
        let slack = ROUNDING * (1.0 + lhs.value.abs() + rhs.value.abs());
        let verdict = decide(margin, diff.se, self.z, slack, diff.reliable);
        InequalityReport {
            theorem: self.theorem.to_string(),
            case: case.into(),
            relation,
            lhs: lhs.estimate(stats),
            rhs: rhs.estimate(stats),
            margin,
            margin_se: diff.se,
            z_score: (diff.se > 0.0).then(|| margin / diff.se),
            z: self.z,
            verdict,
            replicates: self.replicates,
            seed: self.seed,
            params: self.params.clone(),
            extras,
        }
    }
}

pub(crate) fn simulate_on<F>(
    spec: &GeneratorSpec,
    replicates: usize,
    seed: u64,
    columns: usize,
    row: F,
) -> Result<ColumnStats>
where
    F: Fn(&FieldSample, &mut [f64]) -> Result<()> + Sync,
{
    let acc = run_replicates(
        seed,
        replicates,
        || Acc { stats: ColumnStats::new(columns), err: None },
        |acc, rng, _| {
            if acc.err.is_some() {
                return;
            }
            let field = spec.sample_with(rng);
            let mut buf = vec![0.0; columns];
            match row(&field, &mut buf) {
                Ok(()) if buf.iter().all(|v| v.is_finite()) => acc.stats.push(&buf),
                Ok(()) => acc.err = Some(Error::Domain("non-finite replicate value".into())),
                Err(e) => acc.err = Some(e),
            }
        },
    );
    match acc.err {
        Some(e) => Err(e),
        None => Ok(acc.stats),
    }
}

/// HOLD iff `margin >= -z·SE` (up to rounding slack); otherwise
/// INCONCLUSIVE when the SE is unreliable, else VIOLATION.
pub fn decide(margin: f64, se: f64, z: f64, slack: f64, reliable: bool) -> Verdict {
    if margin >= -z * se - slack {
        Verdict::Hold
    } else if !reliable {
        Verdict::Inconclusive
    } else {
        Verdict::Violation
    }
}

/// One point of a trend diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    #[serde(rename = "box")]
    pub dims: Vec<usize>,
    pub value: Estimate,
    pub extras: Extras,
}

/// Label attached to every trend report.
pub const TREND_LABEL: &str = "finite-n diagnostic";

/// A quantity tracked over a growing box sequence. Never a proof of a limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendReport {
    pub theorem: String,
    pub label: String,
    pub quantity: String,
    pub points: Vec<TrendPoint>,
    /// The documented pattern this diagnostic looks for.
    pub pattern: String,
    pub pattern_holds: bool,
    pub replicates: usize,
    pub seed: u64,
    pub z: f64,
    pub params: Value,
    pub extras: Extras,
}

pub(crate) fn extras<const N: usize>(items: [(&str, Value); N]) -> Extras {
    items.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Non-increasing within noise: each step may rise by at most
/// `z·sqrt(se_a² + se_b²)` (independent estimates).
pub(crate) fn nonincreasing(points: &[Estimate], z: f64) -> bool {
    points
        .windows(2)
        .all(|w| w[1].mean <= w[0].mean + z * (w[0].se.powi(2) + w[1].se.powi(2)).sqrt() + ROUNDING)
}
