//! Monte-Carlo checks of maximal, moment, upcrossing and Whittle-type
//! inequalities for multiindexed demimartingales.
//!
//! Every check estimates both sides from one replicate stream (paired
//! estimation) and returns [`InequalityReport`]s; the convergence checks
//! return a [`TrendReport`].

mod chow;
mod crossing;
mod maximal;
mod orlicz;
mod report;
mod trend;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fields::{GeneratorSpec, Model, SignClass};
use crate::funcs::{ArraySpec, ConvexSpec, NondecreasingSpec, OrliczSpec, ScalarSpec};

pub use maximal::{
    cairoli_multiplier, cairoli_prob_constant, corollary_multiplier, corollary_p1_rhs, llogl_rhs,
    LLOGL_SHARPER_THRESHOLD,
};
pub use orlicz::MomentParams;
pub use report::{decide, Extras, InequalityReport, Relation, TrendPoint, TrendReport, Verdict, TREND_LABEL};
pub(crate) use report::{extras, Run, Side};

pub const DEFAULT_REPLICATES: usize = 10_000;
pub const DEFAULT_Z: f64 = 3.0;

/// `e/(e-1)`.
pub const A_CONST: f64 = std::f64::consts::E / (std::f64::consts::E - 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Extremum {
    #[default]
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WhittleVariant {
    /// Nondecreasing convex `φ`; containment probability.
    Monotone,
    /// Any nonnegative convex `φ`; containment probability.
    General,
    /// Tail of `sup φ(S)/ψ(u)`.
    SupForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrliczBound {
    /// `φ(b) + λ/(1-λ) E[1(S>λb)(Φ_a(S/λ) - Φ_a(b) - Φ_a'(b)(S/λ - b))]`.
    TailIntegral,
    /// `φ(a) + λ/(1-λ) E[Φ_a(S/λ)]`.
    BigPhi,
    /// `b + b/(b-1)(E S log⁺S - E(S-1)⁺)` for `E max`.
    Llogl,
    /// `E φ(q_φ S)`.
    QScaled,
    /// `q_φ^{p*_φ} E φ(S)` for moderate `φ`.
    Moderate,
    /// `(γ/(γ-1))^γ E φ(S)` when `φ^{1/γ}` is nondecreasing and convex.
    RootConvex,
    /// `E e^{r max} <= e E e^{r S}`.
    Exponential,
    /// `((m+1)/m)^{m+1} E φ(S)` when `φ^{(m)}` is an Orlicz function.
    Derivative,
}

fn default_eps() -> Vec<f64> {
    vec![1.0]
}

fn default_one() -> f64 {
    1.0
}

fn default_weights() -> ArraySpec {
    ArraySpec::Constant { value: 1.0 }
}

fn default_u() -> ArraySpec {
    ArraySpec::Product { power: 1.0 }
}

fn default_psi() -> ScalarSpec {
    ScalarSpec::Power { p: 1.0 }
}

/// Theorem selector and its parameters. JSON: `{"theorem": "<id>", ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "theorem", rename_all = "snake_case")]
pub enum Theorem {
    CairoliMoment {
        p: f64,
    },
    CairoliProb {
        #[serde(default = "default_eps")]
        eps: Vec<f64>,
    },
    DoobIndicator {
        #[serde(default = "default_eps")]
        eps: Vec<f64>,
        #[serde(default)]
        extremum: Extremum,
    },
    RankOrder {
        j: usize,
        g: NondecreasingSpec,
        #[serde(default = "default_eps")]
        eps: Vec<f64>,
    },
    MomentCorollary {
        p: f64,
    },
    Harremoes {
        c: f64,
    },
    LimsupTrend {
        boxes: Vec<Vec<usize>>,
    },
    Chow {
        #[serde(default = "default_eps")]
        eps: Vec<f64>,
        g: ConvexSpec,
        #[serde(default = "default_weights")]
        weights: ArraySpec,
    },
    ChowConvergenceTrend {
        boxes: Vec<Vec<usize>>,
        g: ConvexSpec,
        #[serde(default = "default_weights")]
        weights: ArraySpec,
        #[serde(default = "default_one")]
        p: f64,
        delta: f64,
    },
    HajekRenyi {
        #[serde(default = "default_eps")]
        eps: Vec<f64>,
        #[serde(default = "default_weights")]
        weights: ArraySpec,
    },
    OrliczProb {
        lambda: Vec<f64>,
        x: f64,
    },
    OrliczMoment {
        bound: OrliczBound,
        #[serde(default)]
        phi: Option<OrliczSpec>,
        #[serde(default)]
        a: Option<f64>,
        #[serde(default)]
        b: Option<f64>,
        #[serde(default)]
        lambda: Option<f64>,
        #[serde(default)]
        gamma: Option<f64>,
        #[serde(default)]
        r: Option<f64>,
        #[serde(default)]
        m: Option<u32>,
    },
    UpcrossBound {
        #[serde(default)]
        directions: Option<Vec<usize>>,
        a: f64,
        b: f64,
    },
    Whittle {
        variant: WhittleVariant,
        phi: ConvexSpec,
        #[serde(default = "default_psi")]
        psi: ScalarSpec,
        #[serde(default = "default_u")]
        u: ArraySpec,
        #[serde(default = "default_eps")]
        eps: Vec<f64>,
    },
    WhittleTrend {
        boxes: Vec<Vec<usize>>,
        phi: ConvexSpec,
        psi: ScalarSpec,
        #[serde(default = "default_u")]
        u: ArraySpec,
        #[serde(default = "default_one")]
        eps: f64,
    },
    /// A deliberately false inequality, `E|S_n| <= 0`.
    NegativeControl {},
}

/// Every theorem id accepted in configs and on the command line.
pub const THEOREM_IDS: &[&str] = &[
    "cairoli_moment",
    "cairoli_prob",
    "doob_indicator",
    "rank_order",
    "moment_corollary",
    "harremoes",
    "limsup_trend",
    "chow",
    "chow_convergence_trend",
    "hajek_renyi",
    "orlicz_prob",
    "orlicz_moment",
    "upcross_bound",
    "whittle",
    "whittle_trend",
    "negative_control",
];

impl Theorem {
    pub fn id(&self) -> &'static str {
        match self {
            Theorem::CairoliMoment { .. } => "cairoli_moment",
            Theorem::CairoliProb { .. } => "cairoli_prob",
            Theorem::DoobIndicator { .. } => "doob_indicator",
            Theorem::RankOrder { .. } => "rank_order",
            Theorem::MomentCorollary { .. } => "moment_corollary",
            Theorem::Harremoes { .. } => "harremoes",
            Theorem::LimsupTrend { .. } => "limsup_trend",
            Theorem::Chow { .. } => "chow",
            Theorem::ChowConvergenceTrend { .. } => "chow_convergence_trend",
            Theorem::HajekRenyi { .. } => "hajek_renyi",
            Theorem::OrliczProb { .. } => "orlicz_prob",
            Theorem::OrliczMoment { .. } => "orlicz_moment",
            Theorem::UpcrossBound { .. } => "upcross_bound",
            Theorem::Whittle { .. } => "whittle",
            Theorem::WhittleTrend { .. } => "whittle_trend",
            Theorem::NegativeControl {} => "negative_control",
        }
    }
}

/// One check: a generator, a theorem with parameters, and MC settings.
/// Missing `replicates`, `seed` and `z` are filled in by the caller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub generator: GeneratorSpec,
    #[serde(flatten)]
    pub theorem: Theorem,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicates: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckOutcome {
    Inequalities { reports: Vec<InequalityReport> },
    Trend { report: TrendReport },
}

impl CheckOutcome {
    pub fn reports(&self) -> &[InequalityReport] {
        match self {
            CheckOutcome::Inequalities { reports } => reports,
            CheckOutcome::Trend { .. } => &[],
        }
    }

    pub fn trend(&self) -> Option<&TrendReport> {
        match self {
            CheckOutcome::Trend { report } => Some(report),
            CheckOutcome::Inequalities { .. } => None,
        }
    }

    pub fn into_reports(self) -> Vec<InequalityReport> {
        match self {
            CheckOutcome::Inequalities { reports } => reports,
            CheckOutcome::Trend { .. } => Vec::new(),
        }
    }
}

impl CheckConfig {
    pub fn new(generator: GeneratorSpec, theorem: Theorem) -> Self {
        Self { generator, theorem, replicates: None, seed: None, z: None }
    }

    pub fn replicates(mut self, r: usize) -> Self {
        self.replicates = Some(r);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn z(mut self, z: f64) -> Self {
        self.z = Some(z);
        self
    }

    /// Runs the check, using `fallback_seed` when the config has no seed.
    pub fn run(&self, fallback_seed: u64) -> Result<CheckOutcome> {
        let replicates = self.replicates.unwrap_or(DEFAULT_REPLICATES);
        let z = self.z.unwrap_or(DEFAULT_Z);
        if replicates < 2 {
            return Err(Error::Config(format!("replicates must be >= 2, got {replicates}")));
        }
        if !(z.is_finite() && z > 0.0) {
            return Err(Error::Config(format!("z must be > 0, got {z}")));
        }
        self.generator.validate()?;
        let mut echo = serde_json::to_value(self).map_err(|e| Error::Config(e.to_string()))?;
        let seed = self.seed.unwrap_or(fallback_seed);
        if let Value::Object(map) = &mut echo {
            map.insert("replicates".into(), replicates.into());
            map.insert("seed".into(), seed.into());
            map.insert("z".into(), z.into());
        }
        let run = Run {
            theorem: self.theorem.id(),
            spec: &self.generator,
            replicates,
            seed,
            z,
            params: echo,
        };
        let ineq = |r: Result<Vec<InequalityReport>>| r.map(|reports| CheckOutcome::Inequalities { reports });
        let trend = |r: Result<TrendReport>| r.map(|report| CheckOutcome::Trend { report });
        match &self.theorem {
            Theorem::CairoliMoment { p } => ineq(maximal::cairoli_moment(&run, *p)),
            Theorem::CairoliProb { eps } => ineq(maximal::cairoli_prob(&run, eps)),
            Theorem::DoobIndicator { eps, extremum } => ineq(maximal::doob_indicator(&run, eps, *extremum)),
            Theorem::RankOrder { j, g, eps } => ineq(maximal::rank_order(&run, *j, g, eps)),
            Theorem::MomentCorollary { p } => ineq(maximal::moment_corollary(&run, *p)),
            Theorem::Harremoes { c } => ineq(maximal::harremoes(&run, *c)),
            Theorem::NegativeControl {} => ineq(maximal::negative_control(&run)),
            Theorem::Chow { eps, g, weights } => ineq(chow::chow(&run, eps, g, weights)),
            Theorem::HajekRenyi { eps, weights } => ineq(chow::hajek_renyi(&run, eps, weights)),
            Theorem::OrliczProb { lambda, x } => ineq(orlicz::orlicz_prob(&run, lambda, *x)),
            Theorem::OrliczMoment { bound, phi, a, b, lambda, gamma, r, m } => ineq(orlicz::orlicz_moment(
                &run,
                *bound,
                &orlicz::MomentParams { phi: phi.clone(), a: *a, b: *b, lambda: *lambda, gamma: *gamma, r: *r, m: *m },
            )),
            Theorem::UpcrossBound { directions, a, b } => {
                ineq(crossing::upcross_bound(&run, directions.as_deref(), *a, *b))
            }
            Theorem::Whittle { variant, phi, psi, u, eps } => {
                ineq(crossing::whittle(&run, *variant, phi, psi, u, eps))
            }
            Theorem::LimsupTrend { boxes } => trend(trend::limsup_trend(&run, boxes)),
            Theorem::ChowConvergenceTrend { boxes, g, weights, p, delta } => {
                trend(trend::chow_convergence_trend(&run, boxes, g, weights, *p, *delta))
            }
            Theorem::WhittleTrend { boxes, phi, psi, u, eps } => {
                trend(trend::whittle_trend(&run, boxes, phi, psi, u, *eps))
            }
        }
    }
}

pub(crate) fn require_sign(spec: &GeneratorSpec, need: SignClass, theorem: &str) -> Result<()> {
    let have = spec.sign_class();
    let ok = match need {
        SignClass::Positive => have == SignClass::Positive,
        SignClass::Nonnegative => have != SignClass::Signed,
        SignClass::Signed => true,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Hypothesis(format!(
            "{theorem} needs a {} field; the generator is {have:?}",
            match need {
                SignClass::Positive => "positive",
                _ => "nonnegative",
            }
        )))
    }
}

pub(crate) fn require_positive_eps(eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return Err(Error::Config("empty eps grid".into()));
    }
    match eps.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        Some(e) => Err(Error::Domain(format!("eps must be > 0, got {e}"))),
        None => Ok(()),
    }
}

/// `S` at `(1, …, 1)` for models where it is fixed.
pub(crate) fn origin_value(spec: &GeneratorSpec) -> Option<f64> {
    match &spec.model {
        Model::ProductMartingale { c, .. } => Some(*c),
        Model::Fixed { values } => values.first().copied(),
        _ => None,
    }
}

/// Positions of the corner line in direction `s`, i.e. `(n; s; i)` for
/// `i = 1..n_s`.
pub(crate) fn corner_lines(spec: &GeneratorSpec) -> Result<Vec<Vec<usize>>> {
    (1..=spec.bx.dim()).map(|s| spec.bx.direction_line_positions(s)).collect()
}

#[cfg(test)]
mod tests;
