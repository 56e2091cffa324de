use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcs::quad::integrate;

const QUAD_TOL: f64 = 1e-9;
/// Geometric probe grid for grid-estimated constants.
pub const PROBE_LO: f64 = 1e-6;
pub const PROBE_HI: f64 = 1e6;
const PROBE_POINTS: usize = 1201;
/// A grid supremum above this is reported as infinite.
pub const INFINITE_CAP: f64 = 1e3;

/// Orlicz function: unbounded, nondecreasing, convex on `[0, ∞)`, `φ(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrliczSpec {
    /// `x^p`, `p >= 1`.
    Power { p: f64 },
    /// `x·ln(1 + x)`.
    XLog1p,
    /// `e^{rx} - 1`, `r > 0`.
    ExpMinusOne { r: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantSource {
    Analytic,
    GridEstimated,
}

/// A characteristic constant together with how it was obtained. An infinite
/// value serializes as `null`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constant {
    pub value: f64,
    pub source: ConstantSource,
}

impl Constant {
    pub fn analytic(value: f64) -> Self {
        Self { value, source: ConstantSource::Analytic }
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

impl OrliczSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            OrliczSpec::Power { p } if !(p.is_finite() && *p >= 1.0) => {
                Err(Error::InvalidFunction(format!("orlicz power needs p >= 1, got {p}")))
            }
            OrliczSpec::ExpMinusOne { r } if !(r.is_finite() && *r > 0.0) => {
                Err(Error::InvalidFunction(format!("exp_minus_one needs r > 0, got {r}")))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            OrliczSpec::Power { p } => x.max(0.0).powf(*p),
            OrliczSpec::XLog1p => {
                let x = x.max(0.0);
                x * x.ln_1p()
            }
            OrliczSpec::ExpMinusOne { r } => (r * x.max(0.0)).exp_m1(),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        match self {
            OrliczSpec::Power { p } => {
                if *p == 1.0 {
                    1.0
                } else {
                    p * x.powf(p - 1.0)
                }
            }
            OrliczSpec::XLog1p => x.ln_1p() + x / (1.0 + x),
            OrliczSpec::ExpMinusOne { r } => r * (r * x).exp(),
        }
    }

    /// Whether `φ'(r)/r` is integrable at 0.
    pub fn integrable_at_zero(&self) -> bool {
        match self {
            OrliczSpec::Power { p } => *p > 1.0,
            OrliczSpec::XLog1p => true,
            OrliczSpec::ExpMinusOne { .. } => false,
        }
    }

    /// `x φ'(x) / φ(x)`, evaluated stably.
    pub fn elasticity(&self, x: f64) -> f64 {
        match self {
            OrliczSpec::Power { p } => *p,
            OrliczSpec::XLog1p => 1.0 + x / ((1.0 + x) * x.ln_1p()),
            OrliczSpec::ExpMinusOne { r } => {
                let rx = r * x;
                rx / -(-rx).exp_m1()
            }
        }
    }

    /// `(inf, sup)` of the elasticity over the geometric probe grid.
    pub fn grid_elasticity_range(&self) -> (f64, f64) {
        let ratio = (PROBE_HI / PROBE_LO).ln() / (PROBE_POINTS - 1) as f64;
        (0..PROBE_POINTS)
            .map(|i| self.elasticity(PROBE_LO * (ratio * i as f64).exp()))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| (lo.min(e), hi.max(e)))
    }

    fn check_a(&self, a: f64) -> Result<()> {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::Domain(format!("a must be >= 0, got {a}")));
        }
        if a == 0.0 && !self.integrable_at_zero() {
            return Err(Error::Domain(format!(
                "a = 0 requires phi'(r)/r integrable at 0, which fails for {}",
                self.label()
            )));
        }
        Ok(())
    }

    /// `Φ_a(x) = ∫_a^x ∫_a^s φ'(r)/r dr ds`, taken as 0 for `x <= a`.
    pub fn big_phi_a(&self, a: f64, x: f64) -> Result<f64> {
        self.check_a(a)?;
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::Domain(format!("x must be > 0, got {x}")));
        }
        if x <= a {
            return Ok(0.0);
        }
        match self {
            OrliczSpec::Power { p } if *p == 1.0 => Ok(x * (x / a).ln() - (x - a)),
            OrliczSpec::Power { p } => {
                let p = *p;
                Ok((x.powf(p) - a.powf(p)) / (p - 1.0) - p * a.powf(p - 1.0) * (x - a) / (p - 1.0))
            }
            _ => self.big_phi_a_quadrature(a, x),
        }
    }

    /// Quadrature route for `Φ_a`, through `∫_a^x (x - r) φ'(r)/r dr`.
    pub fn big_phi_a_quadrature(&self, a: f64, x: f64) -> Result<f64> {
        self.check_a(a)?;
        if x <= a {
            return Ok(0.0);
        }
        integrate(|r| (x - r) * self.derivative(r) / r, a, x, QUAD_TOL)
    }

    /// Inner derivative `Φ_a'(b) = ∫_a^b φ'(r)/r dr` (0 for `b <= a`).
    pub fn big_phi_a_prime(&self, a: f64, b: f64) -> Result<f64> {
        self.check_a(a)?;
        if b <= a {
            return Ok(0.0);
        }
        match self {
            OrliczSpec::Power { p } if *p == 1.0 => Ok((b / a).ln()),
            OrliczSpec::Power { p } => Ok(p / (p - 1.0) * (b.powf(p - 1.0) - a.powf(p - 1.0))),
            _ => integrate(|r| self.derivative(r) / r, a, b, QUAD_TOL),
        }
    }

    /// `p_φ = inf_{x>0} x φ'(x)/φ(x)`.
    pub fn p_phi_inf(&self) -> Constant {
        match self {
            OrliczSpec::Power { p } => Constant::analytic(*p),
            // Both kinds tend to 1 (at ∞ and at 0 respectively) without attaining it.
            OrliczSpec::XLog1p | OrliczSpec::ExpMinusOne { .. } => Constant::analytic(1.0),
        }
    }

    /// `p*_φ = sup_{x>0} x φ'(x)/φ(x)`; infinite when `φ` is not moderate.
    pub fn p_phi_star(&self) -> Constant {
        match self {
            OrliczSpec::Power { p } => Constant::analytic(*p),
            _ => {
                let (_, hi) = self.grid_elasticity_range();
                Constant {
                    value: if hi > INFINITE_CAP { f64::INFINITY } else { hi },
                    source: ConstantSource::GridEstimated,
                }
            }
        }
    }

    /// `q_φ = p_φ / (p_φ - 1)`; requires `p_φ > 1`.
    pub fn q_phi(&self) -> Result<Constant> {
        let p = self.p_phi_inf();
        if p.value <= 1.0 {
            return Err(Error::Hypothesis(format!(
                "q_phi needs p_phi > 1, but p_phi = {} for {}",
                p.value,
                self.label()
            )));
        }
        Ok(Constant { value: p.value / (p.value - 1.0), source: p.source })
    }

    pub fn is_moderate(&self) -> bool {
        !self.p_phi_star().is_infinite()
    }

    pub fn label(&self) -> String {
        match self {
            OrliczSpec::Power { p } => format!("x^{p}"),
            OrliczSpec::XLog1p => "x ln(1+x)".into(),
            OrliczSpec::ExpMinusOne { r } => format!("exp({r}x)-1"),
        }
    }
}
