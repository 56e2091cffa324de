use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nonnegative convex `g` on the real line with `g(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexSpec {
    /// `|x|^p`, `p >= 1`.
    Power { p: f64 },
    /// `(x⁺)^p`, `p >= 1`.
    PositivePartPower { p: f64 },
    /// `x⁺`.
    IdentityOnNonneg,
    /// Continuous piecewise-linear with `g(0) = 0`; `slopes[i]` applies
    /// left of `breakpoints[i]`, the last slope right of the last breakpoint.
    PiecewiseLinear { breakpoints: Vec<f64>, slopes: Vec<f64> },
}

impl ConvexSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ConvexSpec::Power { p } | ConvexSpec::PositivePartPower { p } => {
                if !(p.is_finite() && *p >= 1.0) {
                    return Err(Error::InvalidFunction(format!("power needs p >= 1, got {p}")));
                }
            }
            ConvexSpec::IdentityOnNonneg => {}
            ConvexSpec::PiecewiseLinear { breakpoints, slopes } => {
                if slopes.len() != breakpoints.len() + 1 {
                    return Err(Error::InvalidFunction(format!(
                        "piecewise_linear needs {} slopes, got {}",
                        breakpoints.len() + 1,
                        slopes.len()
                    )));
                }
                if breakpoints.iter().chain(slopes).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidFunction("non-finite piecewise_linear data".into()));
                }
                if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidFunction("breakpoints must increase".into()));
                }
                if slopes.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Error::InvalidFunction("slopes must be nondecreasing".into()));
                }
                // Nonnegativity with g(0) = 0: 0 must be a minimiser.
                let left = breakpoints.iter().take_while(|&&b| b < 0.0).count();
                let right = breakpoints.iter().take_while(|&&b| b <= 0.0).count();
                if slopes[left] > 0.0 || slopes[right] < 0.0 {
                    return Err(Error::InvalidFunction(
                        "piecewise_linear must have 0 as a minimiser".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ConvexSpec::Power { p } => x.abs().powf(*p),
            ConvexSpec::PositivePartPower { p } => x.max(0.0).powf(*p),
            ConvexSpec::IdentityOnNonneg => x.max(0.0),
            ConvexSpec::PiecewiseLinear { breakpoints, slopes } => {
                // Integrate the slope function from 0 to x.
                let (lo, hi, sign) = if x >= 0.0 { (0.0, x, 1.0) } else { (x, 0.0, -1.0) };
                let mut acc = 0.0;
                let mut start = lo;
                for (seg, &slope) in slopes.iter().enumerate() {
                    let end = breakpoints.get(seg).copied().unwrap_or(f64::INFINITY).min(hi);
                    if end > start {
                        acc += slope * (end - start);
                        start = end;
                    }
                    if start >= hi {
                        break;
                    }
                }
                sign * acc
            }
        }
    }

    pub fn is_nondecreasing(&self) -> bool {
        match self {
            ConvexSpec::Power { .. } => false,
            ConvexSpec::PositivePartPower { .. } | ConvexSpec::IdentityOnNonneg => true,
            ConvexSpec::PiecewiseLinear { slopes, .. } => slopes[0] >= 0.0,
        }
    }

    pub fn label(&self) -> String {
        match self {
            ConvexSpec::Power { p } => format!("|x|^{p}"),
            ConvexSpec::PositivePartPower { p } => format!("(x+)^{p}"),
            ConvexSpec::IdentityOnNonneg => "x+".into(),
            ConvexSpec::PiecewiseLinear { .. } => "piecewise_linear".into(),
        }
    }
}
