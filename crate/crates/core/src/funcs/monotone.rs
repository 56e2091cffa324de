use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcs::quad::integrate;

const QUAD_TOL: f64 = 1e-9;

/// Nondecreasing `g` on the real line with `g(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NondecreasingSpec {
    Identity,
    /// `(x⁺)^p`, `p > 0`.
    PositivePartPower { p: f64 },
    /// `1(x >= eps)`, `eps > 0`.
    Step { eps: f64 },
    /// `atan(x)`; its Stieltjes integral goes through quadrature.
    Atan,
}

impl NondecreasingSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            NondecreasingSpec::PositivePartPower { p } if !(p.is_finite() && *p > 0.0) => {
                Err(Error::InvalidFunction(format!("positive_part_power needs p > 0, got {p}")))
            }
            NondecreasingSpec::Step { eps } if !(eps.is_finite() && *eps > 0.0) => {
                Err(Error::InvalidFunction(format!("step needs eps > 0, got {eps}")))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            NondecreasingSpec::Identity => x,
            NondecreasingSpec::PositivePartPower { p } => x.max(0.0).powf(*p),
            NondecreasingSpec::Step { eps } => f64::from(x >= *eps),
            NondecreasingSpec::Atan => x.atan(),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        !matches!(self, NondecreasingSpec::Identity | NondecreasingSpec::Atan)
    }

    /// `∫_0^x u dg(u)`, oriented so that for `x < 0` it equals
    /// `-∫_x^0 u dg(u)` (nonnegative, since `u <= 0` and `dg >= 0`).
    pub fn integral_u_dg(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("integral_u_dg at {x}")));
        }
        Ok(match self {
            NondecreasingSpec::Identity => 0.5 * x * x,
            NondecreasingSpec::PositivePartPower { p } => {
                if x <= 0.0 {
                    0.0
                } else {
                    p / (p + 1.0) * x.powf(p + 1.0)
                }
            }
            NondecreasingSpec::Step { eps } => {
                if x >= *eps {
                    *eps
                } else {
                    0.0
                }
            }
            NondecreasingSpec::Atan => integrate(|u| u / (1.0 + u * u), 0.0, x, QUAD_TOL)?,
        })
    }

    /// Quadrature twin of [`integral_u_dg`](Self::integral_u_dg) for the
    /// absolutely continuous kinds.
    pub fn integral_u_dg_quadrature(&self, x: f64) -> Result<f64> {
        let density = |u: f64| -> f64 {
            match self {
                NondecreasingSpec::Identity => 1.0,
                NondecreasingSpec::PositivePartPower { p } => {
                    if u <= 0.0 {
                        0.0
                    } else {
                        p * u.powf(p - 1.0)
                    }
                }
                NondecreasingSpec::Atan => 1.0 / (1.0 + u * u),
                NondecreasingSpec::Step { .. } => unreachable!(),
            }
        };
        if let NondecreasingSpec::Step { .. } = self {
            return Err(Error::InvalidFunction("step has no density".into()));
        }
        integrate(|u| u * density(u), 0.0, x, QUAD_TOL)
    }

    pub fn label(&self) -> String {
        match self {
            NondecreasingSpec::Identity => "u".into(),
            NondecreasingSpec::PositivePartPower { p } => format!("(u+)^{p}"),
            NondecreasingSpec::Step { eps } => format!("1(u>={eps})"),
            NondecreasingSpec::Atan => "atan(u)".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(NondecreasingSpec::Identity.integral_u_dg(2.0).unwrap(), 2.0);
        let step = NondecreasingSpec::Step { eps: 0.5 };
        assert_eq!(step.integral_u_dg(2.0).unwrap(), 0.5);
        assert_eq!(step.integral_u_dg(0.3).unwrap(), 0.0);
        assert_eq!(step.integral_u_dg(-1.0).unwrap(), 0.0);
        assert_eq!(NondecreasingSpec::Identity.integral_u_dg(-2.0).unwrap(), 2.0);
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let kinds = [
            NondecreasingSpec::Identity,
            NondecreasingSpec::PositivePartPower { p: 0.5 },
            NondecreasingSpec::PositivePartPower { p: 2.0 },
            NondecreasingSpec::Atan,
        ];
        for g in &kinds {
            g.validate().unwrap();
            for x in [-3.0, -0.2, 0.0, 0.7, 2.0, 9.0] {
                let a = g.integral_u_dg(x).unwrap();
                let b = g.integral_u_dg_quadrature(x).unwrap();
                assert!((a - b).abs() < 1e-8, "{} at {x}: {a} vs {b}", g.label());
            }
        }
        // atan closed form: ln(1 + x²)/2.
        let v = NondecreasingSpec::Atan.integral_u_dg(3.0).unwrap();
        assert!((v - 0.5 * 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn validation() {
        assert!(NondecreasingSpec::Step { eps: 0.0 }.validate().is_err());
        assert!(NondecreasingSpec::PositivePartPower { p: -1.0 }.validate().is_err());
        let g: NondecreasingSpec = serde_json::from_str(r#"{"kind":"step","eps":0.5}"#).unwrap();
        assert_eq!(g, NondecreasingSpec::Step { eps: 0.5 });
    }
}
