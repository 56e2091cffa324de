use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeBox;

/// How to build an array over a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArraySpec {
    Constant { value: f64 },
    /// `(∏ n_i)^power`.
    Product { power: f64 },
    /// Values in box order.
    Explicit { values: Vec<f64> },
}

impl ArraySpec {
    fn build(&self, bx: &LatticeBox) -> Result<Vec<f64>> {
        Ok(match self {
            ArraySpec::Constant { value } => vec![*value; bx.len()],
            ArraySpec::Product { power } => bx
                .iter()
                .map(|i| (i.coords().iter().product::<usize>() as f64).powf(*power))
                .collect(),
            ArraySpec::Explicit { values } => {
                if values.len() != bx.len() {
                    return Err(Error::DimensionMismatch { expected: bx.len(), got: values.len() });
                }
                values.clone()
            }
        })
    }
}

/// Checks `v_i <= v_j` (or `>=`) for every neighbour pair `j = i + e_s`,
/// which implies it for every comparable pair.
fn monotone_along_box(bx: &LatticeBox, v: &[f64], nondecreasing: bool) -> Option<(usize, usize)> {
    let strides = bx.strides();
    for (pos, idx) in bx.iter().enumerate() {
        for s in 0..bx.dim() {
            if idx.coords()[s] < bx.dims()[s] {
                let next = pos + strides[s];
                let ok = if nondecreasing { v[pos] <= v[next] } else { v[pos] >= v[next] };
                if !ok {
                    return Some((pos, next));
                }
            }
        }
    }
    None
}

/// Positive weights, nonincreasing along every direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightArray {
    bx: LatticeBox,
    values: Vec<f64>,
}

impl WeightArray {
    pub fn new(bx: LatticeBox, values: Vec<f64>) -> Result<Self> {
        if values.len() != bx.len() {
            return Err(Error::DimensionMismatch { expected: bx.len(), got: values.len() });
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidFunction(format!("weights must be positive, got {v}")));
        }
        if let Some((a, b)) = monotone_along_box(&bx, &values, false) {
            return Err(Error::InvalidFunction(format!(
                "weights must be nonincreasing: c{} = {} < c{} = {}",
                bx.index_at(a),
                values[a],
                bx.index_at(b),
                values[b]
            )));
        }
        Ok(Self { bx, values })
    }

    pub fn from_spec(spec: &ArraySpec, bx: &LatticeBox) -> Result<Self> {
        Self::new(bx.clone(), spec.build(bx)?)
    }

    pub fn ones(bx: &LatticeBox) -> Self {
        Self { bx: bx.clone(), values: vec![1.0; bx.len()] }
    }

    pub fn bx(&self) -> &LatticeBox {
        &self.bx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Positive scalar function `ψ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarSpec {
    /// `u^p`, `p > 0`.
    Power { p: f64 },
    Constant { value: f64 },
}

impl ScalarSpec {
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            ScalarSpec::Power { p } => u.powf(*p),
            ScalarSpec::Constant { value } => *value,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, ScalarSpec::Power { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            ScalarSpec::Power { p } => p.is_finite() && *p > 0.0,
            ScalarSpec::Constant { value } => value.is_finite() && *value > 0.0,
        };
        if !ok {
            return Err(Error::InvalidFunction(format!("psi must be positive nondecreasing: {self:?}")));
        }
        let grid = super::probe_grid(1e-3, 1e3, 1000);
        let vals: Vec<f64> = grid.iter().map(|&u| self.eval(u)).collect();
        if vals.iter().any(|v| *v <= 0.0) || vals.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidFunction("psi fails positivity/monotonicity on the probe grid".into()));
        }
        Ok(())
    }
}

/// Thresholds `u` over a box with `0 < u_i <= u_j` for `i <= j`, plus `ψ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdSeq {
    bx: LatticeBox,
    u: Vec<f64>,
    psi: ScalarSpec,
}

impl ThresholdSeq {
    pub fn new(bx: LatticeBox, u: Vec<f64>, psi: ScalarSpec) -> Result<Self> {
        if u.len() != bx.len() {
            return Err(Error::DimensionMismatch { expected: bx.len(), got: u.len() });
        }
        if let Some(v) = u.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidFunction(format!("thresholds must be positive, got {v}")));
        }
        if let Some((a, b)) = monotone_along_box(&bx, &u, true) {
            return Err(Error::InvalidFunction(format!(
                "thresholds must be nondecreasing: u{} > u{}",
                bx.index_at(a),
                bx.index_at(b)
            )));
        }
        psi.validate()?;
        Ok(Self { bx, u, psi })
    }

    pub fn from_spec(u: &ArraySpec, psi: &ScalarSpec, bx: &LatticeBox) -> Result<Self> {
        Self::new(bx.clone(), u.build(bx)?, psi.clone())
    }

    pub fn bx(&self) -> &LatticeBox {
        &self.bx
    }

    pub fn psi(&self) -> &ScalarSpec {
        &self.psi
    }

    /// `ψ(u_i)` in box order.
    pub fn psi_values(&self) -> Vec<f64> {
        self.u.iter().map(|&u| self.psi.eval(u)).collect()
    }
}
