//! Random-field models whose partial sums or products are multiindexed
//! demi(sub)martingales.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::harness::rng::Stream;
use crate::lattice::{LatticeBox, MultiIndex};

pub const DEFAULT_LOGNORMAL_SIGMA: f64 = 0.5;

/// Innovation / multiplier distribution.
///
/// Additive models use the analytically centered version (mean exactly 0);
/// the product model uses the positive mean-one version.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dist {
    Normal,
    /// Exp(1): centered as `E - 1` in additive models, raw in the product model.
    Exponential,
    Rademacher,
    /// `exp(σZ - σ²/2)`, mean one; additive models subtract 1.
    Lognormal { sigma: f64 },
    /// Point mass.
    Degenerate { value: f64 },
}

impl Dist {
    fn name(&self) -> &'static str {
        match self {
            Dist::Normal => "normal",
            Dist::Exponential => "exponential",
            Dist::Rademacher => "rademacher",
            Dist::Lognormal { .. } => "lognormal",
            Dist::Degenerate { .. } => "degenerate",
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Dist::Lognormal { sigma } if !(sigma.is_finite() && sigma >= 0.0) => Err(
                Error::InvalidDistribution(format!("lognormal sigma must be finite and >= 0, got {sigma}")),
            ),
            Dist::Degenerate { value } if !value.is_finite() => Err(Error::InvalidDistribution(
                "degenerate value must be finite".into(),
            )),
            _ => Ok(()),
        }
    }

    fn validate_additive(&self) -> Result<()> {
        self.validate()?;
        if let Dist::Degenerate { value } = *self {
            if value != 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "additive models need mean-zero innovations; degenerate value must be 0, got {value}"
                )));
            }
        }
        Ok(())
    }

    fn validate_multiplier(&self) -> Result<()> {
        self.validate()?;
        match *self {
            Dist::Normal | Dist::Rademacher => Err(Error::InvalidDistribution(format!(
                "{} multipliers are not positive",
                self.name()
            ))),
            Dist::Degenerate { value } if value != 1.0 => Err(Error::InvalidDistribution(format!(
                "multipliers need mean one; degenerate value must be 1, got {value}"
            ))),
            _ => Ok(()),
        }
    }

    /// Mean-zero innovation.
    pub fn innovation(&self, rng: &mut Stream) -> f64 {
        match *self {
            Dist::Normal => rng.normal(),
            Dist::Exponential => rng.exponential() - 1.0,
            Dist::Rademacher => rng.rademacher(),
            Dist::Lognormal { sigma } => (sigma * rng.normal() - 0.5 * sigma * sigma).exp() - 1.0,
            Dist::Degenerate { value } => value,
        }
    }

    /// Positive mean-one multiplier.
    pub fn multiplier(&self, rng: &mut Stream) -> f64 {
        match *self {
            Dist::Exponential => rng.exponential(),
            Dist::Lognormal { sigma } => (sigma * rng.normal() - 0.5 * sigma * sigma).exp(),
            Dist::Degenerate { value } => value,
            Dist::Normal | Dist::Rademacher => unreachable!("validated as positive"),
        }
    }

    /// Variance of the centered innovation.
    pub fn innovation_variance(&self) -> f64 {
        match *self {
            Dist::Normal | Dist::Exponential | Dist::Rademacher => 1.0,
            Dist::Lognormal { sigma } => (sigma * sigma).exp() - 1.0,
            Dist::Degenerate { .. } => 0.0,
        }
    }
}

/// Finite nonnegative kernel for the moving-average model, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    shape: Vec<usize>,
    taps: Vec<f64>,
}

impl Kernel {
    pub fn new(shape: Vec<usize>, taps: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::InvalidGenerator("kernel shape must be nonempty".into()));
        }
        if shape.iter().product::<usize>() != taps.len() {
            return Err(Error::InvalidGenerator("kernel taps do not fill its shape".into()));
        }
        if taps.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidGenerator(
                "kernel taps must be finite and >= 0 (association requires it)".into(),
            ));
        }
        Ok(Self { shape, taps })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    fn from_json(v: &Value) -> Result<Self> {
        let mut shape = Vec::new();
        let mut cur = v;
        while let Value::Array(items) = cur {
            if items.is_empty() {
                return Err(Error::InvalidGenerator("empty kernel array".into()));
            }
            shape.push(items.len());
            cur = &items[0];
        }
        let mut taps = Vec::new();
        flatten(v, &shape, &mut taps)?;
        Kernel::new(shape, taps)
    }

    fn to_json(&self) -> Value {
        fn build(shape: &[usize], taps: &[f64]) -> Value {
            if shape.is_empty() {
                return Value::from(taps[0]);
            }
            let step = taps.len() / shape[0];
            Value::Array((0..shape[0]).map(|i| build(&shape[1..], &taps[i * step..(i + 1) * step])).collect())
        }
        build(&self.shape, &self.taps)
    }
}

fn flatten(v: &Value, shape: &[usize], out: &mut Vec<f64>) -> Result<()> {
    match (v, shape.split_first()) {
        (Value::Array(items), Some((&n, rest))) if items.len() == n => {
            items.iter().try_for_each(|it| flatten(it, rest, out))
        }
        (Value::Number(x), None) => {
            out.push(x.as_f64().expect("json number"));
            Ok(())
        }
        _ => Err(Error::InvalidGenerator("kernel must be a rectangular nested array of numbers".into())),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    /// `S_n = Σ_{i<=n} X_i` with iid centered `X`.
    IidPartialSum { dist: Dist },
    /// `S_n = Σ_{i<=n} X_i` with `X_i = Σ_t K_t ε_{i-t}`, `K >= 0`.
    MovingAverage { kernel: Kernel, dist: Dist },
    /// `S_n = ∏_{i<=n} W_i`, independent positive mean-one `W`, `W_(1..1) = c`.
    ProductMartingale { dist: Dist, c: f64 },
    /// A deterministic field given by its values in box order (fixtures and
    /// negative controls).
    Fixed { values: Vec<f64> },
}

/// A random-field model on a box. JSON form:
/// `{"model": "...", "dist": "...", "box": [..], "kernel": [[..]], "c": 0.5}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeneratorJson", into = "GeneratorJson")]
pub struct GeneratorSpec {
    pub model: Model,
    pub bx: LatticeBox,
}

/// Sign class of every realization, used to gate theorems that need
/// positive or nonnegative fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignClass {
    Positive,
    Nonnegative,
    Signed,
}

impl GeneratorSpec {
    pub fn new(model: Model, bx: LatticeBox) -> Result<Self> {
        let spec = Self { model, bx };
        spec.validate()?;
        Ok(spec)
    }

    pub fn iid(dist: Dist, dims: &[usize]) -> Result<Self> {
        Self::new(Model::IidPartialSum { dist }, LatticeBox::from_dims(dims)?)
    }

    pub fn product(dist: Dist, c: f64, dims: &[usize]) -> Result<Self> {
        Self::new(Model::ProductMartingale { dist, c }, LatticeBox::from_dims(dims)?)
    }

    pub fn fixed(values: Vec<f64>, dims: &[usize]) -> Result<Self> {
        Self::new(Model::Fixed { values }, LatticeBox::from_dims(dims)?)
    }

    pub fn constant(value: f64, dims: &[usize]) -> Result<Self> {
        let n = dims.iter().product();
        Self::fixed(vec![value; n], dims)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.model {
            Model::IidPartialSum { dist } => dist.validate_additive(),
            Model::MovingAverage { kernel, dist } => {
                dist.validate_additive()?;
                if kernel.shape.len() != self.bx.dim() {
                    return Err(Error::InvalidGenerator(format!(
                        "kernel is {}-dimensional but the box is {}-dimensional",
                        kernel.shape.len(),
                        self.bx.dim()
                    )));
                }
                Ok(())
            }
            Model::ProductMartingale { dist, c } => {
                dist.validate_multiplier()?;
                if !(c.is_finite() && *c > 0.0) {
                    return Err(Error::InvalidGenerator(format!("origin value c must be > 0, got {c}")));
                }
                Ok(())
            }
            Model::Fixed { values } => {
                if values.len() != self.bx.len() {
                    return Err(Error::InvalidGenerator(format!(
                        "fixed field has {} values for a box of {} cells",
                        values.len(),
                        self.bx.len()
                    )));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidGenerator("fixed field values must be finite".into()));
                }
                Ok(())
            }
        }
    }

    /// Same model on a different box. Fixed fields cannot be resized.
    pub fn with_box(&self, bx: LatticeBox) -> Result<Self> {
        if matches!(self.model, Model::Fixed { .. }) && bx != self.bx {
            return Err(Error::InvalidGenerator("a fixed field cannot be resized".into()));
        }
        Self::new(self.model.clone(), bx)
    }

    pub fn sign_class(&self) -> SignClass {
        match &self.model {
            Model::ProductMartingale { .. } => SignClass::Positive,
            Model::Fixed { values } if values.iter().all(|&v| v > 0.0) => SignClass::Positive,
            Model::Fixed { values } if values.iter().all(|&v| v >= 0.0) => SignClass::Nonnegative,
            Model::IidPartialSum { dist: Dist::Degenerate { .. } } => SignClass::Nonnegative,
            Model::MovingAverage { dist: Dist::Degenerate { .. }, .. } => SignClass::Nonnegative,
            _ => SignClass::Signed,
        }
    }

    /// True for models built from independent or nonnegative-kernel
    /// associated mean-zero increments.
    pub fn has_associated_increments(&self) -> bool {
        matches!(self.model, Model::IidPartialSum { .. } | Model::MovingAverage { .. })
    }

    pub fn is_deterministic(&self) -> bool {
        match &self.model {
            Model::Fixed { .. } => true,
            Model::IidPartialSum { dist } | Model::MovingAverage { dist, .. } => {
                matches!(dist, Dist::Degenerate { .. })
            }
            Model::ProductMartingale { dist, .. } => matches!(dist, Dist::Degenerate { .. }),
        }
    }

    /// Increments `X` over the box for the additive models.
    pub fn sample_increments(&self, rng: &mut Stream) -> Result<Vec<f64>> {
        match &self.model {
            Model::IidPartialSum { dist } => Ok((0..self.bx.len()).map(|_| dist.innovation(rng)).collect()),
            Model::MovingAverage { kernel, dist } => Ok(moving_average(&self.bx, kernel, dist, rng)),
            _ => Err(Error::InvalidGenerator("only additive models have increments".into())),
        }
    }

    /// One realization drawn from `rng`.
    pub fn sample_with(&self, rng: &mut Stream) -> FieldSample {
        match &self.model {
            Model::IidPartialSum { .. } | Model::MovingAverage { .. } => {
                let x = self.sample_increments(rng).expect("additive model");
                partial_sums(&self.bx, x).expect("sized to the box")
            }
            Model::ProductMartingale { dist, c } => {
                let mut w: Vec<f64> = Vec::with_capacity(self.bx.len());
                w.push(*c);
                w.extend((1..self.bx.len()).map(|_| dist.multiplier(rng)));
                let mut values = w;
                sweep(&self.bx, &mut values, |acc, x| acc * x);
                FieldSample { bx: self.bx.clone(), values }
            }
            Model::Fixed { values } => FieldSample {
                bx: self.bx.clone(),
                values: values.clone(),
            },
        }
    }
}

/// Deterministic realization for `(spec, seed)`.
pub fn sample_field(spec: &GeneratorSpec, seed: u64) -> Result<FieldSample> {
    spec.validate()?;
    Ok(spec.sample_with(&mut Stream::from_seed(seed)))
}

fn moving_average(bx: &LatticeBox, kernel: &Kernel, dist: &Dist, rng: &mut Stream) -> Vec<f64> {
    let k = bx.dim();
    let ext_dims: Vec<usize> = bx.dims().iter().zip(kernel.shape()).map(|(n, m)| n + m - 1).collect();
    let ext = LatticeBox::from_dims(&ext_dims).expect("positive dims");
    let eps: Vec<f64> = (0..ext.len()).map(|_| dist.innovation(rng)).collect();
    let kbox = LatticeBox::from_dims(kernel.shape()).expect("positive dims");
    let offsets: Vec<(Vec<usize>, f64)> = kbox
        .iter()
        .zip(kernel.taps())
        .filter(|(_, &t)| t != 0.0)
        .map(|(idx, &t)| (idx.coords().iter().map(|c| c - 1).collect(), t))
        .collect();
    let mut out = Vec::with_capacity(bx.len());
    let mut coords = vec![0usize; k];
    for idx in bx.iter() {
        let mut x = 0.0;
        for (off, tap) in &offsets {
            // Innovation at (i - 1) + (m - 1) - t in 0-based extended coordinates.
            for d in 0..k {
                coords[d] = idx.coords()[d] + kernel.shape()[d] - 1 - off[d];
            }
            x += tap * eps[ext.linear_of(&coords).expect("inside extended box")];
        }
        out.push(x);
    }
    out
}

/// In-place running reduction along each dimension in turn.
fn sweep(bx: &LatticeBox, values: &mut [f64], op: impl Fn(f64, f64) -> f64) {
    let dims = bx.dims();
    let strides = bx.strides();
    for d in 0..bx.dim() {
        let st = strides[d];
        for pos in 0..values.len() {
            if (pos / st) % dims[d] != 0 {
                values[pos] = op(values[pos - st], values[pos]);
            }
        }
    }
}

/// `S_n = Σ_{i<=n} X_i`, one running-sum pass per dimension.
pub fn partial_sums(bx: &LatticeBox, increments: Vec<f64>) -> Result<FieldSample> {
    if increments.len() != bx.len() {
        return Err(Error::DimensionMismatch {
            expected: bx.len(),
            got: increments.len(),
        });
    }
    let mut values = increments;
    sweep(bx, &mut values, |acc, x| acc + x);
    Ok(FieldSample { bx: bx.clone(), values })
}

/// One realization of `{S_i : i <= n}` stored in box order. Any index with a
/// zero coordinate reads as 0.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    bx: LatticeBox,
    values: Vec<f64>,
}

impl FieldSample {
    pub fn new(bx: LatticeBox, values: Vec<f64>) -> Result<Self> {
        if values.len() != bx.len() {
            return Err(Error::DimensionMismatch {
                expected: bx.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("field values must be finite".into()));
        }
        Ok(Self { bx, values })
    }

    pub fn bx(&self) -> &LatticeBox {
        &self.bx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `S` at `idx`; 0 on the boundary.
    ///
    /// # Panics
    /// If `idx` has no zero coordinate and lies outside the box.
    pub fn value(&self, idx: &MultiIndex) -> f64 {
        self.value_at(idx.coords())
    }

    pub fn value_at(&self, coords: &[usize]) -> f64 {
        if coords.contains(&0) {
            return 0.0;
        }
        let pos = self
            .bx
            .linear_of(coords)
            .unwrap_or_else(|| panic!("index {coords:?} outside box {}", self.bx));
        self.values[pos]
    }

    /// Value at the far corner `n`.
    pub fn corner(&self) -> f64 {
        *self.values.last().expect("nonempty box")
    }

    /// CSV dump: one row per lattice index (coordinates, then value).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let header: Vec<String> = (1..=self.bx.dim()).map(|d| format!("i{d}")).collect();
        writeln!(w, "{},value", header.join(","))?;
        for (idx, v) in self.bx.iter().zip(&self.values) {
            let coords: Vec<String> = idx.coords().iter().map(|c| c.to_string()).collect();
            writeln!(w, "{},{v}", coords.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GeneratorJson {
    model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dist: Option<String>,
    #[serde(rename = "box")]
    bx: LatticeBox,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kernel: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
}

fn parse_dist(j: &GeneratorJson) -> Result<Dist> {
    let name = j
        .dist
        .as_deref()
        .ok_or_else(|| Error::InvalidGenerator(format!("model {} needs a dist", j.model)))?;
    match name {
        "normal" => Ok(Dist::Normal),
        "exponential" => Ok(Dist::Exponential),
        "rademacher" => Ok(Dist::Rademacher),
        "lognormal" => Ok(Dist::Lognormal {
            sigma: j.sigma.unwrap_or(DEFAULT_LOGNORMAL_SIGMA),
        }),
        "degenerate" => Ok(Dist::Degenerate {
            value: j
                .value
                .ok_or_else(|| Error::InvalidDistribution("degenerate needs a value".into()))?,
        }),
        other => Err(Error::InvalidDistribution(format!("unknown dist {other:?}"))),
    }
}

impl TryFrom<GeneratorJson> for GeneratorSpec {
    type Error = Error;

    fn try_from(j: GeneratorJson) -> Result<Self> {
        let model = match j.model.as_str() {
            "iid_partial_sum" => Model::IidPartialSum { dist: parse_dist(&j)? },
            "moving_average" => Model::MovingAverage {
                kernel: Kernel::from_json(
                    j.kernel
                        .as_ref()
                        .ok_or_else(|| Error::InvalidGenerator("moving_average needs a kernel".into()))?,
                )?,
                dist: parse_dist(&j)?,
            },
            "product_martingale" => Model::ProductMartingale {
                dist: parse_dist(&j)?,
                c: j.c.unwrap_or(1.0),
            },
            "fixed" => Model::Fixed {
                values: j
                    .values
                    .clone()
                    .ok_or_else(|| Error::InvalidGenerator("fixed needs values".into()))?,
            },
            other => return Err(Error::InvalidGenerator(format!("unknown model {other:?}"))),
        };
        GeneratorSpec::new(model, j.bx)
    }
}

impl From<GeneratorSpec> for GeneratorJson {
    fn from(g: GeneratorSpec) -> Self {
        let mut j = GeneratorJson {
            model: String::new(),
            dist: None,
            bx: g.bx,
            kernel: None,
            c: None,
            sigma: None,
            value: None,
            values: None,
        };
        let set_dist = |j: &mut GeneratorJson, d: &Dist| {
            j.dist = Some(d.name().to_string());
            match *d {
                Dist::Lognormal { sigma } => j.sigma = Some(sigma),
                Dist::Degenerate { value } => j.value = Some(value),
                _ => {}
            }
        };
        match &g.model {
            Model::IidPartialSum { dist } => {
                j.model = "iid_partial_sum".into();
                set_dist(&mut j, dist);
            }
            Model::MovingAverage { kernel, dist } => {
                j.model = "moving_average".into();
                j.kernel = Some(kernel.to_json());
                set_dist(&mut j, dist);
            }
            Model::ProductMartingale { dist, c } => {
                j.model = "product_martingale".into();
                j.c = Some(*c);
                set_dist(&mut j, dist);
            }
            Model::Fixed { values } => {
                j.model = "fixed".into();
                j.values = Some(values.clone());
            }
        }
        j
    }
}
