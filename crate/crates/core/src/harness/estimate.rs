//! Streaming mean / standard-error accumulators with exact-order merging.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::engine::Merge;

/// An SE is trusted only when at least this many replicates are needed to
/// carry 90% of the absolute mass of the sample.
pub const MASS_CARRIER_CAP: usize = 30;
const MASS_FRACTION: f64 = 0.9;

/// Mean and standard error of a Monte-Carlo quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub n: u64,
    /// Number of largest-magnitude replicates carrying 90% of the absolute
    /// mass, capped at [`MASS_CARRIER_CAP`].
    pub mass_carriers: u32,
    /// False when the SE rests on too few effective samples.
    pub reliable: bool,
}

impl Estimate {
    /// A known constant: zero SE, always reliable.
    pub fn exact(value: f64, n: u64) -> Self {
        Self {
            mean: value,
            se: 0.0,
            n,
            mass_carriers: MASS_CARRIER_CAP as u32,
            reliable: true,
        }
    }
}

/// Welford single-pass accumulator; merges with Chan's pairwise update.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n > 1 {
            self.m2 / (self.n - 1) as f64
        } else {
            0.0
        }
    }

    pub fn se(&self) -> f64 {
        if self.n > 1 {
            (self.variance() / self.n as f64).sqrt()
        } else {
            0.0
        }
    }
}

impl Merge for Welford {
    fn merge(&mut self, other: Self) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let (na, nb) = (self.n as f64, other.n as f64);
        self.mean += delta * nb / n as f64;
        self.m2 += other.m2 + delta * delta * na * nb / n as f64;
        self.n = n;
    }
}

/// Joint accumulator over a fixed set of columns: means, the full co-moment
/// matrix and a heavy-tail diagnostic per column.
///
/// Both sides of an inequality are functions of column means, so their
/// paired difference has an SE available from the co-moments (delta method).
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnStats {
    n: u64,
    mean: Vec<f64>,
    comoment: Vec<f64>,
    abs_sum: Vec<f64>,
    top: Vec<Vec<f64>>,
}

impl ColumnStats {
    pub fn new(columns: usize) -> Self {
        Self {
            n: 0,
            mean: vec![0.0; columns],
            comoment: vec![0.0; columns * columns],
            abs_sum: vec![0.0; columns],
            top: vec![Vec::with_capacity(MASS_CARRIER_CAP); columns],
        }
    }

    pub fn columns(&self) -> usize {
        self.mean.len()
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn push(&mut self, row: &[f64]) {
        let m = self.columns();
        assert_eq!(row.len(), m, "row width must match column count");
        self.n += 1;
        let n = self.n as f64;
        let delta: Vec<f64> = row.iter().zip(&self.mean).map(|(x, mu)| x - mu).collect();
        for (mu, d) in self.mean.iter_mut().zip(&delta) {
            *mu += d / n;
        }
        for a in 0..m {
            let post = row[a] - self.mean[a];
            for b in 0..m {
                self.comoment[a * m + b] += delta[b] * post;
            }
        }
        for (c, &x) in row.iter().enumerate() {
            self.abs_sum[c] += x.abs();
            insert_top(&mut self.top[c], x.abs());
        }
    }

    pub fn mean(&self, c: usize) -> f64 {
        self.mean[c]
    }

    pub fn means(&self) -> &[f64] {
        &self.mean
    }

    pub fn covariance(&self, a: usize, b: usize) -> f64 {
        if self.n > 1 {
            self.comoment[a * self.columns() + b] / (self.n - 1) as f64
        } else {
            0.0
        }
    }

    /// SE of a smooth function of the column means with the given gradient.
    pub fn se_of(&self, grad: &[f64]) -> f64 {
        let m = self.columns();
        assert_eq!(grad.len(), m);
        if self.n < 2 {
            return 0.0;
        }
        let mut q = 0.0;
        for a in 0..m {
            if grad[a] == 0.0 {
                continue;
            }
            for b in 0..m {
                if grad[b] != 0.0 {
                    q += grad[a] * grad[b] * self.comoment[a * m + b];
                }
            }
        }
        let var = q.max(0.0) / ((self.n - 1) as f64 * self.n as f64);
        var.sqrt()
    }

    /// Heavy-tail diagnostic for one column.
    pub fn mass_carriers(&self, c: usize) -> usize {
        let total = self.abs_sum[c];
        if total == 0.0 {
            return MASS_CARRIER_CAP;
        }
        let mut acc = 0.0;
        for (m, v) in self.top[c].iter().enumerate() {
            acc += v;
            if acc >= MASS_FRACTION * total {
                return m + 1;
            }
        }
        MASS_CARRIER_CAP
    }

    /// Whether column `c`'s contribution to an SE can be trusted.
    pub fn column_reliable(&self, c: usize) -> bool {
        self.covariance(c, c) == 0.0 || self.mass_carriers(c) >= MASS_CARRIER_CAP
    }

    /// Estimate of a function of the means, given its value and gradient.
    /// Reliability and mass diagnostics are taken over columns the gradient touches.
    pub fn estimate_of(&self, value: f64, grad: &[f64]) -> Estimate {
        let touched = (0..self.columns()).filter(|&c| grad[c] != 0.0);
        let mut carriers = MASS_CARRIER_CAP;
        let mut reliable = true;
        for c in touched {
            if self.covariance(c, c) != 0.0 {
                carriers = carriers.min(self.mass_carriers(c));
            }
            reliable &= self.column_reliable(c);
        }
        Estimate {
            mean: value,
            se: self.se_of(grad),
            n: self.n,
            mass_carriers: carriers as u32,
            reliable,
        }
    }

    /// Estimate of `offset + Σ weights[c] · mean[c]`.
    pub fn linear(&self, offset: f64, weights: &[f64]) -> Estimate {
        let value = offset
            + weights
                .iter()
                .zip(&self.mean)
                .map(|(w, m)| if *w == 0.0 { 0.0 } else { w * m })
                .sum::<f64>();
        self.estimate_of(value, weights)
    }

    pub fn column(&self, c: usize) -> Estimate {
        let mut w = vec![0.0; self.columns()];
        w[c] = 1.0;
        self.linear(0.0, &w)
    }
}

fn insert_top(top: &mut Vec<f64>, x: f64) {
    if top.len() == MASS_CARRIER_CAP {
        if x <= *top.last().expect("nonempty") {
            return;
        }
        top.pop();
    }
    let pos = top.partition_point(|&v| v >= x);
    top.insert(pos, x);
}

impl Merge for ColumnStats {
    fn merge(&mut self, other: Self) {
        assert_eq!(self.columns(), other.columns());
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = other;
            return;
        }
        let m = self.columns();
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let delta: Vec<f64> = other.mean.iter().zip(&self.mean).map(|(b, a)| b - a).collect();
        for a in 0..m {
            for b in 0..m {
                self.comoment[a * m + b] +=
                    other.comoment[a * m + b] + delta[a] * delta[b] * na * nb / n;
            }
        }
        for (mu, d) in self.mean.iter_mut().zip(&delta) {
            *mu += d * nb / n;
        }
        for c in 0..m {
            self.abs_sum[c] += other.abs_sum[c];
            for &v in &other.top[c] {
                insert_top(&mut self.top[c], v);
            }
        }
        self.n += other.n;
    }
}

/// Mean and SE of a finite sample.
pub fn estimate(values: &[f64]) -> Result<Estimate> {
    if values.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: values.len(),
        });
    }
    let mut acc = ColumnStats::new(1);
    for &v in values {
        acc.push(&[v]);
    }
    Ok(acc.column(0))
}
