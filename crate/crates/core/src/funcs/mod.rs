//! Admissible function families, weight and threshold arrays, and their
//! characteristic constants.

mod arrays;
mod convex;
mod monotone;
mod orlicz;
pub mod quad;

pub use arrays::{ArraySpec, ScalarSpec, ThresholdSeq, WeightArray};
pub use convex::ConvexSpec;
pub use monotone::NondecreasingSpec;
pub use orlicz::{Constant, ConstantSource, OrliczSpec, INFINITE_CAP, PROBE_HI, PROBE_LO};

use crate::error::{Error, Result};

/// `max(ln x, 0)`, with `log_plus(0) = 0`.
pub fn log_plus(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("log_plus of {x}")));
    }
    Ok(if x <= 1.0 { 0.0 } else { x.ln() })
}

/// `γ(x) = x - ln x - c`.
pub fn gamma_fn(x: f64, c: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("gamma_fn needs x > 0, got {x}")));
    }
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::Domain(format!("gamma_fn needs c in (0, 1], got {c}")));
    }
    Ok(x - x.ln() - c)
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn probe_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    let geometric = lo > 0.0 && hi / lo > 1e3;
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            if geometric {
                lo * (hi / lo).powf(t)
            } else {
                lo + t * (hi - lo)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn log_plus_examples() {
        assert!((log_plus(E).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(log_plus(0.5).unwrap(), 0.0);
        assert_eq!(log_plus(1.0).unwrap(), 0.0);
        assert_eq!(log_plus(0.0).unwrap(), 0.0);
        assert!(log_plus(-1.0).is_err());
        assert!(log_plus(f64::NAN).is_err());
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_fn(1.0, 1.0).unwrap(), 0.0);
        assert!((gamma_fn(E, 1.0).unwrap() - (E - 2.0)).abs() < 1e-15);
        assert_eq!(gamma_fn(1.0, 0.5).unwrap(), 0.5);
        assert!(gamma_fn(0.0, 1.0).is_err());
        assert!(gamma_fn(1.0, 1.5).is_err());
    }

    #[test]
    fn gamma_nonnegative_on_grid() {
        for c in [0.05, 0.3, 0.5, 0.99, 1.0] {
            for x in probe_grid(1e-6, 1e6, 2000) {
                assert!(gamma_fn(x, c).unwrap() >= -1e-12, "x={x} c={c}");
            }
        }
    }
}
