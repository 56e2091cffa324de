//! Chow-type weighted maximal inequality and the Hájek–Rényi corollary.

use serde_json::json;

use super::{corner_lines, extras, require_positive_eps, Relation, Run, Side};
use crate::checks::InequalityReport;
use crate::error::{Error, Result};
use crate::funcs::{ArraySpec, ConvexSpec, WeightArray};
use crate::harness::ColumnStats;
use crate::stats::weighted_max;

/// Picks the direction with the smallest point estimate among `cols`.
fn min_direction(stats: &ColumnStats, cols: &[usize]) -> (usize, f64) {
    cols.iter()
        .enumerate()
        .map(|(s, &c)| (s, stats.mean(c)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

pub fn chow(run: &Run, eps: &[f64], g: &ConvexSpec, weights: &ArraySpec) -> Result<Vec<InequalityReport>> {
    require_positive_eps(eps)?;
    g.validate()?;
    let c = WeightArray::from_spec(weights, &run.spec.bx)?;
    let lines = corner_lines(run.spec)?;
    let k = lines.len();
    let ne = eps.len();
    // Per eps: indicator, then one directional sum per s.
    let width = 1 + k;
    let stats = run.simulate(ne * width, |f, row| {
        let wm = weighted_max(f, &c, g)?;
        let v = f.values();
        let dir: Vec<f64> = lines
            .iter()
            .map(|line| {
                let mut prev = 0.0;
                let mut acc = 0.0;
                for &pos in line {
                    let cur = g.eval(v[pos]);
                    acc += c.values()[pos] * (cur - prev);
                    prev = cur;
                }
                acc
            })
            .collect();
        for (i, &e) in eps.iter().enumerate() {
            let hit = f64::from(wm >= e);
            row[i * width] = hit;
            for s in 0..k {
                row[i * width + 1 + s] = hit * dir[s];
            }
        }
        Ok(())
    })?;
    Ok(eps
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let cols: Vec<usize> = (0..k).map(|s| i * width + 1 + s).collect();
            let (s_min, _) = min_direction(&stats, &cols);
            let per_dir: Vec<f64> = cols.iter().map(|&col| stats.mean(col)).collect();
            let ex = extras([
                ("per_direction_rhs", json!(per_dir)),
                ("minimizing_direction", json!(s_min + 1)),
                ("tail_frequency", json!(stats.mean(i * width))),
            ]);
            run.report(
                &stats,
                format!("eps={e} g={}", g.label()),
                Relation::Le,
                Side::column(&stats, i * width, e),
                Side::column(&stats, cols[s_min], 1.0),
                ex,
            )
        })
        .collect())
}

pub fn hajek_renyi(run: &Run, eps: &[f64], weights: &ArraySpec) -> Result<Vec<InequalityReport>> {
    require_positive_eps(eps)?;
    if !run.spec.has_associated_increments() {
        return Err(Error::Hypothesis(
            "hajek_renyi needs a model with mean-zero associated increments".into(),
        ));
    }
    let c = WeightArray::from_spec(weights, &run.spec.bx)?;
    let lines = corner_lines(run.spec)?;
    let k = lines.len();
    let ne = eps.len();
    // Columns: one indicator per eps, then per s the c- and c²-weighted sums
    // of X(2 S_prev + X) with X the slab difference along the corner line.
    let stats = run.simulate(ne + 2 * k, |f, row| {
        let v = f.values();
        let m = v
            .iter()
            .zip(c.values())
            .map(|(s, w)| w * s.abs())
            .fold(f64::NEG_INFINITY, f64::max);
        for (slot, &e) in row.iter_mut().zip(eps) {
            *slot = f64::from(m >= e);
        }
        for (s, line) in lines.iter().enumerate() {
            let (mut lin, mut sq, mut prev) = (0.0, 0.0, 0.0);
            for &pos in line {
                let x = v[pos] - prev;
                let term = x * (2.0 * prev + x);
                let w = c.values()[pos];
                lin += w * term;
                sq += w * w * term;
                prev = v[pos];
            }
            row[ne + 2 * s] = lin;
            row[ne + 2 * s + 1] = sq;
        }
        Ok(())
    })?;
    let mut out = Vec::with_capacity(2 * ne);
    for (i, &e) in eps.iter().enumerate() {
        for (variant, offset) in [("c", 0), ("c2", 1)] {
            let cols: Vec<usize> = (0..k).map(|s| ne + 2 * s + offset).collect();
            let (s_min, _) = min_direction(&stats, &cols);
            let scale = 1.0 / (e * e);
            let per_dir: Vec<f64> = cols.iter().map(|&col| scale * stats.mean(col)).collect();
            let ex = extras([
                ("variant", json!(variant)),
                ("tail_frequency", json!(stats.mean(i))),
                ("per_direction_rhs", json!(per_dir)),
                ("minimizing_direction", json!(s_min + 1)),
            ]);
            out.push(run.report(
                &stats,
                format!("eps={e} weights={variant}"),
                Relation::Le,
                Side::column(&stats, i, 1.0),
                Side::column(&stats, cols[s_min], scale),
                ex,
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use crate::checks::{CheckConfig, InequalityReport, Theorem, Verdict};
    use crate::fields::{Dist, GeneratorSpec, Kernel, Model};
    use crate::funcs::{ArraySpec, ConvexSpec};
    use crate::lattice::LatticeBox;

    fn run(spec: GeneratorSpec, t: Theorem, r: usize) -> Vec<InequalityReport> {
        CheckConfig::new(spec, t).replicates(r).run(5).unwrap().into_reports()
    }

    #[test]
    fn zero_field_is_exact() {
        let zero = GeneratorSpec::iid(Dist::Degenerate { value: 0.0 }, &[3, 3]).unwrap();
        let t = Theorem::Chow { eps: vec![1.0], g: ConvexSpec::Power { p: 1.0 }, weights: ArraySpec::Constant { value: 1.0 } };
        let r = run(zero.clone(), t, 10);
        assert_eq!((r[0].lhs.mean, r[0].rhs.mean, r[0].verdict), (0.0, 0.0, Verdict::Hold));
        let r = run(zero, Theorem::HajekRenyi { eps: vec![1.0], weights: ArraySpec::Constant { value: 1.0 } }, 10);
        assert!(r.iter().all(|x| x.lhs.mean == 0.0 && x.verdict == Verdict::Hold));
    }

    #[test]
    fn chow_holds_with_inverse_weights() {
        let spec = GeneratorSpec::iid(Dist::Normal, &[3, 4]).unwrap();
        let t = Theorem::Chow {
            eps: vec![0.5],
            g: ConvexSpec::Power { p: 2.0 },
            weights: ArraySpec::Product { power: -1.0 },
        };
        let r = run(spec, t, 20_000);
        assert_eq!(r[0].verdict, Verdict::Hold, "{r:#?}");
        assert_eq!(r[0].extras["per_direction_rhs"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn one_dimensional_min_is_the_single_sum() {
        let spec = GeneratorSpec::iid(Dist::Normal, &[8]).unwrap();
        let t = Theorem::Chow { eps: vec![1.0], g: ConvexSpec::Power { p: 1.0 }, weights: ArraySpec::Constant { value: 1.0 } };
        let r = run(spec, t, 2_000);
        let per = r[0].extras["per_direction_rhs"].as_array().unwrap();
        assert_eq!(per.len(), 1);
        assert_eq!(per[0].as_f64().unwrap(), r[0].rhs.mean);
    }

    #[test]
    fn kolmogorov_form_for_iid_increments() {
        // k = 1, c ≡ 1: rhs = eps^-2 · n · Var(X) up to MC error.
        let n = 16;
        let spec = GeneratorSpec::iid(Dist::Normal, &[n]).unwrap();
        let r = run(spec, Theorem::HajekRenyi { eps: vec![4.0], weights: ArraySpec::Constant { value: 1.0 } }, 40_000);
        for rep in &r {
            let exact = n as f64 / 16.0;
            assert!((rep.rhs.mean - exact).abs() < 4.0 * rep.rhs.se, "{} vs {exact}", rep.rhs.mean);
            assert_eq!(rep.verdict, Verdict::Hold);
        }
    }

    #[test]
    fn moving_average_holds_in_both_variants() {
        let kernel = Kernel::new(vec![2, 2], vec![1.0, 0.5, 0.5, 0.25]).unwrap();
        let spec = GeneratorSpec::new(
            Model::MovingAverage { kernel, dist: Dist::Normal },
            LatticeBox::from_dims(&[3, 3]).unwrap(),
        )
        .unwrap();
        let r = run(spec, Theorem::HajekRenyi { eps: vec![1.0], weights: ArraySpec::Product { power: -0.5 } }, 20_000);
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|x| x.verdict == Verdict::Hold), "{r:#?}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let spec = GeneratorSpec::iid(Dist::Normal, &[3, 3]).unwrap();
        let t = Theorem::Chow { eps: vec![1.0], g: ConvexSpec::Power { p: 2.0 }, weights: ArraySpec::Product { power: 1.0 } };
        assert!(CheckConfig::new(spec, t).run(1).is_err());
        let prod = GeneratorSpec::product(Dist::Exponential, 1.0, &[2, 2]).unwrap();
        let t = Theorem::HajekRenyi { eps: vec![1.0], weights: ArraySpec::Constant { value: 1.0 } };
        assert!(CheckConfig::new(prod, t).run(1).is_err());
    }
}
