//! Directional upcrossing bound and Whittle-type containment bounds.

use serde_json::json;

use super::{corner_lines, extras, require_positive_eps, Relation, Run, Side, WhittleVariant};
use crate::checks::InequalityReport;
use crate::error::{Error, Result};
use crate::funcs::{ArraySpec, ConvexSpec, ScalarSpec, ThresholdSeq};
use crate::harness::ColumnStats;
use crate::stats::{upcross_direction, UpcrossMode};

pub fn upcross_bound(run: &Run, directions: Option<&[usize]>, a: f64, b: f64) -> Result<Vec<InequalityReport>> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Domain(format!("upcrossing needs a < b, got a = {a}, b = {b}")));
    }
    let k = run.spec.bx.dim();
    let dirs: Vec<usize> = match directions {
        Some([]) => return Err(Error::Config("empty direction list".into())),
        Some(d) => d.to_vec(),
        None => (1..=k).collect(),
    };
    if let Some(&s) = dirs.iter().find(|&&s| s == 0 || s > k) {
        return Err(Error::DirectionOutOfRange { s, k });
    }
    let lines = corner_lines(run.spec)?;
    // Columns: (S_n - a)⁺, then per direction U_s and (S_{n;s;1} - a)⁺.
    let stats = run.simulate(1 + 2 * dirs.len(), |f, row| {
        row[0] = (f.corner() - a).max(0.0);
        for (i, &s) in dirs.iter().enumerate() {
            row[1 + 2 * i] = upcross_direction(f, s, a, b, UpcrossMode::CornerLine)? as f64;
            row[2 + 2 * i] = (f.values()[lines[s - 1][0]] - a).max(0.0);
        }
        Ok(())
    })?;
    let scale = 1.0 / (b - a);
    Ok(dirs
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            run.report(
                &stats,
                format!("s={s} a={a} b={b}"),
                Relation::Le,
                Side::column(&stats, 1 + 2 * i, 1.0),
                Side::affine(&stats, 0.0, &[(0, scale), (2 + 2 * i, -scale)]),
                extras([("direction", json!(s)), ("mode", json!(UpcrossMode::CornerLine))]),
            )
        })
        .collect())
}

/// Column holding `Σ_i (φ(S_{n;s;i}) - φ(S_{n;s;i-1})) / ψ(u_{n;s;i})` for
/// each corner line.
fn directional_sums(lines: &[Vec<usize>], v: &[f64], phi: &ConvexSpec, psi: &[f64]) -> Vec<f64> {
    lines
        .iter()
        .map(|line| {
            let mut prev = 0.0;
            line.iter().fold(0.0, |acc, &pos| {
                let cur = phi.eval(v[pos]);
                let term = (cur - prev) / psi[pos];
                prev = cur;
                acc + term
            })
        })
        .collect()
}

fn min_column(stats: &ColumnStats, cols: &[usize]) -> usize {
    *cols
        .iter()
        .min_by(|&&x, &&y| stats.mean(x).total_cmp(&stats.mean(y)))
        .expect("at least one direction")
}

pub fn whittle(
    run: &Run,
    variant: WhittleVariant,
    phi: &ConvexSpec,
    psi: &ScalarSpec,
    u: &ArraySpec,
    eps: &[f64],
) -> Result<Vec<InequalityReport>> {
    phi.validate()?;
    if variant == WhittleVariant::Monotone && !phi.is_nondecreasing() {
        return Err(Error::Hypothesis(format!("monotone variant needs a nondecreasing phi, got {}", phi.label())));
    }
    let thresholds = ThresholdSeq::from_spec(u, psi, &run.spec.bx)?;
    let psi_v = thresholds.psi_values();
    let lines = corner_lines(run.spec)?;
    let k = lines.len();
    let sup_form = variant == WhittleVariant::SupForm;
    if sup_form {
        require_positive_eps(eps)?;
    }
    let eps: &[f64] = if sup_form { eps } else { &[] };
    // Columns: k directional sums, containment indicator, then one tail
    // indicator per eps.
    let stats = run.simulate(k + 1 + eps.len(), |f, row| {
        let v = f.values();
        row[..k].copy_from_slice(&directional_sums(&lines, v, phi, &psi_v));
        let sup = v.iter().zip(&psi_v).map(|(&x, &p)| phi.eval(x) / p).fold(f64::NEG_INFINITY, f64::max);
        row[k] = f64::from(v.iter().zip(&psi_v).all(|(&x, &p)| phi.eval(x) <= p));
        for (slot, &e) in row[k + 1..].iter_mut().zip(eps) {
            *slot = f64::from(sup >= e);
        }
        Ok(())
    })?;
    let dir_cols: Vec<usize> = (0..k).collect();
    let best = min_column(&stats, &dir_cols);
    let per_dir: Vec<f64> = dir_cols.iter().map(|&c| stats.mean(c)).collect();
    let ex = || {
        extras([
            ("variant", json!(variant)),
            ("per_direction_sum", json!(per_dir)),
            ("minimizing_direction", json!(best + 1)),
        ])
    };
    if !sup_form {
        return Ok(vec![run.report(
            &stats,
            format!("{variant:?} phi={}", phi.label()).to_lowercase(),
            Relation::Ge,
            Side::column(&stats, k, 1.0),
            Side::affine(&stats, 1.0, &[(best, -1.0)]),
            ex(),
        )]);
    }
    Ok(eps
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            run.report(
                &stats,
                format!("sup_form eps={e} phi={}", phi.label()),
                Relation::Le,
                Side::column(&stats, k + 1 + i, e),
                Side::column(&stats, best, 1.0),
                ex(),
            )
        })
        .collect())
}
