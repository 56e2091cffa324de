//! Doob-, Cairoli- and rank-order-type maximal inequalities.

use serde_json::json;

use super::{extras, origin_value, require_positive_eps, require_sign, Extremum, Relation, Run, Side, A_CONST};
use crate::checks::InequalityReport;
use crate::error::{Error, Result};
use crate::fields::SignClass;
use crate::funcs::{gamma_fn, log_plus, NondecreasingSpec};
use crate::stats::{box_max, box_min, rank_order as rank};

const E: f64 = std::f64::consts::E;

fn dim(run: &Run) -> i32 {
    run.spec.bx.dim() as i32
}

/// `(p/(p-1))^{kp}`.
pub fn cairoli_multiplier(p: f64, k: usize) -> f64 {
    (p / (p - 1.0)).powf(k as f64 * p)
}

/// `(p/(p-1))^p`.
pub fn corollary_multiplier(p: f64) -> f64 {
    (p / (p - 1.0)).powf(p)
}

/// `Σ_{i=1}^k (i-1)! A^i`.
pub fn cairoli_prob_constant(k: usize) -> f64 {
    let mut fact = 1.0;
    let mut sum = 0.0;
    for i in 1..=k {
        if i > 1 {
            fact *= (i - 1) as f64;
        }
        sum += fact * A_CONST.powi(i as i32);
    }
    sum
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `b + b/(b-1)(L - P)` with `L = E S log⁺S`, `P = E(S-1)⁺`.
pub fn llogl_rhs(b: f64, l: f64, p: f64) -> f64 {
    b + b / (b - 1.0) * (l - p)
}

/// `A + A·L`.
pub fn corollary_p1_rhs(l: f64) -> f64 {
    A_CONST + A_CONST * l
}

/// The `llogl` bound at `b = e` is below the `p = 1` corollary bound exactly
/// when `E(S-1)⁺ >= e - 2`.
pub const LLOGL_SHARPER_THRESHOLD: f64 = E - 2.0;

pub fn cairoli_moment(run: &Run, p: f64) -> Result<Vec<InequalityReport>> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::Domain(format!("cairoli_moment needs p > 1, got {p}")));
    }
    require_sign(run.spec, SignClass::Positive, run.theorem)?;
    let k = run.spec.bx.dim();
    let stats = run.simulate(2, |f, row| {
        row[0] = box_max(f).powf(p);
        row[1] = f.corner().powf(p);
        Ok(())
    })?;
    let mult = cairoli_multiplier(p, k);
    let cor = corollary_multiplier(p);
    let rhs = Side::column(&stats, 1, mult);
    let cor_rhs = cor * stats.mean(1);
    let ex = extras([
        ("multiplier", json!(mult)),
        ("k", json!(k)),
        ("corollary_multiplier", json!(cor)),
        ("corollary_rhs", json!(cor_rhs)),
        ("corollary_sharper", json!(cor_rhs <= rhs.value)),
    ]);
    Ok(vec![run.report(&stats, format!("p={p}"), Relation::Le, Side::column(&stats, 0, 1.0), rhs, ex)])
}

pub fn cairoli_prob(run: &Run, eps: &[f64]) -> Result<Vec<InequalityReport>> {
    require_positive_eps(eps)?;
    require_sign(run.spec, SignClass::Positive, run.theorem)?;
    let k = run.spec.bx.dim();
    let ne = eps.len();
    let stats = run.simulate(ne + 1, |f, row| {
        let m = box_max(f);
        for (slot, &e) in row.iter_mut().zip(eps) {
            *slot = f64::from(m >= e);
        }
        let s = f.corner();
        row[ne] = s * log_plus(s)?.powi(k as i32);
        Ok(())
    })?;
    let constant = cairoli_prob_constant(k);
    let slope = factorial(k) * A_CONST.powi(dim(run));
    Ok(eps
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let ex = extras([
                ("A", json!(A_CONST)),
                ("constant_term", json!(constant)),
                ("log_term_multiplier", json!(slope)),
                ("tail_frequency", json!(stats.mean(i))),
            ]);
            run.report(
                &stats,
                format!("eps={e}"),
                Relation::Le,
                Side::column(&stats, i, e),
                Side::affine(&stats, constant, &[(ne, slope)]),
                ex,
            )
        })
        .collect())
}

pub fn doob_indicator(run: &Run, eps: &[f64], extremum: Extremum) -> Result<Vec<InequalityReport>> {
    require_positive_eps(eps)?;
    let ne = eps.len();
    let stats = run.simulate(2 * ne, |f, row| {
        let m = match extremum {
            Extremum::Max => box_max(f),
            Extremum::Min => box_min(f),
        };
        let s = f.corner();
        for (i, &e) in eps.iter().enumerate() {
            let hit = f64::from(m >= e);
            row[2 * i] = hit;
            row[2 * i + 1] = s * hit;
        }
        Ok(())
    })?;
    let label = match extremum {
        Extremum::Max => "max",
        Extremum::Min => "min",
    };
    Ok(eps
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let ex = extras([("extremum", json!(label)), ("tail_frequency", json!(stats.mean(2 * i)))]);
            run.report(
                &stats,
                format!("{label} eps={e}"),
                Relation::Le,
                Side::column(&stats, 2 * i, e),
                Side::column(&stats, 2 * i + 1, 1.0),
                ex,
            )
        })
        .collect())
}

pub fn rank_order(run: &Run, j: usize, g: &NondecreasingSpec, eps: &[f64]) -> Result<Vec<InequalityReport>> {
    if j == 0 {
        return Err(Error::InvalidIndex("rank j must be >= 1".into()));
    }
    g.validate()?;
    require_positive_eps(eps)?;
    let ne = eps.len();
    // Columns: integral form (2), then per eps: indicator form (2) and the
    // same quantities through g = step(eps) (2).
    let stats = run.simulate(2 + 4 * ne, |f, row| {
        let r = rank(f, j)?;
        let s = f.corner();
        row[0] = g.integral_u_dg(r)?;
        row[1] = s * g.eval(r);
        for (i, &e) in eps.iter().enumerate() {
            let hit = f64::from(r >= e);
            let step = NondecreasingSpec::Step { eps: e };
            let base = 2 + 4 * i;
            row[base] = hit;
            row[base + 1] = s * hit;
            row[base + 2] = step.integral_u_dg(r)?;
            row[base + 3] = s * step.eval(r);
        }
        Ok(())
    })?;
    let cells = run.spec.bx.len();
    let mut out = vec![run.report(
        &stats,
        format!("integral j={j} g={}", g.label()),
        Relation::Le,
        Side::column(&stats, 0, 1.0),
        Side::column(&stats, 1, 1.0),
        extras([("j", json!(j)), ("rank_is_min", json!(j >= cells))]),
    )];
    for (i, &e) in eps.iter().enumerate() {
        let base = 2 + 4 * i;
        let step_gap = (stats.mean(base) * e - stats.mean(base + 2)).abs()
            + (stats.mean(base + 1) - stats.mean(base + 3)).abs();
        let ex = extras([
            ("j", json!(j)),
            ("rank_is_min", json!(j >= cells)),
            ("step_form_gap", json!(step_gap)),
            ("tail_frequency", json!(stats.mean(base))),
        ]);
        out.push(run.report(
            &stats,
            format!("indicator j={j} eps={e}"),
            Relation::Le,
            Side::column(&stats, base, e),
            Side::column(&stats, base + 1, 1.0),
            ex,
        ));
    }
    Ok(out)
}

pub fn moment_corollary(run: &Run, p: f64) -> Result<Vec<InequalityReport>> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::Domain(format!("moment_corollary needs p >= 1, got {p}")));
    }
    require_sign(run.spec, SignClass::Nonnegative, run.theorem)?;
    let k = run.spec.bx.dim();
    if p > 1.0 {
        let stats = run.simulate(2, |f, row| {
            row[0] = box_max(f).powf(p);
            row[1] = f.corner().powf(p);
            Ok(())
        })?;
        let mult = corollary_multiplier(p);
        let cm = cairoli_multiplier(p, k);
        let rhs = Side::column(&stats, 1, mult);
        let cairoli_rhs = cm * stats.mean(1);
        let ex = extras([
            ("multiplier", json!(mult)),
            ("cairoli_multiplier", json!(cm)),
            ("cairoli_rhs", json!(cairoli_rhs)),
            ("sharper_than_cairoli", json!(rhs.value <= cairoli_rhs)),
        ]);
        return Ok(vec![run.report(&stats, format!("p={p}"), Relation::Le, Side::column(&stats, 0, 1.0), rhs, ex)]);
    }
    let stats = run.simulate(3, |f, row| {
        let s = f.corner();
        row[0] = box_max(f);
        row[1] = s * log_plus(s)?;
        row[2] = (s - 1.0).max(0.0);
        Ok(())
    })?;
    let (l, pp) = (stats.mean(1), stats.mean(2));
    let rhs = Side::affine(&stats, A_CONST, &[(1, A_CONST)]);
    let at_e = llogl_rhs(E, l, pp);
    let ex = extras([
        ("A", json!(A_CONST)),
        ("llogl_rhs_at_e", json!(at_e)),
        ("llogl_sharper", json!(at_e <= rhs.value)),
        ("positive_part_mean", json!(pp)),
        ("llogl_sharper_condition", json!(pp >= LLOGL_SHARPER_THRESHOLD)),
    ]);
    Ok(vec![run.report(&stats, "p=1", Relation::Le, Side::column(&stats, 0, 1.0), rhs, ex)])
}

pub fn harremoes(run: &Run, c: f64) -> Result<Vec<InequalityReport>> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::Domain(format!("harremoes needs c in (0, 1], got {c}")));
    }
    require_sign(run.spec, SignClass::Positive, run.theorem)?;
    match origin_value(run.spec) {
        Some(v) if (v - c).abs() <= 1e-12 => {}
        other => {
            return Err(Error::Hypothesis(format!(
                "harremoes needs S at (1,…,1) equal to c = {c}; generator gives {other:?}"
            )))
        }
    }
    let stats = run.simulate(2, |f, row| {
        let s = f.corner();
        row[0] = box_max(f);
        row[1] = s * s.ln();
        Ok(())
    })?;
    let m = stats.mean(0);
    let mut grad = vec![0.0; 2];
    grad[0] = 1.0 - 1.0 / m;
    let lhs = Side { value: gamma_fn(m, c)?, grad };
    let constant = 1.0 - c * c - c.ln();
    let rhs = Side::affine(&stats, constant, &[(1, 1.0)]);
    let ex = extras([("c", json!(c)), ("constant_term", json!(constant)), ("mean_max", json!(m))]);
    Ok(vec![run.report(&stats, format!("c={c}"), Relation::Le, lhs, rhs, ex)])
}

pub fn negative_control(run: &Run) -> Result<Vec<InequalityReport>> {
    let stats = run.simulate(1, |f, row| {
        row[0] = f.corner().abs();
        Ok(())
    })?;
    Ok(vec![run.report(
        &stats,
        "E|S_n| <= 0",
        Relation::Le,
        Side::column(&stats, 0, 1.0),
        Side::constant(0.0, 1),
        extras([("expected", json!("VIOLATION"))]),
    )])
}
