//! Maximal φ-inequalities for nonnegative demisubmartingales.

use serde_json::json;

use super::maximal::{corollary_p1_rhs, llogl_rhs, LLOGL_SHARPER_THRESHOLD};
use super::{extras, require_sign, OrliczBound, Relation, Run, Side};
use crate::checks::InequalityReport;
use crate::error::{Error, Result};
use crate::fields::SignClass;
use crate::funcs::{log_plus, probe_grid, OrliczSpec};
use crate::stats::box_max;

const E: f64 = std::f64::consts::E;

pub struct MomentParams {
    pub phi: Option<OrliczSpec>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub r: Option<f64>,
    pub m: Option<u32>,
}

fn need<T: Copy>(v: Option<T>, name: &str, bound: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("orlicz_moment bound {bound} needs `{name}`")))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Domain(format!("lambda must be in (0, 1), got {lambda}")));
    }
    Ok(())
}

pub fn orlicz_prob(run: &Run, lambdas: &[f64], x: f64) -> Result<Vec<InequalityReport>> {
    if lambdas.is_empty() {
        return Err(Error::Config("empty lambda list".into()));
    }
    lambdas.iter().try_for_each(|&l| check_lambda(l))?;
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!("x must be > 0, got {x}")));
    }
    require_sign(run.spec, SignClass::Nonnegative, run.theorem)?;
    let stats = run.simulate(1 + lambdas.len(), |f, row| {
        let s = f.corner();
        row[0] = f64::from(box_max(f) >= x);
        for (slot, &l) in row[1..].iter_mut().zip(lambdas) {
            *slot = (s / l - x).max(0.0);
        }
        Ok(())
    })?;
    Ok(lambdas
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let mult = l / ((1.0 - l) * x);
            run.report(
                &stats,
                format!("lambda={l} x={x}"),
                Relation::Le,
                Side::column(&stats, 0, 1.0),
                Side::column(&stats, 1 + i, mult),
                extras([("multiplier", json!(mult))]),
            )
        })
        .collect())
}

/// `Φ_a` extended by 0 to nonpositive arguments (where `x <= a` anyway).
fn big_phi(phi: &OrliczSpec, a: f64, x: f64) -> Result<f64> {
    if x <= 0.0 || x <= a {
        Ok(0.0)
    } else {
        phi.big_phi_a(a, x)
    }
}

/// Whether `φ^{1/γ}` is nondecreasing and convex on a probe grid.
fn root_convex(phi: &OrliczSpec, gamma: f64) -> bool {
    if let OrliczSpec::Power { p } = phi {
        return gamma <= *p;
    }
    let xs = probe_grid(0.0, 50.0, 2001);
    let v: Vec<f64> = xs.iter().map(|&x| phi.eval(x).powf(1.0 / gamma)).collect();
    v.windows(2).all(|w| w[1] >= w[0])
        && v.windows(3).all(|w| w[0] - 2.0 * w[1] + w[2] >= -1e-12 * (1.0 + w[1].abs()))
}

/// Whether the `m`-th derivative of `φ` is itself an Orlicz function.
fn derivative_is_orlicz(phi: &OrliczSpec, m: u32) -> bool {
    match phi {
        OrliczSpec::Power { p } => *p - m as f64 >= 1.0,
        // φ^{(m)}(0) = r^m > 0.
        OrliczSpec::ExpMinusOne { .. } => false,
        // φ' = ln(1+x) + x/(1+x) is concave.
        OrliczSpec::XLog1p => false,
    }
}

pub fn orlicz_moment(run: &Run, bound: OrliczBound, prm: &MomentParams) -> Result<Vec<InequalityReport>> {
    require_sign(run.spec, SignClass::Nonnegative, run.theorem)?;
    let name = serde_json::to_value(bound).expect("enum").as_str().unwrap_or_default().to_string();
    let phi = || -> Result<OrliczSpec> {
        let phi = prm.phi.clone().ok_or_else(|| Error::Config(format!("orlicz_moment bound {name} needs `phi`")))?;
        phi.validate()?;
        Ok(phi)
    };
    match bound {
        OrliczBound::TailIntegral => {
            let phi = phi()?;
            let a = need(prm.a, "a", &name)?;
            let b = need(prm.b, "b", &name)?;
            let lambda = need(prm.lambda, "lambda", &name)?;
            check_lambda(lambda)?;
            if !(b >= a) {
                return Err(Error::Domain(format!("tail_integral needs a <= b, got a = {a}, b = {b}")));
            }
            if b == 0.0 && !phi.integrable_at_zero() {
                return Err(Error::Domain("b = 0 requires phi'(r)/r integrable at 0".into()));
            }
            let phi_b = big_phi(&phi, a, b)?;
            let phi_prime_b = phi.big_phi_a_prime(a, b)?;
            let stats = run.simulate(2, |f, row| {
                let y = f.corner() / lambda;
                row[0] = phi.eval(box_max(f));
                row[1] = if y > b {
                    big_phi(&phi, a, y)? - phi_b - phi_prime_b * (y - b)
                } else {
                    0.0
                };
                Ok(())
            })?;
            let mult = lambda / (1.0 - lambda);
            Ok(vec![run.report(
                &stats,
                format!("phi={} a={a} b={b} lambda={lambda}", phi.label()),
                Relation::Le,
                Side::column(&stats, 0, 1.0),
                Side::affine(&stats, phi.eval(b), &[(1, mult)]),
                extras([
                    ("bound", json!(name)),
                    ("big_phi_at_b", json!(phi_b)),
                    ("big_phi_prime_at_b", json!(phi_prime_b)),
                ]),
            )])
        }
        OrliczBound::BigPhi => {
            let phi = phi()?;
            let a = need(prm.a, "a", &name)?;
            let lambda = need(prm.lambda, "lambda", &name)?;
            check_lambda(lambda)?;
            // Surfaces the a = 0 integrability error before simulating.
            phi.big_phi_a(a, a + 1.0)?;
            let stats = run.simulate(2, |f, row| {
                row[0] = phi.eval(box_max(f));
                row[1] = big_phi(&phi, a, f.corner() / lambda)?;
                Ok(())
            })?;
            let mult = lambda / (1.0 - lambda);
            Ok(vec![run.report(
                &stats,
                format!("phi={} a={a} lambda={lambda}", phi.label()),
                Relation::Le,
                Side::column(&stats, 0, 1.0),
                Side::affine(&stats, phi.eval(a), &[(1, mult)]),
                extras([("bound", json!(name))]),
            )])
        }
        OrliczBound::Llogl => {
            let b = need(prm.b, "b", &name)?;
            if !(b.is_finite() && b > 1.0) {
                return Err(Error::Domain(format!("llogl needs b > 1, got {b}")));
            }
            let stats = run.simulate(3, |f, row| {
                let s = f.corner();
                row[0] = box_max(f);
                row[1] = s * log_plus(s)?;
                row[2] = (s - 1.0).max(0.0);
                Ok(())
            })?;
            let slope = b / (b - 1.0);
            let rhs = Side::affine(&stats, b, &[(1, slope), (2, -slope)]);
            let (l, p) = (stats.mean(1), stats.mean(2));
            let mut ex = extras([
                ("bound", json!(name)),
                ("positive_part_mean", json!(p)),
                ("llogl_sharper_condition", json!(p >= LLOGL_SHARPER_THRESHOLD)),
            ]);
            if (b - E).abs() < 1e-12 {
                let cor = corollary_p1_rhs(l);
                debug_assert!((llogl_rhs(b, l, p) - rhs.value).abs() < 1e-9 * (1.0 + rhs.value.abs()));
                ex.insert("corollary_p1_rhs".into(), json!(cor));
                ex.insert("sharper_than_corollary_p1".into(), json!(rhs.value <= cor));
            }
            Ok(vec![run.report(&stats, format!("b={b}"), Relation::Le, Side::column(&stats, 0, 1.0), rhs, ex)])
        }
        OrliczBound::QScaled | OrliczBound::Moderate => {
            let phi = phi()?;
            let q = phi.q_phi()?;
            let p_star = phi.p_phi_star();
            if bound == OrliczBound::Moderate && p_star.is_infinite() {
                return Err(Error::Hypothesis(format!("{} is not moderate", phi.label())));
            }
            let stats = run.simulate(3, |f, row| {
                let s = f.corner();
                row[0] = phi.eval(box_max(f));
                row[1] = phi.eval(q.value * s);
                row[2] = phi.eval(s);
                Ok(())
            })?;
            let (rhs, mult) = if bound == OrliczBound::QScaled {
                (Side::column(&stats, 1, 1.0), 1.0)
            } else {
                let mult = q.value.powf(p_star.value);
                (Side::column(&stats, 2, mult), mult)
            };
            Ok(vec![run.report(
                &stats,
                format!("phi={}", phi.label()),
                Relation::Le,
                Side::column(&stats, 0, 1.0),
                rhs,
                extras([
                    ("bound", json!(name)),
                    ("q_phi", json!(q)),
                    ("p_phi", json!(phi.p_phi_inf())),
                    ("p_phi_star", json!(p_star)),
                    ("multiplier", json!(mult)),
                ]),
            )])
        }
        OrliczBound::RootConvex => {
            let phi = phi()?;
            let gamma = need(prm.gamma, "gamma", &name)?;
            if !(gamma.is_finite() && gamma > 1.0) {
                return Err(Error::Domain(format!("gamma must be > 1, got {gamma}")));
            }
            if !root_convex(&phi, gamma) {
                return Err(Error::Hypothesis(format!(
                    "phi^(1/gamma) is not nondecreasing convex for {} and gamma = {gamma}",
                    phi.label()
                )));
            }
            let mult = (gamma / (gamma - 1.0)).powf(gamma);
            simple_ratio(run, &phi, mult, &name, format!("phi={} gamma={gamma}", phi.label()))
        }
        OrliczBound::Derivative => {
            let phi = phi()?;
            let m = need(prm.m, "m", &name)?;
            if m < 1 {
                return Err(Error::Domain("m must be >= 1".into()));
            }
            if !derivative_is_orlicz(&phi, m) {
                return Err(Error::Hypothesis(format!(
                    "the {m}-th derivative of {} is not an Orlicz function",
                    phi.label()
                )));
            }
            let mf = f64::from(m);
            let mult = ((mf + 1.0) / mf).powf(mf + 1.0);
            simple_ratio(run, &phi, mult, &name, format!("phi={} m={m}", phi.label()))
        }
        OrliczBound::Exponential => {
            let r = need(prm.r, "r", &name)?;
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::Domain(format!("r must be > 0, got {r}")));
            }
            let stats = run.simulate(2, |f, row| {
                row[0] = (r * box_max(f)).exp();
                row[1] = (r * f.corner()).exp();
                Ok(())
            })?;
            Ok(vec![run.report(
                &stats,
                format!("r={r}"),
                Relation::Le,
                Side::column(&stats, 0, 1.0),
                Side::column(&stats, 1, E),
                extras([("bound", json!(name)), ("multiplier", json!(E))]),
            )])
        }
    }
}

fn simple_ratio(run: &Run, phi: &OrliczSpec, mult: f64, name: &str, case: String) -> Result<Vec<InequalityReport>> {
    let stats = run.simulate(2, |f, row| {
        row[0] = phi.eval(box_max(f));
        row[1] = phi.eval(f.corner());
        Ok(())
    })?;
    Ok(vec![run.report(
        &stats,
        case,
        Relation::Le,
        Side::column(&stats, 0, 1.0),
        Side::column(&stats, 1, mult),
        extras([("bound", json!(name)), ("multiplier", json!(mult))]),
    )])
}
