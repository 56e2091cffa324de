//! Finite-n diagnostics for the convergence statements. None of these
//! verifies a limit; each tracks a quantity over a growing box sequence.

use serde_json::{json, Value};

use super::{extras, require_sign, Run, TrendPoint, TrendReport, TREND_LABEL};
use crate::error::{Error, Result};
use crate::fields::{FieldSample, GeneratorSpec, SignClass};
use crate::funcs::{ArraySpec, ConvexSpec, ScalarSpec, ThresholdSeq, WeightArray};
use crate::harness::{derive_seed, Estimate};
use crate::lattice::LatticeBox;
use crate::stats::box_max;

use super::report::{nonincreasing, simulate_on};

/// Length of the extended line used for the summability precheck.
pub const SERIES_LEN: usize = 63;
/// Replicates for the summability precheck.
pub const SERIES_REPLICATES: usize = 20_000;
/// Dyadic block ratio below which the series is read as summable.
pub const SERIES_RATIO: f64 = 1.0;
const SERIES_SALT: u64 = 0x005E_41E5;

fn parse_boxes(spec: &GeneratorSpec, boxes: &[Vec<usize>]) -> Result<Vec<LatticeBox>> {
    if boxes.len() < 2 {
        return Err(Error::Config("a trend needs at least two boxes".into()));
    }
    let k = spec.bx.dim();
    let out: Vec<LatticeBox> = boxes
        .iter()
        .map(|d| {
            if d.len() != k {
                return Err(Error::DimensionMismatch { expected: k, got: d.len() });
            }
            LatticeBox::from_dims(d)
        })
        .collect::<Result<_>>()?;
    for w in out.windows(2) {
        let grows = w[0].upper().leq(w[1].upper())? && w[0] != w[1];
        if !grows {
            return Err(Error::Config(format!("boxes must grow: {} then {}", w[0], w[1])));
        }
    }
    Ok(out)
}

fn doubled(bx: &LatticeBox) -> Result<LatticeBox> {
    LatticeBox::from_dims(&bx.dims().iter().map(|d| 2 * d).collect::<Vec<_>>())
}

fn point(bx: &LatticeBox, value: Estimate, ex: super::Extras) -> TrendPoint {
    TrendPoint { dims: bx.dims().to_vec(), value, extras: ex }
}

/// Dyadic block sums of `Σ_i w_i (h(S_{n;s;i}) - h(S_{n;s;i-1}))` along the
/// corner line of `first` extended to [`SERIES_LEN`] in each direction.
/// Summable when, for some direction, the last two block ratios are below
/// [`SERIES_RATIO`] (or the tail blocks vanish).
fn summability<W, H>(run: &Run, first: &LatticeBox, weights: W, h: H) -> Result<Value>
where
    W: Fn(&LatticeBox) -> Result<Vec<f64>>,
    H: Fn(f64) -> f64 + Sync,
{
    let blocks = (SERIES_LEN + 1).trailing_zeros() as usize;
    let mut per_dir = Vec::new();
    let mut summable_in = None;
    for s in 1..=first.dim() {
        let bx = first.with_extent(s, SERIES_LEN)?;
        let spec = run.spec.with_box(bx.clone())?;
        let w = weights(&bx)?;
        let line = bx.direction_line_positions(s)?;
        let seed = derive_seed(run.seed ^ SERIES_SALT, s as u64);
        let stats = simulate_on(&spec, SERIES_REPLICATES, seed, blocks, |f, row| {
            let v = f.values();
            let mut prev = 0.0;
            for (i, &pos) in line.iter().enumerate() {
                let cur = h(v[pos]);
                // Term i + 1 falls in block floor(log2(i + 1)).
                row[(usize::BITS - 1 - (i + 1).leading_zeros()) as usize] += w[pos] * (cur - prev);
                prev = cur;
            }
            Ok(())
        })?;
        let sums: Vec<f64> = stats.means().to_vec();
        let ratio = |a: f64, b: f64| if a == 0.0 { 0.0 } else { b.abs() / a.abs() };
        let r1 = ratio(sums[blocks - 3], sums[blocks - 2]);
        let r2 = ratio(sums[blocks - 2], sums[blocks - 1]);
        let ok = sums[blocks - 1] == 0.0 || (r1 < SERIES_RATIO && r2 < SERIES_RATIO);
        if ok && summable_in.is_none() {
            summable_in = Some(s);
        }
        per_dir.push(json!({
            "direction": s,
            "block_sums": sums,
            "tail_ratios": [r1, r2],
            "summable": ok,
        }));
    }
    match summable_in {
        Some(s) => Ok(json!({ "summable_direction": s, "directions": per_dir, "replicates": SERIES_REPLICATES })),
        None => Err(Error::Precondition(format!(
            "the directional series does not look summable: dyadic block sums stop shrinking ({})",
            Value::Array(per_dir)
        ))),
    }
}

/// Tail probability over the window `[B, 2B]`, one estimate per box.
fn window_tails<Q>(run: &Run, boxes: &[LatticeBox], build: impl Fn(&LatticeBox) -> Result<Q>) -> Result<Vec<TrendPoint>>
where
    Q: Fn(&FieldSample, usize) -> bool + Sync,
{
    boxes
        .iter()
        .enumerate()
        .map(|(m, bx)| {
            let big = doubled(bx)?;
            let spec = run.spec.with_box(big.clone())?;
            let window: Vec<usize> = big
                .iter()
                .enumerate()
                .filter(|(_, idx)| bx.upper().leq(idx).unwrap_or(false))
                .map(|(p, _)| p)
                .collect();
            let hit = build(&big)?;
            let stats = simulate_on(&spec, run.replicates, derive_seed(run.seed, m as u64), 1, |f, row| {
                row[0] = f64::from(window.iter().any(|&p| hit(f, p)));
                Ok(())
            })?;
            Ok(point(
                bx,
                stats.column(0),
                extras([("window", json!([bx.dims(), big.dims()])), ("window_cells", json!(window.len()))]),
            ))
        })
        .collect()
}

fn trend_report(run: &Run, quantity: &str, pattern: &str, points: Vec<TrendPoint>, holds: bool, ex: super::Extras) -> TrendReport {
    TrendReport {
        theorem: run.theorem.to_string(),
        label: TREND_LABEL.to_string(),
        quantity: quantity.to_string(),
        points,
        pattern: pattern.to_string(),
        pattern_holds: holds,
        replicates: run.replicates,
        seed: run.seed,
        z: run.z,
        params: run.params.clone(),
        extras: ex,
    }
}

pub fn limsup_trend(run: &Run, boxes: &[Vec<usize>]) -> Result<TrendReport> {
    require_sign(run.spec, SignClass::Nonnegative, run.theorem)?;
    let boxes = parse_boxes(run.spec, boxes)?;
    let mut points = Vec::with_capacity(boxes.len());
    for (m, bx) in boxes.iter().enumerate() {
        let spec = run.spec.with_box(bx.clone())?;
        let stats = simulate_on(&spec, run.replicates, derive_seed(run.seed, m as u64), 2, |f, row| {
            let s = f.corner();
            row[0] = box_max(f);
            row[1] = if s > 0.0 { s * s.ln() } else { 0.0 };
            Ok(())
        })?;
        let (num, den) = (stats.mean(0), stats.mean(1));
        if !(den > 0.0) {
            return Err(Error::Precondition(format!(
                "E S ln S = {den} on box {bx}; the ratio needs a positive, growing denominator"
            )));
        }
        let ratio = stats.estimate_of(num / den, &[1.0 / den, -num / (den * den)]);
        points.push(point(bx, ratio, extras([("e_max", json!(stats.column(0))), ("e_s_ln_s", json!(stats.column(1)))])));
    }
    let values: Vec<Estimate> = points.iter().map(|p| p.value).collect();
    let first = values.first().expect("two boxes");
    let last = values.last().expect("two boxes");
    let holds = nonincreasing(&values, run.z);
    let final_within = last.mean <= 1.0 + 3.0 * last.se;
    let denominators_grow = points
        .windows(2)
        .all(|w| w[1].extras["e_s_ln_s"]["mean"].as_f64() > w[0].extras["e_s_ln_s"]["mean"].as_f64());
    Ok(trend_report(
        run,
        "E(max S) / E(S ln S)",
        "ratios nonincreasing within z SE and the last ratio below the first",
        points,
        holds && last.mean < first.mean,
        extras([
            ("final_ratio", json!(last)),
            ("final_ratio_within_one_plus_3se", json!(final_within)),
            ("denominators_grow", json!(denominators_grow)),
        ]),
    ))
}

pub fn chow_convergence_trend(
    run: &Run,
    boxes: &[Vec<usize>],
    g: &ConvexSpec,
    weights: &ArraySpec,
    p: f64,
    delta: f64,
) -> Result<TrendReport> {
    g.validate()?;
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::Domain(format!("p must be > 0, got {p}")));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::Domain(format!("delta must be > 0, got {delta}")));
    }
    let boxes = parse_boxes(run.spec, boxes)?;
    let series = summability(
        run,
        &boxes[0],
        |bx| Ok(WeightArray::from_spec(weights, bx)?.values().iter().map(|c| c.powf(p)).collect()),
        |x| g.eval(x).powf(p),
    )?;
    let points = window_tails(run, &boxes, |big| {
        let c = WeightArray::from_spec(weights, big)?.values().to_vec();
        Ok(move |f: &FieldSample, pos: usize| c[pos] * g.eval(f.values()[pos]) > delta)
    })?;
    let values: Vec<Estimate> = points.iter().map(|p| p.value).collect();
    let holds = tails_shrink(&values, run.z);
    Ok(trend_report(
        run,
        "P(max over [B, 2B] of c g(S) > delta)",
        TAIL_PATTERN,
        points,
        holds,
        extras([("series", series)]),
    ))
}

pub fn whittle_trend(
    run: &Run,
    boxes: &[Vec<usize>],
    phi: &ConvexSpec,
    psi: &ScalarSpec,
    u: &ArraySpec,
    eps: f64,
) -> Result<TrendReport> {
    phi.validate()?;
    psi.validate()?;
    if !psi.is_unbounded() {
        return Err(Error::Hypothesis("psi must be unbounded for the convergence statement".into()));
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::Domain(format!("eps must be > 0, got {eps}")));
    }
    let boxes = parse_boxes(run.spec, boxes)?;
    let series = summability(
        run,
        &boxes[0],
        |bx| Ok(ThresholdSeq::from_spec(u, psi, bx)?.psi_values().iter().map(|v| 1.0 / v).collect()),
        |x| phi.eval(x),
    )?;
    let points = window_tails(run, &boxes, |big| {
        let psi_v = ThresholdSeq::from_spec(u, psi, big)?.psi_values();
        Ok(move |f: &FieldSample, pos: usize| phi.eval(f.values()[pos]) / psi_v[pos] >= eps)
    })?;
    let values: Vec<Estimate> = points.iter().map(|p| p.value).collect();
    let holds = tails_shrink(&values, run.z);
    Ok(trend_report(
        run,
        "P(max over [B, 2B] of phi(S)/psi(u) >= eps)",
        TAIL_PATTERN,
        points,
        holds,
        extras([("series", series)]),
    ))
}

const TAIL_PATTERN: &str = "tail probabilities nonincreasing within z SE and the last below the first, or all zero";

fn tails_shrink(values: &[Estimate], z: f64) -> bool {
    let all_zero = values.iter().all(|v| v.mean == 0.0);
    all_zero || (nonincreasing(values, z) && values.last().map(|v| v.mean) < values.first().map(|v| v.mean))
}
