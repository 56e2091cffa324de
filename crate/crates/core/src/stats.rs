//! Deterministic statistics of a single field realization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::FieldSample;
use crate::funcs::{ConvexSpec, WeightArray};
use crate::lattice::{LatticeBox, MultiIndex};

pub fn box_max(field: &FieldSample) -> f64 {
    field.values().iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub fn box_min(field: &FieldSample) -> f64 {
    field.values().iter().copied().fold(f64::INFINITY, f64::min)
}

/// `max_i c_i g(S_i)`.
pub fn weighted_max(field: &FieldSample, c: &WeightArray, g: &ConvexSpec) -> Result<f64> {
    if c.bx() != field.bx() {
        return Err(Error::InvalidIndex(format!(
            "weights over {} but field over {}",
            c.bx(),
            field.bx()
        )));
    }
    Ok(field
        .values()
        .iter()
        .zip(c.values())
        .map(|(&s, &w)| w * g.eval(s))
        .fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankQuery {
    #[serde(rename = "box")]
    pub bx: LatticeBox,
    pub j: usize,
}

/// The `j`-th largest value (with multiplicity); the minimum when `j`
/// exceeds the number of cells.
pub fn rank_order(field: &FieldSample, j: usize) -> Result<f64> {
    if j == 0 {
        return Err(Error::InvalidIndex("rank j must be >= 1".into()));
    }
    let v = field.values();
    if j >= v.len() {
        return Ok(box_min(field));
    }
    let mut buf = v.to_vec();
    let (_, nth, _) = buf.select_nth_unstable_by(j - 1, |a, b| b.total_cmp(a));
    Ok(*nth)
}

/// Rank order over the sub-box `{m <= n}`.
pub fn rank_order_in(field: &FieldSample, q: &RankQuery) -> Result<f64> {
    let sub = restrict(field, &q.bx)?;
    rank_order(&sub, q.j)
}

/// The field restricted to a sub-box anchored at the origin.
pub fn restrict(field: &FieldSample, bx: &LatticeBox) -> Result<FieldSample> {
    if bx == field.bx() {
        return Ok(field.clone());
    }
    if bx.dim() != field.bx().dim() || !field.bx().contains(bx.upper()) {
        return Err(Error::InvalidIndex(format!("{bx} is not inside {}", field.bx())));
    }
    let values = bx.iter().map(|i| field.value(&i)).collect();
    FieldSample::new(bx.clone(), values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpcrossMode {
    /// The line through the upper corner in direction `s`.
    CornerLine,
    /// Sum of counts over every line parallel to direction `s`.
    AllLinesSum,
}

/// One completed upcrossing: the index where the value was `<= a` and the
/// later index where it reached `>= b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub direction: usize,
    pub from: MultiIndex,
    pub to: MultiIndex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpcrossReport {
    pub per_direction: Vec<u64>,
    pub total: u64,
    pub mode: UpcrossMode,
    pub crossings: Vec<Crossing>,
}

fn check_levels(a: f64, b: f64) -> Result<()> {
    if !(a < b) {
        return Err(Error::Precondition(format!("upcrossings need a < b, got a = {a}, b = {b}")));
    }
    Ok(())
}

/// Two-state scan: wait for a value `<= a`, then for a value `>= b`.
/// Returns the (start, end) positions of each completed upcrossing.
fn scan_line(values: impl Iterator<Item = (usize, f64)>, a: f64, b: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut low: Option<usize> = None;
    for (pos, x) in values {
        match low {
            None if x <= a => low = Some(pos),
            Some(start) if x >= b => {
                out.push((start, pos));
                low = None;
            }
            _ => {}
        }
    }
    out
}

/// Count of complete upcrossings of `[a, b]` in one scan: a plain slice.
pub fn upcross_sequence(values: &[f64], a: f64, b: f64) -> Result<u64> {
    check_levels(a, b)?;
    Ok(scan_line(values.iter().copied().enumerate(), a, b).len() as u64)
}

fn upcross_lines(
    field: &FieldSample,
    s: usize,
    a: f64,
    b: f64,
    mode: UpcrossMode,
) -> Result<Vec<(usize, usize)>> {
    check_levels(a, b)?;
    let bx = field.bx();
    let v = field.values();
    let lines = match mode {
        UpcrossMode::CornerLine => vec![bx.direction_line_positions(s)?],
        UpcrossMode::AllLinesSum => bx.parallel_lines(s)?,
    };
    Ok(lines
        .iter()
        .flat_map(|line| scan_line(line.iter().map(|&p| (p, v[p])), a, b))
        .collect())
}

/// Complete upcrossings of `[a, b]` in direction `s` (1-based).
pub fn upcross_direction(field: &FieldSample, s: usize, a: f64, b: f64, mode: UpcrossMode) -> Result<u64> {
    Ok(upcross_lines(field, s, a, b, mode)?.len() as u64)
}

/// Directional counts and the total: the smallest positive count, or 0.
pub fn upcross_total(field: &FieldSample, a: f64, b: f64, mode: UpcrossMode) -> Result<UpcrossReport> {
    let bx = field.bx();
    let mut per_direction = Vec::with_capacity(bx.dim());
    let mut crossings = Vec::new();
    for s in 1..=bx.dim() {
        let pairs = upcross_lines(field, s, a, b, mode)?;
        per_direction.push(pairs.len() as u64);
        crossings.extend(pairs.into_iter().map(|(f, t)| Crossing {
            direction: s,
            from: bx.index_at(f),
            to: bx.index_at(t),
        }));
    }
    let total = per_direction.iter().copied().filter(|&u| u > 0).min().unwrap_or(0);
    Ok(UpcrossReport { per_direction, total, mode, crossings })
}

const RIGHT_STEP: f64 = 1e-7;

/// Right difference quotient of `x ↦ max(points, x)` at `t`, rounded.
pub fn max_right_derivative_check(points: &[f64], t: f64) -> u8 {
    let g = |x: f64| points.iter().copied().fold(x, f64::max);
    let q = (g(t + RIGHT_STEP) - g(t)) / RIGHT_STEP;
    q.round().clamp(0.0, 1.0) as u8
}
