//! Empirical checks of the defining properties: association of a random
//! vector and the demimartingale condition of a field.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::generator::GeneratorSpec;
use crate::fields::testfn::{TestFunction, TestFunctionFamily};
use crate::harness::{run_replicates, ColumnStats, Stream, Welford};
use crate::lattice::MultiIndex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum OracleVerdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCell {
    /// Description of the cell: the index pair and/or function labels.
    pub label: String,
    pub estimate: f64,
    pub se: f64,
    pub verdict: OracleVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub replicates: usize,
    pub seed: u64,
    pub z: f64,
    pub passed: usize,
    pub failed: usize,
    pub cells: Vec<OracleCell>,
}

impl OracleReport {
    fn from_cells(replicates: usize, seed: u64, z: f64, cells: Vec<OracleCell>) -> Self {
        let failed = cells.iter().filter(|c| c.verdict == OracleVerdict::Fail).count();
        Self {
            replicates,
            seed,
            z,
            passed: cells.len() - failed,
            failed,
            cells,
        }
    }

    pub fn pass_fraction(&self) -> f64 {
        if self.cells.is_empty() {
            1.0
        } else {
            self.passed as f64 / self.cells.len() as f64
        }
    }
}

fn verdict(estimate: f64, se: f64, z: f64) -> OracleVerdict {
    if estimate >= -z * se {
        OracleVerdict::Pass
    } else {
        OracleVerdict::Fail
    }
}

/// All pairs `i <= j`, `i != j`, within the generator's box.
pub fn all_comparable_pairs(spec: &GeneratorSpec) -> Vec<(MultiIndex, MultiIndex)> {
    let bx = &spec.bx;
    let mut out = Vec::new();
    for i in bx.iter() {
        for j in bx.iter() {
            if i != j && i.leq(&j).expect("same dim") {
                out.push((i.clone(), j));
            }
        }
    }
    out
}

/// Monte-Carlo estimate of `E[(S_j - S_i) f(S_k, k <= i)]` per pair and
/// family member. PASS when the estimate is `>= -z·SE`.
pub fn demimartingale_oracle(
    spec: &GeneratorSpec,
    family: &TestFunctionFamily,
    pairs: &[(MultiIndex, MultiIndex)],
    replicates: usize,
    seed: u64,
    z: f64,
) -> Result<OracleReport> {
    if replicates < 2 {
        return Err(Error::InsufficientData { needed: 2, got: replicates });
    }
    let bx = &spec.bx;
    struct Pair {
        history: Vec<usize>,
        i: usize,
        j: usize,
    }
    let mut prepared = Vec::with_capacity(pairs.len());
    for (i, j) in pairs {
        if !i.leq(j)? {
            return Err(Error::NotComparable {
                i: i.coords().to_vec(),
                j: j.coords().to_vec(),
            });
        }
        let (pi, pj) = match (bx.linear_index(i), bx.linear_index(j)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::InvalidIndex(format!("pair {i} <= {j} leaves the box {bx}"))),
        };
        let history = bx
            .iter()
            .filter(|k| k.leq(i).expect("same dim"))
            .map(|k| bx.linear_index(&k).expect("in box"))
            .collect();
        prepared.push(Pair { history, i: pi, j: pj });
    }
    let nf = family.len();
    let acc = run_replicates(
        seed,
        replicates,
        || vec![Welford::new(); prepared.len() * nf],
        |acc, rng, _| {
            let field = spec.sample_with(rng);
            let v = field.values();
            let mut hist = Vec::new();
            for (p, pair) in prepared.iter().enumerate() {
                hist.clear();
                hist.extend(pair.history.iter().map(|&h| v[h]));
                let d = v[pair.j] - v[pair.i];
                for (m, f) in family.members.iter().enumerate() {
                    acc[p * nf + m].push(d * f.eval(&hist));
                }
            }
        },
    );
    let mut cells = Vec::with_capacity(acc.len());
    for (p, (i, j)) in pairs.iter().enumerate() {
        for (m, f) in family.members.iter().enumerate() {
            let w = &acc[p * nf + m];
            cells.push(OracleCell {
                label: format!("i={i} j={j} f={}", f.label()),
                estimate: w.mean(),
                se: w.se(),
                verdict: verdict(w.mean(), w.se(), z),
            });
        }
    }
    Ok(OracleReport::from_cells(replicates, seed, z, cells))
}

/// Monte-Carlo estimate of `Cov(f(X), g(X))` for each given pair of
/// nondecreasing functions of a random vector drawn by `sampler`.
/// PASS when the covariance estimate is `>= -z·SE` (delta method on
/// `E[fg] - E[f]E[g]`).
pub fn association_oracle<S>(
    sampler: S,
    pairs: &[(TestFunction, TestFunction)],
    replicates: usize,
    seed: u64,
    z: f64,
) -> Result<OracleReport>
where
    S: Fn(&mut Stream) -> Vec<f64> + Sync,
{
    if replicates < 2 {
        return Err(Error::InsufficientData { needed: 2, got: replicates });
    }
    let acc = run_replicates(
        seed,
        replicates,
        || vec![ColumnStats::new(3); pairs.len()],
        |acc, rng, _| {
            let x = sampler(rng);
            for (stats, (f, g)) in acc.iter_mut().zip(pairs) {
                let (fv, gv) = (f.eval(&x), g.eval(&x));
                stats.push(&[fv, gv, fv * gv]);
            }
        },
    );
    let cells = acc
        .iter()
        .zip(pairs)
        .map(|(stats, (f, g))| {
            let (mf, mg) = (stats.mean(0), stats.mean(1));
            let cov = stats.mean(2) - mf * mg;
            let se = stats.se_of(&[-mg, -mf, 1.0]);
            OracleCell {
                label: format!("f={} g={}", f.label(), g.label()),
                estimate: cov,
                se,
                verdict: verdict(cov, se, z),
            }
        })
        .collect();
    Ok(OracleReport::from_cells(replicates, seed, z, cells))
}

/// Every unordered pair (including `f = g`) from a family.
pub fn function_pairs(family: &TestFunctionFamily) -> Vec<(TestFunction, TestFunction)> {
    let m = &family.members;
    let mut out = Vec::new();
    for a in 0..m.len() {
        for b in a..m.len() {
            out.push((m[a].clone(), m[b].clone()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::generator::Dist;
    use crate::fields::testfn::Arg;

    #[test]
    fn zero_field_is_exactly_zero() {
        let spec = GeneratorSpec::iid(Dist::Degenerate { value: 0.0 }, &[2, 2]).unwrap();
        let fam = TestFunctionFamily::standard(0.0, 1.0);
        let rep = demimartingale_oracle(&spec, &fam, &all_comparable_pairs(&spec), 50, 1, 3.0).unwrap();
        assert_eq!(rep.failed, 0);
        assert!(rep.cells.iter().all(|c| c.estimate == 0.0 && c.se == 0.0));
    }

    #[test]
    fn sign_flipping_field_fails() {
        // S_n = (-1)^{n_1}; deterministic, so each expectation is its value.
        let bx = [3, 3];
        let values: Vec<f64> = (1..=3)
            .flat_map(|n1| std::iter::repeat(if n1 % 2 == 0 { 1.0 } else { -1.0 }).take(3))
            .collect();
        let spec = GeneratorSpec::fixed(values, &bx).unwrap();
        let fam = TestFunctionFamily::standard(0.0, 1.0);
        let rep = demimartingale_oracle(&spec, &fam, &all_comparable_pairs(&spec), 10, 1, 3.0).unwrap();
        assert!(rep.failed > 0);
        // Brute force: pair (2,1) -> (3,1), ramp of the last value at t = -2:
        // (S_j - S_i)·max(S_i + 2, 0) = (-1 - 1)·3 = -6.
        let cell = rep
            .cells
            .iter()
            .find(|c| c.label == "i=(2,1) j=(3,1) f=ramp(last,t=-2.0000)")
            .unwrap();
        assert_eq!(cell.estimate, -6.0);
        assert_eq!(cell.verdict, OracleVerdict::Fail);
    }

    #[test]
    fn incomparable_pair_rejected() {
        let spec = GeneratorSpec::iid(Dist::Normal, &[2, 2]).unwrap();
        let fam = TestFunctionFamily::standard(0.0, 1.0);
        let i = MultiIndex::new(vec![2, 1]).unwrap();
        let j = MultiIndex::new(vec![1, 2]).unwrap();
        assert!(matches!(
            demimartingale_oracle(&spec, &fam, &[(i, j)], 10, 1, 3.0),
            Err(Error::NotComparable { .. })
        ));
        assert!(demimartingale_oracle(&spec, &fam, &[], 1, 1, 3.0).is_err());
    }

    #[test]
    fn antithetic_pair_is_not_associated() {
        let pairs = vec![(
            TestFunction::Value { arg: Arg::At(0) },
            TestFunction::Value { arg: Arg::At(1) },
        )];
        let rep = association_oracle(
            |rng| {
                let z = rng.normal();
                vec![z, -z]
            },
            &pairs,
            20_000,
            5,
            3.0,
        )
        .unwrap();
        assert_eq!(rep.failed, 1);
        // Cov(Z, -Z) = -Var(Z) = -1.
        assert!((rep.cells[0].estimate + 1.0).abs() < 0.05);
    }

    #[test]
    fn independent_coordinates_pass() {
        let fam = TestFunctionFamily {
            members: vec![
                TestFunction::Constant,
                TestFunction::Sum,
                TestFunction::Value { arg: Arg::At(0) },
                TestFunction::Value { arg: Arg::At(2) },
                TestFunction::Step { arg: Arg::Max, t: 0.5 },
                TestFunction::RampSum { t: 0.0 },
            ],
        };
        let rep = association_oracle(
            |rng| (0..3).map(|_| rng.normal()).collect(),
            &function_pairs(&fam),
            20_000,
            8,
            3.0,
        )
        .unwrap();
        assert_eq!(rep.failed, 0, "{:?}", rep.cells);
    }
}
