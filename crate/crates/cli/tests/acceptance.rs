//! Acceptance criteria. Prints one PASS/FAIL line per criterion.
//!
//! A criterion listed in `EXPECTED_FAIL` is still evaluated literally and
//! printed as FAIL, but does not fail the process; any other failure does.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use demifield::checks::{
    cairoli_multiplier, corollary_multiplier, CheckConfig, CheckOutcome, Theorem, A_CONST, TREND_LABEL,
    LLOGL_SHARPER_THRESHOLD,
};
use demifield::fields::{all_comparable_pairs, demimartingale_oracle, OracleReport, partial_sums, Dist, FieldSample, GeneratorSpec, TestFunctionFamily};
use demifield::funcs::OrliczSpec;
use demifield::harness::{run_suite, RunConfig, Stream};
use demifield::lattice::LatticeBox;
use demifield::stats::{max_right_derivative_check, rank_order, upcross_total, UpcrossMode};

type Outcome = Result<String, String>;

/// Criteria whose literal statement is known to be false.
///
/// "2": the increments are centered, so every oracle cell is an exact
/// equality and each fails a one-sided z = 3 test with probability 0.00135.
/// Over 1188 cells per distribution a clean sweep is unlikely.
const EXPECTED_FAIL: &[&str] = &["2", "5b"];

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn load_suite(name: &str) -> RunConfig {
    let text = std::fs::read_to_string(configs().join(name)).expect("config present");
    serde_json::from_str(&text).expect("valid suite config")
}

fn demifield(args: &[&str], workers: Option<&str>) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_demifield"));
    cmd.args(args);
    match workers {
        Some(w) => cmd.env("DEMIFIELD_WORKERS", w),
        None => cmd.env_remove("DEMIFIELD_WORKERS"),
    };
    let out = cmd.output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn remark_reproduction() -> Outcome {
    let bx = LatticeBox::from_dims(&[2, 2]).unwrap();
    let field = FieldSample::new(bx, vec![-1.0, 2.0, -1.0, 0.5]).unwrap();
    let r = upcross_total(&field, 0.0, 1.0, UpcrossMode::AllLinesSum).unwrap();
    ensure(r.per_direction == vec![0, 1] && r.total == 1, || format!("got {:?} total {}", r.per_direction, r.total))?;
    Ok(format!("per-direction {:?}, total {}", r.per_direction, r.total))
}

/// One-sided z for a family-wise false-fail rate equal to the per-cell rate
/// at z = 3, Bonferroni over the 1188 comparable-pair cells of a 3x3 box.
const FAMILYWISE_Z: f64 = 4.7275406650322145;

/// Oracle runs shared by both readings of the demimartingale criterion.
fn oracle_runs() -> &'static Vec<(Dist, OracleReport)> {
    static RUNS: OnceLock<Vec<(Dist, OracleReport)>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let seed = 2024;
        [Dist::Normal, Dist::Exponential, Dist::Rademacher]
            .into_iter()
            .map(|dist| {
                let spec = GeneratorSpec::iid(dist, &[3, 3]).unwrap();
                let family = TestFunctionFamily::calibrated(&spec, seed);
                let pairs = all_comparable_pairs(&spec);
                (dist, demimartingale_oracle(&spec, &family, &pairs, 100_000, seed, 3.0).unwrap())
            })
            .collect()
    })
}

fn oracle_at(z: f64) -> Outcome {
    let mut lines = Vec::new();
    let mut worst: Option<(f64, String)> = None;
    for (dist, rep) in oracle_runs() {
        let passed = rep.cells.iter().filter(|c| c.estimate >= -z * c.se - 1e-12).count();
        lines.push(format!("{dist:?}: {passed}/{} cells pass", rep.cells.len()));
        for c in &rep.cells {
            let t = if c.se > 0.0 { c.estimate / c.se } else { 0.0 };
            if worst.as_ref().map_or(true, |w| t < w.0) {
                worst = Some((t, format!("{dist:?} {}", c.label)));
            }
        }
    }
    let (wt, wl) = worst.unwrap();
    let summary = format!("{}; worst cell {wl} at z = {wt:.2}", lines.join(", "));
    ensure(wt >= -z, || summary.clone())?;
    let flip = GeneratorSpec::fixed(vec![1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0, 1.0], &[3, 3]).unwrap();
    let family = TestFunctionFamily::standard(0.0, 1.0);
    let rep = demimartingale_oracle(&flip, &family, &all_comparable_pairs(&flip), 10, 2024, z).unwrap();
    ensure(rep.failed >= 1, || "sign-flipping field produced no FAIL".into())?;
    Ok(format!("{summary}; negative control: {} FAIL cells", rep.failed))
}

fn demimartingale_oracle_criterion() -> Outcome {
    oracle_at(3.0)
}

fn demimartingale_oracle_familywise() -> Outcome {
    oracle_at(FAMILYWISE_Z)
}

fn inequality_suite() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("examples");
    let cfg = configs().join("examples.json");
    let (code, log) = demifield(&["suite", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    ensure(code == 0, || format!("examples suite exit {code}: {log}"))?;
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("suite.json")).unwrap()).unwrap();
    let mut verdicts = 0;
    for e in report["entries"].as_array().unwrap() {
        for r in e["outcome"]["reports"].as_array().unwrap() {
            verdicts += 1;
            ensure(r["verdict"] == "HOLD", || format!("{} {}: {}", e["theorem"], r["case"], r["verdict"]))?;
        }
    }
    let ids: std::collections::BTreeSet<&str> =
        report["entries"].as_array().unwrap().iter().map(|e| e["theorem"].as_str().unwrap()).collect();
    let neg = configs().join("negative_control.json");
    let neg_out = dir.path().join("neg");
    let (neg_code, _) = demifield(&["suite", "--config", neg.to_str().unwrap(), "--out", neg_out.to_str().unwrap()], None);
    ensure(neg_code == 1, || format!("negative control exit {neg_code}, expected 1"))?;
    let neg_json = std::fs::read_to_string(neg_out.join("suite.json")).unwrap();
    ensure(neg_json.contains("\"VIOLATION\""), || "negative control has no VIOLATION".into())?;
    Ok(format!(
        "{} checks over {} theorems, {verdicts} verdicts all HOLD; negative control VIOLATION with exit 1",
        report["entries"].as_array().unwrap().len(),
        ids.len()
    ))
}

fn constants() -> Outcome {
    let spec = GeneratorSpec::product(Dist::Lognormal { sigma: 0.5 }, 1.0, &[4, 4]).unwrap();
    let out = CheckConfig::new(spec.clone(), Theorem::CairoliMoment { p: 2.0 }).replicates(1_000).run(1).unwrap();
    let ex = &out.reports()[0].extras;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1.0);
    ensure(close(ex["multiplier"].as_f64().unwrap(), 16.0), || format!("cairoli multiplier {}", ex["multiplier"]))?;
    ensure(close(ex["corollary_multiplier"].as_f64().unwrap(), 4.0), || "corollary multiplier".into())?;
    for p in [1.5, 2.0, 3.0, 5.0] {
        for k in 1..=4 {
            ensure(close(cairoli_multiplier(p, k), (p / (p - 1.0)).powf(k as f64 * p)), || format!("p={p} k={k}"))?;
        }
        ensure(close(corollary_multiplier(p), (p / (p - 1.0)).powf(p)), || format!("corollary p={p}"))?;
        let q = OrliczSpec::Power { p }.q_phi().unwrap().value;
        ensure(close(q, p / (p - 1.0)), || format!("q_phi at p={p}: {q}"))?;
    }
    let e = std::f64::consts::E;
    ensure(close(A_CONST, e / (e - 1.0)), || "A".into())?;
    let p1 = CheckConfig::new(spec, Theorem::MomentCorollary { p: 1.0 }).replicates(1_000).run(1).unwrap();
    ensure(close(p1.reports()[0].extras["A"].as_f64().unwrap(), e / (e - 1.0)), || "reported A".into())?;
    Ok(format!("16, 4, A = {A_CONST:.13}, q_phi = p/(p-1) to 1e-12"))
}

/// Shared runs for the ordering criteria: `(label, generator)`.
fn sharpness_runs() -> Vec<(&'static str, GeneratorSpec)> {
    vec![
        ("S=1", GeneratorSpec::product(Dist::Degenerate { value: 1.0 }, 1.0, &[2, 2]).unwrap()),
        ("lognormal 0.5 3x3", GeneratorSpec::product(Dist::Lognormal { sigma: 0.5 }, 1.0, &[3, 3]).unwrap()),
        ("lognormal 0.5 4x4", GeneratorSpec::product(Dist::Lognormal { sigma: 0.5 }, 1.0, &[4, 4]).unwrap()),
        ("lognormal 0.8 3x3", GeneratorSpec::product(Dist::Lognormal { sigma: 0.8 }, 1.0, &[3, 3]).unwrap()),
        ("lognormal 1.0 4x4", GeneratorSpec::product(Dist::Lognormal { sigma: 1.0 }, 1.0, &[4, 4]).unwrap()),
    ]
}

fn corollary_vs_cairoli() -> Outcome {
    let mut n = 0;
    for (label, spec) in sharpness_runs() {
        for p in [1.5, 2.0, 3.0] {
            let cm = CheckConfig::new(spec.clone(), Theorem::CairoliMoment { p }).replicates(20_000).seed(8);
            let mc = CheckConfig::new(spec.clone(), Theorem::MomentCorollary { p }).replicates(20_000).seed(8);
            let (a, b) = (cm.run(0).unwrap(), mc.run(0).unwrap());
            let (a, b) = (&a.reports()[0], &b.reports()[0]);
            ensure(a.extras["corollary_sharper"] == true, || format!("{label} p={p}: cairoli report"))?;
            ensure(b.rhs.mean <= a.rhs.mean, || format!("{label} p={p}: {} > {}", b.rhs.mean, a.rhs.mean))?;
            n += 1;
        }
    }
    Ok(format!("corollary rhs <= cairoli rhs on {n} shared runs"))
}

/// `(label, llogl_sharper, E(S-1)⁺)` for each shared run at `b = e`.
fn llogl_at_e() -> Vec<(&'static str, bool, f64)> {
    sharpness_runs()
        .into_iter()
        .map(|(label, spec)| {
            let out = CheckConfig::new(spec, Theorem::MomentCorollary { p: 1.0 }).replicates(20_000).seed(8).run(0).unwrap();
            let ex = &out.reports()[0].extras;
            (label, ex["llogl_sharper"] == true, ex["positive_part_mean"].as_f64().unwrap())
        })
        .collect()
}

fn llogl_vs_corollary_literal() -> Outcome {
    // Literal reading: sharper whenever E(S-1)⁺ >= 0, i.e. on every run.
    let rows = llogl_at_e();
    let bad: Vec<String> = rows
        .iter()
        .filter(|(_, sharper, pp)| *pp >= 0.0 && !sharper)
        .map(|(l, _, pp)| format!("{l} (E(S-1)+ = {pp:.3})"))
        .collect();
    ensure(bad.is_empty(), || format!("llogl bound at b = e exceeds the p = 1 bound on: {}", bad.join(", ")))?;
    Ok("llogl rhs <= p = 1 rhs on every run".into())
}

fn llogl_vs_corollary_threshold() -> Outcome {
    let rows = llogl_at_e();
    for (l, sharper, pp) in &rows {
        ensure(*sharper == (*pp >= LLOGL_SHARPER_THRESHOLD), || format!("{l}: sharper = {sharper}, E(S-1)+ = {pp}"))?;
    }
    let n = rows.iter().filter(|r| r.1).count();
    ensure(n > 0 && n < rows.len(), || format!("only one side of the condition exercised ({n}/{})", rows.len()))?;
    Ok(format!("ordering holds exactly when E(S-1)+ >= e - 2 ({n}/{} runs)", rows.len()))
}

fn quadrature() -> Outcome {
    let phi = OrliczSpec::Power { p: 2.0 };
    let mut worst: f64 = 0.0;
    for a in [0.0, 0.5, 1.0] {
        let mut x = a + 0.1;
        while x <= 10.0 + 1e-9 {
            let want = (x - a) * (x - a);
            for got in [phi.big_phi_a(a, x).unwrap(), phi.big_phi_a_quadrature(a, x).unwrap()] {
                worst = worst.max((got - want).abs());
            }
            x += 0.1;
        }
    }
    ensure(worst <= 1e-8, || format!("max error {worst:e}"))?;
    Ok(format!("max abs error {worst:.2e}"))
}

fn rank_order_oracle() -> Outcome {
    let mut rng = Stream::from_seed(77);
    let mut checked = 0;
    for _ in 0..200 {
        let dims: Vec<usize> = [4usize, 4, 3]
            .iter()
            .take(1 + (rng.next_u64() % 3) as usize)
            .map(|&m| 1 + (rng.next_u64() % m as u64) as usize)
            .collect();
        let bx = LatticeBox::from_dims(&dims).unwrap();
        let incr: Vec<f64> = (0..bx.len()).map(|_| rng.normal()).collect();
        let field = partial_sums(&bx, incr).unwrap();
        let mut sorted = field.values().to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        for j in 1..=sorted.len() + 2 {
            let want = sorted[(j - 1).min(sorted.len() - 1)];
            let got = rank_order(&field, j).unwrap();
            ensure(got.to_bits() == want.to_bits(), || format!("box {bx} j={j}: {got} vs {want}"))?;
            checked += 1;
        }
    }
    Ok(format!("200 fields, {checked} ranks exact"))
}

fn right_derivative() -> Outcome {
    let mut rng = Stream::from_seed(99);
    let (mut above, mut below) = (0, 0);
    for case in 0..1000 {
        let n = 1 + (rng.next_u64() % 8) as usize;
        let points: Vec<f64> = (0..n).map(|_| 4.0 * rng.normal()).collect();
        let t = 4.0 * rng.normal();
        let max = points.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let got = max_right_derivative_check(&points, t);
        if max > t {
            above += 1;
            ensure(got == 0, || format!("case {case}: max {max} > t {t} but got {got}"))?;
        } else if max < t {
            below += 1;
            ensure(got == 1, || format!("case {case}: max {max} < t {t} but got {got}"))?;
        }
    }
    Ok(format!("1000 cases ({above} with max > t, {below} with max < t)"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("examples.json");
    let mut outputs = Vec::new();
    for (i, workers) in [None, None, Some("1"), Some("3")].into_iter().enumerate() {
        let out = dir.path().join(format!("run{i}"));
        let (code, log) = demifield(&["suite", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], workers);
        ensure(code == 0, || format!("run {i} exit {code}: {log}"))?;
        outputs.push((std::fs::read(out.join("suite.json")).unwrap(), std::fs::read(out.join("suite.csv")).unwrap()));
    }
    for (i, o) in outputs.iter().enumerate().skip(1) {
        ensure(o == &outputs[0], || format!("run {i} differs from run 0"))?;
    }
    Ok(format!("4 runs ({} JSON bytes) identical, workers default/default/1/3", outputs[0].0.len()))
}

fn trends() -> Outcome {
    let report = run_suite(&load_suite("trends.json")).unwrap();
    let mut parts = Vec::new();
    for e in &report.entries {
        let t = match &e.outcome {
            Some(CheckOutcome::Trend { report }) => report,
            _ => return Err(format!("{}: {:?}", e.theorem, e.error)),
        };
        ensure(t.label == TREND_LABEL, || "missing diagnostic label".into())?;
        ensure(t.pattern_holds, || format!("{}: pattern not observed: {:?}", e.theorem, t.points))?;
        let values: Vec<String> = t.points.iter().map(|p| format!("{:.4}", p.value.mean)).collect();
        parts.push(format!("{} [{}]", e.theorem, values.join(" > ")));
    }
    let gates = run_suite(&load_suite("gates.json")).unwrap();
    ensure(gates.entries.iter().all(|e| e.error.is_some()), || "a precondition gate did not fire".into())?;
    Ok(format!("{}; {} precondition gates fire", parts.join("; "), gates.entries.len()))
}

fn main() {
    let criteria: Vec<(&str, &str, fn() -> Outcome)> = vec![
        ("1", "upcrossing remark reproduction", remark_reproduction),
        ("2", "demimartingale oracle, per-cell z = 3", demimartingale_oracle_criterion),
        ("2b", "demimartingale oracle, family-wise z = 4.73", demimartingale_oracle_familywise),
        ("3", "inequality suite", inequality_suite),
        ("4", "constants", constants),
        ("5a", "corollary vs cairoli ordering", corollary_vs_cairoli),
        ("5b", "llogl vs p=1 ordering, literal (E(S-1)+ >= 0)", llogl_vs_corollary_literal),
        ("5c", "llogl vs p=1 ordering, exact condition (E(S-1)+ >= e-2)", llogl_vs_corollary_threshold),
        ("6", "quadrature", quadrature),
        ("7", "rank order oracle", rank_order_oracle),
        ("8", "right-derivative lemma", right_derivative),
        ("9", "determinism", determinism),
        ("10", "trend diagnostics", trends),
    ];
    let mut unexpected = Vec::new();
    for (id, name, f) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {id:<3} PASS  {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                let tag = if EXPECTED_FAIL.contains(&id) { "FAIL (expected)" } else { "FAIL" };
                println!("criterion {id:<3} {tag}  {name}: {detail} ({secs:.1}s)");
                if !EXPECTED_FAIL.contains(&id) {
                    unexpected.push(id);
                }
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
