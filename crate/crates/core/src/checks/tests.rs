//! Properties shared by every check.

use super::*;
use crate::fields::Dist;
use crate::funcs::NondecreasingSpec;

fn normal33() -> GeneratorSpec {
    GeneratorSpec::iid(Dist::Normal, &[3, 3]).unwrap()
}

fn lognormal33() -> GeneratorSpec {
    GeneratorSpec::product(Dist::Lognormal { sigma: 0.3 }, 1.0, &[3, 3]).unwrap()
}

#[test]
fn reruns_are_bit_identical() {
    let cfg = CheckConfig::new(lognormal33(), Theorem::CairoliMoment { p: 2.0 }).replicates(3_000).seed(9);
    let a = serde_json::to_string(&cfg.run(0).unwrap()).unwrap();
    let b = serde_json::to_string(&cfg.run(0).unwrap()).unwrap();
    assert_eq!(a, b);
    let other = serde_json::to_string(&cfg.clone().seed(10).run(0).unwrap()).unwrap();
    assert_ne!(a, other);
}

#[test]
fn worker_count_does_not_change_results() {
    let cfg = CheckConfig::new(lognormal33(), Theorem::CairoliProb { eps: vec![1.0, 2.0] }).replicates(2_000).seed(4);
    let run_with = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
            .install(|| serde_json::to_string(&cfg.run(0).unwrap()).unwrap())
    };
    assert_eq!(run_with(1), run_with(4));
}

#[test]
fn deterministic_generators_have_zero_se() {
    let spec = GeneratorSpec::constant(1.0, &[2, 3]).unwrap();
    let cases = [
        Theorem::CairoliMoment { p: 2.0 },
        Theorem::MomentCorollary { p: 1.0 },
        Theorem::Harremoes { c: 1.0 },
        Theorem::OrliczProb { lambda: vec![0.5], x: 2.0 },
        Theorem::UpcrossBound { directions: None, a: 0.0, b: 1.0 },
    ];
    for t in cases {
        let out = CheckConfig::new(spec.clone(), t.clone()).replicates(8).run(1).unwrap();
        for r in out.reports() {
            assert_eq!((r.lhs.se, r.rhs.se, r.margin_se), (0.0, 0.0, 0.0), "{t:?}");
            assert!(r.lhs.reliable && r.rhs.reliable);
            assert_eq!(r.verdict, Verdict::Hold, "{t:?}");
        }
    }
}

#[test]
fn tail_frequencies_fall_with_eps() {
    let eps = vec![0.25, 0.5, 1.0, 2.0, 4.0];
    let cases = [
        (lognormal33(), Theorem::CairoliProb { eps: eps.clone() }),
        (normal33(), Theorem::DoobIndicator { eps: eps.clone(), extremum: Extremum::Max }),
        (
            normal33(),
            Theorem::Chow {
                eps: eps.clone(),
                g: ConvexSpec::Power { p: 2.0 },
                weights: ArraySpec::Product { power: -1.0 },
            },
        ),
        (normal33(), Theorem::HajekRenyi { eps: eps.clone(), weights: ArraySpec::Constant { value: 1.0 } }),
        (
            normal33(),
            Theorem::RankOrder { j: 2, g: NondecreasingSpec::Identity, eps: eps.clone() },
        ),
    ];
    for (spec, t) in cases {
        let reports = CheckConfig::new(spec, t.clone()).replicates(2_000).run(2).unwrap().into_reports();
        let freq: Vec<f64> = reports
            .iter()
            .filter_map(|r| r.extras.get("tail_frequency").and_then(|v| v.as_f64()))
            .collect();
        assert!(freq.len() >= eps.len(), "{t:?} reports no tail_frequency");
        for w in freq.windows(2) {
            assert!(w[1] <= w[0], "{t:?}: {freq:?}");
        }
    }
}

#[test]
fn single_direction_min_is_its_sum() {
    let spec = GeneratorSpec::iid(Dist::Normal, &[6]).unwrap();
    let t = Theorem::Chow { eps: vec![1.0], g: ConvexSpec::Power { p: 2.0 }, weights: ArraySpec::Constant { value: 1.0 } };
    let r = CheckConfig::new(spec, t).replicates(1_000).run(0).unwrap().into_reports();
    let per = r[0].extras["per_direction_rhs"].as_array().unwrap();
    assert_eq!(per.len(), 1);
    assert_eq!(per[0].as_f64().unwrap(), r[0].rhs.mean);
}

#[test]
fn negative_control_is_violated() {
    let r = CheckConfig::new(normal33(), Theorem::NegativeControl {}).replicates(1_000).run(0).unwrap();
    assert!(r.reports().iter().all(|x| x.verdict == Verdict::Violation));
}

#[test]
fn config_round_trips_and_echoes() {
    let json = r#"{
        "generator": {"model": "iid_partial_sum", "dist": "normal", "box": [3, 3]},
        "theorem": "chow", "g": {"kind": "power", "p": 2.0}, "eps": [0.5],
        "weights": {"kind": "product", "power": -1.0}, "replicates": 500
    }"#;
    let cfg: CheckConfig = serde_json::from_str(json).unwrap();
    assert_eq!(cfg.theorem.id(), "chow");
    let r = cfg.run(77).unwrap().into_reports();
    assert_eq!(r[0].seed, 77);
    assert_eq!(r[0].params["seed"], 77);
    assert_eq!(r[0].params["z"], DEFAULT_Z);
    assert_eq!(r[0].params["theorem"], "chow");
    let back: CheckConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn theorem_ids_cover_every_variant() {
    for id in THEOREM_IDS {
        assert!(!id.is_empty());
    }
    assert_eq!(Theorem::NegativeControl {}.id(), "negative_control");
    assert_eq!(THEOREM_IDS.len(), 16);
}

#[test]
fn bad_settings_are_rejected() {
    let cfg = CheckConfig::new(normal33(), Theorem::CairoliProb { eps: vec![1.0] });
    assert!(cfg.clone().replicates(1).run(0).is_err());
    assert!(cfg.clone().z(0.0).run(0).is_err());
    assert!(CheckConfig::new(normal33(), Theorem::CairoliProb { eps: vec![-1.0] }).run(0).is_err());
}
