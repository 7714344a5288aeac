use super::*;

fn suite(dims: Vec<usize>, seed: u64) -> ScenarioConfig {
    ScenarioConfig { dims, seed, ..ScenarioConfig::new(Command::Suite) }
}

#[test]
fn parses_minimal_config_with_defaults() {
    let cfg = ScenarioConfig::from_json(r#"{"command": "suite"}"#).unwrap();
    assert_eq!(cfg.dims, vec![2, 4, 6, 8]);
    assert_eq!(cfg.seed, 42);
    assert_eq!(cfg.tolerances, Tolerances::default());
    let cfg = ScenarioConfig::from_json(r#"{"command": "shift", "route": "rank1", "tolerances": {"boundary": 0.1}}"#).unwrap();
    assert_eq!(cfg.route, Some(Route::RankOne));
    assert_eq!(cfg.tolerances.boundary, 0.1);
    assert_eq!(cfg.tolerances.algebraic, 1e-10);
}

#[test]
fn config_errors_carry_field_paths() {
    let path = |text: &str| match ScenarioConfig::from_json(text) {
        Err(Error::Config { path, .. }) => path,
        other => panic!("expected config error, got {other:?}"),
    };
    assert_eq!(path(r#"{"command": "suite", "bogus": 1}"#), "bogus");
    assert_eq!(path(r#"{"command": "suite", "tolerances": {"algebra": 1}}"#), "tolerances.algebra");
    assert_eq!(path(r#"{"command": "suite", "dims": [2, "x"]}"#), "dims[1]");
    assert_eq!(path(r#"{"command": "suite", "dims": [2, 0]}"#), "dims[1]");
    assert_eq!(path(r#"{"command": "nope"}"#), "command");
    assert_eq!(path(r#"{"command": "shift", "grid": "0:1"}"#), "grid");
    assert_eq!(path(r#"{"command": "shift", "epsilon": -1}"#), "epsilon");
    assert_eq!(path(r#"{"command": "suite", "trials": 0}"#), "trials");
    assert_eq!(path(r#"{"command": "suite", "inputs": {"c": "x"}}"#), "inputs.c");
}

#[test]
fn empty_report_is_valid_json() {
    let report = Recorder::default().finish(Command::Cotlar, ScenarioConfig::new(Command::Cotlar));
    let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(v["checks"], serde_json::json!([]));
    assert_eq!(v["passed"], serde_json::json!(true));
}

#[test]
fn check_relations() {
    assert!(Check::new("a", Relation::Le, 1.0, 1.0 + 1e-12, 1e-10).pass);
    assert!(!Check::new("a", Relation::Le, 1.0, 1.1, 1e-10).pass);
    assert!(Check::new("a", Relation::Ge, 1.5, 1.6, 0.0).pass);
    assert!(!Check::new("a", Relation::Eq, 0.0, f64::NAN, 1.0).pass);
    let mut w = Worst::default();
    assert_eq!(w.get(), 0.0);
    w.push(1.0);
    w.push(f64::NAN);
    w.push(2.0);
    assert!(w.get().is_nan());
}

#[test]
fn shift_counting_one_by_one() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    std::fs::write(&a, r#"{"dim": 1, "re": [[1.0]]}"#).unwrap();
    std::fs::write(&b, r#"{"dim": 1, "re": [[0.0]]}"#).unwrap();
    let mut cfg = ScenarioConfig::new(Command::Shift);
    cfg.inputs = Inputs { a: Some(a), b: Some(b), ..Inputs::default() };
    let report = run(&cfg).unwrap();
    assert!(report.passed);
    assert_eq!(report.artifacts["xi.csv"], "lambda,xi\n0,1\n1,0\n");
}

#[test]
fn every_command_runs_on_seeded_inputs() {
    for command in Command::ALL {
        if command == Command::Suite {
            continue;
        }
        let mut cfg = ScenarioConfig { dims: vec![3], trials: Some(2), ..ScenarioConfig::new(command) };
        if command == Command::Shift {
            for route in [Route::Counting, Route::Arctan, Route::ArctanExtrapolated, Route::Fourier, Route::RankOne] {
                cfg.route = Some(route);
                cfg.epsilon = Some(0.05);
                let r = run(&cfg).unwrap();
                assert!(r.passed, "{route:?}: {:?}", r.failing().collect::<Vec<_>>());
                assert!(r.artifacts["xi.csv"].starts_with("lambda,xi\n"));
            }
            continue;
        }
        let r = run(&cfg).unwrap();
        assert!(r.passed, "{command:?}: {:?}", r.failing().collect::<Vec<_>>());
        assert!(!r.artifacts.is_empty());
    }
}

#[test]
fn rank1_route_rejects_generic_pairs() {
    let cfg = ScenarioConfig { dims: vec![3], route: Some(Route::RankOne), ..ScenarioConfig::new(Command::Shift) };
    let mut generic = cfg.clone();
    generic.route = Some(Route::RankOne);
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    std::fs::write(&a, r#"{"dim": 2, "re": [[1.0, 0.0], [0.0, 2.0]]}"#).unwrap();
    std::fs::write(&b, r#"{"dim": 2, "re": [[0.0, 0.0], [0.0, 0.0]]}"#).unwrap();
    generic.inputs = Inputs { a: Some(a), b: Some(b), ..Inputs::default() };
    assert!(matches!(run(&generic), Err(Error::Domain(_))));
    assert!(run(&cfg).unwrap().passed);
}

#[test]
fn suite_passes_on_one_by_one_matrices() {
    let report = run(&suite(vec![1], 7)).unwrap();
    assert!(report.passed, "{:?}", report.failing().collect::<Vec<_>>());
}

#[test]
fn suite_report_is_deterministic() {
    let cfg = ScenarioConfig { trials: Some(1), ..suite(vec![2, 3], 5) };
    let (r1, r2) = (run(&cfg).unwrap(), run(&cfg).unwrap());
    assert_eq!(r1.to_json(), r2.to_json());
    let mut names: Vec<&str> = r1.checks.iter().map(|c| c.name.as_str()).collect();
    let total = names.len();
    names.sort_unstable();
    names.dedup();
    assert_eq!(names.len(), total);
}

#[test]
fn emit_writes_report_and_artifacts() {
    let mut rec = Recorder::default();
    rec.le("x", 0.0, 1.0, 0.0);
    rec.artifact("xi.csv", "lambda,xi\n".into());
    let report = rec.finish(Command::Shift, ScenarioConfig::new(Command::Shift));
    let dir = tempfile::tempdir().unwrap();
    emit_report(&report, dir.path().join("out")).unwrap();
    let text = std::fs::read_to_string(dir.path().join("out/report.json")).unwrap();
    assert!(text.contains("\"artifacts\": [\n    \"xi.csv\"\n  ]"));
    assert_eq!(std::fs::read_to_string(dir.path().join("out/xi.csv")).unwrap(), "lambda,xi\n");
}
