use bdie::runner::{convergence_levels, run, GeometryConfig, RunConfig, Suite, DEFAULT_SEED, SCHEMA_VERSION};
use bdie::verify::{Resolution, SolveMethodConfig};
use bdie::Error;

#[test]
fn defaults() {
    let c = RunConfig::from_json("{}").unwrap();
    assert_eq!(c.schema_version, SCHEMA_VERSION);
    assert_eq!(c.geometry.resolution(), Resolution::default_level());
    assert_eq!(c.case, "exp-linear");
    assert_eq!(c.suites, vec![Suite::Solve]);
    assert_eq!(c.seed, DEFAULT_SEED);
    assert_eq!(c.solver.method, SolveMethodConfig::Dense);
    assert!(c.validate().is_ok());
}

#[test]
fn validation_errors() {
    for body in [
        r#"{"geometry": {"radius": 1.0, "n_polar": 9, "n_azimuth": 16, "n_r": 4}}"#,
        r#"{"geometry": {"radius": -1.0, "n_polar": 8, "n_azimuth": 16, "n_r": 4}}"#,
        r#"{"solver": {"method": "gmres", "tol": 0.0, "max_iter": 10, "restart": 5}}"#,
        r#"{"suites": []}"#,
        r#"{"case": "cubic"}"#,
        r#"{"coefficient": {"name": "const", "params": [-1.0]}}"#,
        r#"{"schema_version": 2}"#,
    ] {
        let c = RunConfig::from_json(body).unwrap();
        assert!(matches!(c.validate(), Err(Error::Config(_))), "{body}");
    }
    assert!(matches!(RunConfig::from_json(r#"{"extra": true}"#), Err(Error::Config(_))));
    assert!(matches!("plots".parse::<Suite>(), Err(Error::Config(_))));
    assert_eq!("spectrum".parse::<Suite>().unwrap(), Suite::Spectrum);
}

#[test]
fn coefficient_override() {
    let c = RunConfig::from_json(r#"{"case": "laplace-linear", "coefficient": {"name": "const", "params": [3.0]}}"#).unwrap();
    let case = c.validate().unwrap();
    assert_eq!(case.coefficient.params(), vec![3.0]);
}

#[test]
fn convergence_levels_scale_the_configured_mesh() {
    let levels = convergence_levels(&GeometryConfig::default());
    assert_eq!(levels, vec![Resolution::coarse(), Resolution::medium(), Resolution::default_level()]);
    let odd = convergence_levels(&GeometryConfig { radius: 1.0, n_polar: 10, n_azimuth: 20, n_r: 5 });
    assert!(odd.iter().all(|r| r.n_polar % 2 == 0));
}

#[test]
fn spectrum_run_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig {
        geometry: GeometryConfig { radius: 1.0, n_polar: 16, n_azimuth: 32, n_r: 4 },
        suites: vec![Suite::Spectrum],
        output_dir: dir.path().to_path_buf(),
        ..RunConfig::default()
    };
    let summary = run(&config).unwrap();
    assert!(summary.passed, "{:?}", summary.failed);
    assert!(dir.path().join("spectrum.csv").exists());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(json["seed"], DEFAULT_SEED);
}
