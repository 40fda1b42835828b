use serde_json::Value;
use stl_core::experiments::{self, input_hash, Command, ExperimentConfig, Report, WEYL_LADDER};
use stl_core::Error;

fn config(command: Command, trials: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(command, 99);
    cfg.trials = trials;
    cfg
}

#[test]
fn every_command_passes_on_defaults() {
    for command in [Command::TraceCheck, Command::DetCompare, Command::Continuity, Command::FactorCheck] {
        let out = experiments::run(&config(command, 12)).unwrap();
        assert!(out.report.pass(), "{command}: {}", out.report.to_json());
        assert_eq!(out.report.results.len(), 12);
        assert_eq!(out.csv.is_some(), command == Command::DetCompare);
    }
}

#[test]
fn trial_seeds_do_not_depend_on_the_trial_count() {
    let short = experiments::trace_check(&config(Command::TraceCheck, 3)).unwrap();
    let long = experiments::trace_check(&config(Command::TraceCheck, 6)).unwrap();
    assert_eq!(short.results[..], long.results[..3]);
}

#[test]
fn report_layout() {
    let report = experiments::trace_check(&config(Command::TraceCheck, 2)).unwrap();
    let v: Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(v["command"], "trace-check");
    assert_eq!(v["input_hash"].as_str().unwrap(), input_hash(&report.config));
    assert_eq!(v["exploratory"], false);
    assert_eq!(v["config"]["seed"], 99);
    let trial = &v["results"][1];
    assert_eq!(trial["trial"], 1);
    assert!(trial["seed"].is_u64());
    assert!(trial["abs_diff"].is_f64());
    assert_eq!(trial["nuclear_trace"].as_array().unwrap().len(), 2);
    assert_eq!(v["summary"]["pass"], true);
    assert_eq!(v["summary"]["trials"], 2);
    assert_eq!(serde_json::from_value::<Report>(v).unwrap(), report);
}

#[test]
fn det_compare_table() {
    let (report, csv) = experiments::det_compare(&config(Command::DetCompare, 3)).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "trial,z_re,z_im,product,newton,series,max_pairwise_diff");
    assert_eq!(lines.len(), 1 + 3 * experiments::Z_GRID_RADII * experiments::Z_GRID_ANGLES);
    assert!(lines[1].starts_with("0,0,0,1+0i,1+0i,1+0i,"));
    assert_eq!(report.summary.metrics["series_skipped"], 0);
}

#[test]
fn weyl_scan_on_the_diagonal_case() {
    let mut cfg = config(Command::WeylScan, 1);
    cfg.s = 2.0 / 3.0;
    let report = experiments::weyl_scan(&cfg).unwrap();
    assert!(report.pass(), "{}", report.to_json());
    assert_eq!(report.results.len(), 2 * WEYL_LADDER.len());
    let by_n = report.summary.metrics["max_ratio_by_n"].as_array().unwrap();
    assert_eq!(by_n.len(), WEYL_LADDER.len());
    // the diagonal family has spectrum equal to its coefficients, so its ratio is
    // ||lambda||_{1,s} / ||lambda||_{r,s} <= 1
    for r in report.results.iter().filter(|r| r.metrics["family"] == "diagonal") {
        assert!(r.get_f64("ratio").unwrap() <= 1.0 + 1e-12);
    }
}

#[test]
fn off_surface_runs_are_flagged() {
    let mut cfg = config(Command::TraceCheck, 2);
    cfg.r = 0.9;
    assert!(matches!(experiments::run(&cfg), Err(Error::InadmissibleExponents(_))));
    cfg.unsafe_exponents = true;
    let out = experiments::run(&cfg).unwrap();
    assert!(out.report.exploratory);
}

#[test]
fn writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = experiments::run(&config(Command::DetCompare, 2)).unwrap();
    let written = out.write(&dir.path().join("grid.csv")).unwrap();
    assert_eq!(written.len(), 2);
    assert!(written[1].ends_with("grid.summary.json"));
    let body = std::fs::read_to_string(&written[1]).unwrap();
    assert_eq!(body, out.report.to_json());
    let csv = std::fs::read_to_string(&written[0]).unwrap();
    assert_eq!(Some(csv), out.csv);
}

#[test]
fn reruns_are_byte_identical() {
    for command in [Command::Continuity, Command::FactorCheck] {
        let cfg = config(command, 8);
        assert_eq!(experiments::run(&cfg).unwrap().report.to_json(), experiments::run(&cfg).unwrap().report.to_json());
    }
}
