use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use siegel_core::tables::entries;
use siegel_verify::{classify, mobius, parse_n_list, parse_tolerance, run, CliError, Status, Suite, SuiteConfig};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_siegel-verify"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn temp_json(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".json").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn path(f: &tempfile::NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

fn small(suites: &[Suite]) -> SuiteConfig {
    SuiteConfig {
        n_list: vec![1, 2, 3],
        samples: 8,
        suites: suites.to_vec(),
        ..SuiteConfig::default()
    }
}

#[test]
fn structured_output_is_byte_identical() {
    let args = ["run", "--n", "1..3", "--samples", "12", "--seed", "7", "--format", "structured"];
    let a = bin(&args);
    let b = bin(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    let other = bin(&["run", "--n", "1..3", "--samples", "12", "--seed", "8", "--format", "structured"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn suite_selection_does_not_change_numbers() {
    let all = run(&small(&Suite::ALL)).unwrap();
    let one = run(&small(&[Suite::Potential])).unwrap();
    let from_all: Vec<_> = all.checks.iter().filter(|c| c.suite == "potential").collect();
    assert_eq!(from_all.len(), one.checks.len());
    for (a, b) in from_all.into_iter().zip(&one.checks) {
        assert_eq!(a, b);
    }
}

#[test]
fn default_suites_pass_in_small_dimensions() {
    let report = run(&small(&Suite::ALL)).unwrap();
    let failed: Vec<_> = report.checks.iter().filter(|c| c.status == Status::Fail).collect();
    assert!(failed.is_empty(), "{failed:#?}");
    assert!(report.passed());
    assert_eq!(report.summary.total, report.checks.len());
}

#[test]
fn tables_report_one_line_per_entry() {
    let out = bin(&["run", "--suite", "tables", "--n", "3", "--samples", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text
        .lines()
        .filter(|l| l.split_whitespace().nth(1).is_some_and(|w| w.starts_with("tables.")))
        .collect();
    let want = entries(3, 1.0);
    assert_eq!(lines.len(), want.len());
    for e in &want {
        let name = format!("tables.{} ", e.label());
        assert!(lines.iter().any(|l| l.contains(&name)), "{name}");
    }
}

#[test]
fn swap_misprints_are_warnings_with_deviations() {
    let report = run(&SuiteConfig {
        n_list: vec![3],
        samples: 2,
        suites: vec![Suite::Tables],
        ..SuiteConfig::default()
    })
    .unwrap();
    let warned: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| c.status == Status::Warn)
        .map(|c| c.name.as_str())
        .collect();
    assert_eq!(warned, ["tables.swap_2 T2_1", "tables.swap_2 T3_1", "tables.swap_2 W_1"]);
    assert_eq!(report.deviations.len(), 3);
    assert_eq!(report.deviations[0].observed, "T2_2");
    assert!(report.passed());
}

#[test]
fn tilde_constants_are_warnings() {
    let report = run(&SuiteConfig {
        n_list: vec![2],
        samples: 20,
        suites: vec![Suite::Grading],
        ..SuiteConfig::default()
    })
    .unwrap();
    for name in ["grading.directional_Tt", "grading.directional_Tt2_1", "grading.directional_Tt3_1"] {
        let c = report.checks.iter().find(|c| c.name == name).unwrap();
        assert_eq!(c.status, Status::Warn, "{name}");
        assert!(report.deviations.iter().any(|d| d.check == name));
    }
    let tt3 = report.deviations.iter().find(|d| d.check == "grading.directional_Tt3_1").unwrap();
    assert_eq!(tt3.observed, "-2(n+1) Im w_k");
}

#[test]
fn every_check_has_an_anchor() {
    let report = run(&small(&Suite::ALL)).unwrap();
    for c in &report.checks {
        assert!(!c.anchor.is_empty(), "{}", c.name);
        assert!(c.name.starts_with(&format!("{}.", c.suite)), "{}", c.name);
    }
}

#[test]
fn tolerance_overrides_apply_and_unknown_names_are_rejected() {
    let mut cfg = small(&[Suite::Metric]);
    cfg.tolerances.insert("metric.einstein".into(), 0.0);
    let report = run(&cfg).unwrap();
    let c = report.checks.iter().find(|c| c.name == "metric.einstein").unwrap();
    assert_eq!(c.tolerance, 0.0);
    assert_eq!(c.status, Status::Fail);

    cfg.tolerances.insert("metric.no_such_check".into(), 1.0);
    assert!(matches!(run(&cfg), Err(CliError::InvalidConfig(_))));

    let out = bin(&["run", "--suite", "metric", "--n", "2", "--tol", "metric.nope=1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = bin(&["run", "--suite", "metric", "--n", "2", "--samples", "5", "--tol", "metric.einstein=0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_arguments_exit_with_two() {
    for args in [
        vec!["run", "--suite", "geometry"],
        vec!["run", "--n", "0"],
        vec!["run", "--n", "x"],
        vec!["run", "--samples", "0"],
        vec!["run", "--format", "xml"],
        vec!["run", "--tol", "metric.einstein"],
        vec!["classify", "--input", "/nonexistent/file.json"],
        vec!["frobnicate"],
    ] {
        let out = bin(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn parsers() {
    assert_eq!(parse_n_list("1..4").unwrap(), vec![1, 2, 3, 4]);
    assert_eq!(parse_n_list("1..=2").unwrap(), vec![1, 2]);
    assert_eq!(parse_n_list("2,5").unwrap(), vec![2, 5]);
    assert!(parse_n_list("4..1").is_err());
    assert_eq!(parse_tolerance("tables.swap_2 T2_1=1e-8").unwrap(), ("tables.swap_2 T2_1".into(), 1e-8));
    assert!(parse_tolerance("metric.einstein=abc").is_err());
}

#[test]
fn malformed_mobius_file_reports_position() {
    let f = temp_json("{\n  \"mobius\": [1, 0, 0,\n    0, 1, oops]\n}\n");
    let out = bin(&["mobius", "--input", path(&f)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("column"), "{err}");

    match mobius("{\"mobius\": [1, 2, 3, 4, 5]}") {
        Err(CliError::InvalidConfig(msg)) => assert!(msg.contains("mobius"), "{msg}"),
        other => panic!("{other:?}"),
    }
    match mobius("{\"mobius\": [1, 0, 0, [0, 1, 2], 1, 0, 0, 0, 1]}") {
        Err(CliError::InvalidConfig(msg)) => assert!(msg.contains("line 1"), "{msg}"),
        other => panic!("{other:?}"),
    }
    assert!(matches!(mobius("{\"mobius\": [0, 0, 0, 0]}"), Err(CliError::InvalidConfig(_))));
}

#[test]
fn mobius_files_are_checked() {
    let inputs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../inputs/cayley_n2.json");
    let out = bin(&["mobius", "--input", inputs.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));

    let id = temp_json("{\"mobius\": [1, 0, 0, 0, 1, 0, 0, 0, 1]}");
    let out = bin(&["mobius", "--input", path(&id), "--format", "structured"]);
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["summary"]["failed"], 1);

    let rotated = mobius("{\"mobius\": [1, 0, 0, 0, 1, [0.5403023058681398, 0.8414709848078965], 0, [-0.5403023058681398, 0.8414709848078965], 1]}")
        .unwrap();
    assert!(rotated.passed(), "{}", rotated.to_text());
}

fn detail<'a>(r: &'a siegel_verify::Report, name: &str) -> &'a serde_json::Value {
    &r.details.iter().find(|d| d.0 == name).unwrap().1
}

#[test]
fn classify_psi0_is_canonical_with_unit_scale() {
    let r = classify("{\"n\": 2, \"base\": \"psi0\"}").unwrap();
    assert!(r.passed(), "{}", r.to_text());
    assert_eq!(detail(&r, "verdict"), "Canonical");
    assert!((detail(&r, "r").as_f64().unwrap() - 1.0).abs() <= 1e-9);
    let names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(
        names,
        [
            "classify.norm_spread",
            "classify.w_fit",
            "classify.tilde_components",
            "classify.kill_residual",
            "classify.d_component",
            "classify.constancy"
        ]
    );
}

#[test]
fn classify_linear_correction_is_not_constant_norm() {
    let r = classify("{\"n\": 2, \"f\": [{\"exponents\": [1, 0], \"re\": 0.1, \"im\": 0.0}]}").unwrap();
    assert_eq!(detail(&r, "verdict"), "NotConstantNorm");
    assert!(!r.passed());
}

#[test]
fn classify_sigma_needs_isotropy_then_is_canonical() {
    let r = classify("{\"n\": 2, \"generators\": [\"sigma\"]}").unwrap();
    assert_eq!(detail(&r, "verdict"), "NeedsIsotropy");
    let r = classify("{\"n\": 2, \"generators\": [\"sigma\"], \"isotropy\": [\"sigma\"]}").unwrap();
    assert_eq!(detail(&r, "verdict"), "Canonical");
    assert!((detail(&r, "r").as_f64().unwrap() - 1.0).abs() <= 1e-9);
}

#[test]
fn classify_recovers_scale_of_moved_potential() {
    let text = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../inputs/moved.json")).unwrap();
    let r = classify(&text).unwrap();
    assert!(r.passed(), "{}", r.to_text());
    let want = 2.5 * (-2.0f64 * 4.0 * 0.1).exp();
    assert!((detail(&r, "r").as_f64().unwrap() - want).abs() <= 1e-9 * want);
}

#[test]
fn classify_ball_base() {
    let r = classify("{\"n\": 3, \"base\": \"phi0\", \"r\": 0.5}").unwrap();
    assert!(r.passed(), "{}", r.to_text());
    assert!((detail(&r, "r").as_f64().unwrap() - 0.5).abs() <= 1e-9);
}

#[test]
fn classify_rejects_bad_descriptions() {
    for text in [
        "{\"n\": 2, \"base\": \"chi0\"}",
        "{\"n\": 0}",
        "{\"n\": 2, \"r\": -1}",
        "{\"n\": 2, \"generators\": [{\"swap\": {\"k\": 3}}]}",
        "{\"n\": 2, \"generators\": [{\"unitary\": [[1, 0], [0, 1]]}]}",
        "{\"n\": 2, \"f\": [{\"exponents\": [1, 0, 0], \"re\": 1.0, \"im\": 0.0}]}",
        "{\"n\": 2, \"colour\": 1}",
    ] {
        assert!(matches!(classify(text), Err(CliError::InvalidConfig(_))), "{text}");
    }
    let err = classify("{\"n\": 2, \"generators\": [\"sigma\", {\"swap\": {\"k\": 9}}]}").unwrap_err();
    assert!(err.to_string().contains("generators[1]"), "{err}");
}

#[test]
fn classify_with_kappa_propagates_the_core_error() {
    let f = temp_json("{\"n\": 2, \"kappa\": 2.0}");
    let out = bin(&["classify", "--input", path(&f)]);
    assert_eq!(out.status.code(), Some(1));
}
