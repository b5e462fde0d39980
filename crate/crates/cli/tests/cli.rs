use std::path::Path;
use std::process::{Command, Output};

fn relweyl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relweyl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn exponents_writes_csv_to_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = relweyl(&["exponents", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("exponents.csv")).unwrap();
    assert!(csv.starts_with("quantity,value\n"));
    assert!(csv.contains("eta_star,3.714285714285714"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("PASS integrability"));
}

#[test]
fn stdout_is_used_without_out_dir() {
    let out = relweyl(&["classical", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let report = relweyl::lab::Report::from_json(&text).unwrap();
    assert_eq!(report.experiment, relweyl::lab::ExperimentKind::Classical);
}

#[test]
fn relative_csv_has_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[ladder]\nratio = 0.5\ncount = 4\n[grid]\npoints = 1500\n",
    );
    let out = relweyl(&["relative", "--config", &config]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "h,trace1,trace2,diff,scaled_diff,classical_relative,residual,grid_N,channels_used"
    );
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[potential]\nno_such_field = 1\n");
    assert_eq!(
        relweyl(&["trace-neg", "--config", &config]).status.code(),
        Some(2)
    );
    assert_eq!(
        relweyl(&["trace-neg", "--config", "/nonexistent/config.toml"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        relweyl(&["trace-neg", "--format", "xml"]).status.code(),
        Some(2)
    );
    assert_eq!(
        relweyl(&["ims-check", "--threads", "0"]).status.code(),
        Some(2)
    );
    let config = write_config(dir.path(), "kind = \"weyl\"\n");
    assert_eq!(
        relweyl(&["relative", "--config", &config]).status.code(),
        Some(2)
    );
}

#[test]
fn inadmissible_parameters_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[exponents]\ns = 1.45\n");
    let out = relweyl(&[
        "exponents",
        "--config",
        &config,
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(
        dir.path().join("exponents.csv").exists(),
        "the report is still written"
    );

    let config = write_config(dir.path(), "[pair]\nr = 1.2\n[pair.second]\ns = 1.3\nmu = 1.0\n[pair.second.perturbation]\na = 0.5\np = 1.2\n");
    assert_eq!(
        relweyl(&["relative", "--config", &config]).status.code(),
        Some(3)
    );
}

#[test]
fn failed_numeric_checks_exit_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[gse]\ntolerance = 0.0\n");
    let out = relweyl(&["gse-scaling", "--config", &config]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL gse_exponent"));
}

#[test]
fn seed_flag_changes_random_draws_only() {
    let a = relweyl(&["ims-check", "--seed", "1"]).stdout;
    let b = relweyl(&["ims-check", "--seed", "1"]).stdout;
    let c = relweyl(&["ims-check", "--seed", "2"]).stdout;
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn output_is_independent_of_thread_count() {
    for format in ["csv", "json"] {
        let runs: Vec<Vec<u8>> = ["1", "4", "8"]
            .iter()
            .map(|t| relweyl(&["gse-scaling", "--format", format, "--threads", t]).stdout)
            .collect();
        assert!(!runs[0].is_empty());
        assert!(runs.windows(2).all(|w| w[0] == w[1]), "{format}");
    }
}
