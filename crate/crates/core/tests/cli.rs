use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_knapsack-moea"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn gen_writes_instance_and_reports_discrepancies() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["gen", "--family", "instance2", "--n", "16", "-o", "i2.json"],
    );
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(
        out.contains("XLOC Weight: claimed 32, evaluated 17.5"),
        "{out}"
    );
    let text = fs::read_to_string(dir.path().join("i2.json")).unwrap();
    assert!(text.contains("\"family\": \"instance2\""));
}

#[test]
fn gen_rejects_bad_parameters_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "gen",
            "--family",
            "instance1",
            "--alpha",
            "0.7",
            "--n",
            "21",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("n = 21") && err.contains("7.35"), "{err}");
}

#[test]
fn exact_reports_optimum_and_capacity_limit() {
    let dir = tempfile::tempdir().unwrap();
    run(
        dir.path(),
        &[
            "gen",
            "--family",
            "instance1",
            "--alpha",
            "0.5",
            "--n",
            "20",
            "-o",
            "i1.json",
        ],
    );
    let o = run(dir.path(), &["exact", "i1.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("optimum: 20"));

    run(
        dir.path(),
        &["gen", "--family", "random", "--n", "30", "-o", "r.json"],
    );
    assert_eq!(run(dir.path(), &["exact", "r.json"]).status.code(), Some(3));
    run(
        dir.path(),
        &[
            "gen",
            "--family",
            "random-integer",
            "--n",
            "30",
            "-o",
            "ri.json",
        ],
    );
    let o = run(dir.path(), &["exact", "ri.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("dynamic"), "{}", stdout(&o));
}

#[test]
fn missing_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        run(dir.path(), &["exact", "nope.json"]).status.code(),
        Some(2)
    );
}

#[test]
fn greedy_on_instance2() {
    let dir = tempfile::tempdir().unwrap();
    run(
        dir.path(),
        &["gen", "--family", "instance2", "--n", "16", "-o", "i2.json"],
    );
    let o = run(dir.path(), &["greedy", "i2.json"]);
    assert!(
        stdout(&o).contains("ratio 0.562591552734375"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn moea_zero_generations_records_initial_population() {
    let dir = tempfile::tempdir().unwrap();
    run(
        dir.path(),
        &["gen", "--family", "instance2", "--n", "16", "-o", "i2.json"],
    );
    let o = run(
        dir.path(),
        &[
            "moea", "i2.json", "--init", "greedy", "--N", "8", "--gens", "0", "--seed", "1",
        ],
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("0.562591552734375"));
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn moea_rejects_bad_population_size() {
    let dir = tempfile::tempdir().unwrap();
    run(
        dir.path(),
        &["gen", "--family", "instance2", "--n", "16", "-o", "i2.json"],
    );
    let o = run(
        dir.path(),
        &[
            "moea", "i2.json", "--init", "greedy", "--N", "6", "--gens", "5",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn single_trial_experiment_matches_moea_run() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    run(
        p,
        &[
            "gen",
            "--family",
            "instance1",
            "--alpha",
            "0.5",
            "--n",
            "20",
            "-o",
            "i1.json",
        ],
    );
    let o = run(
        p,
        &[
            "moea",
            "i1.json",
            "--init",
            "adversarial",
            "--N",
            "20",
            "--gens",
            "200",
            "--seed",
            "9",
            "-o",
            "single.csv",
        ],
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    fs::write(
        p.join("exp.json"),
        r#"{"instance": {"path": "i1.json"}, "init": "adversarial", "population_size": 20,
            "max_generations": 200, "trials": 1, "base_seed": 9}"#,
    )
    .unwrap();
    let o = run(p, &["experiment", "exp.json", "--output-dir", "out"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(
        fs::read(p.join("single.csv")).unwrap(),
        fs::read(p.join("out/trial_0.csv")).unwrap()
    );
    assert!(p.join("out/summary.json").exists());
}

#[test]
fn verify_single_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify", "--criterion", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("[PASS] criterion 3"));
    assert_eq!(
        run(dir.path(), &["verify", "--criterion", "99"])
            .status
            .code(),
        Some(1)
    );
}
