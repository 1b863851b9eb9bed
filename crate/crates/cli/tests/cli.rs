mod support;

use std::fs;

use support::{code, corpus, ldnf, on, stderr, stdout};

#[test]
fn analyze_exit_codes() {
    assert_eq!(code(&on("analyze", "weather_history", &[])), 0);
    let checked = on("analyze", "weather_history", &["--check"]);
    assert_eq!(code(&checked), 1);
    assert!(stdout(&checked).contains("WEATHER TYPE"));
    assert_eq!(code(&on("verify", "weather_history", &[])), 1);
    assert_eq!(code(&on("analyze", "birthplace", &["--check"])), 1);
}

#[test]
fn empty_schema_is_clean() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("schema.sql"), "-- nothing\n").unwrap();
    let out = ldnf([
        "analyze",
        "--check",
        "--schema",
        dir.path().join("schema.sql").to_str().unwrap(),
        "--data-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

#[test]
fn malformed_ddl_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("schema.sql"),
        "CREATE TABLE t (\n  \"A\" TEXT,\n  PRIMARY KEY (",
    )
    .unwrap();
    let out = ldnf([
        "analyze",
        "--schema",
        dir.path().join("schema.sql").to_str().unwrap(),
        "--data-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("at 3:"), "{err}");
}

#[test]
fn missing_input_and_bad_flags() {
    let out = ldnf([
        "analyze",
        "--schema",
        "/nonexistent/schema.sql",
        "--data-dir",
        "/nonexistent",
    ]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&ldnf(["analyze"])), 2);
    assert_eq!(code(&ldnf(["frobnicate"])), 2);
}

#[test]
fn plan_gate_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    let p = plan.to_str().unwrap();

    let refused = on("plan", "birthplace", &["--out", p]);
    assert_eq!(code(&refused), 1);
    assert!(!plan.exists());
    assert_eq!(code(&on("plan", "birthplace", &["--out", p, "--force"])), 0);

    assert_eq!(code(&on("plan", "discoveries_1nf", &["--out", p])), 0);
    assert_eq!(fs::read_to_string(&plan).unwrap().trim(), "[]");

    assert_eq!(code(&on("plan", "favorite_color", &["--out", p])), 0);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&plan).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 1);
}

#[test]
fn apply_round_trip_and_stale_plan() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    let out_dir = dir.path().join("out");
    let sql = dir.path().join("migrate.sql");
    let (p, o, s) = (plan.to_str().unwrap(), out_dir.to_str().unwrap(), sql.to_str().unwrap());

    assert_eq!(code(&on("plan", "favorite_color", &["--out", p])), 0);
    let applied = on("apply", "favorite_color", &["--plan", p, "--out-dir", o, "--sql", s]);
    assert_eq!(code(&applied), 0, "{}", stderr(&applied));
    assert!(out_dir.join("colors.csv").exists());
    assert!(out_dir.join("schema.sql").exists());
    assert!(fs::read_to_string(&sql).unwrap().contains("REFERENCES colors"));

    // The applied output is itself LDNF.
    let config = corpus("favorite_color").join("config.ini");
    let verified = ldnf([
        "verify",
        "--schema",
        out_dir.join("schema.sql").to_str().unwrap(),
        "--data-dir",
        o,
        "--config",
        config.to_str().unwrap(),
    ]);
    assert_eq!(code(&verified), 0, "{}", stdout(&verified));

    let text = fs::read_to_string(&plan).unwrap().replace("\"Silver\": \"Gray\",", "");
    fs::write(&plan, text).unwrap();
    let stale = on("apply", "favorite_color", &["--plan", p, "--out-dir", o, "--sql", s]);
    assert_eq!(code(&stale), 2);
    assert!(stderr(&stale).contains("Silver"), "{}", stderr(&stale));
}

#[test]
fn empty_plan_copies_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    fs::write(&plan, "[]").unwrap();
    let out_dir = dir.path().join("out");
    let out = on(
        "apply",
        "occupation",
        &[
            "--plan",
            plan.to_str().unwrap(),
            "--out-dir",
            out_dir.to_str().unwrap(),
            "--sql",
            dir.path().join("m.sql").to_str().unwrap(),
        ],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(
        fs::read_to_string(out_dir.join("employee_occupation.csv")).unwrap(),
        fs::read_to_string(corpus("occupation").join("data/employee_occupation.csv")).unwrap()
    );
}

#[test]
fn simulate_contract() {
    let w = corpus("weather_history").join("workloads");
    let raw = on(
        "simulate",
        "weather_history",
        &["--workload", w.join("hazard_update.json").to_str().unwrap()],
    );
    assert_eq!(code(&raw), 0);
    assert!(stdout(&raw).contains("stale_rows: 1"));

    let empty = on(
        "simulate",
        "weather_history",
        &["--workload", w.join("empty.json").to_str().unwrap()],
    );
    assert_eq!(code(&empty), 0);
    assert!(stdout(&empty).contains("stale_rows: 0"));

    let no_plan = on(
        "simulate",
        "weather_history",
        &[
            "--workload",
            w.join("hazard_update.json").to_str().unwrap(),
            "--mode",
            "ldnf",
        ],
    );
    assert_eq!(code(&no_plan), 2);

    let bad_mode = on(
        "simulate",
        "weather_history",
        &["--workload", w.join("empty.json").to_str().unwrap(), "--mode", "strict"],
    );
    assert_eq!(code(&bad_mode), 2);

    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("w.json");
    fs::write(&broken, r#"[{"op": "explode", "relation": "weather_history"}]"#).unwrap();
    assert_eq!(
        code(&on(
            "simulate",
            "weather_history",
            &["--workload", broken.to_str().unwrap()]
        )),
        2
    );
}

#[test]
fn config_from_environment() {
    let dir = corpus("weather_history");
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_ldnf"))
        .args(["analyze", "--check", "--schema"])
        .arg(dir.join("schema.sql"))
        .arg("--data-dir")
        .arg(dir.join("data"))
        .env("LDNF_CONFIG", dir.join("config.ini"))
        .output()
        .unwrap();
    // Only the annotation in the config makes WEATHER TYPE a finding.
    assert_eq!(code(&out), 1);
}
