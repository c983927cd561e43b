//! End-to-end tests of the vdist binary: exit codes, output formats, the
//! published row schema, and reproducibility.

use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn vdist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vdist")).args(args).output().expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = vdist(args);
    assert!(
        out.status.success(),
        "vdist {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// CSV text with the wall_ms column (always the last one) blanked out.
fn strip_wall_csv(text: &str) -> String {
    text.lines()
        .map(|line| &line[..line.rfind(',').unwrap()])
        .collect::<Vec<_>>()
        .join("\n")
}

const SIMULATE: [&str; 12] = [
    "simulate", "--mech", "mean", "--dist", "binary:0.2", "--n", "5", "--m", "6", "--trials",
    "300", "--seed",
];

fn simulate_args<'a>(seed: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v: Vec<&str> = SIMULATE.to_vec();
    v.push(seed);
    v.extend_from_slice(extra);
    v
}

#[test]
fn simulate_emits_one_csv_row() {
    let text = stdout_of(&simulate_args("7", &[]));
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(
        header,
        "command,mech,dist,n,m,p_or_params,regime,trials,num_mean,den_mean,ratio,ci_low,ci_high,seed,wall_ms"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("simulate,mean:0.2,binary,5,6,0.2,per-agent,300,"));
    assert!(lines.next().is_none());
}

#[test]
fn identical_seeds_reproduce_output_bytes() {
    let a = stdout_of(&simulate_args("7", &[]));
    let b = stdout_of(&simulate_args("7", &[]));
    assert_eq!(strip_wall_csv(&a), strip_wall_csv(&b));
    let c = stdout_of(&simulate_args("8", &[]));
    assert_ne!(strip_wall_csv(&a), strip_wall_csv(&c));
}

#[test]
fn thread_count_does_not_change_results() {
    let one = stdout_of(&simulate_args("7", &["--threads", "1"]));
    let eight = stdout_of(&simulate_args("7", &["--threads", "8"]));
    assert_eq!(strip_wall_csv(&one), strip_wall_csv(&eight));
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"mech": "mean", "dist": "binary:0.2", "n": 5, "m": 6, "trials": 300}"#,
    )
    .unwrap();
    let from_cfg = stdout_of(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "7"]);
    let from_flags = stdout_of(&simulate_args("7", &[]));
    assert_eq!(strip_wall_csv(&from_cfg), strip_wall_csv(&from_flags));
}

#[test]
fn output_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let out = vdist(&simulate_args("7", &["--output", path.to_str().unwrap()]));
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(strip_wall_csv(&text), strip_wall_csv(&stdout_of(&simulate_args("7", &[]))));
}

#[test]
fn scan_emits_a_row_per_cell_with_regimes() {
    let text = stdout_of(&[
        "scan", "--mech", "mean", "--dists", "binary:0.5,binary:0.001", "--sizes", "3x4,5x6",
        "--trials", "50", "--seed", "3",
    ]);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("scan,mean:0.5,binary,3,4,0.5,per-agent,"));
    assert!(rows[2].starts_with("scan,mean:0.001,binary,3,4,0.001,subcritical,"));
}

// -- structural validation against the published schema --------------------

/// Checks a value against the subset of JSON Schema used by
/// schemas/result_row.schema.json: object type, required, additionalProperties,
/// per-property type/enum/minimum, oneOf of number-or-"inf".
fn check_against_schema(schema: &Value, row: &Value) -> Result<(), String> {
    let props = schema["properties"].as_object().ok_or("schema has properties")?;
    let obj = row.as_object().ok_or("row must be an object")?;
    for req in schema["required"].as_array().unwrap() {
        if !obj.contains_key(req.as_str().unwrap()) {
            return Err(format!("missing required field {req}"));
        }
    }
    if schema["additionalProperties"] == Value::Bool(false) {
        for key in obj.keys() {
            if !props.contains_key(key) {
                return Err(format!("unexpected field {key}"));
            }
        }
    }
    for (key, rule) in props {
        let value = &obj[key];
        check_rule(rule, value).map_err(|e| format!("field {key}: {e}"))?;
    }
    Ok(())
}

fn check_rule(rule: &Value, value: &Value) -> Result<(), String> {
    if let Some(variants) = rule["oneOf"].as_array() {
        let hits = variants.iter().filter(|v| check_rule(v, value).is_ok()).count();
        return if hits == 1 { Ok(()) } else { Err(format!("{value} matched {hits} variants")) };
    }
    if let Some(c) = rule.get("const") {
        return if c == value { Ok(()) } else { Err(format!("{value} != const {c}")) };
    }
    match rule["type"].as_str() {
        Some("string") => {
            let s = value.as_str().ok_or(format!("{value} is not a string"))?;
            if let Some(options) = rule["enum"].as_array() {
                if !options.iter().any(|o| o.as_str() == Some(s)) {
                    return Err(format!("{s:?} not in enum"));
                }
            }
        }
        Some("integer") => {
            let i = value.as_u64().ok_or(format!("{value} is not an integer"))?;
            if let Some(min) = rule["minimum"].as_u64() {
                if i < min {
                    return Err(format!("{i} below minimum {min}"));
                }
            }
        }
        Some("number") => {
            let x = value.as_f64().ok_or(format!("{value} is not a number"))?;
            if let Some(min) = rule["minimum"].as_f64() {
                if x < min {
                    return Err(format!("{x} below minimum {min}"));
                }
            }
        }
        other => return Err(format!("unhandled schema type {other:?}")),
    }
    Ok(())
}

#[test]
fn json_rows_satisfy_the_published_schema() {
    let schema_path =
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas/result_row.schema.json");
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(schema_path).unwrap()).unwrap();

    let simulate = stdout_of(&simulate_args("7", &["--format", "json"]));
    let scan = stdout_of(&[
        "scan", "--mech", "rt-search", "--dists", "binary:0.3,exponential:1", "--sizes", "3x4",
        "--trials", "40", "--seed", "5", "--format", "json",
    ]);
    // all-zero values: both welfare means are 0 and the ratio convention gives 1
    let degenerate = stdout_of(&[
        "simulate", "--mech", "fixed:1", "--dist", "pointmass:0", "--n", "2", "--m", "2",
        "--trials", "20", "--seed", "5", "--format", "json",
    ]);
    let zero_rows: Vec<Value> = serde_json::from_str(&degenerate).unwrap();
    assert_eq!(zero_rows[0]["ratio"], serde_json::json!(1.0));

    for text in [simulate, scan, degenerate] {
        let rows: Vec<Value> = serde_json::from_str(&text).unwrap();
        assert!(!rows.is_empty());
        for row in rows {
            check_against_schema(&schema, &row).unwrap();
        }
    }

    // the infinite-ratio encoding is a string, which the schema must admit
    // exactly once in its oneOf (and reject other strings)
    let mut inf_row = serde_json::from_str::<Vec<Value>>(&stdout_of(&simulate_args("7", &["--format", "json"])))
        .unwrap()
        .remove(0);
    inf_row["ratio"] = Value::String("inf".into());
    inf_row["ci_high"] = Value::String("inf".into());
    check_against_schema(&schema, &inf_row).unwrap();
    inf_row["ratio"] = Value::String("huge".into());
    assert!(check_against_schema(&schema, &inf_row).is_err());
}

// -- adversary and verify ---------------------------------------------------

/// ratio fields serialize as a number or the string "inf"
fn ratio_at_least(report: &Value, key: &str, floor: f64) -> bool {
    match &report[key] {
        Value::String(s) => s == "inf",
        v => v.as_f64().unwrap() >= floor,
    }
}

#[test]
fn adversary_reports_certified_bounds_as_json() {
    let text = stdout_of(&[
        "adversary", "--construction", "bucket", "--m", "256", "--lambda", "2", "--mech",
        "mean:0.5", "--seed", "1", "--format", "json",
    ]);
    let report: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["m"], 256);
    let floor = report["ratio_floor"].as_f64().unwrap();
    assert!(ratio_at_least(&report, "ratio", floor));

    let text = stdout_of(&[
        "adversary", "--construction", "cohort", "--m", "16", "--mech", "mean-top", "--seed",
        "1", "--format", "json",
    ]);
    let report: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["t"], 4);
    assert!(report["case"].is_string());
    let floor = report["ratio_floor"].as_f64().unwrap();
    assert!(ratio_at_least(&report, "ratio", floor));
}

#[test]
fn adversary_infinite_ratio_serializes_as_inf_string() {
    // plurality sees only tops, so on this instance it crowns a zero-welfare
    // winner while an optimum exists: the ratio must be the string "inf",
    // never a bare IEEE infinity (which JSON would silently turn into null)
    let text = stdout_of(&[
        "adversary", "--construction", "cohort", "--m", "16", "--mech", "plurality", "--seed",
        "1", "--format", "json",
    ]);
    let report: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["winner_sw"], 0.0);
    assert!(report["opt_sw"].as_f64().unwrap() > 0.0);
    assert_eq!(report["ratio"], Value::String("inf".into()));
}

#[test]
fn verify_suites_pass_and_unknown_suites_exit_2() {
    assert_eq!(vdist(&["verify", "--suite", "balanced-rows", "--seed", "1"]).status.code(), Some(0));
    // accepted alias for the same suite
    assert_eq!(vdist(&["verify", "--suite", "lemma-b1", "--seed", "1"]).status.code(), Some(0));
    assert_eq!(vdist(&["verify", "--suite", "no-such-suite", "--seed", "1"]).status.code(), Some(2));

    let out = vdist(&["verify", "--suite", "regime-partition", "--seed", "1"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "verify regime-partition: ok\n");
}

#[test]
fn bad_usage_exits_2() {
    // unknown mechanism
    let mut args = simulate_args("7", &[]);
    args[2] = "nonsense";
    assert_eq!(vdist(&args).status.code(), Some(2));
    // mean cannot bind to a non-binary distribution
    let mut args = simulate_args("7", &[]);
    args[4] = "exponential:1";
    assert_eq!(vdist(&args).status.code(), Some(2));
    // missing --trials
    assert_eq!(
        vdist(&["simulate", "--mech", "mean", "--dist", "binary:0.2", "--n", "5", "--m", "6", "--seed", "7"])
            .status
            .code(),
        Some(2)
    );
    // clap-level: no seed
    assert_eq!(vdist(&["verify", "--suite", "all"]).status.code(), Some(2));
    // adversary insists on json
    assert_eq!(
        vdist(&["adversary", "--construction", "cohort", "--m", "16", "--seed", "1"]).status.code(),
        Some(2)
    );
    // cohort rejects --lambda
    assert_eq!(
        vdist(&[
            "adversary", "--construction", "cohort", "--m", "16", "--lambda", "2", "--seed", "1",
            "--format", "json"
        ])
        .status
        .code(),
        Some(2)
    );
}
