use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use otreg::config::schema_json;
use otreg::ExperimentConfig;
use serde_json::{json, Value};

fn otreg() -> Command {
    Command::new(env!("CARGO_BIN_EXE_otreg"))
}

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn small_config(experiment: Value, thresholds: Value) -> Value {
    json!({
        "name": "small",
        "source": { "shape": { "generator": "regular", "sides": 4 } },
        "target": { "shape": { "generator": "regular", "sides": 4 }, "transform": { "linear": [[2.0, 0.0], [0.0, 0.5]] } },
        "n_targets": 400,
        "seed": 3,
        "experiment": experiment,
        "thresholds": thresholds,
    })
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn published_schema_is_current() {
    let published = fs::read_to_string(repo().join("schema/experiment.schema.json")).unwrap();
    assert_eq!(published, schema_json(), "regenerate with `otreg schema --out schema/experiment.schema.json`");
}

#[test]
fn shipped_configs_validate() {
    let mut n = 0;
    for e in fs::read_dir(repo().join("configs")).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| x == "json") {
            ExperimentConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            n += 1;
        }
    }
    assert!(n >= 12);
}

#[test]
fn solve_writes_solution_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", &small_config(json!({ "kind": "obliqueness-scan" }), json!({})));
    let out = dir.path().join("sol.json");
    let st = otreg().args(["solve", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let sol = read(&out);
    for key in ["source_polygon", "target_polygon", "points", "masses", "weights", "tol_achieved", "iterations"] {
        assert!(sol.get(key).is_some(), "missing {key}");
    }
    assert_eq!(sol["points"].as_array().unwrap().len(), 400);
    let masses: f64 = sol["masses"].as_array().unwrap().iter().map(|m| m.as_f64().unwrap()).sum();
    assert!((masses - 1.0).abs() < 1e-9);
    assert!(sol["tol_achieved"].as_f64().unwrap() <= 1e-7);
}

#[test]
fn run_and_report_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let exp = json!({ "kind": "obliqueness-scan", "samples": 40 });
    let ok = write(dir.path(), "ok.json", &small_config(exp.clone(), json!({ "weak_form": -1e-6 })));
    let bad = write(dir.path(), "bad.json", &small_config(exp, json!({ "min_margin": 2.0 })));
    let runs = dir.path().join("runs");

    let st = otreg().args(["run", "--config"]).arg(&ok).arg("--out-dir").arg(runs.join("ok")).status().unwrap();
    assert_eq!(st.code(), Some(0));
    for f in ["config.json", "solution.json", "obliqueness.csv", "rays.svg", "report.json"] {
        assert!(runs.join("ok").join(f).is_file(), "missing {f}");
    }
    let csv = fs::read_to_string(runs.join("ok/obliqueness.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("arc_param,x0x,x0y,LdotL,RdotR,margin"));
    assert_eq!(csv.lines().count(), 41);

    let st = otreg().args(["run", "--config"]).arg(&bad).arg("--out-dir").arg(runs.join("bad")).status().unwrap();
    assert_eq!(st.code(), Some(2));
    let r = read(&runs.join("bad/report.json"));
    assert_eq!(r["status"], "threshold_fail");

    let agg = dir.path().join("report.json");
    let st = otreg().args(["report", "--dir"]).arg(&runs).arg("--out").arg(&agg).status().unwrap();
    assert_eq!(st.code(), Some(2));
    let a = read(&agg);
    assert_eq!((a["passed"].as_u64(), a["failed"].as_u64()), (Some(1), Some(1)));
}

#[test]
fn solver_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(json!({ "kind": "obliqueness-scan" }), json!({}));
    cfg["solver"] = json!({ "tol": 1e-14, "max_iter": 1 });
    let p = write(dir.path(), "c.json", &cfg);
    let st = otreg().args(["run", "--config"]).arg(&p).arg("--out-dir").arg(dir.path().join("r")).status().unwrap();
    assert_eq!(st.code(), Some(3));
    assert_eq!(read(&dir.path().join("r/report.json"))["status"], "solver_fail");
    let st = otreg().args(["solve", "--config"]).arg(&p).arg("--out").arg(dir.path().join("s.json")).status().unwrap();
    assert_eq!(st.code(), Some(3));
}

#[test]
fn config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "c.json", &small_config(json!({ "kind": "obliqueness-scan" }), json!({ "no_such_check": 1.0 })));
    let out = otreg().args(["run", "--config"]).arg(&p).arg("--out-dir").arg(dir.path().join("r")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_check"));
    let mut cfg = small_config(json!({ "kind": "obliqueness-scan" }), json!({}));
    cfg["typo"] = json!(1);
    let p = write(dir.path(), "d.json", &cfg);
    let st = otreg().args(["solve", "--config"]).arg(&p).arg("--out").arg(dir.path().join("s.json")).status().unwrap();
    assert_eq!(st.code(), Some(1));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(json!({ "kind": "obliqueness-scan" }), json!({}));
    cfg["target"] = json!({ "shape": { "generator": "random_hull", "points": 10, "seed": 5 } });
    cfg["solver"] = json!({ "sampling": "stratified" });
    let p = write(dir.path(), "c.json", &cfg);
    let solve = |seed: Option<&str>, name: &str| {
        let out = dir.path().join(name);
        let mut c = otreg();
        if let Some(s) = seed {
            c.args(["--seed", s]);
        }
        assert!(c.args(["solve", "--config"]).arg(&p).arg("--out").arg(&out).status().unwrap().success());
        read(&out)["points"].clone()
    };
    let base = solve(None, "a.json");
    assert_eq!(base, solve(Some("3"), "b.json"));
    assert_ne!(base, solve(Some("4"), "c.json"));
}

#[test]
fn single_thread_output_matches() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "c.json", &small_config(json!({ "kind": "obliqueness-scan", "samples": 30 }), json!({})));
    let run = |threads: &str| {
        let d = dir.path().join(format!("t{threads}"));
        assert!(otreg().args(["--threads", threads, "run", "--config"]).arg(&p).arg("--out-dir").arg(&d).status().unwrap().success());
        (fs::read(d.join("obliqueness.csv")).unwrap(), fs::read(d.join("solution.json")).unwrap())
    };
    assert_eq!(run("1"), run("4"));
}
