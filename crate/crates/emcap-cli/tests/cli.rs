use std::process::{Command, Output};

use serde_json::Value;

fn emcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emcap")).args(args).output().expect("spawn emcap")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Splits CSV output into its `#` metadata lines and the table.
fn split_csv(s: &str) -> (Vec<&str>, Vec<&str>) {
    s.lines().partition(|l| l.starts_with('#'))
}

#[test]
fn efficiency_sweep_has_expected_schema() {
    let o = emcap(&["efficiency", "--eps-r", "16", "--tan-delta", "1e-4", "--sweep-r1", "0.01:1.2:120", "--n-max", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let (meta, table) = split_csv(&text);
    assert!(meta.contains(&"# command = efficiency"));
    assert!(meta.contains(&"# sweep_r1 = 0.01:1.2:120"));
    assert!(meta.iter().any(|l| l.starts_with("# version = emcap ")));
    assert_eq!(table[0], "r1_over_lambda,n,l,eta");
    assert_eq!(table.len(), 1 + 120 * 10);
    for row in &table[1..] {
        let eta: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
        assert!(eta > 0.0 && eta <= 1.0, "{row}");
    }
    assert!(table[1].starts_with("0.01,1,1,"));
    assert!(table.last().unwrap().starts_with("1.2,5,2,"));
}

#[test]
fn gain_opt_reports_the_optimum() {
    let o = emcap(&[
        "gain-opt", "--eps-r", "16", "--tan-delta", "1.2e-4", "--fc", "16.8e9", "--r1", "5e-3", "--q-bar", "33.6",
        "--n-max", "8", "--format", "json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let s = &v["summary"];
    assert_eq!(s["argmax_n"], 5);
    assert!((s["gain"].as_f64().unwrap() / 12.31 - 1.0).abs() < 0.05);
    assert!((s["directivity"].as_f64().unwrap() / 12.36 - 1.0).abs() < 0.05);
    assert!((s["beamwidth_deg"].as_f64().unwrap() - 60.0).abs() < 5.0);
    assert_eq!(v["rows"].as_array().unwrap().len(), 8);
    assert_eq!(v["meta"]["q_bar"], "33.6");
}

#[test]
fn backscatter_ratio_tends_to_one_half() {
    let o = emcap(&["backscatter", "--beta", "0.8", "--n", "80"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let (meta, table) = split_csv(&text);
    let ratio: f64 = meta.iter().find_map(|l| l.strip_prefix("# ratio = ")).unwrap().parse().unwrap();
    assert!((ratio - 0.5).abs() < 0.02);
    assert_eq!(table[0], "n,k0_r2,p_l,p_s,p_t,ratio");
    assert_eq!(table.len(), 81);
}

#[test]
fn infeasible_budget_exits_with_three() {
    let o = emcap(&["gain-opt", "--r1", "5e-3", "--q-bar", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("infeasible"), "{}", stderr(&o));
}

#[test]
fn config_errors_exit_with_two_and_name_the_field() {
    for (args, field) in [
        (vec!["efficiency", "--r1", "-1"], "r1"),
        (vec!["efficiency", "--sweep-r1", "0.5:0.1:3"], "sweep_r1"),
        (vec!["capacity", "--r1", "1e-3", "--alpha", "0"], "alpha"),
        (vec!["gain-opt", "--r1", "5e-3"], "q_bar"),
        (vec!["backscatter", "--beta", "1"], "beta"),
        (vec!["efficiency"], "r1"),
    ] {
        let o = emcap(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains(field), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "[medium]\neps_r = 16.0\ntan_delta = 1e-4\n\n[geometry]\nsweep_r1 = \"0.1:0.3:3\"\n\n[modes]\nn_max = 2\n",
    )
    .unwrap();
    let out = dir.path().join("eta.csv");
    let o = emcap(&[
        "efficiency",
        "--config",
        cfg.to_str().unwrap(),
        "--eps-r",
        "4",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let (meta, table) = split_csv(&text);
    assert!(meta.contains(&"# eps_r = 4"));
    assert!(meta.contains(&"# tan_delta = 0.0001"));
    assert!(meta.contains(&"# n_max = 2"));
    assert_eq!(table.len(), 1 + 3 * 4);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[medium]\nepsr = 3.0\n").unwrap();
    let o = emcap(&["efficiency", "--config", cfg.to_str().unwrap(), "--r1", "1e-3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("epsr"));
}

#[test]
fn dry_run_prints_plan_without_results() {
    let o = emcap(&["capacity", "--sweep-r1", "0.1:0.5:5", "--bits", "--dry-run"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("units = bits"));
    assert!(text.contains("plan = 5 radii x 10 mode classes"));
    assert!(!text.contains("capacity_bits"));
}

#[test]
fn dry_run_still_validates() {
    let o = emcap(&["dof", "--r1", "1e-3", "--eta-min", "2", "--dry-run"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("eta_min"));
}

#[test]
fn capacity_units_follow_bits_flag() {
    let nats = emcap(&["capacity", "--r1", "2e-3", "--format", "json"]);
    let bits = emcap(&["capacity", "--r1", "2e-3", "--format", "json", "--bits"]);
    let n: Value = serde_json::from_str(&stdout(&nats)).unwrap();
    let b: Value = serde_json::from_str(&stdout(&bits)).unwrap();
    let cn = n["rows"][0]["capacity_nats"].as_f64().unwrap();
    let cb = b["rows"][0]["capacity_bits"].as_f64().unwrap();
    assert!((cb * std::f64::consts::LN_2 - cn).abs() < 1e-12 * cn);
}

#[test]
fn dof_exceeds_lossless_bound_at_low_loss() {
    let o = emcap(&["dof", "--tan-delta", "1e-6", "--sweep-r1", "0.05:0.15:3", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for row in v["rows"].as_array().unwrap() {
        assert!(row["dof"].as_f64().unwrap() > row["lossless_bound"].as_f64().unwrap());
    }
}

#[test]
fn qfactor_rows_satisfy_q_identity() {
    let o = emcap(&["qfactor", "--r1", "1e-3", "--n-max", "3", "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for r in rows {
        let f = |k: &str| r[k].as_f64().unwrap();
        assert!((f("q") - f("eta") * f("q_tilde")).abs() <= 1e-12 * f("q"));
    }
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let args = ["sample-check", "--r1", "5e-3", "--k", "256", "--n-max", "2", "--draws", "600", "--seed", "11"];
    let a = emcap(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_emcap"))
        .args(args)
        .env("EM_CAPACITY_THREADS", "1")
        .output()
        .unwrap();
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let c = emcap(&["sample-check", "--r1", "5e-3", "--k", "256", "--n-max", "2", "--draws", "600", "--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_emcap"))
        .args(["backscatter", "--beta", "0.8"])
        .env("EM_CAPACITY_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("EM_CAPACITY_THREADS"));
}
