use std::process::{Command, Output};

use privwit_cli::CliError;

fn privwit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_privwit"))
        .args(args)
        .env_remove("PRIVWIT_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn help_and_usage_exit_codes() {
    assert_eq!(privwit(&["--help"]).status.code(), Some(0));
    assert_eq!(privwit(&["--version"]).status.code(), Some(0));
    assert_eq!(privwit(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(privwit(&["attack"]).status.code(), Some(1));
}

#[test]
fn out_of_range_alpha_names_the_field() {
    let o = privwit(&["attack", "--channel", "bit-flip", "--alpha", "1.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("channel.alpha"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn numerical_errors_map_to_exit_two() {
    let e = CliError::core("state", privwit::Error::NotPositive(-0.1));
    assert_eq!(e.exit_code(), 2);
    assert!(e.to_string().contains("state"));
    let e = CliError::core("state", privwit::Error::UnknownLabel("Q".into()));
    assert_eq!(e.exit_code(), 1);
}

#[test]
fn attack_csv_is_deterministic_and_tagged() {
    let args = ["attack", "--channel", "bit-flip", "--sweep", "alpha:0:1:11", "--p-points", "51"];
    let a = privwit(&args);
    let b = privwit(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# privwit "));
    assert!(first.contains("command=attack"));
    assert!(first.contains("scenario_sha256="));
    assert!(first.contains("tol_herm=1e-9"));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "alpha,trace_norm_witness,psq_key_witness,er_upper_bound");
    assert_eq!(rows.len(), 12);
    assert!(rows[6].starts_with("0.5,0.25,"));
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["attack", "--channel", "depolarizing", "--sweep", "alpha:0:1:6", "--p-points", "21"];
    let one = Command::new(env!("CARGO_BIN_EXE_privwit"))
        .args(args)
        .env("PRIVWIT_THREADS", "1")
        .output()
        .unwrap();
    let mut with_flag = vec!["--threads", "3"];
    with_flag.extend(args);
    let three = privwit(&with_flag);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, three.stdout);
}

#[test]
fn bad_thread_env_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_privwit"))
        .args(["demo", "superdense"])
        .env("PRIVWIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("PRIVWIT_THREADS"));
    // the flag wins over a broken variable
    let o = Command::new(env!("CARGO_BIN_EXE_privwit"))
        .args(["--threads", "1", "demo", "superdense"])
        .env("PRIVWIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn superdense_demo() {
    let o = privwit(&["demo", "superdense"]);
    assert_eq!(stdout(&o).trim(), r#"{"rate_before":2.0,"rate_after":0.0}"#);
}

#[test]
fn markov_verdicts() {
    let o = privwit(&["markov", "--dynamics", "semigroup:gamma=1", "--grid", "0:3:301"]);
    assert!(stdout(&o).contains("verdict=markovian_on_grid"), "{}", stdout(&o));
    assert!(stdout(&o).contains("intervals=none"));
    let o = privwit(&[
        "markov",
        "--dynamics",
        "oscillating:gamma=0.5,omega=3",
        "--grid",
        "0:3:301",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["report"]["verdict"], "nonmarkovian");
    assert_eq!(v["report"]["intervals"].as_array().unwrap().len(), 3);
    assert_eq!(v["columns"][0], "t");
    assert_eq!(v["rows"].as_array().unwrap().len(), 301);
}

#[test]
fn bounds_and_regions_run() {
    let o = privwit(&["bounds", "--s-a", "1", "--log-a", "1", "--delta", "0.05"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = privwit(&["bounds", "--delta", "0.1", "--cmi", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = privwit(&["regions", "--x", "0:1:5", "--y", "0:2:5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = privwit(&["regions", "--kind", "fig9"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("region.kind"));
}

#[test]
fn randomness_families() {
    for s in ["bell", "isotropic:p=0.3", "gamma-swap:ds=2", "random:da=2,db=2,rank=2"] {
        let o = privwit(&["--seed", "7", "randomness", "--state", s]);
        assert_eq!(o.status.code(), Some(0), "{s}: {}", stderr(&o));
    }
    let o = privwit(&["randomness", "--state", "isotropic:p=2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("state.p"));
}

#[test]
fn toml_and_json_scenarios_match_flags() {
    let dir = tempfile::tempdir().unwrap();
    let toml_path = dir.path().join("attack.toml");
    std::fs::write(
        &toml_path,
        "command = \"attack\"\n\
         [state]\nfamily = \"gamma-swap\"\nds = 2\n\
         [channel]\nkind = \"bit-flip\"\np_points = 51\n\
         [sweep]\nvariable = \"alpha\"\nstart = 0.0\nstop = 1.0\npoints = 11\n",
    )
    .unwrap();
    let from_file = privwit(&["run", toml_path.to_str().unwrap()]);
    assert_eq!(from_file.status.code(), Some(0), "{}", stderr(&from_file));
    let from_flags = privwit(&["attack", "--channel", "bit-flip", "--sweep", "alpha:0:1:11", "--p-points", "51"]);
    assert_eq!(from_file.stdout, from_flags.stdout);

    let json_path = dir.path().join("demo.json");
    std::fs::write(&json_path, r#"{"command": "superdense"}"#).unwrap();
    let o = privwit(&["run", json_path.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), r#"{"rate_before":2.0,"rate_after":0.0}"#);
}

#[test]
fn scenario_errors_name_fields() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(&p, "command = \"attack\"\n[state]\nfamily = \"gamma-swap\"\n[channel]\nkind = \"bit-flip\"\nalpha = 1.5\n").unwrap();
    let o = privwit(&["run", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("channel.alpha"), "{}", stderr(&o));

    std::fs::write(&p, "command = \"attack\"\ncolour = 3\n").unwrap();
    let o = privwit(&["run", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("colour"), "{}", stderr(&o));

    let o = privwit(&["run", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    let o = privwit(&["--out", p.to_str().unwrap(), "--format", "json", "regions", "--x", "0:1:3", "--y", "0:1:3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(v["metadata"]["command"], "regions");
}
