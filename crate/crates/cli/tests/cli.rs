use std::path::PathBuf;
use std::process::{Command, Output};

use attractor_class::{parse_configuration, FeasibleSet};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_attractor-class"))
        .args(args)
        .env_remove("ATTRACTOR_CLASS_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn validate_branches() {
    let o = run(&["validate", "--feasible", &fixture("simplest.json")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let back = FeasibleSet::from_json(&stdout(&o)).unwrap();
    assert_eq!(back, attractor_class::fixtures::simplest());

    let o = run(&["validate", "--feasible", &fixture("table2.json")]);
    assert_eq!(code(&o), 2);
    assert!(o.stdout.is_empty());
    assert_eq!(stderr(&o).lines().count(), 1);

    let o = run(&["validate", "--feasible", "no/such/file.json"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn canonical_branches() {
    let cfg = fixture("elliptic_saddle.json");
    let o = run(&["canonical", "--config", &cfg, "--orientation", "ccw", "--sigma", "sigma"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(FeasibleSet::from_json(&stdout(&o)).unwrap(), attractor_class::fixtures::simplest());

    let o = run(&["canonical", "--config", "missing.json", "--sigma", "sigma"]);
    assert_eq!(code(&o), 2);

    let o = run(&["canonical", "--config", &cfg, "--sigma", "gamma"]);
    assert_eq!(code(&o), 2, "homoclinic orbit is not a valid anchor");

    let o = run(&["canonical", "--config", &cfg, "--orientation", "sideways", "--sigma", "sigma"]);
    assert_eq!(code(&o), 2);
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn equiv_branches() {
    let o = run(&["equiv", "--a", &fixture("elliptic_saddle.json"), "--b", &fixture("simplest.json")]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "equivalent");

    let o = run(&["equiv", "--a", &fixture("table1.json"), "--b", &fixture("table3.json"), "--witness"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["equivalent"], false);
    assert!(v["witness"].is_null());

    // the second printed table does not validate, so the pair is rejected
    let o = run(&["equiv", "--a", &fixture("table1.json"), "--b", &fixture("table2.json")]);
    assert_eq!(code(&o), 2);
}

#[test]
fn synth_and_portrait_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("config.json");
    let o = run(&["synth", "--feasible", &fixture("table1.json"), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let cfg = parse_configuration(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(cfg.len(), attractor_class::fixtures::table1().element_count());

    let svg = dir.path().join("p.svg");
    let csv = dir.path().join("p.csv");
    let json = dir.path().join("p.json");
    let args = [
        "portrait", "--feasible", &fixture("simplest.json"),
        "--svg", svg.to_str().unwrap(), "--csv", csv.to_str().unwrap(), "--json", json.to_str().unwrap(),
        "--step", "0.01", "--samples", "1", "--arc", "3",
    ];
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let first = std::fs::read(&svg).unwrap();
    assert!(String::from_utf8_lossy(&first).starts_with("<svg"));
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("orbit,index,x,y\n"));
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(meta["polylines"]["separatrix"].as_u64().unwrap() >= 1);
    assert_eq!(code(&run(&args)), 0);
    assert_eq!(std::fs::read(&svg).unwrap(), first);

    let o = run(&["portrait", "--feasible", &fixture("simplest.json"), "--svg", svg.to_str().unwrap(), "--step", "-1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn y_map_csv() {
    let o = run(&["example", "y-map", "--from", "0.01", "--to", "1", "--points", "4"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "y0,Y");
    assert_eq!(rows.len(), 5);
    for r in &rows[1..] {
        let y: f64 = r.split(',').nth(1).unwrap().parse().unwrap();
        assert!(y > 0.25);
    }
    let o = run(&["example", "y-map", "--from", "1", "--to", "0.5"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn example_verify_is_tap() {
    let o = run(&["example", "verify", "--all"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let text = stdout(&o);
    let plan = text.lines().find(|l| l.starts_with("1..")).unwrap();
    let n: usize = plan[3..].parse().unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("ok ")).count(), n);
    assert_eq!(code(&run(&["example", "verify"])), 2);
}

#[test]
fn usage_errors_exit_two() {
    for args in [&["bogus"][..], &[], &["validate"], &["validate", "--feasible", "x", "--nope"]] {
        let o = run(args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert_eq!(stderr(&o).lines().count(), 1, "{args:?}: {}", stderr(&o));
    }
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn thread_variable() {
    let path = fixture("simplest.json");
    let with = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_attractor-class"))
            .args(["validate", "--feasible", &path])
            .env("ATTRACTOR_CLASS_THREADS", v)
            .output()
            .unwrap()
    };
    assert_eq!(code(&with("0")), 0);
    assert_eq!(code(&with("2")), 0);
    assert_eq!(code(&with("many")), 2);
}
