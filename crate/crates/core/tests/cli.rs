use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use justdist::data::{dataset_to_csv, fixture_t1};

fn justdist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_justdist")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        let ws = Workspace {
            dir: tempfile::tempdir().unwrap(),
        };
        ws.write("t1.csv", &dataset_to_csv(&fixture_t1()));
        ws
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).to_string_lossy().into_owned()
    }
}

fn weights_cfg(w: [f64; 4], extra: &str) -> String {
    format!(
        "[weights]\nw11 = {}\nw10 = {}\nw01 = {}\nw00 = {}\n{extra}",
        w[0], w[1], w[2], w[3]
    )
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn audit_reports_egalitarian_gap() {
    let ws = Workspace::new();
    ws.write("w.cfg", &weights_cfg([2.0, -1.0, 0.0, 1.0], "[claims]\nkind = \"none\"\n"));
    let out = justdist(&["audit", "--data", &ws.path("t1.csv"), "--config", &ws.path("w.cfg"), "--format", "json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = json(&out);
    assert_eq!(report["patterns"][0]["outcome"]["ok"]["value"], 1.0);
    assert_eq!(report["profile"]["entries"][0]["expected_utility"], 0.5);
    assert_eq!(report["profile"]["entries"][1]["expected_utility"], 1.5);
    assert_eq!(report["provenance"]["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn audit_table_and_out_file() {
    let ws = Workspace::new();
    ws.write("w.cfg", &weights_cfg([2.0, -1.0, 0.0, 1.0], ""));
    let out = justdist(&[
        "audit", "--data", &ws.path("t1.csv"), "--config", &ws.path("w.cfg"), "--out", &ws.path("r.json"),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("Classical gaps"));
    let written: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(ws.path("r.json")).unwrap()).unwrap();
    assert_eq!(written["dataset"]["records"], 8);
}

#[test]
fn assert_flag_sets_exit_code() {
    let ws = Workspace::new();
    ws.write("sp.cfg", &weights_cfg([1.0, 1.0, 0.0, 0.0], "[pattern]\nkind = \"egalitarian\"\n"));
    let ok = justdist(&[
        "audit", "--data", &ws.path("t1.csv"), "--config", &ws.path("sp.cfg"), "--assert", "--tol", "1e-9",
    ]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));

    ws.write("bad.cfg", &weights_cfg([2.0, -1.0, 0.0, 1.0], "[pattern]\nkind = \"egalitarian\"\n"));
    let fail = justdist(&["audit", "--data", &ws.path("t1.csv"), "--config", &ws.path("bad.cfg"), "--assert"]);
    assert_eq!(fail.status.code(), Some(2));
}

#[test]
fn validation_errors_exit_one_and_name_the_cell() {
    let ws = Workspace::new();
    ws.write("w.cfg", &weights_cfg([1.0, 1.0, 0.0, 0.0], ""));
    ws.write("bad.csv", "a,y,d\n0,1,1\n1,0,2\n");
    let out = justdist(&["audit", "--data", &ws.path("bad.csv"), "--config", &ws.path("w.cfg")]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("row 2") && err.contains("`d`"), "{err}");

    ws.write("broken.cfg", "[weights]\nw11 = 1\n");
    let out = justdist(&["audit", "--data", &ws.path("t1.csv"), "--config", &ws.path("broken.cfg")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("w10"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_one_and_name_the_flag() {
    let out = justdist(&["audit", "--data", "x.csv", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--frobnicate"));
    let out = justdist(&["transmogrify"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(justdist(&["--help"]).status.code(), Some(0));
}

#[test]
fn classical_subcommand() {
    let ws = Workspace::new();
    let out = justdist(&["classical", "--data", &ws.path("t1.csv")]);
    assert!(out.status.success(), "{}", stderr(&out));
    let gaps = json(&out);
    assert_eq!(gaps.as_array().unwrap().len(), 7);
    assert_eq!(gaps[0]["ok"]["criterion"], "StatisticalParity");
    assert_eq!(gaps[0]["ok"]["overall"], 0.0);
    assert_eq!(gaps[1]["ok"]["overall"], 0.5);
}

#[test]
fn equivalence_subcommand() {
    let out = justdist(&["equivalence", "--trials", "10", "--n", "200", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let summary = json(&out);
    assert!(summary["max_residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(summary["rows"].as_array().unwrap().len(), 8);
}

fn leveling_down_files(ws: &Workspace) {
    let mut csv = String::from("id,a,y,d\n");
    for (g, positives) in [(0, 2), (1, 8)] {
        for i in 0..10 {
            csv.push_str(&format!("{g}-{i},{g},{},1\n", (i < positives) as u8));
        }
    }
    ws.write("lvl.csv", &csv);
    ws.write(
        "lvl.cfg",
        &weights_cfg([1.0, -1.0, 0.0, 0.0], "[pattern]\nkind = \"maximin\"\n[rulespace]\nkind = \"group_rates\"\npoints = 11\n"),
    );
}

#[test]
fn optimize_and_frontier_subcommands() {
    let ws = Workspace::new();
    leveling_down_files(&ws);
    let out = justdist(&[
        "optimize", "--data", &ws.path("lvl.csv"), "--config", &ws.path("lvl.cfg"), "--frontier-csv", &ws.path("f.csv"),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = json(&out);
    assert_eq!(report["result"]["best_rule"]["params"]["0"], 0.0);
    assert_eq!(report["result"]["best_rule"]["params"]["1"], 1.0);
    let frontier = std::fs::read_to_string(ws.path("f.csv")).unwrap();
    assert!(frontier.starts_with("p_0,p_1,total_utility,egal_gap\n0,0,0,0\n"));

    let out = justdist(&[
        "optimize", "--data", &ws.path("lvl.csv"), "--config", &ws.path("lvl.cfg"), "--objective", "egalitarian",
    ]);
    let report = json(&out);
    assert_eq!(report["result"]["best_rule"]["params"]["1"], 0.0);

    let out = justdist(&["frontier", "--data", &ws.path("lvl.csv"), "--config", &ws.path("lvl.cfg")]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), frontier);
}

#[test]
fn optimize_without_rulespace_is_a_validation_error() {
    let ws = Workspace::new();
    ws.write("w.cfg", &weights_cfg([1.0, 1.0, 0.0, 0.0], ""));
    let out = justdist(&["optimize", "--data", &ws.path("t1.csv"), "--config", &ws.path("w.cfg")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("rulespace"));
}

#[test]
fn generate_is_seeded() {
    let a = justdist(&["generate", "--n", "50", "--seed", "9"]);
    let b = justdist(&["generate", "--n", "50", "--seed", "9"]);
    let c = justdist(&["generate", "--n", "50", "--seed", "10"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(stdout(&a).lines().count(), 101);
}

#[test]
fn generate_from_spec_file() {
    let ws = Workspace::new();
    let spec = ws.write(
        "spec.toml",
        "score_noise = 0.1\n[[groups]]\nlabel = \"x\"\nsize = 5\nbase_rate = 0.5\nacceptance = { policy = \"rate\", rate = 1.0 }\n",
    );
    let out = justdist(&["generate", "--spec", spec.to_str().unwrap(), "--out", &ws.path("g.csv")]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(Path::new(&ws.path("g.csv"))).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(3) == Some("1")));
}
