use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn localcolor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_localcolor"))
        .args(args)
        .env("LOCALCOLOR_THREADS", "1")
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_writes_the_graph_format() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.col");
    assert!(localcolor(&["gen", "regular:n=6,d=2", "--seed", "3", "--out", p(&g)]).status.success());
    let text = fs::read_to_string(&g).unwrap();
    assert!(text.starts_with("p col 6 6\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("e ")).count(), 6);
    assert!(!localcolor(&["gen", "regular:n=5,d=3"]).status.success());
}

#[test]
fn run_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (g, c, s) = (dir.path().join("g.col"), dir.path().join("c.txt"), dir.path().join("s.json"));
    localcolor(&["gen", "clique-union:sizes=17x4,bridges=10", "--seed", "2", "--out", p(&g)]);
    let out = localcolor(&[
        "run", p(&g), "--epsilon1", "0.05", "--K", "5", "--seed", "4", "--coloring", p(&c), "--out", p(&s),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stats: serde_json::Value = serde_json::from_str(&fs::read_to_string(&s).unwrap()).unwrap();
    assert_eq!(stats["report"]["complete"], true);
    assert_eq!(stats["stats"]["seed"], 4);
    assert_eq!(stats["stats"]["config"]["k_const"], 5.0);
    assert!(stats["stats"]["total_rounds"].as_u64().unwrap() > 0);
    assert_eq!(fs::read_to_string(&c).unwrap().lines().count(), 68);
    assert!(localcolor(&["verify", p(&g), p(&c)]).status.success());
}

#[test]
fn identical_invocations_give_identical_json() {
    let args = ["run", "gnp:n=200,p=0.05", "--seed", "7", "--epsilon1", "0.05", "--K", "5"];
    assert_eq!(localcolor(&args).stdout, localcolor(&args).stdout);
}

#[test]
fn verify_reports_defects() {
    let dir = tempfile::tempdir().unwrap();
    let (g, c) = (dir.path().join("tri.col"), dir.path().join("c.txt"));
    fs::write(&g, "p col 3 3\ne 0 1\ne 1 2\ne 0 2\n").unwrap();

    fs::write(&c, "0 0\n1 1\n2 2\n").unwrap();
    assert!(localcolor(&["verify", p(&g), p(&c)]).status.success());

    fs::write(&c, "0 0\n1 0\n2 2\n").unwrap();
    let out = localcolor(&["verify", p(&g), p(&c)]);
    assert!(!out.status.success());
    assert_eq!(json(&out)["conflicts"], serde_json::json!([[0, 1]]));

    fs::write(&c, "0 0\n1 1\n").unwrap();
    let out = localcolor(&["verify", p(&g), p(&c)]);
    assert!(!out.status.success());
    assert_eq!(json(&out)["complete"], false);

    fs::write(&c, "0 0\n1 x\n").unwrap();
    let out = localcolor(&["verify", p(&g), p(&c)]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn run_honors_palette_files() {
    let dir = tempfile::tempdir().unwrap();
    let (g, pal, c) = (dir.path().join("g.col"), dir.path().join("p.txt"), dir.path().join("c.txt"));
    fs::write(&g, "p col 3 2\ne 0 1\ne 1 2\n").unwrap();
    fs::write(&pal, "0: 10 11 12\n1: 11 12 13\n2: 12 14 15\n").unwrap();
    assert!(localcolor(&["run", p(&g), "--palettes", p(&pal), "--coloring", p(&c)]).status.success());
    assert!(localcolor(&["verify", p(&g), p(&c), "--palettes", p(&pal)]).status.success());
    let colors: Vec<u32> = fs::read_to_string(&c)
        .unwrap()
        .lines()
        .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(colors.iter().all(|&x| x >= 10));
}

#[test]
fn decompose_emits_blocks_and_tree() {
    let out = localcolor(&["decompose", "clique-union:sizes=20x3,bridges=0", "--epsilon1", "0.1", "--K", "4"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["ell"], 1);
    assert_eq!(v["blocks"].as_array().unwrap().len(), 3);
    assert_eq!(v["tree_edges"].as_array().unwrap().len(), 3);
    assert_eq!(v["blocks"][0]["class"], "Large");
}

#[test]
fn modes_and_trials() {
    let out = localcolor(&["run", "gnp:n=100,p=0.05", "--mode", "excess", "--trials", "3", "--seed", "1"]);
    assert!(out.status.success());
    let runs = json(&out);
    let seeds: Vec<u64> = runs.as_array().unwrap().iter().map(|r| r["stats"]["seed"].as_u64().unwrap()).collect();
    assert_eq!(seeds, [1, 2, 3]);
    assert!(runs.as_array().unwrap().iter().all(|r| r["stats"]["mode"] == "excess"));
    // Cliques are dense, so sparse mode refuses them.
    assert!(!localcolor(&["run", "clique-union:sizes=10x2,bridges=0", "--mode", "sparse"]).status.success());
}

#[test]
fn bad_configs_are_rejected() {
    assert!(!localcolor(&["run", "gnp:n=50,p=0.1", "--p", "0.5"]).status.success());
    assert!(!localcolor(&["run", "gnp:n=50,p=0.1", "--epsilon1", "0.3", "--K", "2"]).status.success());
    assert!(!localcolor(&["run", "nonsense"]).status.success());
}

#[test]
fn stats_with_one_trial_is_inconclusive() {
    let out = localcolor(&["stats", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["verdict"], "inconclusive");
    assert!(v["tests"].as_array().unwrap().iter().all(|t| t["verdict"] == "inconclusive"));
}
