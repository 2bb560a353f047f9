use std::path::Path;
use std::process::{Command, Output};

use spanlab::graph_model::{write_instance, Instance};
use spanlab::{ColoredGraph, NodeId};
use spanlab_cli::checks::eight_node_fixture;

fn spanlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spanlab"))
        .current_dir(dir)
        .env_remove("SPANLAB_OUT_DIR")
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write_hand_built(dir: &Path, name: &str, graph: ColoredGraph) -> String {
    let text = write_instance(&Instance {
        params: None,
        seed: None,
        graph,
    });
    std::fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

#[test]
fn gen_writes_instance_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = spanlab(dir.path(), &["gen", "--n", "64", "--t", "2", "--seed", "1", "--out", "a.txt"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("half 32\n") && out.contains("region_size 8\n"), "{out}");
    let text = std::fs::read_to_string(dir.path().join("a.txt")).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("node ")).count(), 64);
    assert_eq!(text.lines().filter(|l| l.starts_with("node ") && l.contains(" U ")).count(), 32);

    spanlab(dir.path(), &["gen", "--n", "64", "--t", "2", "--seed", "1", "--out", "b.txt"]);
    assert_eq!(text, std::fs::read_to_string(dir.path().join("b.txt")).unwrap());
}

#[test]
fn gen_rejects_odd_n_as_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = spanlab(dir.path(), &["gen", "--n", "15"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("even"));
}

#[test]
fn out_dir_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_spanlab"))
        .current_dir(dir.path())
        .env("SPANLAB_OUT_DIR", "reports")
        .args(["gen", "--n", "16", "--seed", "4"])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("reports/instance_n16_t2_s4.txt").exists());
}

#[test]
fn run_greedy_and_distributed() {
    let dir = tempfile::tempdir().unwrap();
    spanlab(dir.path(), &["gen", "--n", "64", "--seed", "1", "--out", "g.txt"]);
    let o = spanlab(dir.path(), &["run", "--instance", "g.txt", "--algorithm", "greedy"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let row = out.lines().nth(1).unwrap();
    assert!(row.starts_with("greedy,64,"), "{row}");
    assert_eq!(row.split(',').nth(5), Some("true"));
    assert!(dir.path().join("g.greedy.edges").exists());
    assert!(dir.path().join("g.greedy.summary.csv").exists());

    let o = spanlab(
        dir.path(),
        &["run", "--instance", "g.txt", "--algorithm", "cluster3-distributed", "--mode", "congest-kt1"],
    );
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "cluster3-distributed");
    assert_eq!(row[4], "3");
}

#[test]
fn run_guards() {
    let dir = tempfile::tempdir().unwrap();
    spanlab(dir.path(), &["gen", "--n", "64", "--seed", "1", "--out", "g.txt"]);
    let o = spanlab(dir.path(), &["run", "--instance", "g.txt", "--algorithm", "timeenc-demo"]);
    assert_eq!(code(&o), 2);
    let o = spanlab(
        dir.path(),
        &["run", "--instance", "g.txt", "--algorithm", "greedy", "--mode", "congest-kt1"],
    );
    assert_eq!(code(&o), 2);
    let o = spanlab(dir.path(), &["run", "--instance", "missing.txt", "--algorithm", "greedy"]);
    assert_eq!(code(&o), 3);
    std::fs::write(dir.path().join("junk.txt"), "not an instance").unwrap();
    let o = spanlab(dir.path(), &["run", "--instance", "junk.txt", "--algorithm", "greedy"]);
    assert_eq!(code(&o), 3);
    let o = spanlab(dir.path(), &["run", "--instance", "g.txt", "--algorithm", "dijkstra"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn timeenc_demo_on_a_two_node_instance() {
    let dir = tempfile::tempdir().unwrap();
    let g = ColoredGraph::from_layout(1, 1, vec![NodeId(3), NodeId(1)], 4).unwrap();
    let name = write_hand_built(dir.path(), "pair.txt", g);
    let o = spanlab(dir.path(), &["run", "--instance", &name, "--algorithm", "timeenc-demo"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert_eq!(out.lines().nth(1), Some("2,4,24,48,2,true"));
}

fn total_row(csv: &str) -> Vec<String> {
    csv.lines().last().unwrap().split(',').map(String::from).collect()
}

#[test]
fn critical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = write_hand_built(dir.path(), "eight.txt", eight_node_fixture());
    let o = spanlab(dir.path(), &["critical", "--instance", &fixture]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(total_row(&out), ["total", "1", "1", "2", "true"]);
    assert_eq!(out.lines().count(), 4);

    let ids = (1..=16).map(NodeId).collect();
    let bare = write_hand_built(dir.path(), "bare.txt", ColoredGraph::from_layout(8, 4, ids, 16).unwrap());
    let out = stdout(&spanlab(dir.path(), &["critical", "--instance", &bare]));
    assert_eq!(out, "id,red_degree,y,flag,oracle_agree\ntotal,0,0,0,true\n");

    spanlab(dir.path(), &["gen", "--n", "128", "--t", "3", "--seed", "2", "--out", "g.txt"]);
    let o = spanlab(dir.path(), &["critical", "--instance", "g.txt", "--out", "c.csv"]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn experiment_grid_shape_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["experiment", "--n", "64,128,256", "--seeds", "10", "--algorithm", "greedy"];
    let a = spanlab(dir.path(), &args);
    let b = spanlab(dir.path(), &args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let out = stdout(&a);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.iter().filter(|r| r.starts_with("run,")).count(), 30);
    assert_eq!(rows.iter().filter(|r| r.starts_with("curve,")).count(), 3);
    let width = out.lines().next().unwrap().split(',').count();
    assert!(rows.iter().all(|r| r.split(',').count() == width));
}

#[test]
fn experiment_marks_failed_rows_and_continues() {
    let dir = tempfile::tempdir().unwrap();
    let o = spanlab(dir.path(), &["experiment", "--n", "64", "--seeds", "2", "--algorithm", "timeenc-demo"]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.contains(",error: ")).count(), 2);
    assert_eq!(out.lines().filter(|l| l.starts_with("curve,")).count(), 1);
}

#[test]
fn cluster_grid_at_1024_passes_stretch() {
    let dir = tempfile::tempdir().unwrap();
    let o = spanlab(
        dir.path(),
        &[
            "experiment",
            "--n",
            "1024",
            "--seeds",
            "100",
            "--algorithm",
            "cluster3-central",
            "--critical",
            "false",
            "--min-pass-fraction",
            "0.99",
        ],
    );
    assert_eq!(code(&o), 0);
    let ok = stdout(&o).lines().filter(|l| l.starts_with("run,") && l.split(',').nth(9) == Some("true")).count();
    assert!(ok >= 99, "{ok}");
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("grid.conf"), "# grid\nn = 64\nseeds = 2\nt = 3\n").unwrap();
    let out = stdout(&spanlab(dir.path(), &["--config", "grid.conf", "experiment"]));
    let runs: Vec<&str> = out.lines().filter(|l| l.starts_with("run,")).collect();
    assert_eq!(runs.len(), 2);
    assert!(runs.iter().all(|r| r.starts_with("run,64,3,")));
    let out = stdout(&spanlab(dir.path(), &["--config", "grid.conf", "experiment", "--t", "2"]));
    assert!(out.lines().filter(|l| l.starts_with("run,")).all(|r| r.starts_with("run,64,2,")));

    std::fs::write(dir.path().join("typo.conf"), "seedz = 2\n").unwrap();
    assert_eq!(code(&spanlab(dir.path(), &["--config", "typo.conf", "experiment"])), 2);
    assert_eq!(code(&spanlab(dir.path(), &["--config", "absent.conf", "experiment"])), 3);
}

#[test]
fn curves_and_lic_toy() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&spanlab(dir.path(), &["curves", "--n", "64,4096"]));
    assert_eq!(out.lines().count(), 1 + 2 * 7);
    assert!(out.lines().any(|l| l == "4096,2,trivial-n,4.09600e3"));

    let o = spanlab(dir.path(), &["lic-toy", "--trials", "20000"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == "exact,2,sum,1.00000e0"), "{out}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("note:"));
}

#[test]
fn check_subset_and_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = spanlab(dir.path(), &["check", "--only", "3,12"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("[PASS]")).count(), 2);
    assert_eq!(code(&spanlab(dir.path(), &["frobnicate"])), 2);
    assert_eq!(code(&spanlab(dir.path(), &["--help"])), 0);
}
