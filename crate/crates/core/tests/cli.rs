mod common;

use std::path::Path;
use std::process::{Command, Output};

use tradeoff::format::write_network;
use tradeoff::BayesNet;

use common::*;

fn tradeoff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tradeoff")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn save(dir: &Path, name: &str, net: &BayesNet) -> String {
    let path = dir.join(name);
    write_network(net, &path).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn confounded_query_reduces_one_node() {
    let dir = tempfile::tempdir().unwrap();
    let file = save(dir.path(), "conf.json", &confounded().net);
    let o = tradeoff(&["query", &file, "--decision", "W", "--target", "Z", "--strategy", "x-first"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("sign=-\n"), "{out}");
    assert!(out.contains("nodes_reduced=1\n"), "{out}");
}

#[test]
fn decisive_chain_needs_no_reduction() {
    let mut net = BayesNet::new();
    let d = binary(&mut net, "D");
    let x = binary(&mut net, "X");
    let t = binary(&mut net, "T");
    net.set_rows(d, &[], vec![vec![0.5, 0.5]]).unwrap();
    net.set_rows(x, &[d], vec![vec![0.7, 0.3], vec![0.2, 0.8]]).unwrap();
    net.set_rows(t, &[x], vec![vec![0.6, 0.4], vec![0.1, 0.9]]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let file = save(dir.path(), "chain.json", &net);
    let o = tradeoff(&["query", &file, "--decision", "D", "--target", "T"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sign=+\nnodes_reduced=0\n"));
}

#[test]
fn ambiguous_answer_exits_two() {
    let mut net = BayesNet::new();
    let d = binary(&mut net, "D");
    let t = net.add_variable(tradeoff::Variable::new("T", &["lo", "mid", "hi"]));
    net.set_rows(d, &[], vec![vec![0.5, 0.5]]).unwrap();
    // CDFs (.4, .5, 1) and (.2, .9, 1) cross.
    net.set_rows(t, &[d], vec![vec![0.4, 0.1, 0.5], vec![0.2, 0.7, 0.1]]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let file = save(dir.path(), "cross.json", &net);
    let o = tradeoff(&["query", &file, "--decision", "D", "--target", "T"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("sign=?\n"));
}

#[test]
fn malformed_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    std::fs::write(
        &file,
        r#"{"variables": [{"name": "A", "states": ["0", "1"]}], "arcs": [], "cpts": {"A": [{"given": {}, "dist": [0.5, 0.6]}]}}"#,
    )
    .unwrap();
    let file = file.to_string_lossy();
    for args in [vec!["validate", &*file], vec!["query", &*file, "--decision", "A", "--target", "A"]] {
        let o = tradeoff(&args);
        assert_eq!(o.status.code(), Some(1));
        assert!(String::from_utf8_lossy(&o.stderr).contains("NON_NORMALIZED_ROW"));
    }
}

#[test]
fn unknown_node_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = save(dir.path(), "conf.json", &confounded().net);
    let o = tradeoff(&["query", &file, "--decision", "W", "--target", "nope"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("UNKNOWN_NODE"));
}

#[test]
fn generated_network_validates() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.json").to_string_lossy().into_owned();
    let o = tradeoff(&["generate", "--n", "10", "--l", "20", "--mc", "3", "--seed", "1", "--out", &file]);
    assert_eq!(o.status.code(), Some(0));
    let o = tradeoff(&["validate", &file]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "valid: 10 variables, 20 arcs\n");
    let bad = tradeoff(&["generate", "--n", "10", "--l", "5", "--mc", "3", "--seed", "1", "--out", &file]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn issa_reports_eligibility_and_bounds() {
    let f = mediator_net(11, 2, 4, 3);
    let dir = tempfile::tempdir().unwrap();
    let file = save(dir.path(), "med.json", &f.net);
    let o = tradeoff(&["issa", &file, "--decision", "D", "--target", "X"]);
    let out = stdout(&o);
    assert!(matches!(o.status.code(), Some(0) | Some(2)));
    assert!(out.contains("eligible A Mediator"), "{out}");
    assert!(out.contains("eligible Y1 SoleParent"), "{out}");
    assert!(out.contains("bounds[0] lower="), "{out}");
    let o = tradeoff(&["issa", &file, "--decision", "D", "--target", "A"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("INELIGIBLE"));
}

#[test]
fn table1_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"n": 6, "l_list": [7], "mc_list": [2], "instances": 5, "seed": 2}"#).unwrap();
    let csv = dir.path().join("o.csv");
    let o = tradeoff(&["table1", "--config", &config.to_string_lossy(), "--out", &csv.to_string_lossy()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(tradeoff::harness::CSV_HEADER));
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(fields.len(), 8);
    assert_eq!(fields[2], "2");
    assert_eq!(fields[5], "5");
}
