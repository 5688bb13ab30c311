use std::path::Path;
use std::process::{Command, Output};

use stablecut::cli::io::InstanceFile;

fn stablecut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stablecut")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &[u8]) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn generate_solve_verify_square() {
    let dir = tempfile::tempdir().unwrap();
    let gen = stablecut(&["generate", "--problem", "tsp", "--family", "square"]);
    assert!(gen.status.success());
    let inst = write(dir.path(), "square.json", &gen.stdout);

    let solved = stablecut(&["solve", &inst, "--stability"]);
    assert_eq!(solved.status.code(), Some(0));
    let cert = json(&solved);
    assert_eq!(cert["verdict"], "Optimal");
    assert_eq!(cert["objective"], "4/1");
    assert_eq!(cert["stability"]["gamma_star"], "19/10");
    let cert_path = write(dir.path(), "cert.json", &solved.stdout);

    let verified = stablecut(&["verify", &cert_path, &inst]);
    assert_eq!(verified.status.code(), Some(0));
    assert_eq!(json(&verified)["valid"], true);

    let margin = stablecut(&["margin", &inst]);
    assert_eq!(json(&margin)["gamma_star"], "19/10");
}

#[test]
fn not_stable_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let gen = stablecut(&["generate", "--problem", "edge_mc", "--family", "freund-karloff", "--k", "3"]);
    assert!(gen.status.success());
    let inst = write(dir.path(), "fk.json", &gen.stdout);
    let solved = stablecut(&["solve", &inst]);
    assert_eq!(solved.status.code(), Some(2));
    let cert = json(&solved);
    assert_eq!(cert["verdict"], "NotStable");
    assert_eq!(cert["lp_value"], "15/4");

    let cert_path = write(dir.path(), "cert.json", &solved.stdout);
    assert_eq!(stablecut(&["verify", &cert_path, &inst]).status.code(), Some(0));
}

#[test]
fn tampered_certificate_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let gen = stablecut(&["generate", "--problem", "tsp", "--family", "square"]);
    let inst = write(dir.path(), "square.json", &gen.stdout);
    let mut cert = json(&stablecut(&["solve", &inst]));
    cert["objective"] = "7/2".into();
    let cert_path = write(dir.path(), "cert.json", cert.to_string().as_bytes());
    let out = stablecut(&["verify", &cert_path, &inst]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["objective_matches"], false);
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", b"{\n  \"problem\": \"tsp\",\n  \"vertices\": [\n");
    let out = stablecut(&["solve", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8(out.stderr).unwrap();
    assert!(msg.contains("line 4"), "{msg}");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = stablecut(&["solve", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_prints_csv() {
    let out = stablecut(&["sweep", "--gamma-min", "1", "--gamma-max", "13/10", "--gamma-step", "1/10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "gamma,integral,lp_value,opt_value");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("1/1,false,"));
    assert!(lines[4].starts_with("13/10,true,"));
}

#[test]
fn generated_files_round_trip_byte_identical() {
    let cases: &[&[&str]] = &[
        &["--problem", "edge_mc", "--family", "random", "--seed", "3"],
        &["--problem", "node_mc", "--family", "star-gap"],
        &["--problem", "mis", "--family", "tight"],
        &["--problem", "kmedian", "--family", "gap-steiner", "--n", "5"],
        &["--problem", "kcenter", "--family", "two-pairs"],
        &["--problem", "tsp", "--family", "random", "--n", "6", "--seed", "9"],
    ];
    for args in cases {
        let mut full = vec!["generate"];
        full.extend_from_slice(args);
        let out = stablecut(&full);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        let file = InstanceFile::parse(&text).unwrap();
        let again = InstanceFile::from_instance(&file.to_instance().unwrap(), Some(file.vertices.clone()));
        assert_eq!(again.to_json(), text, "{args:?}");
    }
}
