use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use toric_threshold::io::parse_spacetime_chain;
use toric_threshold::pipeline::RunManifest;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toric-threshold"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn lattice_info_reports_torus_betti_numbers() {
    let o = bin(&["lattice", "info", "--dim", "4", "-l", "2"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["betti"], serde_json::json!([1, 4, 6, 4, 1]));
    assert_eq!(v["euler_characteristic"], 0);

    let o = bin(&["lattice", "info", "-l", "3", "--open"]);
    assert_eq!(json(&o)["betti"], serde_json::json!([1, 0, 0, 0]));
}

#[test]
fn oversized_lattice_is_a_resource_error() {
    let o = bin(&["lattice", "info", "--dim", "4", "-l", "100000"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn sampled_chain_file_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.txt");
    let o = bin(&[
        "code", "sample", "-l", "3", "-p", "0.1", "--rounds", "2", "--seed", "4", "--format", "hex", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, chain) = parse_spacetime_chain(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!((header.l, header.rounds, header.rank), (3, 2, 1));
    assert_eq!(chain.len(), header.cells);

    let again = dir.path().join("e2.txt");
    bin(&[
        "code", "sample", "-l", "3", "-p", "0.1", "--rounds", "2", "--seed", "4", "--format", "hex", "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn static_sample_reports_weights() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.txt");
    for sector in ["z", "x"] {
        let o = bin(&["code", "sample", "-l", "3", "-p", "0.1", "--sector", sector, "--seed", "1", "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let v = json(&o);
        assert!(v["relative_class"].as_u64().unwrap() < 8);
        let (header, chain) = parse_spacetime_chain(&fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(header.rounds, 0);
        assert_eq!(chain.weight() as u64, v["weight"].as_u64().unwrap());
    }
}

#[test]
fn code_map_names_the_model() {
    let cases = [
        ("z", "0", "RPGM3"),
        ("x", "0", "RBIM3"),
        ("x", "2", "RPGM4"),
        ("z", "2", "RCGM4"),
    ];
    for (sector, rounds, kind) in cases {
        let o = bin(&["code", "map", "-l", "3", "-p", "0.05", "--sector", sector, "--rounds", rounds, "--seed", "1"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(json(&o)["descriptor"]["kind"], kind);
    }
}

#[test]
fn config_errors_exit_with_2_and_a_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", "{\n  \"model\": \"RBIM3\",\n  \"method\": \"reference\",\n  \"pc\": 0.2\n}\n");
    let o = bin(&["threshold", "run", "-c", &cfg, "-o", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 4"), "{err}");

    let o = bin(&["mc", "run", "-c", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn self_dual_threshold_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "t.json", "{\"model\": \"RPGM4\", \"method\": \"self_dual\"}");
    let o = bin(&["threshold", "run", "-c", &cfg, "-o", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("threshold_report.json")).unwrap()).unwrap();
    let p = report["p_c"].as_f64().unwrap();
    assert!((p - 0.110).abs() < 5e-4, "{p}");
}

#[test]
fn missing_crossing_exits_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "t.json",
        r#"{"model":"RBIM3","method":"sweep","sweep":{"sizes":[3,4],"p":[0.01,0.02,0.03,0.04],
            "seed":1,"samples":4,"thermalization":20,"measurements":40}}"#,
    );
    let o = bin(&["threshold", "run", "-c", &cfg, "-o", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn mc_run_manifest_replays() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.json",
        r#"{"model":"RPGM3","lattice":{"lengths":[3,3,3]},"p":0.05,"beta":"nishimori","seed":2,
            "samples":3,"thermalization":10,"measurements":30,"loops":[[1,1],[1,2]]}"#,
    );
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&bin(&["mc", "run", "-c", &cfg, "-o", out, "--seed", "9"])), 0);
    let manifest_path = dir.path().join("series.json");
    let m: RunManifest = serde_json::from_str(&fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert_eq!(m.seed, Some(9));
    assert!(dir.path().join("series.csv").exists());

    let o = bin(&["mc", "replay", manifest_path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["identical"], true);
}

#[test]
fn exact_and_duality_verbs() {
    let o = bin(&["exact", "check", "kw", "--kind", "RBIM3", "--lengths", "2,2,2", "--beta", "0.3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = bin(&["exact", "check", "mapping", "--p", "0.1", "--seed", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = bin(&["duality", "solve", "--model", "RCGM4", "--p-c", "0.29", "--verify-l", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("RBIM4"));
}
