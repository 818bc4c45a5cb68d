use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use carpet_core::sample::{central_ring, commutator_fixture, random_trivial_loop};
use carpet_core::{DefiningSequence, PolyLoop};
use serde_json::Value;

struct Dir(PathBuf);

impl Dir {
    fn new(name: &str) -> Self {
        let p = std::env::temp_dir().join(format!("carpet-cli-{name}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&p);
        std::fs::create_dir_all(&p).unwrap();
        Dir(p)
    }

    fn file(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }

    fn write_loop(&self, name: &str, lp: &PolyLoop) -> PathBuf {
        let p = self.file(name);
        std::fs::write(&p, serde_json::to_string(lp).unwrap()).unwrap();
        p
    }

    fn write_space(&self, name: &str, seq: &DefiningSequence) -> PathBuf {
        let p = self.file(name);
        std::fs::write(&p, serde_json::to_string(&seq.to_file()).unwrap()).unwrap();
        p
    }
}

impl Drop for Dir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn carpet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carpet")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}\nstderr: {}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

#[test]
fn central_ring_is_nontrivial() {
    let d = Dir::new("ring");
    let lp = d.write_loop("ring.json", &central_ring(1));
    let out = carpet(&["decide", "--space", "full_carpet:3", "--loop", s(&lp), "--depth", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"]["kind"], "nontrivial");
    assert_eq!(v["verdict"]["level"], 1);
    assert_eq!(v["verdict"]["witness"], "g[1,1,1]");
}

#[test]
fn commutator_is_nontrivial_at_level_two() {
    let d = Dir::new("comm");
    let (seq, lp) = commutator_fixture();
    let space = d.write_space("space.json", &seq);
    let lp = d.write_loop("loop.json", &lp);
    let out = carpet(&["decide", "--space", s(&space), "--loop", s(&lp)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"]["kind"], "nontrivial");
    assert_eq!(v["verdict"]["level"], 2);
    assert_eq!(v["verdict"]["witness"].as_str().unwrap().split_whitespace().count(), 4);
}

#[test]
fn certificate_round_trip_and_tamper() {
    let d = Dir::new("cert");
    let seq = DefiningSequence::full_carpet(3).unwrap();
    let lp = d.write_loop("loop.json", &random_trivial_loop(&seq, 3, 4, 30));
    let cert = d.file("cert.json");
    let out = carpet(&["certify", "--space", "full_carpet:3", "--loop", s(&lp), "--out", s(&cert)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = carpet(&["check", "--space", "full_carpet:3", "--loop", s(&lp), "--cert", s(&cert)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["ok"], true);

    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    v["verdict"]["conclusive"] = Value::Bool(true);
    let bad = d.file("bad.json");
    std::fs::write(&bad, v.to_string()).unwrap();
    let out = carpet(&["check", "--space", "full_carpet:3", "--loop", s(&lp), "--cert", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["ok"], false);
}

#[test]
fn cap_exhaustion_is_inconclusive() {
    let d = Dir::new("cap");
    let seq = DefiningSequence::full_carpet(3).unwrap();
    let lp = random_trivial_loop(&seq, 3, 7, 30);
    let path = d.write_loop("loop.json", &lp);
    let out = carpet(&["decide", "--space", "full_carpet:3", "--loop", s(&path), "--caps", "0"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["verdict"]["kind"], "inconclusive");
}

#[test]
fn input_errors_exit_two() {
    let d = Dir::new("bad");
    let lp = d.file("loop.json");
    std::fs::write(&lp, r#"{"vertices": [["1/6","1/6"],["5/6","1/6"],["5/6","5/6"],["1/6","5/6"]]}"#).unwrap();
    let out = carpet(&["decide", "--space", "full_carpet:2", "--loop", s(&lp)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid loop"));
    let out = carpet(&["decide", "--space", s(&d.file("missing.json")), "--loop", s(&lp)]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(&lp, "not json").unwrap();
    let out = carpet(&["encode", "--space", "full_carpet:1", "--loop", s(&lp), "--level", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn encode_lists_letters() {
    let d = Dir::new("encode");
    let lp = d.write_loop("ring.json", &central_ring(1));
    let out = carpet(&["encode", "--space", "full_carpet:1", "--loop", s(&lp), "--level", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["letters"].as_array().unwrap().len(), 4);
    assert_eq!(v["word"].as_str().unwrap().split_whitespace().count(), 4);
}

#[test]
fn trace_oracle() {
    let out = carpet(&["oracle", "trace", "--word", "a b a^-1 b^-1", "--commute", "a:b", "--brute"]);
    let v = json(&out);
    assert_eq!((v["trivial"].clone(), v["move_search"].clone()), (Value::Bool(true), Value::Bool(true)));
    assert_eq!(v["diagrams"]["diagrams"][0], "(0,2)(1,3)");
    let v = json(&carpet(&["oracle", "trace", "--word", "a b a^-1 b^-1"]));
    assert_eq!(v["trivial"], false);
    assert_eq!(v["reduced"], "a b a^-1 b^-1");
    let out = carpet(&["oracle", "trace", "--word", "a", "--commute", "ab"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn renders_are_byte_identical() {
    let d = Dir::new("render");
    let lp = d.write_loop("ring.json", &central_ring(2));
    let (a, b) = (d.file("a.svg"), d.file("b.svg"));
    for out in [&a, &b] {
        let o = carpet(&["render", "--space", "full_carpet:2", "--loop", s(&lp), "--out", s(out), "--level", "2"]);
        assert_eq!(o.status.code(), Some(0));
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    assert!(String::from_utf8(x).unwrap().starts_with("<svg"));
}

#[test]
fn cellulation_needs_a_trivial_word() {
    let d = Dir::new("cel");
    let seq = DefiningSequence::full_carpet(2).unwrap();
    let lp = d.write_loop("loop.json", &random_trivial_loop(&seq, 2, 1, 20));
    let out_svg = d.file("cel.svg");
    let o = carpet(&["render", "--space", "full_carpet:2", "--loop", s(&lp), "--out", s(&out_svg), "--cellulation"]);
    assert_eq!(o.status.code(), Some(0));
    let ring = d.write_loop("ring.json", &central_ring(1));
    let o = carpet(&["render", "--space", "full_carpet:1", "--loop", s(&ring), "--out", s(&out_svg), "--cellulation"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_reports_runs() {
    let out = carpet(&["--seed", "9", "bench", "--depth", "3", "--vertices", "40", "--runs", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let runs = v["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 2);
    assert!(runs.iter().all(|r| r["check_ok"] == true && r["vertices"] == 40));
}
