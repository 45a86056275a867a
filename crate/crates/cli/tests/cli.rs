use std::path::PathBuf;
use std::process::Command;

use clannish::functor::{f_dim, multiplicities, SearchOptions};
use clannish::presentation::bundled;
use clannish::walkmod::{build_module, Parameter, Representation};
use clannish::wordcore::{enumerate_bands, enumerate_strings, Descriptor};
use serde_json::Value;

fn sample() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/e1_sample.json")
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_clannish")).args(args).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (out.status.code().unwrap(), v)
}

fn ok(args: &[&str]) -> Value {
    let (code, v) = run(args);
    assert_eq!(code, 0, "{v}");
    v
}

#[test]
fn quadratic_matrix_ring_case() {
    let v = ok(&["quadratic", "--p", "2", "--n", "2", "--sigma", "1", "--beta", "0", "--gamma", "1"]);
    assert_eq!(v["case"], 2);
    assert_eq!(v["is_normal"], true);
    assert_eq!(v["simple_modules"].as_array().unwrap().len(), 1);
}

#[test]
fn three_arrows_out_of_a_vertex_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("three.json");
    std::fs::write(
        &path,
        r#"{"field": {"p": 2, "n": 1}, "vertices": ["1", "2", "3", "4"],
            "arrows": [{"name": "a", "from": "1", "to": "2"}, {"name": "b", "from": "1", "to": "3"},
                       {"name": "c", "from": "1", "to": "4"}]}"#,
    )
    .unwrap();
    let (code, v) = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "ClannishViolation");
}

#[test]
fn bundled_sample_decomposes_completely() {
    let s = sample();
    let v = ok(&["decompose", s.to_str().unwrap()]);
    assert_eq!(v["complete"], true);
    assert_eq!(v["checksum"], 5);
    let words: Vec<&str> = v["multiplicities"].as_array().unwrap().iter().map(|e| e["word"].as_str().unwrap()).collect();
    assert_eq!(words, ["s*", "s* a s*"]);
    assert_eq!(ok(&["decompose", s.to_str().unwrap(), "--jobs", "2"]), v);
    assert_eq!(ok(&["decompose", s.to_str().unwrap()]), v);
    let laws = ok(&["decompose", s.to_str().unwrap(), "--check-laws"]);
    assert!(laws["laws_checked"].as_u64().unwrap() > 0);
}

#[test]
fn oracle_agrees_on_sample() {
    let v = ok(&["oracle-check", sample().to_str().unwrap()]);
    assert_eq!(v["agree"], true);
    assert_eq!(v["summands"].as_array().unwrap().len(), 2);
}

#[test]
fn build_round_trips_through_files() {
    let p = bundled("e1").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let param = dir.path().join("v.json");
    std::fs::write(&param, r#"{"dim": 2}"#).unwrap();
    ok(&["build", "e1", "--word", "s*as*", "--param", param.to_str().unwrap(), "-o", path.to_str().unwrap()]);
    let d = Descriptor::parse(&p, "s*as*").unwrap();
    let v = Parameter::Free { dim: 2 };
    let m = build_module(&p, &d, &v).unwrap();
    let stored: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(Representation::from_json(&p, &stored).unwrap(), m);
    let fd = ok(&["fdim", path.to_str().unwrap(), "--word", "s*as*"]);
    let direct = f_dim(&p, &m, &d).unwrap();
    assert_eq!(fd["f_dim"], direct.f_dim);
    assert_eq!(fd["T_dim"], direct.t_dim);
    assert_eq!(fd["B_dim"], direct.b_dim);
    let dec = ok(&["decompose", path.to_str().unwrap()]);
    let mut expected = multiplicities(&p, &m, &SearchOptions::default()).unwrap().to_json(&p);
    expected.as_object_mut().unwrap().remove("laws_checked");
    assert_eq!(dec, expected);
}

#[test]
fn listings_match_library() {
    for name in ["e1", "gp2", "a4", "dieudonne"] {
        let p = bundled(name).unwrap();
        let s = ok(&["strings", name, "--max-len", "3"]);
        assert_eq!(s["count"], enumerate_strings(&p, 3).len());
        let b = ok(&["bands", name, "--max-period", "4"]);
        assert_eq!(b["count"], enumerate_bands(&p, 4).len());
        assert_eq!(ok(&["validate", name])["valid"], true);
    }
    assert_eq!(ok(&["basis", "e1", "--max-len", "3"])["count"], 7);
    assert_eq!(ok(&["basis", "gp2", "--max-len", "2"])["count"], 5);
}

#[test]
fn errors_are_reported_as_json() {
    let (code, v) = run(&["build", "e1", "--word", "a"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "NotEndAdmissible");
    let (code, v) = run(&["quadratic", "--p", "4", "--beta", "0", "--gamma", "1"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "NonPrime");
    let dir = tempfile::tempdir().unwrap();
    let bare = dir.path().join("bare.json");
    std::fs::write(&bare, r#"{"dims": {"1": 0}, "arrows": {}}"#).unwrap();
    let (code, v) = run(&["decompose", bare.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "Parse");
    let v = ok(&["decompose", bare.to_str().unwrap(), "--presentation", "e1"]);
    assert_eq!(v["checksum"], 0);
}
