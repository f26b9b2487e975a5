use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const A5: &str = r#"{ "degree": 5, "generators": ["(0 1 2 3 4)", "(0 1 2)"], "name": "A5" }"#;
const S3: &str = r#"{ "degree": 3, "generators": [[1, 2, 0], [1, 0, 2]] }"#;

fn wreathgen(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wreathgen"));
    cmd.args(args).env_remove("WREATHGEN_CACHE_DIR");
    if let Some(dir) = cache {
        cmd.env("WREATHGEN_CACHE_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn pk_exact_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let a5 = write(dir.path(), "a5.json", A5);
    let v = json(&wreathgen(&["pk", "--group", &a5, "--k", "2", "--mode", "exact"], None));
    assert_eq!(v["schema"], "wreathgen/1");
    assert_eq!(v["value"], "19/30");
}

#[test]
fn decisions() {
    let dir = tempfile::tempdir().unwrap();
    let a5 = write(dir.path(), "a5.json", A5);
    let s3 = write(dir.path(), "s3.json", S3);
    assert_eq!(json(&wreathgen(&["decide", "--group", &a5], None))["decision"], "YES");
    let v = json(&wreathgen(&["decide", "--group", &s3], None));
    assert_eq!(v["decision"], "NO");
    assert_eq!(v["abelianization"]["target_order"], 2);
    assert_eq!(json(&wreathgen(&["decide-universal", "--group", &s3], None))["decision"], "NO");
}

#[test]
fn zeta_and_maximal() {
    let dir = tempfile::tempdir().unwrap();
    let a5 = write(dir.path(), "a5.json", A5);
    let v = json(&wreathgen(&["zeta", "--group", &a5, "--check-k", "2"], None));
    assert_eq!(v["zeta"]["total"], "7/15");
    assert_eq!(v["quotient_bound"]["holds"], true);
    let v = json(&wreathgen(&["maximal", "--group", &a5], None));
    let idx: Vec<u64> = v["maximal"].as_array().unwrap().iter().map(|c| c["index"].as_u64().unwrap()).collect();
    assert_eq!(idx, vec![5, 6, 10]);
    assert_eq!(v["subgroups"], 59);
}

#[test]
fn zeta_of_a_map() {
    let dir = tempfile::tempdir().unwrap();
    let map = r#"{ "source": { "degree": 3, "generators": [[1, 2, 0], [1, 0, 2]] },
                   "target": { "degree": 2, "generators": [[1, 0]] },
                   "images": [[0, 1], [1, 0]] }"#;
    let m = write(dir.path(), "map.json", map);
    // only the normal A_3 fails to surject; the three point stabilizers have index 3
    assert_eq!(json(&wreathgen(&["zeta", "--map", &m], None))["zeta"]["total"], "1/3");
}

#[test]
fn tower_commands() {
    let dir = tempfile::tempdir().unwrap();
    let a5 = write(dir.path(), "a5.json", A5);
    let v = json(&wreathgen(&["tower", "build", "--group", &a5, "--level", "2"], None));
    assert_eq!(v["order"], v["expected_order"]);
    assert_eq!(v["degree"], 25);
    let v = json(&wreathgen(&["tower", "verify", "--group", &a5, "--level", "2", "--pairs", "100"], None));
    assert_eq!(v["ok"], true);
    let e = r#"{ "layers": [[[1, 2, 0, 3, 4]], [[0, 1, 2, 3, 4], [1, 2, 3, 4, 0], [0, 1, 2, 3, 4], [0, 1, 2, 3, 4], [2, 1, 0, 4, 3]]] }"#;
    let a = write(dir.path(), "e.json", e);
    let v = json(&wreathgen(&["tower", "mult", "--group", &a5, "--a", &a, "--b", &a], None));
    assert_eq!(v["permutation"].as_array().unwrap().len(), 25);
}

#[test]
fn monte_carlo_is_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a5 = write(dir.path(), "a5.json", A5);
    let run = |extra: &[&str]| {
        let mut args = vec!["pk", "--group", a5.as_str(), "--mode", "mc", "--samples", "3000", "--seed", "11"];
        args.extend_from_slice(extra);
        let out = wreathgen(&args, None);
        assert!(out.status.success());
        out.stdout
    };
    let base = run(&[]);
    assert_eq!(base, run(&["--sequential"]));
    assert_eq!(base, run(&["--threads", "2"]));
}

#[test]
fn cache_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let a5 = write(dir.path(), "a5.json", A5);
    let args = ["tower", "build", "--group", a5.as_str(), "--level", "2"];
    let cold = wreathgen(&args, Some(&cache));
    let warm = wreathgen(&args, Some(&cache));
    let none = wreathgen(&args, None);
    assert!(std::fs::read_dir(&cache).unwrap().count() > 0);
    assert_eq!(cold.stdout, warm.stdout);
    assert_eq!(cold.stdout, none.stdout);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let a5 = write(dir.path(), "a5.json", A5);
    let bad = write(dir.path(), "bad.json", r#"{ "degree": 3, "generators": [[0, 0, 1]] }"#);
    assert_eq!(wreathgen(&["decide", "--group", &bad], None).status.code(), Some(2));
    assert_eq!(wreathgen(&["pk", "--group", "/no/such/file.json"], None).status.code(), Some(2));
    let capped = wreathgen(&["pk", "--group", &a5, "--k", "5", "--mode", "exact", "--lattice-cap", "10"], None);
    assert_eq!(capped.status.code(), Some(3));
    // without overrides or crude bounds C7 is out of reach
    assert_eq!(wreathgen(&["certify", "--spec", &a5], None).status.code(), Some(3));
}

#[test]
fn certify_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let a5 = write(dir.path(), "a5.json", A5);
    let v = json(&wreathgen(&["certify", "--spec", &a5, "--override", "C7=121", "--override", "K=22"], None));
    assert_eq!(v["n1"], 1);
    assert_eq!(v["k2"], 2);
    assert_eq!(v["p_lower"], "19/30");
    assert!(v["flags"].as_object().unwrap().values().all(|f| f == true));
}
