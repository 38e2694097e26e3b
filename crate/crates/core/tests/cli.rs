//! The `rwrs` binary: configuration precedence, exit codes and artifacts.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rwrs(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rwrs"));
    cmd.args(args);
    for var in ["RWRS_CONFIG", "RWRS_SEED", "RWRS_WORKERS", "RWRS_OUT", "RWRS_STRICT"] {
        cmd.env_remove(var);
    }
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// 64-bit FNV-1a, written out here as an independent check of the manifest.
fn fnv(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

#[test]
fn print_config_applies_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.cfg");
    std::fs::write(&file, "# comment\ncommand = schema-cf\nn = 100\nseed = 5\nreplicas = 7\n").unwrap();
    let f = file.to_str().unwrap();

    let o = rwrs(&["--config", f, "--print-config", "--set", "replicas=9"], &[]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("command = schema-cf\n"));
    assert!(text.contains("n = 100\n"));
    assert!(text.contains("seed = 5\n"));
    assert!(text.contains("replicas = 9\n"));

    let o = rwrs(&["--config", f, "--print-config", "--seed", "6"], &[("RWRS_SEED", "77")]);
    assert!(stdout(&o).contains("seed = 6\n"));
    let o = rwrs(&["--print-config"], &[("RWRS_CONFIG", f), ("RWRS_SEED", "77")]);
    assert!(stdout(&o).contains("seed = 77\n"));
    assert!(stdout(&o).contains("command = schema-cf\n"));
    let o = rwrs(&["walk-scaling", "--config", f, "--print-config"], &[]);
    assert!(stdout(&o).contains("command = walk-scaling\n"));
}

#[test]
fn bad_configuration_exits_with_one() {
    assert_eq!(rwrs(&["schema-cf", "--set", "alpha=banana", "--print-config"], &[]).status.code(), Some(1));
    assert_eq!(rwrs(&["schema-cf", "--set", "nonsense=1"], &[]).status.code(), Some(1));
    assert_eq!(rwrs(&["--print-config"], &[]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();
    // alpha must lie in (1, 2].
    assert_eq!(rwrs(&["schema-cf", "--out", out, "--set", "alpha=0.9"], &[]).status.code(), Some(1));
    assert_eq!(rwrs(&["schema-cf", "--out", out, "--set", "replicas=0"], &[]).status.code(), Some(1));
}

#[test]
fn strict_mode_reports_failed_statistics() {
    // Horizons 1 to 3 cannot show the asymptotic growth rates.
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let args = ["walk-scaling", "--out", out.to_str().unwrap(), "--set", "ns=1,2,3", "--set", "replicas=400"];
    let lax = rwrs(&args, &[]);
    assert_eq!(lax.status.code(), Some(0));
    assert!(stdout(&lax).contains("FAIL"));
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(rwrs(&strict, &[]).status.code(), Some(2));
    assert_eq!(rwrs(&args, &[("RWRS_STRICT", "true")]).status.code(), Some(2));
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn manifest_lists_every_artifact_with_hash() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let o = rwrs(&["feasible-sweep", "--out", out.to_str().unwrap(), "--set", "sweep=200", "--strict"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&out);
    assert_eq!(m["command"], "feasible-sweep");
    let files = m["files"].as_array().unwrap();
    let mut names: Vec<&str> = files.iter().map(|f| f["name"].as_str().unwrap()).collect();
    names.sort();
    assert!(names.contains(&"feasible-sweep.csv"));
    assert!(names.contains(&"summary.json"));
    for f in files {
        let bytes = std::fs::read(out.join(f["name"].as_str().unwrap())).unwrap();
        assert_eq!(f["bytes"].as_u64().unwrap() as usize, bytes.len());
        assert_eq!(f["fnv1a64"].as_str().unwrap(), fnv(&bytes));
    }
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);
    assert_eq!(summary["config_fingerprint"], m["config_fingerprint"]);
}

#[test]
fn reruns_reproduce_tables_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let common = ["--set", "n=256", "--set", "copies=1", "--set", "replicas=200", "--set", "mc_reps=100", "--seed", "3"];
    let mut csvs = Vec::new();
    let mut prints = Vec::new();
    for (i, workers) in ["1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("run{i}"));
        let mut args = vec!["schema-cf", "--out", out.to_str().unwrap(), "--workers", workers];
        args.extend(common);
        let o = rwrs(&args, &[]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        csvs.push(std::fs::read(out.join("schema-cf.csv")).unwrap());
        prints.push(manifest(&out)["config_fingerprint"].clone());
    }
    assert_eq!(csvs[0], csvs[1]);
    assert_eq!(prints[0], prints[1]);
    let header = String::from_utf8_lossy(&csvs[0]).lines().next().unwrap().to_string();
    assert_eq!(header, "replica,t,value");
}
