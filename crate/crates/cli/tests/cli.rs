use std::path::Path;
use std::process::{Command, Output};

fn zetalab(args: &[&str], envs: &[(&str, &Path)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_zetalab"));
    c.args(args).env_remove("ZETALAB_CACHE_DIR");
    for (k, v) in envs {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn zeros_find_caches_29_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("out.zcat");
    let out = dir.path().join("r.json");
    let o = zetalab(
        &["zeros", "find", "--t-min", "10", "--t-max", "100", "--cache", cache.to_str().unwrap(), "--out", out.to_str().unwrap()],
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(cache.exists());
    assert_eq!(json(&out)["report"]["count"], 29);
}

#[test]
fn default_cache_location_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = zetalab(&["zeros", "find", "--t-min", "10", "--t-max", "50", "--quiet"], &[("ZETALAB_CACHE_DIR", dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
}

#[test]
fn import_then_verify_against_reference() {
    let dir = tempfile::tempdir().unwrap();
    let reference = dir.path().join("ref.txt");
    std::fs::write(&reference, "# first zeros\n14.134725142\n21.022039639\n25.010857580\n30.424876126\n32.935061588\n").unwrap();
    let computed = dir.path().join("c.zcat");
    let o = zetalab(&["zeros", "find", "--t-min", "10", "--t-max", "35", "--cache", computed.to_str().unwrap(), "--quiet"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let o = zetalab(
        &["zeros", "verify", "--cache", computed.to_str().unwrap(), "--reference", reference.to_str().unwrap(), "--count", "5", "--quiet"],
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let imported = dir.path().join("i.zcat");
    let o = zetalab(&["zeros", "import", "--file", reference.to_str().unwrap(), "--cache", imported.to_str().unwrap(), "--quiet"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(imported.exists());
}

#[test]
fn verify_flags_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let reference = dir.path().join("ref.txt");
    std::fs::write(&reference, "14.2\n21.022039639\n").unwrap();
    let computed = dir.path().join("c.zcat");
    zetalab(&["zeros", "find", "--t-min", "10", "--t-max", "35", "--cache", computed.to_str().unwrap(), "--quiet"], &[]);
    let o = zetalab(
        &["zeros", "verify", "--cache", computed.to_str().unwrap(), "--reference", reference.to_str().unwrap(), "--count", "2", "--quiet"],
        &[],
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn divisor_check_exit_zero_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("v.csv");
    let o = zetalab(&["lemmas", "--which", "3.14", "--n-max", "100000", "--csv", csv.to_str().unwrap(), "--quiet"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("lemma_id,"));
}

#[test]
fn main_term_report_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = zetalab(&["theorem21", "--T", "5000", "--y1", "1", "--y2", "2", "--C", "1", "--out", p.to_str().unwrap(), "--quiet"], &[]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let v = json(&a);
    assert!(v["report"]["zeros_used"].as_u64().unwrap() >= 25);
    assert!(v["report"]["rel_residual"].as_f64().unwrap().is_finite());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.ini");
    std::fs::write(&cfg, "threads = 1\n[gonek]\na = 100\nb = 200\nsigma = 0.5\nu = 150\nm = 1\n").unwrap();
    let out = dir.path().join("g.json");
    let o = zetalab(&["gonek", "--config", cfg.to_str().unwrap(), "--u", "300", "--out", out.to_str().unwrap(), "--quiet"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out);
    assert_eq!(v["report"]["u"], 300.0);
    assert_eq!(v["report"]["a"], 100.0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(zetalab(&["theorem21", "--T", "5000", "--y1", "1"], &[]).status.code(), Some(2));
    assert_eq!(zetalab(&["nonsense"], &[]).status.code(), Some(2));
    assert_eq!(zetalab(&["sum", "--t1", "20", "--t2", "30", "--x", "4", "--y1", "1", "--y2", "2"], &[]).status.code(), Some(2));
    assert_eq!(zetalab(&["theorem21", "--T", "5000", "--y1", "1", "--y2", "1", "--C", "1"], &[]).status.code(), Some(2));
    assert_eq!(zetalab(&["gonek", "--threads", "0", "--a", "1"], &[]).status.code(), Some(2));
}

#[test]
fn chars_and_appendix() {
    assert_eq!(zetalab(&["chars", "--x", "31", "--quiet"], &[]).status.code(), Some(0));
    // the default constants give an increasing ratio column
    assert_eq!(zetalab(&["appendix", "--quiet"], &[]).status.code(), Some(1));
    assert_eq!(zetalab(&["appendix", "--mode", "banks_eps", "--quiet"], &[]).status.code(), Some(0));
    assert_eq!(zetalab(&["appendix", "--C", "2", "--quiet"], &[]).status.code(), Some(2));
}

#[test]
fn sum_and_contour_run() {
    let o = zetalab(&["sum", "--t1", "100", "--t2", "150", "--x", "3", "--y1", "1", "--y2", "2", "--quiet"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = zetalab(&["contour", "--t1", "20", "--t2", "40", "--x", "3", "--y1", "1", "--y2", "2", "--quiet"], &[]);
    assert!(matches!(o.status.code(), Some(0) | Some(1)), "{}", String::from_utf8_lossy(&o.stderr));
}
