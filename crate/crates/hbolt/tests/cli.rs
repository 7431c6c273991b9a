use std::path::Path;
use std::process::{Command, Output};

use hbolt::io::{read_checkpoint, read_diag_csv, DIAG_HEADER};
use hbolt::RunConfig;

fn hbolt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hbolt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const BKW: &str = r#"
scenario = "bkw_maxwell"

[domain]
half_width = 8.0
n = 3

[time]
dt = 0.1
t_final = 0.4

[output]
snapshot_times = [0.0, 0.2]
"#;

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "bkw.toml", BKW);
    let out = dir.path().join("out");
    let o = hbolt(&["run", "--config", &config, "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let diag = std::fs::read_to_string(out.join("diag.csv")).unwrap();
    assert_eq!(diag.lines().next().unwrap(), DIAG_HEADER);
    let records = read_diag_csv(&out.join("diag.csv")).unwrap();
    assert_eq!(records.len(), 5);
    assert_eq!(records[0].t, 0.0);
    assert!(records.windows(2).all(|w| w[1].t > w[0].t));
    assert!(records.iter().all(|r| r.l2_error.is_some() && r.is_finite()));

    for name in ["slice_t0.csv", "slice_t0.2.csv"] {
        let slice = std::fs::read_to_string(out.join(name)).unwrap();
        assert_eq!(slice.lines().next().unwrap(), "v3,f");
        assert_eq!(slice.lines().count(), 1 + 6);
    }

    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["status"], "ok");
    assert_eq!(meta["scaled_down"], true);
    assert_eq!(meta["steps"], 4);

    let saved = RunConfig::load(&out.join("config.toml")).unwrap();
    let spec = saved.spec().unwrap();
    assert_eq!(read_checkpoint(&out.join("state.bin"), &spec).unwrap().step, 4);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "bkw.toml", BKW);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(hbolt(&["run", "--config", &config, "--out", s(&a)]).status.success());
    assert!(hbolt(&["run", "--config", &config, "--out", s(&b)]).status.success());
    for name in ["diag.csv", "slice_t0.2.csv", "state.bin"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn resume_continues_the_same_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let full = write_config(dir.path(), "full.toml", BKW);
    let half = write_config(dir.path(), "half.toml", &BKW.replace("t_final = 0.4", "t_final = 0.2"));
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    assert!(hbolt(&["run", "--config", &full, "--out", s(&a)]).status.success());
    assert!(hbolt(&["run", "--config", &half, "--out", s(&b)]).status.success());
    let o = hbolt(&["run", "--config", &full, "--out", s(&c), "--resume", s(&b.join("state.bin"))]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let spec = RunConfig::load(Path::new(&full)).unwrap().spec().unwrap();
    let x = read_checkpoint(&a.join("state.bin"), &spec).unwrap();
    let y = read_checkpoint(&c.join("state.bin"), &spec).unwrap();
    assert_eq!(x.step, y.step);
    let gap = (x.field.clone() - &y.field).l2_norm() / x.field.l2_norm();
    assert!(gap <= 1e-12, "{gap:e}");
    let resumed = read_diag_csv(&c.join("diag.csv")).unwrap();
    assert!((resumed[0].t - 0.2).abs() < 1e-15);
}

#[test]
fn sweep_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "bkw.toml", &BKW.replace("t_final = 0.4", "t_final = 0.2"));
    let out = dir.path().join("sweep");
    let o = hbolt(&["sweep", "--config", &config, "--axis", "N", "--values", "2,3", "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    let mut lines = summary.lines();
    assert_eq!(lines.next().unwrap(), "N,t,l2_error");
    assert_eq!(lines.count(), 2 * 3);
    assert!(out.join("N_2/diag.csv").exists() && out.join("N_3/diag.csv").exists());

    let o = hbolt(&["sweep", "--config", &config, "--axis", "L", "--values", "6,8", "--out", s(&dir.path().join("l"))]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(dir.path().join("l/summary.csv")).unwrap().starts_with("L,t,l2_error\n6.0,0.0,"));
}

#[test]
fn kernel_table_dump_feeds_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "bkw.toml", BKW);
    let table = dir.path().join("kernel.bin");
    let o = hbolt(&["kernel-table", "--config", &config, "--dump", s(&table)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let with_table = BKW.replace("[output]", &format!("[collision]\nkernel_table = {:?}\n\n[output]", s(&table)));
    let reuse = write_config(dir.path(), "reuse.toml", &with_table);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(hbolt(&["run", "--config", &config, "--out", s(&a)]).status.success());
    assert!(hbolt(&["run", "--config", &reuse, "--out", s(&b)]).status.success());
    assert_eq!(std::fs::read(a.join("diag.csv")).unwrap(), std::fs::read(b.join("diag.csv")).unwrap());

    let other = write_config(dir.path(), "other.toml", &with_table.replace("n = 3", "n = 4"));
    assert_eq!(hbolt(&["run", "--config", &other, "--out", s(&dir.path().join("c"))]).status.code(), Some(4));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.toml", &BKW.replace("dt = 0.1", "dt = 0.0"));
    assert_eq!(hbolt(&["run", "--config", &bad]).status.code(), Some(2));

    let missing = dir.path().join("missing.toml");
    assert_eq!(hbolt(&["run", "--config", s(&missing)]).status.code(), Some(4));

    let blow = write_config(
        dir.path(),
        "blow.toml",
        &BKW.replace("[output]", "[collision]\nkernel_scale = 1e300\n\n[output]"),
    );
    let out = dir.path().join("blow");
    let o = hbolt(&["run", "--config", &blow, "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let records = read_diag_csv(&out.join("diag.csv")).unwrap();
    assert!(!records.is_empty() && records.iter().all(|r| r.is_finite()));

    assert_eq!(hbolt(&["sweep", "--config", &bad, "--axis", "Q", "--values", "1"]).status.code(), Some(2));
}
