use std::path::Path;
use std::process::{Command, Output};

fn tunnelkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tunnelkit"))
        .args(args)
        .env_remove("TUNNELKIT_DIGITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn anharmonic_ground_state() {
    let o = tunnelkit(&["spectrum", "--family", "anharmonic", "--g", "1", "--levels", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("# tunnelkit spectrum family=anharmonic g=1"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 2);
    assert!(rows[0][3].starts_with("6.20927029"), "{}", rows[0][3]);
    assert_eq!(rows[0][2], "even");
    assert_eq!(rows[1][2], "odd");
}

#[test]
fn cosine_ring_pairs_are_bitwise_degenerate() {
    let o = tunnelkit(&["spectrum", "--family", "cosine", "--K", "3", "--g", "0.05", "--levels", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 3);
    assert_ne!(rows[0][3], rows[1][3]);
    assert_eq!(rows[1][3], rows[2][3]);
}

#[test]
fn configuration_errors_exit_2() {
    for args in [
        &["spectrum", "--family", "anharmonic", "--g", "1", "--levels", "0"][..],
        &["spectrum", "--family", "anharmonic", "--g", "1", "--digits", "12"][..],
        &["spectrum", "--family", "double-well", "--g", "-0.1"][..],
        &["shoot", "--family", "cosine", "--g", "0.1"][..],
        &["wkb", "--family", "anharmonic", "--g", "1"][..],
    ] {
        let o = tunnelkit(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn solver_errors_exit_3() {
    let o = tunnelkit(&["wavefunction", "--family", "double-well", "--g", "0.1", "--M", "1300", "--points", "3"]);
    assert_eq!(o.status.code(), Some(3));
    // A starved grid point is reported while the resolvable one is still written.
    let o = tunnelkit(&["splitting", "--family", "double-well", "--g-grid", "0.1,0.005", "--digits", "20"]);
    assert_eq!(o.status.code(), Some(3));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "0.1");
    assert!(String::from_utf8_lossy(&o.stderr).contains("0.005"));
}

fn written(dir: &Path, name: &str, args: &[&str], threads: &str) -> Vec<u8> {
    let path = dir.join(format!("{name}-{threads}.csv"));
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    full.extend(["--threads", threads, "-o", p]);
    let o = tunnelkit(&full);
    assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
    std::fs::read(&path).unwrap()
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &[&str]); 3] = [
        ("spectrum", &["spectrum", "--family", "double-well", "--g", "0.05", "--levels", "6"]),
        ("splitting", &["splitting", "--family", "double-well", "--g-grid", "0.08,0.06,0.05,0.04"]),
        ("band", &["band", "--family", "cosine", "--K", "6", "--g", "0.05"]),
    ];
    for (name, args) in cases {
        let one = written(dir.path(), name, args, "1");
        let four = written(dir.path(), name, args, "4");
        assert!(!one.is_empty());
        assert_eq!(one, four, "{name}");
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"family": "anharmonic", "g": 2, "levels": 4, "digits": 25}"#).unwrap();
    let o = tunnelkit(&["spectrum", "--config", cfg.to_str().unwrap(), "--g", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().contains(" g=1 "));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][5], "25");
    assert!(rows[0][3].starts_with("6.20927029"));
}

#[test]
fn json_output_carries_config_and_rows() {
    let o = tunnelkit(&["spectrum", "--family", "anharmonic", "--g", "1", "--levels", "1", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "spectrum");
    assert_eq!(v["columns"][3], "energy");
    let energy = v["rows"][0][3].as_str().unwrap();
    assert!(energy.starts_with("6.20927029"), "{energy}");
}
