use std::path::Path;
use std::process::{Command, Output};

fn fdim(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdim"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn koch(dir: &Path, order: &str) {
    let o = fdim(dir, &["generate", "--fractal", "koch", "--order", order, "--out", "koch.fdim"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

fn field(line: &str, key: &str) -> f64 {
    line.split_whitespace()
        .find_map(|w| w.strip_prefix(&format!("{key}=")))
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| panic!("no {key} in {line}"))
}

#[test]
fn generate_then_boxdim() {
    let dir = tempfile::tempdir().unwrap();
    let o = fdim(dir.path(), &["generate", "--fractal", "koch", "--order", "6", "--out", "koch.fdim"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("points=12288"), "{}", stdout(&o));
    let set = fdim::geometry::read_points(dir.path().join("koch.fdim")).unwrap();
    assert_eq!(set.len(), 12288);

    let o = fdim(dir.path(), &["boxdim", "--in", "koch.fdim", "--rmin", "3", "--rmax", "8", "--out", "b.json"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    assert!(line.starts_with("boxdim "));
    assert!((field(&line, "value") - 1.26).abs() <= 0.05, "{line}");
    let json = std::fs::read_to_string(dir.path().join("b.json")).unwrap();
    assert!(json.contains("\"cli.r_max\": \"8\""), "{json}");
    let csv = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert!(csv.contains("r,N_r,log2_N"));
}

#[test]
fn csv_round_trip_and_other_fractals() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["generate", "--fractal", "cantor", "--depth", "6", "--out", "c.csv"],
        vec!["generate", "--fractal", "sierpinski", "--depth", "5", "--out", "s.fdim"],
    ] {
        let o = fdim(dir.path(), &args);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let text = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert!(text.lines().any(|l| l == "# fractal=cantor" || l.contains("cli.fractal=cantor")));
    let o = fdim(dir.path(), &["boxdim", "--in", "c.csv", "--rmin", "2", "--rmax", "9"]);
    assert!((field(&stdout(&o), "value") - 0.6309).abs() < 0.06, "{}", stdout(&o));
    std::fs::write(dir.path().join("map.txt"), "dim=1\nmap ratio=0.5 offset=0\nmap ratio=0.25 offset=0.75\n").unwrap();
    let o = fdim(dir.path(), &["generate", "--fractal", "ifs", "--ifs", "map.txt", "--depth", "8", "--out", "i.fdim"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn intersect_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    koch(dir.path(), "6");
    let o = fdim(
        dir.path(),
        &["intersect", "--e", "koch.fdim", "--f", "koch.fdim", "--count", "100", "--seed", "7", "--out", "r.json"],
    );
    let line = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{line}{}", stderr(&o));
    assert!(line.starts_with("intersect koch-vs-koch value="), "{line}");
    assert!(line.trim_end().ends_with("status=PASS"));
    let json = std::fs::read_to_string(dir.path().join("r.json")).unwrap();
    assert!(json.contains("\"cli.seed\": \"7\""));
    assert!(json.contains("\"version\": \"0.1.0\""));
    assert!(dir.path().join("r.csv").exists());
}

#[test]
fn same_seed_same_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [a.path(), b.path()] {
        koch(d, "5");
        let o = fdim(d, &["motion", "--e", "koch.fdim", "--f", "koch.fdim", "--count", "30", "--seed", "3", "--out", "m.json"]);
        assert!(o.status.code().is_some_and(|c| c < 2), "{}", stderr(&o));
    }
    for f in ["m.json", "m.csv", "koch.fdim"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn failed_campaign_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    koch(dir.path(), "5");
    let o = fdim(
        dir.path(),
        &["intersect", "--e", "koch.fdim", "--f", "koch.fdim", "--count", "30", "--tolerance=-1", "--allowed-fraction", "0"],
    );
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).trim_end().ends_with("status=FAIL"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["boxdim", "--rmin", "three"],
        vec!["frobnicate"],
        vec!["boxdim", "--in", "missing.fdim"],
        vec!["generate", "--fractal", "dragon", "--out", "x.fdim"],
        vec!["intersect", "--e", "a", "--f", "b", "--count", "10"],
    ] {
        let o = fdim(dir.path(), &args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    koch(dir.path(), "4");
    let o = fdim(dir.path(), &["intersect", "--e", "koch.fdim", "--f", "koch.fdim", "--count", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("insufficient samples"));
}

#[test]
fn missing_calibration_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [vec!["kdim", "--random", "1024"], vec!["chain", "--count", "20"]] {
        let o = fdim(dir.path(), &args);
        assert_eq!(o.status.code(), Some(2));
        assert!(stderr(&o).contains("fdim calibrate"), "{}", stderr(&o));
    }
    let o = fdim(dir.path(), &["calibrate"]);
    assert_eq!(o.status.code(), Some(0));
    let o = fdim(dir.path(), &["kdim", "--random", "4096", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(field(&stdout(&o), "lower") >= 0.8);
    let o = fdim(dir.path(), &["chain", "--count", "20", "--length", "1024", "--seed", "4"]);
    assert!(stdout(&o).contains("status=PASS"), "{}", stdout(&o));
}

#[test]
fn calibrate_is_idempotent_and_matches_committed_file() {
    let dir = tempfile::tempdir().unwrap();
    assert!(fdim(dir.path(), &["calibrate", "--out", "one.txt"]).status.success());
    assert!(fdim(dir.path(), &["calibrate", "--out", "two.txt"]).status.success());
    let one = std::fs::read(dir.path().join("one.txt")).unwrap();
    assert_eq!(one, std::fs::read(dir.path().join("two.txt")).unwrap());
    let committed = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../calibration/fdim-calibration.txt");
    assert_eq!(one, std::fs::read(committed).unwrap());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    koch(dir.path(), "6");
    std::fs::write(dir.path().join("run.cfg"), "# box fit\ncommand=boxdim\nin=koch.fdim\nr_min=2\nr_max=5\n").unwrap();
    let o = fdim(dir.path(), &["--config", "run.cfg", "boxdim", "--rmax", "8"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("r=[2,8]"), "{}", stdout(&o));
    std::fs::write(dir.path().join("bad.cfg"), "in=koch.fdim\ndepth=3\n").unwrap();
    let o = fdim(dir.path(), &["--config", "bad.cfg", "boxdim"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("valid keys: auto, in, out, precision, r_max, r_min, seed"), "{}", stderr(&o));
}

#[test]
fn product_and_probe_commands() {
    let dir = tempfile::tempdir().unwrap();
    assert!(fdim(dir.path(), &["generate", "--fractal", "cantor", "--depth", "8", "--out", "c.fdim"]).status.success());
    let o = fdim(dir.path(), &["product", "--e", "c.fdim", "--f", "c.fdim", "--oracle", "1.2618595", "--out", "p.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("status=PASS"));
    let o = fdim(dir.path(), &["product", "--e", "c.fdim", "--f", "c.fdim", "--cap", "1000"]);
    assert_eq!(o.status.code(), Some(2));
    let o = fdim(dir.path(), &["probe", "--in", "c.fdim", "--count", "50", "--rmin", "4", "--rmax", "11"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).trim_end().ends_with("status=REPORT"));
}
