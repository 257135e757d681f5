use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sptrade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sptrade")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn drop_then_solve() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("drop.toml");
    let o = sptrade(&["drop", "--seed", "4", "--index", "2", "--out", scenario.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let o = sptrade(&["solve", scenario.to_str().unwrap(), "--scheme", "exhaustive"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: toml::Table = toml::from_str(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(report["scheme"].as_str(), Some("exhaustive"));
    assert_eq!(report["status"].as_str(), Some("optimal"));
    assert!(report["ee_bits_per_joule"].as_float().unwrap() > 0.0);

    // stdout and --out carry the same drop
    let o = sptrade(&["drop", "--seed", "4", "--index", "2"]);
    assert_eq!(o.stdout, fs::read(&scenario).unwrap());
}

#[test]
fn constraint_flags_reach_the_solver() {
    let dir = tempfile::tempdir().unwrap();
    let text = String::from_utf8(sptrade(&["drop", "--seed", "1"]).stdout).unwrap();
    // a rate floor no allocation can reach
    let text = text
        .lines()
        .map(|l| if l.starts_with("r_sc_min_bps") { "r_sc_min_bps = 1e12".to_string() } else { l.to_string() })
        .collect::<Vec<_>>()
        .join("\n");
    let path = write(dir.path(), "s.toml", &text);

    let o = sptrade(&["solve", &path]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stdout).contains("infeasible-min-system-rate"));
    assert_eq!(code(&sptrade(&["solve", &path, "--no-c4"])), 0);
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = String::from_utf8(sptrade(&["drop"]).stdout).unwrap();
    let bad = write(dir.path(), "bad.toml", &text.replace("xi = 0.38", "xi = 1.5"));
    let o = sptrade(&["solve", &bad]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("`xi`"));

    assert_eq!(code(&sptrade(&["solve", "/nonexistent.toml"])), 1);
    assert_eq!(code(&sptrade(&["solve", &bad, "--scheme", "best"])), 1);
    assert_eq!(code(&sptrade(&["frobnicate"])), 1);
    let cfg = write(dir.path(), "cfg.toml", "experiment = \"ee-vs-pc\"\nvalues = [2.0, 1.0]\n");
    assert_eq!(code(&sptrade(&["sweep", &cfg])), 1);
    assert_eq!(code(&sptrade(&["--help"])), 0);
}

#[test]
fn sweep_writes_csv_and_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/out.csv");
    let cfg = write(
        dir.path(),
        "cfg.toml",
        &format!(
            "experiment = \"ee-vs-pmax\"\nvalues = [20, 30]\ndrops = 50\nseed = 3\noutput = \"{}\"\n",
            dir.path().join("ignored.csv").display()
        ),
    );
    let o = sptrade(&[
        "sweep", &cfg, "--drops", "2", "--seed", "8", "--scheme", "spt-order,non-spt", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 2 * 2);
    assert!(lines[0].starts_with("p_max_dbm,scheme,"));
    assert!(lines[1].contains(",spt-order,") && lines[2].contains(",non-spt,"));
    assert!(!dir.path().join("ignored.csv").exists());

    // same invocation, same bytes
    let again = dir.path().join("again.csv");
    sptrade(&["sweep", &cfg, "--drops", "2", "--seed", "8", "--scheme", "spt-order,non-spt", "--out", again.to_str().unwrap()]);
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn sweep_with_nothing_feasible_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.toml",
        "experiment = \"ee-vs-pc\"\nvalues = [1.0]\ndrops = 2\nschemes = [\"non-spt\"]\n[overrides]\nr_sc_min_bps = 1e12\n",
    );
    let o = sptrade(&["sweep", &cfg]);
    assert_eq!(code(&o), 2);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "1.000000000e0,non-spt,,,,0.000000000e0,");
    assert_eq!(code(&sptrade(&["sweep", &cfg, "--no-c4"])), 0);
}
