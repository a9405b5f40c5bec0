use std::path::Path;
use std::process::{Command, Output};

use lvphase::cli::{manifest_path, RunManifest};

fn lvphase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lvphase"))
        .args(args)
        .env_remove("LVPHASE_WORKERS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = lvphase(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn default_grid_curve_at_five_hundred() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fc.csv");
    ok(&["feasibility-curve", "--n", "500", "--kappa", "0.5:2.5:0.05", "--trials", "500", "--seed", "1", "--out", path_str(&csv)]);
    let body = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(body.lines().next().unwrap(), "n,abscissa,trials,degenerate,feasible_count,proportion,half_width,smoothed_proportion");
    let r = rows(&body);
    assert_eq!(r.len(), 41);
    let p: Vec<f64> = r.iter().map(|row| row[5].parse().unwrap()).collect();
    assert!(p[0] <= 0.02 && p[40] >= 0.98, "{} {}", p[0], p[40]);
    let m = RunManifest::read(&manifest_path(&csv)).unwrap();
    assert_eq!(m.subcommand, "feasibility-curve");
    assert_eq!(m.master_seed, 1);
    assert_eq!(m.thresholds["kappa_critical"].as_f64().unwrap(), 2f64.sqrt());
}

#[test]
fn critical_scan_is_reproducible() {
    let a = ok(&["critical-scan", "--n", "40,80", "--trials", "30", "--seed", "2"]);
    let b = ok(&["critical-scan", "--n", "40,80", "--trials", "30", "--seed", "2", "--workers", "1"]);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.lines().next().unwrap().ends_with(",h1,h2"));
    assert_eq!(rows(&text).len(), 2);
}

#[test]
fn nh_curve_records_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("nh.csv");
    ok(&["nh-curve", "--n", "2000", "--kappa", "3.5", "--trials", "1", "--out", path_str(&csv)]);
    let m = RunManifest::read(&manifest_path(&csv)).unwrap();
    let t1 = m.thresholds["t1"].as_f64().unwrap();
    let t2 = m.thresholds["t2"].as_f64().unwrap();
    assert_eq!((format!("{t1:.2}"), format!("{t2:.2}")), ("0.98".to_owned(), "2.94".to_owned()));
    assert!(m.thresholds["limit"]["t1"].as_f64().is_some());
    let body = std::fs::read_to_string(&csv).unwrap();
    assert!(body.lines().next().unwrap().ends_with(",t1,t2"));
}

#[test]
fn plots_are_deterministic_svg() {
    let dir = tempfile::tempdir().unwrap();
    let render = |name: &str| {
        let csv = dir.path().join(format!("{name}.csv"));
        let svg = dir.path().join(format!("{name}.svg"));
        ok(&["feasibility-curve", "--n", "50", "--kappa", "1.4", "--trials", "10", "--plot", path_str(&svg), "--out", path_str(&csv)]);
        std::fs::read_to_string(svg).unwrap()
    };
    let first = render("a");
    assert_eq!(first, render("b"));
    assert!(first.starts_with("<svg"));
    assert_eq!(first.matches("<circle").count(), 1);
    assert!(first.contains(r#"data-x="1.414214""#));
}

#[test]
fn exit_codes() {
    assert_eq!(lvphase(&["feasibility-curve", "--trials", "many"]).status.code(), Some(2));
    assert_eq!(lvphase(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(lvphase(&["feasibility-curve", "--n", "50", "--kappa", "1", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(lvphase(&["feasibility-curve", "--alpha-rule", "critical"]).status.code(), Some(2));
    assert_eq!(lvphase(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.txt");
    let growth = format!("file:{}", path_str(&missing));
    let out = lvphase(&["nh-curve", "--n", "20", "--kappa", "1", "--trials", "2", "--growth", &growth]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));

    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let target = blocker.join("out.csv");
    let out = lvphase(&["feasibility-curve", "--n", "20", "--kappa", "1", "--trials", "2", "--out", path_str(&target)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn growth_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("r.txt");
    let values: Vec<String> = (0..30).map(|i| format!("{}", 1.0 + i as f64 / 30.0)).collect();
    std::fs::write(&file, values.join("\n")).unwrap();
    let growth = format!("file:{}", path_str(&file));
    let out = ok(&["nh-curve", "--n", "30", "--kappa", "2,3", "--trials", "5", "--growth", &growth]);
    assert_eq!(rows(&String::from_utf8(out.stdout).unwrap()).len(), 2);
    let out = lvphase(&["nh-curve", "--n", "31", "--kappa", "2", "--trials", "5", "--growth", &growth]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn other_subcommands_write_their_tables() {
    let out = ok(&["evt-check", "--n", "100,1000", "--trials", "200", "--seed", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "n,trials,which,ks_distance");
    assert_eq!(rows(&text).len(), 2);

    let out = ok(&["stability", "--n", "60", "--trials", "3", "--seed", "3", "--bauer-fike"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("trial,n,alpha,max_re,match_dist,rho_plus,stable"));
    assert_eq!(rows(&text).len(), 3);

    let out = ok(&["lv-sim", "--n", "30", "--t-end", "2", "--stride", "50"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "trial,time,min_x,max_x,distance");
    assert!(rows(&text).len() >= 3);
}

#[test]
fn replay_reproduces_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("run.csv");
    ok(&["feasibility-curve", "--n", "40,60", "--kappa", "1:2:0.5", "--trials", "12", "--seed", "4", "--workers", "1", "--out", path_str(&csv)]);
    let manifest = manifest_path(&csv);
    let out = Command::new(env!("CARGO_BIN_EXE_lvphase"))
        .args(["replay", path_str(&manifest), "--check"])
        .env("LVPHASE_WORKERS", "3")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let replayed = dir.path().join("run.replay.csv");
    assert_eq!(std::fs::read(&csv).unwrap(), std::fs::read(replayed).unwrap());
}
