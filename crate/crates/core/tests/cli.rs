use std::path::Path;
use std::process::{Command, Output};

use bcg_core::game::{CostFunction, Game, Player};
use bcg_core::instances::{load_instance, save_instance};

fn bcg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bcg")).args(args).env("BCG_THREADS", "2").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(key)).unwrap_or_else(|| panic!("no {key} in {text}"));
    line[key.len()..].split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn generate_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let o = bcg(&["generate", "--family", "triangle", "--p", "0.5", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("3 players"));
    assert_eq!(load_instance(&out).unwrap().num_players(), 3);
}

#[test]
fn generate_rejects_bad_roundabout() {
    let o = bcg(&["generate", "--family", "roundabout", "--k", "4", "--m", "3", "--p", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("m > k"));
}

#[test]
fn generate_random_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for path in [&a, &b] {
        let o = bcg(&["generate", "--family", "random", "--seed", "7", "--players", "3", "--out", path_str(path)]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(bcg(&[]).status.code(), Some(2));
    assert_eq!(bcg(&["generate", "--family", "hexagon", "--p", "0.5"]).status.code(), Some(2));
    assert_eq!(bcg(&["generate", "--family", "pigou"]).status.code(), Some(2));
    assert_eq!(bcg(&["--help"]).status.code(), Some(0));
}

fn analyze_family(args: &[&str]) -> String {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let mut gen = vec!["generate"];
    gen.extend_from_slice(args);
    gen.extend_from_slice(&["--out", path_str(&path)]);
    assert_eq!(bcg(&gen).status.code(), Some(0));
    let o = bcg(&["analyze", "--in", path_str(&path)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

#[test]
fn analyze_reports_ratios() {
    let text = analyze_family(&["--family", "triangle", "--p", "1"]);
    assert!(field(&text, "PoA") >= 2.5 - 1e-5);

    let text = analyze_family(&["--family", "pigou", "--k", "1", "--p", "0.5"]);
    assert_eq!(field(&text, "PoA"), 1.0);
    assert_eq!(field(&text, "PoS"), 1.0);

    let text = analyze_family(&["--family", "bypass", "--k", "2", "--p", "0.25"]);
    let want = (2.0 + 1.5) / (1.5 + 1.75);
    assert!((field(&text, "PoA") - want).abs() < 1e-5);
}

#[test]
fn analyze_json_is_lossless() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    bcg(&["generate", "--family", "bypass", "--k", "2", "--p", "0.25", "--out", path_str(&path)]);
    let o = bcg(&["analyze", "--in", path_str(&path), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let want = (2.0 + 1.5) / (1.5 + 1.75);
    assert!((v["poa"].as_f64().unwrap() - want).abs() < 1e-12);
    assert_eq!(v["method"], "exhaustive");
    assert_eq!(v["equilibria"].as_array().unwrap().len(), 1);
}

#[test]
fn analyze_guard_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    // 22 players with two routes each: 2^22 profiles
    let o =
        bcg(&["generate", "--family", "roundabout", "--k", "7", "--m", "15", "--p", "0.5", "--out", path_str(&path)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(bcg(&["analyze", "--in", path_str(&path)]).status.code(), Some(3));
    let o = bcg(&["analyze", "--in", path_str(&path), "--best-response-only"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("BestResponseOnly"));
}

#[test]
fn bound_single_points() {
    let o = bcg(&["bound", "--p", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "2.5");
    assert!((row[2].parse::<f64>().unwrap() - 1.57735).abs() < 1e-5);
    assert_eq!(row[5], "high");

    let text = stdout(&bcg(&["bound", "--p", "0.2"]));
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').filter_map(|c| c.parse().ok()).collect();
    assert_eq!(row[1], 4.0 / 3.0);
    assert_eq!(row[2], 4.0 / 3.0);

    assert_eq!(bcg(&["bound", "--p", "0"]).status.code(), Some(2));
    assert_eq!(bcg(&["bound", "--p", "1.5"]).status.code(), Some(2));
    assert_eq!(bcg(&["bound", "--grid", "1"]).status.code(), Some(2));
}

#[test]
fn bound_grid_csv_and_json_agree() {
    let csv = stdout(&bcg(&["bound", "--grid", "100"]));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 101);
    assert!(lines[0].starts_with("p,poa_bound,pos_bound,lambda,mu,regime"));
    let json: serde_json::Value =
        serde_json::from_slice(&bcg(&["bound", "--grid", "100", "--out", "json"]).stdout).unwrap();
    let rows = json.as_array().unwrap();
    assert_eq!(rows.len(), 100);
    let mut last = (0.0, 0.0);
    for (line, row) in lines[1..].iter().zip(rows) {
        let cells: Vec<&str> = line.split(',').collect();
        let p: f64 = cells[0].parse().unwrap();
        let poa: f64 = cells[1].parse().unwrap();
        assert_eq!(p, row["p"].as_f64().unwrap());
        assert_eq!(poa, row["poa_bound"].as_f64().unwrap());
        assert_eq!(cells[2].parse::<f64>().unwrap(), row["pos_bound"].as_f64().unwrap());
        assert!(p > last.0 && poa >= last.1);
        last = (p, poa);
    }
    assert_eq!(last.0, 1.0);
    // default sweep
    assert_eq!(stdout(&bcg(&["bound"])).lines().count(), 401);
    // deterministic output
    assert_eq!(csv, stdout(&bcg(&["bound", "--grid", "100"])));
}

#[test]
fn bound_with_family_columns() {
    let csv = stdout(&bcg(&["bound", "--grid", "4", "--family", "pigou", "--k", "2"]));
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].ends_with("instance_poa,instance_pos"));
    for line in &lines[1..] {
        let cells: Vec<f64> = line.split(',').filter_map(|c| c.parse().ok()).collect();
        let (p, bound, inst) = (cells[0], cells[1], cells[6]);
        let want = (8.0 * p + 2.0 - 2.0 * p) / (6.0 * p + 2.0 - p);
        assert!((inst - want).abs() < 1e-12 && inst <= bound);
    }
    let csv = stdout(&bcg(&["bound", "--grid", "4", "--family", "roundabout", "--k", "1"]));
    assert_eq!(csv.lines().nth(1).unwrap().split(',').count(), 9);
}

#[test]
fn verify_smoothness_modes() {
    let o = bcg(&["verify", "--p", "1", "--kmax", "500", "--mmax", "500"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("certified"));
    let o = bcg(&["verify", "--p", "0.5", "--lambda", "1", "--mu", "0"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("FAILED") && stdout(&o).contains("(k, m) = (250, 500)"));
}

#[test]
fn verify_potential_mode() {
    let o = bcg(&["verify", "--potential", "--trials", "100", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("exact potential verified"));
}

#[test]
fn reduce_heterogeneous_file() {
    let dir = tempfile::tempdir().unwrap();
    let (input, output) = (dir.path().join("h.json"), dir.path().join("r.json"));
    let game = Game::new(
        "het",
        vec![CostFunction::affine(1.0, 0.5), CostFunction::affine(2.0, 0.0)],
        vec![Player::new(0.3, vec![vec![0], vec![1]]), Player::new(0.8, vec![vec![0, 1], vec![1]])],
    );
    save_instance(&game, &input).unwrap();
    let o = bcg(&["reduce", "--in", path_str(&input), "--out", path_str(&output)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(field(&stdout(&o), "max discrepancy") < 1e-12);
    let reduced = load_instance(&output).unwrap();
    assert_eq!(reduced.players[1].p, 1.0);
    assert!(matches!(reduced.resources[0], CostFunction::Table { .. }));

    let o = bcg(&["reduce", "--in", path_str(&input), "--q", "0.5", "--out", path_str(&output)]);
    assert_eq!(o.status.code(), Some(2));

    let uniform = game.with_uniform_probability(0.4);
    save_instance(&uniform, &input).unwrap();
    assert_eq!(bcg(&["reduce", "--in", path_str(&input), "--out", path_str(&output)]).status.code(), Some(0));
    assert!(load_instance(&output).unwrap().players.iter().all(|p| p.p == 1.0));
}

#[test]
fn bad_thread_count() {
    let o = Command::new(env!("CARGO_BIN_EXE_bcg"))
        .args(["bound", "--p", "0.5"])
        .env("BCG_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
