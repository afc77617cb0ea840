use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;
use wtsp::io::{instance_from_json, instance_to_json};
use wtsp::synth::{random_ttp, two_sided_ttp};
use wtsp::ttp::{write_ttp, TtpInstance, TtpItem};
use wtsp::{CostFunction, Metric, WTspInstance};

fn wtsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wtsp"))
        .args(args)
        .env_remove("WTSP_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn save(dir: &TempDir, name: &str, contents: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, contents).unwrap();
    p.to_string_lossy().into_owned()
}

fn path_instance(n: usize) -> WTspInstance {
    let gaps = (1..n).map(|k| (k % 4 + 1) as f64).collect();
    let weights = (0..n).map(|k| (k % 3) as f64).collect();
    WTspInstance::new(
        Metric::path_from_gaps(gaps).unwrap(),
        weights,
        0,
        CostFunction::step([(2.0, 1.0), (5.0, 2.0)], 4.0).unwrap(),
    )
    .unwrap()
    .with_name("demo")
}

#[test]
fn solve_path_dp_writes_report_and_tour() {
    let dir = TempDir::new().unwrap();
    let inst = save(&dir, "inst.json", &instance_to_json(&path_instance(6)));
    let tour = dir.path().join("tour.txt");
    let out = wtsp(&["solve", "--solver", "path-dp", "--start", "1", &inst, "--tour-out", tour.to_str().unwrap()]);
    let report = json(&out);
    assert_eq!(report["solver"], "path-dp");
    assert_eq!(report["tour"][0], 1);
    assert!(report["cost"].as_f64().unwrap() > 0.0);
    let lines: Vec<usize> = fs::read_to_string(&tour).unwrap().lines().map(|l| l.parse().unwrap()).collect();
    let reported: Vec<usize> = report["tour"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap() as usize).collect();
    assert_eq!(lines, reported);
}

#[test]
fn free_start_is_no_worse_than_fixed() {
    let dir = TempDir::new().unwrap();
    let inst = save(&dir, "inst.json", &instance_to_json(&path_instance(7)));
    let fixed = json(&wtsp(&["solve", "--solver", "path-dp", &inst]));
    let free = json(&wtsp(&["solve", "--solver", "path-dp-free", &inst]));
    assert!(free["cost"].as_f64().unwrap() <= fixed["cost"].as_f64().unwrap());
}

#[test]
fn brute_force_guard_exits_2() {
    let dir = TempDir::new().unwrap();
    let inst = save(&dir, "big.json", &instance_to_json(&path_instance(13)));
    let out = wtsp(&["solve", "--solver", "brute", &inst]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn star_solver_on_path_exits_2() {
    let dir = TempDir::new().unwrap();
    let inst = save(&dir, "inst.json", &instance_to_json(&path_instance(4)));
    assert_eq!(wtsp(&["solve", "--solver", "star", &inst]).status.code(), Some(2));
    assert_eq!(wtsp(&["solve", "--solver", "linear", &inst]).status.code(), Some(2));
}

#[test]
fn unreadable_input_exits_3() {
    let dir = TempDir::new().unwrap();
    let bad = save(&dir, "bad.json", "{ \"nodes\": ");
    assert_eq!(wtsp(&["solve", "--solver", "path-dp", &bad]).status.code(), Some(3));
    let missing = dir.path().join("nope.json");
    assert_eq!(wtsp(&["solve", "--solver", "path-dp", missing.to_str().unwrap()]).status.code(), Some(3));
    let ttp = save(&dir, "bad.ttp", "PROBLEM NAME: x\nDIMENSION: 3\n");
    assert_eq!(wtsp(&["compare", &ttp]).status.code(), Some(3));
}

#[test]
fn unknown_solver_is_a_usage_error() {
    assert_eq!(wtsp(&["solve", "--solver", "magic", "x.json"]).status.code(), Some(2));
}

fn reduce_and_solve(dir: &TempDir, values: &[&str]) -> (WTspInstance, f64) {
    let path = dir.path().join(format!("reduced-{}.json", values.join("-")));
    let mut args = vec!["reduce", "--out", path.to_str().unwrap()];
    args.extend_from_slice(values);
    assert!(wtsp(&args).status.success());
    let inst = instance_from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    let report = json(&wtsp(&["solve", "--solver", "brute", path.to_str().unwrap()]));
    (inst, report["cost"].as_f64().unwrap())
}

#[test]
fn reduce_matches_the_construction() {
    let dir = TempDir::new().unwrap();
    let (inst, cost) = reduce_and_solve(&dir, &["1", "1", "2"]);
    assert_eq!(inst.weights, vec![7.0, 1.0, 1.0, 2.0, 2.0]);
    assert!(cost <= 6.0);
    let (_, cost) = reduce_and_solve(&dir, &["3", "3"]);
    assert!(cost <= 9.0);
    let (inst, cost) = reduce_and_solve(&dir, &["1", "2"]);
    assert_eq!(inst.n(), 4);
    assert!(cost > 4.0);
    assert_eq!(wtsp(&["reduce", "0", "3"]).status.code(), Some(2));
}

#[test]
fn star_and_linear_solvers_report() {
    let dir = TempDir::new().unwrap();
    let star = WTspInstance::new(
        Metric::star(0, vec![0.0, 1.0, 2.0, 4.0]),
        vec![0.0, 3.0, 1.0, 2.0],
        0,
        CostFunction::step([(1.0, 1.0), (3.0, 2.0)], 3.0).unwrap(),
    )
    .unwrap();
    let p = save(&dir, "star.json", &instance_to_json(&star));
    let exact = json(&wtsp(&["solve", "--solver", "star", &p]));
    let brute = json(&wtsp(&["solve", "--solver", "brute", &p]));
    assert!(exact["cost"].as_f64().unwrap() <= 8.0 * brute["cost"].as_f64().unwrap());
    let fptas = json(&wtsp(&["solve", "--solver", "star", "--knapsack", "fptas", &p]));
    assert_eq!(fptas["params"]["epsilon"], 0.25);

    let d = vec![
        vec![0.0, 3.0, 4.0, 5.0],
        vec![3.0, 0.0, 5.0, 4.0],
        vec![4.0, 5.0, 0.0, 3.0],
        vec![5.0, 4.0, 3.0, 0.0],
    ];
    let lin = WTspInstance::new(
        Metric::general(d),
        vec![1.0, 2.0, 3.0, 4.0],
        0,
        CostFunction::linear_speed(1.0, 0.1, 10.0).unwrap(),
    )
    .unwrap();
    let p = save(&dir, "lin.json", &instance_to_json(&lin));
    let r = json(&wtsp(&["solve", "--solver", "linear", &p]));
    assert!(r["scaled_duration"].as_f64().unwrap() <= r["duration_bound"].as_f64().unwrap());
    assert_eq!(r["params"]["epsilon"], 0.25);
}

#[test]
fn bench_emits_rows_for_both_pipelines() {
    let out = wtsp(&["bench", "--sizes", "101,501", "--reps", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 5);
    assert!(rows[0].starts_with("pipeline,n,"));
    for (row, (pipe, n)) in rows[1..].iter().zip([("full_dp", 101), ("clustered_dp", 101), ("full_dp", 501), ("clustered_dp", 501)]) {
        assert!(row.starts_with(&format!("{pipe},{n},")), "{row}");
    }
    assert!(String::from_utf8_lossy(&out.stderr).contains("log-log slope"));
}

fn write_ttp_file(dir: &TempDir, name: &str, ttp: &TtpInstance) -> String {
    save(dir, name, &write_ttp(ttp))
}

#[test]
fn compare_never_reports_negative_improvement() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let files: Vec<String> = (0..4)
        .map(|k| write_ttp_file(&dir, &format!("t{k}.ttp"), &random_ttp(&mut rng, &format!("t{k}"), 20, 2)))
        .collect();
    let csv = dir.path().join("improvements.csv");
    let mut args = vec!["compare", "--csv-out", csv.to_str().unwrap()];
    args.extend(files.iter().map(String::as_str));
    let reports = json(&wtsp(&args));
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 4);
    for r in reports {
        assert!(r["improvement_percent"].as_f64().unwrap() >= 0.0);
        assert!(r["cost"].as_f64().unwrap() <= r["baseline_cost"].as_f64().unwrap());
    }
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 5);
}

fn ttp(name: &str, cities: Vec<(f64, f64)>, items: Vec<(f64, f64, usize)>, capacity: f64) -> TtpInstance {
    TtpInstance {
        name: name.into(),
        knapsack_data_type: None,
        cities,
        items: items
            .into_iter()
            .map(|(profit, weight, city)| TtpItem { profit, weight, city })
            .collect(),
        capacity,
        min_speed: 0.1,
        max_speed: 1.0,
        renting_ratio: 1.0,
        edge_weight_type: "CEIL_2D".into(),
    }
}

#[test]
fn identical_tours_give_zero_improvement() {
    let dir = TempDir::new().unwrap();
    let t = ttp("three", vec![(0.0, 0.0), (5.0, 1.0), (2.0, 2.0)], vec![(10.0, 3.0, 1), (4.0, 2.0, 2)], 10.0);
    let f = write_ttp_file(&dir, "three.ttp", &t);
    let r = json(&wtsp(&["compare", &f]));
    assert_eq!(r["improvement_percent"], 0.0);
    assert_eq!(r["cost"], r["baseline_cost"]);
}

#[test]
fn plan_file_and_seed_flags() {
    let dir = TempDir::new().unwrap();
    let mut cities = vec![(0.0, 0.0), (1.0, 3.0)];
    let mut items = vec![(100.0, 90.0, 1)];
    for k in 0..10 {
        cities.push((10.0 + 10.0 * k as f64, (k % 3) as f64));
        items.push((5.0, 1.0, k + 2));
    }
    let f = write_ttp_file(&dir, "crafted.ttp", &ttp("crafted", cities, items, 100.0));
    let plan = save(&dir, "plan.txt", &(1..=11).map(|k| format!("{k}\n")).collect::<String>());
    let tour = dir.path().join("dp.tour");
    let r = json(&wtsp(&[
        "compare", &f, "--packing", "file", "--plan", &plan, "--seed", "3", "--tour-out", tour.to_str().unwrap(),
    ]));
    assert_eq!(r["params"]["seed"], 3);
    assert!(r["improvement_percent"].as_f64().unwrap() >= 0.0);
    assert_eq!(fs::read_to_string(&tour).unwrap().lines().count(), 12);
    // the DP leaves the heavy item next to the depot for last
    let order = r["tour"].as_array().unwrap();
    assert_eq!(order[order.len() - 1], 1);

    let seeded = Command::new(env!("CARGO_BIN_EXE_wtsp"))
        .args(["compare", &f])
        .env("WTSP_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(json(&seeded)["params"]["seed"], 9);

    assert_eq!(wtsp(&["compare", &f, "--packing", "file"]).status.code(), Some(2));
    let heavy = save(&dir, "heavy.txt", "1\n2\n3\n4\n5\n6\n7\n8\n9\n10\n11\n");
    let mut small = ttp("small", vec![(0.0, 0.0), (1.0, 1.0)], vec![(1.0, 5.0, 1)], 1.0);
    small.items.truncate(1);
    let g = write_ttp_file(&dir, "small.ttp", &small);
    assert_eq!(wtsp(&["compare", &g, "--packing", "file", "--plan", &heavy]).status.code(), Some(2));
}

#[test]
fn crafted_layout_beats_two_opt() {
    let dir = TempDir::new().unwrap();
    let t = two_sided_ttp(40, 20.0);
    let f = write_ttp_file(&dir, "two-sided.ttp", &t);
    let plan = save(&dir, "all.json", &format!("{{\"items\": {:?}}}", (1..=t.items.len()).collect::<Vec<_>>()));
    let r = json(&wtsp(&["compare", &f, "--packing", "file", "--plan", &plan, "--seed", "7"]));
    assert!(r["improvement_percent"].as_f64().unwrap() > 0.0);
}

#[test]
fn help_mentions_every_subcommand() {
    let out = wtsp(&["--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for cmd in ["solve", "bench", "compare", "reduce"] {
        assert!(text.contains(cmd));
    }
    assert!(Path::new(env!("CARGO_BIN_EXE_wtsp")).exists());
}
