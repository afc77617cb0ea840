use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use wtsp::cluster::{build_clustered_instance, expand_tour, ClusterItem};
use wtsp::hardness::reduce_partition;
use wtsp::io::{extended_f64, instance_from_json, instance_to_json, write_tour};
use wtsp::linear::solve_linear;
use wtsp::oracle::brute_force_wtsp;
use wtsp::path_dp::{solve_fixed_start, solve_free_start, zigzag_violations};
use wtsp::star::{solve_star, KnapsackMode};
use wtsp::synth::{clustered_benchmark_instance, loglog_slope};
use wtsp::ttp::{compare_on_path, greedy_plan_on_path, parse_ttp, PackingPlan, DEFAULT_TWO_OPT_BUDGET};
use wtsp::{tour_cost, Tour, WTspInstance, WtspError};

#[derive(Parser)]
#[command(name = "wtsp", version, about = "Weighted traveling salesman solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance given in the JSON instance format
    Solve(SolveArgs),
    /// Time the full and the clustered path DP on synthetic instances
    Bench(BenchArgs),
    /// Compare the path DP with a 2-opt baseline on TTP files under a fixed packing
    Compare(CompareArgs),
    /// Emit the star instance built from a Partition input
    Reduce(ReduceArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Solver {
    PathDp,
    PathDpFree,
    Star,
    Linear,
    Brute,
}

#[derive(Clone, Copy, ValueEnum)]
enum Knapsack {
    Exact,
    Fptas,
}

#[derive(Clone, Copy, ValueEnum)]
enum Packing {
    Greedy,
    File,
}

#[derive(clap::Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum)]
    solver: Solver,
    /// Start node (0-based); defaults to the instance's start
    #[arg(long)]
    start: Option<usize>,
    /// Slack for the linear solver (default 1/n) or the FPTAS (default 0.25)
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_enum, default_value_t = Knapsack::Exact)]
    knapsack: Knapsack,
    /// Write the tour here, one 0-based node per line
    #[arg(long)]
    tour_out: Option<PathBuf>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    report_out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [101, 501, 1001, 1501, 2001])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 5)]
    items_per_node: usize,
    #[arg(long, env = "WTSP_SEED", default_value_t = 42)]
    seed: u64,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    csv_out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CompareArgs {
    #[arg(required = true)]
    ttp: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Packing::Greedy)]
    packing: Packing,
    /// Packing plan file (1-based item ids, text or JSON); needs `--packing file`
    #[arg(long)]
    plan: Option<PathBuf>,
    #[arg(long, env = "WTSP_SEED", default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TWO_OPT_BUDGET)]
    budget: usize,
    /// Write the DP tour of a single instance here
    #[arg(long)]
    tour_out: Option<PathBuf>,
    /// Per-instance improvements as CSV
    #[arg(long)]
    csv_out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ReduceArgs {
    #[arg(required = true)]
    values: Vec<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize, Default)]
struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    knapsack: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    budget: Option<usize>,
}

#[derive(Serialize)]
struct RunReport {
    instance: Option<String>,
    solver: &'static str,
    #[serde(with = "extended_f64")]
    cost: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    baseline_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    improvement_percent: Option<f64>,
    wall_time_ms: f64,
    tour: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scaled_duration: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    duration_bound: Option<f64>,
    params: Params,
}

/// Exit 2: usage or solver/instance mismatch. Exit 3: unreadable input.
/// Exit 4: a result violated an invariant the solver guarantees.
enum Failure {
    Usage(anyhow::Error),
    Input(anyhow::Error),
    Invariant(anyhow::Error),
}

impl From<WtspError> for Failure {
    fn from(e: WtspError) -> Self {
        match e {
            WtspError::IncompatibleMetric { .. }
            | WtspError::TooLarge { .. }
            | WtspError::InvalidParameter(_)
            | WtspError::InvalidCostFunction(_) => Failure::Usage(e.into()),
            WtspError::InvalidInstance(_) | WtspError::InvalidTour(_) | WtspError::Parse { .. } => {
                Failure::Input(e.into())
            }
            WtspError::InconsistentMapping(_) => Failure::Invariant(e.into()),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Input)
}

fn write(path: &Path, contents: &str) -> Outcome<()> {
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Input)
}

fn emit(out: Option<&Path>, contents: &str) -> Outcome<()> {
    match out {
        Some(p) => write(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn load_instance(path: &Path) -> Outcome<WTspInstance> {
    let text = read(path)?;
    instance_from_json(&text)
        .map_err(|e| Failure::Input(anyhow!(e).context(format!("parsing {}", path.display()))))
}

fn solve(args: SolveArgs) -> Outcome<()> {
    let mut inst = load_instance(&args.instance)?;
    if let Some(s) = args.start {
        inst = inst.with_start(s)?;
    }
    let mut params = Params::default();
    let (mut scaled_duration, mut duration_bound) = (None, None);
    let timer = Instant::now();
    let (solver, tour, cost) = match args.solver {
        Solver::PathDp => {
            let (t, c) = solve_fixed_start(&inst, inst.start)?;
            ("path-dp", t, c)
        }
        Solver::PathDpFree => {
            let (t, c, _) = solve_free_start(&inst)?;
            ("path-dp-free", t, c)
        }
        Solver::Star => {
            let mode = match args.knapsack {
                Knapsack::Exact => KnapsackMode::Exact,
                Knapsack::Fptas => KnapsackMode::Fptas {
                    epsilon: args.epsilon.unwrap_or(0.25),
                },
            };
            if let KnapsackMode::Fptas { epsilon } = mode {
                params.epsilon = Some(epsilon);
            }
            params.knapsack = Some(match args.knapsack {
                Knapsack::Exact => "exact",
                Knapsack::Fptas => "fptas",
            });
            let (t, c) = solve_star(&inst, mode)?;
            ("star", t, c)
        }
        Solver::Linear => {
            let sol = solve_linear(&inst, args.epsilon)?;
            params.epsilon = Some(sol.epsilon);
            scaled_duration = Some(sol.scaled_duration);
            duration_bound = Some(sol.bound);
            ("linear", sol.tour, sol.cost)
        }
        Solver::Brute => {
            let (t, c) = brute_force_wtsp(&inst, false)?;
            ("brute", t, c)
        }
    };
    let wall_time_ms = timer.elapsed().as_secs_f64() * 1e3;

    let evaluated = tour_cost(&inst, &tour)?;
    if !same_cost(evaluated, cost) {
        return Err(Failure::Invariant(anyhow!(
            "solver reported cost {cost} but the tour evaluates to {evaluated}"
        )));
    }
    if matches!(args.solver, Solver::PathDp | Solver::PathDpFree) {
        let bad = zigzag_violations(&inst.with_start(tour.start())?, &tour)?;
        if !bad.is_empty() {
            return Err(Failure::Invariant(anyhow!("DP tour leaves the zigzag shape at steps {bad:?}")));
        }
    }
    if let Some(p) = &args.tour_out {
        write(p, &write_tour(&tour))?;
    }
    let report = RunReport {
        instance: inst.name.clone(),
        solver,
        cost,
        baseline_cost: None,
        improvement_percent: None,
        wall_time_ms,
        tour: tour.into_order(),
        scaled_duration,
        duration_bound,
        params,
    };
    emit(args.report_out.as_deref(), &to_json(&report))
}

fn same_cost(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn clustered(inst: &WTspInstance, items: &[ClusterItem], seed: u64) -> Outcome<(Tour, usize)> {
    let (reduced, mapping) = build_clustered_instance(inst, items, None, seed)?;
    let (rt, _) = solve_fixed_start(&reduced, 0)?;
    Ok((expand_tour(&rt, &mapping, inst)?, reduced.n()))
}

fn bench(args: BenchArgs) -> Outcome<()> {
    if args.sizes.is_empty() || args.reps == 0 {
        return Err(Failure::Usage(anyhow!("need at least one size and one repetition")));
    }
    let mut csv = String::from("pipeline,n,reduced_n,reps,mean_time_ms,min_time_ms,cost,cost_increase_percent\n");
    let mut full_times = Vec::new();
    let mut clustered_times = Vec::new();
    for &n in &args.sizes {
        if n < 2 {
            return Err(Failure::Usage(anyhow!("sizes must be at least 2, got {n}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed ^ n as u64);
        let (inst, items) = clustered_benchmark_instance(&mut rng, n, args.items_per_node);
        let mut full = Vec::new();
        let mut exact = 0.0;
        for _ in 0..args.reps {
            let t = Instant::now();
            exact = solve_fixed_start(&inst, inst.start)?.1;
            full.push(t.elapsed().as_secs_f64() * 1e3);
        }
        let mut fast = Vec::new();
        let mut cost = 0.0;
        let mut reduced_n = 0;
        for _ in 0..args.reps {
            let t = Instant::now();
            let (tour, r) = clustered(&inst, &items, args.seed)?;
            cost = tour_cost(&inst, &tour)?;
            reduced_n = r;
            fast.push(t.elapsed().as_secs_f64() * 1e3);
        }
        if cost < exact - 1e-9 * exact {
            return Err(Failure::Invariant(anyhow!(
                "clustered tour ({cost}) beats the exact DP ({exact}) at n = {n}"
            )));
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
        csv += &format!("full_dp,{n},{n},{},{},{},{exact},0\n", args.reps, mean(&full), min(&full));
        let increase = if exact > 0.0 { (cost - exact) / exact * 100.0 } else { 0.0 };
        csv += &format!(
            "clustered_dp,{n},{reduced_n},{},{},{},{cost},{increase}\n",
            args.reps,
            mean(&fast),
            min(&fast)
        );
        full_times.push((n as f64, mean(&full)));
        clustered_times.push((n as f64, mean(&fast)));
    }
    emit(args.csv_out.as_deref(), &csv)?;
    if full_times.len() >= 2 {
        eprintln!("log-log slope full_dp {:.3}", loglog_slope(&full_times));
        eprintln!("log-log slope clustered_dp {:.3}", loglog_slope(&clustered_times));
    }
    Ok(())
}

fn load_plan(path: &Path) -> Outcome<PackingPlan> {
    let text = read(path)?;
    let plan = if text.trim_start().starts_with('{') {
        PackingPlan::from_json(&text)
    } else {
        PackingPlan::from_text(&text)
    };
    plan.map_err(|e| Failure::Input(anyhow!(e).context(format!("parsing {}", path.display()))))
}

fn compare(args: CompareArgs) -> Outcome<()> {
    let file_plan = match (args.packing, &args.plan) {
        (Packing::File, Some(p)) => Some(load_plan(p)?),
        (Packing::File, None) => return Err(Failure::Usage(anyhow!("--packing file needs --plan"))),
        (Packing::Greedy, Some(_)) => return Err(Failure::Usage(anyhow!("--plan needs --packing file"))),
        (Packing::Greedy, None) => None,
    };
    if args.tour_out.is_some() && args.ttp.len() != 1 {
        return Err(Failure::Usage(anyhow!("--tour-out needs exactly one TTP file")));
    }
    let mut reports = Vec::new();
    let mut csv = String::from("instance,baseline_cost,dp_cost,improvement_percent\n");
    for path in &args.ttp {
        let ttp = parse_ttp(&read(path)?)
            .map_err(|e| Failure::Input(anyhow!(e).context(format!("parsing {}", path.display()))))?;
        let plan = match &file_plan {
            Some(p) => p.clone(),
            None => greedy_plan_on_path(&ttp)?,
        };
        let timer = Instant::now();
        let c = compare_on_path(&ttp, &plan, args.seed, args.budget)?;
        let wall_time_ms = timer.elapsed().as_secs_f64() * 1e3;
        let improvement = c.improvement_percent();
        if c.dp_cost > c.baseline_cost * (1.0 + 1e-9) {
            return Err(Failure::Invariant(anyhow!(
                "{}: DP cost {} exceeds baseline {}",
                ttp.name,
                c.dp_cost,
                c.baseline_cost
            )));
        }
        csv += &format!("{},{},{},{improvement}\n", ttp.name, c.baseline_cost, c.dp_cost);
        if let Some(p) = &args.tour_out {
            write(p, &write_tour(&c.dp))?;
        }
        reports.push(RunReport {
            instance: Some(ttp.name.clone()),
            solver: "path-dp",
            cost: c.dp_cost,
            baseline_cost: Some(c.baseline_cost),
            improvement_percent: Some(improvement),
            wall_time_ms,
            tour: c.dp.into_order(),
            scaled_duration: None,
            duration_bound: None,
            params: Params {
                seed: Some(args.seed),
                budget: Some(args.budget),
                ..Params::default()
            },
        });
    }
    if let Some(p) = &args.csv_out {
        write(p, &csv)?;
    }
    if reports.len() == 1 {
        emit(None, &to_json(&reports[0]))
    } else {
        emit(None, &to_json(&reports))
    }
}

fn reduce(args: ReduceArgs) -> Outcome<()> {
    let r = reduce_partition(&args.values)?;
    emit(args.out.as_deref(), &(instance_to_json(&r.instance) + "\n"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Bench(a) => bench(a),
        Command::Compare(a) => compare(a),
        Command::Reduce(a) => reduce(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, e) = match f {
                Failure::Usage(e) => (2, e),
                Failure::Input(e) => (3, e),
                Failure::Invariant(e) => (4, e),
            };
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
