//! Traveling thief benchmark files, path projection, fixed packing plans and
//! the 2-opt baseline.
//!
//! Cities and items are 0-based in memory and 1-based in files. City 0 is the
//! depot: tours start there and it holds no items.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cost::CostFunction;
use crate::error::{Result, WtspError};
use crate::instance::{tour_cost_unchecked, Metric, Tour, WTspInstance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TtpItem {
    pub profit: f64,
    pub weight: f64,
    pub city: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TtpInstance {
    pub name: String,
    pub knapsack_data_type: Option<String>,
    pub cities: Vec<(f64, f64)>,
    pub items: Vec<TtpItem>,
    pub capacity: f64,
    pub min_speed: f64,
    pub max_speed: f64,
    pub renting_ratio: f64,
    pub edge_weight_type: String,
}

impl TtpInstance {
    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(WtspError::InvalidInstance(m));
        if self.cities.is_empty() {
            return bad("no cities".into());
        }
        for (k, it) in self.items.iter().enumerate() {
            if it.city >= self.cities.len() {
                return bad(format!("item {} at unknown city {}", k + 1, it.city + 1));
            }
            if it.city == 0 {
                return bad(format!("item {} sits at the depot", k + 1));
            }
            if !(it.weight >= 0.0 && it.profit >= 0.0) {
                return bad(format!("item {} has negative profit or weight", k + 1));
            }
        }
        if !(self.capacity >= 0.0) {
            return bad("negative capacity".into());
        }
        if !(self.max_speed > 0.0 && self.min_speed >= 0.0 && self.min_speed <= self.max_speed) {
            return bad(format!(
                "speeds must satisfy 0 <= min <= max, max > 0 (got {} and {})",
                self.min_speed, self.max_speed
            ));
        }
        Ok(())
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> WtspError {
    WtspError::Parse {
        line,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(line: usize, what: &str, s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| parse_err(line, format!("{what}: cannot parse {:?}", s.trim())))
}

#[derive(PartialEq)]
enum Section {
    Header,
    Nodes,
    Items,
}

pub fn parse_ttp(text: &str) -> Result<TtpInstance> {
    let mut name = None;
    let mut data_type = None;
    let mut dimension: Option<usize> = None;
    let mut item_count: Option<usize> = None;
    let mut capacity = None;
    let mut min_speed = None;
    let mut max_speed = None;
    let mut renting = None;
    let mut edge_type = None;
    let mut cities = Vec::new();
    let mut items = Vec::new();
    let mut section = Section::Header;
    let mut last_line = 0;

    for (k, raw) in text.lines().enumerate() {
        let ln = k + 1;
        last_line = ln;
        let line = raw.trim();
        if line.is_empty() || line == "EOF" {
            continue;
        }
        if line.starts_with("NODE_COORD_SECTION") {
            section = Section::Nodes;
            continue;
        }
        if line.starts_with("ITEMS SECTION") {
            section = Section::Items;
            continue;
        }
        match section {
            Section::Header => {
                let (key, value) = line
                    .split_once(':')
                    .ok_or_else(|| parse_err(ln, format!("expected KEY: value, found {line:?}")))?;
                let value = value.trim();
                match key.trim() {
                    "PROBLEM NAME" => name = Some(value.to_string()),
                    "KNAPSACK DATA TYPE" => data_type = Some(value.to_string()),
                    "DIMENSION" => dimension = Some(number(ln, "DIMENSION", value)?),
                    "NUMBER OF ITEMS" => item_count = Some(number(ln, "NUMBER OF ITEMS", value)?),
                    "CAPACITY OF KNAPSACK" => capacity = Some(number(ln, "CAPACITY OF KNAPSACK", value)?),
                    "MIN SPEED" => min_speed = Some(number(ln, "MIN SPEED", value)?),
                    "MAX SPEED" => max_speed = Some(number(ln, "MAX SPEED", value)?),
                    "RENTING RATIO" => renting = Some(number(ln, "RENTING RATIO", value)?),
                    "EDGE_WEIGHT_TYPE" => edge_type = Some(value.to_string()),
                    other => return Err(parse_err(ln, format!("unknown header key {other:?}"))),
                }
            }
            Section::Nodes => {
                let f: Vec<&str> = line.split_whitespace().collect();
                if f.len() != 3 {
                    return Err(parse_err(ln, "node row needs index, x, y"));
                }
                let index: usize = number(ln, "node index", f[0])?;
                if index != cities.len() + 1 {
                    return Err(parse_err(ln, format!("node index {index}, expected {}", cities.len() + 1)));
                }
                if dimension.is_some_and(|d| index > d) {
                    return Err(parse_err(ln, format!("node {index} exceeds DIMENSION")));
                }
                cities.push((number(ln, "x", f[1])?, number(ln, "y", f[2])?));
            }
            Section::Items => {
                let f: Vec<&str> = line.split_whitespace().collect();
                if f.len() != 4 {
                    return Err(parse_err(ln, "item row needs index, profit, weight, city"));
                }
                let index: usize = number(ln, "item index", f[0])?;
                if index != items.len() + 1 {
                    return Err(parse_err(ln, format!("item index {index}, expected {}", items.len() + 1)));
                }
                let city: usize = number(ln, "item city", f[3])?;
                let n = dimension.unwrap_or(cities.len());
                if city == 0 || city > n {
                    return Err(parse_err(ln, format!("item city {city} out of range 1..={n}")));
                }
                if city == 1 {
                    return Err(parse_err(ln, "items cannot sit at the depot (city 1)"));
                }
                items.push(TtpItem {
                    profit: number(ln, "profit", f[1])?,
                    weight: number(ln, "weight", f[2])?,
                    city: city - 1,
                });
            }
        }
    }

    let end = last_line + 1;
    let missing = |key: &str| parse_err(end, format!("missing {key}"));
    let dimension = dimension.ok_or_else(|| missing("DIMENSION"))?;
    let item_count = item_count.ok_or_else(|| missing("NUMBER OF ITEMS"))?;
    if cities.len() != dimension {
        return Err(parse_err(end, format!("DIMENSION is {dimension} but {} node rows were given", cities.len())));
    }
    if items.len() != item_count {
        return Err(parse_err(end, format!("NUMBER OF ITEMS is {item_count} but {} item rows were given", items.len())));
    }
    let ttp = TtpInstance {
        name: name.ok_or_else(|| missing("PROBLEM NAME"))?,
        knapsack_data_type: data_type,
        cities,
        items,
        capacity: capacity.ok_or_else(|| missing("CAPACITY OF KNAPSACK"))?,
        min_speed: min_speed.ok_or_else(|| missing("MIN SPEED"))?,
        max_speed: max_speed.ok_or_else(|| missing("MAX SPEED"))?,
        renting_ratio: renting.ok_or_else(|| missing("RENTING RATIO"))?,
        edge_weight_type: edge_type.ok_or_else(|| missing("EDGE_WEIGHT_TYPE"))?,
    };
    ttp.check().map_err(|e| parse_err(end, e.to_string()))?;
    Ok(ttp)
}

pub fn write_ttp(ttp: &TtpInstance) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "PROBLEM NAME: \t{}", ttp.name);
    if let Some(t) = &ttp.knapsack_data_type {
        let _ = writeln!(s, "KNAPSACK DATA TYPE: {t}");
    }
    let _ = writeln!(s, "DIMENSION:\t{}", ttp.cities.len());
    let _ = writeln!(s, "NUMBER OF ITEMS: \t{}", ttp.items.len());
    let _ = writeln!(s, "CAPACITY OF KNAPSACK: \t{}", ttp.capacity);
    let _ = writeln!(s, "MIN SPEED: \t{}", ttp.min_speed);
    let _ = writeln!(s, "MAX SPEED: \t{}", ttp.max_speed);
    let _ = writeln!(s, "RENTING RATIO: \t{}", ttp.renting_ratio);
    let _ = writeln!(s, "EDGE_WEIGHT_TYPE:\t{}", ttp.edge_weight_type);
    let _ = writeln!(s, "NODE_COORD_SECTION\t(INDEX, X, Y): ");
    for (k, (x, y)) in ttp.cities.iter().enumerate() {
        let _ = writeln!(s, "{}\t{x}\t{y}", k + 1);
    }
    let _ = writeln!(s, "ITEMS SECTION\t(INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER): ");
    for (k, it) in ttp.items.iter().enumerate() {
        let _ = writeln!(s, "{}\t{}\t{}\t{}", k + 1, it.profit, it.weight, it.city + 1);
    }
    s
}

/// Drops the y coordinate: cities sorted by x, ties in index order, gaps are
/// exact x differences.
pub fn project_to_path(ttp: &TtpInstance) -> Result<Metric> {
    let mut order: Vec<usize> = (0..ttp.cities.len()).collect();
    order.sort_by(|&a, &b| ttp.cities[a].0.total_cmp(&ttp.cities[b].0));
    let gaps = order
        .windows(2)
        .map(|p| ttp.cities[p[1]].0 - ttp.cities[p[0]].0)
        .collect();
    Metric::path(order, gaps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    /// cities projected onto the x axis
    Path,
    /// rounded-up Euclidean distances, the benchmark convention
    Ceil2d,
    Euclidean,
}

pub fn metric_for(ttp: &TtpInstance, mode: DistanceMode) -> Result<Metric> {
    let euclid = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).hypot(a.1 - b.1);
    let matrix = |round: fn(f64) -> f64| {
        let c = &ttp.cities;
        Metric::general(
            c.iter()
                .map(|&a| c.iter().map(|&b| round(euclid(a, b))).collect())
                .collect(),
        )
    };
    match mode {
        DistanceMode::Path => project_to_path(ttp),
        DistanceMode::Ceil2d => Ok(matrix(f64::ceil)),
        DistanceMode::Euclidean => Ok(matrix(|d| d)),
    }
}

/// Selected item ids, sorted and distinct.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PackingPlan {
    items: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PlanDoc {
    /// 1-based, like the text format
    items: Vec<usize>,
}

impl PackingPlan {
    pub fn new(mut items: Vec<usize>) -> Self {
        items.sort_unstable();
        items.dedup();
        PackingPlan { items }
    }

    pub fn items(&self) -> &[usize] {
        &self.items
    }

    pub fn total_weight(&self, ttp: &TtpInstance) -> f64 {
        self.items.iter().map(|&k| ttp.items[k].weight).sum()
    }

    pub fn total_profit(&self, ttp: &TtpInstance) -> f64 {
        self.items.iter().map(|&k| ttp.items[k].profit).sum()
    }

    pub fn check(&self, ttp: &TtpInstance) -> Result<()> {
        if let Some(&k) = self.items.iter().find(|&&k| k >= ttp.items.len()) {
            return Err(WtspError::InvalidParameter(format!(
                "plan selects item {} but the instance has {}",
                k + 1,
                ttp.items.len()
            )));
        }
        let w = self.total_weight(ttp);
        if w > ttp.capacity {
            return Err(WtspError::InvalidParameter(format!(
                "plan weight {w} exceeds capacity {}",
                ttp.capacity
            )));
        }
        Ok(())
    }

    /// One 1-based item index per line.
    pub fn to_text(&self) -> String {
        self.items.iter().map(|k| format!("{}\n", k + 1)).collect()
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut items = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let id: usize = number(k + 1, "item index", line)?;
            if id == 0 {
                return Err(parse_err(k + 1, "item indices are 1-based"));
            }
            items.push(id - 1);
        }
        Ok(PackingPlan::new(items))
    }

    pub fn to_json(&self) -> String {
        let doc = PlanDoc {
            items: self.items.iter().map(|k| k + 1).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("plan serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PlanDoc = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
        if doc.items.contains(&0) {
            return Err(parse_err(0, "item indices are 1-based"));
        }
        Ok(PackingPlan::new(doc.items.iter().map(|k| k - 1).collect()))
    }
}

/// W-TSP instance induced by a packing plan: node weight is the selected
/// weight at that city; speed falls linearly from max to min as the load
/// reaches the plan's total weight. Starts at the depot.
pub fn fix_packing(ttp: &TtpInstance, plan: &PackingPlan, mode: DistanceMode) -> Result<WTspInstance> {
    ttp.check()?;
    plan.check(ttp)?;
    let mut weights = vec![0.0; ttp.cities.len()];
    for &k in plan.items() {
        weights[ttp.items[k].city] += ttp.items[k].weight;
    }
    let total = plan.total_weight(ttp);
    let cost = if total > 0.0 {
        CostFunction::linear_speed(ttp.max_speed, ttp.min_speed, total)?
    } else {
        CostFunction::constant(1.0 / ttp.max_speed)?
    };
    Ok(WTspInstance::new(metric_for(ttp, mode)?, weights, 0, cost)?.with_name(ttp.name.clone()))
}

/// Items ranked by profit per unit of weight-distance still to travel from
/// their city, added while they fit. Ties keep item order.
pub fn greedy_packing(ttp: &TtpInstance, tour: &Tour, mode: DistanceMode) -> Result<PackingPlan> {
    let metric = metric_for(ttp, mode)?;
    let order = tour.order();
    if order.len() != ttp.cities.len() {
        return Err(WtspError::InvalidTour(format!(
            "tour has {} nodes, instance has {}",
            order.len(),
            ttp.cities.len()
        )));
    }
    let n = order.len();
    let mut remaining = vec![0.0; n];
    let mut acc = metric.distance(order[n - 1], order[0]);
    for p in (1..n).rev() {
        remaining[order[p]] = acc;
        acc += metric.distance(order[p - 1], order[p]);
    }
    remaining[order[0]] = acc;

    let score = |it: &TtpItem| {
        let denom = it.weight * remaining[it.city];
        if denom > 0.0 {
            it.profit / denom
        } else {
            f64::INFINITY
        }
    };
    let mut ranked: Vec<usize> = (0..ttp.items.len()).collect();
    ranked.sort_by(|&a, &b| score(&ttp.items[b]).total_cmp(&score(&ttp.items[a])));
    let mut load = 0.0;
    let mut chosen = Vec::new();
    for k in ranked {
        let w = ttp.items[k].weight;
        if load + w <= ttp.capacity {
            load += w;
            chosen.push(k);
        }
    }
    Ok(PackingPlan::new(chosen))
}

/// Best-improvement 2-opt under the weighted tour cost, from a seeded random
/// tour that keeps the instance start first. `budget` caps the number of
/// applied moves.
pub fn two_opt_baseline(inst: &WTspInstance, seed: u64, budget: usize) -> Tour {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = std::iter::once(inst.start)
        .chain((0..inst.n()).filter(|&v| v != inst.start))
        .collect();
    order[1..].shuffle(&mut rng);
    let mut cost = tour_cost_unchecked(inst, &order);
    let n = order.len();
    let mut scratch = order.clone();
    for _ in 0..budget {
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 1..n {
            for j in i + 1..n {
                scratch.copy_from_slice(&order);
                scratch[i..=j].reverse();
                let c = tour_cost_unchecked(inst, &scratch);
                if c < best.map_or(cost, |b| b.0) {
                    best = Some((c, i, j));
                }
            }
        }
        match best {
            Some((c, i, j)) if c < cost - 1e-12 * cost.abs() => {
                order[i..=j].reverse();
                cost = c;
            }
            _ => break,
        }
    }
    Tour::new(order).expect("2-opt keeps a permutation")
}

/// Default cap on 2-opt moves; local optima on benchmark sizes come far sooner.
pub const DEFAULT_TWO_OPT_BUDGET: usize = 10_000;

/// Baseline and DP tours for one path instance under a shared packing plan.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub instance: WTspInstance,
    pub baseline: Tour,
    pub baseline_cost: f64,
    pub dp: Tour,
    pub dp_cost: f64,
}

impl Comparison {
    /// `(baseline - dp) / baseline` in percent; 0 when both are free.
    pub fn improvement_percent(&self) -> f64 {
        if self.baseline_cost > 0.0 {
            (self.baseline_cost - self.dp_cost) / self.baseline_cost * 100.0
        } else {
            0.0
        }
    }
}

/// Greedy plan built along the sweep tour of the projected cities.
pub fn greedy_plan_on_path(ttp: &TtpInstance) -> Result<PackingPlan> {
    let empty = fix_packing(ttp, &PackingPlan::default(), DistanceMode::Path)?;
    let sweep = crate::linear::metric_tsp_approx(&empty)?;
    greedy_packing(ttp, &sweep, DistanceMode::Path)
}

/// Projects to a path, fixes the plan, and runs both the 2-opt baseline and
/// the exact DP from the depot. Both costs come from the same evaluator.
pub fn compare_on_path(ttp: &TtpInstance, plan: &PackingPlan, seed: u64, budget: usize) -> Result<Comparison> {
    let instance = fix_packing(ttp, plan, DistanceMode::Path)?;
    let baseline = two_opt_baseline(&instance, seed, budget);
    let baseline_cost = crate::instance::tour_cost(&instance, &baseline)?;
    let (dp, _) = crate::path_dp::solve_fixed_start(&instance, instance.start)?;
    let dp_cost = crate::instance::tour_cost(&instance, &dp)?;
    Ok(Comparison {
        instance,
        baseline,
        baseline_cost,
        dp,
        dp_cost,
    })
}
