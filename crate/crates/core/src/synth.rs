//! Seeded random instances for tests, benchmarks and the CLI.

use rand::Rng;

use crate::cluster::ClusterItem;
use crate::cost::CostFunction;
use crate::instance::{Metric, WTspInstance};
use crate::ttp::{TtpInstance, TtpItem};

/// Nondecreasing step function with up to `max_thresholds` integer
/// thresholds in `[1, max_weight]` and integer rates in `[0, 10]`.
pub fn random_step<R: Rng>(rng: &mut R, max_thresholds: usize, max_weight: u32) -> CostFunction {
    let count = rng.random_range(0..=max_thresholds);
    let mut thresholds: Vec<u32> = (0..count).map(|_| rng.random_range(1..=max_weight.max(1))).collect();
    thresholds.sort_unstable();
    thresholds.dedup();
    let mut rates: Vec<u32> = (0..=thresholds.len()).map(|_| rng.random_range(0..=10)).collect();
    rates.sort_unstable();
    let tail = rates.pop().unwrap() as f64;
    CostFunction::step(
        thresholds.iter().zip(&rates).map(|(&t, &r)| (t as f64, r as f64)),
        tail,
    )
    .expect("sorted rates form a valid step function")
}

/// Path with integer gaps and weights in `[0, max_value]`, nodes placed in
/// a random order along the line, and a random start.
pub fn random_path_instance<R: Rng>(rng: &mut R, n: usize, max_value: u32, max_thresholds: usize) -> WTspInstance {
    let gaps: Vec<f64> = (1..n).map(|_| rng.random_range(0..=max_value) as f64).collect();
    let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0..=max_value) as f64).collect();
    let mut order: Vec<usize> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(&mut order[..], rng);
    let total = weights.iter().sum::<f64>() as u32;
    let cost = random_step(rng, max_thresholds, total.max(1));
    let start = rng.random_range(0..n);
    WTspInstance::new(Metric::path(order, gaps).expect("valid path"), weights, start, cost).expect("valid instance")
}

/// Star with `leaves` leaves at integer distances in `[1, 20]`, weights in
/// `[0, 10]` and a step cost with rates at least 1, started at the center.
pub fn random_star_instance<R: Rng>(rng: &mut R, leaves: usize) -> WTspInstance {
    let mut dist = vec![0.0];
    let mut weights = vec![rng.random_range(0..=10) as f64];
    for _ in 0..leaves {
        dist.push(rng.random_range(1..=20) as f64);
        weights.push(rng.random_range(0..=10) as f64);
    }
    let total = weights.iter().sum::<f64>() as u32;
    let CostFunction::Step { steps, tail } = random_step(rng, 4, total.max(1)) else {
        unreachable!()
    };
    let cost = CostFunction::step(steps.iter().map(|s| (s.upto, s.rate + 1.0)), tail + 1.0).expect("shifted rates stay valid");
    WTspInstance::new(Metric::star(0, dist), weights, 0, cost).expect("valid instance")
}

/// Euclidean points in `[0, 100)^2` with weights in `[1, 20]` and linear
/// slowdown from 1 to `v_min` at full load.
pub fn random_euclidean_instance<R: Rng>(rng: &mut R, n: usize, v_min: f64) -> WTspInstance {
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)))
        .collect();
    let d = pts
        .iter()
        .map(|a| pts.iter().map(|b| (a.0 - b.0).hypot(a.1 - b.1)).collect())
        .collect();
    let weights: Vec<f64> = (0..n).map(|_| rng.random_range(1..=20) as f64).collect();
    let total = weights.iter().sum();
    let cost = CostFunction::linear_speed(1.0, v_min, total).expect("valid speeds");
    WTspInstance::new(Metric::general(d), weights, 0, cost).expect("valid instance")
}

/// Large-scale benchmark recipe: node 0 is the depot, every node sits at a
/// uniform x in `[0, 1000]`, each other node holds `items_per_node` items
/// with integer weights and profits in `[1, 100]`, speed drops linearly from
/// 1 to 0.1 at full load.
pub fn clustered_benchmark_instance<R: Rng>(rng: &mut R, n: usize, items_per_node: usize) -> (WTspInstance, Vec<ClusterItem>) {
    let xs: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1000.0)).collect();
    let mut items = Vec::with_capacity(n * items_per_node);
    let mut weights = vec![0.0; n];
    for v in 1..n {
        for _ in 0..items_per_node {
            let weight = rng.random_range(1..=100) as f64;
            weights[v] += weight;
            items.push(ClusterItem {
                node: v,
                weight,
                profit: rng.random_range(1..=100) as f64,
            });
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(a.cmp(&b)));
    let gaps = order.windows(2).map(|p| xs[p[1]] - xs[p[0]]).collect();
    let total: f64 = weights.iter().sum();
    let cost = CostFunction::linear_speed(1.0, 0.1, total.max(1.0)).expect("valid speeds");
    let inst = WTspInstance::new(Metric::path(order, gaps).expect("valid path"), weights, 0, cost)
        .expect("valid instance")
        .with_name(format!("synthetic-{n}"));
    (inst, items)
}

/// Benchmark-style TTP file: `n` cities with coordinates in `[0, 100)^2`,
/// up to `max_items_per_city` items on every city but the depot, capacity a
/// third of the total item weight.
pub fn random_ttp<R: Rng>(rng: &mut R, name: &str, n: usize, max_items_per_city: usize) -> TtpInstance {
    let cities: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)))
        .collect();
    let mut items = Vec::new();
    for city in 1..n {
        for _ in 0..rng.random_range(1..=max_items_per_city.max(1)) {
            items.push(TtpItem {
                profit: rng.random_range(1..=1000) as f64,
                weight: rng.random_range(1..=100) as f64,
                city,
            });
        }
    }
    let capacity = (items.iter().map(|it| it.weight).sum::<f64>() / 3.0).floor();
    TtpInstance {
        name: name.to_string(),
        knapsack_data_type: Some("uncorrelated".into()),
        cities,
        items,
        capacity,
        min_speed: 0.1,
        max_speed: 1.0,
        renting_ratio: (rng.random_range(1..=1000) as f64) / 100.0,
        edge_weight_type: "CEIL_2D".into(),
    }
}

/// Adversarial layout on a line: the depot at 50, two heavy items just left
/// of it, and `light` unit-weight items alternating right and left at
/// growing distance. The capacity fits every item.
pub fn two_sided_ttp(light: usize, heavy_weight: f64) -> TtpInstance {
    let mut cities = vec![(50.0, 0.0), (48.0, 0.0), (47.0, 0.0)];
    let mut items = vec![
        TtpItem { profit: 100.0, weight: heavy_weight, city: 1 },
        TtpItem { profit: 100.0, weight: heavy_weight, city: 2 },
    ];
    for k in 0..light {
        let x = if k % 2 == 0 { 52.0 + k as f64 } else { 46.0 - k as f64 };
        cities.push((x, 0.0));
        items.push(TtpItem { profit: 5.0, weight: 1.0, city: k + 3 });
    }
    let capacity = items.iter().map(|it| it.weight).sum();
    TtpInstance {
        name: format!("two-sided-{light}"),
        knapsack_data_type: None,
        cities,
        items,
        capacity,
        min_speed: 0.1,
        max_speed: 1.0,
        renting_ratio: 1.0,
        edge_weight_type: "CEIL_2D".into(),
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(samples: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn slope_of_a_power_law() {
        let s: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(1.7))).collect();
        assert!((loglog_slope(&s) - 1.7).abs() < 1e-12);
    }

    #[test]
    fn generators_are_deterministic_and_valid() {
        let a = random_path_instance(&mut ChaCha8Rng::seed_from_u64(5), 7, 10, 4);
        let b = random_path_instance(&mut ChaCha8Rng::seed_from_u64(5), 7, 10, 4);
        assert_eq!(a, b);
        a.cost.validate().unwrap();

        let (inst, items) = clustered_benchmark_instance(&mut ChaCha8Rng::seed_from_u64(1), 101, 5);
        assert_eq!(items.len(), 500);
        assert_eq!(inst.weights[0], 0.0);
        let w: f64 = items.iter().map(|i| i.weight).sum();
        assert_eq!(inst.total_weight(), w);

        let t = random_ttp(&mut ChaCha8Rng::seed_from_u64(2), "t", 12, 3);
        t.check().unwrap();
        assert!(t.items.iter().all(|it| it.city != 0));
    }
}
