//! Constant-factor approximation for star metrics.
//!
//! Tours start at the center; each leaf is a round trip out and back. Leaves
//! are grouped by doubling distance budgets: for every `i`, `J_i` is a
//! maximum-weight set of leaves whose round trips fit in `2^i`. Leaves are
//! then emitted from the largest budget down, each leaf in the batch of the
//! smallest `J_i` containing it, so heavy leaves reachable cheaply are
//! collected last.

use rayon::prelude::*;

use crate::cost::{edge_cost, CostFunction};
use crate::error::{Result, WtspError};
use crate::instance::{Metric, Tour, WTspInstance};
use crate::oracle::{knapsack_exact, knapsack_fptas, KnapsackItem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leaf {
    /// node index in the originating instance
    pub node: usize,
    pub distance: f64,
    pub weight: f64,
}

/// Star with the tour anchored at the center; the center's weight is
/// collected when the tour closes.
#[derive(Debug, Clone, PartialEq)]
pub struct StarInstance {
    pub center_node: usize,
    pub center_weight: f64,
    pub leaves: Vec<Leaf>,
    pub cost: CostFunction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KnapsackMode {
    Exact,
    Fptas { epsilon: f64 },
}

impl StarInstance {
    /// Builds a star from `(distance, weight)` pairs; leaf `k` becomes node `k + 1`.
    pub fn new(center_weight: f64, leaves: &[(f64, f64)], cost: CostFunction) -> Result<Self> {
        let star = StarInstance {
            center_node: 0,
            center_weight,
            leaves: leaves
                .iter()
                .enumerate()
                .map(|(k, &(distance, weight))| Leaf {
                    node: k + 1,
                    distance,
                    weight,
                })
                .collect(),
            cost,
        };
        star.to_instance()?;
        Ok(star)
    }

    /// Center-start view of a star-metric instance whose start is the center.
    pub fn from_instance(inst: &WTspInstance) -> Result<Self> {
        let Metric::Star {
            center,
            leaf_distances,
        } = &inst.metric
        else {
            return Err(WtspError::IncompatibleMetric {
                expected: "star",
                found: inst.metric.kind(),
            });
        };
        if inst.start != *center {
            return Err(WtspError::InvalidParameter(
                "center-start view needs the tour to start at the center".into(),
            ));
        }
        Ok(StarInstance {
            center_node: *center,
            center_weight: inst.weights[*center],
            leaves: (0..inst.n())
                .filter(|v| v != center)
                .map(|v| Leaf {
                    node: v,
                    distance: leaf_distances[v],
                    weight: inst.weights[v],
                })
                .collect(),
            cost: inst.cost.clone(),
        })
    }

    /// Instance with the center as node 0 and leaf `k` as node `k + 1`.
    pub fn to_instance(&self) -> Result<WTspInstance> {
        let mut dists = vec![0.0];
        let mut weights = vec![self.center_weight];
        for l in &self.leaves {
            dists.push(l.distance);
            weights.push(l.weight);
        }
        WTspInstance::new(Metric::star(0, dists), weights, 0, self.cost.clone())
    }

    pub fn total_leaf_weight(&self) -> f64 {
        self.leaves.iter().map(|l| l.weight).sum()
    }

    /// Full tour (center first) in the node numbering of [`Self::to_instance`].
    pub fn expanded_order(&self, leaf_order: &[usize]) -> Vec<usize> {
        std::iter::once(0).chain(leaf_order.iter().map(|&k| k + 1)).collect()
    }
}

/// Divides all distances by the smallest one. Returns the scaled star and the
/// factor; costs of the scaled star times the factor are original costs.
pub fn scale_instance(star: &StarInstance) -> Result<(StarInstance, f64)> {
    let Some(min) = star.leaves.iter().map(|l| l.distance).reduce(f64::min) else {
        return Ok((star.clone(), 1.0));
    };
    if min <= 0.0 {
        return Err(WtspError::InvalidInstance(
            "cannot scale a star with a zero-distance leaf".into(),
        ));
    }
    let mut scaled = star.clone();
    for l in &mut scaled.leaves {
        l.distance /= min;
    }
    Ok((scaled, min))
}

fn select(items: &[KnapsackItem], budget: f64, mode: KnapsackMode) -> Result<Vec<usize>> {
    match mode {
        KnapsackMode::Exact => knapsack_exact(items, budget),
        KnapsackMode::Fptas { epsilon } => knapsack_fptas(items, budget, epsilon),
    }
}

/// Leaf visiting order (indices into `star.leaves`) built from the doubling
/// knapsack sets. Zero-distance leaves cost nothing to visit and go last.
pub fn build_tour(star: &StarInstance, mode: KnapsackMode) -> Result<Vec<usize>> {
    let (positive, zero): (Vec<usize>, Vec<usize>) =
        (0..star.leaves.len()).partition(|&k| star.leaves[k].distance > 0.0);
    if positive.is_empty() {
        return Ok(zero);
    }
    let min = positive
        .iter()
        .map(|&k| star.leaves[k].distance)
        .fold(f64::INFINITY, f64::min);
    let items: Vec<KnapsackItem> = positive
        .iter()
        .map(|&k| KnapsackItem::new(k, 2.0 * star.leaves[k].distance / min, star.leaves[k].weight))
        .collect();
    let round_trip: f64 = items.iter().map(|it| it.size).sum();
    let mut levels = 1u32;
    while 2f64.powi(levels as i32) < round_trip {
        levels += 1;
    }
    // sets[i - 1] is J_i; the last one is every leaf
    let mut sets: Vec<Vec<usize>> = (1..levels)
        .into_par_iter()
        .map(|i| select(&items, 2f64.powi(i as i32), mode))
        .collect::<Result<_>>()?;
    sets.push(positive.clone());

    // each leaf goes into the batch of the first set containing it
    let mut first = vec![usize::MAX; star.leaves.len()];
    for (i, set) in sets.iter().enumerate() {
        for &k in set {
            if first[k] == usize::MAX {
                first[k] = i;
            }
        }
    }
    let mut order = Vec::with_capacity(star.leaves.len());
    for i in (0..sets.len()).rev() {
        order.extend(positive.iter().copied().filter(|&k| first[k] == i));
    }
    order.extend(zero);
    Ok(order)
}

/// `w -> D(w)`, total round-trip length of leaves whose return leg carries at
/// least `w`. Stored as `(upto, length)`: for `w` in `(previous upto, upto]`
/// the value is `length`, and 0 past the last threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTripProfile {
    pub steps: Vec<(f64, f64)>,
}

impl RoundTripProfile {
    pub fn eval(&self, w: f64) -> f64 {
        let idx = self.steps.partition_point(|&(upto, _)| upto < w);
        self.steps.get(idx).map_or(0.0, |&(_, len)| len)
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.steps.iter().map(|&(upto, _)| upto)
    }
}

pub fn round_trip_profile(star: &StarInstance, order: &[usize]) -> RoundTripProfile {
    let mut carried = 0.0;
    let trips: Vec<(f64, f64)> = order
        .iter()
        .map(|&k| {
            let l = &star.leaves[k];
            carried += l.weight;
            (carried, 2.0 * l.distance)
        })
        .collect();
    // suffix sums: trips from index k on all carry at least trips[k].0
    let mut steps: Vec<(f64, f64)> = Vec::new();
    let mut suffix = 0.0;
    for &(w, len) in trips.iter().rev() {
        suffix += len;
        match steps.last_mut() {
            Some(last) if last.0 == w => last.1 = suffix,
            _ => steps.push((w, suffix)),
        }
    }
    steps.reverse();
    RoundTripProfile { steps }
}

/// Tour cost of a leaf order, charging each leaf's outbound and return legs
/// separately.
pub fn star_tour_cost(star: &StarInstance, order: &[usize]) -> f64 {
    let mut carried = 0.0;
    let mut total = 0.0;
    for &k in order {
        let l = &star.leaves[k];
        total += edge_cost(star.cost.eval(carried), l.distance);
        carried += l.weight;
        total += edge_cost(star.cost.eval(carried), l.distance);
    }
    total
}

/// Runs the approximation on a star-metric instance with any start node.
///
/// From the center the leaf order is used directly. From a leaf `s`, the
/// walk `s -> center` at empty load and `center -> s` at full load (less
/// `s`'s weight) are fixed costs; the remaining leaves are ordered as a
/// center-start star and the center is collected last.
pub fn solve_star(inst: &WTspInstance, mode: KnapsackMode) -> Result<(Tour, f64)> {
    let Metric::Star {
        center,
        leaf_distances,
    } = &inst.metric
    else {
        return Err(WtspError::IncompatibleMetric {
            expected: "star",
            found: inst.metric.kind(),
        });
    };
    let center = *center;
    let start = inst.start;
    let star = StarInstance {
        center_node: center,
        center_weight: inst.weights[center],
        leaves: (0..inst.n())
            .filter(|&v| v != center && v != start)
            .map(|v| Leaf {
                node: v,
                distance: leaf_distances[v],
                weight: inst.weights[v],
            })
            .collect(),
        cost: inst.cost.clone(),
    };
    let leaf_order = build_tour(&star, mode)?;
    let mut cost = star_tour_cost(&star, &leaf_order);
    let mut order = vec![start];
    order.extend(leaf_order.iter().map(|&k| star.leaves[k].node));
    if start != center {
        let d = leaf_distances[start];
        let full = inst.total_weight() - inst.weights[start];
        cost += edge_cost(inst.cost.eval(0.0), d) + edge_cost(inst.cost.eval(full), d);
        order.push(center);
    }
    Ok((Tour::new(order)?, cost))
}
