//! k-means aggregation of items for large path instances.
//!
//! Items are clustered by position; each cluster becomes one node of a
//! reduced path instance placed at the member node nearest the centroid. The
//! exact DP runs on the reduced instance and its tour is expanded back by
//! sweeping each cluster's nodes in the direction of travel.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WtspError};
use crate::instance::{Metric, Tour, WTspInstance};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_MAX_ITERS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans<const D: usize> {
    pub assignments: Vec<usize>,
    pub centroids: Vec<[f64; D]>,
    pub iterations: usize,
    pub converged: bool,
    /// sum of squared distances after each assignment step
    pub objective: Vec<f64>,
}

fn sq_dist<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid, ties to the lowest index.
fn nearest<const D: usize>(p: &[f64; D], centroids: &[[f64; D]]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (c, centroid) in centroids.iter().enumerate() {
        let d = sq_dist(p, centroid);
        if d < best_d {
            best = c;
            best_d = d;
        }
    }
    best
}

/// Same answer as [`nearest`] for one dimension, by binary search over
/// centroids sorted by `(value, index)`.
fn nearest_1d(x: f64, sorted: &[(f64, usize)]) -> usize {
    let p = sorted.partition_point(|&(v, _)| v < x);
    let right = sorted.get(p).copied();
    let left = p.checked_sub(1).map(|q| {
        let v = sorted[q].0;
        sorted[sorted.partition_point(|&(u, _)| u < v)]
    });
    match (left, right) {
        (Some(l), Some(r)) => {
            let (dl, dr) = ((x - l.0).powi(2), (r.0 - x).powi(2));
            if dl < dr || (dl == dr && l.1 < r.1) {
                l.1
            } else {
                r.1
            }
        }
        (Some(l), None) => l.1,
        (None, Some(r)) => r.1,
        (None, None) => unreachable!("at least one centroid"),
    }
}

/// Lloyd's iteration from `k` distinct points drawn with a seeded RNG. With
/// fewer than `k` distinct points every distinct point seeds one centroid.
/// Empty clusters keep their centroid.
pub fn kmeans<const D: usize>(points: &[[f64; D]], k: usize, seed: u64, max_iters: usize) -> Result<KMeans<D>> {
    if k == 0 {
        return Err(WtspError::InvalidParameter("k must be positive".into()));
    }
    if k > points.len() {
        return Err(WtspError::InvalidParameter(format!(
            "k = {k} exceeds the {} points",
            points.len()
        )));
    }
    // identical points always share a cluster, so iterate over distinct ones
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a]
            .iter()
            .zip(&points[b])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut distinct: Vec<[f64; D]> = Vec::new();
    let mut mult: Vec<f64> = Vec::new();
    let mut of_point = vec![0; points.len()];
    for &i in &idx {
        if distinct.last() != Some(&points[i]) {
            distinct.push(points[i]);
            mult.push(0.0);
        }
        *mult.last_mut().unwrap() += 1.0;
        of_point[i] = distinct.len() - 1;
    }

    let k = k.min(distinct.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids: Vec<[f64; D]> = sample(&mut rng, distinct.len(), k)
        .into_iter()
        .map(|i| distinct[i])
        .collect();

    let (assign, iterations, converged, objective) = if D == 1 {
        let xs: Vec<f64> = distinct.iter().map(|p| p[0]).collect();
        let mut cs: Vec<f64> = centroids.iter().map(|p| p[0]).collect();
        let out = lloyd_sorted_1d(&xs, &mult, &mut cs, max_iters);
        for (c, v) in centroids.iter_mut().zip(cs) {
            c[0] = v;
        }
        out
    } else {
        lloyd(&distinct, &mult, &mut centroids, max_iters)
    };
    Ok(KMeans {
        assignments: of_point.iter().map(|&i| assign[i]).collect(),
        centroids,
        iterations,
        converged,
        objective,
    })
}

type Lloyd = (Vec<usize>, usize, bool, Vec<f64>);

fn lloyd<const D: usize>(points: &[[f64; D]], mult: &[f64], centroids: &mut [[f64; D]], max_iters: usize) -> Lloyd {
    let k = centroids.len();
    let mut assign = vec![usize::MAX; points.len()];
    let mut objective = Vec::new();
    let mut iterations = 0;
    while iterations < max_iters {
        iterations += 1;
        let mut changed = false;
        let mut obj = 0.0;
        for (i, p) in points.iter().enumerate() {
            let c = nearest(p, centroids);
            obj += mult[i] * sq_dist(p, &centroids[c]);
            if assign[i] != c {
                assign[i] = c;
                changed = true;
            }
        }
        objective.push(obj);
        if !changed {
            return (assign, iterations, true, objective);
        }
        let mut sums = vec![[0.0; D]; k];
        let mut counts = vec![0.0; k];
        for (i, p) in points.iter().enumerate() {
            let c = assign[i];
            counts[c] += mult[i];
            for (s, x) in sums[c].iter_mut().zip(p) {
                *s += mult[i] * x;
            }
        }
        for c in 0..k {
            if counts[c] > 0.0 {
                centroids[c] = sums[c].map(|s| s / counts[c]);
            }
        }
    }
    (assign, iterations, false, objective)
}

/// Lloyd's iteration on sorted distinct values. Each cluster is a contiguous
/// run, so one step is a binary search per centroid plus prefix sums.
fn lloyd_sorted_1d(xs: &[f64], mult: &[f64], centroids: &mut [f64], max_iters: usize) -> Lloyd {
    let n = xs.len();
    let k = centroids.len();
    let mut pm = vec![0.0; n + 1];
    let mut px = vec![0.0; n + 1];
    let mut pxx = vec![0.0; n + 1];
    for i in 0..n {
        pm[i + 1] = pm[i] + mult[i];
        px[i + 1] = px[i] + mult[i] * xs[i];
        pxx[i + 1] = pxx[i] + mult[i] * xs[i] * xs[i];
    }
    let mut ranges = vec![(0, 0); k];
    let mut objective = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iters {
        iterations += 1;
        let mut sorted: Vec<(f64, usize)> = centroids.iter().copied().zip(0..k).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        // equal centroids: the lowest index takes the whole run
        sorted.dedup_by(|b, a| a.0 == b.0);
        let mut next = vec![(0, 0); k];
        let mut lo = 0;
        for j in 0..sorted.len() {
            let hi = match sorted.get(j + 1) {
                None => n,
                Some(&(b, ib)) => {
                    let (a, ia) = sorted[j];
                    let left = |x: &f64| {
                        let (dl, dr) = ((x - a).powi(2), (b - x).powi(2));
                        dl < dr || (dl == dr && ia < ib)
                    };
                    lo + xs[lo..].partition_point(left)
                }
            };
            next[sorted[j].1] = (lo, hi);
            lo = hi;
        }
        let mut obj = 0.0;
        for c in 0..k {
            let (lo, hi) = next[c];
            if lo < hi {
                let (m, sx, sxx) = (pm[hi] - pm[lo], px[hi] - px[lo], pxx[hi] - pxx[lo]);
                let v = centroids[c];
                obj += (sxx - 2.0 * v * sx + v * v * m).max(0.0);
            }
        }
        objective.push(obj);
        if next == ranges {
            converged = true;
            break;
        }
        ranges = next;
        for c in 0..k {
            let (lo, hi) = ranges[c];
            if lo < hi {
                centroids[c] = (px[hi] - px[lo]) / (pm[hi] - pm[lo]);
            }
        }
    }
    let mut assign = vec![0; n];
    for (c, &(lo, hi)) in ranges.iter().enumerate() {
        assign[lo..hi].fill(c);
    }
    (assign, iterations, converged, objective)
}

/// An item to aggregate: the node holding it and its weight and profit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterItem {
    pub node: usize,
    pub weight: f64,
    pub profit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    /// original node standing in for the cluster
    pub representative: usize,
    pub items: Vec<usize>,
    /// original nodes swept when the cluster is visited, ascending by position
    pub nodes: Vec<usize>,
    pub weight: f64,
    pub profit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterMapping {
    pub start: usize,
    /// reduced node `c + 1` is `clusters[c]`; reduced node 0 is the start
    pub clusters: Vec<Cluster>,
    pub item_nodes: Vec<usize>,
    pub k: usize,
    pub seed: u64,
}

impl ClusterMapping {
    /// Original node behind each reduced node.
    pub fn reduced_nodes(&self) -> Vec<usize> {
        std::iter::once(self.start)
            .chain(self.clusters.iter().map(|c| c.representative))
            .collect()
    }
}

fn path_positions(inst: &WTspInstance) -> Result<&[f64]> {
    match &inst.metric {
        Metric::Path { positions, .. } => Ok(positions),
        other => Err(WtspError::IncompatibleMetric {
            expected: "path",
            found: other.kind(),
        }),
    }
}

/// Default cluster count: `ceil(sqrt(m))` for `m` items.
pub fn default_k(items: usize) -> usize {
    (items as f64).sqrt().ceil() as usize
}

/// Reduced path instance and the mapping back. Node weights of `inst` must
/// be the item weights summed per node; items at the start stay with it.
/// Nodes without items are swept with the cluster whose centroid is nearest.
pub fn build_clustered_instance(
    inst: &WTspInstance,
    items: &[ClusterItem],
    k: Option<usize>,
    seed: u64,
) -> Result<(WTspInstance, ClusterMapping)> {
    let pos = path_positions(inst)?;
    let n = inst.n();
    let mut per_node = vec![0.0; n];
    for (i, it) in items.iter().enumerate() {
        if it.node >= n {
            return Err(WtspError::InconsistentMapping(format!("item {i} at unknown node {}", it.node)));
        }
        per_node[it.node] += it.weight;
    }
    for v in 0..n {
        let tol = 1e-9 * per_node[v].abs().max(1.0);
        if (per_node[v] - inst.weights[v]).abs() > tol {
            return Err(WtspError::InconsistentMapping(format!(
                "node {v} has weight {} but its items sum to {}",
                inst.weights[v], per_node[v]
            )));
        }
    }

    let movable: Vec<usize> = (0..items.len()).filter(|&i| items[i].node != inst.start).collect();
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut k_used = 0;
    if !movable.is_empty() {
        let k = k.unwrap_or_else(|| default_k(movable.len())).clamp(1, movable.len());
        k_used = k;
        let points: Vec<[f64; 1]> = movable.iter().map(|&i| [pos[items[i].node]]).collect();
        let km = kmeans(&points, k, seed, DEFAULT_MAX_ITERS)?;
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); km.centroids.len()];
        for (j, &c) in km.assignments.iter().enumerate() {
            members[c].push(movable[j]);
        }
        let mut sorted: Vec<(f64, usize)> = km.centroids.iter().enumerate().map(|(c, p)| (p[0], c)).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut node_cluster = vec![usize::MAX; n];
        for (c, m) in members.iter().enumerate() {
            for &i in m {
                if node_cluster[items[i].node] == usize::MAX {
                    node_cluster[items[i].node] = c;
                }
            }
        }
        for v in 0..n {
            if v != inst.start && node_cluster[v] == usize::MAX {
                node_cluster[v] = nearest_1d(pos[v], &sorted);
            }
        }
        let mut by_cluster: Vec<Vec<usize>> = vec![Vec::new(); km.centroids.len()];
        for v in 0..n {
            if v != inst.start {
                by_cluster[node_cluster[v]].push(v);
            }
        }
        // clusters are numbered by centroid index, skipping empty ones
        for (c, m) in members.into_iter().enumerate() {
            if m.is_empty() {
                continue;
            }
            let centroid = km.centroids[c][0];
            let representative = m
                .iter()
                .map(|&i| items[i].node)
                .min_by(|&a, &b| (pos[a] - centroid).abs().total_cmp(&(pos[b] - centroid).abs()).then(a.cmp(&b)))
                .unwrap();
            let mut nodes = std::mem::take(&mut by_cluster[c]);
            nodes.sort_by(|&a, &b| pos[a].total_cmp(&pos[b]).then(a.cmp(&b)));
            clusters.push(Cluster {
                representative,
                weight: m.iter().map(|&i| items[i].weight).sum(),
                profit: m.iter().map(|&i| items[i].profit).sum(),
                items: m,
                nodes,
            });
        }
        // item-less nodes attached to an empty cluster fall to the nearest nonempty one
        let owned: Vec<bool> = {
            let mut o = vec![false; n];
            for cl in &clusters {
                for &v in &cl.nodes {
                    o[v] = true;
                }
            }
            o
        };
        for v in 0..n {
            if v != inst.start && !owned[v] {
                let c = (0..clusters.len())
                    .min_by(|&a, &b| {
                        let da = (pos[clusters[a].representative] - pos[v]).abs();
                        let db = (pos[clusters[b].representative] - pos[v]).abs();
                        da.total_cmp(&db).then(a.cmp(&b))
                    })
                    .unwrap();
                let nodes = &mut clusters[c].nodes;
                nodes.push(v);
                nodes.sort_by(|&a, &b| pos[a].total_cmp(&pos[b]).then(a.cmp(&b)));
            }
        }
    }

    let mapping = ClusterMapping {
        start: inst.start,
        item_nodes: items.iter().map(|it| it.node).collect(),
        clusters,
        k: k_used,
        seed,
    };
    let reduced = reduced_instance(inst, items, &mapping, pos)?;
    Ok((reduced, mapping))
}

fn reduced_instance(inst: &WTspInstance, items: &[ClusterItem], mapping: &ClusterMapping, pos: &[f64]) -> Result<WTspInstance> {
    let nodes = mapping.reduced_nodes();
    let mut weights: Vec<f64> = std::iter::once(inst.start)
        .map(|s| items.iter().filter(|it| it.node == s).map(|it| it.weight).sum())
        .collect();
    weights.extend(mapping.clusters.iter().map(|c| c.weight));
    // rank by position, ties by reduced index so the start comes first
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| pos[nodes[a]].total_cmp(&pos[nodes[b]]).then(a.cmp(&b)));
    let gaps = order.windows(2).map(|p| pos[nodes[p[1]]] - pos[nodes[p[0]]]).collect();
    let mut reduced = WTspInstance::new(Metric::path(order, gaps)?, weights, 0, inst.cost.clone())?;
    reduced.name = inst.name.as_ref().map(|s| format!("{s}-clustered"));
    Ok(reduced)
}

/// Full tour from a reduced tour: each cluster's nodes are swept when its
/// representative is reached, ascending if the tour moves right there and
/// descending otherwise. Nodes already swept are skipped.
pub fn expand_tour(reduced: &Tour, mapping: &ClusterMapping, original: &WTspInstance) -> Result<Tour> {
    let pos = path_positions(original)?;
    let nodes = mapping.reduced_nodes();
    let n = original.n();
    if reduced.len() != nodes.len() || reduced.start() != 0 {
        return Err(WtspError::InconsistentMapping(format!(
            "reduced tour must visit the {} reduced nodes starting from 0",
            nodes.len()
        )));
    }
    if mapping.start != original.start || nodes.iter().any(|&v| v >= n) {
        return Err(WtspError::InconsistentMapping("mapping does not belong to this instance".into()));
    }
    let mut seen = vec![false; n];
    let mut order = vec![mapping.start];
    seen[mapping.start] = true;
    let mut here = pos[mapping.start];
    for &r in &reduced.order()[1..] {
        let cluster = &mapping.clusters[r - 1];
        let target = pos[cluster.representative];
        let sweep: Box<dyn Iterator<Item = &usize>> = if target >= here {
            Box::new(cluster.nodes.iter())
        } else {
            Box::new(cluster.nodes.iter().rev())
        };
        for &v in sweep {
            if v >= n {
                return Err(WtspError::InconsistentMapping(format!("cluster node {v} out of range")));
            }
            if !seen[v] {
                seen[v] = true;
                order.push(v);
            }
        }
        here = target;
    }
    if order.len() != n {
        return Err(WtspError::InconsistentMapping(format!(
            "expansion reached {} of {n} nodes",
            order.len()
        )));
    }
    Tour::new(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostFunction;
    use crate::instance::tour_cost;
    use crate::path_dp::solve_fixed_start;
    use proptest::prelude::*;

    fn path_with_items(xs: &[f64], items: &[(usize, f64)]) -> (WTspInstance, Vec<ClusterItem>) {
        let mut order: Vec<usize> = (0..xs.len()).collect();
        order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
        let gaps = order.windows(2).map(|p| xs[p[1]] - xs[p[0]]).collect();
        let mut weights = vec![0.0; xs.len()];
        let items: Vec<ClusterItem> = items
            .iter()
            .map(|&(node, weight)| {
                weights[node] += weight;
                ClusterItem { node, weight, profit: 1.0 }
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let inst = WTspInstance::new(
            Metric::path(order, gaps).unwrap(),
            weights,
            0,
            CostFunction::linear_speed(1.0, 0.1, total.max(1.0)).unwrap(),
        )
        .unwrap();
        (inst, items)
    }

    #[test]
    fn k_equal_to_points_gives_singletons() {
        let pts = [[0.0], [5.0], [9.0], [2.0]];
        let km = kmeans(&pts, 4, 1, 100).unwrap();
        let mut a = km.assignments.clone();
        a.sort();
        a.dedup();
        assert_eq!(a.len(), 4);
    }

    #[test]
    fn separated_groups_are_recovered() {
        let pts: Vec<[f64; 2]> = (0..10)
            .map(|i| if i < 5 { [i as f64 * 0.1, 0.0] } else { [100.0 + i as f64 * 0.1, 50.0] })
            .collect();
        for seed in 0..10 {
            let km = kmeans(&pts, 2, seed, 100).unwrap();
            assert!(km.converged);
            assert!(km.assignments[..5].iter().all(|&c| c == km.assignments[0]));
            assert!(km.assignments[5..].iter().all(|&c| c == km.assignments[5]));
            assert_ne!(km.assignments[0], km.assignments[5]);
        }
    }

    #[test]
    fn kmeans_rejects_bad_k() {
        assert!(kmeans(&[[0.0]], 0, 1, 10).is_err());
        assert!(kmeans(&[[0.0]], 2, 1, 10).is_err());
    }

    #[test]
    fn items_at_one_node_form_one_cluster() {
        let (inst, items) = path_with_items(&[0.0, 3.0, 7.0, 9.0], &[(2, 1.0), (2, 4.0), (2, 2.0), (2, 1.0)]);
        let (reduced, mapping) = build_clustered_instance(&inst, &items, Some(3), 42).unwrap();
        assert_eq!(reduced.n(), 2);
        assert_eq!(mapping.clusters.len(), 1);
        assert_eq!(mapping.clusters[0].representative, 2);
        assert_eq!(reduced.weights, vec![0.0, 8.0]);
        assert_eq!(reduced.distance(0, 1), 7.0);
    }

    #[test]
    fn one_cluster_per_node_keeps_the_instance() {
        let xs = [0.0, 4.0, 1.0, 6.0];
        let (inst, items) = path_with_items(&xs, &[(1, 2.0), (1, 1.0), (2, 5.0), (3, 1.5)]);
        let (reduced, mapping) = build_clustered_instance(&inst, &items, Some(3), 42).unwrap();
        assert_eq!(reduced.n(), 4);
        let nodes = mapping.reduced_nodes();
        let mut reps = nodes[1..].to_vec();
        reps.sort();
        assert_eq!(reps, vec![1, 2, 3]);
        for r in 0..4 {
            assert_eq!(reduced.weights[r], inst.weights[nodes[r]]);
            for s in 0..4 {
                assert_eq!(reduced.distance(r, s), inst.distance(nodes[r], nodes[s]));
            }
        }
        let (tour, cost) = solve_fixed_start(&reduced, 0).unwrap();
        let full = expand_tour(&tour, &mapping, &inst).unwrap();
        let mapped: Vec<usize> = tour.order().iter().map(|&r| nodes[r]).collect();
        assert_eq!(full.order(), &mapped[..]);
        assert_eq!(tour_cost(&inst, &full).unwrap(), cost);
    }

    #[test]
    fn mismatched_weights_are_rejected() {
        let (mut inst, items) = path_with_items(&[0.0, 1.0], &[(1, 2.0)]);
        inst.weights[1] = 3.0;
        assert!(matches!(
            build_clustered_instance(&inst, &items, None, 42),
            Err(WtspError::InconsistentMapping(_))
        ));
    }

    #[test]
    fn mapping_serializes() {
        let (inst, items) = path_with_items(&[0.0, 1.0, 2.0], &[(1, 2.0), (2, 1.0)]);
        let (_, mapping) = build_clustered_instance(&inst, &items, None, 42).unwrap();
        let json = serde_json::to_string(&mapping).unwrap();
        assert_eq!(serde_json::from_str::<ClusterMapping>(&json).unwrap(), mapping);
    }

    fn instance_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<(usize, f64)>, u64)> {
        (3usize..25).prop_flat_map(|n| {
            (
                prop::collection::vec(0u32..200, n).prop_map(|v| v.into_iter().map(f64::from).collect()),
                prop::collection::vec((1..n, 1u32..50).prop_map(|(v, w)| (v, w as f64)), 1..3 * n),
                any::<u64>(),
            )
        })
    }

    proptest! {
        #[test]
        fn objective_never_increases(pts in prop::collection::vec((0u32..100, 0u32..100), 2..40), seed in any::<u64>()) {
            let pts: Vec<[f64; 2]> = pts.into_iter().map(|(x, y)| [x as f64, y as f64]).collect();
            let k = 1 + (seed as usize) % pts.len();
            let km = kmeans(&pts, k, seed, 100).unwrap();
            for w in km.objective.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-9);
            }
        }

        #[test]
        fn one_dimensional_fast_path_matches_scan(c in prop::collection::vec(0u32..50, 1..8), x in 0u32..50) {
            let centroids: Vec<[f64; 1]> = c.iter().map(|&v| [v as f64 / 2.0]).collect();
            let mut sorted: Vec<(f64, usize)> = centroids.iter().enumerate().map(|(i, p)| (p[0], i)).collect();
            sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            prop_assert_eq!(nearest_1d(x as f64, &sorted), nearest(&[x as f64], &centroids));
        }

        #[test]
        fn sorted_runs_match_the_plain_scan(xs in prop::collection::vec(0u32..60, 1..50), seed in any::<u64>()) {
            let mut xs: Vec<f64> = xs.into_iter().map(f64::from).collect();
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            let mult: Vec<f64> = (0..xs.len()).map(|i| (1 + i % 3) as f64).collect();
            let k = 1 + seed as usize % xs.len();
            let init: Vec<f64> = sample(&mut ChaCha8Rng::seed_from_u64(seed), xs.len(), k).into_iter().map(|i| xs[i]).collect();
            let mut a = init.clone();
            let fast = lloyd_sorted_1d(&xs, &mult, &mut a, 100);
            let pts: Vec<[f64; 1]> = xs.iter().map(|&x| [x]).collect();
            let mut b: Vec<[f64; 1]> = init.iter().map(|&x| [x]).collect();
            let slow = lloyd(&pts, &mult, &mut b, 100);
            prop_assert_eq!(&fast.0, &slow.0);
            prop_assert_eq!(fast.1, slow.1);
            prop_assert_eq!(a, b.iter().map(|p| p[0]).collect::<Vec<_>>());
            for w in fast.3.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-6);
            }
        }

        #[test]
        fn expansion_is_a_permutation_and_never_beats_the_optimum((xs, items, seed) in instance_strategy()) {
            let (inst, items) = path_with_items(&xs, &items);
            let (reduced, mapping) = build_clustered_instance(&inst, &items, None, seed).unwrap();
            let total: f64 = mapping.clusters.iter().map(|c| c.weight).sum();
            prop_assert!((total - inst.total_weight()).abs() < 1e-9);
            prop_assert!((reduced.total_weight() - inst.total_weight()).abs() < 1e-9);
            let mut covered: Vec<usize> = mapping.clusters.iter().flat_map(|c| c.items.iter().copied()).collect();
            covered.sort();
            prop_assert_eq!(covered, (0..items.len()).collect::<Vec<_>>());

            let (rt, _) = solve_fixed_start(&reduced, 0).unwrap();
            let full = expand_tour(&rt, &mapping, &inst).unwrap();
            prop_assert_eq!(full.start(), inst.start);
            let (_, opt) = solve_fixed_start(&inst, inst.start).unwrap();
            prop_assert!(tour_cost(&inst, &full).unwrap() >= opt - 1e-9 * opt.abs());
        }
    }
}
