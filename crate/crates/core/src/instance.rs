//! Instances, tours and the weighted tour cost.

use crate::cost::{edge_cost, CostFunction};
use crate::error::{Result, WtspError};

/// Relative tolerance used by [`validate_metric`].
pub const METRIC_TOLERANCE: f64 = 1e-9;

/// Distance structure of an instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    /// Explicit symmetric matrix.
    General { distances: Vec<Vec<f64>> },
    /// Nodes on a line. `order` lists node indices left to right and
    /// `gaps[k]` is the distance between `order[k]` and `order[k + 1]`.
    Path {
        order: Vec<usize>,
        gaps: Vec<f64>,
        /// coordinate of each node (indexed by node), derived from the gaps
        positions: Vec<f64>,
        /// rank of each node in `order`
        rank: Vec<usize>,
    },
    /// Height-one tree. `leaf_distances[v]` is the distance from `center` to
    /// `v` (zero for the center itself).
    Star {
        center: usize,
        leaf_distances: Vec<f64>,
    },
}

impl Metric {
    pub fn general(distances: Vec<Vec<f64>>) -> Self {
        Metric::General { distances }
    }

    /// Path metric from a left-to-right node order and the consecutive gaps.
    pub fn path(order: Vec<usize>, gaps: Vec<f64>) -> Result<Self> {
        let n = order.len();
        if gaps.len() + 1 != n.max(1) {
            return Err(WtspError::InvalidInstance(format!(
                "path with {n} nodes needs {} gaps, got {}",
                n.saturating_sub(1),
                gaps.len()
            )));
        }
        if let Some(g) = gaps.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return Err(WtspError::InvalidInstance(format!(
                "path gaps must be finite and >= 0, got {g}"
            )));
        }
        let mut rank = vec![usize::MAX; n];
        for (k, &v) in order.iter().enumerate() {
            if v >= n || rank[v] != usize::MAX {
                return Err(WtspError::InvalidInstance(
                    "path order must be a permutation of the nodes".into(),
                ));
            }
            rank[v] = k;
        }
        let mut positions = vec![0.0; n];
        let mut x = 0.0;
        for (k, &v) in order.iter().enumerate() {
            if k > 0 {
                x += gaps[k - 1];
            }
            positions[v] = x;
        }
        Ok(Metric::Path {
            order,
            gaps,
            positions,
            rank,
        })
    }

    /// Path metric with nodes `0..n` already in left-to-right order.
    pub fn path_from_gaps(gaps: Vec<f64>) -> Result<Self> {
        let n = gaps.len() + 1;
        Metric::path((0..n).collect(), gaps)
    }

    pub fn star(center: usize, leaf_distances: Vec<f64>) -> Self {
        Metric::Star {
            center,
            leaf_distances,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Metric::General { .. } => "general",
            Metric::Path { .. } => "path",
            Metric::Star { .. } => "star",
        }
    }

    fn node_count(&self) -> usize {
        match self {
            Metric::General { distances } => distances.len(),
            Metric::Path { order, .. } => order.len(),
            Metric::Star { leaf_distances, .. } => leaf_distances.len(),
        }
    }

    #[inline]
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        match self {
            Metric::General { distances } => distances[a][b],
            Metric::Path { positions, .. } => (positions[a] - positions[b]).abs(),
            Metric::Star { leaf_distances, .. } => {
                if a == b {
                    0.0
                } else {
                    leaf_distances[a] + leaf_distances[b]
                }
            }
        }
    }
}

/// A weighted TSP instance.
#[derive(Debug, Clone, PartialEq)]
pub struct WTspInstance {
    pub name: Option<String>,
    pub metric: Metric,
    pub weights: Vec<f64>,
    pub start: usize,
    pub cost: CostFunction,
}

impl WTspInstance {
    pub fn new(metric: Metric, weights: Vec<f64>, start: usize, cost: CostFunction) -> Result<Self> {
        let inst = WTspInstance {
            name: None,
            metric,
            weights,
            start,
            cost,
        };
        inst.check()?;
        Ok(inst)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Structural checks; the triangle inequality is left to [`validate_metric`].
    pub fn check(&self) -> Result<()> {
        let n = self.weights.len();
        let bad = |msg: String| Err(WtspError::InvalidInstance(msg));
        if n == 0 {
            return bad("instance has no nodes".into());
        }
        if self.metric.node_count() != n {
            return bad(format!(
                "metric describes {} nodes but {n} weights were given",
                self.metric.node_count()
            ));
        }
        if self.start >= n {
            return bad(format!("start node {} out of range", self.start));
        }
        if let Some(w) = self.weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return bad(format!("weights must be finite and >= 0, got {w}"));
        }
        match &self.metric {
            Metric::General { distances } => {
                for row in distances {
                    if row.len() != n {
                        return bad("distance matrix must be square".into());
                    }
                    if let Some(d) = row.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
                        return bad(format!("distances must be finite and >= 0, got {d}"));
                    }
                }
            }
            Metric::Star {
                center,
                leaf_distances,
            } => {
                if *center >= n {
                    return bad(format!("star center {center} out of range"));
                }
                if leaf_distances[*center] != 0.0 {
                    return bad("star center must be at distance 0 from itself".into());
                }
                if let Some(d) = leaf_distances.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
                    return bad(format!("leaf distances must be finite and >= 0, got {d}"));
                }
            }
            Metric::Path { .. } => {}
        }
        self.cost.validate()
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.metric.distance(a, b)
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Same instance with a different start node.
    pub fn with_start(&self, start: usize) -> Result<Self> {
        let mut inst = self.clone();
        inst.start = start;
        inst.check()?;
        Ok(inst)
    }

    /// Full distance matrix, whatever the metric representation.
    pub fn distance_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        (0..n)
            .map(|a| (0..n).map(|b| self.distance(a, b)).collect())
            .collect()
    }
}

/// Visiting order. The first node is the start; its weight is only picked up
/// when the tour closes, so it is never carried.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tour {
    order: Vec<usize>,
}

impl Tour {
    /// Any permutation of `0..n`.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        if n == 0 {
            return Err(WtspError::InvalidTour("empty tour".into()));
        }
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n || seen[v] {
                return Err(WtspError::InvalidTour(format!(
                    "not a permutation of 0..{n} (offending node {v})"
                )));
            }
            seen[v] = true;
        }
        Ok(Tour { order })
    }

    /// A permutation of the instance's nodes starting at `instance.start`.
    pub fn for_instance(instance: &WTspInstance, order: Vec<usize>) -> Result<Self> {
        let tour = Tour::new(order)?;
        tour.check_against(instance)?;
        if tour.start() != instance.start {
            return Err(WtspError::InvalidTour(format!(
                "tour starts at {} but the instance starts at {}",
                tour.start(),
                instance.start
            )));
        }
        Ok(tour)
    }

    pub fn check_against(&self, instance: &WTspInstance) -> Result<()> {
        if self.order.len() != instance.n() {
            return Err(WtspError::InvalidTour(format!(
                "tour has {} nodes, instance has {}",
                self.order.len(),
                instance.n()
            )));
        }
        Ok(())
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn into_order(self) -> Vec<usize> {
        self.order
    }

    pub fn start(&self) -> usize {
        self.order[0]
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Same cycle, started at position `pos` of this order.
    pub fn rotated(&self, pos: usize) -> Tour {
        let mut order = self.order.clone();
        let n = order.len();
        order.rotate_left(pos % n);
        Tour { order }
    }
}

/// Weight carried on each edge: entry `i` is for the edge leaving `order[i]`,
/// the last entry is the closing edge back to the start.
pub fn carried_weights(instance: &WTspInstance, tour: &Tour) -> Vec<f64> {
    let mut carried = Vec::with_capacity(tour.len());
    let mut w = 0.0;
    for (i, &v) in tour.order().iter().enumerate() {
        if i > 0 {
            w += instance.weights[v];
        }
        carried.push(w);
    }
    carried
}

/// Weighted tour cost: each edge is charged its length times `f` of the weight
/// collected so far. Returns `+inf` if an edge of positive length is
/// traversed at an infinite rate.
pub fn tour_cost(instance: &WTspInstance, tour: &Tour) -> Result<f64> {
    tour.check_against(instance)?;
    Ok(tour_cost_unchecked(instance, tour.order()))
}

/// [`tour_cost`] on a raw order; the caller guarantees it is a permutation.
pub fn tour_cost_unchecked(instance: &WTspInstance, order: &[usize]) -> f64 {
    let n = order.len();
    let mut w = 0.0;
    let mut total = 0.0;
    for i in 0..n {
        let from = order[i];
        let to = order[(i + 1) % n];
        if i > 0 {
            w += instance.weights[from];
        }
        total += edge_cost(instance.cost.eval(w), instance.distance(from, to));
    }
    total
}

/// Closed tour length, ignoring weights.
pub fn tour_length(instance: &WTspInstance, order: &[usize]) -> f64 {
    let n = order.len();
    (0..n)
        .map(|i| instance.distance(order[i], order[(i + 1) % n]))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    NonzeroDiagonal,
    Asymmetric,
    Triangle,
}

/// One failed metric axiom. For triangle violations `nodes = (i, j, k)` with
/// `d(i, k) > d(i, j) + d(j, k)` and `slack` the excess.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricViolation {
    pub kind: ViolationKind,
    pub nodes: (usize, usize, usize),
    pub slack: f64,
}

/// All metric axiom violations, checked at relative tolerance [`METRIC_TOLERANCE`].
pub fn validate_metric(instance: &WTspInstance) -> Vec<MetricViolation> {
    let d = instance.distance_matrix();
    let n = d.len();
    let tol = |x: f64| METRIC_TOLERANCE * x.abs().max(1.0);
    let mut out = Vec::new();
    for i in 0..n {
        if d[i][i].abs() > tol(0.0) {
            out.push(MetricViolation {
                kind: ViolationKind::NonzeroDiagonal,
                nodes: (i, i, i),
                slack: d[i][i],
            });
        }
        for j in i + 1..n {
            let diff = (d[i][j] - d[j][i]).abs();
            if diff > tol(d[i][j].max(d[j][i])) {
                out.push(MetricViolation {
                    kind: ViolationKind::Asymmetric,
                    nodes: (i, j, i),
                    slack: diff,
                });
            }
        }
    }
    for i in 0..n {
        for k in i + 1..n {
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let excess = d[i][k] - (d[i][j] + d[j][k]);
                if excess > tol(d[i][k]) {
                    out.push(MetricViolation {
                        kind: ViolationKind::Triangle,
                        nodes: (i, j, k),
                        slack: excess,
                    });
                }
            }
        }
    }
    out
}
