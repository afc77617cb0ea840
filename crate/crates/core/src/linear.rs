//! Start selection for linearly decreasing speed on general metrics.
//!
//! A constant-factor TSP tour is normalized so that gaps and weights each sum
//! to `n` and speed runs from `n` down to 0. The start is the rotation whose
//! cyclic prefix sums of `a_i = g_i - w_{i+1} + eps (1 - w_{i+1})` are all
//! nonnegative; it always exists since the `a_i` sum to zero.

use crate::cost::CostFunction;
use crate::error::{Result, WtspError};
use crate::instance::{tour_cost, tour_length, Tour, WTspInstance};

/// Absolute tolerance on normalized sums.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// MST preorder tour rooted at the instance start. Prim's algorithm with ties
/// broken by node index; children are visited in ascending index order.
pub fn metric_tsp_approx(inst: &WTspInstance) -> Result<Tour> {
    let n = inst.n();
    let root = inst.start;
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    best[root] = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        for v in 0..n {
            if !in_tree[v] && (u == usize::MAX || best[v] < best[u]) {
                u = v;
            }
        }
        if !best[u].is_finite() {
            return Err(WtspError::InvalidInstance(format!(
                "node {u} is at infinite distance from the tree"
            )));
        }
        in_tree[u] = true;
        if parent[u] != usize::MAX {
            children[parent[u]].push(u);
        }
        for v in 0..n {
            let d = inst.distance(u, v);
            if !in_tree[v] && d < best[v] {
                best[v] = d;
                parent[v] = u;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![root];
    while let Some(u) = stack.pop() {
        order.push(u);
        children[u].sort_unstable();
        stack.extend(children[u].iter().rev());
    }
    Tour::new(order)
}

/// Tour scaled so that gaps and weights each sum to `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedTour {
    pub order: Vec<usize>,
    /// `gaps[i]` is the scaled distance from `order[i]` to `order[i + 1]`, cyclic
    pub gaps: Vec<f64>,
    /// `weights[i]` is the scaled weight of `order[i]`
    pub weights: Vec<f64>,
    pub epsilon: f64,
    /// original distance per scaled unit
    pub distance_scale: f64,
    /// original weight per scaled unit
    pub weight_scale: f64,
}

impl NormalizedTour {
    /// Fails when the tour has zero length or the nodes carry no weight.
    pub fn new(inst: &WTspInstance, tour: &Tour, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        tour.check_against(inst)?;
        let order = tour.order().to_vec();
        let n = order.len();
        let raw_gaps: Vec<f64> = (0..n)
            .map(|i| inst.distance(order[i], order[(i + 1) % n]))
            .collect();
        let length: f64 = raw_gaps.iter().sum();
        let weight = inst.total_weight();
        if length <= 0.0 || weight <= 0.0 {
            return Err(WtspError::InvalidInstance(
                "normalization needs positive tour length and total weight".into(),
            ));
        }
        let nf = n as f64;
        Ok(NormalizedTour {
            gaps: raw_gaps.iter().map(|g| g * nf / length).collect(),
            weights: order.iter().map(|&v| inst.weights[v] * nf / weight).collect(),
            order,
            epsilon,
            distance_scale: length / nf,
            weight_scale: weight / nf,
        })
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// Duration in scaled units starting at `order[s]`, speed `n - carried`.
    pub fn scaled_duration(&self, s: usize) -> f64 {
        let n = self.n();
        let nf = n as f64;
        let mut carried = 0.0;
        let mut total = 0.0;
        for k in 0..n {
            let i = (s + k) % n;
            if k > 0 {
                carried += self.weights[i];
            }
            let speed = nf - carried;
            if self.gaps[i] > 0.0 {
                total += if speed <= crate::cost::MIN_SPEED {
                    f64::INFINITY
                } else {
                    self.gaps[i] / speed
                };
            }
        }
        total
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon > 0.0 {
        Ok(())
    } else {
        Err(WtspError::InvalidParameter(format!(
            "epsilon must be positive, got {epsilon}"
        )))
    }
}

/// `a_i = g_i - w_{i+1} + eps (1 - w_{i+1})`, indices cyclic.
pub fn a_sequence(norm: &NormalizedTour) -> Vec<f64> {
    let n = norm.n();
    (0..n)
        .map(|i| {
            let w = norm.weights[(i + 1) % n];
            norm.gaps[i] - w + norm.epsilon * (1.0 - w)
        })
        .collect()
}

/// Smallest 0-based `s` with every cyclic prefix sum from `s` nonnegative:
/// the position right after the minimum prefix sum, where the empty prefix
/// counts as position 0.
pub fn select_start(a: &[f64]) -> Result<usize> {
    let total: f64 = a.iter().sum();
    let scale = a.iter().map(|x| x.abs()).sum::<f64>().max(1.0);
    if total.abs() > SUM_TOLERANCE * scale {
        return Err(WtspError::InvalidParameter(format!(
            "a-sequence sums to {total}, expected 0"
        )));
    }
    let mut prefix = 0.0;
    let mut min = 0.0;
    let mut s = 0;
    for (k, x) in a.iter().enumerate().take(a.len().saturating_sub(1)) {
        prefix += x;
        if prefix < min {
            min = prefix;
            s = k + 1;
        }
    }
    Ok(s)
}

/// `(1 + eps)(ln n + 1 - ln eps)`, the scaled-duration guarantee.
pub fn duration_bound(n: usize, epsilon: f64) -> f64 {
    (1.0 + epsilon) * ((n as f64).ln() + 1.0 - epsilon.ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    pub tour: Tour,
    /// tour cost with the real speeds
    pub cost: f64,
    /// duration in normalized units with the minimum speed taken as 0
    pub scaled_duration: f64,
    pub bound: f64,
    pub epsilon: f64,
}

/// MST tour rotated to the selected start. The tour's first node is the
/// chosen start and may differ from `inst.start`.
///
/// `epsilon` defaults to `1 / n`.
pub fn solve_linear(inst: &WTspInstance, epsilon: Option<f64>) -> Result<LinearSolution> {
    let CostFunction::LinearSpeed { .. } = inst.cost else {
        return Err(WtspError::InvalidCostFunction(format!(
            "start selection needs a linear_speed cost function, got {}",
            inst.cost.kind()
        )));
    };
    let n = inst.n();
    let epsilon = epsilon.unwrap_or(1.0 / n as f64);
    check_epsilon(epsilon)?;
    let bound = duration_bound(n, epsilon);
    let base = metric_tsp_approx(inst)?;

    let (tour, scaled_duration) = if tour_length(inst, base.order()) <= 0.0 {
        (base, 0.0)
    } else if inst.total_weight() <= 0.0 {
        // no weight: every rotation runs at full speed over n scaled units
        (base, 1.0)
    } else {
        let norm = NormalizedTour::new(inst, &base, epsilon)?;
        let s = select_start(&a_sequence(&norm))?;
        (base.rotated(s), norm.scaled_duration(s))
    };
    let cost = tour_cost(inst, &tour)?;
    Ok(LinearSolution {
        tour,
        cost,
        scaled_duration,
        bound,
        epsilon,
    })
}
