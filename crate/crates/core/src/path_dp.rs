//! Exact interval DP for path metrics.
//!
//! Nodes are addressed by their rank `0..n` in left-to-right order. The state
//! `(i, j, side)` means every node outside ranks `i..=j` has been collected
//! and the walker stands on rank `i` (`Left`) or `j` (`Right`), about to pick
//! up that node. Its value is the optimal cost of collecting the rest of the
//! interval and walking back to the start `t`. An optimal tour always takes
//! the leftmost or rightmost uncollected node next, so each state has exactly
//! two successors and the table has `n^2 + n` entries.
//!
//! The start node stays inside the intervals with its weight zeroed: it is
//! picked up at the very end, so it never contributes to carried weight.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{edge_cost, CostFunction};
use crate::error::{Result, WtspError};
use crate::instance::{Metric, Tour, WTspInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// Transition taken out of a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    /// single-node interval: collect and return to the start
    Return,
    /// step to the neighbouring node on the same end
    Adjacent,
    /// cross the interval to the opposite end
    Far,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpState {
    pub i: usize,
    pub j: usize,
    pub side: Side,
    pub value: f64,
    pub mv: Move,
}

/// The path seen in rank order, with the start's weight removed.
struct Line<'a> {
    n: usize,
    order: &'a [usize],
    pos: Vec<f64>,
    weight: Vec<f64>,
    /// prefix[r] = sum of weight[..r]
    prefix: Vec<f64>,
    t_rank: usize,
    cost: &'a CostFunction,
}

impl<'a> Line<'a> {
    fn new(instance: &'a WTspInstance, t: usize) -> Result<Self> {
        let Metric::Path {
            order, positions, rank, ..
        } = &instance.metric
        else {
            return Err(WtspError::IncompatibleMetric {
                expected: "path",
                found: instance.metric.kind(),
            });
        };
        if t >= instance.n() {
            return Err(WtspError::InvalidParameter(format!("start node {t} out of range")));
        }
        let n = order.len();
        let pos: Vec<f64> = order.iter().map(|&v| positions[v]).collect();
        let mut weight: Vec<f64> = order.iter().map(|&v| instance.weights[v]).collect();
        let t_rank = rank[t];
        weight[t_rank] = 0.0;
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(0.0);
        for r in 0..n {
            prefix.push(prefix[r] + weight[r]);
        }
        Ok(Line {
            n,
            order,
            pos,
            weight,
            prefix,
            t_rank,
            cost: &instance.cost,
        })
    }

    fn total(&self) -> f64 {
        self.prefix[self.n]
    }

    /// weight collected before entering ranks i..=j
    #[inline]
    fn outside(&self, i: usize, j: usize) -> f64 {
        self.prefix[i] + (self.prefix[self.n] - self.prefix[j + 1])
    }

    #[inline]
    fn dist(&self, a: usize, b: usize) -> f64 {
        (self.pos[a] - self.pos[b]).abs()
    }
}

/// All `n^2 + n` DP values for one start node, stored by interval length.
#[derive(Debug, Clone)]
pub struct DpTable {
    n: usize,
    t_rank: usize,
    offsets: Vec<usize>,
    left: Vec<f64>,
    right: Vec<f64>,
    left_far: Vec<bool>,
    right_far: Vec<bool>,
}

impl DpTable {
    fn build(line: &Line) -> Self {
        let n = line.n;
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0;
        for len in 0..=n {
            offsets.push(acc);
            acc += n.saturating_sub(len);
        }
        let cells = acc;
        let mut left = vec![0.0; cells];
        let mut right = vec![0.0; cells];
        let mut left_far = vec![false; cells];
        let mut right_far = vec![false; cells];

        let full = line.cost.eval(line.total());
        for i in 0..n {
            let v = edge_cost(full, line.dist(i, line.t_rank));
            left[i] = v;
            right[i] = v;
        }
        for len in 1..n {
            let here = offsets[len];
            let below = offsets[len - 1];
            for i in 0..n - len {
                let j = i + len;
                let w = line.outside(i, j);

                // stand on i: next is i + 1 or j, both leave interval i+1..=j
                let rate = line.cost.eval(w + line.weight[i]);
                let adj = edge_cost(rate, line.pos[i + 1] - line.pos[i]) + left[below + i + 1];
                let far = edge_cost(rate, line.pos[j] - line.pos[i]) + right[below + i + 1];
                if adj <= far {
                    left[here + i] = adj;
                } else {
                    left[here + i] = far;
                    left_far[here + i] = true;
                }

                // stand on j: next is j - 1 or i, both leave interval i..=j-1
                let rate = line.cost.eval(w + line.weight[j]);
                let adj = edge_cost(rate, line.pos[j] - line.pos[j - 1]) + right[below + i];
                let far = edge_cost(rate, line.pos[j] - line.pos[i]) + left[below + i];
                if adj <= far {
                    right[here + i] = adj;
                } else {
                    right[here + i] = far;
                    right_far[here + i] = true;
                }
            }
        }
        DpTable {
            n,
            t_rank: line.t_rank,
            offsets,
            left,
            right,
            left_far,
            right_far,
        }
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        self.offsets[j - i] + i
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Rank of the start node.
    pub fn start_rank(&self) -> usize {
        self.t_rank
    }

    /// Number of stored states, `n^2 + n`.
    pub fn len(&self) -> usize {
        2 * self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    pub fn state(&self, i: usize, j: usize, side: Side) -> DpState {
        assert!(i <= j && j < self.n, "state ({i}, {j}) outside the path");
        let k = self.index(i, j);
        let (value, far) = match side {
            Side::Left => (self.left[k], self.left_far[k]),
            Side::Right => (self.right[k], self.right_far[k]),
        };
        let mv = if i == j {
            Move::Return
        } else if far {
            Move::Far
        } else {
            Move::Adjacent
        };
        DpState { i, j, side, value, mv }
    }

    pub fn value(&self, i: usize, j: usize, side: Side) -> f64 {
        self.state(i, j, side).value
    }

    pub fn states(&self) -> impl Iterator<Item = DpState> + '_ {
        (0..self.n).flat_map(move |i| {
            (i..self.n).flat_map(move |j| [Side::Left, Side::Right].map(|s| self.state(i, j, s)))
        })
    }

    /// Ranks in collection order, starting from the full interval on `side`.
    fn trace(&self, side: Side) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n);
        let (mut i, mut j, mut side) = (0, self.n - 1, side);
        loop {
            let st = self.state(i, j, side);
            match side {
                Side::Left => out.push(i),
                Side::Right => out.push(j),
            }
            match (st.mv, side) {
                (Move::Return, _) => break,
                (Move::Adjacent, Side::Left) => i += 1,
                (Move::Far, Side::Left) => {
                    i += 1;
                    side = Side::Right;
                }
                (Move::Adjacent, Side::Right) => j -= 1,
                (Move::Far, Side::Right) => {
                    j -= 1;
                    side = Side::Left;
                }
            }
        }
        out
    }
}

/// DP table for start node `t` (exposed for inspection).
pub fn dp_table(instance: &WTspInstance, t: usize) -> Result<DpTable> {
    let line = Line::new(instance, t)?;
    Ok(DpTable::build(&line))
}

/// Optimal tour from a fixed start `t` on a path metric, in `O(n^2)`.
pub fn solve_fixed_start(instance: &WTspInstance, t: usize) -> Result<(Tour, f64)> {
    let line = Line::new(instance, t)?;
    let n = line.n;
    if n == 1 {
        return Ok((Tour::new(vec![t])?, 0.0));
    }
    let table = DpTable::build(&line);
    let empty = line.cost.eval(0.0);
    let via_left = table.value(0, n - 1, Side::Left) + edge_cost(empty, line.dist(line.t_rank, 0));
    let via_right = table.value(0, n - 1, Side::Right) + edge_cost(empty, line.dist(line.t_rank, n - 1));
    let (side, cost) = if via_left <= via_right {
        (Side::Left, via_left)
    } else {
        (Side::Right, via_right)
    };
    let mut order = Vec::with_capacity(n);
    order.push(t);
    order.extend(
        table
            .trace(side)
            .into_iter()
            .filter(|&r| r != line.t_rank)
            .map(|r| line.order[r]),
    );
    Ok((Tour::new(order)?, cost))
}

/// Best start and tour over all start nodes, in `O(n^3)`. Ties go to the
/// smallest start index.
pub fn solve_free_start(instance: &WTspInstance) -> Result<(Tour, f64, usize)> {
    let results: Vec<(Tour, f64)> = (0..instance.n())
        .into_par_iter()
        .map(|t| solve_fixed_start(instance, t))
        .collect::<Result<_>>()?;
    let (t, (tour, cost)) = results
        .into_iter()
        .enumerate()
        .reduce(|best, cur| if cur.1 .1 < best.1 .1 { cur } else { best })
        .expect("instance has nodes");
    Ok((tour, cost, t))
}

fn path_ranks(instance: &WTspInstance) -> Result<&[usize]> {
    match &instance.metric {
        Metric::Path { rank, .. } => Ok(rank),
        m => Err(WtspError::IncompatibleMetric {
            expected: "path",
            found: m.kind(),
        }),
    }
}

/// Positions `k >= 1` of the tour where the visited node is neither the
/// leftmost nor the rightmost node still unvisited.
pub fn zigzag_violations(instance: &WTspInstance, tour: &Tour) -> Result<Vec<usize>> {
    let rank = path_ranks(instance)?;
    tour.check_against(instance)?;
    let n = tour.len();
    let mut visited = vec![false; n];
    visited[rank[tour.start()]] = true;
    let (mut lo, mut hi) = (0usize, n - 1);
    let mut bad = Vec::new();
    for (k, &v) in tour.order().iter().enumerate().skip(1) {
        while visited[lo] {
            lo += 1;
        }
        while visited[hi] {
            hi -= 1;
        }
        let r = rank[v];
        if r != lo && r != hi {
            bad.push(k);
        }
        visited[r] = true;
    }
    Ok(bad)
}

/// One exchange step of the premature-visit argument.
///
/// The collection order is the tour after the start followed by the start
/// itself. A node is visited prematurely when uncollected nodes remain on
/// both sides of it. For the first such node `v`, take the last node `u`
/// collected on the side of `v` away from the start and move `v` to just
/// after `u`. Returns `None` when nothing is premature.
pub fn exchange_premature_visit(instance: &WTspInstance, tour: &Tour) -> Result<Option<Tour>> {
    let rank = path_ranks(instance)?;
    tour.check_against(instance)?;
    let t = tour.start();
    let mut seq: Vec<usize> = tour.order()[1..].to_vec();
    seq.push(t);
    let m = seq.len();
    // suffix extremes of ranks strictly after each position
    let mut after_min = vec![usize::MAX; m];
    let mut after_max = vec![0usize; m];
    let mut after_any = vec![false; m];
    for p in (0..m.saturating_sub(1)).rev() {
        let r = rank[seq[p + 1]];
        after_min[p] = if after_any[p + 1] { after_min[p + 1].min(r) } else { r };
        after_max[p] = if after_any[p + 1] { after_max[p + 1].max(r) } else { r };
        after_any[p] = true;
    }
    let Some(p) = (0..m - 1).find(|&p| {
        let r = rank[seq[p]];
        after_any[p] && after_min[p] < r && after_max[p] > r
    }) else {
        return Ok(None);
    };
    let v = seq[p];
    let rv = rank[v];
    let start_left = rank[t] < rv;
    let q = (p + 1..m)
        .rev()
        .find(|&q| if start_left { rank[seq[q]] > rv } else { rank[seq[q]] < rv })
        .expect("premature node has later nodes on both sides");
    seq.remove(p);
    seq.insert(q, v);
    seq.pop();
    let mut order = Vec::with_capacity(m);
    order.push(t);
    order.extend(seq);
    Ok(Some(Tour::new(order)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{tour_cost, tour_cost_unchecked};
    use crate::oracle::brute_force_wtsp;

    fn one_plus_w(max_w: usize) -> CostFunction {
        CostFunction::step((0..max_w).map(|w| (w as f64, 1.0 + w as f64)), 1.0 + max_w as f64)
            .unwrap()
    }

    fn path(gaps: Vec<f64>, weights: Vec<f64>, f: CostFunction) -> WTspInstance {
        WTspInstance::new(Metric::path_from_gaps(gaps).unwrap(), weights, 0, f).unwrap()
    }

    #[test]
    fn three_node_example_matches_brute_force() {
        let inst = path(vec![1.0, 2.0], vec![0.0, 2.0, 1.0], one_plus_w(3));
        let (tour, cost) = solve_fixed_start(&inst, 0).unwrap();
        let (_, brute) = brute_force_wtsp(&inst, false).unwrap();
        assert_eq!(cost, brute);
        assert_eq!(cost, 11.0);
        assert_eq!(tour.order(), &[0, 2, 1]);
        assert_eq!(tour_cost(&inst, &tour).unwrap(), cost);
    }

    #[test]
    fn constant_cost_from_an_endpoint_is_twice_the_span() {
        for n in 2..=9 {
            let gaps: Vec<f64> = (0..n - 1).map(|k| ((k * 7) % 5 + 1) as f64).collect();
            let span: f64 = gaps.iter().sum();
            let inst = path(gaps, vec![1.0; n], CostFunction::constant(1.0).unwrap());
            let (_, cost) = solve_fixed_start(&inst, 0).unwrap();
            assert_eq!(cost, 2.0 * span);
            assert_eq!(brute_force_wtsp(&inst, false).unwrap().1, 2.0 * span);
        }
    }

    #[test]
    fn single_node() {
        let inst = path(vec![], vec![4.0], one_plus_w(1));
        let (tour, cost) = solve_fixed_start(&inst, 0).unwrap();
        assert_eq!(tour.order(), &[0]);
        assert_eq!(cost, 0.0);
    }

    #[test]
    fn table_has_n_squared_plus_n_entries_and_diagonal_base_case() {
        let inst = path(vec![1.0, 2.0, 0.0, 3.0], vec![1.0, 2.0, 3.0, 4.0, 5.0], one_plus_w(16));
        let t = 2;
        let table = dp_table(&inst, t).unwrap();
        assert_eq!(table.len(), 5 * 5 + 5);
        assert_eq!(table.states().count(), 30);
        let w_total = inst.total_weight() - inst.weights[t];
        for k in 0..5 {
            let expected = inst.distance(k, t) * inst.cost.eval(w_total);
            assert_eq!(table.value(k, k, Side::Left), expected);
            assert_eq!(table.value(k, k, Side::Right), expected);
            assert_eq!(table.state(k, k, Side::Left).mv, Move::Return);
        }
    }

    #[test]
    fn non_path_instance_is_rejected() {
        let inst = WTspInstance::new(
            Metric::star(0, vec![0.0, 1.0]),
            vec![0.0, 1.0],
            0,
            one_plus_w(1),
        )
        .unwrap();
        assert!(matches!(
            solve_fixed_start(&inst, 0),
            Err(WtspError::IncompatibleMetric { .. })
        ));
    }

    #[test]
    fn interior_start_with_heavy_start_weight() {
        // start weight must not be carried
        let inst = path(vec![2.0, 1.0, 1.0, 3.0], vec![1.0, 0.0, 50.0, 2.0, 1.0], one_plus_w(60))
            .with_start(2)
            .unwrap();
        let (tour, cost) = solve_fixed_start(&inst, 2).unwrap();
        let (_, brute) = brute_force_wtsp(&inst, false).unwrap();
        assert_eq!(cost, brute);
        assert_eq!(tour_cost_unchecked(&inst, tour.order()), cost);
        assert!(zigzag_violations(&inst, &tour).unwrap().is_empty());
    }

    #[test]
    fn permuted_path_order() {
        let inst = WTspInstance::new(
            Metric::path(vec![3, 1, 0, 2], vec![1.0, 4.0, 2.0]).unwrap(),
            vec![0.0, 3.0, 1.0, 2.0],
            0,
            one_plus_w(8),
        )
        .unwrap();
        let (tour, cost) = solve_fixed_start(&inst, 0).unwrap();
        assert_eq!(cost, brute_force_wtsp(&inst, false).unwrap().1);
        assert_eq!(tour_cost_unchecked(&inst, tour.order()), cost);
    }

    #[test]
    fn mirrored_instance_has_mirrored_optimum() {
        let gaps = vec![1.0, 3.0, 2.0, 2.0];
        let weights = vec![2.0, 0.0, 4.0, 1.0, 3.0];
        let inst = path(gaps.clone(), weights.clone(), one_plus_w(12));
        let mirrored = path(
            gaps.iter().rev().cloned().collect(),
            weights.iter().rev().cloned().collect(),
            one_plus_w(12),
        );
        for t in 0..5 {
            let a = solve_fixed_start(&inst, t).unwrap().1;
            let b = solve_fixed_start(&mirrored, 4 - t).unwrap().1;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn free_start_is_min_over_starts() {
        let inst = path(vec![2.0, 1.0, 0.0, 3.0, 1.0], vec![1.0, 4.0, 2.0, 0.0, 3.0, 5.0], one_plus_w(16));
        let (tour, cost, t) = solve_free_start(&inst).unwrap();
        let by_hand = (0..6)
            .map(|s| solve_fixed_start(&inst, s).unwrap().1)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(cost, by_hand);
        assert_eq!(tour.start(), t);
        assert_eq!(cost, brute_force_wtsp(&inst, true).unwrap().1);
    }

    #[test]
    fn zigzag_detection() {
        let inst = path(vec![1.0; 4], vec![0.0; 5], one_plus_w(1));
        let ok = Tour::new(vec![0, 4, 1, 3, 2]).unwrap();
        assert!(zigzag_violations(&inst, &ok).unwrap().is_empty());
        let bad = Tour::new(vec![0, 2, 1, 3, 4]).unwrap();
        assert_eq!(zigzag_violations(&inst, &bad).unwrap(), vec![1]);
    }

    #[test]
    fn exchange_moves_premature_node_behind_the_far_side() {
        let inst = path(vec![1.0; 4], vec![0.0, 1.0, 5.0, 1.0, 1.0], one_plus_w(10));
        // node 2 is collected while 1 and 3 are still pending
        let tour = Tour::new(vec![0, 2, 3, 4, 1]).unwrap();
        let next = exchange_premature_visit(&inst, &tour).unwrap().unwrap();
        assert_eq!(next.order(), &[0, 3, 4, 2, 1]);
        assert!(tour_cost(&inst, &next).unwrap() <= tour_cost(&inst, &tour).unwrap());
        let done = Tour::new(vec![0, 4, 3, 2, 1]).unwrap();
        assert!(exchange_premature_visit(&inst, &done).unwrap().is_none());
    }
}
