use rayon::prelude::*;

use crate::cost::edge_cost;
use crate::error::{Result, WtspError};
use crate::instance::{Tour, WTspInstance};

/// Largest instance the brute force accepts.
pub const MAX_BRUTE_FORCE_NODES: usize = 12;

/// Exhaustive minimum over all tours. With `free_start` every node is tried as
/// the start, otherwise tours begin at `instance.start`. Among equal costs the
/// lexicographically smallest order wins.
pub fn brute_force_wtsp(instance: &WTspInstance, free_start: bool) -> Result<(Tour, f64)> {
    let n = instance.n();
    if n > MAX_BRUTE_FORCE_NODES {
        return Err(WtspError::TooLarge {
            what: "brute force",
            n,
            limit: MAX_BRUTE_FORCE_NODES,
        });
    }
    let starts: Vec<usize> = if free_start {
        (0..n).collect()
    } else {
        vec![instance.start]
    };
    let mut best: Option<(Vec<usize>, f64)> = None;
    for t in starts {
        let (order, cost) = best_from(instance, t);
        if best.as_ref().is_none_or(|(_, c)| cost < *c) {
            best = Some((order, cost));
        }
    }
    let (order, cost) = best.expect("at least one start");
    Ok((Tour::new(order)?, cost))
}

/// Best tour from a fixed start; branches on the second node in parallel.
fn best_from(instance: &WTspInstance, start: usize) -> (Vec<usize>, f64) {
    let n = instance.n();
    if n == 1 {
        return (vec![start], 0.0);
    }
    let rest: Vec<usize> = (0..n).filter(|&v| v != start).collect();
    let branches: Vec<(Vec<usize>, f64)> = rest
        .par_iter()
        .map(|&second| {
            let mut search = Search {
                inst: instance,
                start,
                path: Vec::with_capacity(n),
                used: vec![false; n],
                best: None,
            };
            search.used[start] = true;
            search.used[second] = true;
            search.path.push(start);
            search.path.push(second);
            let first_leg = edge_cost(instance.cost.eval(0.0), instance.distance(start, second));
            search.dfs(first_leg, instance.weights[second]);
            search.best.expect("every branch completes")
        })
        .collect();
    // branches are in ascending order of the second node, so the first strict
    // minimum is also the lexicographically smallest
    let mut best: Option<(Vec<usize>, f64)> = None;
    for (order, cost) in branches {
        if best.as_ref().is_none_or(|(_, c)| cost < *c) {
            best = Some((order, cost));
        }
    }
    best.expect("n >= 2")
}

struct Search<'a> {
    inst: &'a WTspInstance,
    start: usize,
    path: Vec<usize>,
    used: Vec<bool>,
    best: Option<(Vec<usize>, f64)>,
}

impl Search<'_> {
    fn dfs(&mut self, cost: f64, carried: f64) {
        // costs are nonnegative, so a prefix at least as expensive as the
        // incumbent cannot produce a strictly better tour
        if let Some((_, b)) = &self.best {
            if cost >= *b {
                return;
            }
        }
        let n = self.used.len();
        let last = *self.path.last().unwrap();
        if self.path.len() == n {
            let total = cost + edge_cost(self.inst.cost.eval(carried), self.inst.distance(last, self.start));
            if self.best.as_ref().is_none_or(|(_, b)| total < *b) {
                self.best = Some((self.path.clone(), total));
            }
            return;
        }
        let rate = self.inst.cost.eval(carried);
        for v in 0..n {
            if self.used[v] {
                continue;
            }
            self.used[v] = true;
            self.path.push(v);
            let step = edge_cost(rate, self.inst.distance(last, v));
            self.dfs(cost + step, carried + self.inst.weights[v]);
            self.path.pop();
            self.used[v] = false;
        }
    }
}
