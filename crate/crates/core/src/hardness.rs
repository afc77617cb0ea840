//! Reduction from Partition to star-metric W-TSP.
//!
//! Each entry `s_i` becomes a leaf at distance `s_i` with weight `s_i`, plus
//! one extra leaf of distance and weight `s_max`. Travel is free up to half
//! the total, costs 1 per unit up to `lambda + s_max`, and is impossible
//! beyond. The optimum is at most `s_max + lambda` exactly when the entries
//! split evenly.

use crate::cost::CostFunction;
use crate::error::{Result, WtspError};
use crate::instance::{Metric, Tour, WTspInstance};
use crate::oracle::{brute_force_wtsp, partition_oracle, MAX_BRUTE_FORCE_NODES};

/// Largest multiset [`check_threshold`] accepts.
pub const MAX_THRESHOLD_ENTRIES: usize = MAX_BRUTE_FORCE_NODES - 2;

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedInstance {
    /// node 0 is the center, node `i + 1` is entry `i`, the last node is the extra leaf
    pub instance: WTspInstance,
    pub lambda: u64,
    pub s_max: u64,
}

impl ReducedInstance {
    pub fn threshold(&self) -> f64 {
        (self.s_max + self.lambda) as f64
    }
}

pub fn reduce_partition(values: &[u64]) -> Result<ReducedInstance> {
    if values.is_empty() {
        return Err(WtspError::InvalidParameter("partition input is empty".into()));
    }
    if let Some(pos) = values.iter().position(|&v| v == 0) {
        return Err(WtspError::InvalidParameter(format!(
            "partition entries must be positive (entry {pos} is 0)"
        )));
    }
    let lambda: u64 = values.iter().sum();
    let s_max = *values.iter().max().unwrap();
    let leaves = values.iter().copied().chain([s_max]).map(|v| v as f64);
    let distances: Vec<f64> = std::iter::once(0.0).chain(leaves.clone()).collect();
    let weights: Vec<f64> = std::iter::once((lambda + s_max + 1) as f64).chain(leaves).collect();
    let cost = CostFunction::step(
        [(lambda as f64 / 2.0, 0.0), ((lambda + s_max) as f64, 1.0)],
        f64::INFINITY,
    )?;
    let instance = WTspInstance::new(Metric::star(0, distances), weights, 0, cost)?
        .with_name(format!("partition-{}", values.len()));
    Ok(ReducedInstance {
        instance,
        lambda,
        s_max,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdCheck {
    pub partitionable: bool,
    pub optimum: f64,
    pub optimal_tour: Tour,
    pub threshold: f64,
}

impl ThresholdCheck {
    /// Whether the optimum is within the threshold exactly when a split exists.
    pub fn holds(&self) -> bool {
        (self.optimum <= self.threshold) == self.partitionable
    }
}

/// Brute-forces the reduced instance from the center; other starts collect
/// the center weight early and cost infinity.
pub fn check_threshold(values: &[u64]) -> Result<ThresholdCheck> {
    if values.len() > MAX_THRESHOLD_ENTRIES {
        return Err(WtspError::TooLarge {
            what: "partition entries",
            n: values.len(),
            limit: MAX_THRESHOLD_ENTRIES,
        });
    }
    let reduced = reduce_partition(values)?;
    let (optimal_tour, optimum) = brute_force_wtsp(&reduced.instance, false)?;
    Ok(ThresholdCheck {
        partitionable: partition_oracle(values)?,
        optimum,
        optimal_tour,
        threshold: reduced.threshold(),
    })
}
