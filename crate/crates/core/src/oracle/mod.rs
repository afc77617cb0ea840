//! Exact reference solvers used to check the DP and the approximations.

mod brute;
mod knapsack;
mod partition;

pub use brute::{brute_force_wtsp, MAX_BRUTE_FORCE_NODES};
pub use knapsack::{
    knapsack_dp, knapsack_exact, knapsack_fptas, total_size, total_value, KnapsackItem,
    MAX_DP_CELLS, MAX_ENUMERATION_ITEMS,
};
pub use partition::partition_oracle;
