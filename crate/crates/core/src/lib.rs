//! Weighted traveling salesman: the cost of every edge is its length times a
//! monotone function of the weight collected so far.
//!
//! - [`path_dp`]: exact `O(n^2)` / `O(n^3)` DP on path metrics
//! - [`star`]: constant-factor approximation on star metrics
//! - [`linear`]: start selection for linear speed decrease on general metrics
//! - [`hardness`]: Partition to star-metric reduction
//! - [`cluster`]: k-means aggregation for large path instances
//! - [`ttp`]: traveling thief benchmark files, packing plans, baselines
//! - [`oracle`]: brute-force and knapsack reference solvers

pub mod cluster;
pub mod cost;
pub mod error;
pub mod hardness;
pub mod instance;
pub mod linear;
pub mod io;
pub mod oracle;
pub mod path_dp;
pub mod star;
pub mod synth;
pub mod ttp;

pub use cost::CostFunction;
pub use error::{Result, WtspError};
pub use instance::{carried_weights, tour_cost, validate_metric, Metric, Tour, WTspInstance};
