//! Cost per unit distance as a function of carried weight.

use serde::{Deserialize, Serialize};

use crate::error::{Result, WtspError};

/// Speeds at or below this are treated as a standstill and priced at `+inf`.
pub const MIN_SPEED: f64 = 1e-12;

/// One interval of a step cost function: every `w` with `previous < w <= upto`
/// is charged `rate` per unit distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub upto: f64,
    #[serde(with = "crate::io::extended_f64")]
    pub rate: f64,
}

/// Monotone nondecreasing map from carried weight to cost per unit distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostFunction {
    Constant {
        rate: f64,
    },
    /// Right-continuous step table. `f(upto)` uses that step's rate, weights
    /// beyond the last threshold use `tail`.
    Step {
        steps: Vec<Step>,
        #[serde(with = "crate::io::extended_f64")]
        tail: f64,
    },
    /// Travel time under a speed that decreases linearly from `v_max` (empty)
    /// to `v_min` (carrying `w_ref`).
    LinearSpeed { v_max: f64, v_min: f64, w_ref: f64 },
}

impl CostFunction {
    pub fn constant(rate: f64) -> Result<Self> {
        let f = CostFunction::Constant { rate };
        f.validate()?;
        Ok(f)
    }

    /// Builds a step table from `(upto, rate)` pairs plus the rate past the last threshold.
    pub fn step(steps: impl IntoIterator<Item = (f64, f64)>, tail: f64) -> Result<Self> {
        let steps = steps
            .into_iter()
            .map(|(upto, rate)| Step { upto, rate })
            .collect();
        let f = CostFunction::Step { steps, tail };
        f.validate()?;
        Ok(f)
    }

    pub fn linear_speed(v_max: f64, v_min: f64, w_ref: f64) -> Result<Self> {
        let f = CostFunction::LinearSpeed { v_max, v_min, w_ref };
        f.validate()?;
        Ok(f)
    }

    /// Checks the structural invariants; deserialized values go through here too.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(WtspError::InvalidCostFunction(msg));
        match self {
            CostFunction::Constant { rate } => {
                if !(rate.is_finite() && *rate >= 0.0) {
                    return bad(format!("constant rate must be finite and >= 0, got {rate}"));
                }
            }
            CostFunction::Step { steps, tail } => {
                let mut prev_upto = f64::NEG_INFINITY;
                let mut prev_rate = 0.0;
                for (k, s) in steps.iter().enumerate() {
                    if !s.upto.is_finite() {
                        return bad(format!("threshold {k} is not finite"));
                    }
                    if s.upto <= prev_upto {
                        return bad(format!("thresholds must be strictly increasing at step {k}"));
                    }
                    if s.rate.is_nan() || s.rate < prev_rate {
                        return bad(format!("rates must be >= 0 and nondecreasing at step {k}"));
                    }
                    prev_upto = s.upto;
                    prev_rate = s.rate;
                }
                if tail.is_nan() || *tail < prev_rate {
                    return bad("tail rate must not be below the last step rate".into());
                }
            }
            CostFunction::LinearSpeed { v_max, v_min, w_ref } => {
                if !(v_max.is_finite() && v_min.is_finite() && w_ref.is_finite()) {
                    return bad("linear speed parameters must be finite".into());
                }
                if !(*v_min >= 0.0 && v_max >= v_min && *v_max > 0.0) {
                    return bad(format!("need v_max >= v_min >= 0 and v_max > 0, got v_max={v_max}, v_min={v_min}"));
                }
                if *w_ref <= 0.0 {
                    return bad(format!("reference weight must be positive, got {w_ref}"));
                }
            }
        }
        Ok(())
    }

    /// Cost per unit distance while carrying `w`. May be `+inf`.
    pub fn eval(&self, w: f64) -> f64 {
        match self {
            CostFunction::Constant { rate } => *rate,
            CostFunction::Step { steps, tail } => {
                // first step whose threshold is >= w
                let idx = steps.partition_point(|s| s.upto < w);
                steps.get(idx).map_or(*tail, |s| s.rate)
            }
            CostFunction::LinearSpeed { v_max, v_min, w_ref } => {
                let speed = v_max - (v_max - v_min) / w_ref * w;
                if speed <= MIN_SPEED {
                    f64::INFINITY
                } else {
                    1.0 / speed
                }
            }
        }
    }

    /// Speed parameters when this is a linear-speed function.
    pub fn speeds(&self) -> Option<(f64, f64, f64)> {
        match *self {
            CostFunction::LinearSpeed { v_max, v_min, w_ref } => Some((v_max, v_min, w_ref)),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CostFunction::Constant { .. } => "constant",
            CostFunction::Step { .. } => "step",
            CostFunction::LinearSpeed { .. } => "linear_speed",
        }
    }
}

/// `rate * distance` with `0 * inf = 0`: a zero-length edge is free at any rate.
#[inline]
pub fn edge_cost(rate: f64, distance: f64) -> f64 {
    if distance == 0.0 {
        0.0
    } else {
        rate * distance
    }
}
