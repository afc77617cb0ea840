use crate::error::{Result, WtspError};

/// Whether `values` splits into two parts of equal sum (subset-sum DP).
pub fn partition_oracle(values: &[u64]) -> Result<bool> {
    if let Some(pos) = values.iter().position(|&v| v == 0) {
        return Err(WtspError::InvalidParameter(format!(
            "partition entries must be positive (entry {pos} is 0)"
        )));
    }
    let total: u64 = values.iter().sum();
    if total % 2 == 1 {
        return Ok(false);
    }
    let half = (total / 2) as usize;
    let mut reachable = vec![false; half + 1];
    reachable[0] = true;
    for &v in values {
        let v = v as usize;
        if v > half {
            continue;
        }
        for s in (v..=half).rev() {
            if reachable[s - v] {
                reachable[s] = true;
            }
        }
    }
    Ok(reachable[half])
}
